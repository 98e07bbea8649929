import json

import pytest

from csystems.instances import (
    Fragment,
    FragmentConfig,
    build_context,
    build_universe,
    enumerate_fragment,
    from_config,
)
from csystems.kernel import Mor, WindowOverflow
from oracles import PointModel, context_points, telescope_count, universe_points


def test_unit_fragment_counts(unit):
    cs, _ = unit
    frag = enumerate_fragment(cs, max_len=3)
    assert len(frag.objects) == 4
    homs = [frag.hom(Y, X) for Y in frag.objects for X in frag.objects]
    assert len(homs) == 16 and all(len(h) == 1 for h in homs)


def test_context_fragment_objects():
    cs = build_context([2])
    frag = enumerate_fragment(cs, max_len=2)
    assert [X.key for X in frag.objects] == [(), (0,), (0, 0)]


def test_context_points_lexicographic():
    cs = build_context([2, 3])
    X = cs.decode_ob([0, 1])
    assert list(cs.points(X)) == context_points([2, 3], (0, 1))
    assert len(cs.points(X)) == 6


def test_context_hom_counts_by_brute_force(ctx2):
    cs, frag = ctx2
    X = cs.decode_ob([0, 0])
    assert len(cs.points(X)) == 4
    assert len(frag.hom(cs.decode_ob([0]), X)) == 4 ** 2
    assert sorted(frag.hom(cs.decode_ob([0]), X), key=lambda f: f.key) == frag.hom(cs.decode_ob([0]), X)


def test_singleton_context_is_terminal_like():
    cs = build_context([1])
    frag = enumerate_fragment(cs, max_len=3)
    for Y in frag.objects:
        assert cs.point_count(Y) == 1
        for X in frag.objects:
            assert cs.hom_size(Y, X) == 1


def test_universe_object_count_matches_telescope_oracle():
    cs = build_universe([1, 2])
    frag = enumerate_fragment(cs, max_len=2)
    assert len(frag.objects) == telescope_count([1, 2], 2) == 9


def test_universe_points_match_oracle(univ):
    cs, frag = univ
    for X in frag.objects:
        assert list(cs.points(X)) == universe_points([1, 2], X.key)
    single = cs.decode_ob([[1]])
    assert len(cs.points(single)) == 2


def test_universe_with_empty_code_still_has_pullbacks():
    from csystems.kernel import check_all_pullbacks, check_c0_axioms, check_s_axioms

    cs = build_universe([0, 1])
    frag = enumerate_fragment(cs, max_len=2)
    empty = cs.decode_ob([[0]])
    assert cs.point_count(empty) == 0
    for check in (check_c0_axioms, check_s_axioms, check_all_pullbacks):
        assert check(cs, frag).passed


@pytest.mark.parametrize("fixture", ["ctx2", "ctx22", "univ"])
def test_operations_match_point_model(fixture, request):
    cs, frag = request.getfixturevalue(fixture)
    model = PointModel(cs)
    for X in frag.objects:
        if X.length == 0:
            continue
        assert cs.p(X).key == model.p_table(X)
        base = cs.ft(X)
        for Y in frag.objects:
            for f in frag.hom(Y, base):
                assert cs.star(f, X).key == model.star_key(f, X)
                assert cs.q(f, X).key == model.q_table(f, X)
                assert model.is_set_pullback(f, X)
    for Y in frag.objects:
        for X in frag.objects:
            if X.length == 0:
                continue
            for f in frag.pick(("oracle_sf", Y, X), frag.hom(Y, X)):
                s = cs.sf(f)
                assert (s.target.key, s.key) == model.sf(f)


def test_composition_matches_point_model(ctx22):
    cs, frag = ctx22
    model = PointModel(cs)
    A, B, C = cs.decode_ob([0]), cs.decode_ob([1, 0]), cs.decode_ob([0, 1])
    for f, g in frag.tuples("oracle_comp", frag.hom(A, B), frag.hom(B, C)):
        assert cs.comp(f, g).key == model.comp_table(f, g)


def test_encoding_roundtrip(ctx22, univ):
    for cs, frag in (ctx22, univ):
        for X in frag.objects:
            enc = cs.encode_ob(X)
            assert cs.decode_ob(json.loads(json.dumps(enc))) == X
        for f in frag.pick("enc", frag.morphisms()):
            assert cs.decode_mor(json.loads(json.dumps(cs.encode_mor(f)))) == f


@pytest.mark.parametrize(
    "bad",
    [
        {"kind": "context", "base_sizes": []},
        {"kind": "context", "base_sizes": [0]},
        {"kind": "universe", "els": [0, 0]},
        {"kind": "nope"},
        ["unit"],
        {"kind": "mutant", "mutation": "nope"},
    ],
)
def test_bad_instance_configs_are_rejected(bad):
    with pytest.raises(ValueError):
        from_config(bad)


def test_decode_rejects_garbage(ctx2):
    cs, _ = ctx2
    with pytest.raises(ValueError):
        cs.decode_ob([5])
    with pytest.raises(ValueError):
        cs.decode_mor({"source": [0], "target": [0], "table": [0, 9]})
    with pytest.raises(ValueError):
        cs.decode_mor({"source": [0]})


def test_fragment_config_validation():
    assert FragmentConfig.from_json({"max_len": 2}).max_len == 2
    with pytest.raises(ValueError):
        FragmentConfig.from_json({"max_len": -1})
    with pytest.raises(ValueError):
        FragmentConfig.from_json({"bogus": 1})
    with pytest.raises(ValueError):
        FragmentConfig.from_json({"hom_cap": 0})


def test_sampling_is_deterministic_and_flagged():
    cs = build_context([2])
    a = enumerate_fragment(cs, max_len=3, hom_cap=100)
    b = enumerate_fragment(cs, max_len=3, hom_cap=100)
    assert a.truncated and a.truncated_homs
    assert a.digest() == b.digest() and a.dumps() == b.dumps()
    c = enumerate_fragment(cs, max_len=3, hom_cap=100, rng_seed=1)
    assert c.digest() != a.digest()


def test_point_cap_drops_objects_and_descendants():
    cs = build_context([2])
    frag = enumerate_fragment(cs, max_len=4, point_cap=4)
    assert max(X.length for X in frag.objects) == 2
    assert frag.dropped_objects == 2 and frag.truncated


def test_extended_fragment_is_one_longer(ctx2):
    _, frag = ctx2
    assert frag.extended().max_len == frag.max_len + 1
    assert frag.extended() is frag.extended()


def test_hom_outside_window_is_empty():
    class Blind(type(build_context([1]))):
        def hom_size(self, Y, X):
            raise WindowOverflow("blind")

    cs = Blind([1])
    frag = Fragment(cs, FragmentConfig(1))
    assert frag.hom(cs.pt(), cs.pt()) == [] and not frag.truncated_homs

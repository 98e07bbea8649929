from dataclasses import replace

import pytest

from csystems.kernel import FAIL, PASS, Section, WindowOverflow, ft_iter, op_delta, op_St, op_Tt
from csystems.subsystems import (
    SubsystemSeed,
    check_closed,
    check_determination,
    check_roundtrip,
    close_window,
    member_morphisms,
    mor_member,
    verify_subsystem_lemmas,
)
from conftest import make


def naive_closure(cs, fragment, objects, sections):
    """Fixpoint of the six conditions by scanning every pair of the fragment."""
    B = {cs.pt(), *objects}
    Bt = set(sections)
    while True:
        size = len(B) + len(Bt)
        for X in list(B):
            B.add(cs.ft(X))
            if X.length > 0:
                Bt.add(op_delta(cs, X))
        for s in list(Bt):
            B.add(s.target)
        for Y in list(B):
            for r in list(Bt):
                i = r.target.length - cs.ft(Y).length
                if Y.length > 0 and i >= 1 and ft_iter(cs, r.target, i) == cs.ft(Y):
                    Bt.add(op_Tt(cs, Y, r))
        for s in list(Bt):
            for r in list(Bt):
                i = r.target.length - s.target.length
                if i >= 1 and ft_iter(cs, r.target, i) == s.target:
                    Bt.add(op_St(cs, s, r))
        B = {X for X in B if X.length <= fragment.max_len}
        Bt = {s for s in Bt if s.target.length <= fragment.max_len}
        if len(B) + len(Bt) == size:
            return B, Bt


def test_empty_seed_gives_only_pt(ctx2):
    cs, _ = ctx2
    w = close_window(cs, SubsystemSeed(), 3)
    assert w.B == {cs.pt()} and not w.Bt and w.frontier == []


def test_unit_seed_gives_delta_chain():
    cs, fragment = make("unit", max_len=3)
    w = close_window(cs, SubsystemSeed([cs.decode_ob(1)]), 3)
    assert w.B == {cs.decode_ob(n) for n in range(4)}
    assert w.Bt == {op_delta(cs, cs.decode_ob(n)) for n in (1, 2)}
    assert cs.decode_ob(4) in w.frontier
    assert check_closed(cs, w.B, w.Bt, 3).status == PASS


@pytest.mark.parametrize("seed_kind", ["objects", "sections", "mixed"])
def test_closure_matches_naive_fixpoint(seed_kind):
    # the naive scan works in a window twice as long, then both are cut to L
    L = 1
    cs, big = make("context", [2], max_len=2 * L)
    objects = [X for X in big.objects if X.length == 1][:1] if seed_kind != "sections" else []
    sections = [s for s in big.sections() if s.target.length == 1][-1:] if seed_kind != "objects" else []
    B, Bt = naive_closure(cs, big, objects, sections)
    w = close_window(cs, SubsystemSeed(objects, sections), L)
    assert w.B == {X for X in B if X.length <= L}
    assert w.Bt == {s for s in Bt if s.target.length <= L}


def test_closure_of_section_seed_includes_boundary(ctx22):
    cs, fragment = ctx22
    s = fragment.sections_of(cs.decode_ob([1, 0]))[0]
    w = close_window(cs, SubsystemSeed([], [s]), 2)
    assert s in w.Bt and s.target in w.B and cs.decode_ob([1]) in w.B
    assert check_closed(cs, w.B, w.Bt, 2).status == PASS


def test_full_fragment_is_closed_and_everything_is_a_member(ctx2):
    cs, fragment = ctx2
    B = set(fragment.objects)
    Bt = set(fragment.sections())
    assert check_closed(cs, B, Bt, 2).status == PASS
    for f in fragment.morphisms():
        if f.source.length + 1 <= 2:
            assert mor_member(cs, f, B, Bt, 2)


def test_dropped_delta_is_reported_as_cond6(ctx22):
    cs, _ = ctx22
    w = close_window(cs, SubsystemSeed([cs.decode_ob([1])]), 2)
    victim = op_delta(cs, cs.decode_ob([1]))
    report = check_closed(cs, w.B, w.Bt - {victim}, 2)
    assert report.status == FAIL
    assert any(cx["condition"] == "cond6_delta" for cx in report.counterexamples)


def test_mor_member_examples(ctx22):
    cs, fragment = ctx22
    X = cs.decode_ob([0])
    w = close_window(cs, SubsystemSeed([X]), 2)
    assert mor_member(cs, cs.ident(X), w.B, w.Bt, 2)
    assert mor_member(cs, cs.p(X), w.B, w.Bt, 2)
    # a point pt -> X is a member exactly when its section is in B~
    for f in fragment.hom(cs.pt(), X):
        assert mor_member(cs, f, w.B, w.Bt, 2) == (Section(cs.sf(f)) in w.Bt)
    Y = cs.decode_ob([1])
    assert not mor_member(cs, cs.ident(Y), w.B, w.Bt, 2)


def test_mor_member_overflows_above_window(ctx2):
    cs, fragment = ctx2
    X = cs.decode_ob([0, 0])
    w = close_window(cs, SubsystemSeed([X]), 2)
    with pytest.raises(WindowOverflow):
        mor_member(cs, cs.ident(X), w.B, w.Bt, 2)


def test_object_seed_and_delta_seed_determine_the_same_window(ctx22):
    cs, fragment = ctx22
    X = cs.decode_ob([1])
    w1 = close_window(cs, SubsystemSeed([X]), 2)
    w2 = close_window(cs, SubsystemSeed([], [op_delta(cs, X)]), 2)
    assert w1.B == w2.B and w1.Bt == w2.Bt
    assert check_determination(cs, w1, w2, fragment).status == PASS


@pytest.mark.parametrize("fixture", ["ctx2", "ctx22", "univ", "unit"])
def test_lemmas_and_roundtrip_on_fixtures(fixture, request):
    cs, fragment = request.getfixturevalue(fixture)
    L = fragment.max_len
    objects = [X for X in fragment.objects if 0 < X.length <= L]
    w = close_window(cs, SubsystemSeed([objects[-1]]), L)
    assert verify_subsystem_lemmas(cs, w, fragment).status == PASS
    assert check_roundtrip(cs, w, fragment).status == PASS
    members = member_morphisms(cs, w, fragment)
    assert all(f.source in w.B and f.target in w.B for f in members)


def test_roundtrip_catches_a_dropped_section(ctx2):
    cs, fragment = ctx2
    w = close_window(cs, SubsystemSeed([cs.decode_ob([0])]), 2)
    broken = replace(w, Bt=w.Bt - {min(w.Bt, key=lambda s: s.sort_key())})
    assert check_roundtrip(cs, broken, fragment).status == FAIL


def test_seed_json_roundtrip_and_validation(ctx2, fixture_dir):
    import json

    cs, _ = ctx2
    data = json.loads((fixture_dir / "seeds" / "context_object.json").read_text())
    seed = SubsystemSeed.from_json(cs, data)
    assert seed.to_json(cs) == data
    with pytest.raises(ValueError):
        SubsystemSeed.from_json(cs, json.loads((fixture_dir / "seeds" / "malformed.json").read_text()))


def test_budget_marks_window_unsaturated(ctx2):
    cs, _ = ctx2
    w = close_window(cs, SubsystemSeed([cs.decode_ob([0])]), 2, budget=2)
    assert not w.saturated_within_window

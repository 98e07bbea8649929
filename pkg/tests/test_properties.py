from hypothesis import HealthCheck, given, settings
from hypothesis import strategies as st

from csystems.congruence import check_prop_conditions, cong_close
from csystems.kernel import PASS, Section, ft_mor
from csystems.subsystems import SubsystemSeed, check_closed, close_window
from conftest import make
from oracles import PointModel, naive_congruence
from test_congruence import brute_instances, pairs_of

SMALL, SMALL_FRAG = make("context", [2, 2], max_len=1)
SMALL_AUX = SMALL_FRAG.extended()
SMALL_INSTANCES = brute_instances(SMALL, SMALL_AUX.objects, SMALL_AUX.sections())
CTX, CTX_FRAG = make("context", [2, 2], max_len=2)
UNIV, UNIV_FRAG = make("universe", [1, 2], max_len=2)

fast = settings(max_examples=25, deadline=None, suppress_health_check=[HealthCheck.too_slow])


def same_length_pairs(elements, length_of):
    by_len = {}
    for e in elements:
        by_len.setdefault(length_of(e), []).append(e)
    groups = [g for g in by_len.values() if len(g) > 1]
    return st.sampled_from(groups).flatmap(lambda g: st.tuples(st.sampled_from(g), st.sampled_from(g)))


ob_pairs = same_length_pairs(SMALL_AUX.objects, lambda X: X.length)
sect_pairs = same_length_pairs(SMALL_AUX.sections(), lambda s: s.target.length)
seeds = st.lists(st.one_of(ob_pairs, sect_pairs), max_size=3)


@fast
@given(seeds)
def test_closure_agrees_with_naive_oracle(pairs):
    ob, sect = cong_close(SMALL, pairs, SMALL_FRAG)
    expected = naive_congruence(SMALL_INSTANCES, pairs, SMALL_AUX.objects + SMALL_AUX.sections())
    assert pairs_of(ob, sect) == expected


@fast
@given(seeds)
def test_closure_is_idempotent_and_compatible(pairs):
    ob, sect = cong_close(SMALL, pairs, SMALL_FRAG)
    again = [(c[0], e) for part in (ob, sect) for c in part.classes() for e in c[1:]]
    ob2, sect2 = cong_close(SMALL, again, SMALL_FRAG)
    assert ob2 == ob and sect2 == sect
    report = check_prop_conditions(SMALL, ob, sect, SMALL_FRAG)
    assert not any(k.startswith("failures[prop_1") for k in report.stats)
    for a, b in pairs:
        assert (ob if a in ob else sect).same(a, b)


@fast
@given(
    st.lists(st.sampled_from([X for X in CTX_FRAG.objects if X.length > 0]), max_size=2),
    st.lists(st.sampled_from(CTX_FRAG.sections()), max_size=2),
)
def test_closed_windows_are_closed_and_idempotent(objects, sections):
    w = close_window(CTX, SubsystemSeed(objects, sections), 2)
    assert check_closed(CTX, w.B, w.Bt, 2).status == PASS
    assert set(objects) <= w.B and set(sections) <= w.Bt
    w2 = close_window(CTX, SubsystemSeed(sorted(w.B - {CTX.pt()}, key=lambda X: X.sort_key()), list(w.Bt)), 2)
    assert (w2.B, w2.Bt) == (w.B, w.Bt)


@fast
@given(st.sampled_from([(CTX, CTX_FRAG), (UNIV, UNIV_FRAG)]), st.data())
def test_random_morphisms_satisfy_the_s_laws(pair, data):
    cs, fragment = pair
    model = PointModel(cs)
    candidates = [f for f in fragment.morphisms() if f.target.length > 0 and f.source.length < 2]
    f = data.draw(st.sampled_from(candidates))
    s = cs.sf(f)
    assert (s.target.key, s.key) == model.sf(f)
    assert cs.comp(s, cs.p(s.target)) == cs.ident(f.source)
    # f factors as s_f followed by q(ft f, target)
    assert cs.comp(s, cs.q(ft_mor(cs, f), f.target)) == f
    assert Section(s).target == cs.star(ft_mor(cs, f), f.target)


@fast
@given(st.data())
def test_composition_is_associative_pointwise(data):
    model = PointModel(CTX)
    objects = [X for X in CTX_FRAG.objects if X.length <= 1]
    A, B, C, D = (data.draw(st.sampled_from(objects)) for _ in range(4))
    f = data.draw(st.sampled_from(CTX_FRAG.hom(A, B)))
    g = data.draw(st.sampled_from(CTX_FRAG.hom(B, C)))
    h = data.draw(st.sampled_from(CTX_FRAG.hom(C, D)))
    left = CTX.comp(CTX.comp(f, g), h)
    assert left == CTX.comp(f, CTX.comp(g, h))
    assert left.key == model.comp_table(CTX.comp(f, g), h)

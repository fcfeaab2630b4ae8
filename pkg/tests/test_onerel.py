import pytest
from hypothesis import HealthCheck, given, settings
from hypothesis import strategies as st

from oracles import relator_quotient_dims
from sullivan_inert.attach import INERT, NOT_INERT, inertness_check, wedge_of_spheres_model
from sullivan_inert.gca import Caps
from sullivan_inert.lie import magnus_log
from sullivan_inert.onerel import (
    OneRelatorScenario,
    aspherical_check,
    build_d0,
    build_dg_lie,
    circle_fiber_table,
    circle_inertness_scenario,
    corollary_model,
    dg_lie_homology,
    ideal_quotient_dims,
)
from sullivan_inert.sullivan import CdgaPresentation, HypothesisError

CAPS = Caps(8, 6)


def _oracle(word, r, L):
    alpha = magnus_log(word, r, L)
    return relator_quotient_dims(r, alpha.component(alpha.leading_length).to_tensor(), L)


@pytest.mark.parametrize("word,h0", [
    ("[a,b]", [2, 0, 0, 0, 0, 0]),
    ("a^2", [1, 0, 0, 0, 0, 0]),
    ("a", [1, 0, 0, 0, 0, 0]),
    ("a^2b^3", [1, 0, 0, 0, 0, 0]),
    ("[a,[a,b]]", [2, 1, 1, 1, 2, 2]),
])
def test_two_circle_homology(word, h0):
    scn = OneRelatorScenario(2, word, CAPS)
    D = build_dg_lie(scn)
    assert D.square_zero() and D.square_zero(leading=False)
    hom = dg_lie_homology(D, CAPS)
    assert hom.h0() == h0 == _oracle(word, 2, 6)
    assert hom.higher_vanishes
    assert ideal_quotient_dims(2, D.lead, 6) == h0


def test_genus_two_relator_homology():
    scn = OneRelatorScenario(4, "[a,b][c,d]", CAPS)
    hom = dg_lie_homology(build_dg_lie(scn), CAPS)
    assert hom.higher_vanishes
    assert hom.h0()[0] == 4
    assert hom.h0() == _oracle("[a,b][c,d]", 4, 6)


def test_trivial_word_is_neither_aspherical_nor_inert():
    scn = OneRelatorScenario(2, "abBA", CAPS)
    assert scn.trivial
    hom = dg_lie_homology(build_dg_lie(scn), CAPS)
    assert not hom.higher_vanishes
    rep = aspherical_check(scn, CAPS, homology=hom)
    assert rep.aspherical is False
    v = circle_inertness_scenario(scn)
    assert v.status == NOT_INERT
    assert v.checks["criteria_agree"]


def test_one_circle_is_rejected():
    with pytest.raises(HypothesisError):
        OneRelatorScenario(1, "a^2", CAPS)


@pytest.mark.parametrize("word", ["[a,b]", "a^2", "[a,[a,b]]"])
def test_cochain_datum_identities(word):
    datum = build_d0(OneRelatorScenario(2, word, CAPS))
    assert datum.square_zero() and datum.square_zero(graded=True)
    assert datum.anticommutes() and datum.anticommutes(graded=True)
    assert datum.matches_cone()
    assert datum.total_stages() is not None
    model, closed, basis = corollary_model(datum)
    assert closed
    assert all(not model.d(v) for v in model.d.values.values())


@pytest.mark.parametrize("word,r", [("[a,b]", 2), ("a^2", 2)])
def test_aspherical_and_inert(word, r):
    scn = OneRelatorScenario(r, word, CAPS)
    rep = aspherical_check(scn, CAPS)
    assert rep.aspherical
    assert all(rep.checks.values())
    assert rep.v_dims == rep.h0_dims
    v = circle_inertness_scenario(scn)
    assert v.status == INERT
    assert all(v.checks.values())
    table = circle_fiber_table(v)
    assert table.matches


def test_circle_route_through_the_general_entry_point():
    W = wedge_of_spheres_model([1, 1], CAPS)
    v = inertness_check(W, 1, "[a,b]", CAPS)
    assert v.status == INERT
    assert v.route == "one-relator"


def test_asphericity_of_models_given_directly():
    torus = aspherical_check(CdgaPresentation.exterior(["a", "b"]), Caps(4, 6))
    assert torus.aspherical
    sphere = aspherical_check(CdgaPresentation.sphere(2), Caps(6, None))
    assert sphere.aspherical is False


letters = st.lists(st.tuples(st.integers(0, 1), st.sampled_from([1, -1])), min_size=1, max_size=6)


def _reduce(word):
    out = []
    for x in word:
        if out and out[-1][0] == x[0] and out[-1][1] == -x[1]:
            out.pop()
        else:
            out.append(x)
    return out


@settings(max_examples=15, deadline=None, suppress_health_check=[HealthCheck.filter_too_much])
@given(letters.map(_reduce).filter(bool))
def test_nontrivial_words_are_aspherical_and_inert(word):
    text = "".join("ab"[i] if e > 0 else "AB"[i] for i, e in word)
    caps = Caps(6, 4)
    scn = OneRelatorScenario(2, text, caps)
    hom = dg_lie_homology(build_dg_lie(scn), caps)
    assert hom.higher_vanishes
    assert hom.h0() == _oracle(text, 2, 4)
    rep = aspherical_check(scn, caps, homology=hom)
    assert rep.aspherical and all(rep.checks.values())
    v = circle_inertness_scenario(scn)
    assert v.inert == rep.aspherical
    assert all(v.checks.values())

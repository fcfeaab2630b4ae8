from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from oracles import free_lie_dims_by_degree, model_cohomology, presentation_cohomology
from sullivan_inert.attach import wedge_of_spheres_model
from sullivan_inert.gca import Caps
from sullivan_inert.lie import magnus_log
from sullivan_inert.onerel import ideal_quotient_dims
from sullivan_inert.sullivan import (
    CdgaPresentation,
    HypothesisError,
    SullivanAlgebra,
    acyclic_closure,
    closure_cohomology_dims,
    minimal_model,
    quadratic_model,
    quadratic_part,
)

UNCAPPED = Caps(8, None)


def s2xs2():
    return CdgaPresentation(["1", "a", "b", "ab"], [0, 2, 2, 4],
                            {("a", "b"): {"ab": 1}, ("b", "a"): {"ab": 1}})


def _check_model(H, caps, top):
    M, rho = minimal_model(H, caps)
    assert M.is_minimal()
    assert M.check_sullivan()
    M.check_square_zero()
    assert not rho.check_chain_map()
    want = [presentation_cohomology(H, k) for k in range(top + 1)]
    assert [model_cohomology(M, k) for k in range(top + 1)] == want
    return M


def test_two_sphere_model():
    M = _check_model(CdgaPresentation.sphere(2), Caps(10, None), 10)
    assert M.degree_counts() == {2: 1, 3: 1}
    assert M.dvalue("v3_1")


def test_product_of_two_spheres_model():
    M = _check_model(s2xs2(), UNCAPPED, 8)
    assert M.degree_counts() == {2: 2, 3: 2}


def test_complex_projective_plane_model():
    M = _check_model(CdgaPresentation.truncated_polynomial(2, 2), UNCAPPED, 8)
    assert M.degree_counts() == {2: 1, 5: 1}


def test_odd_sphere_model_has_one_closed_generator():
    M = _check_model(CdgaPresentation.sphere(3), UNCAPPED, 8)
    assert M.degree_counts() == {3: 1}
    assert all(not v for v in M.d.values.values())


def test_sphere_product_via_tensor():
    X = CdgaPresentation.sphere(2).tensor(CdgaPresentation.sphere(3, "t"))
    M = _check_model(X, UNCAPPED, 8)
    assert M.degree_counts() == {2: 1, 3: 2}


@pytest.mark.parametrize("dims", [[2, 2], [2, 3], [3, 3], [2, 2, 2]])
def test_wedge_generators_count_free_lie_algebra(dims):
    W = wedge_of_spheres_model(dims, UNCAPPED)
    oracle = free_lie_dims_by_degree([d - 1 for d in dims], 7)
    # generators in degree k are dual to the Lie algebra in degree k - 1
    assert {k: v for k, v in W.degree_counts().items() if k <= 8} == {
        k + 1: v for k, v in oracle.items() if v
    }
    assert W.is_quadratic()


def test_torus_model_is_exterior_on_two_closed_generators():
    M, _ = minimal_model(CdgaPresentation.exterior(["a", "b"]), Caps(4, 6))
    assert [(g.degree, g.weight) for g in M.generators] == [(1, 1), (1, 1)]
    assert all(not v for v in M.d.values.values())


def test_genus_two_surface_model_counts_match_ideal_quotient():
    M, _ = minimal_model(CdgaPresentation.surface(2), Caps(4, 6))
    counts = {}
    for g in M.generators:
        counts[(g.degree, g.weight)] = counts.get((g.degree, g.weight), 0) + 1
    lead = magnus_log("[a,b][c,d]", 4, 6).component(2)
    oracle = ideal_quotient_dims(4, lead, 6)
    assert [counts.get((1, w), 0) for w in range(1, 7)] == oracle == [4, 5, 16, 45, 144, 440]
    assert all(k[0] == 1 for k in counts)


def test_acyclic_closure_of_two_sphere_is_contractible():
    M, _ = minimal_model(CdgaPresentation.sphere(2), UNCAPPED)
    ext = acyclic_closure(M, UNCAPPED)
    assert closure_cohomology_dims(ext, range(8)) == [1] + [0] * 7
    assert sorted(g.degree for g in ext.fiber.generators) == [1, 2]


def test_quadratic_model_and_quadratic_part():
    Q = quadratic_model([("x", 2), ("y", 2)], UNCAPPED)
    assert Q.is_quadratic()
    M, _ = minimal_model(CdgaPresentation.truncated_polynomial(2, 2), UNCAPPED)
    P = quadratic_part(M)
    # the degree-5 generator has a cubic differential, so its quadratic part vanishes
    assert not any(P.d.values.values())


def test_build_parses_differentials():
    M = SullivanAlgebra.build([("x", 2), ("y", 3)], {"y": {"x*x": 1}}, UNCAPPED)
    assert M.dvalue("y") == {(0, 0): Fraction(1)}
    assert M.cohomology_dims(range(5)) == [1, 0, 1, 0, 0]


def test_presentation_with_bad_unit_is_rejected():
    with pytest.raises(ValueError):
        CdgaPresentation(["x"], [2])


def test_presentation_rejects_non_commutative_products():
    with pytest.raises(ValueError):
        CdgaPresentation(["1", "a", "b", "c"], [0, 2, 4, 6],
                         {("a", "a"): {"b": 1}, ("a", "b"): {"c": 1}, ("b", "a"): {"c": 2}})


def test_presentation_validation_catches_non_associative_products():
    # (a a) b = c b = e but a (a b) = 0
    H = CdgaPresentation(["1", "a", "b", "c", "e"], [0, 2, 2, 4, 6],
                         {("a", "a"): {"c": 1}, ("c", "b"): {"e": 1}})
    with pytest.raises(ValueError, match="associative"):
        H.validate()


def test_disconnected_presentation_is_rejected():
    H = CdgaPresentation(["1", "e"], [0, 0])
    with pytest.raises(HypothesisError):
        H.validate()


def test_presentation_round_trips_through_dict():
    H = s2xs2()
    again = CdgaPresentation.from_dict(H.to_dict())
    assert again.to_dict() == H.to_dict()
    assert [presentation_cohomology(again, k) for k in range(5)] == [1, 0, 2, 0, 1]


sphere_dims = st.lists(st.integers(2, 4), min_size=1, max_size=3)


@settings(max_examples=12, deadline=None)
@given(sphere_dims)
def test_wedge_model_cohomology_is_that_of_the_wedge(dims):
    W = wedge_of_spheres_model(dims, Caps(7, None))
    want = [1] + [sum(1 for d in dims if d == k) for k in range(1, 8)]
    assert [model_cohomology(W, k) for k in range(8)] == want


@settings(max_examples=10, deadline=None)
@given(st.lists(st.integers(2, 4), min_size=1, max_size=2))
def test_product_model_cohomology_matches_presentation(dims):
    H = CdgaPresentation.sphere(dims[0], "s0")
    for t, d in enumerate(dims[1:], 1):
        H = H.tensor(CdgaPresentation.sphere(d, f"s{t}"))
    _check_model(H, Caps(7, None), 7)

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from oracles import free_gca_dims
from sullivan_inert.attach import (
    INERT,
    NOT_INERT,
    UNDECIDED,
    ConeCdga,
    DegreeMismatchError,
    PdError,
    UnsupportedSpaceError,
    attach_trace,
    fiber_dimension_table,
    inertness_check,
    lemma2_check,
    pd_complex_model,
    pd_inertness,
    truncate_top,
    wedge_fiber_check,
    wedge_of_spheres_model,
)
from sullivan_inert.gca import Caps, GradedAlgebra
from sullivan_inert.lie import NotInertError, theorem3_certificate
from sullivan_inert.sullivan import CdgaPresentation, SullivanAlgebra, minimal_model

CAPS = Caps(8, 6)


def s2xs2():
    return CdgaPresentation(["1", "a", "b", "ab"], [0, 2, 2, 4], {("a", "b"): {"ab": 1}})


@pytest.fixture(scope="module")
def wedge22():
    return wedge_of_spheres_model([2, 2], CAPS)


@pytest.fixture(scope="module")
def whitehead(wedge22):
    return inertness_check(wedge22, 3, "[i1,i2]", CAPS)


def test_whitehead_trace_and_cone(wedge22):
    tr = attach_trace(wedge22, 3, "[i1,i2]", CAPS)
    assert tr.kills_boundaries()
    assert len(tr.to_dict()) == 1
    cone = ConeCdga(tr)
    assert cone.square_zero(range(9))
    assert cone.quotient_matches_base(range(9))
    # the cone is S2 x S2
    assert cone.cohomology_dims(range(7)) == [1, 0, 2, 0, 1, 0, 0]


def test_lie_word_degree_is_checked(wedge22):
    with pytest.raises(DegreeMismatchError):
        attach_trace(wedge22, 4, "[i1,i2]", CAPS)


def test_whitehead_product_is_inert(whitehead):
    v = whitehead
    assert v.status == INERT
    assert v.criterion_i and v.criterion_ii
    assert all(v.checks.values())
    assert v.wedge_like.holds


def test_whitehead_fiber_matches_shifted_acyclic_closure(whitehead):
    table = fiber_dimension_table(whitehead)
    # ΛU for S2 x S2 has generators in degrees 1, 1, 2, 2; shift by the attaching degree 3
    lam_u = free_gca_dims([1, 1, 2, 2], 3)
    assert {r.key: r.fiber_dim for r in table.rows if r.key >= 3} == {
        k: lam_u[k - 3] for k in range(3, 7)
    } == {3: 1, 4: 2, 5: 3, 6: 4}
    assert table.matches
    assert table.products_vanish


def test_whitehead_free_lie_certificate(whitehead):
    cert = theorem3_certificate(whitehead)
    assert cert.prop5_match and cert.free_dims_match
    assert cert.to_dict()["generator_dims"]


def test_hopf_class_is_not_inert():
    S2, _ = minimal_model(CdgaPresentation.sphere(2), CAPS)
    v = inertness_check(S2, 3, {"v3_1": 1}, CAPS)
    assert v.status == NOT_INERT
    assert v.witness.degree == 5
    assert v.criterion_ii is False
    assert all(v.checks.values())
    with pytest.raises(NotInertError):
        theorem3_certificate(v)


@pytest.mark.parametrize("dims,n", [([2, 2], 3), ([2], 2), ([2, 2, 2], 2)])
def test_zero_class_is_never_inert(dims, n):
    W = wedge_of_spheres_model(dims, CAPS)
    v = inertness_check(W, n, "0", CAPS)
    assert v.status == NOT_INERT
    assert v.checks["criteria_agree"] is True


def test_zero_class_refutation_of_the_fiber_condition_needs_room():
    # the fiber of S3 -> S3 v S4 has its first nonzero product in degree 8
    W = wedge_of_spheres_model([3], CAPS)
    v = inertness_check(W, 3, "0", CAPS)
    assert v.status == NOT_INERT
    assert v.criterion_i is False and v.criterion_ii is True
    assert v.checks["criteria_agree"] is None
    assert v.notes
    deeper = Caps(10, 6)
    v = inertness_check(wedge_of_spheres_model([3], deeper), 3, "0", deeper)
    assert v.criterion_ii is False
    assert v.checks["criteria_agree"] is True


def test_point_attachment_fiber_is_loop_space_of_three_sphere():
    caps = Caps(10, 6)
    point = SullivanAlgebra(GradedAlgebra(), {}, Caps(10, None))
    v = inertness_check(point, 2, {}, caps)
    table = fiber_dimension_table(v)
    dims = {r.key: r.fiber_dim for r in table.rows}
    assert dims == {k: 1 if k % 2 == 0 else 0 for k in range(1, 9)}
    assert table.matches
    # the loop-space algebra is divided powers, so products do not vanish
    assert table.products_vanish is False


def test_mixed_circle_wedge_is_unsupported():
    with pytest.raises(UnsupportedSpaceError):
        wedge_of_spheres_model([1, 2], CAPS)


@pytest.mark.parametrize("X,Y,expected", [
    (CdgaPresentation.sphere(2), CdgaPresentation.sphere(2, "t"), {3: 1, 4: 2, 5: 3, 6: 4}),
    (CdgaPresentation.sphere(2), CdgaPresentation.sphere(3, "t"), None),
    (CdgaPresentation.truncated_polynomial(2, 3), CdgaPresentation.sphere(2, "t"), None),
])
def test_wedge_inclusion_fiber_matches_prediction(X, Y, expected):
    res = wedge_fiber_check(X, Y, CAPS)
    assert res.matches
    if expected is not None:
        assert {k: v for k, v in res.fiber_dims.items() if v} == expected


def test_wedge_of_circles_fiber_per_weight():
    res = wedge_fiber_check(CdgaPresentation.sphere(1, "s"), CdgaPresentation.sphere(1, "t"), CAPS)
    assert res.matches


def test_pd_products_of_spheres_are_inert():
    for H in (s2xs2(), CdgaPresentation.sphere(2).tensor(CdgaPresentation.sphere(3, "t")),
              CdgaPresentation.sphere(3).tensor(CdgaPresentation.sphere(3, "t"))):
        v = pd_inertness(H, CAPS)
        assert v.status == INERT
        assert v.route == "pd-cone"
        assert all(v.checks.values())


def test_pd_single_generator_is_flagged():
    v = pd_inertness(CdgaPresentation.sphere(3), CAPS)
    assert v.status == NOT_INERT
    assert v.extra["single_generator"]
    assert v.notes


@pytest.mark.parametrize("H", [CdgaPresentation.exterior(["a", "b"]), CdgaPresentation.surface(2)])
def test_pd_surfaces_are_inert_with_primitive_products_vanishing(H):
    v = pd_inertness(H, CAPS)
    assert v.status == INERT
    assert v.checks["primitive_products_vanish"]
    assert all(v.checks.values())


@pytest.mark.parametrize("H", [
    CdgaPresentation.exterior(["a", "b", "c"]),
    CdgaPresentation.sphere(1).tensor(CdgaPresentation.sphere(2, "t")),
])
def test_primitive_products_vanish_with_a_degree_one_dual_pair(H):
    res = lemma2_check(pd_complex_model(H, CAPS), CAPS)
    assert res.holds


def test_truncating_the_top_class():
    T = truncate_top(s2xs2())
    assert T.degrees == [0, 2, 2]
    assert T.mul({1: 1}, {2: 1}) == {}


def test_non_duality_algebra_is_rejected():
    with pytest.raises(PdError):
        pd_complex_model(CdgaPresentation.trivial([("x", 2), ("y", 2)]), CAPS)


@settings(max_examples=8, deadline=None)
@given(st.sampled_from([2, 3]), st.sampled_from([2, 3]))
def test_wedge_into_product_attachment_is_inert(p, q):
    # attaching the top cell of S^p x S^q to S^p v S^q along the Whitehead product
    W = wedge_of_spheres_model([p, q], CAPS)
    v = inertness_check(W, p + q - 1, "[i1,i2]", CAPS)
    assert v.status in (INERT, UNDECIDED)
    assert v.criterion_i == v.criterion_ii
    if v.status == INERT:
        assert fiber_dimension_table(v).matches

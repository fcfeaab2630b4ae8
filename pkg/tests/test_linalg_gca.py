from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from oracles import dense_rank, free_gca_dims
from sullivan_inert.gca import (
    CapMissingError,
    Derivation,
    Generator,
    GradedAlgebra,
    NotSquareZeroError,
    cohomology,
)
from sullivan_inert.linalg import Echelon, kernel, rank

small = st.fractions(min_value=-3, max_value=3, max_denominator=3)
sparse_vec = st.dictionaries(st.integers(0, 5), small.filter(bool), max_size=5)


@settings(max_examples=60, deadline=None)
@given(st.lists(sparse_vec, max_size=7))
def test_rank_matches_dense_elimination(vectors):
    assert rank(vectors) == dense_rank(vectors, range(6))


@settings(max_examples=60, deadline=None)
@given(st.lists(sparse_vec, max_size=6))
def test_kernel_vectors_are_relations(columns):
    ker = kernel(columns)
    assert len(ker) == len(columns) - dense_rank(columns, range(6))
    for kv in ker:
        total = {}
        for j, c in kv.items():
            for key, v in columns[j].items():
                total[key] = total.get(key, 0) + c * v
        assert not any(total.values())


@settings(max_examples=60, deadline=None)
@given(st.lists(sparse_vec, min_size=1, max_size=6), sparse_vec)
def test_echelon_normal_form_and_solve(vectors, probe):
    ech = Echelon(track=True)
    for v in vectors:
        ech.add(v)
    nf = ech.normal_form(probe)
    # the residual is independent unless it vanishes
    assert (not nf) == ech.contains(probe)
    inside = dense_rank(vectors + [probe], range(6)) == dense_rank(vectors, range(6))
    assert ech.contains(probe) == inside
    sol = ech.solve(probe)
    if inside:
        rebuilt = {}
        for j, c in sol.items():
            for key, v in vectors[j].items():
                rebuilt[key] = rebuilt.get(key, 0) + c * v
        assert {k: v for k, v in rebuilt.items() if v} == {k: Fraction(v) for k, v in probe.items() if v}
    else:
        assert sol is None


def _algebra(degrees):
    return GradedAlgebra([Generator(f"g{i}", d) for i, d in enumerate(degrees)])


def test_odd_generators_square_to_zero_and_anticommute():
    A = _algebra([1, 1, 2])
    x, y, z = A.gen("g0"), A.gen("g1"), A.gen("g2")
    assert A.mul(x, x) == {}
    xy, yx = A.mul(x, y), A.mul(y, x)
    assert {m: -c for m, c in xy.items()} == yx
    assert A.mul(x, z) == A.mul(z, x)


@settings(max_examples=40, deadline=None)
@given(st.lists(st.integers(1, 4), min_size=1, max_size=4), st.data())
def test_graded_commutativity_and_associativity(degrees, data):
    A = _algebra(degrees)
    idx = st.integers(0, len(degrees) - 1)
    a, b, c = (A.gen(f"g{data.draw(idx)}") for _ in range(3))
    da, db = (A.degree_of(p) for p in (a, b))
    ab, ba = A.mul(a, b), A.mul(b, a)
    sign = -1 if (da * db) & 1 else 1
    assert ab == {m: sign * v for m, v in ba.items()}
    assert A.mul(A.mul(a, b), c) == A.mul(a, A.mul(b, c))


@pytest.mark.parametrize("degrees,top", [([2, 3], 10), ([1, 1, 2], 6), ([2, 2, 3, 3], 8), ([3, 4, 5], 12)])
def test_monomial_counts_match_generating_function(degrees, top):
    A = _algebra(degrees)
    assert [len(A.monomials(k)) for k in range(top + 1)] == free_gca_dims(degrees, top)


def test_degree_zero_generator_needs_weight_cap():
    A = _algebra([0, 2])
    with pytest.raises(CapMissingError):
        A.monomials(2)


def test_derivation_leibniz_and_square_zero():
    A = _algebra([2, 3, 3])
    # d g1 = g0^2, d g2 = 0 gives ΛV with H = Q[g0]/g0^2 ⊗ Λ(g2)
    d = Derivation(A, {0: {}, 1: {(0, 0): Fraction(1)}, 2: {}})
    d.check_square_zero()
    p, q = A.gen("g1"), A.gen("g2")
    lhs = d(A.mul(p, q))
    rhs = A.mul(d(p), q)
    for m, c in A.mul(p, d(q)).items():
        rhs[m] = rhs.get(m, 0) - c
    assert lhs == {m: c for m, c in rhs.items() if c}
    assert [cohomology(d, k).dim for k in range(8)] == [1, 0, 1, 1, 0, 1, 0, 0]


def test_square_zero_failure_is_reported():
    A = _algebra([2, 3, 4, 6])
    # d g3 = g1 g2 has d^2 g3 = g0^2 g2
    good = Derivation(A, {0: {}, 1: {(0, 0): Fraction(1)}, 2: {}, 3: {}})
    good.check_square_zero()
    bad = Derivation(A, {0: {}, 1: {(0, 0): Fraction(1)}, 2: {}, 3: {(1, 2): Fraction(1)}})
    with pytest.raises(NotSquareZeroError):
        bad.check_square_zero()

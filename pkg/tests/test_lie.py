from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from oracles import necklaces, witt_multidegree
from sullivan_inert.attach import wedge_of_spheres_model
from sullivan_inert.gca import Caps
from sullivan_inert.lie import (
    FreeLieAlgebra,
    LieSyntaxError,
    WordSyntaxError,
    bch,
    circle_lie_algebra,
    hall_normal_form,
    homotopy_bracket,
    lcs_quotients,
    lyndon_words,
    magnus_log,
    parse_group_word,
    tensor_exp,
    tensor_log,
    witt_dims,
    witt_formula,
    word_image,
)


def test_two_even_letters_length_one_to_five():
    assert [witt_dims([0, 0], 5)[(0, n)] for n in range(1, 6)] == [2, 1, 2, 3, 6]
    assert FreeLieAlgebra([0, 0], max_length=5).dims() == witt_dims([0, 0], 5)


@pytest.mark.parametrize("r", [1, 2, 3, 4])
def test_witt_formula_counts_necklaces_and_lyndon_words(r):
    for n in range(1, 7):
        assert witt_formula(r, n) == necklaces(r, n)
        assert sum(1 for w in lyndon_words(r, n) if len(w) == n) == necklaces(r, n)


@settings(max_examples=25, deadline=None)
@given(st.lists(st.integers(0, 3), min_size=1, max_size=3), st.integers(2, 5))
def test_witt_peeling_agrees_with_hall_enumeration(degrees, length):
    L = FreeLieAlgebra(degrees, max_length=length)
    assert L.dims() == witt_dims(degrees, length)


@pytest.mark.parametrize("multidegree", [(2, 1), (2, 2), (3, 1), (3, 2), (2, 1, 1), (1, 1, 1)])
def test_hall_basis_spans_the_lie_words_of_each_multidegree(multidegree):
    n = sum(multidegree)
    L = FreeLieAlgebra([0] * len(multidegree), max_length=n)
    hall = sum(1 for e in L.basis(n) if e.multidegree == multidegree)
    assert hall == L.brute_force_dim(multidegree) == witt_multidegree(multidegree)


def test_graded_antisymmetry_and_odd_squares():
    even = FreeLieAlgebra([0, 0], max_length=3)
    assert hall_normal_form(even, "[x1,x2]") == hall_normal_form(even, "[x2,x1]").scale(-1)
    assert hall_normal_form(even, "[x1,x1]").is_zero()
    odd = FreeLieAlgebra([1, 1], max_length=3)
    assert not hall_normal_form(odd, "[x1,x1]").is_zero()
    assert hall_normal_form(odd, "[x1,x2]") == hall_normal_form(odd, "[x2,x1]")


def test_jacobi_identity_vanishes():
    L = FreeLieAlgebra([0, 0, 0], max_length=3)
    jac = hall_normal_form(L, "[x1,[x2,x3]] + [x2,[x3,x1]] + [x3,[x1,x2]]")
    assert jac.is_zero()


def test_bad_lie_expression():
    L = FreeLieAlgebra([0, 0], max_length=3)
    with pytest.raises(LieSyntaxError):
        hall_normal_form(L, "[x1,x9]")


def test_square_word_log_is_twice_the_letter():
    assert magnus_log("a^2", 2, 6).format() == "2*x1"


def test_commutator_log_through_length_three():
    alpha = magnus_log("[a,b]", 2, 3)
    expected = hall_normal_form(alpha.algebra, "[x1,x2] + 1/2*[x1,[x1,x2]] + 1/2*[x2,[x1,x2]]")
    assert alpha == expected
    assert alpha.leading_length == 2


@pytest.mark.parametrize("texts", [["[a,b]", "aba^-1b^-1", "abAB", "aba⁻¹b⁻¹"], ["a^2", "a²", "aa"],
                                   ["(ab)^-1", "BA"], ["abBA", "1", ""]])
def test_word_notations_agree(texts):
    parsed = {parse_group_word(t, 2).letters for t in texts}
    assert len(parsed) == 1


@pytest.mark.parametrize("bad", ["ac", "a^", "[a,b", "a$b"])
def test_word_syntax_errors(bad):
    with pytest.raises(WordSyntaxError):
        parse_group_word(bad, 2)


words = st.lists(st.tuples(st.integers(0, 1), st.sampled_from([1, -1])), max_size=5)


def _text(letters):
    return "".join("ab"[i] if e > 0 else "AB"[i] for i, e in letters)


@settings(max_examples=30, deadline=None)
@given(words, words)
def test_log_of_product_is_bch_of_logs(u, v):
    L = circle_lie_algebra(2, 5)
    lu = magnus_log(_text(u), 2, 5, lie=L)
    lv = magnus_log(_text(v), 2, 5, lie=L)
    luv = magnus_log(_text(u) + _text(v), 2, 5, lie=L)
    assert bch(lu, lv) == luv


@settings(max_examples=30, deadline=None)
@given(words)
def test_inverse_word_has_negated_log(u):
    inv = "".join(c.swapcase() for c in reversed(_text(u)))
    assert magnus_log(inv, 2, 5) == magnus_log(_text(u), 2, 5).scale(-1)


@settings(max_examples=30, deadline=None)
@given(words)
def test_exp_of_log_recovers_the_word_image(u):
    word = parse_group_word(_text(u), 2)
    image = word_image(word, 5)
    assert tensor_exp(tensor_log(image, 5), 5) == {k: v for k, v in image.items() if v}


def test_homotopy_bracket_of_two_sphere_classes():
    W = wedge_of_spheres_model([2, 2], Caps(6, None))
    z1, z2 = W.algebra.index["z1"], W.algebra.index["z2"]
    br = homotopy_bracket(W, {z1: Fraction(1)}, {z2: Fraction(1)})
    assert len(br) == 1
    (g, c), = br.items()
    assert W.generators[g].degree == 3 and c != 0


def test_lower_central_series_of_wedge_is_free():
    W = wedge_of_spheres_model([2, 2], Caps(6, None))
    table = lcs_quotients(W, Caps(6, None))
    free = witt_dims([1, 1], 5)
    assert table.dims[6] == {(k, n): v for (k, n), v in free.items()}
    assert table.is_monotone()

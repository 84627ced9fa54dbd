import itertools
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

import real_exterior as ref
from foliage.exterior import (
    BasicForm,
    all_words,
    bidegree_project,
    c_weil,
    conjugate,
    conjugate_word,
    contract,
    degree_project,
    hodge_star,
    inner_product,
    interior,
    is_real,
    j_on_forms,
    pointwise_inner,
    real_part,
    volume_form,
    wedge,
    wedge_words,
    word,
    words_of_bidegree,
    words_of_degree,
)
from foliage.fourier import FourierScalar

TOL = 1e-13


def mono(w, c=1.0, dims=1):
    return BasicForm.monomial(w, dims, FourierScalar.constant(dims, c))


def real_basis_form(n, k):
    """The real basis covector e_k as a complex-coframe form."""
    a, odd = divmod(k, 2)
    w = BasicForm.generator(n, 1, a + 1)
    wb = BasicForm.generator(n, 1, a + 1, bar=True)
    return (w + wb) * (1 / math.sqrt(2)) if not odd else (w - wb) * (-1j / math.sqrt(2))


def forms(n, max_terms=None):
    words = list(all_words(n))
    coef = st.complex_numbers(max_magnitude=1, allow_nan=False, allow_infinity=False)
    size = max_terms or len(words)
    return st.dictionaries(st.sampled_from(words), coef, max_size=size).map(
        lambda t: BasicForm(n, 1, {w: FourierScalar.constant(1, c) for w, c in t.items()})
    )


def close(a: BasicForm, b: BasicForm, tol=TOL):
    return (a - b).norm() <= tol * max(1.0, a.norm(), b.norm())


# -- word-level bookkeeping -----------------------------------------------------


@pytest.mark.parametrize("n", [1, 2, 3])
def test_word_counts(n):
    assert len(all_words(n)) == 4 ** n
    for r in range(n + 1):
        for s in range(n + 1):
            assert len(words_of_bidegree(n, r, s)) == math.comb(n, r) * math.comb(n, s)
    assert sum(len(words_of_degree(n, j)) for j in range(2 * n + 1)) == 4 ** n


def test_word_validation():
    with pytest.raises(ValueError):
        word(2, (3,))
    with pytest.raises(ValueError):
        word(2, (1, 1))
    assert word(2, (2, 1)).holo == (1, 2)


def test_wedge_words_sign_and_vanishing():
    w1, wb1 = word(1, (1,)), word(1, (), (1,))
    assert wedge_words(w1, wb1) == (1, word(1, (1,), (1,)))
    assert wedge_words(wb1, w1) == (-1, word(1, (1,), (1,)))
    assert wedge_words(w1, w1) == (0, None)


# -- exhaustive comparison with the reference algebra (n <= 2) ------------------


@pytest.mark.parametrize("n", [1, 2])
def test_words_are_orthonormal(n):
    ws = all_words(n)
    G = np.array([[ref.inner(ref.from_word(a), ref.from_word(b)) for b in ws] for a in ws])
    assert np.allclose(G, np.eye(len(ws)), atol=TOL)


@pytest.mark.parametrize("n", [1, 2])
def test_wedge_exhaustive(n):
    for w1, w2 in itertools.product(all_words(n), repeat=2):
        ours = ref.from_form(wedge(mono(w1), mono(w2)))
        theirs = ref.wedge(ref.from_word(w1), ref.from_word(w2))
        assert ref.distance(ours, theirs) < TOL, (w1, w2)


@pytest.mark.parametrize("n", [1, 2])
def test_contraction_by_real_vectors_exhaustive(n):
    for k in range(2 * n):
        e_k = real_basis_form(n, k)
        for w in all_words(n):
            ours = ref.from_form(contract(e_k, mono(w)))
            theirs = ref.iota(k, ref.from_word(w))
            assert ref.distance(ours, theirs) < TOL, (k, w)


@pytest.mark.parametrize("n", [1, 2])
def test_contraction_adjointness_exhaustive(n):
    # contract(v, .) is the pointwise adjoint of wedge(conj v, .)
    for g in range(1, 2 * n + 1):
        v = mono(word(n, (g,)) if g <= n else word(n, (), (g - n,)), 0.3 - 0.7j)
        for w1, w2 in itertools.product(all_words(n), repeat=2):
            a, b = mono(w1), mono(w2)
            lhs = inner_product(wedge(conjugate(v), a), b)
            rhs = inner_product(a, contract(v, b))
            assert abs(lhs - rhs) < TOL


@pytest.mark.parametrize("n", [1, 2])
def test_hodge_star_exhaustive(n):
    for w in all_words(n):
        ours = ref.from_form(hodge_star(mono(w)))
        theirs = ref.star(ref.from_word(w), 2 * n)
        assert ref.distance(ours, theirs) < TOL, w


@pytest.mark.parametrize("n", [1, 2])
def test_star_square_law_exhaustive(n):
    for w in all_words(n):
        a = mono(w, 0.4 + 0.9j)
        assert close(hodge_star(hodge_star(a)), a * (-1) ** w.degree)


@pytest.mark.parametrize("n", [1, 2])
def test_star_is_isometry_and_defines_volume_pairing(n):
    nu = volume_form(n, 1)
    assert ref.distance(ref.from_form(nu), {tuple(range(2 * n)): 1.0}) < TOL
    for w1, w2 in itertools.product(all_words(n), repeat=2):
        a, b = mono(w1, 1 + 2j), mono(w2, 0.5 - 1j)
        assert abs(inner_product(hodge_star(a), hodge_star(b)) - inner_product(a, b)) < TOL
        if w1.degree == w2.degree:
            lhs = wedge(a, hodge_star(conjugate(b)))
            assert close(lhs, nu * pointwise_inner(a, b))


@pytest.mark.parametrize("n", [1, 2])
def test_j_scalar_rule_matches_frame_sum_exhaustive(n):
    for w in all_words(n):
        ours = ref.from_form(j_on_forms(mono(w)))
        theirs = ref.j_derivation(ref.from_word(w), 2 * n)
        assert ref.distance(ours, theirs) < TOL, w


@pytest.mark.parametrize("n", [1, 2])
def test_weil_operator_is_multiplicative_exhaustive(n):
    for w in all_words(n):
        ours = ref.from_form(c_weil(mono(w)))
        theirs = ref.weil_multiplicative(ref.from_word(w))
        assert ref.distance(ours, theirs) < TOL, w
        assert close(c_weil(c_weil(mono(w)), inverse=True), mono(w))


@pytest.mark.parametrize("n", [1, 2])
def test_conjugation_matches_reference(n):
    for w in all_words(n):
        ours = ref.from_form(conjugate(mono(w, 0.2 + 0.5j)))
        theirs = {k: np.conj(v) for k, v in ref.from_word(w).items()}
        theirs = {k: v * (0.2 - 0.5j) for k, v in theirs.items()}
        assert ref.distance(ours, theirs) < TOL


@pytest.mark.parametrize("n", [1, 2])
def test_kahler_form_and_lambda(n):
    from foliage.models import build_model

    model = build_model("carriere" if n == 1 else "product_j1")
    om = model.kahler_form()
    zero = (0,) * model.dims
    as_ref = {k: v for k, v in ref.from_form(BasicForm(n, 1, {w: FourierScalar.constant(1, f.coefficient(zero))
                                                               for w, f in om.terms.items()})).items()}
    assert ref.distance(as_ref, ref.kahler(n)) < TOL
    # Lambda(omega) = n and Lambda is the adjoint of L on every word pair
    lam_om = interior(om, om)
    assert lam_om.coefficient(word(n)).allclose(FourierScalar.constant(model.dims, n), 1e-14)
    for w1, w2 in itertools.product(all_words(n), repeat=2):
        a = BasicForm.monomial(w1, model.dims)
        b = BasicForm.monomial(w2, model.dims)
        assert abs(inner_product(wedge(om, a), b) - inner_product(a, interior(om, b))) < TOL


def test_interior_applies_first_factor_first():
    n = 2
    e0, e2 = real_basis_form(n, 0), real_basis_form(n, 2)
    beta = wedge(e0, e2)
    a = wedge(wedge(e0, e2), real_basis_form(n, 3))
    expected = contract(e2, contract(e0, a))
    assert close(interior(beta, a), expected)


def test_contract_requires_one_form():
    with pytest.raises(ValueError):
        contract(mono(word(1, (1,), (1,))), mono(word(1)))


# -- random properties ------------------------------------------------------------


@settings(max_examples=200)
@given(forms(2), forms(2), forms(2))
def test_wedge_associative(a, b, c):
    assert close(wedge(wedge(a, b), c), wedge(a, wedge(b, c)))


@given(forms(2), forms(2))
def test_wedge_graded_commutative(a, b):
    for p in range(5):
        for q in range(5):
            ap, bq = degree_project(a, p), degree_project(b, q)
            assert close(wedge(ap, bq), wedge(bq, ap) * (-1) ** (p * q))


@given(forms(2))
def test_conjugation_involutive_and_real_part(a):
    assert close(conjugate(conjugate(a)), a)
    assert is_real(real_part(a))


@given(forms(2))
def test_bidegree_split_sums_back(a):
    parts = BasicForm.zero(2, 1)
    for r in range(3):
        for s in range(3):
            parts = parts + bidegree_project(a, r, s)
    assert close(parts, a)


# -- fuzzing in rank 3 ----------------------------------------------------------------


@settings(max_examples=60)
@given(forms(3, 12), forms(3, 12), st.integers(0, 5))
def test_rank3_against_reference(a, b, k):
    dim = 6
    ra, rb = ref.from_form(a), ref.from_form(b)
    assert ref.distance(ref.from_form(wedge(a, b)), ref.wedge(ra, rb)) < 1e-12
    assert ref.distance(ref.from_form(hodge_star(a)), ref.star(ra, dim)) < 1e-12
    assert ref.distance(ref.from_form(j_on_forms(a)), ref.j_derivation(ra, dim)) < 1e-12
    assert ref.distance(ref.from_form(contract(real_basis_form(3, k), a)), ref.iota(k, ra)) < 1e-12
    assert ref.distance(ref.from_form(c_weil(a)), ref.weil_multiplicative(ra)) < 1e-12


@settings(max_examples=60)
@given(forms(3, 12), forms(3, 12), st.integers(1, 6), st.complex_numbers(max_magnitude=1, allow_nan=False))
def test_rank3_adjointness_and_star_law(a, b, g, coef_):
    n = 3
    v = mono(word(n, (g,)) if g <= n else word(n, (), (g - n,)), coef_ if coef_ else 1.0)
    assert abs(inner_product(wedge(conjugate(v), a), b) - inner_product(a, contract(v, b))) < 1e-12
    for j in range(7):
        aj = degree_project(a, j)
        assert close(hodge_star(hodge_star(aj)), aj * (-1) ** j, 1e-12)
    assert abs(inner_product(c_weil(a), b) - inner_product(a, c_weil(b, inverse=True))) < 1e-12


def test_conjugate_word_sign():
    w = word(2, (1, 2), (1,))
    sign, cw = conjugate_word(w)
    assert cw == word(2, (1,), (1, 2))
    assert sign == 1

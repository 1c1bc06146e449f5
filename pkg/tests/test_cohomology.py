import itertools
from fractions import Fraction

import pytest
import sympy

from wittlab.algebra import AlgebraKind, I, L, OutOfWindowError, WittlabError
from wittlab.cohomology import (
    BilinearFormWindow,
    NotACocycleError,
    bgv_equation,
    coboundary_certificate,
    coboundary_of,
    cocycle_defect,
    cocycle_violations,
    compute_bgv_window,
    compute_h2_window,
    decompose_cocycle,
    format_form,
    make_alpha,
    make_beta,
    parse_form,
    zero_form,
)

W = AlgebraKind.W


# -- oracle: H^2 in degree 0 from a standalone sympy model of W -----------------------

def _oracle_bracket(a, b):
    """Basis bracket of W on ('L'|'I', m) tuples, returned as {symbol: coeff}."""
    (ka, m), (kb, n) = a, b
    if ka == "I" and kb == "I":
        return {}
    if ka == "L" and kb == "L":
        return {("L", m + n): m - n} if m != n else {}
    if ka == "L":
        return {("I", m + n): m - n} if m != n else {}
    return {("I", m + n): -(n - m)} if m != n else {}


def _oracle_h2_degree0(n):
    syms = [(k, m) for k in "LI" for m in range(-n, n + 1)]
    pairs = [(s, t) for s, t in itertools.combinations(syms, 2) if s[1] + t[1] == 0]
    var = {p: sympy.Symbol(f"x{i}") for i, p in enumerate(pairs)}

    def psi(s, t):
        if s == t:
            return 0
        if (s, t) in var:
            return var[(s, t)]
        if (t, s) in var:
            return -var[(t, s)]
        return 0

    eqs = []
    for x, y, z in itertools.combinations(syms, 3):
        if x[1] + y[1] + z[1] != 0:
            continue
        terms = []
        ok = True
        for a, b, c in ((x, y, z), (y, z, x), (z, x, y)):
            br = _oracle_bracket(a, b)
            if any(abs(u[1]) > n for u in br):
                ok = False
            terms.append(sum(k * psi(u, c) for u, k in br.items()))
        if ok:
            eqs.append(sum(terms))
    M = sympy.Matrix([[sympy.diff(e, var[p]) for p in pairs] for e in eqs if e != 0])
    cocycle_dim = len(pairs) - M.rank()
    cob = []
    for target in (("L", 0), ("I", 0)):
        cob.append([_oracle_bracket(s, t).get(target, 0) for s, t in pairs])
    cob_dim = sympy.Matrix(cob).rank()
    return cocycle_dim, cob_dim


def test_h2_window_3_against_oracle():
    rep = compute_h2_window(3, 0)
    assert (rep.cocycle_dim, rep.coboundary_dim, rep.h2_dim) == (4, 2, 2)
    assert _oracle_h2_degree0(3) == (4, 2)


def test_h2_window_6_against_oracle():
    rep = compute_h2_window(6, 0)
    assert (rep.cocycle_dim, rep.coboundary_dim) == _oracle_h2_degree0(6)
    assert rep.h2_dim == 2


@pytest.mark.parametrize("n", range(3, 9))
def test_h2_stable_and_representatives_are_alpha_beta(n):
    rep = compute_h2_window(n, 0)
    assert rep.h2_dim == 2
    coeffs = []
    for psi in rep.basis:
        dec = decompose_cocycle(psi)
        assert dec.in_span
        coeffs.append((dec.alpha_coeff, dec.beta_coeff))
    assert coeffs == [(1, 0), (0, 1)]


def test_representatives_vanish_on_canonical_pairs():
    for psi in compute_h2_window(6, 0).basis:
        assert psi(L(1), L(-1)) == 0
        assert psi(L(1), I(-1)) == 0


@pytest.mark.parametrize("d", [1, -1, 2, -2, 3, -3])
def test_nonzero_degrees_vanish(d):
    assert compute_h2_window(6, d).h2_dim == 0


def test_h2_rejects_small_window():
    with pytest.raises(WittlabError):
        compute_h2_window(2)


# -- alpha, beta, coboundaries --------------------------------------------------------

def test_alpha_beta_values():
    alpha, beta = make_alpha(6), make_beta(6)
    assert alpha(L(2), L(-2)) == Fraction(1, 2)
    assert alpha(L(1), L(-1)) == 0
    assert beta(L(3), I(-3)) == 2
    assert beta(L(3), L(-3)) == 0
    assert beta(I(-3), L(3)) == -2


def test_cocycle_defect_examples():
    alpha = make_alpha(6)
    assert cocycle_defect(alpha, L(2), L(3), L(-5)) == 0
    psi = BilinearFormWindow(W, 6, {(L(-4), L(4)): 3, (L(1), I(2)): -1})
    assert cocycle_defect(psi, L(2), L(2), I(1)) == 0
    const = BilinearFormWindow(W, 6, {(L(-m), L(m)): 1 for m in range(1, 7)})
    assert cocycle_defect(const, L(1), L(2), L(-3)) != 0


def test_cocycle_defect_refuses_to_truncate():
    with pytest.raises(OutOfWindowError):
        cocycle_defect(make_alpha(4), L(3), L(2), L(-4))


@pytest.mark.parametrize("make", [make_alpha, make_beta])
def test_alpha_beta_are_cocycles_and_not_coboundaries(make):
    psi = make(8)
    assert cocycle_violations(psi) == []
    cert = coboundary_certificate(psi)
    assert not cert.is_coboundary
    assert cert.rank_augmented == cert.rank_matrix + 1


def test_coboundary_examples():
    f = coboundary_of({L(0): 1}, 6)
    assert f(L(3), L(-3)) == 6
    g = coboundary_of({I(0): 1}, 6)
    assert g(L(3), I(-3)) == 6
    assert g(L(3), L(-3)) == 0
    assert coboundary_of({}, 6).is_zero()


def test_coboundary_excludes_escaping_pairs():
    f = coboundary_of({L(0): 1}, 3)
    with pytest.raises(OutOfWindowError):
        f(L(2), L(3))


def test_coboundaries_are_cocycles():
    f = coboundary_of({L(0): 2, I(1): -1, L(-2): Fraction(1, 3), I(0): 5}, 5)
    assert cocycle_violations(f) == []


# -- decomposition --------------------------------------------------------------------

def test_decompose_examples():
    alpha, beta = make_alpha(6), make_beta(6)
    dec = decompose_cocycle(3 * alpha - 2 * beta)
    assert (dec.alpha_coeff, dec.beta_coeff) == (3, -2)
    assert all(v == 0 for v in dec.coboundary_function.values()) and dec.in_span

    dec = decompose_cocycle(coboundary_of({L(0): 5}, 6))
    assert (dec.alpha_coeff, dec.beta_coeff, dec.coboundary_function[L(0)]) == (0, 0, 5)
    assert dec.in_span

    dec = decompose_cocycle(alpha + coboundary_of({I(0): 1}, 6))
    assert (dec.alpha_coeff, dec.beta_coeff, dec.coboundary_function[I(0)]) == (1, 0, 1)
    assert dec.in_span


def test_decompose_reconstructs():
    psi = Fraction(2, 3) * make_alpha(5) + 7 * make_beta(5) + coboundary_of({L(0): -1, I(0): 4}, 5)
    dec = decompose_cocycle(psi)
    assert dec.reconstruct() == psi


def test_decompose_rejects_non_cocycle():
    const = BilinearFormWindow(W, 5, {(L(-m), L(m)): 1 for m in range(1, 6)})
    with pytest.raises(NotACocycleError) as info:
        decompose_cocycle(const)
    assert info.value.defect != 0 and len(info.value.triple) == 3


# -- B^L(I) ----------------------------------------------------------------------------

@pytest.mark.parametrize("n", range(3, 9))
def test_bgv_vanishes(n):
    assert compute_bgv_window(n).dimension == 0


def test_bgv_equation_at_i_zero():
    # (j + k) f(I_j, I_k) = 0
    assert bgv_equation(0, 2, 3) == {(I(2), I(3)): -5}
    assert bgv_equation(0, -2, 2) == {}


def test_bgv_equation_forces_opposite_pairs_to_zero():
    # with j = -i: 2i f(I_0, I_0) = i f(I_i, I_-i), and f(I_0, I_0) = 0
    assert bgv_equation(3, -3, 0) == {(I(-3), I(3)): 3}


# -- text format ----------------------------------------------------------------------

def test_form_text_format():
    text = format_form(make_alpha(3))
    assert text.splitlines() == ["PAIR L[2] L[-2] = 1/2", "PAIR L[3] L[-3] = 2"]
    assert parse_form(text, 3) == make_alpha(3)


def test_form_round_trip_with_mixed_pairs():
    psi = make_beta(4) + 2 * make_alpha(4) + zero_form(4)
    assert parse_form(format_form(psi), 4) == psi

import itertools
from fractions import Fraction

import pytest

from wittlab.algebra import C1, C2, ZERO, AlgebraKind, Element, I, L, OutOfWindowError, WittlabError, bracket
from wittlab.derivations import (
    LinearMapWindow,
    Target,
    ad,
    compute_der_space,
    compute_hom_I_to_L,
    derivation_defect,
    format_map,
    i_action_on_l,
    inner_certificate,
    inner_i_valued,
    make_d1,
    make_outer_derivation,
    parse_map,
    reduces_to,
    verify_weight_reduction,
)

W, WT = AlgebraKind.W, AlgebraKind.WTILDE


def admissible_pairs(D):
    dom = set(D.domain)
    for x, y in itertools.combinations(D.domain, 2):
        if all(s in dom for s in bracket(x, y, D.algebra)):
            yield x, y


def is_derivation(D, target=Target.ALGEBRA):
    return all(derivation_defect(D, x, y, target) == ZERO for x, y in admissible_pairs(D))


# -- defect and the named derivations --------------------------------------------------

def test_inner_derivation_has_no_defect():
    D = ad(Element({I(3): 2}), 6)
    assert is_derivation(D)


def test_d1_has_no_defect():
    D1 = make_d1(6)
    assert derivation_defect(D1, L(2), I(3), Target.I) == ZERO
    assert is_derivation(D1, Target.I)


def test_non_derivation_defect():
    # E(L_m) = I_m, E(I_m) = 0: E[L1,L2] = -I3, [L1,E L2] = -I3, [L2,E L1] = I3
    E = LinearMapWindow(W, 4, {s: (Element.basis(I(s.index)) if s.kind == "L" else ZERO)
                               for s in ad(ZERO, 4).domain})
    assert derivation_defect(E, L(1), L(2)) == Element({I(3): 1})


def test_outer_derivation_values():
    D = make_outer_derivation(8)
    assert D(I(7)) == Element.basis(I(7))
    assert D(L(-4)) == ZERO
    assert is_derivation(D)


def test_outer_derivation_on_wtilde_scales_c2():
    D = make_outer_derivation(5, WT)
    assert D(C2) == Element.basis(C2) and D(C1) == ZERO
    assert is_derivation(D)


def test_outer_derivation_has_no_w22_extension():
    with pytest.raises(WittlabError):
        make_outer_derivation(5, AlgebraKind.W22)


def test_map_refuses_symbols_outside_domain():
    with pytest.raises(OutOfWindowError):
        make_outer_derivation(3)(I(4))


@pytest.mark.parametrize("n", range(3, 8))
def test_d_and_d1_are_not_inner(n):
    assert not inner_certificate(make_outer_derivation(n)).is_inner
    assert not inner_certificate(make_d1(n), Target.I).is_inner


def test_inner_certificate_finds_the_element():
    w = Element({L(2): 3, I(-1): Fraction(1, 2)})
    cert = inner_certificate(ad(w, 5))
    assert cert.is_inner and cert.element == w


# -- windowed derivation spaces ---------------------------------------------------------

@pytest.mark.parametrize("n", range(4, 9))
def test_degree_zero_has_one_outer_class_d(n):
    rep = compute_der_space(W, Target.ALGEBRA, 0, n)
    assert rep.outer_dim == 1
    assert (rep.derivation_dim, rep.inner_dim) == (3, 2)
    assert reduces_to(rep.outer_basis[0], make_outer_derivation(n)) is not None


@pytest.mark.parametrize("n", range(4, 9))
@pytest.mark.parametrize("d", [1, -1, 2, -2])
def test_nonzero_degrees_are_inner(n, d):
    assert compute_der_space(W, Target.ALGEBRA, d, n).outer_dim == 0


@pytest.mark.parametrize("n", range(4, 9))
def test_i_valued_degree_zero_is_d1(n):
    rep = compute_der_space(W, Target.I, 0, n)
    assert rep.outer_dim == 1
    assert reduces_to(rep.outer_basis[0], make_d1(n), Target.I) is not None


def test_wtilde_degree_zero():
    rep = compute_der_space(WT, Target.ALGEBRA, 0, 6)
    assert rep.outer_dim == 1
    assert reduces_to(rep.outer_basis[0], make_outer_derivation(6, WT)) is not None


def test_outer_basis_elements_are_derivations():
    for target in Target:
        rep = compute_der_space(W, target, 0, 5)
        for D in rep.outer_basis + rep.derivation_basis:
            assert is_derivation(D, target)
            assert D.shift_degree() == 0


def test_solutions_respect_the_grading():
    # ungraded solve: every homogeneous component of a solution is again a solution
    rep = compute_der_space(W, Target.ALGEBRA, None, 3)
    assert rep.derivation_dim > 0
    for D in rep.derivation_basis:
        shifts = {t.degree - s.degree for s, v in D.images.items() for t in v}
        for n in shifts:
            part = LinearMapWindow(W, 3, {s: Element({t: c for t, c in v.items() if t.degree - s.degree == n})
                                          for s, v in D.images.items()})
            assert is_derivation(part)


def test_inner_maps_pass_the_law():
    for v in (I(2), I(-3), I(0)):
        assert is_derivation(inner_i_valued(v, 5), Target.I)


def test_der_space_preconditions():
    with pytest.raises(WittlabError):
        compute_der_space(W, Target.ALGEBRA, 0, 2)
    with pytest.raises(WittlabError):
        compute_der_space(W, Target.ALGEBRA, 3, 4)


# -- Hom(I, L) --------------------------------------------------------------------------

@pytest.mark.parametrize("n", range(3, 9))
def test_hom_i_to_l_vanishes(n):
    assert compute_hom_I_to_L(n).dimension == 0


def test_equivariance_alone_forces_diagonal_maps():
    rep = compute_hom_I_to_L(5, include_compatibility=False)
    assert rep.dimension == 1
    f = rep.basis[0]
    c = f(I(1))[L(1)]
    for m in range(-5, 6):
        assert f(I(m)) == Element({L(m): c})


def test_diagonal_candidate_breaks_compatibility():
    # f(I_m) = L_m: I_0 . f(I_1) = -L_1, but f([I_0, I_1]) = 0
    assert i_action_on_l(0, 1) == Element({L(1): -1})


# -- degree-zero reduction for one weight space --------------------------------------------

def test_weight_reduction_m3():
    rep = verify_weight_reduction(3, 6)
    assert rep.inner_element == Element({I(3): -2})
    assert rep.b_forced_zero and rep.all_inner


def test_weight_reduction_m_minus_1():
    rep = verify_weight_reduction(-1, 1)
    assert rep.inner_element == Element({I(-1): 1})
    assert bracket(L(0), rep.inner_element) == Element({I(-1): 1})


@pytest.mark.parametrize("m", [1, -1, 2, -2, 5, -7])
def test_weight_reduction_forces_b_zero(m):
    rep = verify_weight_reduction(m)
    assert all(b == 0 for _, b in rep.solution_basis)
    assert rep.all_inner


def test_weight_reduction_rejects_zero():
    with pytest.raises(WittlabError):
        verify_weight_reduction(0)


# -- text format -------------------------------------------------------------------------

def test_map_text_format():
    D = make_outer_derivation(2)
    text = format_map(D)
    assert "MAP L[2] -> 0" in text.splitlines()
    assert "MAP I[2] -> I[2]" in text.splitlines()
    assert parse_map(text, 2) == D


def test_map_text_round_trip_wtilde():
    D = ad(Element({L(1): 2, I(-1): Fraction(-1, 3)}), 3, WT)
    assert parse_map(format_map(D), 3, WT) == D
    assert C1 in D.domain

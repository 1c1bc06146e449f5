"""2-cocycles, 2-coboundaries and the windowed second cohomology of W.

Forms live on a window ``|index| <= N``.  A cocycle equation is only imposed on a
triple when all three brackets stay inside the window; nothing is ever truncated.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Mapping

from .algebra import (
    AlgebraKind,
    BasisSymbol,
    Element,
    I,
    L,
    OutOfWindowError,
    ParseError,
    Scalar,
    WittlabError,
    as_element,
    bracket,
    bracket_basis,
    format_scalar,
    in_window,
    parse_symbol,
    virasoro,
    window_symbols,
)
from . import linalg

Pair = tuple[BasisSymbol, BasisSymbol]

MIN_WINDOW = 3


class NotACocycleError(WittlabError):
    def __init__(self, triple, defect):
        super().__init__(f"cocycle condition fails on {triple}: defect {defect}")
        self.triple = triple
        self.defect = defect


def orient(s: BasisSymbol, t: BasisSymbol) -> tuple[Pair | None, int]:
    """Stored pair for (s, t) and the sign relating psi(s, t) to the stored value."""
    if s == t:
        return None, 0
    return ((s, t), 1) if s < t else ((t, s), -1)


@dataclass(frozen=True, eq=False)
class BilinearFormWindow:
    """Antisymmetric bilinear form given by its values on pairs ``s < t`` of window symbols.

    Pairs listed in ``excluded`` are outside the form's domain; evaluating them raises
    :class:`OutOfWindowError`.
    """

    algebra: AlgebraKind
    window: int
    values: Mapping[Pair, Fraction] = field(default_factory=dict)
    excluded: frozenset = frozenset()

    def __post_init__(self):
        clean = {}
        for (s, t), v in self.values.items():
            if not s < t:
                raise WittlabError(f"pair ({s}, {t}) is not in increasing order")
            v = Fraction(v)
            if v:
                clean[(s, t)] = v
        object.__setattr__(self, "values", clean)

    def _check(self, s: BasisSymbol) -> None:
        if abs(s.index) > self.window:
            raise OutOfWindowError(f"{s} is outside the window |index| <= {self.window}")

    def value(self, s: BasisSymbol, t: BasisSymbol) -> Fraction:
        self._check(s)
        self._check(t)
        pair, sign = orient(s, t)
        if pair is None:
            return Fraction(0)
        if pair in self.excluded:
            raise OutOfWindowError(f"form is undefined on {pair}")
        return sign * self.values.get(pair, Fraction(0))

    def __call__(self, x: Element | BasisSymbol, y: Element | BasisSymbol) -> Fraction:
        x, y = as_element(x), as_element(y)
        return sum((a * b * self.value(s, t) for s, a in x.items() for t, b in y.items()), Fraction(0))

    def pairs(self) -> list[Pair]:
        syms = window_symbols(self.window, self.algebra)
        return [(s, t) for s, t in itertools.combinations(syms, 2) if (s, t) not in self.excluded]

    def _combine(self, other: BilinearFormWindow, k: Scalar) -> BilinearFormWindow:
        if (other.algebra, other.window) != (self.algebra, self.window):
            raise WittlabError("forms live on different algebras or windows")
        vals = dict(self.values)
        for p, v in other.values.items():
            vals[p] = vals.get(p, 0) + k * v
        return BilinearFormWindow(self.algebra, self.window, vals, self.excluded | other.excluded)

    def __add__(self, other: BilinearFormWindow) -> BilinearFormWindow:
        return self._combine(other, 1)

    def __sub__(self, other: BilinearFormWindow) -> BilinearFormWindow:
        return self._combine(other, -1)

    def __mul__(self, k: Scalar) -> BilinearFormWindow:
        return BilinearFormWindow(self.algebra, self.window,
                                  {p: k * v for p, v in self.values.items()}, self.excluded)

    __rmul__ = __mul__

    def __neg__(self) -> BilinearFormWindow:
        return self * -1

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, BilinearFormWindow):
            return NotImplemented
        return (self.algebra, self.window, self.values, self.excluded) == \
            (other.algebra, other.window, other.values, other.excluded)

    def is_zero(self) -> bool:
        return not self.values

    def support_degrees(self) -> set[int]:
        return {s.degree + t.degree for s, t in self.values}

    def __str__(self) -> str:
        return format_form(self)


def zero_form(window: int, algebra: AlgebraKind = AlgebraKind.W) -> BilinearFormWindow:
    return BilinearFormWindow(algebra, window)


def _form_from_function(window: int, algebra: AlgebraKind, fn) -> BilinearFormWindow:
    syms = window_symbols(window, algebra)
    return BilinearFormWindow(algebra, window, {(s, t): fn(s, t) for s, t in itertools.combinations(syms, 2)})


def make_alpha(window: int, algebra: AlgebraKind = AlgebraKind.W) -> BilinearFormWindow:
    """alpha(L_m, L_n) = delta_{m+n,0} (m^3 - m)/12, zero on all other pairs."""
    def fn(s, t):
        if s.kind == t.kind == "L" and s.index + t.index == 0:
            return virasoro(s.index)
        return 0
    return _form_from_function(window, algebra, fn)


def make_beta(window: int, algebra: AlgebraKind = AlgebraKind.W) -> BilinearFormWindow:
    """beta(L_m, I_n) = delta_{m+n,0} (m^3 - m)/12, zero on all other pairs."""
    def fn(s, t):
        # stored pairs have every L before every I
        if s.kind == "L" and t.kind == "I" and s.index + t.index == 0:
            return virasoro(s.index)
        return 0
    return _form_from_function(window, algebra, fn)


def coboundary_of(f: Mapping[BasisSymbol, Scalar], window: int,
                  algebra: AlgebraKind = AlgebraKind.W) -> BilinearFormWindow:
    """psi_f(x, y) = f([x, y]) for a functional given by its values on window symbols.

    Pairs whose bracket leaves the window are excluded from the form's domain.
    """
    values, excluded = {}, set()
    for s, t in itertools.combinations(window_symbols(window, algebra), 2):
        b = bracket_basis(s, t, algebra)
        if not in_window(b, window):
            excluded.add((s, t))
            continue
        values[(s, t)] = sum((c * Fraction(f.get(u, 0)) for u, c in b.items()), Fraction(0))
    return BilinearFormWindow(algebra, window, values, frozenset(excluded))


def cocycle_defect(psi: BilinearFormWindow, x, y, z) -> Fraction:
    """psi([x,y], z) + psi([y,z], x) + psi([z,x], y); raises OutOfWindowError on escape."""
    x, y, z = as_element(x), as_element(y), as_element(z)
    br = psi.algebra
    return psi(bracket(x, y, br), z) + psi(bracket(y, z, br), x) + psi(bracket(z, x, br), y)


def admissible_triples(window: int, algebra: AlgebraKind, degree: int | None = None):
    """Distinct basis triples s < t < u whose pairwise brackets all stay in the window."""
    syms = window_symbols(window, algebra)
    for s, t, u in itertools.combinations(syms, 3):
        if degree is not None and s.degree + t.degree + u.degree != degree:
            continue
        if all(in_window(bracket_basis(a, b, algebra), window) for a, b in ((s, t), (t, u), (u, s))):
            yield s, t, u


def cocycle_violations(psi: BilinearFormWindow, degree: int | None = None) -> list[tuple[tuple, Fraction]]:
    """All admissible triples with nonzero defect (restricted to a total degree if given).

    Triples touching pairs outside the form's domain are skipped.
    """
    out = []
    for triple in admissible_triples(psi.window, psi.algebra, degree):
        try:
            d = cocycle_defect(psi, *triple)
        except OutOfWindowError:
            # psi itself is undefined on one of the evaluation pairs (e.g. a coboundary
            # whose bracket escapes the window): the identity cannot be tested there
            continue
        if d:
            out.append((triple, d))
    return out


# -- windowed H^2 ------------------------------------------------------------------

@dataclass
class H2Report:
    algebra: AlgebraKind
    window: int
    degree: int
    unknowns: list[Pair]
    equations: int
    cocycle_dim: int
    coboundary_dim: int
    basis: list[BilinearFormWindow]

    @property
    def h2_dim(self) -> int:
        return self.cocycle_dim - self.coboundary_dim


def degree_pairs(window: int, algebra: AlgebraKind, degree: int) -> list[Pair]:
    syms = window_symbols(window, algebra)
    return [(s, t) for s, t in itertools.combinations(syms, 2) if s.degree + t.degree == degree]


def _pair_priority(p: Pair) -> tuple:
    # smallest indices first; pairs containing L_1 first among equals, so the
    # canonical pivots in degree 0 are (L_1, L_-1) and (L_1, I_-1)
    s, t = p
    return (max(abs(s.index), abs(t.index)), 0 if L(1) in p else 1, s.sort_key(), t.sort_key())


def cocycle_system(window: int, degree: int = 0, algebra: AlgebraKind = AlgebraKind.W):
    """Unknown pairs and sparse rows of the cocycle equations in one graded block."""
    unknowns = sorted(degree_pairs(window, algebra, degree), key=_pair_priority)
    col = {p: j for j, p in enumerate(unknowns)}
    rows = []
    for s, t, u in admissible_triples(window, algebra, degree):
        row: dict[int, Fraction] = {}
        for a, b, c in ((s, t, u), (t, u, s), (u, s, t)):
            for v, k in bracket_basis(a, b, algebra).items():
                pair, sign = orient(v, c)
                if pair is None:
                    continue
                j = col[pair]
                row[j] = row.get(j, 0) + sign * k
        if any(row.values()):
            rows.append(row)
    return unknowns, rows


def _coboundary_vectors(unknowns: list[Pair], window: int, degree: int, algebra: AlgebraKind):
    """psi_f restricted to the unknown pairs, one vector per degree-``degree`` window symbol."""
    targets = [s for s in window_symbols(window, algebra) if s.degree == degree]
    vecs = []
    for v in targets:
        vec = [bracket_basis(s, t, algebra)[v] for s, t in unknowns]
        if any(vec):
            vecs.append((v, vec))
    return vecs


def _vector_to_form(vec, unknowns, window, algebra) -> BilinearFormWindow:
    return BilinearFormWindow(algebra, window, {p: x for p, x in zip(unknowns, vec)})


def _normalize(vec: list[Fraction], unknowns: list[Pair]) -> list[Fraction]:
    """Scale so the first nonzero value (priority order) is (m^3-m)/12 at a pair led by L_m, else 1."""
    j = next(j for j, x in enumerate(vec) if x)
    s, _ = unknowns[j]
    target = virasoro(s.index) if s.kind == "L" else Fraction(0)
    if not target:
        target = Fraction(1)
    k = target / vec[j]
    return [k * x for x in vec]


def compute_h2_window(window: int, degree: int = 0, algebra: AlgebraKind = AlgebraKind.W) -> H2Report:
    """Cocycles modulo coboundaries in one graded block of the window.

    Representatives vanish on the pivot pairs of the coboundary space (in degree 0:
    at (L_1, L_-1) and (L_1, I_-1)) and are normalized by :func:`_normalize`.
    """
    if window < MIN_WINDOW:
        raise WittlabError(f"window must be at least {MIN_WINDOW}, got {window}")
    unknowns, rows = cocycle_system(window, degree, algebra)
    if not rows:
        raise WittlabError(f"window {window} generates no cocycle constraints in degree {degree}")
    n = len(unknowns)
    cocycles = linalg.nullspace(rows, n)
    cob = [vec for _, vec in _coboundary_vectors(unknowns, window, degree, algebra)]
    cob_dim = linalg.rank([dict(enumerate(v)) for v in cob], n) if cob else 0
    reduced = linalg.reduce_modulo(cocycles, cob, n)
    ech = linalg.row_reduce([dict(enumerate(v)) for v in reduced], n)
    reps = []
    for r in ech.rows:
        vec = [Fraction(r.get(j, 0)) for j in range(n)]
        reps.append(_vector_to_form(_normalize(vec, unknowns), unknowns, window, algebra))
    if len(reps) != len(cocycles) - cob_dim:
        raise AssertionError("coboundaries are not contained in the windowed cocycle space")
    return H2Report(algebra, window, degree, unknowns, len(rows), len(cocycles), cob_dim, reps)


# -- B^g(V) ------------------------------------------------------------------------

@dataclass
class BgvReport:
    window: int
    unknowns: list[Pair]
    equations: int
    basis: list[BilinearFormWindow]

    @property
    def dimension(self) -> int:
        return len(self.basis)


def bgv_equation(i: int, j: int, k: int) -> dict[Pair, Fraction]:
    """(i - j) f(I_{i+j}, I_k) + (k - i) f(I_{k+i}, I_j) as coefficients on stored I-pairs.

    This is the invariance f(L_i . u, v) + f(u, L_i . v) = 0 at u = I_j, v = I_k,
    rewritten with antisymmetry.
    """
    out: dict[Pair, Fraction] = {}
    for coeff, a, b in ((i - j, I(i + j), I(k)), (k - i, I(k + i), I(j))):
        pair, sign = orient(a, b)
        if pair is None or coeff == 0:
            continue
        out[pair] = out.get(pair, 0) + sign * coeff
    return {p: Fraction(c) for p, c in out.items() if c}


def compute_bgv_window(window: int) -> BgvReport:
    """Antisymmetric L-invariant forms on the I-part of the window (expected: none)."""
    if window < MIN_WINDOW:
        raise WittlabError(f"window must be at least {MIN_WINDOW}, got {window}")
    idx = range(-window, window + 1)
    unknowns = [(I(j), I(k)) for j, k in itertools.combinations(idx, 2)]
    col = {p: n for n, p in enumerate(unknowns)}
    rows = []
    for i, j, k in itertools.product(idx, repeat=3):
        if abs(i + j) > window or abs(k + i) > window:
            continue
        eq = bgv_equation(i, j, k)
        if eq:
            rows.append({col[p]: c for p, c in eq.items()})
    basis = [BilinearFormWindow(AlgebraKind.W, window, dict(zip(unknowns, v)))
             for v in linalg.nullspace(rows, len(unknowns))]
    return BgvReport(window, unknowns, len(rows), basis)


# -- decomposition onto alpha, beta and coboundaries ---------------------------------

@dataclass
class CocycleDecomposition:
    alpha_coeff: Fraction
    beta_coeff: Fraction
    coboundary_function: dict[BasisSymbol, Fraction]
    residual: BilinearFormWindow

    def reconstruct(self) -> BilinearFormWindow:
        w, alg = self.residual.window, self.residual.algebra
        return (self.alpha_coeff * make_alpha(w, alg) + self.beta_coeff * make_beta(w, alg)
                + coboundary_of(self.coboundary_function, w, alg) + self.residual)

    @property
    def in_span(self) -> bool:
        return self.residual.is_zero()


_CANONICAL_PAIRS = [(L(-1), L(1)), (L(1), I(-1)), (L(-2), L(2)), (L(2), I(-2))]


def decompose_cocycle(psi: BilinearFormWindow) -> CocycleDecomposition:
    """Write a degree-0 cocycle as a*alpha + b*beta + psi_f (f on L_0, I_0) + residual."""
    if psi.algebra is not AlgebraKind.W:
        raise WittlabError("decomposition is defined for cocycles on W")
    if psi.window < 2:
        raise WittlabError("window must be at least 2")
    if psi.support_degrees() - {0}:
        raise WittlabError("form is not supported in degree 0")
    bad = cocycle_violations(psi, degree=0)
    if bad:
        raise NotACocycleError(*bad[0])
    w = psi.window
    generators = [make_alpha(w), make_beta(w), coboundary_of({L(0): 1}, w), coboundary_of({I(0): 1}, w)]
    pairs = degree_pairs(w, AlgebraKind.W, 0)
    matrix = [[g.value(*p) for g in generators] for p in pairs]
    rhs = [psi.value(*p) for p in pairs]
    x = linalg.solve(matrix, rhs, 4)
    if x is None:
        # not in the span: fit the four canonical pairs, leave the rest as residual
        idx = [pairs.index(p) for p in _CANONICAL_PAIRS]
        x = linalg.solve([matrix[i] for i in idx], [rhs[i] for i in idx], 4)
    a, b, f_l0, f_i0 = x
    f = {L(0): f_l0, I(0): f_i0}
    fitted = a * generators[0] + b * generators[1] + f_l0 * generators[2] + f_i0 * generators[3]
    return CocycleDecomposition(a, b, {s: v for s, v in f.items()}, psi - fitted)


@dataclass
class CoboundaryCertificate:
    """Rank test for psi = psi_f with f supported on one degree: feasible iff the ranks agree."""

    rank_matrix: int
    rank_augmented: int

    @property
    def is_coboundary(self) -> bool:
        return self.rank_matrix == self.rank_augmented


def coboundary_certificate(psi: BilinearFormWindow, degree: int = 0) -> CoboundaryCertificate:
    unknowns = degree_pairs(psi.window, psi.algebra, degree)
    targets = [s for s in window_symbols(psi.window, psi.algebra) if s.degree == degree]
    matrix = [[bracket_basis(s, t, psi.algebra)[v] for v in targets] for s, t in unknowns]
    rhs = [psi.value(s, t) for s, t in unknowns]
    return CoboundaryCertificate(*linalg.consistency_ranks(matrix, rhs, len(targets)))


# -- text format ---------------------------------------------------------------------

def _display_pair(s: BasisSymbol, t: BasisSymbol) -> tuple[BasisSymbol, BasisSymbol, int]:
    # higher index first, ties in the total order
    if (t.index, -t.sort_key()[0]) > (s.index, -s.sort_key()[0]):
        return t, s, -1
    return s, t, 1


def format_form(psi: BilinearFormWindow) -> str:
    """One line per nonzero pair, e.g. ``PAIR L[2] L[-2] = 1/2``."""
    lines = []
    for (s, t), v in sorted(psi.values.items(), key=lambda kv: _pair_priority(kv[0])):
        a, b, sign = _display_pair(s, t)
        lines.append(f"PAIR {a.text(psi.algebra)} {b.text(psi.algebra)} = {format_scalar(sign * v)}")
    return "\n".join(lines)


def parse_form(text: str, window: int, algebra: AlgebraKind = AlgebraKind.W) -> BilinearFormWindow:
    values: dict[Pair, Fraction] = {}
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.strip()
        if not line:
            continue
        head, sep, val = line.partition("=")
        toks = head.split()
        if not sep or len(toks) != 3 or toks[0] != "PAIR":
            raise ParseError(f"malformed form line {lineno}", line, 0)
        s, t = parse_symbol(toks[1], algebra), parse_symbol(toks[2], algebra)
        try:
            v = Fraction(val.strip())
        except ValueError:
            raise ParseError(f"bad value on line {lineno}", line, line.index("=") + 1) from None
        pair, sign = orient(s, t)
        if pair is None:
            if v:
                raise ParseError(f"nonzero value on a diagonal pair, line {lineno}", line, 0)
            continue
        for u in pair:
            if abs(u.index) > window:
                raise OutOfWindowError(f"{u} is outside the window on line {lineno}")
        values[pair] = values.get(pair, 0) + sign * v
    return BilinearFormWindow(algebra, window, values)

"""Derivations of W and W~ on a window, modulo inner derivations.

A derivation D into a module V satisfies D[x, y] = x.D(y) - y.D(x).  Here V is
either the algebra itself (adjoint action) or the ideal I spanned by the I_m.
"""

from __future__ import annotations

import enum
import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Mapping

from .algebra import (
    C2,
    AlgebraKind,
    BasisSymbol,
    Element,
    I,
    L,
    OutOfWindowError,
    ParseError,
    WittlabError,
    ZERO,
    as_element,
    bracket,
    bracket_basis,
    format_element,
    in_window,
    parse_element,
    parse_symbol,
    window_symbols,
)
from . import linalg

MIN_WINDOW = 3


class Target(enum.Enum):
    ALGEBRA = "algebra"
    I = "I"  # noqa: E741


@dataclass(frozen=True, eq=False)
class LinearMapWindow:
    """Linear map given by the images of the basis symbols in its domain.

    Applying it to a symbol outside ``images`` raises :class:`OutOfWindowError`.
    """

    algebra: AlgebraKind
    window: int
    images: Mapping[BasisSymbol, Element] = field(default_factory=dict)

    def __call__(self, x: Element | BasisSymbol) -> Element:
        out: dict[BasisSymbol, Fraction] = {}
        for s, c in as_element(x).items():
            if s not in self.images:
                raise OutOfWindowError(f"map is undefined on {s}")
            for t, d in self.images[s].items():
                out[t] = out.get(t, 0) + c * d
        return Element(out)

    @property
    def domain(self) -> list[BasisSymbol]:
        return sorted(self.images)

    def __add__(self, other: LinearMapWindow) -> LinearMapWindow:
        keys = set(self.images) & set(other.images)
        return LinearMapWindow(self.algebra, self.window, {s: self.images[s] + other.images[s] for s in keys})

    def __mul__(self, k) -> LinearMapWindow:
        return LinearMapWindow(self.algebra, self.window, {s: v * k for s, v in self.images.items()})

    __rmul__ = __mul__

    def __sub__(self, other: LinearMapWindow) -> LinearMapWindow:
        return self + other * -1

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, LinearMapWindow):
            return NotImplemented
        return set(self.images) == set(other.images) and all(self.images[s] == other.images[s] for s in self.images)

    def restrict(self, domain: Iterable[BasisSymbol]) -> LinearMapWindow:
        return LinearMapWindow(self.algebra, self.window, {s: self.images[s] for s in domain})

    def is_zero(self) -> bool:
        return not any(self.images.values())

    def shift_degree(self) -> int | None:
        """The n with deg D(s) = deg s + n for every symbol, or None if D is not homogeneous."""
        shifts = {t.degree - s.degree for s, v in self.images.items() for t in v}
        if len(shifts) > 1:
            return None
        return shifts.pop() if shifts else 0

    def __str__(self) -> str:
        return format_map(self)


def derivation_defect(D: LinearMapWindow, x, y, target: Target = Target.ALGEBRA) -> Element:
    """D([x, y]) - [x, D(y)] + [y, D(x)]; zero exactly when the pair obeys the derivation law.

    For ``Target.I`` the images must lie in I and the module action is the bracket.
    """
    x, y = as_element(x), as_element(y)
    alg = D.algebra
    dx, dy = D(x), D(y)
    if target is Target.I:
        for v in (dx, dy):
            if any(s.kind != "I" for s in v):
                raise WittlabError(f"image {v} is not in I")
    return D(bracket(x, y, alg)) - bracket(x, dy, alg) + bracket(y, dx, alg)


def make_outer_derivation(window: int, algebra: AlgebraKind = AlgebraKind.W) -> LinearMapWindow:
    """D(L_m) = 0, D(I_m) = I_m; on W~ also D(C1) = 0, D(C2) = C2."""
    if algebra is AlgebraKind.W22:
        raise WittlabError("D(L_m)=0, D(I_m)=I_m has no extension to W(2,2)")
    images = {}
    for s in window_symbols(window, algebra):
        images[s] = Element.basis(s) if s.kind == "I" or s == C2 else ZERO
    return LinearMapWindow(algebra, window, images)


def make_d1(window: int) -> LinearMapWindow:
    """The I-valued derivation D_1(L_m) = 0, D_1(I_m) = I_m of W."""
    return make_outer_derivation(window, AlgebraKind.W)


def ad(w: Element | BasisSymbol, window: int, algebra: AlgebraKind = AlgebraKind.W,
       domain: Iterable[BasisSymbol] | None = None) -> LinearMapWindow:
    """The inner derivation x -> [w, x]."""
    w = as_element(w)
    domain = window_symbols(window, algebra) if domain is None else domain
    return LinearMapWindow(algebra, window, {s: bracket(w, s, algebra) for s in domain})


def inner_i_valued(v: Element | BasisSymbol, window: int,
                   domain: Iterable[BasisSymbol] | None = None) -> LinearMapWindow:
    """The inner I-valued derivation x -> x.v = [x, v] for v in I."""
    v = as_element(v)
    if any(s.kind != "I" for s in v):
        raise WittlabError(f"{v} is not in I")
    domain = window_symbols(window) if domain is None else domain
    return LinearMapWindow(AlgebraKind.W, window, {s: bracket(s, v) for s in domain})


# -- the windowed solve ------------------------------------------------------------

@dataclass
class DerivationSpaceReport:
    algebra: AlgebraKind
    target: Target
    window: int
    degree: int | None
    unknowns: int
    equations: int
    derivation_dim: int
    inner_dim: int
    outer_basis: list[LinearMapWindow]
    derivation_basis: list[LinearMapWindow] = field(repr=False, default_factory=list)

    @property
    def outer_dim(self) -> int:
        return self.derivation_dim - self.inner_dim


def _target_symbols(s: BasisSymbol, degree: int | None, window: int, algebra: AlgebraKind,
                    target: Target) -> list[BasisSymbol]:
    syms = [t for t in window_symbols(window, algebra)
            if degree is None or t.degree == s.degree + degree]
    if target is Target.I:
        syms = [t for t in syms if t.kind == "I"]
    return syms


class _DerivationSystem:
    """Unknown coefficients D(s)[t] and the derivation-law equations between them."""

    def __init__(self, algebra: AlgebraKind, target: Target, degree: int | None, window: int):
        self.algebra, self.target, self.degree, self.window = algebra, target, degree, window
        reach = window - abs(degree or 0)
        self.domain = [s for s in window_symbols(window, algebra) if abs(s.index) <= reach]
        self.columns: list[tuple[BasisSymbol, BasisSymbol]] = []
        for s in self.domain:
            self.columns.extend((s, t) for t in _target_symbols(s, degree, window, algebra, target))
        self.col = {c: j for j, c in enumerate(self.columns)}
        self.by_source: dict[BasisSymbol, list[tuple[BasisSymbol, int]]] = {}
        for (s, t), j in self.col.items():
            self.by_source.setdefault(s, []).append((t, j))

    def rows(self) -> list[dict[int, Fraction]]:
        alg = self.algebra
        domain = set(self.domain)
        out = []
        for x, y in itertools.combinations(self.domain, 2):
            xy = bracket_basis(x, y, alg)
            if any(v not in domain for v in xy):
                continue
            eq: dict[BasisSymbol, dict[int, Fraction]] = {}

            def add(sym, j, c):
                row = eq.setdefault(sym, {})
                row[j] = row.get(j, 0) + c

            for v, c in xy.items():
                for t, j in self.by_source[v]:
                    add(t, j, c)
            for t, j in self.by_source[y]:
                for w, c in bracket_basis(x, t, alg).items():
                    add(w, j, -c)
            for t, j in self.by_source[x]:
                for w, c in bracket_basis(y, t, alg).items():
                    add(w, j, c)
            for row in eq.values():
                row = {j: c for j, c in row.items() if c}
                if row:
                    out.append(row)
        return out

    def to_vector(self, D: LinearMapWindow) -> list[Fraction]:
        vec = [Fraction(0)] * len(self.columns)
        for s in self.domain:
            img = D(s)
            for t, c in img.items():
                if (s, t) not in self.col:
                    raise WittlabError(f"{D} maps {s} outside the ansatz ({t})")
                vec[self.col[(s, t)]] = c
        return vec

    def to_map(self, vec) -> LinearMapWindow:
        images = {s: {} for s in self.domain}
        for (s, t), c in zip(self.columns, vec):
            if c:
                images[s][t] = c
        return LinearMapWindow(self.algebra, self.window, {s: Element(v) for s, v in images.items()})

    def inner_maps(self) -> list[LinearMapWindow]:
        if self.target is Target.I:
            vs = [s for s in window_symbols(self.window) if s.kind == "I"
                  and (self.degree is None or s.degree == self.degree)]
            return [inner_i_valued(v, self.window, self.domain) for v in vs]
        ws = [s for s in window_symbols(self.window, self.algebra)
              if self.degree is None or s.degree == self.degree]
        maps = [ad(w, self.window, self.algebra, self.domain) for w in ws]
        if self.degree is None:
            # ungraded mode keeps only the inner maps that fit the window, so its
            # outer count is an over-estimate; it exists for block-structure checks
            maps = [m for m in maps if all(in_window(v, self.window) for v in m.images.values())]
        return maps


def compute_der_space(algebra: AlgebraKind, target: Target, degree: int | None, window: int) -> DerivationSpaceReport:
    """Windowed Der/Inn in one degree (``degree=None`` solves the ungraded system).

    Unknowns: D(s) for symbols with |index| <= N - |degree|, valued in the degree
    shifted window component.  An equation is imposed on (x, y) only when [x, y]
    lies in that domain.
    """
    algebra = AlgebraKind.parse(algebra)
    target = Target(target)
    if window < MIN_WINDOW:
        raise WittlabError(f"window must be at least {MIN_WINDOW}, got {window}")
    if degree is not None and abs(degree) > window - 2:
        raise WittlabError(f"|degree| must be at most window - 2 = {window - 2}")
    if target is Target.I and algebra is not AlgebraKind.W:
        raise WittlabError("I-valued derivations are computed for W only")
    system = _DerivationSystem(algebra, target, degree, window)
    n = len(system.columns)
    rows = system.rows()
    ders = linalg.nullspace(rows, n)
    inner_vecs = []
    for m in system.inner_maps():
        v = system.to_vector(m)
        if any(v):
            inner_vecs.append(v)
    for v in inner_vecs:
        if any(linalg.matvec(rows, v)):
            raise AssertionError("an inner derivation violates the windowed equations")
    inner_dim = linalg.rank([dict(enumerate(v)) for v in inner_vecs], n) if inner_vecs else 0
    reduced = linalg.reduce_modulo(ders, inner_vecs, n)
    ech = linalg.row_reduce([dict(enumerate(v)) for v in reduced], n)
    outer = [system.to_map([Fraction(r.get(j, 0)) for j in range(n)]) for r in ech.rows]
    if len(outer) != len(ders) - inner_dim:
        raise AssertionError("outer basis size disagrees with the quotient dimension")
    return DerivationSpaceReport(algebra, target, window, degree, n, len(rows), len(ders), inner_dim,
                                 outer, [system.to_map(v) for v in ders])


@dataclass
class InnerCertificate:
    """Solve of ad(w) = D over window elements w.

    ``element`` is a solution when one exists; otherwise the augmented rank exceeds
    the coefficient rank, which certifies that D is not inner on this window.
    """

    element: Element | None
    rank_matrix: int
    rank_augmented: int

    @property
    def is_inner(self) -> bool:
        return self.rank_matrix == self.rank_augmented


def inner_certificate(D: LinearMapWindow, target: Target = Target.ALGEBRA) -> InnerCertificate:
    alg, n = D.algebra, D.window
    if target is Target.I:
        candidates = [s for s in window_symbols(n) if s.kind == "I"]

        def act(w, s):
            return bracket_basis(s, w, alg)
    else:
        candidates = [s for s in window_symbols(n, alg) if not s.is_central]

        def act(w, s):
            return bracket_basis(w, s, alg)
    eqs: dict[tuple[BasisSymbol, BasisSymbol], dict[int, Fraction]] = {}
    rhs: dict[tuple[BasisSymbol, BasisSymbol], Fraction] = {}
    for s in D.domain:
        for j, w in enumerate(candidates):
            for u, c in act(w, s).items():
                eqs.setdefault((s, u), {})[j] = c
        for u, c in D(s).items():
            rhs[(s, u)] = c
            eqs.setdefault((s, u), {})
    keys = list(eqs)
    matrix = [eqs[k] for k in keys]
    b = [rhs.get(k, Fraction(0)) for k in keys]
    r_m, r_a = linalg.consistency_ranks(matrix, b, len(candidates))
    element = None
    if r_m == r_a:
        x = linalg.solve(matrix, b, len(candidates))
        element = Element(zip(candidates, x))
    return InnerCertificate(element, r_m, r_a)


def reduces_to(D: LinearMapWindow, reference: LinearMapWindow, target: Target = Target.ALGEBRA) -> Fraction | None:
    """The nonzero c with D - c*reference inner on D's domain, or None if there is none."""
    ref = reference.restrict(D.domain)
    # D - c*ref inner  <=>  D in span(inner, ref): solve with c as an extra unknown
    alg, n = D.algebra, D.window
    if target is Target.I:
        candidates = [s for s in window_symbols(n) if s.kind == "I"]

        def act(w, s):
            return bracket_basis(s, w, alg)
    else:
        candidates = [s for s in window_symbols(n, alg) if not s.is_central]

        def act(w, s):
            return bracket_basis(w, s, alg)
    k = len(candidates)
    eqs: dict[tuple, dict[int, Fraction]] = {}
    rhs: dict[tuple, Fraction] = {}
    for s in D.domain:
        for j, w in enumerate(candidates):
            for u, c in act(w, s).items():
                eqs.setdefault((s, u), {})[j] = c
        for u, c in ref(s).items():
            eqs.setdefault((s, u), {})[k] = c
        for u, c in D(s).items():
            rhs[(s, u)] = c
            eqs.setdefault((s, u), {})
    keys = list(eqs)
    x = linalg.solve([eqs[q] for q in keys], [rhs.get(q, Fraction(0)) for q in keys], k + 1)
    if x is None or x[k] == 0:
        return None
    return x[k]


# -- Hom_{U(W)}(I, L) ---------------------------------------------------------------

def i_action_on_l(m: int, k: int) -> Element:
    """I_m . L_k = (m - k) L_{m+k}: I acts on L through the identification I ~ L."""
    return Element({L(m + k): m - k})


@dataclass
class HomReport:
    window: int
    unknowns: int
    equations: int
    basis: list[LinearMapWindow]

    @property
    def dimension(self) -> int:
        return len(self.basis)


def compute_hom_I_to_L(window: int, include_compatibility: bool = True,
                       l_indices: Iterable[int] | None = None) -> HomReport:
    """Module maps f: I -> L with f(I_m) in the window part of L.

    Equations: [L_n, f(I_m)] = f([L_n, I_m]) for n in ``l_indices`` (default: the
    whole window) whenever n + m stays in the window, and, when
    ``include_compatibility``, I_m . f(I_n) = f([I_m, I_n]) = 0.
    """
    if window < MIN_WINDOW:
        raise WittlabError(f"window must be at least {MIN_WINDOW}, got {window}")
    idx = list(range(-window, window + 1))
    ns = idx if l_indices is None else list(l_indices)
    col = {(m, k): j for j, (m, k) in enumerate(itertools.product(idx, idx))}
    rows: list[dict[int, Fraction]] = []

    def flush(eq):
        for row in eq.values():
            row = {j: c for j, c in row.items() if c}
            if row:
                rows.append(row)

    for n in ns:
        for m in idx:
            if abs(n + m) > window:
                continue
            eq: dict[BasisSymbol, dict[int, Fraction]] = {}
            for k in idx:
                # [L_n, x_{m,k} L_k]
                if n != k:
                    eq.setdefault(L(n + k), {})[col[(m, k)]] = Fraction(n - k)
            if n - m:
                for k in idx:
                    row = eq.setdefault(L(k), {})
                    j = col[(n + m, k)]
                    row[j] = row.get(j, 0) - (n - m)
            flush(eq)
    if include_compatibility:
        for m in idx:
            for n in idx:
                eq = {}
                for k in idx:
                    for u, c in i_action_on_l(m, k).items():
                        eq.setdefault(u, {})[col[(n, k)]] = c
                flush(eq)
    basis = []
    for v in linalg.nullspace(rows, len(col)):
        images = {I(m): Element({L(k): v[col[(m, k)]] for k in idx}) for m in idx}
        basis.append(LinearMapWindow(AlgebraKind.W, window, images))
    return HomReport(window, len(col), len(rows), basis)


# -- degree-zero reduction for one graded piece -----------------------------------

@dataclass
class WeightReductionReport:
    m: int
    solution_basis: list[tuple[Fraction, Fraction]]
    b_forced_zero: bool
    a: Fraction
    inner_element: Element
    inner_checks: bool

    @property
    def all_inner(self) -> bool:
        return self.b_forced_zero and self.inner_checks


def verify_weight_reduction(m: int, a: Fraction | int = 1) -> WeightReductionReport:
    """Derivations W_0 -> C I_m (m != 0) are inner.

    Unknowns phi(L_0) = a I_m, phi(I_0) = b I_m under the derivation law on
    (L_0, I_0); every solution equals x -> [x, E_m] with E_m = -(a/m) I_m.
    """
    if m == 0:
        raise WittlabError("m must be nonzero")
    a = Fraction(a)
    # phi([L0, I0]) = [phi(L0), I0] + [L0, phi(I0)] with [L0, I0] = 0: coefficient of I_m
    row = [bracket_basis(I(m), I(0), AlgebraKind.W)[I(m)], bracket_basis(L(0), I(m), AlgebraKind.W)[I(m)]]
    sols = [(v[0], v[1]) for v in linalg.nullspace([row], 2)]
    b_zero = all(b == 0 for _, b in sols)
    e = Element({I(m): -a / m})
    checks = bracket(L(0), e) == Element({I(m): a}) and bracket(I(0), e) == ZERO
    for sa, sb in sols:
        em = Element({I(m): -sa / m})
        checks = checks and bracket(L(0), em) == Element({I(m): sa}) and bracket(I(0), em) == Element({I(m): sb})
    return WeightReductionReport(m, sols, b_zero, a, e, checks)


# -- text format -----------------------------------------------------------------------

def format_map(D: LinearMapWindow) -> str:
    """One line per domain symbol, e.g. ``MAP I[2] -> I[2]``."""
    return "\n".join(f"MAP {s.text(D.algebra)} -> {format_element(D.images[s], D.algebra)}"
                     for s in D.domain)


def parse_map(text: str, window: int, algebra: AlgebraKind = AlgebraKind.W) -> LinearMapWindow:
    images = {}
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.strip()
        if not line:
            continue
        head, sep, rest = line.partition("->")
        toks = head.split()
        if not sep or len(toks) != 2 or toks[0] != "MAP":
            raise ParseError(f"malformed map line {lineno}", line, 0)
        s = parse_symbol(toks[1], algebra)
        images[s] = parse_element(rest, algebra)
    return LinearMapWindow(algebra, window, images)

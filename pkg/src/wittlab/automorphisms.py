"""Automorphisms of W: inner maps exp(k ad I_m), the family sigma(eps, lam, a, mu), normal forms.

Composition convention: a product ``f g`` is function composition, ``g`` applied first.

    sigma(L_n) = a^n eps L_{eps n} + a^n lam n I_{eps n}
    sigma(I_n) = a^n mu I_{eps n}

Since ad I_m squares to zero on W, exp(k ad I_m) = 1 + k ad I_m, and these maps
commute.  exp(k ad I_0) coincides with sigma(1, -k, 1, 1), so inner words never
carry index 0: that direction lives in ``lam``.
"""

from __future__ import annotations

import itertools
from functools import lru_cache
import random
import re
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Mapping, Sequence

from .algebra import (
    C1,
    C2,
    AlgebraKind,
    BasisSymbol,
    Element,
    I,
    L,
    ParseError,
    WittlabError,
    as_element,
    bracket,
    bracket_basis,
    format_scalar,
    in_window,
    window_symbols,
)
from . import linalg


@dataclass(frozen=True)
class SigmaParams:
    epsilon: int = 1
    lam: Fraction = Fraction(0)
    a: Fraction = Fraction(1)
    mu: Fraction = Fraction(1)

    def __post_init__(self):
        if self.epsilon not in (1, -1):
            raise WittlabError("epsilon must be +1 or -1")
        for name in ("lam", "a", "mu"):
            object.__setattr__(self, name, Fraction(getattr(self, name)))
        if self.a == 0 or self.mu == 0:
            raise WittlabError("a and mu must be nonzero")

    def __str__(self) -> str:
        return (f"sigma(e={self.epsilon}, l={format_scalar(self.lam)}, "
                f"a={format_scalar(self.a)}, mu={format_scalar(self.mu)})")


IDENTITY_SIGMA = SigmaParams()


def pi(epsilon: int) -> SigmaParams:
    return SigmaParams(epsilon, 0, 1, 1)


def sigma_lam(lam) -> SigmaParams:
    return SigmaParams(1, lam, 1, 1)


def sigma_a_mu(a, mu) -> SigmaParams:
    return SigmaParams(1, 0, a, mu)


def _require_w(s: BasisSymbol) -> None:
    if s.is_central:
        raise WittlabError(f"{s} is not in W")


def _apply_linear(x: Element | BasisSymbol, image: Callable[[BasisSymbol], Element]) -> Element:
    out: dict[BasisSymbol, Fraction] = {}
    for s, c in as_element(x).items():
        for t, d in image(s).items():
            out[t] = out.get(t, 0) + c * d
    return Element(out)


@lru_cache(maxsize=1 << 16)
def _sigma_image(p: SigmaParams, s: BasisSymbol) -> Element:
    _require_w(s)
    n, e = s.index, p.epsilon
    an = p.a ** n
    if s.kind == "L":
        return Element({L(e * n): an * e, I(e * n): an * p.lam * n})
    return Element({I(e * n): an * p.mu})


def apply_sigma(p: SigmaParams, x: Element | BasisSymbol) -> Element:
    if isinstance(x, BasisSymbol):
        return _sigma_image(p, x)
    return _apply_linear(x, lambda s: _sigma_image(p, s))


def compose_sigma(p1: SigmaParams, p2: SigmaParams) -> SigmaParams:
    """Parameters of p1 o p2 (p2 applied first)."""
    return SigmaParams(p1.epsilon * p2.epsilon, p1.lam + p1.mu * p2.lam,
                       p1.a ** p2.epsilon * p2.a, p1.mu * p2.mu)


def invert_sigma(p: SigmaParams) -> SigmaParams:
    return SigmaParams(p.epsilon, -p.lam / p.mu, p.a ** -p.epsilon, 1 / p.mu)


# -- inner automorphisms ---------------------------------------------------------------

@dataclass(frozen=True)
class InnerWord:
    """Product of exp(k_m ad I_m) over m != 0, stored as {m: k_m}."""

    factors: Mapping[int, Fraction] = field(default_factory=dict)

    def __post_init__(self):
        clean = {}
        for m, k in self.factors.items():
            if m == 0:
                raise WittlabError("inner words cannot use I_0; that direction is sigma(1, -k, 1, 1)")
            k = Fraction(k)
            if k:
                clean[int(m)] = k
        object.__setattr__(self, "factors", dict(sorted(clean.items())))

    def __hash__(self) -> int:
        return hash(tuple(self.factors.items()))

    def __mul__(self, other: InnerWord) -> InnerWord:
        out = dict(self.factors)
        for m, k in other.factors.items():
            out[m] = out.get(m, 0) + k
        return InnerWord(out)

    def inverse(self) -> InnerWord:
        return InnerWord({m: -k for m, k in self.factors.items()})

    def __str__(self) -> str:
        return "inner{" + ", ".join(f"{m}:{format_scalar(k)}" for m, k in self.factors.items()) + "}"


def apply_exp_ad_i(m: int, k, x: Element | BasisSymbol) -> Element:
    """exp(k ad I_m) on W, i.e. x + k [I_m, x]."""
    x = as_element(x)
    for s in x:
        _require_w(s)
    return x + bracket(I(m), x) * Fraction(k)


def apply_inner(word: InnerWord, x: Element | BasisSymbol) -> Element:
    x = as_element(x)
    for s in x:
        _require_w(s)
    out = x
    for m, k in word.factors.items():
        out = out + bracket(I(m), x) * k
    return out


# -- normal forms ------------------------------------------------------------------------

@dataclass(frozen=True)
class AutomorphismNF:
    """The automorphism inner o sigma (sigma applied first)."""

    inner: InnerWord = field(default_factory=InnerWord)
    sigma: SigmaParams = IDENTITY_SIGMA

    def __call__(self, x: Element | BasisSymbol) -> Element:
        return apply_nf(self, x)

    def __str__(self) -> str:
        return format_nf(self)


IDENTITY = AutomorphismNF()


def apply_nf(f: AutomorphismNF, x: Element | BasisSymbol) -> Element:
    return apply_inner(f.inner, apply_sigma(f.sigma, x))


def conjugate_inner(p: SigmaParams, word: InnerWord) -> InnerWord:
    """sigma o word o sigma^-1, using sigma exp(k ad I_m) sigma^-1 = exp(k ad sigma(I_m))."""
    return InnerWord({p.epsilon * m: k * p.a ** m * p.mu for m, k in word.factors.items()})


def compose_nf(f: AutomorphismNF, g: AutomorphismNF) -> AutomorphismNF:
    """Normal form of f o g: move f.sigma past g.inner, then merge."""
    moved = conjugate_inner(f.sigma, g.inner)
    return AutomorphismNF(f.inner * moved, compose_sigma(f.sigma, g.sigma))


def invert_nf(f: AutomorphismNF) -> AutomorphismNF:
    inv = invert_sigma(f.sigma)
    return AutomorphismNF(conjugate_inner(inv, f.inner.inverse()), inv)


# -- generator words ---------------------------------------------------------------------

@dataclass(frozen=True)
class Generator:
    """One of pi(e), t(lam), b(a, mu), z(m, k) = exp(k ad I_m)."""

    name: str
    args: tuple

    def to_nf(self) -> AutomorphismNF:
        if self.name == "pi":
            return AutomorphismNF(sigma=pi(self.args[0]))
        if self.name == "t":
            return AutomorphismNF(sigma=sigma_lam(self.args[0]))
        if self.name == "b":
            return AutomorphismNF(sigma=sigma_a_mu(*self.args))
        m, k = self.args
        if m == 0:
            return AutomorphismNF(sigma=sigma_lam(-k))
        return AutomorphismNF(InnerWord({m: k}))

    def apply(self, x: Element | BasisSymbol) -> Element:
        """Direct action, independent of the normal-form machinery."""
        if self.name == "z":
            return apply_exp_ad_i(self.args[0], self.args[1], x)
        return apply_sigma(self.to_nf().sigma, x)

    def __str__(self) -> str:
        return f"{self.name}({','.join(format_scalar(Fraction(a)) for a in self.args)})"


_GEN = re.compile(r"\s*(pi|t|b|z)\(([^()]*)\)")
_ARITY = {"pi": 1, "t": 1, "b": 2, "z": 2}


def parse_word(text: str) -> list[Generator]:
    """Whitespace-separated generator tokens, e.g. ``pi(-1) t(1/2) b(2,3) z(3,2)``."""
    gens = []
    pos = 0
    while text[pos:].strip():
        m = _GEN.match(text, pos)
        if not m:
            raise ParseError("expected a generator pi(e), t(l), b(a,mu) or z(m,k)", text,
                             pos + len(text[pos:]) - len(text[pos:].lstrip()))
        name = m.group(1)
        raw = [a.strip() for a in m.group(2).split(",")]
        if len(raw) != _ARITY[name] or not all(raw):
            raise ParseError(f"{name} takes {_ARITY[name]} argument(s)", text, m.start(2))
        try:
            args = [Fraction(a) for a in raw]
        except ValueError:
            raise ParseError("bad numeric argument", text, m.start(2)) from None
        try:
            if name == "pi":
                if args[0] not in (1, -1):
                    raise WittlabError("pi takes +1 or -1")
                args = [int(args[0])]
            elif name == "z":
                if args[0].denominator != 1:
                    raise WittlabError("z(m, k) needs an integer m")
                args[0] = int(args[0])
            elif name == "b" and (args[0] == 0 or args[1] == 0):
                raise WittlabError("b(a, mu) needs nonzero a and mu")
        except WittlabError as exc:
            raise ParseError(str(exc), text, m.start(2)) from None
        gens.append(Generator(name, tuple(args)))
        pos = m.end()
    return gens


def word_to_nf(word: Sequence[Generator]) -> AutomorphismNF:
    nf = IDENTITY
    for g in word:
        nf = compose_nf(nf, g.to_nf())
    return nf


def apply_word(word: Sequence[Generator], x: Element | BasisSymbol) -> Element:
    """Apply g1 g2 ... gk to x sequentially, gk first."""
    out = as_element(x)
    for g in reversed(word):
        out = g.apply(out)
    return out


def random_word(rng: random.Random, length: int, max_index: int = 4) -> list[Generator]:
    def q():
        return Fraction(rng.randint(-5, 5), rng.randint(1, 3))

    def nonzero():
        while True:
            v = q()
            if v:
                return v
    word = []
    for _ in range(length):
        kind = rng.choice("ptbz")
        if kind == "p":
            word.append(Generator("pi", (rng.choice((1, -1)),)))
        elif kind == "t":
            word.append(Generator("t", (q(),)))
        elif kind == "b":
            word.append(Generator("b", (nonzero(), nonzero())))
        else:
            word.append(Generator("z", (rng.randint(-max_index, max_index), q())))
    return word


def random_sigma(rng: random.Random) -> SigmaParams:
    def nonzero():
        while True:
            v = Fraction(rng.randint(-6, 6), rng.randint(1, 4))
            if v:
                return v
    return SigmaParams(rng.choice((1, -1)), Fraction(rng.randint(-6, 6), rng.randint(1, 4)), nonzero(), nonzero())


# -- map comparisons on a window ------------------------------------------------------

def w_symbols(window: int) -> list[BasisSymbol]:
    return window_symbols(window, AlgebraKind.W)


def maps_agree(f: Callable, g: Callable, window: int) -> bool:
    return all(f(s) == g(s) for s in w_symbols(window))


def sigma_map(p: SigmaParams) -> Callable[[Element | BasisSymbol], Element]:
    return lambda x: apply_sigma(p, x)


def composite(*maps: Callable) -> Callable:
    """composite(f, g)(x) = f(g(x))."""
    def run(x):
        for m in reversed(maps):
            x = m(x)
        return x
    return run


def relation_checks(p: SigmaParams, q: SigmaParams, window: int) -> dict[str, bool]:
    """Composition law, inverse formula and the generator relations as map equalities."""
    S = sigma_map
    eps, lam, a, mu = p.epsilon, p.lam, p.a, p.mu
    checks = {
        "composition": maps_agree(S(compose_sigma(p, q)), composite(S(p), S(q)), window),
        "inverse_right": maps_agree(composite(S(p), S(invert_sigma(p))), S(IDENTITY_SIGMA), window),
        "inverse_left": maps_agree(composite(S(invert_sigma(p)), S(p)), S(IDENTITY_SIGMA), window),
        "pi_pi": maps_agree(composite(S(pi(eps)), S(pi(q.epsilon))), S(pi(eps * q.epsilon)), window),
        "t_t": maps_agree(composite(S(sigma_lam(lam)), S(sigma_lam(q.lam))), S(sigma_lam(lam + q.lam)), window),
        "b_b": maps_agree(composite(S(sigma_a_mu(a, mu)), S(sigma_a_mu(q.a, q.mu))),
                          S(sigma_a_mu(a * q.a, mu * q.mu)), window),
        "pi_t_commute": maps_agree(composite(S(pi(eps)), S(sigma_lam(lam))),
                                   composite(S(sigma_lam(lam)), S(pi(eps))), window),
        "pi_conjugates_b": maps_agree(composite(S(invert_sigma(pi(eps))), S(sigma_a_mu(a, mu)), S(pi(eps))),
                                      S(sigma_a_mu(a ** eps, mu)), window),
        "b_conjugates_t": maps_agree(composite(S(sigma_a_mu(a, mu)), S(sigma_lam(lam)),
                                               S(invert_sigma(sigma_a_mu(a, mu)))),
                                     S(sigma_lam(mu * lam)), window),
        "decomposition": maps_agree(S(p), composite(S(pi(eps)), S(sigma_lam(lam)), S(sigma_a_mu(a, mu))), window),
    }
    return checks


# -- homomorphism certification ---------------------------------------------------------

@dataclass
class AutomorphismReport:
    algebra: AlgebraKind
    window: int
    checked: int
    skipped: int
    violations: list[tuple[BasisSymbol, BasisSymbol, Element]]
    # W~ / W(2,2) only: admissible central lifts
    lift_exists: bool | None = None
    lift_freedom: int | None = None
    central_images: dict[BasisSymbol, Element] | None = None
    central_invertible: bool | None = None

    @property
    def ok(self) -> bool:
        if self.algebra is AlgebraKind.W:
            return not self.violations
        return bool(self.lift_exists and self.central_invertible)


def verify_automorphism(f: AutomorphismNF | Callable, algebra: AlgebraKind = AlgebraKind.W,
                        window: int = 6) -> AutomorphismReport:
    """Check f([x, y]) = [f(x), f(y)] on basis pairs whose bracket stays in the window.

    On W~ and W(2,2) the map is lifted: each window symbol s goes to f(s) plus an
    unknown central correction, and each central symbol to an unknown central
    element.  The report gives the dimension of the affine space of admissible
    lifts and one lift's images of the central symbols.
    """
    algebra = AlgebraKind.parse(algebra)
    if window < 1:
        raise WittlabError("window must be positive")
    fmap = f if callable(f) else (lambda x: apply_nf(f, x))
    syms = w_symbols(window)
    images = {s: fmap(s) for s in syms}
    if algebra is AlgebraKind.W:
        violations, checked, skipped = [], 0, 0
        for s, t in itertools.combinations(syms, 2):
            b = bracket_basis(s, t, algebra)
            if not in_window(b, window):
                skipped += 1
                continue
            checked += 1
            lhs = _apply_linear(b, images.__getitem__)
            rhs = bracket(images[s], images[t])
            if lhs != rhs:
                violations.append((s, t, lhs - rhs))
        return AutomorphismReport(algebra, window, checked, skipped, violations)
    return _verify_lift(images, algebra, window)


def _verify_lift(images: dict[BasisSymbol, Element], algebra: AlgebraKind, window: int) -> AutomorphismReport:
    central = list(algebra.central_symbols)
    syms = list(images)
    # unknowns: correction c_{s,C} for each window symbol s, and image coefficients of each central symbol
    cols = [(s, c) for s in syms + central for c in central]
    col = {k: j for j, k in enumerate(cols)}
    rows, rhs = [], []
    checked = skipped = 0
    for s, t in itertools.combinations(syms, 2):
        b = bracket_basis(s, t, algebra)
        if not in_window(b, window):
            skipped += 1
            continue
        checked += 1
        # lifted f([s, t]) - [f(s), f(t)] = 0, split into the W part and the central part
        lhs_w: dict[BasisSymbol, Fraction] = {}
        eq: dict[BasisSymbol, dict[int, Fraction]] = {c: {} for c in central}
        for u, k in b.items():
            if u.is_central:
                for c in central:
                    row = eq[c]
                    row[col[(u, c)]] = row.get(col[(u, c)], 0) + k
            else:
                for v, d in images[u].items():
                    lhs_w[v] = lhs_w.get(v, 0) + k * d
                for c in central:
                    row = eq[c]
                    row[col[(u, c)]] = row.get(col[(u, c)], 0) + k
        rhs_full = bracket(images[s], images[t], algebra)
        w_part = Element(lhs_w) - Element({v: d for v, d in rhs_full.items() if not v.is_central})
        if w_part:
            # the W part has no unknowns: an inconsistent row 0 = nonzero
            rows.append({})
            rhs.append(Fraction(1))
        for c in central:
            rows.append(eq[c])
            rhs.append(rhs_full[c])
    n = len(cols)
    r_m, r_a = linalg.consistency_ranks(rows, rhs, n)
    if r_m != r_a:
        return AutomorphismReport(algebra, window, checked, skipped, [], False, None, None, False)
    x = linalg.solve(rows, rhs, n)
    dim = n - r_m
    central_images = {c: Element({d: x[col[(c, d)]] for d in central}) for c in central}
    mat = [[x[col[(c, d)]] for c in central] for d in central]
    invertible = linalg.rank(mat, len(central)) == len(central)
    return AutomorphismReport(algebra, window, checked, skipped, [], True, dim, central_images, invertible)


def expected_central_images(p: SigmaParams) -> dict[BasisSymbol, Element]:
    """Central images of the lift of sigma to W~: C1 -> eps C1, C2 -> mu C2."""
    return {C1: Element({C1: p.epsilon}), C2: Element({C2: p.mu})}


# -- Zt and finitely supported sequences -----------------------------------------------

@dataclass(frozen=True)
class CInftySeq:
    entries: Mapping[int, Fraction] = field(default_factory=dict)

    def __post_init__(self):
        object.__setattr__(self, "entries",
                           dict(sorted((int(i), Fraction(v)) for i, v in self.entries.items() if v)))

    def __add__(self, other: CInftySeq) -> CInftySeq:
        out = dict(self.entries)
        for i, v in other.entries.items():
            out[i] = out.get(i, 0) + v
        return CInftySeq(out)

    def __neg__(self) -> CInftySeq:
        return CInftySeq({i: -v for i, v in self.entries.items()})

    def __hash__(self) -> int:
        return hash(tuple(self.entries.items()))


def encode_zt(word: InnerWord, lam) -> CInftySeq:
    """Negative indices in place, lam at slot 0, nonnegative indices shifted up by one."""
    entries = {0: Fraction(lam)}
    for m, k in word.factors.items():
        if m == 0:
            raise WittlabError("inner factor with index 0")
        entries[m if m < 0 else m + 1] = k
    return CInftySeq(entries)


def decode_zt(seq: CInftySeq) -> tuple[InnerWord, Fraction]:
    """Inverse of :func:`encode_zt`.

    Slot 1 would hold exp(k ad I_0), which equals sigma(1, -k, 1, 1); it is folded into lam.
    """
    factors = {}
    lam = Fraction(0)
    for i, v in seq.entries.items():
        if i < 0:
            factors[i] = v
        elif i == 0:
            lam += v
        elif i == 1:
            lam -= v
        else:
            factors[i - 1] = v
    return InnerWord(factors), lam


def zt_element(word: InnerWord, lam) -> AutomorphismNF:
    return AutomorphismNF(word, sigma_lam(lam))


# -- text format -------------------------------------------------------------------------

def format_nf(f: AutomorphismNF) -> str:
    return f"{f.inner} {f.sigma}"


_NF = re.compile(r"\s*inner\{([^{}]*)\}\s*sigma\(([^()]*)\)\s*$")


def parse_nf(text: str) -> AutomorphismNF:
    """Parse ``inner{3:2, -1:1/2} sigma(e=-1, l=7, a=10, mu=21)``."""
    m = _NF.match(text)
    if not m:
        raise ParseError("expected 'inner{...} sigma(...)'", text, 0)
    factors = {}
    for item in filter(None, (s.strip() for s in m.group(1).split(","))):
        idx, sep, val = item.partition(":")
        if not sep:
            raise ParseError(f"bad inner factor {item!r}", text, m.start(1))
        try:
            factors[int(idx)] = factors.get(int(idx), 0) + Fraction(val.strip())
        except ValueError:
            raise ParseError(f"bad inner factor {item!r}", text, m.start(1)) from None
    params = {}
    for item in (s.strip() for s in m.group(2).split(",")):
        key, sep, val = item.partition("=")
        if not sep or key.strip() not in ("e", "l", "a", "mu"):
            raise ParseError(f"bad sigma parameter {item!r}", text, m.start(2))
        params[key.strip()] = val.strip()
    try:
        sigma = SigmaParams(int(params.get("e", 1)), Fraction(params.get("l", 0)),
                            Fraction(params.get("a", 1)), Fraction(params.get("mu", 1)))
        return AutomorphismNF(InnerWord(factors), sigma)
    except (ValueError, WittlabError) as exc:
        raise ParseError(str(exc), text, m.start(2)) from None

"""Basis symbols, sparse elements and the bracket tables of W, W~ and W(2,2).

W has basis ``L[m], I[m]`` (m in Z) with

    [L_m, L_n] = (m - n) L_{m+n},   [L_m, I_n] = (m - n) I_{m+n},   [I_m, I_n] = 0.

W~ adds central symbols ``C1, C2`` fed by the Virasoro term (m^3 - m)/12 on
``[L_m, L_{-m}]`` and ``[L_m, I_{-m}]`` respectively.  W(2,2) identifies the two
central symbols; its single central element is stored under ``C1``.

Scalars are :class:`fractions.Fraction`, so every computation is exact.
"""

from __future__ import annotations

import enum
import re
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Iterable, Iterator, Mapping, Union

Rational = Fraction
Scalar = Union[int, Fraction]


class WittlabError(ValueError):
    """Base class for rejected inputs."""


class InvalidSymbolError(WittlabError):
    """A basis symbol is not valid for the ambient algebra."""


class OutOfWindowError(WittlabError):
    """A computation needed a basis symbol outside the index window."""


class ParseError(WittlabError):
    def __init__(self, message: str, text: str, position: int):
        super().__init__(f"{message} at position {position}: {text!r}")
        self.text = text
        self.position = position


class AlgebraKind(enum.Enum):
    W = "w"
    WTILDE = "wtilde"
    W22 = "w22"

    @classmethod
    def parse(cls, name: str | AlgebraKind) -> AlgebraKind:
        if isinstance(name, AlgebraKind):
            return name
        try:
            return cls(name.lower())
        except ValueError:
            raise WittlabError(f"unknown algebra {name!r}; expected w, wtilde or w22") from None

    @property
    def central_symbols(self) -> tuple[BasisSymbol, ...]:
        if self is AlgebraKind.W:
            return ()
        if self is AlgebraKind.W22:
            return (C1,)
        return (C1, C2)


# kind rank in the fixed total order: C1 < C2 < all L (by index) < all I (by index)
_KIND_RANK = {"C1": 0, "C2": 1, "L": 2, "I": 3}


class BasisSymbol:
    """One of L[m], I[m], C1, C2.  Immutable and hashable."""

    __slots__ = ("kind", "index", "_key", "_hash")

    def __init__(self, kind: str, index: int = 0):
        if kind not in _KIND_RANK:
            raise InvalidSymbolError(f"unknown basis kind {kind!r}")
        if kind in ("C1", "C2") and index != 0:
            raise InvalidSymbolError(f"{kind} carries no index")
        object.__setattr__(self, "kind", kind)
        object.__setattr__(self, "index", int(index))
        object.__setattr__(self, "_key", (_KIND_RANK[kind], int(index)))
        object.__setattr__(self, "_hash", hash(self._key))

    def __setattr__(self, name, value):
        raise AttributeError("BasisSymbol is immutable")

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, BasisSymbol):
            return NotImplemented
        return self._key == other._key

    def __hash__(self) -> int:
        return self._hash

    def __reduce__(self):
        return (BasisSymbol, (self.kind, self.index))

    @property
    def is_central(self) -> bool:
        return self.kind in ("C1", "C2")

    @property
    def degree(self) -> int:
        return self.index

    def sort_key(self) -> tuple[int, int]:
        return self._key

    def __lt__(self, other: BasisSymbol) -> bool:
        return self.sort_key() < other.sort_key()

    def __le__(self, other: BasisSymbol) -> bool:
        return self.sort_key() <= other.sort_key()

    def __gt__(self, other: BasisSymbol) -> bool:
        return self.sort_key() > other.sort_key()

    def __ge__(self, other: BasisSymbol) -> bool:
        return self.sort_key() >= other.sort_key()

    def text(self, algebra: AlgebraKind | None = None) -> str:
        if self.is_central:
            if algebra is AlgebraKind.W22 and self.kind == "C1":
                return "C"
            return self.kind
        return f"{self.kind}[{self.index}]"

    def __str__(self) -> str:
        return self.text()

    def __repr__(self) -> str:
        return self.text()


C1 = BasisSymbol("C1")
C2 = BasisSymbol("C2")


def L(m: int) -> BasisSymbol:
    return BasisSymbol("L", m)


def I(m: int) -> BasisSymbol:  # noqa: E743
    return BasisSymbol("I", m)


def check_symbol(s: BasisSymbol, algebra: AlgebraKind) -> None:
    if s.is_central and s not in algebra.central_symbols:
        raise InvalidSymbolError(f"{s} is not a basis symbol of {algebra.name}")


class Element(Mapping[BasisSymbol, Fraction]):
    """Finite linear combination of basis symbols with rational coefficients.

    Immutable; zero coefficients are never stored.
    """

    __slots__ = ("_terms", "_hash")

    def __init__(self, terms: Mapping[BasisSymbol, Scalar] | Iterable[tuple[BasisSymbol, Scalar]] = ()):
        acc: dict[BasisSymbol, Fraction] = {}
        items = terms.items() if isinstance(terms, Mapping) else terms
        for s, c in items:
            if not isinstance(s, BasisSymbol):
                raise TypeError(f"expected BasisSymbol, got {type(s).__name__}")
            if type(c) is not Fraction:
                c = Fraction(c)
            acc[s] = acc[s] + c if s in acc else c
        self._terms = {s: c for s, c in acc.items() if c != 0}
        self._hash = None

    @classmethod
    def basis(cls, s: BasisSymbol, coeff: Scalar = 1) -> Element:
        return cls({s: coeff})

    # Mapping protocol
    def __getitem__(self, s: BasisSymbol) -> Fraction:
        return self._terms.get(s, Fraction(0))

    def __iter__(self) -> Iterator[BasisSymbol]:
        return iter(self._terms)

    def items(self):
        return self._terms.items()

    def keys(self):
        return self._terms.keys()

    def values(self):
        return self._terms.values()

    def __len__(self) -> int:
        return len(self._terms)

    def __contains__(self, s: object) -> bool:
        return s in self._terms

    def __eq__(self, other: object) -> bool:
        if isinstance(other, Element):
            return self._terms == other._terms
        if other == 0:
            return not self._terms
        return NotImplemented

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash(frozenset(self._terms.items()))
        return self._hash

    def __bool__(self) -> bool:
        return bool(self._terms)

    def __add__(self, other: Element) -> Element:
        if isinstance(other, int) and other == 0:
            return self
        if not isinstance(other, Element):
            return NotImplemented
        out = dict(self._terms)
        for s, c in other._terms.items():
            out[s] = out.get(s, 0) + c
        return Element(out)

    __radd__ = __add__

    def __neg__(self) -> Element:
        return Element({s: -c for s, c in self._terms.items()})

    def __sub__(self, other: Element) -> Element:
        return self + (-other)

    def __mul__(self, k: Scalar) -> Element:
        if not isinstance(k, (int, Fraction)):
            return NotImplemented
        return Element({s: c * k for s, c in self._terms.items()})

    __rmul__ = __mul__

    def symbols(self) -> list[BasisSymbol]:
        return sorted(self._terms)

    def max_abs_index(self) -> int:
        return max((abs(s.index) for s in self._terms), default=0)

    def __repr__(self) -> str:
        return f"Element({format_element(self)!r})"

    def __str__(self) -> str:
        return format_element(self)


ZERO = Element()


def as_element(x: Element | BasisSymbol) -> Element:
    return x if isinstance(x, Element) else Element.basis(x)


def in_window(x: Element | BasisSymbol, n: int) -> bool:
    """True when every symbol of ``x`` has index of absolute value at most ``n``."""
    return as_element(x).max_abs_index() <= n


def window_symbols(n: int, algebra: AlgebraKind = AlgebraKind.W) -> list[BasisSymbol]:
    """All basis symbols with |index| <= n, in the fixed total order."""
    return list(algebra.central_symbols) + [L(m) for m in range(-n, n + 1)] + [I(m) for m in range(-n, n + 1)]


def virasoro(m: int) -> Fraction:
    return Fraction(m ** 3 - m, 12)


# -- bracket -----------------------------------------------------------------

def bracket_basis(s: BasisSymbol, t: BasisSymbol, algebra: AlgebraKind) -> Element:
    """Bracket of two basis symbols, read off the structure-constant table."""
    check_symbol(s, algebra)
    check_symbol(t, algebra)
    if s.is_central or t.is_central:
        return ZERO
    m, n = s.index, t.index
    if s.kind == "I" and t.kind == "I":
        return ZERO
    if s.kind == "I":
        return -bracket_basis(t, s, algebra)
    # s is L
    target = L(m + n) if t.kind == "L" else I(m + n)
    terms = {target: m - n}
    if m + n == 0 and algebra is not AlgebraKind.W:
        if algebra is AlgebraKind.W22:
            central = C1
        else:
            central = C1 if t.kind == "L" else C2
        terms[central] = virasoro(m)
    return Element(terms)


BasisBracket = Callable[[BasisSymbol, BasisSymbol], Element]


def extend_bilinear(x: Element, y: Element, table: BasisBracket) -> Element:
    out: dict[BasisSymbol, Fraction] = {}
    for s, a in x.items():
        for t, b in y.items():
            for u, c in table(s, t).items():
                out[u] = out.get(u, 0) + a * b * c
    return Element(out)


def bracket(x: Element | BasisSymbol, y: Element | BasisSymbol, algebra: AlgebraKind = AlgebraKind.W) -> Element:
    """Lie bracket in ``algebra``, extended bilinearly from the basis table."""
    x, y = as_element(x), as_element(y)
    return extend_bilinear(x, y, lambda s, t: bracket_basis(s, t, algebra))


# -- grading -----------------------------------------------------------------

class _ZeroDegree:
    """Sentinel degree of the zero element (homogeneous of every degree)."""

    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self) -> str:
        return "ZERO_DEGREE"


ZERO_DEGREE = _ZeroDegree()


def degree(x: Element | BasisSymbol) -> int | _ZeroDegree | None:
    """Degree of a homogeneous element.

    Returns ``ZERO_DEGREE`` for the zero element and ``None`` when ``x`` mixes degrees.
    """
    x = as_element(x)
    degrees = {s.degree for s in x}
    if not degrees:
        return ZERO_DEGREE
    if len(degrees) > 1:
        return None
    return degrees.pop()


def triangular_split(x: Element) -> tuple[Element, Element, Element]:
    """(negative, zero, positive)-degree parts of ``x``."""
    parts: tuple[dict, dict, dict] = ({}, {}, {})
    for s, c in x.items():
        sign = (s.degree > 0) - (s.degree < 0)
        parts[sign + 1][s] = c
    return Element(parts[0]), Element(parts[1]), Element(parts[2])


def homogeneous_part(x: Element, d: int) -> Element:
    return Element({s: c for s, c in x.items() if s.degree == d})


# -- projections -------------------------------------------------------------

_PROJECTIONS = {
    (AlgebraKind.WTILDE, AlgebraKind.W22),
    (AlgebraKind.WTILDE, AlgebraKind.W),
    (AlgebraKind.W22, AlgebraKind.W),
}


def project(x: Element, source: AlgebraKind, target: AlgebraKind) -> Element:
    """Covering / quotient maps W~ -> W(2,2) -> W (identity on L_m, I_m)."""
    if (source, target) not in _PROJECTIONS:
        raise WittlabError(f"no projection from {source.name} to {target.name}")
    out: dict[BasisSymbol, Fraction] = {}
    for s, c in x.items():
        check_symbol(s, source)
        if s.is_central:
            if target is AlgebraKind.W:
                continue
            s = C1
        out[s] = out.get(s, 0) + c
    return Element(out)


# -- Jacobi ------------------------------------------------------------------

@dataclass
class JacobiReport:
    algebra: AlgebraKind
    window: int
    triples_checked: int
    violations: list[tuple[tuple[BasisSymbol, BasisSymbol, BasisSymbol], Element]]

    @property
    def ok(self) -> bool:
        return not self.violations

    @property
    def first_violation(self):
        return self.violations[0] if self.violations else None


def jacobi_sum(x: Element, y: Element, z: Element, br: Callable[[Element, Element], Element]) -> Element:
    return br(br(x, y), z) + br(br(y, z), x) + br(br(z, x), y)


def check_jacobi(algebra: AlgebraKind, window: int, table: BasisBracket | None = None) -> JacobiReport:
    """Evaluate the Jacobi sum on every triple of distinct basis symbols in the window.

    ``table`` overrides the built-in basis bracket, e.g. to test a corrupted table.
    Triples with a repeated symbol vanish by antisymmetry and are skipped.
    """
    if window < 1:
        raise WittlabError("window bound must be positive")
    if table is None:
        def table(s, t):
            return bracket_basis(s, t, algebra)
    cache: dict[tuple[BasisSymbol, BasisSymbol], Element] = {}

    def basis_br(s, t):
        key = (s, t)
        if key not in cache:
            cache[key] = table(s, t)
        return cache[key]

    def accumulate(acc, pair, u):
        for v, c in basis_br(*pair).items():
            for w, d in basis_br(v, u).items():
                acc[w] = acc.get(w, 0) + c * d

    syms = window_symbols(window, algebra)
    violations = []
    checked = 0
    for i, s in enumerate(syms):
        for j in range(i + 1, len(syms)):
            t = syms[j]
            for u in syms[j + 1:]:
                checked += 1
                acc: dict[BasisSymbol, Fraction] = {}
                accumulate(acc, (s, t), u)
                accumulate(acc, (t, u), s)
                accumulate(acc, (u, s), t)
                if any(acc.values()):
                    violations.append(((s, t, u), Element(acc)))
    return JacobiReport(algebra, window, checked, violations)


# -- text format ---------------------------------------------------------------

def format_scalar(c: Fraction) -> str:
    return str(c.numerator) if c.denominator == 1 else f"{c.numerator}/{c.denominator}"


def _print_key(s: BasisSymbol) -> tuple[int, int]:
    # printing order: L by index, then I by index, then the central symbols
    return ((_KIND_RANK[s.kind] + 2) % 4, s.index)


def format_element(x: Element, algebra: AlgebraKind | None = None) -> str:
    if not x:
        return "0"
    parts = []
    for s in sorted(x.keys(), key=_print_key):
        c = x[s]
        mag = abs(c)
        body = s.text(algebra) if mag == 1 else f"{format_scalar(mag)}*{s.text(algebra)}"
        if not parts:
            parts.append(body if c > 0 else f"-{body}")
        else:
            parts.append(f"+ {body}" if c > 0 else f"- {body}")
    return " ".join(parts)


_TOKEN = re.compile(r"\s*(?:(?P<op>[+-])|(?P<num>\d+(?:/\d+)?)|(?P<star>\*)|(?P<sym>[LI]\[\s*[+-]?\d+\s*\]|C[12]?))")


def parse_element(text: str, algebra: AlgebraKind | None = None) -> Element:
    """Parse ``2*L[3] - 1/2*I[-1] + C1``.  ``C`` is accepted only for W(2,2)."""
    if text.strip() == "0":
        return ZERO
    terms: list[tuple[BasisSymbol, Fraction]] = []
    pos = 0
    sign: int | None = None
    coeff: Fraction | None = None
    expect_term = True
    while text[pos:].strip():
        m = _TOKEN.match(text, pos)
        if not m:
            raise ParseError("unexpected character", text, pos + len(text[pos:]) - len(text[pos:].lstrip()))
        start = m.start(m.lastgroup)
        if m.group("op"):
            if sign is not None or coeff is not None or (expect_term and terms):
                raise ParseError("unexpected sign", text, start)
            sign = 1 if m.group("op") == "+" else -1
            expect_term = True
        elif m.group("num"):
            if not expect_term or coeff is not None:
                raise ParseError("unexpected number", text, start)
            coeff = Fraction(m.group("num"))
            star = _TOKEN.match(text, m.end())
            if not star or not star.group("star"):
                raise ParseError("expected '*' after coefficient", text, m.end())
            pos = star.end()
            continue
        elif m.group("star"):
            raise ParseError("unexpected '*'", text, start)
        else:
            if not expect_term:
                raise ParseError("missing operator between terms", text, start)
            sym = _parse_symbol(m.group("sym"), algebra, text, start)
            c = coeff if coeff is not None else Fraction(1)
            terms.append((sym, -c if sign == -1 else c))
            sign, coeff, expect_term = None, None, False
        pos = m.end()
    if expect_term:
        raise ParseError("expected a term", text, len(text))
    return Element(terms)


def _parse_symbol(tok: str, algebra: AlgebraKind | None, text: str, pos: int) -> BasisSymbol:
    if tok == "C":
        if algebra is not AlgebraKind.W22:
            raise ParseError("'C' is only valid in W22", text, pos)
        return C1
    if tok in ("C1", "C2"):
        s = BasisSymbol(tok)
    else:
        s = BasisSymbol(tok[0], int(tok[2:-1]))
    if algebra is not None:
        try:
            check_symbol(s, algebra)
        except InvalidSymbolError as exc:
            raise ParseError(str(exc), text, pos) from None
    return s


def parse_symbol(tok: str, algebra: AlgebraKind | None = None) -> BasisSymbol:
    x = parse_element(tok, algebra)
    if len(x) != 1 or next(iter(x.values())) != 1:
        raise ParseError("expected a single basis symbol", tok, 0)
    return next(iter(x))

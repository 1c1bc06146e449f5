"""Verification suites behind ``wittlab verify``.

Each suite returns a list of :class:`Result` rows.  Expected values name their
source: a structure theorem about W, an independent formula, or a solver oracle.
"""

from __future__ import annotations

import random
from fractions import Fraction
from typing import Callable, Sequence

from . import automorphisms as aut
from . import cohomology as coh
from . import derivations as der
from .algebra import AlgebraKind, WittlabError, check_jacobi
from .report import Result

SUITE_MIN_WINDOW = {"jacobi": 1, "cocycles": coh.MIN_WINDOW, "derivations": 4, "automorphisms": 1}
SUITE_MIN_WINDOW["all"] = max(SUITE_MIN_WINDOW.values())

RANDOM_CASES = 100


def jacobi_suite(window: int, algebras: Sequence[AlgebraKind]) -> list[Result]:
    out = []
    for alg in algebras:
        rep = check_jacobi(alg, window)
        out.append(Result.check(f"jacobi/{alg.value}", 0, len(rep.violations), "built-in bracket table",
                                ok=rep.ok))
    return out


def cocycle_suite(window: int) -> list[Result]:
    out = []
    for n in range(coh.MIN_WINDOW, window + 1):
        rep = coh.compute_h2_window(n, 0)
        out.append(Result.check(f"h2/degree0/N={n}", 2, rep.h2_dim, "H2(W) spanned by alpha and beta"))
        for i, psi in enumerate(rep.basis):
            dec = coh.decompose_cocycle(psi)
            out.append(Result.check(f"h2/degree0/N={n}/rep{i}/residual", "zero",
                                    "zero" if dec.in_span else "nonzero",
                                    "alpha, beta span H2 modulo coboundaries"))
    for d in (1, -1, 2, -2, 3, -3):
        name = f"h2/degree{d}/N={window}"
        try:
            rep = coh.compute_h2_window(window, d)
        except WittlabError as exc:
            out.append(Result.skipped(name, str(exc)))
            continue
        out.append(Result.check(name, 0, rep.h2_dim, "H2(W) is concentrated in degree 0"))
    for n in range(coh.MIN_WINDOW, window + 1):
        out.append(Result.check(f"bgv/N={n}", 0, len(coh.compute_bgv_window(n).basis),
                                "B^L(I) = 0"))
    for label, make in (("alpha", coh.make_alpha), ("beta", coh.make_beta)):
        psi = make(window)
        out.append(Result.check(f"{label}/cocycle_defect/N={window}", 0, len(coh.cocycle_violations(psi)),
                                "cocycle identity"))
        cert = coh.coboundary_certificate(psi)
        out.append(Result.check(f"{label}/not_coboundary/N={window}", "infeasible",
                                "feasible" if cert.is_coboundary else "infeasible",
                                f"rank test {cert.rank_matrix} vs {cert.rank_augmented}"))
    return out


def derivation_suite(window: int) -> list[Result]:
    out = []
    W = AlgebraKind.W
    for n in range(SUITE_MIN_WINDOW["derivations"], window + 1):
        rep = der.compute_der_space(W, der.Target.ALGEBRA, 0, n)
        out.append(Result.check(f"der/degree0/N={n}", 1, rep.outer_dim, "H1(W,W) = C D"))
        c = der.reduces_to(rep.outer_basis[0], der.make_outer_derivation(n)) if rep.outer_basis else None
        out.append(Result.check(f"der/degree0/N={n}/reduces_to_D", "true", c is not None and c != 0,
                                "outer class represented by D"))
        for d in (1, -1, 2, -2):
            rep = der.compute_der_space(W, der.Target.ALGEBRA, d, n)
            out.append(Result.check(f"der/degree{d}/N={n}", 0, rep.outer_dim,
                                    "nonzero degrees are inner"))
        rep = der.compute_der_space(W, der.Target.I, 0, n)
        out.append(Result.check(f"der_I/degree0/N={n}", 1, rep.outer_dim, "H1(W,I) = C D1"))
        c = der.reduces_to(rep.outer_basis[0], der.make_d1(n), der.Target.I) if rep.outer_basis else None
        out.append(Result.check(f"der_I/degree0/N={n}/reduces_to_D1", "true", c is not None and c != 0,
                                "outer class represented by D1"))
    rep = der.compute_der_space(AlgebraKind.WTILDE, der.Target.ALGEBRA, 0, window)
    out.append(Result.check(f"der/wtilde/degree0/N={window}", 1, rep.outer_dim,
                            "H1(W~,W~) is one-dimensional"))
    for n in range(der.MIN_WINDOW, window + 1):
        out.append(Result.check(f"hom_I_L/N={n}", 0, len(der.compute_hom_I_to_L(n).basis),
                                "Hom(I, L) = 0 as modules"))
    for m in (1, -1, 2, -2, 3, -3):
        rep = der.verify_weight_reduction(m)
        out.append(Result.check(f"degree_reduction/m={m}", "true", rep.b_forced_zero and rep.inner_checks,
                                "I-coefficient forced to zero, remainder inner"))
    return out


def automorphism_suite(window: int, seed: int = 0) -> list[Result]:
    rng = random.Random(seed)
    out = []

    failures: dict[str, int] = {}
    for _ in range(RANDOM_CASES):
        for name, ok in aut.relation_checks(aut.random_sigma(rng), aut.random_sigma(rng), window).items():
            failures[name] = failures.get(name, 0) + (not ok)
    for name, bad in failures.items():
        out.append(Result.check(f"relations/{name}", 0, bad, f"map equality on {RANDOM_CASES} random tuples"))

    bad = 0
    for _ in range(RANDOM_CASES):
        p, q, r = aut.random_sigma(rng), aut.random_sigma(rng), aut.random_sigma(rng)
        bad += aut.compose_sigma(aut.compose_sigma(p, q), r) != aut.compose_sigma(p, aut.compose_sigma(q, r))
        bad += aut.compose_sigma(p, aut.invert_sigma(p)) != aut.IDENTITY_SIGMA
    out.append(Result.check("group_laws/sigma", 0, bad, "associativity and inverse formula"))

    bad = 0
    syms = aut.w_symbols(window)
    for _ in range(RANDOM_CASES):
        word = aut.random_word(rng, rng.randint(1, 6))
        nf = aut.word_to_nf(word)
        bad += any(aut.apply_nf(nf, s) != aut.apply_word(word, s) for s in syms)
    out.append(Result.check("normal_form/soundness", 0, bad, "sequential application of the word"))

    bad = 0
    for _ in range(RANDOM_CASES):
        w1, l1 = _random_zt(rng)
        w2, l2 = _random_zt(rng)
        bad += aut.decode_zt(aut.encode_zt(w1, l1)) != (w1, l1)
        prod = aut.compose_nf(aut.zt_element(w1, l1), aut.zt_element(w2, l2))
        bad += aut.encode_zt(prod.inner, prod.sigma.lam) != aut.encode_zt(w1, l1) + aut.encode_zt(w2, l2)
    out.append(Result.check("zt_encoding", 0, bad, "round trip and additivity"))

    bad = 0
    for _ in range(5):
        nf = aut.word_to_nf(aut.random_word(rng, 4))
        bad += not aut.verify_automorphism(nf, AlgebraKind.W, window).ok
    out.append(Result.check("homomorphism/W", 0, bad, "bracket preserved on the window"))

    lift_window = min(window, 6)
    bad = 0
    for _ in range(3):
        nf = aut.word_to_nf(aut.random_word(rng, 4))
        rep = aut.verify_automorphism(nf, AlgebraKind.WTILDE, lift_window)
        bad += not (rep.ok and rep.central_images == aut.expected_central_images(nf.sigma))
        rep22 = aut.verify_automorphism(nf, AlgebraKind.W22, lift_window)
        bad += rep22.lift_exists != (nf.sigma.epsilon == nf.sigma.mu)
    out.append(Result.check("lift/central_images", 0, bad, "C1 -> eps C1, C2 -> mu C2; W(2,2) needs eps = mu"))
    return out


def _random_zt(rng: random.Random):
    factors = {}
    for _ in range(rng.randint(0, 4)):
        m = rng.choice([i for i in range(-5, 6) if i])
        factors[m] = Fraction(rng.randint(-9, 9), rng.randint(1, 4))
    return aut.InnerWord(factors), Fraction(rng.randint(-9, 9), rng.randint(1, 4))


SUITES: dict[str, Callable[..., list[Result]]] = {
    "jacobi": jacobi_suite,
    "cocycles": cocycle_suite,
    "derivations": derivation_suite,
    "automorphisms": automorphism_suite,
}

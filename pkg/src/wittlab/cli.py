"""Command line front end: ``wittlab {verify,h2,der,aut,bracket} ...``.

Exit codes: 0 all results pass, 1 a verification failed, 2 usage error.
"""

from __future__ import annotations

import argparse
import os
import sys
import time

from . import automorphisms as aut
from . import cohomology as coh
from . import derivations as der
from .algebra import AlgebraKind, ParseError, WittlabError, bracket, format_element, parse_element
from .report import ReportDocument, Result
from .suites import SUITE_MIN_WINDOW, SUITES

DEFAULT_WINDOW = 6
EXIT_USAGE = 2


class UsageError(Exception):
    pass


def default_window() -> int:
    raw = os.environ.get("WITTLAB_WINDOW")
    if raw is None:
        return DEFAULT_WINDOW
    try:
        return int(raw)
    except ValueError:
        raise UsageError(f"WITTLAB_WINDOW must be an integer, got {raw!r}") from None


def _parse_automorphism(text: str) -> aut.AutomorphismNF:
    """Either the normal-form text or a word of generator tokens."""
    stripped = text.strip()
    if stripped.startswith(("inner{", "sigma(")):
        if stripped.startswith("sigma("):
            stripped = "inner{} " + stripped
        return aut.parse_nf(stripped)
    return aut.word_to_nf(aut.parse_word(text))


# -- commands ------------------------------------------------------------------------

def cmd_verify(args) -> ReportDocument:
    need = SUITE_MIN_WINDOW[args.target]
    if args.window < need:
        raise UsageError(f"verify {args.target} needs --window >= {need}, got {args.window}")
    algebra = args.algebra
    results: list[Result] = []
    targets = list(SUITES) if args.target == "all" else [args.target]
    for name in targets:
        if name == "jacobi":
            kinds = [algebra] if algebra else list(AlgebraKind)
            results += SUITES[name](args.window, kinds)
        elif name == "automorphisms":
            results += SUITES[name](args.window, args.seed)
        else:
            results += SUITES[name](args.window)
    return ReportDocument(f"verify {args.target}", (algebra or AlgebraKind.W).value, args.window, results)


def cmd_h2(args) -> ReportDocument:
    algebra = args.algebra or AlgebraKind.W
    rep = coh.compute_h2_window(args.window, args.degree, algebra)
    results = [
        Result.check("cocycle_dim", rep.cocycle_dim, rep.cocycle_dim, "solver"),
        Result.check("coboundary_dim", rep.coboundary_dim, rep.coboundary_dim, "solver"),
        Result.check("h2_dim", rep.h2_dim, rep.h2_dim, "solver"),
    ]
    for i, psi in enumerate(rep.basis):
        results.append(Result.check(f"representative{i}", "cocycle", coh.format_form(psi), "solver", ok=True))
    return ReportDocument("h2", algebra.value, args.window, results)


def cmd_der(args) -> ReportDocument:
    algebra = args.algebra or AlgebraKind.W
    target = der.Target(args.target)
    rep = der.compute_der_space(algebra, target, args.degree, args.window)
    results = [
        Result.check("derivation_dim", rep.derivation_dim, rep.derivation_dim, "solver"),
        Result.check("inner_dim", rep.inner_dim, rep.inner_dim, "solver"),
        Result.check("outer_dim", rep.outer_dim, rep.outer_dim, "solver"),
    ]
    for i, D in enumerate(rep.outer_basis):
        results.append(Result.check(f"outer_basis{i}", "derivation", der.format_map(D), "solver", ok=True))
    return ReportDocument("der", algebra.value, args.window, results)


def cmd_aut(args) -> ReportDocument:
    algebra = args.algebra or AlgebraKind.W
    op = args.aut_command
    if op == "apply":
        f = _parse_automorphism(args.automorphism)
        x = parse_element(args.element, AlgebraKind.W)
        computed = format_element(aut.apply_nf(f, x))
    elif op == "compose":
        f = aut.IDENTITY
        for text in args.automorphisms:
            f = aut.compose_nf(f, _parse_automorphism(text))
        computed = aut.format_nf(f)
    elif op == "invert":
        computed = aut.format_nf(aut.invert_nf(_parse_automorphism(args.automorphism)))
    elif op == "normal-form":
        computed = aut.format_nf(_parse_automorphism(args.automorphism))
    else:
        f = _parse_automorphism(args.automorphism)
        rep = aut.verify_automorphism(f, algebra, args.window)
        results = [Result.check("homomorphism", "true", rep.ok, f"bracket check on {rep.checked} pairs")]
        if rep.central_images is not None:
            for c, img in rep.central_images.items():
                results.append(Result.check(f"central_image/{c.text(algebra)}", "solved",
                                            format_element(img, algebra), "lift solve", ok=True))
            results.append(Result.check("lift_freedom", rep.lift_freedom, rep.lift_freedom, "lift solve"))
        return ReportDocument(f"aut {op}", algebra.value, args.window, results)
    return ReportDocument(f"aut {op}", AlgebraKind.W.value, args.window,
                          [Result.check(op, "computed", computed, "group law", ok=True)])


def cmd_bracket(args) -> ReportDocument:
    algebra = args.algebra or AlgebraKind.W
    x = parse_element(args.x, algebra)
    y = parse_element(args.y, algebra)
    computed = format_element(bracket(x, y, algebra), algebra)
    return ReportDocument("bracket", algebra.value, args.window,
                          [Result.check("bracket", "computed", computed, "bracket table", ok=True)])


# -- argument parsing ----------------------------------------------------------------

class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _algebra(text: str) -> AlgebraKind:
    try:
        return AlgebraKind.parse(text)
    except WittlabError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("--algebra", type=_algebra, default=None, help="w, wtilde or w22")
    common.add_argument("--window", type=int, default=None, help="index bound N (default 6 or $WITTLAB_WINDOW)")
    common.add_argument("--json", action="store_true", help="emit a JSON report")
    common.add_argument("--seed", type=int, default=0, help="seed for randomized sweeps")

    parser = _Parser(prog="wittlab", description="Exact computations in W, W~ and W(2,2).")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("verify", parents=[common], help="run a verification suite")
    p.add_argument("target", choices=[*SUITES, "all"])
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("h2", parents=[common], help="second cohomology in one degree")
    p.add_argument("--degree", type=int, default=0)
    p.set_defaults(func=cmd_h2)

    p = sub.add_parser("der", parents=[common], help="derivations in one degree")
    p.add_argument("--degree", type=int, default=0)
    p.add_argument("--target", choices=[t.value for t in der.Target], default=der.Target.ALGEBRA.value)
    p.set_defaults(func=cmd_der)

    p = sub.add_parser("aut", help="automorphism group operations")
    asub = p.add_subparsers(dest="aut_command", required=True, parser_class=_Parser)
    q = asub.add_parser("apply", parents=[common])
    q.add_argument("automorphism")
    q.add_argument("element")
    q = asub.add_parser("compose", parents=[common])
    q.add_argument("automorphisms", nargs="+")
    for name in ("invert", "normal-form", "verify"):
        q = asub.add_parser(name, parents=[common])
        q.add_argument("automorphism")
    p.set_defaults(func=cmd_aut)

    p = sub.add_parser("bracket", parents=[common], help="evaluate [x, y]")
    p.add_argument("x")
    p.add_argument("y")
    p.set_defaults(func=cmd_bracket)
    return parser


def _print_plain(report: ReportDocument, command: str) -> None:
    if command in ("bracket", "aut") and not report.command.endswith("verify"):
        print(report.results[0].computed)
        return
    if command in ("h2", "der"):
        for r in report.results:
            if r.name.startswith(("representative", "outer_basis")):
                print(f"# {r.name}")
                print(r.computed)
            else:
                print(f"{r.name} {r.computed}")
        return
    print(report.to_text())


def main(argv: list[str] | None = None) -> int:
    start = time.perf_counter()
    try:
        args = build_parser().parse_args(argv)
        if args.window is None:
            args.window = default_window()
        report = args.func(args)
    except ParseError as exc:
        print(f"wittlab: parse error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (UsageError, WittlabError) as exc:
        print(f"wittlab: {exc}", file=sys.stderr)
        return EXIT_USAGE
    report.elapsed_ms = int((time.perf_counter() - start) * 1000)
    if args.json:
        print(report.to_json())
    else:
        _print_plain(report, args.command)
    return report.exit_code


if __name__ == "__main__":
    sys.exit(main())

"""Command-line front end: ``locmat <subcommand> [flags]``.

Exit status: 0 success, 1 verification or computation failure, 2 usage error.
"""

from __future__ import annotations

import argparse
import random
import sys

from . import derivations as D
from . import endomorphisms as EN
from . import minf as MF
from .errors import IndexOutOfRange, LocmatError, ParseError
from .field import FieldSpec
from .linalg import matmul
from .parser import (
    SessionConfig,
    parse_and_eval,
    parse_derivation_file,
    parse_image_file,
    parse_pattern,
)
from .sampling import random_scalar, random_site_unit
from .tensor import Element, SiteShape, commutator, conjugate, format_monomial, format_scalar

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _sites(text: str) -> list[int]:
    try:
        out = sorted({int(s) for s in text.replace("{", "").replace("}", "").split(",") if s.strip()})
    except ValueError:
        raise UsageError(f"bad site list {text!r}") from None
    if not out or out[0] < 1:
        raise UsageError(f"site list {text!r} must be nonempty and positive")
    return out


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--field", default="q", help="q or gf:p")
    common.add_argument("--shape", default="default=2", help="default=<n>[,i=n_i...]")
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--expr", action="append", default=[], help="element or pattern expression")
    common.add_argument("--file", action="append", default=[], help="input file ('-' for stdin)")
    common.add_argument("--n", type=int, default=None)
    common.add_argument("--k", type=int, default=None)

    p = _Parser(prog="locmat", description="Exact algebra on tensor products of matrix algebras.")
    sub = p.add_subparsers(dest="command", parser_class=_Parser)
    sub.required = True

    def add(name, help_text):
        return sub.add_parser(name, parents=[common], help=help_text, description=help_text)

    add("eval", "print the canonical form of each --expr")
    add("apply-derivation", "apply the derivation in --file to each --expr")
    add("commutator", "bracket two --expr elements or two --file derivations")
    add("inner-solve", "b with d = ad(b) on A_S").add_argument("--sites", help="site set S (default 1..n)")
    add("peel", "peel generator images (image lines) into inner pieces")
    add("expand-basis", "coefficients of a derivation against ad of canonical monomials")
    sn = add("skolem-noether", "conjugator for an endomorphism given by image lines")
    sn.add_argument("--sites", help="source sites S (default: all image sites)")
    sn.add_argument("--ambient", help="ambient sites T (default: 1..max support)")
    sn.add_argument("--method", choices=("sweep", "random"), default="sweep")
    add("factorize", "factor an endomorphism into conjugations")
    add("integrability", "dimension profile of an element under cumulative conjugations").add_argument(
        "--suite", choices=("example1", "example2"), default=None)
    add("minf-mul", "product of pattern matrices")
    add("minf-commutator", "commutator of two pattern matrices")
    add("verify", "run a built-in verification suite").add_argument(
        "--suite", required=True, choices=("example1", "example2", "ladder", "minf-ladder", "af-action"))
    return p


def _config(args) -> SessionConfig:
    try:
        field = FieldSpec.parse(args.field)
        shape = SiteShape.parse(args.shape)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    return SessionConfig(field, shape, args.seed)


def _read(path: str) -> str:
    if path == "-":
        return sys.stdin.read()
    try:
        with open(path, encoding="utf-8") as fh:
            return fh.read()
    except OSError as exc:
        raise UsageError(f"cannot read {path}: {exc.strerror}") from None


def _need(items, count, what):
    if len(items) < count:
        raise UsageError(f"expected at least {count} {what}")
    return items


def _elements(args, cfg, count=1):
    return [parse_and_eval(t, cfg) for t in _need(args.expr, count, "--expr")]


def _print_derivation(d, out):
    if isinstance(d, D.Inner):
        print(f"inner {d.a}", file=out)
        return
    d = d.normalized()
    if d.is_zero():
        print("0", file=out)
        return
    for S, a in d.finite:
        print(f"member {{{','.join(map(str, sorted(S)))}}} {a}", file=out)
    for fam in d.families:
        print(f"family {fam.template} start={fam.start}", file=out)


# subcommands


def cmd_eval(args, cfg, out):
    for x in _elements(args, cfg):
        print(x, file=out)
    return EXIT_OK


def cmd_apply(args, cfg, out):
    d = parse_derivation_file(_read(_need(args.file, 1, "--file")[0]), cfg)
    for x in _elements(args, cfg):
        print(d(x), file=out)
    return EXIT_OK


def cmd_commutator(args, cfg, out):
    if len(args.file) >= 2:
        d1, d2 = (parse_derivation_file(_read(f), cfg) for f in args.file[:2])
        c = D.derivation_commutator(d1, d2)
        _print_derivation(c, out)
        if args.n:
            ok = all(
                c(g) == d1(d2(g)) - d2(d1(g)) for _, g in D.generators(cfg.field, cfg.shape, range(1, args.n + 1))
            )
            print(f"coherent on A_[1..{args.n}]: {'yes' if ok else 'no'}", file=out)
            return EXIT_OK if ok else EXIT_FAIL
        return EXIT_OK
    x, y = _elements(args, cfg, 2)[:2]
    print(commutator(x, y), file=out)
    return EXIT_OK


def cmd_inner_solve(args, cfg, out):
    d = parse_derivation_file(_read(_need(args.file, 1, "--file")[0]), cfg)
    if args.sites:
        sites = _sites(args.sites)
    elif args.n:
        sites = list(range(1, args.n + 1))
    else:
        raise UsageError("give --sites or --n")
    print(D.inner_solve_local(d, sites), file=out)
    return EXIT_OK


def cmd_peel(args, cfg, out):
    images, N = parse_image_file(_read(_need(args.file, 1, "--file")[0]), cfg)
    N = args.n or N
    if N < 1:
        raise UsageError("no generator images given")
    pieces = D.peel_derivation(images, N, cfg.field, cfg.shape)
    if not pieces:
        print("0", file=out)
    for S, a in pieces:
        print(f"member {{{','.join(map(str, sorted(S)))}}} {a}", file=out)
    return EXIT_OK


def cmd_expand(args, cfg, out):
    d = parse_derivation_file(_read(_need(args.file, 1, "--file")[0]), cfg)
    exp = D.expand_basis(d)
    if args.n:
        coeffs = exp.truncated(args.n)
        for m in sorted(coeffs):
            print(f"{format_scalar(coeffs[m])} {format_monomial(m)}", file=out)
        print(f"nonzero: {len(coeffs)}", file=out)
        return EXIT_OK
    if exp.is_empty():
        print("empty", file=out)
    for m in sorted(exp.finite):
        print(f"{format_scalar(exp.finite[m])} {format_monomial(m)}", file=out)
    for coeffs, start in exp.families:
        body = ", ".join(f"{format_scalar(coeffs[m])} {format_monomial(m)}" for m in sorted(coeffs))
        print(f"shifted from start={start}: {body}", file=out)
    return EXIT_OK


def _endo(args, cfg) -> EN.UnitalEndo:
    images, N = parse_image_file(_read(_need(args.file, 1, "--file")[0]), cfg)
    if N < 1:
        raise UsageError("no generator images given")
    return EN.UnitalEndo(images, N, cfg.field, cfg.shape)


def cmd_skolem_noether(args, cfg, out):
    phi = _endo(args, cfg)
    S = _sites(args.sites) if args.sites else list(range(1, phi.N + 1))
    T = _sites(args.ambient) if args.ambient else list(range(1, phi.M + 1))
    a = EN.skolem_noether(phi, S, T, seed=cfg.seed, method=args.method)
    print(a, file=out)
    return EXIT_OK


def cmd_factorize(args, cfg, out):
    phi = _endo(args, cfg)
    seq = EN.factorize(phi, seed=cfg.seed)
    for k, a in enumerate(seq, start=1):
        print(f"a{k} = {a}", file=out)
    ok = EN.recompose(seq, phi.N) == phi
    print(f"recomposes: {'yes' if ok else 'no'}", file=out)
    return EXIT_OK if ok else EXIT_FAIL


def _example1_units(cfg, n, seed):
    rng = random.Random(seed)
    return [random_site_unit(rng, cfg.field, cfg.shape, k) for k in range(1, n + 1)]


def _fmt_profile(profile):
    return ",".join(map(str, profile))


def cmd_integrability(args, cfg, out):
    n = args.n or 10
    a = _elements(args, cfg)[0] if args.expr else Element.unit(cfg.field, cfg.shape, 1, 1, 2)
    if args.file:
        conj = []
        for lineno, raw in enumerate(_read(args.file[0]).splitlines(), start=1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            kw, _, rest = line.partition(" ")
            if kw != "conj":
                raise ParseError("expected 'conj <expr>'", lineno, 1)
            conj.append(parse_and_eval(rest, cfg))
        seq = EN.ConjugatorSeq(tuple(conj))
        n = min(n, len(seq)) if args.n is None else n
    elif args.suite == "example1":
        seq = EN.example1_sequence(_example1_units(cfg, n, cfg.seed))
    else:
        seq = EN.example2_sequence(n, cfg.field, cfg.shape).inverse()
    profile = EN.integrability_profile(seq, a, n)
    print(f"profile: {_fmt_profile(profile)}", file=out)
    grows = all(profile[i] < profile[i + 1] for i in range(len(profile) - 1))
    verdict = "strictly increasing" if grows and len(profile) > 1 else "bounded"
    print(f"{verdict} up to n={n}", file=out)
    return EXIT_OK


def cmd_minf(args, cfg, out, bracket):
    xs = [parse_pattern(t, cfg.field) for t in _need(args.expr, 2, "--expr")]
    acc = xs[0]
    for y in xs[1:]:
        acc = MF.pattern_commutator(acc, y) if bracket else MF.pattern_mul(acc, y)
    print(acc, file=out)
    return EXIT_OK


# verification suites


def _report(out, checks):
    ok = True
    for label, passed in checks:
        print(f"{label}: {'ok' if passed else 'FAILED'}", file=out)
        ok &= passed
    print("OK" if ok else "FAILED", file=out)
    return EXIT_OK if ok else EXIT_FAIL


def verify_example2(cfg, n, out):
    F, sh = cfg.field, cfg.shape
    seq = EN.example2_sequence(n, F, sh)
    x = Element.unit(F, sh, 1, 1, 2)
    checks = []
    for i in range(1, n + 1):
        x = conjugate(seq[i - 1], x)
        checks.append((f"iterate {i} equals closed form", x == EN.example2_closed_form(i, F, sh)))
    profile = EN.integrability_profile(seq.inverse(), Element.unit(F, sh, 1, 1, 2), n)
    print(f"profile: {_fmt_profile(profile)}", file=out)
    checks.append(("profile is n+1", profile == list(range(2, n + 2))))
    return _report(out, checks)


def verify_example1(cfg, n, out):
    F, sh = cfg.field, cfg.shape
    seq = EN.example1_sequence(_example1_units(cfg, n, cfg.seed))
    # a test element touching two sites, so two conjugators act on it
    a = Element.unit(F, sh, 1, 1, 2) * Element.unit(F, sh, 2, 2, 1)
    bound = (sh.size(1) * sh.size(2)) ** 2
    profile = EN.integrability_profile(seq, a, n)
    print(f"profile: {_fmt_profile(profile)}", file=out)
    checks = [
        ("nondecreasing", all(x <= y for x, y in zip(profile, profile[1:]))),
        ("constant from n=2", len(set(profile[1:])) <= 1),
        (f"bounded by dim A_[1..2] = {bound}", max(profile) <= bound),
    ]
    inv = EN.integrability_profile(seq.inverse(), a, n)
    print(f"inverse profile: {_fmt_profile(inv)}", file=out)
    checks.append(("inverse sequence bounded", max(inv) <= bound and len(set(inv[1:])) <= 1))
    return _report(out, checks)


def verify_ladder(cfg, k, out):
    F, sh = cfg.field, cfg.shape
    z = D.build_z(F, sh)
    y = D.build_yk(1, F, sh)
    checks = []
    for j in range(1, k + 1):
        y = D.derivation_commutator(z, y)
        target = D.build_yk(j + 1, F, sh)
        checks.append((f"[z,y{j}] = y{j + 1} (syntactic)", y == target))
        checks.append((f"[z,y{j}] = y{j + 1} (on A_[1..8])", D.equal_on_truncation(y, target, 8)))
    return _report(out, checks)


def verify_minf_ladder(cfg, k, out, window=40):
    F = cfg.field
    z = MF.build_z_minf(F)
    checks = []
    for j in range(1, k + 1):
        c = MF.pattern_commutator(z, MF.build_yk_minf(j, F))
        target = MF.build_yk_minf(j + 1, F)
        checks.append((f"[z,y{j}] = y{j + 1}", c == target))
        # dense check inside a window wide enough that truncation cannot matter
        big = window + 2 * j + 4
        zw, yw = MF.to_dense_window(z, big), MF.to_dense_window(MF.build_yk_minf(j, F), big)
        dense = [[F.normalize(a - b) for a, b in zip(r1, r2)]
                 for r1, r2 in zip(matmul(zw, yw, F), matmul(yw, zw, F))]
        tw = MF.to_dense_window(target, window)
        checks.append((f"[z,y{j}] window {window}", all(dense[r][c] == tw[r][c]
                                                        for r in range(window) for c in range(window))))
    return _report(out, checks)


def verify_af_action(cfg, n, out):
    F = cfg.field
    rng = random.Random(cfg.seed)
    f = [random_scalar(rng, F, 5) for _ in range(n)]
    print(f"f: {','.join(format_scalar(c) for c in f)}", file=out)
    checks = []
    for i in range(1, n + 1):
        x = MF.FinitaryMatrix.unit(F, 1, 2 * i - 1)
        want = MF.FinitaryMatrix(F, {(1, 2 * i - 1): 1, (1, 2 * i): f[i - 1]})
        checks.append((f"a_f^-1 e(1,{2 * i - 1}) a_f", MF.conjugate_by_af(f, x, F) == want))
    return _report(out, checks)


def cmd_verify(args, cfg, out):
    suite = args.suite
    if suite == "example1":
        return verify_example1(cfg, args.n or 10, out)
    if suite == "example2":
        return verify_example2(cfg, args.n or 10, out)
    if suite == "ladder":
        return verify_ladder(cfg, args.k or 5, out)
    if suite == "minf-ladder":
        return verify_minf_ladder(cfg, args.k or 6, out)
    return verify_af_action(cfg, args.n or 10, out)


COMMANDS = {
    "eval": cmd_eval,
    "apply-derivation": cmd_apply,
    "commutator": cmd_commutator,
    "inner-solve": cmd_inner_solve,
    "peel": cmd_peel,
    "expand-basis": cmd_expand,
    "skolem-noether": cmd_skolem_noether,
    "factorize": cmd_factorize,
    "integrability": cmd_integrability,
    "minf-mul": lambda a, c, o: cmd_minf(a, c, o, bracket=False),
    "minf-commutator": lambda a, c, o: cmd_minf(a, c, o, bracket=True),
    "verify": cmd_verify,
}


def run_command(argv, out=None, err=None) -> int:
    """Run one command; returns the exit status instead of exiting."""
    out = out or sys.stdout
    err = err or sys.stderr
    try:
        args = build_parser().parse_args(argv)
        for flag in ("n", "k"):
            v = getattr(args, flag)
            if v is not None and v < 1:
                raise UsageError(f"--{flag} must be positive")
        cfg = _config(args)
        return COMMANDS[args.command](args, cfg, out)
    except (UsageError, ParseError, IndexOutOfRange) as exc:
        print(f"usage error: {exc}", file=err)
        return EXIT_USAGE
    except LocmatError as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=err)
        return EXIT_FAIL
    except SystemExit as exc:  # --help
        return int(exc.code or 0)


def main(argv=None) -> int:
    sys.exit(run_command(sys.argv[1:] if argv is None else argv))


if __name__ == "__main__":
    main()

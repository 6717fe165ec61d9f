"""Command-line interface.

Exit codes: 0 success, 1 failed self-check, 2 input error, 3 decomposition
failure, 4 size limit, 5 undefined operation.
"""

from __future__ import annotations

import argparse
import json
import re
import sys
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path

import numpy as np

from . import equiv, fixtures, tv as tv_mod
from .gft import gft as forward_gft, projector
from .errors import (DimensionMismatchError, IllConditionedStructureError, MatrixParseError,
                     NormalizationUndefinedError, NotAChainError, SingularMatrixError,
                     SizeLimitError)
from .jordan import JordanForm, jordan_decompose, weyr_characteristic
from .matcore import ToleranceConfig, induced_l1_norm
from .textio import (format_columns, format_complex, format_matrix, format_signal,
                     parse_columns, parse_edgelist, parse_matrix, parse_signal)

EXIT_OK, EXIT_CHECK, EXIT_INPUT, EXIT_DECOMP, EXIT_SIZE, EXIT_UNDEFINED = range(6)


# ---------------------------------------------------------------------------
# input helpers
# ---------------------------------------------------------------------------


def _read(path):
    if path == "-":
        return sys.stdin.read()
    return Path(path).read_text()


def load_matrix(path, fmt="matrix"):
    text = _read(path)
    if fmt == "edgelist":
        return parse_edgelist(text)
    return parse_matrix(text)


def tolerances(args) -> ToleranceConfig:
    return ToleranceConfig(rank_tol=args.tol_rank, eig_cluster_tol=args.tol_eig,
                           verify_tol=args.tol_verify)


def _emit(args, lines, payload):
    if args.json:
        print(json.dumps(payload, indent=2))
    else:
        for line in lines:
            print(line)


def _c(z):
    return format_complex(z)


# ---------------------------------------------------------------------------
# reports
# ---------------------------------------------------------------------------


def decomposition_lines(d):
    lines = []
    for c in d.chains:
        lines.append(f"lambda={_c(c.value)} size={c.size} cols={c.start + 1}..{c.stop} "
                     f"l1norm={induced_l1_norm(c.vectors):.12g}")
    return lines


def gft_lines(r):
    return [f"lambda={_c(c.value)} block={c.j} dim={c.size} "
            f"shat=[{','.join(format_complex(x, None) for x in c.shat)}]" for c in r.components]


_SHAT = re.compile(r"shat=\[(.*)\]")


def parse_gft_report(text: str) -> np.ndarray:
    """Sum of the ``shat`` vectors in a GFT report."""
    from .textio import parse_scalar
    total = None
    for lineno, line in enumerate(text.splitlines(), start=1):
        m = _SHAT.search(line)
        if not m:
            continue
        try:
            vec = np.array([complex(parse_scalar(t)) for t in m.group(1).split(",") if t],
                           dtype=complex)
        except (ValueError, ZeroDivisionError) as exc:
            raise MatrixParseError(str(exc), lineno) from None
        if total is not None and vec.shape != total.shape:
            raise DimensionMismatchError(f"line {lineno}: component length {vec.size} differs")
        total = vec if total is None else total + vec
    if total is None:
        raise MatrixParseError("no components found in GFT report")
    return total


def ordering_lines(o):
    return [f"rank={c.rank} lambda={_c(c.value)} block={c.j} dim={c.size} "
            f"key={c.key:.12g} class_tv={c.class_tv}" for c in o]


# ---------------------------------------------------------------------------
# commands
# ---------------------------------------------------------------------------


def cmd_decompose(args):
    tol = tolerances(args)
    a = load_matrix(args.matrix, args.format)
    d = jordan_decompose(a, tol)
    lines = decomposition_lines(d)
    if args.dump:
        for name, m in (("V", d.V), ("J", d.J), ("W", d.W)):
            lines.append(f"# {name}")
            lines.extend(format_matrix(m).splitlines())
    payload = {"blocks": [{"lambda": _c(c.value), "size": c.size, "cols": [c.start + 1, c.stop],
                           "l1norm": induced_l1_norm(c.vectors)} for c in d.chains]}
    _emit(args, lines, payload)
    return EXIT_OK


def cmd_gft(args):
    tol = tolerances(args)
    a = load_matrix(args.matrix, args.format)
    d = jordan_decompose(a, tol)
    if args.signals:
        files = sorted(p for p in Path(args.signals).iterdir() if p.is_file())
        signals = [parse_signal(p.read_text(), d.n) for p in files]
        with ThreadPoolExecutor() as pool:
            results = list(pool.map(lambda s: forward_gft(d, s), signals))
        lines, payload = [], {}
        for p, r in zip(files, results):
            lines.append(f"# {p.name}")
            lines.extend(gft_lines(r))
            payload[p.name] = gft_lines(r)
        _emit(args, lines, payload)
        return EXIT_OK
    if args.signal is None:
        raise MatrixParseError("a signal file or --signals directory is required")
    s = parse_signal(_read(args.signal), d.n)
    r = forward_gft(d, s)
    _emit(args, gft_lines(r), {"components": gft_lines(r)})
    return EXIT_OK


def cmd_igft(args):
    s = parse_gft_report(_read(args.report))
    sys.stdout.write(format_signal(s))
    return EXIT_OK


def _pair(args):
    return load_matrix(args.a, args.format), load_matrix(args.b, args.format)


def _verdict_payload(v):
    return {"isomorphic": v.isomorphic,
            "perm": list(v.permutation.image) if v.permutation else None,
            "jordan_equivalent": v.jordan_equivalent,
            "failed_condition": v.failed_condition, "method": v.method}


def cmd_iso(args):
    tol = tolerances(args)
    a, b = _pair(args)
    p = equiv.find_isomorphism(a, b, tol)
    line = "isomorphic=" + ("true perm=" + str(p) if p else "false")
    _emit(args, [line], {"isomorphic": p is not None, "perm": list(p.image) if p else None})
    return EXIT_OK


def cmd_equiv(args):
    tol = tolerances(args)
    a, b = _pair(args)
    v = equiv.classify(a, b, tol)
    _emit(args, [equiv.format_verdict(v)], _verdict_payload(v))
    return EXIT_OK


def cmd_order(args):
    tol = tolerances(args)
    d = jordan_decompose(load_matrix(args.matrix, args.format), tol)
    o = tv_mod.order_components(d, tol)
    payload = [{"rank": c.rank, "lambda": _c(c.value), "block": c.j, "dim": c.size,
                "key": c.key, "class_tv": c.class_tv.value, "bound_only": c.class_tv.bound_only}
               for c in o]
    _emit(args, ordering_lines(o), {"ordering": payload})
    return EXIT_OK


def _pick_block(d, text):
    if text:
        i, j = (int(x) for x in text.split(","))
        d.chain(i, j)
        return i, j
    cands = [c for c in d.chains if c.size >= 2]
    if not cands:
        raise NotAChainError("no Jordan block of size >= 2")
    c = min(cands, key=lambda c: (c.size, -c.i, -c.j))
    return c.i, c.j


def cmd_tv(args):
    tol = tolerances(args)
    a = load_matrix(args.matrix, args.format)
    if args.signal:
        s = parse_signal(_read(args.signal), a.rows)
        t = tv_mod.signal_tv(a, s, args.normalize, tol)
        _emit(args, [f"tv={t.value:.12g}"], {"tv": t.value})
        return EXIT_OK
    d = jordan_decompose(a, tol)
    if args.profile is not None:
        block = _pick_block(d, args.block)
        chain = parse_columns(_read(args.chain)) if args.chain else None
        grid = tv_mod.parse_grid(args.grid)
        prof = tv_mod.tv_profile(d, block, args.profile - 1, grid, chain=chain, tol=tol)
        for t, why in prof.skipped:
            print(f"skipped parameter {float(t):.12g}: {why}", file=sys.stderr)
        if args.json:
            print(json.dumps({"profile": [[float(t), v.value] for t, v in prof]}))
        else:
            sys.stdout.write(prof.to_csv())
        return EXIT_OK
    lines, payload = [], []
    for c in d.chains:
        v = tv_mod.chain_tv(d.matrix, c.vectors, c.value, tol)
        lines.append(f"lambda={_c(c.value)} block={c.j} dim={c.size} tv={v.value:.12g} "
                     f"bound={tv_mod.tv_bound(c.value):.12g}")
        payload.append({"lambda": _c(c.value), "block": c.j, "dim": c.size, "tv": v.value})
    _emit(args, lines, {"chains": payload})
    return EXIT_OK


def cmd_simplify(args):
    tol = tolerances(args)
    a = load_matrix(args.matrix, args.format)
    structural = equiv.structural_membership_check(a, tol)
    j, flag = equiv.canonical_representative(jordan_decompose(a, tol), tol)
    lines = [f"jordan_form_class={'true' if flag else 'false'}",
             "structural=" + ("none" if structural is None else
                              ";".join(f"{_c(v)}x{s}" for v, s in structural.blocks))]
    lines.extend(format_matrix(j).splitlines())
    _emit(args, lines, {"jordan_form_class": flag, "J": format_matrix(j)})
    return EXIT_OK


# ---------------------------------------------------------------------------
# demo
# ---------------------------------------------------------------------------


def demo_checks(tol: ToleranceConfig):
    """Self-checks on the embedded ten-node example as ``(name, passed, detail)``."""
    checks = []

    def check(name, passed, detail):
        checks.append((name, bool(passed), detail))

    a = fixtures.EXAMPLE_A
    dense = a.to_numpy()
    d = jordan_decompose(a, tol)
    root = -(6 ** (1 / 3))
    omega = np.exp(2j * np.pi / 3)
    expected = JordanForm(((4, 1), (root * omega, 1), (root * omega ** 2, 1), (root, 1),
                           (0, 4), (0, 2)))
    check("jordan_form", d.form.matches(expected, 1e-8),
          "; ".join(f"{_c(v)}x{s}" for v, s in d.form.blocks))
    w = weyr_characteristic(a, 0, tol)
    check("weyr_at_zero", w == (2, 4, 5, 6), str(w))

    for name, chain, want in (("tv_V1", fixtures.EXAMPLE_V1, 1.181),
                              ("tv_V2", fixtures.EXAMPLE_V2, 1.389),
                              ("tv_V3", fixtures.EXAMPLE_V3, 2.0)):
        got = tv_mod.normalized_chain_tv(dense, chain.to_numpy(), 0, tol).value
        check(name, abs(got - want) <= 1e-3, f"{got:.6f} (expected {want})")

    d3 = fixtures.example_decomposition(fixtures.EXAMPLE_V3, tol)
    blk = next((c.i, c.j) for c in d3.chains if c.size == 2)
    ctv = tv_mod.class_tv(d3, *blk, tol)
    check("class_tv_J2", ctv.value == 2 and not ctv.bound_only, str(ctv))

    dt = fixtures.example_decomposition(fixtures.EXAMPLE_V_TILDE, tol, matrix="reconstruct")
    diff = induced_l1_norm(dt.matrix - dense)
    check("alternate_matrix_differs", diff > 1e-6, f"||A~ - A||_1 = {diff:.6g}")
    worst = max(induced_l1_norm(projector(dt, c.i, c.j) - projector(d3, c.i, c.j))
                for c in d3.chains)
    check("alternate_projectors_agree", worst <= 1e-8, f"max ||P~ - P||_1 = {worst:.6g}")
    # a basis of the same span with a non-Toeplitz change of basis
    mixed = fixtures.EXAMPLE_V3.to_numpy() @ np.array([[1.0, 0.0], [1.0, 1.0]])
    dm = fixtures.example_decomposition(mixed, tol, matrix="reconstruct")
    mdiff = induced_l1_norm(dm.matrix - dense)
    mworst = max(induced_l1_norm(projector(dm, c.i, c.j) - projector(d3, c.i, c.j))
                 for c in d3.chains)
    check("same_span_basis", mdiff > 1e-6 and mworst <= 1e-8,
          f"||A' - A||_1 = {mdiff:.6g}, max ||P' - P||_1 = {mworst:.3g}")
    ttv = tv_mod.normalized_chain_tv(dt.matrix, fixtures.EXAMPLE_V_TILDE.to_numpy(), 0, tol).value
    check("tv_V_tilde", abs(ttv - 1.452) <= 1e-3, f"{ttv:.6f} (expected 1.452)")

    prof = tv_mod.tv_profile(d, blk, fixtures.EXAMPLE_FREE_COMPONENT,
                             tv_mod.parse_grid("-6:6:1/15"), chain=fixtures.EXAMPLE_V1, tol=tol)
    at0 = next(v.value for t, v in prof if t == 0)
    check("profile_at_zero", abs(at0 - 1.181) <= 1e-3, f"{at0:.6f}")
    tmax, vmax = tv_mod.refine_maximum(d, blk, fixtures.EXAMPLE_FREE_COMPONENT, prof,
                                       chain=fixtures.EXAMPLE_V1, tol=tol)
    check("profile_maximum", abs(vmax - 2) <= 1e-6 and abs(tmax - 59 / 15) <= 1e-4,
          f"max {vmax:.9f} at {tmax:.9f}")
    return checks


def cmd_demo(args):
    tol = tolerances(args)
    if args.export:
        out = Path(args.export)
        out.mkdir(parents=True, exist_ok=True)
        (out / "example_A.txt").write_text(format_matrix(fixtures.EXAMPLE_A))
        for name in ("V1", "V2", "V3", "V_TILDE"):
            (out / f"example_{name}.txt").write_text(format_columns(getattr(fixtures, f"EXAMPLE_{name}")))
    checks = demo_checks(tol)
    failed = [c for c in checks if not c[1]]
    if args.json:
        print(json.dumps({"passed": not failed,
                          "checks": [{"name": n, "passed": p, "detail": t} for n, p, t in checks]},
                         indent=2))
    else:
        for n, p, t in checks:
            print(f"{'PASS' if p else 'FAIL'} {n}: {t}")
    sys.stdout.flush()
    if failed:
        print("failed: " + ", ".join(n for n, _, _ in failed), file=sys.stderr)
        return EXIT_CHECK
    return EXIT_OK


# ---------------------------------------------------------------------------
# parser
# ---------------------------------------------------------------------------


def _component(text):
    """``6`` or ``v6``: a 1-based component index."""
    k = int(text[1:] if text[:1] in "vV" else text)
    if k < 1:
        raise argparse.ArgumentTypeError("component index is 1-based")
    return k


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--tol-rank", type=float, default=1e-10, help="relative singular-value threshold")
    common.add_argument("--tol-eig", type=float, default=1e-8, help="eigenvalue clustering radius (relative)")
    common.add_argument("--tol-verify", type=float, default=1e-8, help="residual tolerance")
    common.add_argument("--json", action="store_true", help="structured output")
    common.add_argument("--seed", type=int, default=0, help="random seed")
    common.add_argument("--format", choices=("matrix", "edgelist"), default="matrix",
                        help="input matrix format")

    parser = argparse.ArgumentParser(
        prog="jordan-gft",
        description="Projector-based graph Fourier transform for directed graphs.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("decompose", parents=[common], help="Jordan decomposition report")
    p.add_argument("matrix")
    p.add_argument("--dump", action="store_true", help="also print V, J and W")
    p.set_defaults(func=cmd_decompose)

    p = sub.add_parser("gft", parents=[common], help="forward transform")
    p.add_argument("matrix")
    p.add_argument("signal", nargs="?")
    p.add_argument("--signals", metavar="DIR", help="transform every file in DIR")
    p.set_defaults(func=cmd_gft)

    p = sub.add_parser("igft", parents=[common], help="sum the components of a GFT report")
    p.add_argument("report", help="GFT report file or '-'")
    p.set_defaults(func=cmd_igft)

    for name, func, text in (("iso", cmd_iso, "isomorphism search"),
                             ("equiv", cmd_equiv, "isomorphism and Jordan equivalence")):
        p = sub.add_parser(name, parents=[common], help=text)
        p.add_argument("a")
        p.add_argument("b")
        p.set_defaults(func=func)

    p = sub.add_parser("order", parents=[common], help="total-variation ordering")
    p.add_argument("matrix")
    p.set_defaults(func=cmd_order)

    p = sub.add_parser("tv", parents=[common], help="signal TV, chain TVs or a TV profile")
    p.add_argument("matrix")
    p.add_argument("signal", nargs="?")
    p.add_argument("--normalize", action="store_true", help="divide A by its spectral radius")
    p.add_argument("--profile", type=_component, metavar="K",
                   help="vary component K (1-based) of the top chain vector")
    p.add_argument("--grid", default="-6:6:1/15", help="start:stop:step (rationals allowed)")
    p.add_argument("--block", help="block 'i,j' (0-based); default: smallest block of size >= 2")
    p.add_argument("--chain", help="base chain file (N rows, r columns)")
    p.set_defaults(func=cmd_tv)

    p = sub.add_parser("simplify", parents=[common], help="canonical representative J")
    p.add_argument("matrix")
    p.set_defaults(func=cmd_simplify)

    p = sub.add_parser("demo", parents=[common], help="self-checking ten-node walkthrough")
    p.add_argument("--export", metavar="DIR", help="write the example matrix and chains to DIR")
    p.set_defaults(func=cmd_demo)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except SizeLimitError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_SIZE
    except NormalizationUndefinedError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_UNDEFINED
    except (IllConditionedStructureError, SingularMatrixError) as exc:
        print(f"error: decomposition failed: {exc}", file=sys.stderr)
        return EXIT_DECOMP
    except (MatrixParseError, DimensionMismatchError, NotAChainError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())

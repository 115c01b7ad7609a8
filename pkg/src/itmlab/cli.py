"""Command-line front end: classification, rendering, and analysis reports.

Reports are stable JSON on stdout: {"command", "inputs", "results",
"timings", "tool_version"}, with --no-timings for byte-identical output.
Exit codes: 0 success, 2 usage or domain errors, 3 precision exhausted,
4 internal invariant violation (a certificate failed).
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import sys
import time
from fractions import Fraction

import mpmath

from . import __version__
from .errors import DomainError, InvariantViolation, ParseError, PrecisionExhausted
from .itmsim import Params
from .kseq import KSeqSpec, parse_kseq
from .numkernel import DEFAULT_PRECISION, HighFloat, Mat3, hilbert_rho
from .renorm import RasterConfig, k_sequence, raster_omega
from .sadic import lr_verdict, telescope_blocks
from .spectral import (
    line_search,
    rational_descent,
    stable_dir_periodic_exact,
    stable_direction,
    host_sums,
    wm_verdict,
)
from .certificates import lyapunov_report, state_machine_run

_FLOAT_DIGITS = 40


def _jsonable(obj):
    if isinstance(obj, HighFloat):
        return obj.tagged()
    if isinstance(obj, Fraction):
        return str(obj)
    if isinstance(obj, mpmath.mpf):
        return mpmath.nstr(obj, _FLOAT_DIGITS)
    if isinstance(obj, Mat3):
        return obj.as_lists()
    if isinstance(obj, KSeqSpec):
        return obj.describe()
    if dataclasses.is_dataclass(obj) and not isinstance(obj, type):
        return {f.name: _jsonable(getattr(obj, f.name))
                for f in dataclasses.fields(obj)}
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(x) for x in obj]
    if isinstance(obj, (str, int, float, bool)) or obj is None:
        return obj
    return str(obj)


def _emit(command: str, inputs: dict, results, started: float,
          no_timings: bool) -> None:
    report = {
        "command": command,
        "inputs": _jsonable(inputs),
        "results": _jsonable(results),
        "tool_version": __version__,
    }
    if not no_timings:
        report["timings"] = {"seconds": round(time.time() - started, 6)}
    json.dump(report, sys.stdout, sort_keys=True)
    sys.stdout.write("\n")


def _parse_number(text: str) -> Fraction:
    try:
        return Fraction(text)
    except (ValueError, ZeroDivisionError) as exc:
        raise ParseError(f"cannot parse {text!r} as a rational or decimal") from exc


def _load_config(path: str) -> dict:
    out = {}
    with open(path) as fh:
        for line in fh:
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            if "=" not in line:
                raise ParseError(f"bad config line: {line!r}")
            key, _, value = line.partition("=")
            out[key.strip()] = value.strip()
    return out


def _build_parser() -> argparse.ArgumentParser:
    top = argparse.ArgumentParser(prog="itmlab")
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="key=value config file; flags override")
    common.add_argument("--no-timings", action="store_true")
    sub = top.add_subparsers(dest="command", required=True)

    c = sub.add_parser("classify", parents=[common],
                       help="renormalization type of a parameter pair")
    c.add_argument("--alpha", required=True)
    c.add_argument("--beta", required=True)
    c.add_argument("--depth", type=int, default=50)
    c.add_argument("--precision", type=int, default=None)

    r = sub.add_parser("render", parents=[common],
                       help="survivor raster as a binary PGM")
    r.add_argument("--grid", default="100x100", help="WIDTHxHEIGHT")
    r.add_argument("--depth", type=int, default=12)
    r.add_argument("--out", default="omega.pgm")
    r.add_argument("--workers", type=int, default=None)
    r.add_argument("--precision", type=int, default=None)
    r.add_argument("--viewport", default=None,
                   help="alpha_lo,alpha_hi,beta_lo,beta_hi (exact rationals)")

    a = sub.add_parser("analyze", parents=[common],
                       help="k-sequence analyses")
    a.add_argument("--kseq", required=True,
                   help="const:<k> | k1,k2,... | <prefix>+(<period>)")
    a.add_argument("what", choices=["lr", "stable", "lines", "host", "lyap",
                                    "states", "rho", "descend", "wm"])
    a.add_argument("--P", type=int, default=50, help="line-search bound")
    a.add_argument("--tol", default="1/100000000000000000000000000",
                   help="line-search tolerance (rational)")
    a.add_argument("--N", type=int, default=40, help="horizon / steps")
    a.add_argument("--xi", default="1/2", help="candidate eigenvalue (rational)")
    a.add_argument("--C", type=int, default=None, help="state-machine bound")
    a.add_argument("--span", default=None, help="state-machine span m,n")
    a.add_argument("--point", default=None, help="simplex point u,v for descend")
    a.add_argument("--target-diam", default="1/" + "1" + "0" * 30,
                   dest="target_diam")
    a.add_argument("--precision", type=int, default=None)
    return top


def _cmd_classify(args, precision: int) -> dict:
    alpha = _parse_number(args.alpha)
    beta = _parse_number(args.beta)
    p = Params.from_rationals(alpha, beta)
    if not p.in_U:
        raise DomainError(f"(alpha, beta) = ({alpha}, {beta}) outside U")
    verdict = k_sequence(p, args.depth)
    return verdict.to_dict()


def _cmd_render(args, precision: int, workers: int) -> dict:
    try:
        w_txt, h_txt = args.grid.lower().split("x")
        width, height = int(w_txt), int(h_txt)
    except ValueError as exc:
        raise ParseError(f"bad grid {args.grid!r}") from exc
    viewport = {}
    if args.viewport:
        parts = [str(_parse_number(t)) for t in args.viewport.split(",")]
        if len(parts) != 4:
            raise ParseError("viewport needs four comma-separated rationals")
        viewport = dict(zip(("alpha_lo", "alpha_hi", "beta_lo", "beta_hi"),
                            map(Fraction, parts)))
    cfg = RasterConfig(width=width, height=height, depth=args.depth,
                       precision=precision, out_path=args.out,
                       workers=workers, **viewport)
    return raster_omega(cfg)


def _cmd_analyze(args, precision: int) -> object:
    spec = parse_kseq(args.kseq)
    tol = _parse_number(args.tol)
    if args.what == "lr":
        return lr_verdict(spec)
    if args.what == "stable":
        if spec.kind == "periodic" and not spec.prefix:
            return stable_dir_periodic_exact(spec.period, precision)
        return stable_direction(spec, target_diam=_parse_number(args.target_diam),
                                precision=precision)
    if args.what == "lines":
        if spec.kind == "periodic" and not spec.prefix:
            stable = stable_dir_periodic_exact(spec.period, precision)
        else:
            stable = stable_direction(spec, precision=precision)
        hits = line_search(stable.point(), stable.certified_diameter,
                           args.P, tol, precision)
        return {"stable": stable, "P": args.P, "tol": tol, "hits": hits}
    if args.what == "host":
        return host_sums(spec, _parse_number(args.xi), args.N, precision)
    if args.what == "lyap":
        return lyapunov_report(spec, max(args.N, 10), precision)
    if args.what == "states":
        if args.C is None or args.span is None:
            raise ParseError("states needs --C and --span m,n")
        try:
            m, n = (int(t) for t in args.span.split(","))
        except ValueError as exc:
            raise ParseError("span must be m,n") from exc
        run = state_machine_run(spec, args.C, m, n)
        return {
            "final_ok": run.final_ok,
            "trace": [json.loads(t.to_json()) for t in run.trace],
        }
    if args.what == "rho":
        from .numkernel import mat_product, make_matrix
        blocks = telescope_blocks(spec, args.N)
        rows = []
        for b in blocks:
            if not b.full:
                rows.append({"range": [b.start, b.end], "full": False})
                continue
            bmat = mat_product([make_matrix("B", k=spec.k(i))
                                for i in range(b.end, b.start - 1, -1)])
            hr = hilbert_rho(bmat, precision)
            rows.append({"range": [b.start, b.end], "full": True,
                         "rho": hr.rho, "contraction": hr.contraction})
        return {"blocks": rows}
    if args.what == "descend":
        if not args.point:
            raise ParseError("descend needs --point u,v")
        try:
            u_txt, v_txt = args.point.split(",")
        except ValueError as exc:
            raise ParseError("point must be u,v") from exc
        return rational_descent(_parse_number(u_txt), _parse_number(v_txt))
    if args.what == "wm":
        verdict = wm_verdict(spec, bound=args.P, horizon=args.N, tol=tol,
                             precision=precision)
        return json.loads(verdict.to_json())
    raise ParseError(f"unknown analysis {args.what!r}")  # pragma: no cover


def main(argv=None) -> int:
    started = time.time()
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 2 if exc.code not in (0, None) else 0
    try:
        config = _load_config(args.config) if args.config else {}
        precision = (args.precision if getattr(args, "precision", None)
                     else int(config.get("precision", DEFAULT_PRECISION)))
        workers = (args.workers if getattr(args, "workers", None)
                   else int(config.get("workers", 1)))
        if args.command == "classify":
            results = _cmd_classify(args, precision)
            inputs = {"alpha": args.alpha, "beta": args.beta,
                      "depth": args.depth, "precision": precision}
        elif args.command == "render":
            results = _cmd_render(args, precision, workers)
            inputs = {"grid": args.grid, "depth": args.depth, "out": args.out,
                      "workers": workers, "precision": precision,
                      "viewport": args.viewport}
        else:
            results = _cmd_analyze(args, precision)
            inputs = {"kseq": args.kseq, "what": args.what,
                      "precision": precision}
        _emit(args.command, inputs, results, started, args.no_timings)
        return 0
    except (ParseError, DomainError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except PrecisionExhausted as exc:
        print(f"precision exhausted: {exc}", file=sys.stderr)
        return 3
    except InvariantViolation as exc:
        print(f"invariant violation: {exc}", file=sys.stderr)
        return 4


if __name__ == "__main__":
    sys.exit(main())

"""Command line front end.

Subcommands: trace, slopes, theorem1, theorem2, verify. Reports go to
stdout as JSON; certificate files are written with canonical bytes so a
rerun with the same parameters produces an identical file. Exit codes:
0 success, 1 verification failure, 2 usage error, 3 request outside the
exact engines' budget.
"""

from __future__ import annotations

import argparse
import json
import sys
import time

from . import cache, slopes
from ._version import ENGINE_VERSION
from .ntheory import EngineInfeasibleError
from .traceformula import trace_tn, trace_tn_mod


def _report(command: str, params: dict, results: dict, t0: float) -> None:
    out = {
        "engine_version": ENGINE_VERSION,
        "command": command,
        "params": params,
        "results": results,
        "timing_seconds": round(time.time() - t0, 3),
    }
    print(json.dumps(out, indent=2))


def _write_cert(cert: dict, path: str) -> None:
    data = cache.stable_json(cert) + "\n"
    with open(path, "w") as fh:
        fh.write(data)


def _cmd_trace(args) -> int:
    t0 = time.time()
    params = {"level": args.level, "weight": args.weight, "n": args.n}
    if args.mod is not None:
        params["mod"] = args.mod
        value = trace_tn_mod(args.level, args.weight, args.n, args.mod)
    else:
        value = trace_tn(args.level, args.weight, args.n)
    _report("trace", params, {"trace": str(value)}, t0)
    return 0


def _cmd_slopes(args) -> int:
    t0 = time.time()
    ms = slopes.up_slope_multiset(args.p, args.level, args.weight)
    results = {
        "slopes": [[slopes.slope_str(s), m] for s, m in ms],
        "dimension": sum(m for _, m in ms),
    }
    _report("slopes", {"p": args.p, "level": args.level, "weight": args.weight},
            results, t0)
    return 0


def _cmd_theorem1(args) -> int:
    t0 = time.time()
    cert = slopes.theorem1_certificate(
        p=args.p, k1=args.k1, k2=args.k2, depth=args.depth
    )
    _write_cert(cert, args.out)
    _report(
        "theorem1",
        dict(cert["params"]),
        {
            "violated": cert["violated"],
            "dichotomy_case": cert["dichotomy"]["case"],
            "certificate": args.out,
            "sha256": cert["sha256"],
        },
        t0,
    )
    return 0


def _cmd_theorem2(args) -> int:
    t0 = time.time()
    cert = slopes.theorem2_certificate(
        p=args.p,
        k1=args.k1,
        k2=args.k2,
        nmax=args.nmax,
        k2_all=args.k2_all,
        jobs=args.jobs,
    )
    _write_cert(cert, args.out)
    _report(
        "theorem2",
        dict(cert["params"]),
        {
            "violated": cert["violated"],
            "members": cert["members"],
            "violations": cert["violations"],
            "factor_two_on_members": cert["factor_two_on_members"],
            "certificate": args.out,
            "sha256": cert["sha256"],
        },
        t0,
    )
    return 0


def _cmd_verify(args) -> int:
    t0 = time.time()
    try:
        with open(args.certfile) as fh:
            cert = json.load(fh)
    except (OSError, ValueError) as exc:
        print(json.dumps({"ok": False, "reason": str(exc)}))
        return 1
    ok, reason = slopes.verify_certificate(cert)
    _report("verify", {"certfile": args.certfile}, {"ok": ok, "reason": reason}, t0)
    return 0 if ok else 1


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="upslopes",
        description="Exact Hecke traces, U_p slope distributions, and "
        "certificates of weight-congruence failures.",
    )
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("trace", help="trace of T_n on S_k(Gamma0(N))")
    p.add_argument("--level", "--N", dest="level", type=int, required=True)
    p.add_argument("--weight", "--k", dest="weight", type=int, required=True)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--mod", type=int, default=None,
                   help="report the trace mod this integer")
    p.set_defaults(fn=_cmd_trace)

    p = sub.add_parser("slopes", help="U_p slope multiset on S_k(Gamma0(N*p))")
    p.add_argument("--p", type=int, required=True)
    p.add_argument("--level", "--N", dest="level", type=int, required=True)
    p.add_argument("--weight", "--k", dest="weight", type=int, required=True)
    p.set_defaults(fn=_cmd_slopes)

    p = sub.add_parser("theorem1", help="certificate: slope counts differ "
                       "between two congruent weights at level 1")
    p.add_argument("--p", type=int, default=59)
    p.add_argument("--k1", type=int, default=16)
    p.add_argument("--k2", type=int, default=3438)
    p.add_argument("--depth", type=int, default=2)
    p.add_argument("--out", default="certificate_theorem1.json")
    p.set_defaults(fn=_cmd_theorem1)

    p = sub.add_parser("theorem2", help="certificate: slope-one counts double "
                       "across a level sweep")
    p.add_argument("--p", type=int, default=5)
    p.add_argument("--k1", type=int, default=6)
    p.add_argument("--k2", type=int, default=26)
    p.add_argument("--nmax", type=int, default=83)
    p.add_argument("--k2-all", action="store_true", dest="k2_all",
                   help="compute the k2 column at every level, not only members")
    p.add_argument("--jobs", type=int, default=1)
    p.add_argument("--out", default="certificate_theorem2.json")
    p.set_defaults(fn=_cmd_theorem2)

    p = sub.add_parser("verify", help="recompute a certificate and compare")
    p.add_argument("certfile")
    p.set_defaults(fn=_cmd_verify)
    return ap


def main(argv=None) -> int:
    cache.ensure_big_digits()
    args = build_parser().parse_args(argv)
    try:
        return args.fn(args)
    except EngineInfeasibleError as exc:
        print(json.dumps({"error": "infeasible", "detail": str(exc)}),
              file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())

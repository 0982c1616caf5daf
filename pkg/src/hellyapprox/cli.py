"""Command line entry points (``python3 -m hellyapprox <command>``).

Commands read and write the JSON formats of :mod:`hellyapprox.instances`.
Exit codes: 0 success, 1 a failed check (``verify`` rejects, or a sweep has
a certified bound violation), 2 usage errors, 3 unreadable or malformed
input.
"""

import argparse
import json
import math
import sys

import numpy as np

from .caratheodory import ColorGroup, colorful_maurey_sample, maurey_sample
from .counterexample import Embedding, RealizationError, build_linf_counterexample, transfer_counterexample
from .harness import MODES, ExperimentConfig, exit_code, format_rows, run_sweep
from .helly import certificate_to_lower, minimize_max_distance, verify_lower_bound
from .instances import (SchemaError, certificate_from_json, cloud_from_json, dumps, instance_from_json,
                        instance_to_json)
from .normed_space import DEFAULT_LINF_CONSTANT, INF, NormSpec

EXIT_FAIL, EXIT_USAGE, EXIT_INPUT = 1, 2, 3


class InputError(Exception):
    pass


def _exponent(text):
    if text.lower() in ("inf", "infinity"):
        return INF
    try:
        v = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"invalid p: {text!r}") from None
    return int(v) if v.is_integer() else v


def _k_list(text):
    """``"4"``, ``"1,2,4"`` or ``"1-5"``."""
    out = []
    try:
        for part in text.split(","):
            if "-" in part:
                lo, hi = part.split("-")
                out.extend(range(int(lo), int(hi) + 1))
            elif part:
                out.append(int(part))
    except ValueError:
        raise argparse.ArgumentTypeError(f"invalid k list: {text!r}") from None
    return out


def _load(path):
    try:
        with open(path, encoding="utf-8") as fh:
            return json.load(fh)
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc.strerror}") from None
    except json.JSONDecodeError as exc:
        raise InputError(f"{path}: $: invalid JSON at line {exc.lineno} column {exc.colno}") from None


def _emit(text, out):
    if out:
        try:
            with open(out, "w", encoding="utf-8", newline="") as fh:
                fh.write(text)
        except OSError as exc:
            raise InputError(f"cannot write {out}: {exc.strerror}") from None
    else:
        sys.stdout.write(text)


def _float(v):
    v = float(v)
    return v if math.isfinite(v) else None


def _outcome_json(out, family):
    obj = {
        "center": np.asarray(out.center).tolist(),
        "radii": [float(r) for r in out.radii],
        "objective": out.objective,
        "certified": out.certified,
        "certificate_residual": _float(out.certificate_residual),
        "lower": out.lower,
        "active": out.active,
        "method": out.method,
    }
    if out.certificate is not None:
        obj["certificate"] = certificate_to_lower(out.certificate, family).to_json()
    return obj


def cmd_solve(args):
    family, _ = instance_from_json(_load(args.instance))
    out = minimize_max_distance(family, tol=args.tol, seed=args.seed, method=args.method)
    _emit(dumps(_outcome_json(out, family)) + "\n", args.out)
    return 0


def cmd_counterexample(args):
    if args.embed:
        emb = Embedding.from_json(_load(args.embed))
        res = transfer_counterexample(args.k, emb, args.delta)
        obj = instance_to_json(res.family, res.witnesses)
        obj["certificate"] = res.certificate.to_json()
    else:
        inst = build_linf_counterexample(args.k)
        obj = instance_to_json(inst.family, inst.witnesses)
        obj["certificate"] = inst.certificate().to_json()
    _emit(dumps(obj) + "\n", args.out)
    return 0


def cmd_maurey(args):
    raw = _load(args.cloud)
    if isinstance(raw, dict) and "colors" in raw:
        group = ColorGroup([cloud_from_json(g) for g in raw["colors"]])
        space = NormSpec(group.dim, args.p)
        res = colorful_maurey_sample(group, args.trials, args.seed, space, tol=args.tol)
    else:
        if args.k is None:
            raise InputError("maurey on a single cloud needs --k")
        cloud = cloud_from_json(raw)
        space = NormSpec(cloud.points.shape[1], args.p)
        res = maurey_sample(cloud, args.k, args.trials, args.seed, space, tol=args.tol)
    obj = {"indices": res.indices, "average": res.average.tolist(), "norm": res.norm,
           "trials": res.trials_used, "seed": res.seed}
    _emit(dumps(obj) + "\n", args.out)
    return 0


def cmd_sweep(args):
    p = INF if args.mode == "counterexample_check" and args.p is None else (args.p or 2)
    cfg = ExperimentConfig(NormSpec(args.dim, p), args.k, mode=args.mode, instances=args.instances,
                           trials=args.trials, seed=args.seed, tol=args.tol, set_size=args.set_size,
                           bound=args.bound, linf_constant=args.linf_constant, fmt=args.format, timing=not args.no_timing)
    rows = run_sweep(cfg)
    _emit(format_rows(rows, args.format), args.out)
    for r in rows:
        if r.status == "uncertified":
            print(f"warning: k={r.k} instance {r.index} exceeds its bound but is uncertified",
                  file=sys.stderr)
    return exit_code(rows)


def cmd_verify(args):
    raw = _load(args.instance)
    family, _ = instance_from_json(raw)
    if args.cert:
        cobj = _load(args.cert)
    elif isinstance(raw, dict) and "certificate" in raw:
        cobj = raw["certificate"]
    else:
        raise InputError("no certificate: pass --cert or embed a 'certificate' key")
    n_sets = sum(len(c.sets) for c in getattr(family, "colors", [family]))
    cert = certificate_from_json(cobj, n_sets=n_sets, dim=family.space.dim)
    ok = verify_lower_bound(family, cert, tol=args.tol)
    _emit(dumps({"valid": ok, "bound": cert.bound}) + "\n", args.out)
    return 0 if ok else EXIT_FAIL


def build_parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--out", help="output file (default: stdout)")

    parser = argparse.ArgumentParser(prog="hellyapprox",
                                     description="Approximate Helly centers, certificates and bound sweeps.")
    sub = parser.add_subparsers(dest="command", required=True)

    s = sub.add_parser("solve", parents=[common], help="family JSON -> outcome JSON")
    s.add_argument("instance")
    s.add_argument("--tol", type=float, default=1e-6)
    s.add_argument("--method", choices=["auto", "lp", "conic", "subgradient"], default="auto")
    s.set_defaults(func=cmd_solve)

    s = sub.add_parser("counterexample", parents=[common], help="l_inf family with its lower certificate")
    s.add_argument("--k", type=int, required=True)
    s.add_argument("--embed", help="embedding JSON {space, matrix, eta} to transfer the family")
    s.add_argument("--delta", type=float, default=1e-9)
    s.set_defaults(func=cmd_counterexample)

    s = sub.add_parser("maurey", parents=[common], help="best-of-trials Maurey average")
    s.add_argument("cloud", help='{"points", "weights"} or {"colors": [cloud, ...]}')
    s.add_argument("--k", type=int)
    s.add_argument("--trials", type=int, default=64)
    s.add_argument("--p", type=_exponent, default=2)
    s.add_argument("--tol", type=float, default=1e-9)
    s.set_defaults(func=cmd_maurey)

    s = sub.add_parser("sweep", parents=[common], help="empirical radii against the bounds")
    s.add_argument("--mode", choices=MODES, default="helly_sweep")
    s.add_argument("--p", type=_exponent)
    s.add_argument("--dim", type=int, default=10)
    s.add_argument("--k", type=_k_list, default=[1, 2, 4, 8, 16])
    s.add_argument("--instances", type=int, default=10)
    s.add_argument("--trials", type=int, default=64)
    s.add_argument("--set-size", type=int, default=2)
    s.add_argument("--tol", type=float, default=1e-6)
    s.add_argument("--bound", choices=["type", "euclidean"], default="type")
    s.add_argument("--linf-constant", type=float, default=DEFAULT_LINF_CONSTANT,
                   help="C in the l_inf type table entry C sqrt(ln n)")
    s.add_argument("--format", choices=["json", "csv"], default="csv")
    s.add_argument("--no-timing", action="store_true", help="write ms=0 for byte-identical reruns")
    s.set_defaults(func=cmd_sweep)

    s = sub.add_parser("verify", parents=[common], help="check a lower certificate against a family")
    s.add_argument("instance")
    s.add_argument("--cert", help="certificate JSON (default: the instance's 'certificate' key)")
    s.add_argument("--tol", type=float, default=1e-9)
    s.set_defaults(func=cmd_verify)
    return parser


def main(argv=None):
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else EXIT_USAGE
    try:
        return args.func(args)
    except (InputError, SchemaError, RealizationError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT

"""Command-line surface: tv, mono, helly, verify.

All input and output documents are UTF-8 JSON.  Reports are
deterministic: identical inputs, flags and seed produce identical bytes.

Exit codes:
  0  success
  1  verification failure (first counterexample serialized)
  2  malformed input or cap exceeded (message names the violated constraint)
  3  unsupported value-space operation
  4  boundedness-surrogate failure
"""

from __future__ import annotations

import argparse
import hashlib
import itertools
import json
import os
import random
import sys

from . import __version__
from .errors import (
    BoundednessError,
    CompactnessError,
    DegenerateDualsError,
    DimensionCapError,
    DocumentError,
    EmptySumError,
    EnumerationCapError,
    SpaceMismatchError,
    VhkError,
)
from .grid import (
    Grid,
    GridFunction,
    full_rectangle,
    grid_function_document,
    load_grid_function,
    save_grid_function,
)
from .oracle import brute_force_variation, verify_identity_suite
from .selection import helly_select, sequence_from_document, weak_helly_select
from .semigroup import BoxSpace, MultisetSpace, RealSpace, VectorSpace
from .variation import (
    DEFAULT_TOLERANCE,
    is_totally_monotone,
    jordan_decomposition,
    nonzero_alphas,
    total_variation,
    vitali_variation,
)

EXIT_OK = 0
EXIT_VERIFY_FAILED = 1
EXIT_BAD_INPUT = 2
EXIT_UNSUPPORTED_SPACE = 3
EXIT_UNBOUNDED = 4


def _tolerance(args) -> float:
    if getattr(args, "tolerance", None) is not None:
        return args.tolerance
    env = os.environ.get("VHK_TOLERANCE")
    if env is not None:
        try:
            return float(env)
        except ValueError:
            raise DocumentError("bad-tolerance",
                                f"VHK_TOLERANCE is not a number: {env!r}") from None
    return DEFAULT_TOLERANCE


def _digest(data: bytes) -> str:
    return "sha256:" + hashlib.sha256(data).hexdigest()


def _emit(report: dict, path: str | None):
    text = json.dumps(report, sort_keys=True, indent=2) + "\n"
    if path:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _alpha_key(alpha) -> str:
    return "".join(str(c) for c in alpha)


def _expansion_labels(report) -> dict:
    n = len(report.shape)
    if n > 3:
        return {}
    out = {}
    for alpha, value in report.per_alpha.items():
        axes = ",".join(f"x{i + 1}" for i, a in enumerate(alpha) if a)
        out[f"V{sum(alpha)}({axes})"] = value
    return out


def _read_bytes(path: str) -> bytes:
    try:
        with open(path, "rb") as fh:
            return fh.read()
    except OSError as exc:
        raise DocumentError("unreadable-input", f"cannot read {path}: {exc}") from None


def cmd_tv(args) -> int:
    raw = _read_bytes(args.input)
    f = load_grid_function(raw)
    tol = _tolerance(args)
    report = total_variation(f, tolerance=tol)
    out = {
        "command": "tv",
        "version": __version__,
        "input_digest": _digest(raw),
        "tolerance": tol,
        "results": {
            "tv": report.tv,
            "vitali_n": report.vitali_n,
            "per_alpha": {_alpha_key(a): v for a, v in report.per_alpha.items()},
            "shape": list(report.shape),
            "space": report.space_tag,
        },
    }
    expansion = _expansion_labels(report)
    if expansion:
        out["results"]["expansion"] = expansion
    _emit(out, args.json)
    return EXIT_OK


def cmd_mono(args) -> int:
    raw = _read_bytes(args.input)
    g = load_grid_function(raw)
    tol = _tolerance(args)
    verdict = is_totally_monotone(g, tolerance=tol)
    results = {"totally_monotone": verdict.is_monotone, "worst_increment": verdict.worst}
    if verdict.witness is not None:
        alpha, lo, hi = verdict.witness
        results["witness"] = {"alpha": _alpha_key(alpha),
                              "cell_lo": list(lo), "cell_hi": list(hi)}
    recheck_failed = False
    if args.decompose:
        nu, pi = jordan_decomposition(g)
        nu_path = args.decompose + ".nu.json"
        pi_path = args.decompose + ".pi.json"
        with open(nu_path, "w", encoding="utf-8") as fh:
            fh.write(save_grid_function(nu) + "\n")
        with open(pi_path, "w", encoding="utf-8") as fh:
            fh.write(save_grid_function(pi) + "\n")
        nu_back = load_grid_function(_read_bytes(nu_path))
        pi_back = load_grid_function(_read_bytes(pi_path))
        nu_ok = bool(is_totally_monotone(nu_back, tolerance=tol))
        pi_ok = bool(is_totally_monotone(pi_back, tolerance=tol))
        diff_ok = all(nv - pv == gv for nv, pv, gv
                      in zip(nu_back.values, pi_back.values, g.values))
        recheck_failed = not (nu_ok and pi_ok and diff_ok)
        results["decomposition"] = {
            "nu": nu_path, "pi": pi_path,
            "nu_totally_monotone": nu_ok,
            "pi_totally_monotone": pi_ok,
            "difference_exact": diff_ok,
        }
    out = {
        "command": "mono",
        "version": __version__,
        "input_digest": _digest(raw),
        "tolerance": tol,
        "results": results,
    }
    _emit(out, args.json)
    print(f"totally monotone: {str(verdict.is_monotone).lower()}", file=sys.stderr)
    return EXIT_VERIFY_FAILED if recheck_failed else EXIT_OK


def cmd_helly(args) -> int:
    raw = _read_bytes(args.input)
    seq, probe = sequence_from_document(raw)
    if args.probe is not None:
        probe = args.probe
    tol = _tolerance(args)
    if args.weak:
        duals_raw = _read_bytes(args.weak)
        try:
            duals_doc = json.loads(duals_raw.decode("utf-8"))
        except (UnicodeDecodeError, json.JSONDecodeError) as exc:
            raise DocumentError("bad-json", f"bad duals document: {exc}") from None
        if not isinstance(duals_doc, dict) or "duals" not in duals_doc:
            raise DocumentError("bad-document", "duals document must carry 'duals'")
        result = weak_helly_select(seq, duals_doc["duals"], args.epsilon, probe,
                                   diameter_cap=args.cap, tolerance=tol)
    else:
        result = helly_select(seq, args.epsilon, probe,
                              diameter_cap=args.cap, tolerance=tol)
    out = {
        "command": "helly",
        "version": __version__,
        "input_digest": _digest(raw),
        "tolerance": tol,
        "epsilon": args.epsilon,
        "probe": probe,
        "results": {
            "indices": list(result.indices),
            "limit": grid_function_document(result.limit),
            "sup_tv": result.sup_tv,
            "limit_tv": result.limit_tv,
            "max_residual": result.max_residual,
        },
    }
    _emit(out, args.json)
    return EXIT_OK


def _random_grid_function(rng: random.Random, space, sizes) -> GridFunction:
    axes = []
    for m in sizes:
        start = rng.randrange(-4, 5) / 4.0
        coords = [start]
        for _ in range(m - 1):
            coords.append(coords[-1] + rng.randrange(1, 9) / 8.0)
        axes.append(tuple(coords))
    grid = Grid(tuple(axes))

    def value():
        if isinstance(space, RealSpace):
            return rng.randrange(-256, 257) / 64.0
        if isinstance(space, VectorSpace):
            return tuple(rng.randrange(-256, 257) / 64.0 for _ in range(space.k))
        if isinstance(space, BoxSpace):
            out = []
            for _ in range(space.k):
                lo = rng.randrange(-128, 129) / 64.0
                out.append((lo, lo + rng.randrange(0, 129) / 64.0))
            return tuple(out)
        return tuple(sorted(rng.choice("abcd")
                            for _ in range(rng.randrange(0, 4))))

    return GridFunction(grid, space, tuple(value() for _ in grid.indices()))


def cmd_verify(args) -> int:
    if args.n_max > 6 or args.n_max < 1:
        raise DimensionCapError("dimension cap exceeded: n-max must be within 1..6")
    if args.m_max > 12 or args.m_max < 1:
        raise DocumentError("bad-m-max", "m-max must be within 1..12")

    report = verify_identity_suite(n_max=args.n_max, m_max=args.m_max,
                                   trials=args.trials, seed=args.seed)
    matrix = {family: {"passed": p, "total": t}
              for family, (p, t) in sorted(report.by_family().items())}
    counterexample = None
    for check in report.failures():
        counterexample = {"family": check.family, "instance": check.instance,
                          "detail": check.detail}
        break

    rng = random.Random(args.seed)
    spaces = [RealSpace(), VectorSpace(2, "l2"), BoxSpace(1), MultisetSpace()]
    sweep_total = 0
    sweep_passed = 0
    for space in spaces:
        for _ in range(max(2, args.trials // 8)):
            n = rng.choice((1, 2, 2, 3))
            sizes = tuple(rng.randrange(2, 5 if n < 3 else 4) for _ in range(n))
            f = _random_grid_function(rng, space, sizes)
            rect = full_rectangle(f.grid)
            base = (0,) * n
            for alpha in nonzero_alphas(n):
                engine = vitali_variation(f, alpha, base, rect)
                brute = brute_force_variation(f, alpha, base, rect, cap=args.grid_cap)
                sweep_total += 1
                if abs(engine - brute) <= 1e-12:
                    sweep_passed += 1
                elif counterexample is None:
                    counterexample = {
                        "family": "oracle-equivalence",
                        "instance": {"function": grid_function_document(f),
                                     "alpha": _alpha_key(alpha)},
                        "detail": f"engine {engine} != oracle {brute}",
                    }
    matrix["oracle-equivalence"] = {"passed": sweep_passed, "total": sweep_total}

    all_passed = report.all_passed and sweep_passed == sweep_total
    out = {
        "command": "verify",
        "version": __version__,
        "seed": args.seed,
        "n_max": args.n_max,
        "m_max": args.m_max,
        "trials": args.trials,
        "results": {"matrix": matrix, "all_passed": all_passed},
    }
    if counterexample is not None:
        out["results"]["first_counterexample"] = counterexample
    _emit(out, args.json)
    for family, cell in matrix.items():
        status = "pass" if cell["passed"] == cell["total"] else "FAIL"
        print(f"{family}: {status} ({cell['passed']}/{cell['total']})",
              file=sys.stderr)
    return EXIT_OK if all_passed else EXIT_VERIFY_FAILED


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="vhk",
        description="Total variation of grid functions valued in a metric "
                    "semigroup, and Helly-type selection extraction.")
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    p_tv = sub.add_parser("tv", help="total variation of a grid-function document")
    p_tv.add_argument("input")
    p_tv.add_argument("--tolerance", type=float, default=None)
    p_tv.add_argument("--json", default=None, help="write the report to this path")
    p_tv.set_defaults(fn=cmd_tv)

    p_mono = sub.add_parser("mono", help="total-monotonicity verdict, with "
                                         "optional Jordan decomposition")
    p_mono.add_argument("input")
    p_mono.add_argument("--tolerance", type=float, default=None)
    p_mono.add_argument("--decompose", default=None, metavar="PREFIX",
                        help="write PREFIX.nu.json and PREFIX.pi.json and re-verify")
    p_mono.add_argument("--json", default=None)
    p_mono.set_defaults(fn=cmd_mono)

    p_helly = sub.add_parser("helly", help="selection extraction on a sequence spec")
    p_helly.add_argument("input")
    p_helly.add_argument("--epsilon", type=float, default=1e-6)
    p_helly.add_argument("--probe", type=int, default=None,
                         help="override the document's probe window")
    p_helly.add_argument("--weak", default=None, metavar="DUALS_JSON",
                         help="weak extraction against this dual basis")
    p_helly.add_argument("--cap", type=float, default=1e6,
                         help="boundedness-surrogate cap")
    p_helly.add_argument("--tolerance", type=float, default=None)
    p_helly.add_argument("--json", default=None)
    p_helly.set_defaults(fn=cmd_helly)

    p_verify = sub.add_parser("verify", help="identity suite and oracle sweep")
    p_verify.add_argument("--n-max", type=int, default=3, dest="n_max")
    p_verify.add_argument("--m-max", type=int, default=8, dest="m_max")
    p_verify.add_argument("--trials", type=int, default=200)
    p_verify.add_argument("--seed", type=int, default=0)
    p_verify.add_argument("--grid-cap", type=int, default=2 ** 20, dest="grid_cap")
    p_verify.add_argument("--json", default=None)
    p_verify.set_defaults(fn=cmd_verify)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.fn(args)
    except (DocumentError, DimensionCapError, EnumerationCapError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_BAD_INPUT
    except (SpaceMismatchError, CompactnessError, EmptySumError,
            DegenerateDualsError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_UNSUPPORTED_SPACE
    except BoundednessError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_UNBOUNDED
    except VhkError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_BAD_INPUT


if __name__ == "__main__":
    sys.exit(main())

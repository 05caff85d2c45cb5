"""Command-line entry point: ``qcpd bench|decompose|certify|check-model``.

Exit codes: 0 success, 1 usage error, 2 numerical failure, 3 I/O error.
"""
from __future__ import annotations

import argparse
import math
import sys

import numpy as np

from . import __version__
from .bench import (ExperimentConfig, UsageError, aggregate, emit_plot_data, run_experiment,
                    write_results)
from .errors import QcpdError
from .io import FormatError, load_factors, load_tensor, save_factors
from .models import (certify_uniqueness, cpd_mode_products, cpd_reconstruct, cpd_slice,
                     cpd_unfolding)
from .qtensor import slice_, unfold
from .solvers import SolverConfig, cals, qals

EXIT_OK, EXIT_USAGE, EXIT_NUMERIC, EXIT_IO = 0, 1, 2, 3


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _int_list(text: str) -> tuple[int, ...]:
    try:
        vals = tuple(int(x) for x in text.split(","))
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}")
    if len(vals) != 3 or min(vals) < 1:
        raise argparse.ArgumentTypeError("dims must be three positive integers N1,N2,N3")
    return vals


def _float_list(text: str) -> tuple[float, ...]:
    try:
        vals = tuple(float(x) for x in text.split(","))
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}")
    if any(math.isnan(v) for v in vals):
        raise argparse.ArgumentTypeError("SNR values must not be NaN")
    return vals


def _str_list(text: str) -> tuple[str, ...]:
    return tuple(x for x in (s.strip() for s in text.split(",")) if x)


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="qcpd", description="Quaternion CPD toolkit")
    p.add_argument("--version", action="version", version=f"qcpd {__version__}")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    b = sub.add_parser("bench", help="Monte-Carlo SNR sweep for the Q-ALS and C-ALS solvers")
    b.add_argument("--dims", type=_int_list, default=(10, 10, 10), help="N1,N2,N3")
    b.add_argument("--rank", type=int, default=5)
    b.add_argument("--trials", type=int, default=50)
    b.add_argument("--snr", type=_float_list, default=(10.0, 20.0, 30.0, 40.0),
                   help="comma-separated SNR values in dB; 'inf' for noiseless")
    b.add_argument("--solvers", type=_str_list, default=("qals", "cals"))
    b.add_argument("--seed", type=int, default=0)
    b.add_argument("--out", required=True, help="output directory")
    b.add_argument("--max-iters", type=int, default=500)
    b.add_argument("--rel-tol", type=float, default=1e-8)
    b.add_argument("--workers", type=int, default=1)

    d = sub.add_parser("decompose", help="fit a rank-F Q-CPD to a QT1 tensor file")
    d.add_argument("input")
    d.add_argument("--rank", type=int, required=True)
    d.add_argument("--solver", choices=("qals", "cals"), default="qals")
    d.add_argument("--out", required=True, help="output QF1 factor bundle")
    d.add_argument("--seed", type=int, default=0)
    d.add_argument("--max-iters", type=int, default=500)
    d.add_argument("--rel-tol", type=float, default=1e-8)

    c = sub.add_parser("certify", help="evaluate sufficient uniqueness conditions of a QF1 bundle")
    c.add_argument("input")
    c.add_argument("--tol", type=float, default=None)
    c.add_argument("--guard", type=int, default=12)
    c.add_argument("--generic", action="store_true",
                   help="use min(rows, F) for Kruskal ranks instead of enumeration")

    m = sub.add_parser("check-model", help="reconstruct a QF1 bundle and print model residuals")
    m.add_argument("input")
    m.add_argument("--tensor", help="optional QT1 tensor to compare against")
    m.add_argument("--tol", type=float, default=1e-10,
                   help="largest acceptable internal consistency residual")
    return p


def _bench(args) -> int:
    try:
        cfg = ExperimentConfig(dims=args.dims, F=args.rank, trials=args.trials,
                               snr_list=args.snr, solvers=args.solvers, seed=args.seed,
                               max_iters=args.max_iters, rel_tol=args.rel_tol,
                               workers=args.workers)
    except UsageError as exc:
        print(f"qcpd bench: {exc}", file=sys.stderr)
        return EXIT_USAGE
    results = run_experiment(cfg)
    paths = write_results(results, args.out) + emit_plot_data(results, args.out, cfg.solvers)
    failed = sum(not r.ok for r in results)
    print(f"{len(results)} runs, {failed} failed")
    print(f"{'snr':>6} {'solver':>6} {'cost':>10} {'A dB':>8} {'B dB':>8} {'C dB':>8}")
    for a in aggregate(results):
        print(f"{a.snr:>6g} {a.solver:>6} {a.stats['cost'][0]:>10.3e} "
              + " ".join(f"{a.stats[m][0]:>8.2f}" for m in ("nmse_A", "nmse_B", "nmse_C")))
    for p in paths:
        print(f"wrote {p}")
    return EXIT_OK


def _decompose(args) -> int:
    if args.rank < 1:
        print("qcpd decompose: --rank must be >= 1", file=sys.stderr)
        return EXIT_USAGE
    T = load_tensor(args.input)
    if T.order != 3:
        print(f"qcpd decompose: expected a third-order tensor, got order {T.order}",
              file=sys.stderr)
        return EXIT_USAGE
    cfg = SolverConfig(max_iters=args.max_iters, rel_tol=args.rel_tol, seed=args.seed)
    solver = qals if args.solver == "qals" else cals
    f, trace = solver(T, args.rank, cfg)
    save_factors(args.out, f)
    print(f"solver={args.solver} rank={args.rank} iterations={trace.iterations} "
          f"converged={int(trace.converged)} cost={trace.final_cost:.6e}")
    return EXIT_OK


def _certify(args) -> int:
    f = load_factors(args.input)
    rep = certify_uniqueness(f, tol=args.tol, guard=args.guard, generic=args.generic)
    print(rep.summary())
    print()
    for line in rep.lines():
        print(line)
    return EXIT_OK


def _max_abs(x, y) -> float:
    return float(np.max(np.abs(x - y), initial=0.0))


def _check_model(args) -> int:
    f = load_factors(args.input)
    T = cpd_reconstruct(f)
    res = {}
    for mode in (1, 2, 3):
        res[f"unfold{mode}"] = _max_abs(unfold(T, mode).data, cpd_unfolding(f, mode).data)
    for axis, n in zip(("horizontal", "lateral", "frontal"), T.dims):
        res[f"slice_{axis}"] = max(_max_abs(slice_(T, axis, i).data, cpd_slice(f, axis, i).data)
                                   for i in range(n))
    res["mode_products"] = _max_abs(T.data, cpd_mode_products(f).data)
    print(f"dims={','.join(map(str, f.dims))} rank={f.rank} norm={T.norm():.6e}")
    for k, v in res.items():
        print(f"residual_{k}={v:.3e}")
    status = EXIT_OK
    if args.tensor:
        data = load_tensor(args.tensor)
        if data.dims != T.dims:
            print(f"qcpd check-model: tensor dims {data.dims} do not match factors {T.dims}",
                  file=sys.stderr)
            return EXIT_USAGE
        rel = float(np.linalg.norm((data.data - T.data).ravel()) / max(data.norm(), 1e-300))
        print(f"relative_fit_error={rel:.6e}")
    scale = max(1.0, float(np.max(np.abs(T.data))))
    if max(res.values()) > args.tol * scale:
        print("model consistency check FAILED", file=sys.stderr)
        status = EXIT_NUMERIC
    return status


_COMMANDS = {"bench": _bench, "decompose": _decompose, "certify": _certify,
             "check-model": _check_model}


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return _COMMANDS[args.command](args)
    except (FormatError, OSError) as exc:
        print(f"qcpd {args.command}: I/O error: {exc}", file=sys.stderr)
        return EXIT_IO
    except UsageError as exc:
        print(f"qcpd {args.command}: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (QcpdError, np.linalg.LinAlgError, FloatingPointError) as exc:
        print(f"qcpd {args.command}: numerical failure: {type(exc).__name__}: {exc}",
              file=sys.stderr)
        return EXIT_NUMERIC


if __name__ == "__main__":
    sys.exit(main())

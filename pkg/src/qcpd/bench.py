"""Monte-Carlo harness: synthetic Q-CPD tensors, noise sweep, dual-solver runs, CSV output.

Seeding: every random stream derives from ``numpy.random.SeedSequence`` with
entropy ``(master, trial, tag)`` for the truth factors and
``(master, trial, lo32(snr), hi32(snr), tag)`` for the noise and solver
initialisation, where ``lo32``/``hi32`` split the IEEE-754 bit pattern of
the SNR value. Results therefore do not depend on execution order or on
the number of workers.
"""
from __future__ import annotations

import csv
import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .errors import QcpdError
from .models import CpdFactors, align_factors, cpd_reconstruct
from .qmatrix import QMatrix
from .qtensor import QTensor
from .solvers import SolverConfig, cals, qals

__all__ = ["ExperimentConfig", "TrialResult", "UsageError", "synthesize_trial", "run_cell",
           "run_experiment", "aggregate", "write_results", "emit_plot_data", "SOLVERS"]

SOLVERS = {"qals": qals, "cals": cals}

_TAG_TRUTH = 0x7A11
_TAG_NOISE = 0x5EED
_TAG_INIT = 0x1717


class UsageError(ValueError):
    """Invalid experiment configuration."""


@dataclass(frozen=True)
class ExperimentConfig:
    dims: tuple = (10, 10, 10)
    F: int = 5
    trials: int = 50
    snr_list: tuple = (10.0, 20.0, 30.0, 40.0)
    solvers: tuple = ("qals", "cals")
    seed: int = 0
    max_iters: int = 500
    rel_tol: float = 1e-8
    workers: int = 1

    def __post_init__(self):
        dims = tuple(int(d) for d in self.dims)
        if len(dims) != 3 or min(dims) < 1:
            raise UsageError(f"dims must be three positive integers, got {self.dims}")
        object.__setattr__(self, "dims", dims)
        object.__setattr__(self, "snr_list", tuple(float(s) for s in self.snr_list))
        object.__setattr__(self, "solvers", tuple(self.solvers))
        if self.F < 1:
            raise UsageError("rank must be >= 1")
        if self.trials < 1:
            raise UsageError("trials must be >= 1")
        if not self.snr_list:
            raise UsageError("at least one SNR value is required")
        # +inf is accepted as the noiseless sentinel
        if any(math.isnan(s) or s == -math.inf for s in self.snr_list):
            raise UsageError("SNR values must be numbers or +inf")
        if not self.solvers:
            raise UsageError("solver set is empty")
        unknown = set(self.solvers) - set(SOLVERS)
        if unknown:
            raise UsageError(f"unknown solver(s): {sorted(unknown)}")
        if self.max_iters < 1 or not self.rel_tol > 0:
            raise UsageError("max_iters must be >= 1 and rel_tol > 0")
        if self.workers < 1:
            raise UsageError("workers must be >= 1")

    def solver_config(self, seed: int) -> SolverConfig:
        return SolverConfig(max_iters=self.max_iters, rel_tol=self.rel_tol, seed=seed)


@dataclass
class TrialResult:
    trial: int
    snr: float
    solver: str
    cost: float = math.nan
    nmse_A: float = math.nan
    nmse_B: float = math.nan
    nmse_C: float = math.nan
    iterations: int = 0
    converged: bool = False
    max_cost_increase: float = math.nan
    wall_time: float = 0.0
    error: str = ""

    @property
    def ok(self) -> bool:
        return not self.error


def _snr_words(snr: float) -> list[int]:
    bits = int(np.float64(snr).view(np.uint64))
    return [bits & 0xFFFFFFFF, bits >> 32]


def _rng(*entropy) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence([int(e) for e in entropy]))


def _init_seed(cfg: ExperimentConfig, trial: int, snr: float) -> int:
    ss = np.random.SeedSequence([cfg.seed, trial, *_snr_words(snr), _TAG_INIT])
    return int(ss.generate_state(1, dtype=np.uint64)[0])


def synthesize_trial(cfg: ExperimentConfig, trial: int, snr: float):
    """Return ``(clean, noisy, truth)`` for one Monte-Carlo cell.

    Truth factors are i.i.d. standard normal per component. The noise is
    rescaled so that ``10 log10(||T||^2 / ||N||^2)`` equals ``snr`` exactly;
    ``snr = inf`` yields ``noisy == clean``.
    """
    N1, N2, N3 = cfg.dims
    F = cfg.F
    rng = _rng(cfg.seed, trial, _TAG_TRUTH)
    truth = CpdFactors(QMatrix(rng.standard_normal((N1, F, 4))), rng.standard_normal((N2, F)),
                       QMatrix(rng.standard_normal((N3, F, 4))))
    clean = cpd_reconstruct(truth)
    if snr == math.inf:
        return clean, QTensor(clean.data.copy()), truth
    noise = _rng(cfg.seed, trial, *_snr_words(snr), _TAG_NOISE).standard_normal(clean.data.shape)
    noise *= clean.norm() / np.linalg.norm(noise) * 10.0 ** (-snr / 20.0)
    return clean, QTensor(clean.data + noise), truth


def run_cell(cfg: ExperimentConfig, trial: int, snr: float) -> list[TrialResult]:
    """Run every configured solver on one (trial, snr) cell from a shared initialisation."""
    _, noisy, truth = synthesize_trial(cfg, trial, snr)
    scfg = cfg.solver_config(_init_seed(cfg, trial, snr))
    out = []
    for name in cfg.solvers:
        res = TrialResult(trial, snr, name)
        try:
            with np.errstate(all="ignore"):
                est, trace = SOLVERS[name](noisy, cfg.F, scfg)
            _, nm = align_factors(est, truth)
            costs = np.asarray(trace.costs)
            res.cost = trace.final_cost
            res.nmse_A, res.nmse_B, res.nmse_C = nm["A"], nm["B"], nm["C"]
            res.iterations = trace.iterations
            res.converged = trace.converged
            res.max_cost_increase = float(np.max(np.diff(costs), initial=-math.inf))
            res.wall_time = trace.wall_time
        except (QcpdError, np.linalg.LinAlgError, FloatingPointError, ValueError) as exc:
            res.error = f"{type(exc).__name__}: {exc}"
        out.append(res)
    return out


def _cell(args):
    return run_cell(*args)


def run_experiment(cfg: ExperimentConfig) -> list[TrialResult]:
    """Run all (trial, snr, solver) cells; results come back in (trial, snr, solver) order."""
    tasks = [(cfg, t, s) for t in range(cfg.trials) for s in cfg.snr_list]
    if cfg.workers == 1:
        chunks = [run_cell(*t) for t in tasks]
    else:
        with ProcessPoolExecutor(max_workers=cfg.workers) as pool:
            chunks = list(pool.map(_cell, tasks))
    return [r for chunk in chunks for r in chunk]


def _db(x):
    with np.errstate(divide="ignore"):
        return 10.0 * np.log10(x)


@dataclass
class Aggregate:
    snr: float
    solver: str
    n_ok: int
    n_failed: int
    stats: dict = field(default_factory=dict)   # metric -> (median, mean, q25, q75)


METRICS = ("cost", "nmse_A", "nmse_B", "nmse_C")


def _stats(values) -> tuple:
    v = np.asarray(values, dtype=float)
    if v.size == 0:
        return (math.nan,) * 4
    q25, med, q75 = np.quantile(v, [0.25, 0.5, 0.75])
    return float(med), float(np.mean(v)), float(q25), float(q75)


def aggregate(results: list[TrialResult]) -> list[Aggregate]:
    """Per (snr, solver) statistics. Cost is linear; NMSE statistics are taken in dB.

    Sorting inside ``np.quantile`` makes the output independent of trial order.
    """
    keys = []
    for r in results:
        if (r.snr, r.solver) not in keys:
            keys.append((r.snr, r.solver))
    out = []
    for snr, solver in sorted(keys, key=lambda k: (k[0], k[1])):
        cell = [r for r in results if r.snr == snr and r.solver == solver]
        ok = [r for r in cell if r.ok]
        agg = Aggregate(snr, solver, len(ok), len(cell) - len(ok))
        agg.stats["cost"] = _stats([r.cost for r in ok])
        for m in METRICS[1:]:
            agg.stats[m] = _stats(_db([getattr(r, m) for r in ok]))
        out.append(agg)
    return out


def _fmt(x) -> str:
    if isinstance(x, bool):
        return str(int(x))
    if isinstance(x, (float, np.floating)):
        return repr(float(x))
    return str(x)


def _write_csv(path: Path, header, rows, comment: str | None = None):
    try:
        with open(path, "w", newline="") as fh:
            if comment:
                fh.write(f"# {comment}\n")
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(header)
            for row in rows:
                w.writerow([_fmt(x) for x in row])
    except OSError as exc:
        raise OSError(f"cannot write {path}: {exc.strerror or exc}") from exc


_TRIAL_COLS = ("trial", "snr", "solver", "cost", "nmse_A", "nmse_B", "nmse_C", "iterations",
               "converged", "max_cost_increase", "error")


def write_results(results: list[TrialResult], out_dir) -> list[Path]:
    """Write ``trials.csv`` and ``summary.csv`` (deterministic) plus ``timings.csv``.

    Wall-clock times live only in ``timings.csv`` so that the other files are
    byte-identical across runs with the same master seed.
    """
    out = Path(out_dir)
    _ensure_dir(out)
    paths = [out / "trials.csv", out / "summary.csv", out / "timings.csv"]
    _write_csv(paths[0], _TRIAL_COLS, ([getattr(r, c) for c in _TRIAL_COLS] for r in results))
    header = ["snr", "solver", "n_ok", "n_failed"]
    for m in METRICS:
        unit = "" if m == "cost" else "_db"
        header += [f"{m}{unit}_{s}" for s in ("median", "mean", "q25", "q75")]
    rows = [[a.snr, a.solver, a.n_ok, a.n_failed, *[x for m in METRICS for x in a.stats[m]]]
            for a in aggregate(results)]
    _write_csv(paths[1], header, rows)
    _write_csv(paths[2], ("trial", "snr", "solver", "wall_time"),
               ([r.trial, r.snr, r.solver, r.wall_time] for r in results))
    return paths


_PANELS = {
    "cost_vs_snr.csv": ("cost", "relative cost ||T - T_hat||_F / ||T||_F (linear)"),
    "nmse_A_db.csv": ("nmse_A", "NMSE of A after alignment, 10*log10(||A - A_hat||^2 / ||A||^2)"),
    "nmse_B_db.csv": ("nmse_B", "NMSE of B after alignment, 10*log10(||B - B_hat||^2 / ||B||^2)"),
    "nmse_C_db.csv": ("nmse_C", "NMSE of C after alignment, 10*log10(||C - C_hat||^2 / ||C||^2)"),
}


def _ensure_dir(out: Path):
    try:
        out.mkdir(parents=True, exist_ok=True)
    except OSError as exc:
        raise OSError(f"cannot create output directory {out}: {exc.strerror or exc}") from exc


def emit_plot_data(results: list[TrialResult], out_dir, solvers=None) -> list[Path]:
    """One CSV per panel with columns ``snr, solver, median, mean, q25, q75``.

    Each file starts with a ``#`` comment line naming the metric.
    """
    if solvers is not None and len(tuple(solvers)) == 0:
        raise UsageError("solver set is empty")
    if not results:
        raise UsageError("no results to plot")
    aggs = aggregate(results)
    if solvers is not None:
        aggs = [a for a in aggs if a.solver in set(solvers)]
    out = Path(out_dir)
    _ensure_dir(out)
    paths = []
    for fname, (metric, desc) in _PANELS.items():
        p = out / fname
        _write_csv(p, ("snr", "solver", "median", "mean", "q25", "q75"),
                   ([a.snr, a.solver, *a.stats[metric]] for a in aggs), comment=desc)
        paths.append(p)
    return paths


def default_workers() -> int:
    return max(1, min(4, os.cpu_count() or 1))

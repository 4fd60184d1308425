"""Experiment harness: deterministic grid sweeps of the demixing solver over
sparsity/rank parameters, persistence, and 50%-contour extraction."""

import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace

import numpy as np

from . import __version__
from .curves import CurvePoints
from .numerics import RngState
from .random_models import erase, haar_orthogonal, low_rank_matrix, sparse_signal
from .solvers import (
    DEFAULT_GAMMA,
    DEFAULT_MAX_ITER,
    DEFAULT_TOL,
    DemixProblem,
    GaugeSpec,
    solve_demix,
)

_KINDS = ("mca", "channel_benign", "channel_erase", "rank_sparsity")
SUCCESS_TOL = 1e-4


@dataclass(frozen=True)
class ExperimentConfig:
    """Grid sweep description. axis1/axis2 hold fractional sparsity (tau) or
    rank (rho) values in [0, 1]; axis2 is None for the 1-D channel sweeps."""

    kind: str
    dimension: int  # vector dimension d, or matrix side n for rank_sparsity
    axis1: tuple
    axis2: tuple | None
    trials: int
    master_seed: int
    gamma: float = DEFAULT_GAMMA
    max_iter: int = DEFAULT_MAX_ITER
    tol: float = DEFAULT_TOL

    def __post_init__(self):
        if self.kind not in _KINDS:
            raise ValueError(f"unknown experiment kind {self.kind!r}")
        if self.trials < 1:
            raise ValueError("trials must be >= 1")
        if self.dimension < 1:
            raise ValueError("dimension must be >= 1")
        for ax in (self.axis1, self.axis2):
            if ax is not None and any(not 0.0 <= t <= 1.0 for t in ax):
                raise ValueError("grid values must lie in [0, 1]")
        needs_2d = self.kind in ("mca", "rank_sparsity")
        if needs_2d and self.axis2 is None:
            raise ValueError(f"{self.kind} needs a two-axis grid")
        if not needs_2d and self.axis2 is not None:
            raise ValueError(f"{self.kind} is a one-axis sweep")


@dataclass(frozen=True)
class SuccessGrid:
    axis1_label: str
    axis2_label: str
    axis1: tuple
    axis2: tuple  # single placeholder value for 1-D sweeps
    trials: np.ndarray = field(repr=False)
    successes: np.ndarray = field(repr=False)
    nonconverged: np.ndarray = field(repr=False)
    metadata: dict = field(default_factory=dict)

    def __post_init__(self):
        shape = (len(self.axis1), len(self.axis2))
        for name in ("trials", "successes", "nonconverged"):
            arr = np.asarray(getattr(self, name), dtype=int)
            if arr.shape != shape:
                raise ValueError(f"{name} must have shape {shape}, got {arr.shape}")
            object.__setattr__(self, name, arr)
        if np.any(self.successes > self.trials) or np.any(self.successes < 0):
            raise ValueError("successes must lie in [0, trials] per cell")

    @property
    def prob(self) -> np.ndarray:
        return self.successes / np.maximum(self.trials, 1)

    def to_csv(self, path) -> None:
        with open(path, "w", newline="\n") as fh:
            for key in sorted(self.metadata):
                fh.write(f"# {key}={self.metadata[key]}\n")
            fh.write(f"# axis1_label={self.axis1_label}\n")
            fh.write(f"# axis2_label={self.axis2_label}\n")
            fh.write("axis1,axis2,trials,successes,prob,nonconverged\n")
            for i, a in enumerate(self.axis1):
                for j, b in enumerate(self.axis2):
                    fh.write(f"{a!r},{b!r},{self.trials[i, j]},{self.successes[i, j]},"
                             f"{self.prob[i, j]!r},{self.nonconverged[i, j]}\n")

    @classmethod
    def from_csv(cls, path) -> "SuccessGrid":
        meta, rows = {}, []
        with open(path) as fh:
            for line in fh:
                line = line.strip()
                if line.startswith("#"):
                    key, _, val = line[1:].strip().partition("=")
                    meta[key] = val
                elif line and not line.startswith("axis1,"):
                    a, b, t, s, _, nc = line.split(",")
                    rows.append((float(a), float(b), int(t), int(s), int(nc)))
        axis1 = tuple(sorted({r[0] for r in rows}))
        axis2 = tuple(sorted({r[1] for r in rows}))
        i_of = {a: i for i, a in enumerate(axis1)}
        j_of = {b: j for j, b in enumerate(axis2)}
        shape = (len(axis1), len(axis2))
        trials = np.zeros(shape, dtype=int)
        succ = np.zeros(shape, dtype=int)
        nconv = np.zeros(shape, dtype=int)
        for a, b, t, s, nc in rows:
            trials[i_of[a], j_of[b]] = t
            succ[i_of[a], j_of[b]] = s
            nconv[i_of[a], j_of[b]] = nc
        return cls(meta.pop("axis1_label", "axis1"), meta.pop("axis2_label", "axis2"),
                   axis1, axis2, trials, succ, nconv, meta)


def _solve_trial(cfg: ExperimentConfig, i: int, j: int, trial: int) -> tuple[bool, bool]:
    """One solver trial for grid cell (i, j). Returns (success, converged)."""
    rng = RngState(cfg.master_seed).child(cfg.kind, i, j, trial)
    if cfg.kind == "mca":
        d = cfg.dimension
        kx = round(cfg.axis1[i] * d)
        ky = round(cfg.axis2[j] * d)
        x0 = sparse_signal(d, kx, rng.child("x"))
        y0 = sparse_signal(d, ky, rng.child("y"))
        Q = haar_orthogonal(d, rng.child("Q"))
        z0 = x0 + Q @ y0
        prob = DemixProblem(z0, Q, GaugeSpec("l1", d), GaugeSpec("l1", d),
                            float(np.sum(np.abs(y0))))
        target = x0
    elif cfg.kind in ("channel_benign", "channel_erase"):
        d = cfg.dimension
        k = round(cfg.axis1[i] * d)
        Q = haar_orthogonal(d, rng.child("Q"))
        m0 = rng.child("m").generator().choice([-1.0, 1.0], size=d)
        if cfg.kind == "channel_benign":
            c0 = sparse_signal(d, k, rng.child("c"))
            z0 = Q @ m0 + c0
        else:
            z0 = erase(Q @ m0, k)
        prob = DemixProblem(z0, Q, GaugeSpec("l1", d), GaugeSpec("linf", d), 1.0)
        target = None  # success judged on the recovered message
        truth_m = m0
    else:  # rank_sparsity
        n = cfg.dimension
        d = n * n
        r = round(cfg.axis1[i] * n)
        k = round(cfg.axis2[j] * d)
        X0 = low_rank_matrix(n, r, rng.child("X"))
        y0 = sparse_signal(d, k, rng.child("Y"))
        Q = haar_orthogonal(d, rng.child("Q"))
        x0 = np.ascontiguousarray(X0.reshape(-1, order="F"))
        z0 = x0 + Q @ y0
        prob = DemixProblem(z0, Q, GaugeSpec("schatten1", n), GaugeSpec("l1", d),
                            float(np.sum(np.abs(y0))))
        target = x0
    rep = solve_demix(prob, gamma=cfg.gamma, max_iter=cfg.max_iter, tol=cfg.tol)
    if target is None:
        err = float(np.max(np.abs(rep.y_star - truth_m)))
    else:
        err = float(np.max(np.abs(rep.x_star - target)))
    return err < SUCCESS_TOL and rep.converged, rep.converged


def _run(cfg: ExperimentConfig, threads: int) -> SuccessGrid:
    axis2 = cfg.axis2 if cfg.axis2 is not None else (0.0,)
    shape = (len(cfg.axis1), len(axis2))
    trials = np.full(shape, cfg.trials, dtype=int)
    succ = np.zeros(shape, dtype=int)
    nconv = np.zeros(shape, dtype=int)
    jobs = [(i, j, t) for i in range(shape[0]) for j in range(shape[1])
            for t in range(cfg.trials)]
    t0 = time.time()

    def work(job):
        i, j, t = job
        return i, j, _solve_trial(cfg, i, j, t)

    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            results = list(pool.map(work, jobs))
    else:
        results = [work(job) for job in jobs]
    # aggregation is commutative integer addition, so scheduling cannot matter
    for i, j, (ok, conv) in results:
        succ[i, j] += ok
        nconv[i, j] += not conv
    meta = {
        "kind": cfg.kind, "dimension": cfg.dimension, "trials": cfg.trials,
        "master_seed": cfg.master_seed, "gamma": cfg.gamma,
        "max_iter": cfg.max_iter, "tol": cfg.tol,
        "version": __version__, "wall_time_s": round(time.time() - t0, 3),
        "nonconverged_total": int(nconv.sum()),
    }
    labels = {
        "mca": ("tau_x", "tau_y"),
        "channel_benign": ("tau", "none"),
        "channel_erase": ("tau", "none"),
        "rank_sparsity": ("rho", "tau"),
    }[cfg.kind]
    return SuccessGrid(labels[0], labels[1], tuple(cfg.axis1), tuple(axis2),
                       trials, succ, nconv, meta)


def run_mca(cfg: ExperimentConfig, threads: int = 1) -> SuccessGrid:
    if cfg.kind != "mca":
        raise ValueError("config kind must be mca")
    return _run(cfg, threads)


def run_channel(cfg: ExperimentConfig, threads: int = 1) -> SuccessGrid:
    if cfg.kind not in ("channel_benign", "channel_erase"):
        raise ValueError("config kind must be channel_benign or channel_erase")
    return _run(cfg, threads)


def run_rank_sparsity(cfg: ExperimentConfig, threads: int = 1) -> SuccessGrid:
    if cfg.kind != "rank_sparsity":
        raise ValueError("config kind must be rank_sparsity")
    return _run(cfg, threads)


def extract_contour(grid: SuccessGrid, level: float) -> CurvePoints:
    """Empirical level contour: per primary-axis column, linear interpolation
    of the success probability along the secondary axis; columns that never
    cross are omitted, multiple crossings report the outermost (largest
    secondary coordinate) and are flagged in grid-independent metadata via
    extract_contour_details."""
    pts, _ = extract_contour_details(grid, level)
    return CurvePoints(grid.axis1_label, grid.axis2_label, tuple(pts), "weak")


def extract_contour_details(grid: SuccessGrid, level: float):
    if not 0.0 < level < 1.0:
        raise ValueError("level must lie in (0, 1)")
    if len(grid.axis2) < 2:
        raise ValueError("contour extraction needs a two-axis grid")
    prob = grid.prob
    pts, multi = [], []
    for i, a in enumerate(grid.axis1):
        crossings = []
        for j in range(len(grid.axis2) - 1):
            p0, p1 = prob[i, j], prob[i, j + 1]
            if (p0 - level) * (p1 - level) <= 0.0 and p0 != p1:
                frac = (level - p0) / (p1 - p0)
                if 0.0 <= frac <= 1.0:
                    b0, b1 = grid.axis2[j], grid.axis2[j + 1]
                    crossings.append(b0 + frac * (b1 - b0))
        if crossings:
            pts.append((float(a), float(max(crossings))))
            if len(set(round(c, 12) for c in crossings)) > 1:
                multi.append(float(a))
    return pts, multi


def crossing_point(grid: SuccessGrid, level: float) -> float | None:
    """Interpolated level crossing of a 1-D sweep (probability decreasing in
    the axis); outermost crossing if several."""
    if not 0.0 < level < 1.0:
        raise ValueError("level must lie in (0, 1)")
    p = grid.prob[:, 0]
    best = None
    for i in range(len(grid.axis1) - 1):
        p0, p1 = p[i], p[i + 1]
        if (p0 - level) * (p1 - level) <= 0.0 and p0 != p1:
            frac = (level - p0) / (p1 - p0)
            if 0.0 <= frac <= 1.0:
                a0, a1 = grid.axis1[i], grid.axis1[i + 1]
                best = a0 + frac * (a1 - a0)
    return best

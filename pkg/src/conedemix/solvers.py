"""Gauge proximal operators, the Douglas-Rachford demixing solver, and a
dense simplex LP front end."""

import json
import math
from dataclasses import dataclass

import numpy as np

from . import kernels

_KIND_CODES = {
    "l1": kernels.GAUGE_L1,
    "linf": kernels.GAUGE_LINF,
    "schatten1": kernels.GAUGE_S1,
    "operator": kernels.GAUGE_OP,
}
_MATRIX_KINDS = ("schatten1", "operator")

DEFAULT_GAMMA = 1.0
DEFAULT_MAX_ITER = 50_000
DEFAULT_TOL = 1e-8


@dataclass(frozen=True)
class GaugeSpec:
    """A gauge together with its ambient shape.

    kind: "l1" | "linf" | "schatten1" | "operator".
    shape: vector dimension for the vector gauges, matrix side for the matrix
    gauges (acting on column-major vectorized n x n matrices).
    """

    kind: str
    shape: int

    def __post_init__(self):
        if self.kind not in _KIND_CODES:
            raise ValueError(f"unknown gauge kind {self.kind!r}")
        if self.shape < 1:
            raise ValueError("shape must be >= 1")

    @property
    def code(self) -> int:
        return _KIND_CODES[self.kind]

    @property
    def is_matrix(self) -> bool:
        return self.kind in _MATRIX_KINDS

    @property
    def ambient_dim(self) -> int:
        return self.shape * self.shape if self.is_matrix else self.shape

    @property
    def nside(self) -> int:
        return self.shape if self.is_matrix else 0


def gauge_value(spec: GaugeSpec, v: np.ndarray) -> float:
    """Evaluate the gauge on a (vectorized) point."""
    v = np.asarray(v, dtype=float)
    if v.shape != (spec.ambient_dim,):
        raise ValueError(f"expected shape ({spec.ambient_dim},), got {v.shape}")
    if spec.kind == "l1":
        return float(np.sum(np.abs(v)))
    if spec.kind == "linf":
        return float(np.max(np.abs(v))) if v.size else 0.0
    M = v.reshape(spec.shape, spec.shape, order="F")
    s = np.linalg.svd(M, compute_uv=False)
    return float(np.sum(s)) if spec.kind == "schatten1" else float(s[0])


@dataclass(frozen=True)
class DemixProblem:
    """Constrained demixing instance: minimize objective(x) subject to
    constraint(y) <= alpha and x + Q y = z0."""

    z0: np.ndarray
    Q: np.ndarray
    objective: GaugeSpec
    constraint: GaugeSpec
    alpha: float
    truth_x0: np.ndarray | None = None
    truth_y0: np.ndarray | None = None

    def __post_init__(self):
        z0 = np.ascontiguousarray(self.z0, dtype=float)
        Q = np.ascontiguousarray(self.Q, dtype=float)
        d = z0.size
        if self.objective.ambient_dim != d or self.constraint.ambient_dim != d:
            raise ValueError("gauge shapes must match the observation dimension")
        if Q.shape != (d, d):
            raise ValueError(f"Q must be {d}x{d}, got {Q.shape}")
        if np.max(np.abs(Q.T @ Q - np.eye(d))) > 1e-8:
            raise ValueError("Q must be orthogonal")
        if self.alpha < 0:
            raise ValueError("alpha must be >= 0")
        object.__setattr__(self, "z0", z0)
        object.__setattr__(self, "Q", Q)
        if self.truth_x0 is not None and self.truth_y0 is not None:
            x0 = np.asarray(self.truth_x0, dtype=float)
            y0 = np.asarray(self.truth_y0, dtype=float)
            if np.max(np.abs(x0 + Q @ y0 - z0)) > 1e-12 * max(1.0, np.max(np.abs(z0))):
                raise ValueError("truth does not satisfy z0 = x0 + Q y0")
            gy = gauge_value(self.constraint, y0)
            if abs(gy - self.alpha) > 1e-9 * max(1.0, gy):
                raise ValueError(f"alpha={self.alpha} differs from constraint gauge of y0={gy}")
            object.__setattr__(self, "truth_x0", x0)
            object.__setattr__(self, "truth_y0", y0)


@dataclass(frozen=True)
class SolveReport:
    x_star: np.ndarray
    y_star: np.ndarray
    iterations: int
    residual: float
    converged: bool

    def to_json(self) -> str:
        return json.dumps({
            "x_star": self.x_star.tolist(),
            "y_star": self.y_star.tolist(),
            "iterations": self.iterations,
            "residual": self.residual,
            "converged": self.converged,
        })

    @classmethod
    def from_json(cls, text: str) -> "SolveReport":
        obj = json.loads(text)
        return cls(np.asarray(obj["x_star"], dtype=float),
                   np.asarray(obj["y_star"], dtype=float),
                   int(obj["iterations"]), float(obj["residual"]),
                   bool(obj["converged"]))


def prox_l1(v: np.ndarray, t: float) -> np.ndarray:
    """Componentwise soft threshold."""
    if t < 0:
        raise ValueError("t must be >= 0")
    return kernels.soft_threshold(np.ascontiguousarray(v, dtype=float), t)


def project_ball(spec: GaugeSpec, v: np.ndarray, alpha: float) -> np.ndarray:
    """Euclidean projection onto the alpha-sublevel set of the gauge."""
    if alpha < 0:
        raise ValueError("alpha must be >= 0")
    v = np.ascontiguousarray(v, dtype=float)
    if v.shape != (spec.ambient_dim,):
        raise ValueError(f"expected shape ({spec.ambient_dim},), got {v.shape}")
    return kernels.project_ball_kernel(v, alpha, spec.code, spec.nside)


def prox_schatten1(M: np.ndarray, t: float) -> np.ndarray:
    """Singular-value soft thresholding."""
    if t < 0:
        raise ValueError("t must be >= 0")
    M = np.asarray(M, dtype=float)
    if M.ndim != 2 or M.shape[0] != M.shape[1]:
        raise ValueError("M must be square")
    n = M.shape[0]
    v = np.ascontiguousarray(M.reshape(-1, order="F"))
    p = kernels.prox_gauge_kernel(v, t, kernels.GAUGE_S1, n)
    return p.reshape(n, n, order="F")


def solve_demix(p: DemixProblem, gamma: float = DEFAULT_GAMMA,
                max_iter: int = DEFAULT_MAX_ITER, tol: float = DEFAULT_TOL) -> SolveReport:
    """Douglas-Rachford splitting on the demixing program after eliminating y.

    F1(x) = objective gauge; F2(x) = indicator of the set where
    constraint_gauge(Q^T (z0 - x)) <= alpha. The returned pair is exactly
    feasible by construction. Non-convergence returns the best iterate with
    converged=False.
    """
    if gamma <= 0:
        raise ValueError("gamma must be > 0")
    if max_iter < 1:
        raise ValueError("max_iter must be >= 1")
    nside = max(p.objective.nside, p.constraint.nside)
    x, y, it, resid, conv = kernels.dr_demix(
        p.z0, p.Q, p.objective.code, p.constraint.code, float(p.alpha),
        float(gamma), int(max_iter), float(tol), nside)
    return SolveReport(x, y, it, float(resid), bool(conv))


def simplex_lp(c: np.ndarray, A: np.ndarray, b: np.ndarray,
               bounds=None) -> tuple[str, np.ndarray | None, float | None]:
    """min c @ x s.t. A x <= b, lo <= x <= hi.

    bounds is a per-variable list of (lo, hi); lo must be finite (default 0),
    hi may be inf. Returns (status, x, objective) with status one of
    "optimal", "infeasible", "unbounded". Cycling-cap exhaustion raises.
    """
    c = np.ascontiguousarray(c, dtype=float)
    A = np.ascontiguousarray(A, dtype=float)
    b = np.ascontiguousarray(b, dtype=float)
    n = c.size
    if A.ndim != 2 or A.shape != (b.size, n):
        raise ValueError(f"shape mismatch: c {c.shape}, A {A.shape}, b {b.shape}")
    if A.shape[0] > 500:
        raise ValueError("dense simplex limited to 500 constraints")
    if bounds is None:
        bounds = [(0.0, math.inf)] * n
    if len(bounds) != n:
        raise ValueError("bounds must have one (lo, hi) pair per variable")
    lo = np.array([bd[0] for bd in bounds], dtype=float)
    hi = np.array([bd[1] for bd in bounds], dtype=float)
    if not np.all(np.isfinite(lo)):
        raise ValueError("lower bounds must be finite")
    if np.any(hi < lo):
        return "infeasible", None, None
    # shift w = x - lo >= 0; finite upper bounds become extra rows
    b_shift = b - A @ lo
    extra_idx = np.nonzero(np.isfinite(hi))[0]
    rows = [A]
    rhs = [b_shift]
    for i in extra_idx:
        e = np.zeros(n)
        e[i] = 1.0
        rows.append(e[np.newaxis, :])
        rhs.append(np.array([hi[i] - lo[i]]))
    A_full = np.ascontiguousarray(np.vstack(rows))
    b_full = np.ascontiguousarray(np.concatenate(rhs))
    m = A_full.shape[0]
    status, w, obj = kernels.simplex_standard(c, A_full, b_full, 200 * (m + n + 1))
    if status == 3:
        raise RuntimeError("simplex iteration cap exceeded")
    if status == 1:
        return "infeasible", None, None
    if status == 2:
        return "unbounded", None, None
    x = w + lo
    return "optimal", x, float(obj + c @ lo)

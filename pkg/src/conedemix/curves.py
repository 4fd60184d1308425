"""Phase-transition curves and application threshold constants for the five
demixing scenarios (weak and strong bounds)."""

import json
from dataclasses import dataclass, field

import numpy as np

from .numerics import bisect
from .thresholds import (
    face_count_exponent,
    kappa_l1,
    theta_l1,
    theta_operator,
    theta_orthant,
    theta_schatten1,
)

_TAU_MIN = 1e-4
_TAU_MAX = 1.0 - 1e-4
DEFAULT_GRID_POINTS = 200


@dataclass(frozen=True)
class CurvePoints:
    """Level-set curve in the unit square, ordered along the primary axis."""

    x_label: str
    y_label: str
    points: tuple
    kind: str  # "weak" | "strong"

    def __post_init__(self):
        if self.kind not in ("weak", "strong"):
            raise ValueError(f"kind must be weak or strong, got {self.kind!r}")
        for x, y in self.points:
            if not (0.0 <= x <= 1.0 and 0.0 <= y <= 1.0):
                raise ValueError(f"curve point ({x}, {y}) outside the unit square")
        xs = [p[0] for p in self.points]
        if xs != sorted(xs):
            raise ValueError("points must be ordered along the primary axis")

    def to_csv(self, path, sidecar: dict | None = None) -> None:
        with open(path, "w", newline="\n") as fh:
            fh.write(f"# x={self.x_label} y={self.y_label} kind={self.kind}\n")
            fh.write("x,y,kind\n")
            for x, y in self.points:
                fh.write(f"{x!r},{y!r},{self.kind}\n")
        if sidecar is not None:
            with open(str(path) + ".json", "w") as fh:
                json.dump(sidecar, fh, indent=2, sort_keys=True)
                fh.write("\n")


def invert_threshold(f, target: float, lo: float = _TAU_MIN, hi: float = _TAU_MAX,
                     tol: float = 1e-6) -> tuple[float, bool]:
    """Level-set inversion of a nondecreasing threshold function by bisection.

    Returns (root, in_range). Out-of-range targets clamp to the nearer
    boundary with in_range=False.
    """
    flo, fhi = f(lo), f(hi)
    if target <= flo:
        return lo, target == flo
    if target >= fhi:
        return hi, target == fhi
    return bisect(lambda t: f(t) - target, lo, hi, tol=tol), True


def mca_weak_curve(grid=None) -> CurvePoints:
    """Level set theta_l1(tau_x) + theta_l1(tau_y) = 1: below it, sparse-sparse
    demixing succeeds with overwhelming probability; above it, it fails."""
    if grid is None:
        grid = np.linspace(0.005, 0.6, DEFAULT_GRID_POINTS)
    pts = []
    for tau_x in grid:
        if not _TAU_MIN <= tau_x <= _TAU_MAX:
            continue
        tx = theta_l1(tau_x)
        if tx >= 1.0:
            continue
        tau_y, ok = invert_threshold(lambda t: theta_l1(t), 1.0 - tx)
        if ok:
            pts.append((float(tau_x), float(tau_y)))
    return CurvePoints("tau_x", "tau_y", tuple(pts), "weak")


def mca_strong_curve(grid=None) -> CurvePoints:
    """Level set of the uniform-over-all-pairs guarantee: the level-psi sum
    equals one with psi = E(tau_x) + E(tau_y) counting the sign/support
    patterns on both sides. The level depends on the unknown, so the outer
    solve is a nested bisection in tau_y."""
    if grid is None:
        grid = np.linspace(0.001, 0.04, 80)
    pts = []
    for tau_x in grid:
        if not _TAU_MIN <= tau_x <= _TAU_MAX:
            continue

        def excess(tau_y, tau_x=tau_x):
            psi = face_count_exponent(tau_x) + face_count_exponent(tau_y)
            return theta_l1(tau_x, psi) + theta_l1(tau_y, psi) - 1.0

        lo, hi = _TAU_MIN, 0.5
        if excess(lo) >= 0.0:
            continue  # no feasible tau_y at this tau_x
        if excess(hi) <= 0.0:
            hi = _TAU_MAX
        pts.append((float(tau_x), float(bisect(lambda t: excess(t), lo, hi, tol=1e-5))))
    return CurvePoints("tau_x", "tau_y", tuple(pts), "strong")


def channel_weak_threshold() -> float:
    """Largest corruption sparsity with theta_l1(tau) < 1/2: benign-corruption
    decoding transition."""
    tau, _ = invert_threshold(lambda t: theta_l1(t), 0.5)
    return tau


def channel_strong_threshold() -> float:
    """Largest tau with theta_orthant(E(tau)) + theta_l1(tau, E(tau)) < 1:
    decoding succeeds for every tau-sparse corruption."""

    def excess(tau):
        psi = face_count_exponent(tau)
        return theta_orthant(psi) + theta_l1(tau, psi) - 1.0

    return bisect(excess, 1e-4, 0.1, tol=1e-7)


def rank_sparsity_curve(grid=None) -> CurvePoints:
    """Level set theta_l1(tau) + theta_s1(rho) = 1 with the width-derived
    Schatten bound 6 rho - 3 rho^2 (conservative relative to the sharp
    implicit-width curve)."""
    if grid is None:
        grid = np.linspace(0.0, 0.18, DEFAULT_GRID_POINTS)
    pts = []
    for rho in grid:
        ts = theta_schatten1(rho)
        if ts >= 1.0:
            continue
        tau, ok = invert_threshold(lambda t: theta_l1(t), 1.0 - ts)
        if ok:
            pts.append((float(rho), float(tau)))
    return CurvePoints("rho", "tau", tuple(pts), "weak")


def matrix_demix_bounds() -> dict:
    """Threshold constants for the assorted matrix demixing pairs."""
    orth_sparse_tau, _ = invert_threshold(lambda t: theta_l1(t), 1.0 - theta_operator())
    lowrank_sign_rho = bisect(lambda r: theta_schatten1(r) - 0.5, 0.0, 0.5, tol=1e-9)
    lowrank_orth_rho = bisect(lambda r: theta_schatten1(r) - (1.0 - theta_operator()),
                              0.0, 0.5, tol=1e-9)
    return {
        "orth_sparse_tau": orth_sparse_tau,
        "lowrank_sign_rho": lowrank_sign_rho,
        "lowrank_orth_rho": lowrank_orth_rho,
    }

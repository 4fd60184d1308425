"""Dense linear algebra, special functions, root finding, and reproducible RNG."""

import math
from dataclasses import dataclass, field
from typing import Callable, NamedTuple

import numpy as np
import scipy.special

from . import kernels


class SvdResult(NamedTuple):
    U: np.ndarray
    singular_values: np.ndarray
    V: np.ndarray


@dataclass(frozen=True)
class RngState:
    """Splittable RNG state: children derived from (seed, label path) are
    reproducible and mutually independent, so parallel trials match serial runs.

    Backed by a counter-based Philox generator keyed through numpy's
    SeedSequence spawn mechanism.
    """

    seed: int
    path: tuple = field(default_factory=tuple)

    def child(self, *labels) -> "RngState":
        coded = tuple(_code_label(x) for x in labels)
        return RngState(self.seed, self.path + coded)

    def generator(self) -> np.random.Generator:
        ss = np.random.SeedSequence(entropy=self.seed, spawn_key=self.path)
        return np.random.Generator(np.random.Philox(ss))


def _code_label(label) -> int:
    if isinstance(label, (int, np.integer)):
        return int(label)
    if isinstance(label, str):
        # stable across runs and platforms, unlike hash()
        import zlib
        return zlib.crc32(label.encode())
    raise TypeError(f"labels must be int or str, got {type(label).__name__}")


def qr_decompose(M: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Householder QR of a square matrix. Returns (Q, R) with Q orthogonal and
    R upper triangular such that Q @ R = M."""
    M = np.asarray(M, dtype=float)
    if M.ndim != 2 or M.shape[0] != M.shape[1]:
        raise ValueError(f"qr_decompose requires a square matrix, got shape {M.shape}")
    if not np.all(np.isfinite(M)):
        raise ValueError("qr_decompose requires finite entries")
    Q, R = np.linalg.qr(M)
    return Q, R


def svd(M: np.ndarray) -> SvdResult:
    """Full SVD with singular values sorted descending."""
    M = np.asarray(M, dtype=float)
    if M.ndim != 2:
        raise ValueError("svd requires a matrix")
    if not np.all(np.isfinite(M)):
        raise ValueError("svd requires finite entries")
    U, s, Vt = np.linalg.svd(M)
    return SvdResult(U, s, Vt.T)


def nnls(A: np.ndarray, b: np.ndarray, max_iter: int | None = None) -> np.ndarray:
    """Nonnegative least squares min ||A x - b||_2 s.t. x >= 0 (Lawson-Hanson).

    Raises on iteration-cap exhaustion only implicitly: the cap is generous
    (50 * cols by default) and the best iterate is returned with a warning flag
    via nnls_with_status.
    """
    x, _ = nnls_with_status(A, b, max_iter)
    return x


def nnls_with_status(A: np.ndarray, b: np.ndarray, max_iter: int | None = None):
    A = np.ascontiguousarray(A, dtype=float)
    b = np.ascontiguousarray(b, dtype=float)
    if max_iter is None:
        max_iter = 50 * max(A.shape[1], 1)
    return kernels.nnls(A, b, max_iter)


def bisect(f: Callable[[float], float], lo: float, hi: float, tol: float = 1e-12) -> float:
    """Bisection root of f on [lo, hi]. Requires a sign change (or a zero
    endpoint); the bracket halves each step until its width is below tol."""
    flo = f(lo)
    if flo == 0.0:
        return lo
    fhi = f(hi)
    if fhi == 0.0:
        return hi
    if flo * fhi > 0:
        raise ValueError(f"no sign change on [{lo}, {hi}]: f(lo)={flo}, f(hi)={fhi}")
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        fmid = f(mid)
        if fmid == 0.0:
            return mid
        if flo * fmid < 0:
            hi = mid
        else:
            lo, flo = mid, fmid
    return 0.5 * (lo + hi)


def erf(x: float) -> float:
    return math.erf(x)


def erfcx(x: float) -> float:
    """Scaled complementary error function exp(x^2) * erfc(x)."""
    return float(scipy.special.erfcx(x))

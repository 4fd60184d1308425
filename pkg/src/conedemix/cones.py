"""Polyhedral cones: projections, intrinsic volumes, kinematic formula,
intersection oracle, and Gaussian width estimation."""

import math
from dataclasses import dataclass, field

import numpy as np

from . import kernels
from .numerics import RngState
from .random_models import SparsityPattern

_FACE_TOL = 1e-8
_NNLS_CAP = 2000


@dataclass(frozen=True)
class PolyhedralCone:
    """Halfspace representation {v : A v <= 0}. Zero rows means full space."""

    dim: int
    A: np.ndarray
    label: str = ""

    def __post_init__(self):
        A = np.asarray(self.A, dtype=float)
        if A.size == 0:
            A = A.reshape(0, self.dim)
        if A.ndim != 2 or A.shape[1] != self.dim:
            raise ValueError(f"constraint matrix shape {A.shape} incompatible with dim {self.dim}")
        if not np.all(np.isfinite(A)):
            raise ValueError("constraint rows must be finite")
        object.__setattr__(self, "A", np.ascontiguousarray(A))

    @property
    def n_halfspaces(self) -> int:
        return self.A.shape[0]

    def contains(self, v: np.ndarray, tol: float = 1e-9) -> bool:
        if self.n_halfspaces == 0:
            return True
        return bool(np.all(self.A @ v <= tol))


@dataclass(frozen=True)
class IntrinsicVolumeProfile:
    """values[j] is v_{j-1}, j = 0..d; nonnegative and summing to one."""

    d: int
    values: np.ndarray = field(repr=False)

    def __post_init__(self):
        v = np.asarray(self.values, dtype=float)
        if v.shape != (self.d + 1,):
            raise ValueError(f"profile for d={self.d} needs {self.d + 1} entries, got {v.shape}")
        if np.any(v < 0):
            raise ValueError("intrinsic volumes must be nonnegative")
        if abs(v.sum() - 1.0) > 1e-9:
            raise ValueError(f"intrinsic volumes must sum to 1, got {v.sum()}")
        object.__setattr__(self, "values", v)

    def volume(self, i: int) -> float:
        """v_i for i in -1..d-1."""
        return float(self.values[i + 1])

    def is_subspace_profile(self, tol: float = 1e-12) -> int | None:
        """If the profile is a one-hot vector (a subspace of dimension n has
        v_{n-1} = 1), return n; otherwise None."""
        hot = np.nonzero(self.values > tol)[0]
        if hot.size == 1 and abs(self.values[hot[0]] - 1.0) <= tol:
            return int(hot[0])
        return None

    def to_csv(self, path) -> None:
        with open(path, "w", newline="\n") as fh:
            fh.write("index_i,v_i\n")
            for j, v in enumerate(self.values):
                fh.write(f"{j - 1},{float(v)!r}\n")

    @classmethod
    def from_csv(cls, path) -> "IntrinsicVolumeProfile":
        rows = []
        with open(path) as fh:
            header = fh.readline().strip()
            if header != "index_i,v_i":
                raise ValueError(f"unexpected header {header!r}")
            for line in fh:
                i_s, v_s = line.strip().split(",")
                rows.append((int(i_s), float(v_s)))
        d = max(i for i, _ in rows) + 1
        vals = np.zeros(d + 1)
        for i, v in rows:
            vals[i + 1] = v
        return cls(d, vals)


def l1_descent_cone(pattern: SparsityPattern) -> PolyhedralCone:
    """Descent cone of the l1 norm at a sparse sign vector.

    One halfspace per sign assignment on the support complement: the descent
    inequality <sgn(x0)|_S, delta_S> + ||delta_{S^c}||_1 <= 0 expands into
    2^(d-k) linear rows.
    """
    d, k = pattern.dim, pattern.k
    if k < 1:
        raise ValueError("support must be nonempty")
    comp = [i for i in range(d) if i not in set(pattern.support)]
    if len(comp) > 20:
        raise ValueError(f"support complement of size {len(comp)} too large (2^m halfspaces)")
    base = np.zeros(d)
    for i, s in zip(pattern.support, pattern.signs):
        base[i] = s
    m = len(comp)
    rows = np.tile(base, (2 ** m, 1))
    for bit, i in enumerate(comp):
        for r in range(2 ** m):
            rows[r, i] = 1.0 if (r >> bit) & 1 else -1.0
    return PolyhedralCone(d, rows, label=f"l1-descent(d={d},k={k})")


def orthant_cone(d: int) -> PolyhedralCone:
    if d < 1:
        raise ValueError("d must be >= 1")
    return PolyhedralCone(d, -np.eye(d), label=f"orthant(d={d})")


def linf_descent_cone(m0: np.ndarray) -> PolyhedralCone:
    """Descent cone of the l-infinity norm at a sign vector: sign-flipped orthant."""
    m0 = np.asarray(m0, dtype=float)
    if not np.all(np.abs(m0) == 1.0):
        raise ValueError("m0 must have entries +-1")
    return PolyhedralCone(m0.size, np.diag(m0), label=f"linf-descent(d={m0.size})")


def project_cone(K: PolyhedralCone, omega: np.ndarray) -> np.ndarray:
    """Euclidean projection onto K via Moreau decomposition and NNLS."""
    omega = np.ascontiguousarray(omega, dtype=float)
    if not np.all(np.isfinite(omega)):
        raise ValueError("omega must be finite")
    if K.n_halfspaces == 0:
        return omega.copy()
    p, ok = kernels.project_polyhedral(K.A, omega, _NNLS_CAP)
    if not ok:
        raise RuntimeError("NNLS iteration cap exceeded in cone projection")
    return p


def face_dimension(K: PolyhedralCone, p: np.ndarray, tol: float = _FACE_TOL) -> int:
    """Dimension of the face of K whose relative interior contains p."""
    p = np.ascontiguousarray(p, dtype=float)
    if K.n_halfspaces == 0:
        return K.dim
    slack = K.A @ p
    norms = np.linalg.norm(K.A, axis=1)
    if np.any(slack > tol * np.maximum(norms, 1.0)):
        raise ValueError("point lies outside the cone")
    return int(kernels.face_dimension_kernel(K.A, p, tol))


def mc_intrinsic_volumes(K: PolyhedralCone, samples: int, rng: RngState) -> IntrinsicVolumeProfile:
    """Monte Carlo intrinsic volumes: frequencies of projected-face dimensions
    over Gaussian samples."""
    if samples < 1:
        raise ValueError("samples must be >= 1")
    d = K.dim
    if K.n_halfspaces == 0:
        vals = np.zeros(d + 1)
        vals[d] = 1.0
        return IntrinsicVolumeProfile(d, vals)
    W = rng.generator().standard_normal((samples, d))
    counts = kernels.mc_face_counts(K.A, W, _FACE_TOL, _NNLS_CAP)
    return IntrinsicVolumeProfile(d, counts / samples)


def exact_orthant_volumes(d: int) -> IntrinsicVolumeProfile:
    """v_i = 2^-d * C(d, i+1): the number of positive Gaussian coordinates is
    binomial."""
    if d < 1:
        raise ValueError("d must be >= 1")
    vals = np.array([math.comb(d, j) for j in range(d + 1)], dtype=float) * 0.5 ** d
    return IntrinsicVolumeProfile(d, vals)


def exact_subspace_volumes(d: int, n: int) -> IntrinsicVolumeProfile:
    if not 0 <= n <= d:
        raise ValueError(f"need 0 <= n <= d, got n={n}, d={d}")
    vals = np.zeros(d + 1)
    vals[n] = 1.0
    return IntrinsicVolumeProfile(d, vals)


def kinematic_probability(vK: IntrinsicVolumeProfile, vKt: IntrinsicVolumeProfile) -> float:
    """P{K meets Q K~ nontrivially} for a Haar-random basis Q.

    Exact double sum over the two intrinsic volume profiles; when both inputs
    are subspace profiles, the formula does not apply and general position
    decides: intersection is nontrivial iff the dimensions sum above d.
    """
    if vK.d != vKt.d:
        raise ValueError(f"dimension mismatch: {vK.d} vs {vKt.d}")
    d = vK.d
    n1 = vK.is_subspace_profile()
    n2 = vKt.is_subspace_profile()
    if n1 is not None and n2 is not None:
        return 1.0 if n1 + n2 > d else 0.0
    a, b = vK.values, vKt.values
    total = 0.0
    for k in range(0, d, 2):  # odd k terms vanish
        for i in range(k, d):
            total += 2.0 * a[i + 1] * b[d - i + k]
    if total < -1e-12 or total > 1.0 + 1e-12:
        raise ArithmeticError(f"kinematic sum {total} outside [0, 1]")
    return min(max(total, 0.0), 1.0)


def intersects_nontrivially(K: PolyhedralCone, Kt: PolyhedralCone, Q: np.ndarray) -> bool:
    """Decide K intersect Q*Kt != {0} with 2d box-bounded linear programs.

    For each coordinate and sign, maximize +-v_i over the intersection cone
    cut with the unit sup-norm box; any optimum above threshold certifies a
    nontrivial ray. Works for non-pointed cones where normalization tricks
    fail.
    """
    if K.dim != Kt.dim:
        raise ValueError("cones must share ambient dimension")
    d = K.dim
    Q = np.asarray(Q, dtype=float)
    if np.max(np.abs(Q.T @ Q - np.eye(d))) > 1e-8:
        raise ValueError("Q must be orthogonal")
    blocks = []
    if K.n_halfspaces:
        blocks.append(K.A)
    if Kt.n_halfspaces:
        blocks.append(Kt.A @ Q.T)
    if not blocks:
        return True  # both full spaces
    A = np.vstack(blocks)
    m = A.shape[0]
    # shift w = v + 1 so w >= 0; A w <= A 1, w <= 2
    A_ub = np.vstack([A, np.eye(d)])
    b_ub = np.concatenate([A @ np.ones(d), np.full(d, 2.0)])
    for i in range(d):
        for sign in (1.0, -1.0):
            c = np.zeros(d)
            c[i] = -sign  # maximize sign * v_i = minimize -sign * w_i (+ const)
            status, w, obj = kernels.simplex_standard(
                np.ascontiguousarray(c), np.ascontiguousarray(A_ub),
                np.ascontiguousarray(b_ub), 100 * (m + 3 * d))
            if status != 0:
                raise RuntimeError(f"simplex failed with status {status} in intersection oracle")
            if sign * (w[i] - 1.0) > 1e-7:
                return True
    return False


def estimate_gaussian_width(K: PolyhedralCone, samples: int, rng: RngState) -> tuple[float, float]:
    """Monte Carlo Gaussian width of K cap S^(d-1).

    The supremum of <omega, x> over the cone-sphere slice equals the norm of
    the cone projection of omega, so we average projection norms. Returns
    (mean, standard error).
    """
    if samples < 1:
        raise ValueError("samples must be >= 1")
    W = rng.generator().standard_normal((samples, K.dim))
    if K.n_halfspaces == 0:
        norms = np.linalg.norm(W, axis=1)
    else:
        norms = kernels.width_samples(K.A, W, _NNLS_CAP)
    mean = float(np.mean(norms))
    se = float(np.std(norms, ddof=1) / math.sqrt(samples)) if samples > 1 else float("inf")
    return mean, se

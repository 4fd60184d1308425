"""Samplers for the random objects in the demixing experiments."""

from dataclasses import dataclass

import numpy as np

from .numerics import RngState, qr_decompose


@dataclass(frozen=True)
class SparsityPattern:
    """Support and signs of a sparse sign vector."""

    dim: int
    support: tuple
    signs: tuple

    def __post_init__(self):
        if len(self.support) != len(self.signs):
            raise ValueError("support and signs must have equal length")
        if len(set(self.support)) != len(self.support):
            raise ValueError("support indices must be distinct")
        if any(i < 0 or i >= self.dim for i in self.support):
            raise ValueError("support index out of range")
        if any(s not in (-1, 1) for s in self.signs):
            raise ValueError("signs must be +1 or -1")

    @property
    def k(self) -> int:
        return len(self.support)

    def to_vector(self) -> np.ndarray:
        v = np.zeros(self.dim)
        for i, s in zip(self.support, self.signs):
            v[i] = s
        return v

    @classmethod
    def from_vector(cls, x: np.ndarray) -> "SparsityPattern":
        x = np.asarray(x, dtype=float)
        support = tuple(int(i) for i in np.nonzero(x)[0])
        signs = tuple(int(np.sign(x[i])) for i in support)
        return cls(x.size, support, signs)


def haar_orthogonal(d: int, rng: RngState) -> np.ndarray:
    """Draw Q from the Haar measure on the orthogonal group O_d.

    QR of a Gaussian matrix with the sign correction Q <- Q * sign(diag(R));
    zero diagonal entries of R (a measure-zero event) map to +1 so the draw
    is always deterministic given the state.
    """
    if d < 1:
        raise ValueError("d must be >= 1")
    g = rng.generator().standard_normal((d, d))
    Q, R = qr_decompose(g)
    signs = np.sign(np.diag(R))
    signs[signs == 0] = 1.0
    return Q * signs[np.newaxis, :]


def sparse_signal(d: int, k: int, rng: RngState) -> np.ndarray:
    """Vector with exactly k nonzeros at uniformly random distinct positions,
    each equal to +1 or -1 with probability 1/2."""
    if not 0 <= k <= d:
        raise ValueError(f"need 0 <= k <= d, got k={k}, d={d}")
    gen = rng.generator()
    x = np.zeros(d)
    if k > 0:
        support = gen.choice(d, size=k, replace=False)
        x[support] = gen.choice([-1.0, 1.0], size=k)
    return x


def low_rank_matrix(n: int, r: int, rng: RngState) -> np.ndarray:
    """Rank-r matrix Q_L diag(1,...,1,0,...,0) Q_R with independent Haar factors."""
    if not 0 <= r <= n:
        raise ValueError(f"need 0 <= r <= n, got r={r}, n={n}")
    if r == 0:
        return np.zeros((n, n))
    QL = haar_orthogonal(n, rng.child("left"))
    QR = haar_orthogonal(n, rng.child("right"))
    lam = np.zeros(n)
    lam[:r] = 1.0
    return (QL * lam[np.newaxis, :]) @ QR


def erase(x: np.ndarray, k: int) -> np.ndarray:
    """Zero out the k largest-magnitude entries of x; ties break toward the
    lowest index."""
    x = np.asarray(x, dtype=float)
    if not 0 <= k <= x.size:
        raise ValueError(f"need 0 <= k <= dim, got k={k}, dim={x.size}")
    out = x.copy()
    if k == 0:
        return out
    # stable sort on (-|x|, index): lowest index wins among equal magnitudes
    order = np.argsort(-np.abs(x), kind="stable")
    out[order[:k]] = 0.0
    return out

"""Decay-threshold calculus: entropy, the l1 exponent functions, level-psi
thresholds, and width-derived thresholds for matrix gauges.

The total exponent governs the asymptotic size of the intrinsic volumes of
l1 descent cones at proportional sparsity tau, as a function of the
normalized index theta. Its level sets define the upper threshold
theta_l1(tau, psi) and lower threshold kappa_l1(tau).
"""

import math
from dataclasses import dataclass

from .numerics import bisect, erf, erfcx

_SQRT_PI = math.sqrt(math.pi)
_SQRT_2PI = math.sqrt(2.0 * math.pi)
_LOG2 = math.log(2.0)

# tangency tolerance: the exponent's maximum is zero only up to numerics, so a
# level line within this slack of the maximum is treated as touching at the peak
_TOUCH_TOL = 1e-9


@dataclass(frozen=True)
class ExponentPoint:
    theta: float
    tau: float
    psi_cont: float
    psi_int: float
    psi_ext: float
    psi_total: float


def entropy(theta: float) -> float:
    """Natural entropy -t log t - (1-t) log(1-t), continuously extended to 0
    at the endpoints."""
    if not 0.0 <= theta <= 1.0:
        raise ValueError(f"theta must lie in [0, 1], got {theta}")
    if theta in (0.0, 1.0):
        return 0.0
    return -theta * math.log(theta) - (1.0 - theta) * math.log(1.0 - theta)


def face_count_exponent(tau: float) -> float:
    """E(tau) = tau log 2 + H(tau): exponential growth rate of the number of
    sparsity/sign patterns."""
    return tau * _LOG2 + entropy(tau)


def theta_orthant(psi: float) -> float:
    """Level-psi upper decay threshold for the orthant ensemble:
    sup{theta : H(theta) >= log 2 - psi}."""
    if not 0.0 <= psi <= _LOG2:
        raise ValueError(f"psi must lie in [0, log 2], got {psi}")
    if psi == 0.0:
        return 0.5
    if psi >= _LOG2:
        return 1.0
    # H is strictly decreasing on [1/2, 1]
    return bisect(lambda t: entropy(t) - (_LOG2 - psi), 0.5, 1.0, tol=1e-10)


def psi_cont(theta: float, tau: float) -> float:
    """Exponent for the number of faces containing a fixed face."""
    if theta < tau:
        raise ValueError(f"need theta >= tau, got theta={theta}, tau={tau}")
    if tau >= 1.0:
        raise ValueError("tau must be < 1")
    # binomial exponent of C((1-tau) d, (theta-tau) d) plus the 2^(theta-tau)d
    # sign count
    return (theta - tau) * _LOG2 + (1.0 - tau) * entropy((theta - tau) / (1.0 - tau))


def solve_x(theta: float) -> float:
    """Positive root of 2 x erf(x) / erf'(x) = (1 - theta) / theta.

    The left side increases strictly from 0, so bisection on [~0, 20] finds
    the unique root; theta = 1 gives x = 0 in the limit.
    """
    if not 0.0 < theta <= 1.0:
        raise ValueError(f"theta must lie in (0, 1], got {theta}")
    if theta == 1.0:
        return 0.0
    target = (1.0 - theta) / theta

    def f(x):
        # 2 x G(x) / G'(x) with G' = (2/sqrt(pi)) exp(-x^2)
        return _SQRT_PI * x * erf(x) * math.exp(x * x) - target

    hi = 20.0
    if f(hi) < 0:
        raise ValueError(f"bracket exhausted beyond x={hi} (theta={theta} too small)")
    return bisect(f, 1e-12, hi, tol=1e-12)


def mills_M(s: float) -> float:
    """Mills-ratio variant -s exp(s^2/2) * Phi-tail integral, via erfcx for
    stability on s <= 0. Increases from 0 at s=0 toward 1 as s -> -inf."""
    return -s * math.sqrt(math.pi / 2.0) * erfcx(-s / math.sqrt(2.0))


def solve_s(theta: float, tau: float) -> float:
    """Root s <= 0 of M(s) = 1 - tau / theta."""
    if not 0.0 < tau <= theta <= 1.0:
        raise ValueError(f"need 0 < tau <= theta <= 1, got tau={tau}, theta={theta}")
    if tau == theta:
        return 0.0
    target = 1.0 - tau / theta
    # M(s) ~ 1 - 1/s^2 as s -> -inf, so the root sits near -sqrt(theta/tau);
    # grow the bracket until it straddles the target
    lo = -8.0 * (1.0 + math.sqrt(theta / tau))
    while mills_M(lo) < target:
        lo *= 2.0
        if lo < -1e9:
            raise ArithmeticError(f"no bracket for s at theta={theta}, tau={tau}")
    return bisect(lambda s: mills_M(s) - target, lo, 0.0, tol=1e-12)


def psi_int(theta: float, tau: float) -> float:
    """Exponent for the internal angle."""
    if not 0.0 < tau <= theta <= 1.0:
        raise ValueError(f"need 0 < tau <= theta <= 1, got tau={tau}, theta={theta}")
    if theta == tau:
        return 0.0
    s = solve_s(theta, tau)
    assert s <= 0.0, "implicit parameter must be nonpositive"
    arg = _SQRT_2PI * s * theta / (tau - theta)
    return (theta - tau) * math.log(arg) - tau * s * s / 2.0


def psi_ext(theta: float) -> float:
    """Exponent for the external angle."""
    if not 0.0 < theta <= 1.0:
        raise ValueError(f"theta must lie in (0, 1], got {theta}")
    if theta == 1.0:
        return 0.0
    x = solve_x(theta)
    return -(1.0 - theta) * math.log(erf(x)) + theta * x * x


def psi_total(theta: float, tau: float) -> ExponentPoint:
    """Net exponent: containing-face count minus internal and external angle
    exponents. Nonpositive everywhere; its zero level set gives the decay
    thresholds."""
    pc = psi_cont(theta, tau)
    pi_ = psi_int(theta, tau)
    pe = psi_ext(theta)
    return ExponentPoint(theta, tau, pc, pi_, pe, pc - pi_ - pe)


def _psi_total_value(theta: float, tau: float) -> float:
    return psi_total(theta, tau).psi_total


_INVPHI = (math.sqrt(5.0) - 1.0) / 2.0


def _maximize_psi_total(tau: float) -> tuple[float, float]:
    """Golden-section argmax of the (empirically concave) exponent in theta."""
    lo, hi = tau, 1.0
    c = hi - _INVPHI * (hi - lo)
    d = lo + _INVPHI * (hi - lo)
    fc = _psi_total_value(c, tau)
    fd = _psi_total_value(d, tau)
    while hi - lo > 1e-11:
        if fc > fd:
            hi, d, fd = d, c, fc
            c = hi - _INVPHI * (hi - lo)
            fc = _psi_total_value(c, tau)
        else:
            lo, c, fc = c, d, fd
            d = lo + _INVPHI * (hi - lo)
            fd = _psi_total_value(d, tau)
    mid = 0.5 * (lo + hi)
    return mid, _psi_total_value(mid, tau)


def theta_l1(tau: float, psi: float = 0.0) -> float:
    """Level-psi upper decay threshold for l1 descent cones: the rightmost
    theta where the total exponent crosses -psi.

    At psi = 0 the level line is tangent to the exponent's zero maximum, so
    the crossing is located as the argmax rather than by sign change.
    Returns 1.0 when the exponent never reaches -psi.
    """
    if not 1e-4 <= tau <= 1.0 - 1e-4:
        raise ValueError(f"tau must lie in [1e-4, 1 - 1e-4], got {tau}")
    if psi < 0:
        raise ValueError("psi must be >= 0")
    theta_hat, m_hat = _maximize_psi_total(tau)
    if -psi >= m_hat - _TOUCH_TOL:
        # level at or above the maximum: tangential contact at the peak
        return theta_hat
    if _psi_total_value(1.0, tau) > -psi:
        return 1.0
    return bisect(lambda t: _psi_total_value(t, tau) + psi, theta_hat, 1.0, tol=1e-8)


def kappa_l1(tau: float) -> float:
    """Lower decay threshold: leftmost zero crossing of the total exponent.
    Numerically coincides with theta_l1(tau, 0)."""
    if not 1e-4 <= tau <= 1.0 - 1e-4:
        raise ValueError(f"tau must lie in [1e-4, 1 - 1e-4], got {tau}")
    theta_hat, m_hat = _maximize_psi_total(tau)
    if m_hat <= _TOUCH_TOL:
        return theta_hat
    lo = tau + 1e-9
    if _psi_total_value(lo, tau) >= 0:
        return lo
    return bisect(lambda t: _psi_total_value(t, tau), lo, theta_hat, tol=1e-8)


def theta_schatten1(rho: float) -> float:
    """Width-derived upper decay threshold for Schatten-1 descent cones at
    proportional rank rho, clamped into [0, 1]."""
    if not 0.0 <= rho <= 1.0:
        raise ValueError(f"rho must lie in [0, 1], got {rho}")
    return min(6.0 * rho - 3.0 * rho * rho, 1.0)


def theta_operator() -> float:
    """Upper decay threshold for operator-norm descent cones at orthogonal
    matrices."""
    return 0.75


def theta_subspace(sigma: float) -> float:
    """Upper decay threshold for an ensemble of subspaces of proportional
    dimension sigma."""
    if not 0.0 <= sigma <= 1.0:
        raise ValueError(f"sigma must lie in [0, 1], got {sigma}")
    return sigma


def export_theta_table(taus, psis, path) -> None:
    """CSV of (tau, psi, theta_l1) triples."""
    with open(path, "w", newline="\n") as fh:
        fh.write("tau,psi,theta_l1\n")
        for tau in taus:
            for psi in psis:
                fh.write(f"{tau!r},{psi!r},{theta_l1(tau, psi)!r}\n")


def export_exponent_grid(thetas, taus, path) -> None:
    """CSV of exponent components on a (theta, tau) grid; rows with
    theta < tau are omitted (the intrinsic volumes vanish there)."""
    with open(path, "w", newline="\n") as fh:
        fh.write("theta,tau,psi_cont,psi_int,psi_ext,psi_total\n")
        for tau in taus:
            for theta in thetas:
                if theta < tau:
                    continue
                p = psi_total(theta, tau)
                fh.write(f"{p.theta!r},{p.tau!r},{p.psi_cont!r},"
                         f"{p.psi_int!r},{p.psi_ext!r},{p.psi_total!r}\n")

"""Hot numeric kernels: NNLS, l1-ball projection, dense simplex, Douglas-Rachford.

Every function here is written in nopython-compatible numpy so that it can be
compiled with numba. Set the environment variable ``CONEDEMIX_NO_NUMBA=1``
before import to select the pure-numpy fallback path (used for debugging and
by the kernel benchmark). Results are identical on both paths.
"""

import os

import numpy as np

USE_NUMBA = os.environ.get("CONEDEMIX_NO_NUMBA", "0").lower() not in ("1", "true", "yes")

if USE_NUMBA:
    try:
        from numba import njit as _njit
    except ImportError:  # pragma: no cover
        USE_NUMBA = False

if USE_NUMBA:
    def njit(func):
        return _njit(cache=True)(func)
else:
    def njit(func):
        return func

# gauge codes shared with solvers.py
GAUGE_L1 = 0
GAUGE_LINF = 1
GAUGE_S1 = 2
GAUGE_OP = 3


@njit
def soft_threshold(v, t):
    return np.sign(v) * np.maximum(np.abs(v) - t, 0.0)


@njit
def clamp(v, a):
    return np.minimum(np.maximum(v, -a), a)


@njit
def project_l1_ball(v, alpha):
    """Euclidean projection onto {x : ||x||_1 <= alpha} by sorting."""
    if alpha <= 0.0:
        return np.zeros_like(v)
    if np.sum(np.abs(v)) <= alpha:
        return v.copy()
    u = np.sort(np.abs(v))[::-1]
    css = np.cumsum(u)
    rho = 0
    for j in range(u.size):
        if u[j] > (css[j] - alpha) / (j + 1):
            rho = j
    theta = (css[rho] - alpha) / (rho + 1)
    return np.sign(v) * np.maximum(np.abs(v) - theta, 0.0)


@njit
def nnls(A, b, max_iter):
    """Lawson-Hanson active set for min ||A x - b||_2 subject to x >= 0.

    Returns (x, converged). On iteration-cap exhaustion the best iterate is
    returned with converged=False.
    """
    m, n = A.shape
    x = np.zeros(n)
    passive = np.zeros(n, np.bool_)
    scale = np.max(np.abs(A.T @ b)) if n > 0 else 0.0
    tol = 1e-11 * max(1.0, scale)
    it = 0
    while it < max_iter:
        w = A.T @ (b - A @ x)
        t = -1
        wmax = tol
        for j in range(n):
            if not passive[j] and w[j] > wmax:
                wmax = w[j]
                t = j
        if t < 0:
            return x, True
        passive[t] = True
        while True:
            it += 1
            idx = np.where(passive)[0]
            k = idx.size
            sub = np.empty((m, k))
            for jj in range(k):
                sub[:, jj] = A[:, idx[jj]]
            z = np.linalg.lstsq(sub, b, rcond=-1.0)[0]
            if np.min(z) > 0.0:
                x[:] = 0.0
                for jj in range(k):
                    x[idx[jj]] = z[jj]
                break
            # step to the boundary of the positive orthant along x -> z
            alpha_step = np.inf
            for jj in range(k):
                if z[jj] <= 0.0:
                    dj = x[idx[jj]] - z[jj]
                    if dj > 0.0:
                        a = x[idx[jj]] / dj
                        if a < alpha_step:
                            alpha_step = a
            if not np.isfinite(alpha_step):
                alpha_step = 0.0
            for jj in range(k):
                x[idx[jj]] += alpha_step * (z[jj] - x[idx[jj]])
            for jj in range(k):
                if x[idx[jj]] <= 1e-12:
                    x[idx[jj]] = 0.0
                    passive[idx[jj]] = False
            if it >= max_iter:
                return x, False
    return x, False


@njit
def project_polyhedral(A, w, nnls_max_iter):
    """Project w onto {v : A v <= 0} via Moreau: subtract the polar projection.

    The polar cone is {A^T lam : lam >= 0}, so the polar projection is an
    NNLS solve in the lambda variables.
    """
    At = np.ascontiguousarray(A.T)
    lam, ok = nnls(At, w, nnls_max_iter)
    p = w - At @ lam
    return p, ok


@njit
def face_dimension_kernel(A, p, tol):
    """Dimension of the face of {v : A v <= 0} whose relative interior holds p."""
    m, d = A.shape
    na = 0
    act = np.zeros(m, np.bool_)
    for i in range(m):
        nrm = np.sqrt(np.sum(A[i] ** 2))
        if np.abs(A[i] @ p) <= tol * max(nrm, 1e-30):
            act[i] = True
            na += 1
    if na == 0:
        return d
    R = np.empty((na, d))
    k = 0
    for i in range(m):
        if act[i]:
            R[k] = A[i]
            k += 1
    s = np.linalg.svd(R)[1]
    cutoff = 1e-8 * s[0]
    rank = 0
    for j in range(s.size):
        if s[j] > cutoff:
            rank += 1
    return d - rank


@njit
def mc_face_counts(A, W, tol, nnls_max_iter):
    """Histogram of projected-face dimensions over the Gaussian sample rows of W.

    counts[f] is the number of samples whose projection lies in an f-dimensional
    face, f = 0..d; this indexes intrinsic volume v_{f-1}.
    """
    n_samples, d = W.shape
    counts = np.zeros(d + 1, np.int64)
    for sidx in range(n_samples):
        p, _ = project_polyhedral(A, W[sidx], nnls_max_iter)
        fd = face_dimension_kernel(A, p, tol)
        counts[fd] += 1
    return counts


@njit
def width_samples(A, W, nnls_max_iter):
    """Norms of cone projections of the Gaussian sample rows of W."""
    n_samples = W.shape[0]
    out = np.empty(n_samples)
    for i in range(n_samples):
        p, _ = project_polyhedral(A, W[i], nnls_max_iter)
        out[i] = np.sqrt(np.sum(p * p))
    return out


# ---------------------------------------------------------------------------
# Dense two-phase simplex with Bland's rule.
# Status codes: 0 optimal, 1 infeasible, 2 unbounded, 3 iteration cap.


@njit
def _pivot(T, row, col):
    m = T.shape[0]
    piv = T[row, col]
    T[row] /= piv
    for i in range(m):
        if i != row and T[i, col] != 0.0:
            T[i] -= T[i, col] * T[row]


@njit
def _lex_less(T, i, k, a_i, a_k, rhs, init_cols):
    """Lexicographic comparison of rows i and k scaled by their pivot entries.

    Compares (T[i,rhs], T[i,c_1], ..., T[i,c_m]) / a_i against the same vector
    for row k, where c_1..c_m are the initial basic columns.  Those columns
    start as the identity, so every row is lexico-positive and the minimum is
    unique, which rules out cycling even under degeneracy.
    """
    d = T[i, rhs] / a_i - T[k, rhs] / a_k
    if d != 0.0:
        return d < 0.0
    for c in init_cols:
        d = T[i, c] / a_i - T[k, c] / a_k
        if d != 0.0:
            return d < 0.0
    return False


@njit
def _simplex_iterate(T, basis, cost, n_allowed, init_cols, max_iter):
    m, w = T.shape
    rhs = w - 1
    for _ in range(max_iter):
        enter = -1
        for j in range(n_allowed):
            rc = cost[j]
            for i in range(m):
                rc -= cost[basis[i]] * T[i, j]
            if rc < -1e-9:
                enter = j  # smallest-index entering rule
                break
        if enter < 0:
            return 0
        # lexicographic ratio test (anti-cycling); the pivot threshold is
        # kept well above roundoff so tiny pivots cannot corrupt the tableau
        leave = -1
        for i in range(m):
            a = T[i, enter]
            if a > 1e-7:
                if leave < 0 or _lex_less(T, i, leave, a, T[leave, enter],
                                          rhs, init_cols):
                    leave = i
        if leave < 0:
            return 2
        _pivot(T, leave, enter)
        basis[leave] = enter
    return 3


@njit
def simplex_standard(c, A, b, max_iter):
    """min c @ x subject to A x <= b, x >= 0.

    Returns (status, x, objective).  If the iteration cap is hit (numerical
    cycling on a degenerate vertex), retries with a tiny row-graded
    perturbation of b, which breaks the degeneracy.
    """
    status, x, obj = _simplex_once(c, A, b, max_iter)
    eps = 1e-9
    while status == 3 and eps < 1e-5:
        bp = b.copy()
        for i in range(b.shape[0]):
            bp[i] += eps * (i + 1) * (1.0 + abs(b[i]))
        status, x, obj = _simplex_once(c, A, bp, max_iter)
        eps *= 100.0
    return status, x, obj


@njit
def _simplex_once(c, A, b, max_iter):
    m, n = A.shape
    AA = A.copy()
    bb = b.copy()
    slack_sign = np.ones(m)
    nart = 0
    for i in range(m):
        if bb[i] < 0.0:
            bb[i] = -bb[i]
            AA[i] = -AA[i]
            slack_sign[i] = -1.0
            nart += 1
    ncols = n + m + nart
    T = np.zeros((m, ncols + 1))
    basis = np.empty(m, np.int64)
    ai = 0
    for i in range(m):
        T[i, :n] = AA[i]
        T[i, n + i] = slack_sign[i]
        T[i, ncols] = bb[i]
        if slack_sign[i] < 0.0:
            T[i, n + m + ai] = 1.0
            basis[i] = n + m + ai
            ai += 1
        else:
            basis[i] = n + i
    x = np.zeros(n)
    init_cols = basis.copy()  # initial basic columns form the identity
    if nart > 0:
        cost1 = np.zeros(ncols)
        for j in range(n + m, ncols):
            cost1[j] = 1.0
        status = _simplex_iterate(T, basis, cost1, ncols, init_cols, max_iter)
        if status == 3:
            return 3, x, 0.0
        obj1 = 0.0
        for i in range(m):
            obj1 += cost1[basis[i]] * T[i, ncols]
        if obj1 > 1e-7:
            return 1, x, 0.0
        # drive degenerate artificials out of the basis so phase 2 cannot
        # re-raise them (their rows would otherwise lose feasibility)
        for i in range(m):
            if basis[i] >= n + m:
                for j in range(n + m):
                    if abs(T[i, j]) > 1e-9:
                        _pivot(T, i, j)
                        basis[i] = j
                        break
                # an all-zero row is redundant: the artificial stays at zero
    cost2 = np.zeros(ncols)
    cost2[:n] = c
    # artificials stay out: restrict entering columns to structural + slack
    status = _simplex_iterate(T, basis, cost2, n + m, init_cols, max_iter)
    for i in range(m):
        if basis[i] < n:
            x[basis[i]] = T[i, ncols]
    return status, x, c @ x


# ---------------------------------------------------------------------------
# Douglas-Rachford splitting for the constrained demixing program.


@njit
def _unvec(v, n):
    # column-major de-vectorization
    M = np.empty((n, n))
    for j in range(n):
        M[:, j] = v[j * n:(j + 1) * n]
    return M


@njit
def _vec(M):
    n = M.shape[0]
    v = np.empty(n * n)
    for j in range(n):
        v[j * n:(j + 1) * n] = M[:, j]
    return v


@njit
def prox_gauge_kernel(v, t, kind, nside):
    if kind == GAUGE_L1:
        return soft_threshold(v, t)
    elif kind == GAUGE_LINF:
        return v - project_l1_ball(v, t)
    elif kind == GAUGE_S1:
        M = _unvec(v, nside)
        U, s, Vt = np.linalg.svd(M)
        return _vec(U @ np.diag(soft_threshold(s, t)) @ Vt)
    else:
        M = _unvec(v, nside)
        U, s, Vt = np.linalg.svd(M)
        return _vec(U @ np.diag(s - project_l1_ball(s, t)) @ Vt)


@njit
def project_ball_kernel(v, alpha, kind, nside):
    if kind == GAUGE_L1:
        return project_l1_ball(v, alpha)
    elif kind == GAUGE_LINF:
        return clamp(v, alpha)
    elif kind == GAUGE_S1:
        M = _unvec(v, nside)
        U, s, Vt = np.linalg.svd(M)
        return _vec(U @ np.diag(project_l1_ball(s, alpha)) @ Vt)
    else:
        M = _unvec(v, nside)
        U, s, Vt = np.linalg.svd(M)
        return _vec(U @ np.diag(clamp(s, alpha)) @ Vt)


@njit
def dr_demix(z0, Q, obj_kind, cons_kind, alpha, gamma, max_iter, tol, nside):
    """Douglas-Rachford on F1(x) + F2(x) after eliminating the basis variable.

    F1 is the objective gauge of x; F2 is the indicator of
    {x : constraint_gauge(Q^T (z0 - x)) <= alpha}. The prox of F2 projects the
    eliminated variable onto the constraint ball, so the returned pair is
    exactly feasible: x = z0 - Q y and constraint_gauge(y) <= alpha.

    Returns (x, y, iterations, residual, converged).
    """
    u = z0.copy()
    yb = np.zeros_like(z0)
    w = z0.copy()
    resid = np.inf
    converged = False
    it = 0
    for it in range(1, max_iter + 1):
        x = prox_gauge_kernel(u, gamma, obj_kind, nside)
        r = 2.0 * x - u
        yb = project_ball_kernel(Q.T @ (z0 - r), alpha, cons_kind, nside)
        w = z0 - Q @ yb
        u = u + w - x
        # fixed-point residual: the two prox outputs coincide at a solution
        resid = np.max(np.abs(w - x))
        if resid < tol:
            converged = True
            break
    return w, yb, it, resid, converged

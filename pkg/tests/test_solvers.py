import numpy as np
import pytest
from scipy.optimize import linprog

from conedemix.cones import PolyhedralCone, intersects_nontrivially, l1_descent_cone
from conedemix.numerics import RngState, svd
from conedemix.random_models import SparsityPattern, haar_orthogonal, sparse_signal
from conedemix.solvers import (
    DemixProblem,
    GaugeSpec,
    SolveReport,
    gauge_value,
    project_ball,
    prox_l1,
    prox_schatten1,
    simplex_lp,
    solve_demix,
)


def l1_l1_lp_oracle(z0, Q, alpha):
    """Exact LP solution of min ||x||_1 s.t. ||y||_1 <= alpha, x + Q y = z0,
    via variable splitting and an independent LP solver."""
    d = z0.size
    # variables: x+, x-, y+, y- (all >= 0)
    c = np.concatenate([np.ones(2 * d), np.zeros(2 * d)])
    A_eq = np.hstack([np.eye(d), -np.eye(d), Q, -Q])
    A_ub = np.concatenate([np.zeros(2 * d), np.ones(2 * d)])[np.newaxis, :]
    res = linprog(c, A_ub=A_ub, b_ub=[alpha], A_eq=A_eq, b_eq=z0, method="highs")
    assert res.success
    v = res.x
    return v[:d] - v[d:2 * d]


class TestGaugeSpec:
    def test_validation(self):
        with pytest.raises(ValueError):
            GaugeSpec("l2", 4)
        with pytest.raises(ValueError):
            GaugeSpec("l1", 0)

    def test_ambient_dims(self):
        assert GaugeSpec("l1", 7).ambient_dim == 7
        assert GaugeSpec("schatten1", 5).ambient_dim == 25

    def test_gauge_values(self):
        v = np.array([3.0, -4.0])
        assert gauge_value(GaugeSpec("l1", 2), v) == 7.0
        assert gauge_value(GaugeSpec("linf", 2), v) == 4.0
        M = np.diag([2.0, 1.0])
        vec = M.reshape(-1, order="F")
        assert abs(gauge_value(GaugeSpec("schatten1", 2), vec) - 3.0) < 1e-12
        assert abs(gauge_value(GaugeSpec("operator", 2), vec) - 2.0) < 1e-12


class TestProxL1:
    def test_zero_t(self):
        v = np.array([1.0, -2.0])
        np.testing.assert_array_equal(prox_l1(v, 0.0), v)

    def test_shrink_and_kill(self):
        np.testing.assert_array_equal(prox_l1(np.array([3.0, -1.0]), 2.0), [1.0, 0.0])

    def test_subgradient_optimality(self):
        gen = RngState(30).generator()
        for _ in range(200):
            v = gen.standard_normal(8)
            t = float(gen.uniform(0.1, 2.0))
            p = prox_l1(v, t)
            # 0 in t*subdiff(|.|)(p) + (p - v)
            for pi, vi in zip(p, v):
                g = (vi - pi) / t
                if pi != 0:
                    assert abs(g - np.sign(pi)) < 1e-10
                else:
                    assert abs(g) <= 1.0 + 1e-10

    def test_moreau_identity(self):
        # prox of t*||.||_1 decomposes v against the t-scaled ball of the dual
        # norm (l-infinity)
        gen = RngState(31).generator()
        for _ in range(200):
            v = gen.standard_normal(10)
            t = float(gen.uniform(0.01, 3.0))
            recon = prox_l1(v, t) + project_ball(GaugeSpec("linf", 10), v, t)
            np.testing.assert_allclose(recon, v, atol=1e-10)

    def test_moreau_identity_linf_prox(self):
        # dually, the prox of the l-infinity gauge pairs with the l1 ball
        from conedemix import kernels
        gen = RngState(131).generator()
        for _ in range(100):
            v = np.ascontiguousarray(gen.standard_normal(10))
            t = float(gen.uniform(0.01, 3.0))
            p = kernels.prox_gauge_kernel(v, t, kernels.GAUGE_LINF, 0)
            recon = p + project_ball(GaugeSpec("l1", 10), v, t)
            np.testing.assert_allclose(recon, v, atol=1e-10)


class TestProjectBall:
    def test_inside_identity(self):
        v = np.array([0.2, -0.3])
        for kind in ("l1", "linf"):
            np.testing.assert_allclose(project_ball(GaugeSpec(kind, 2), v, 1.0), v)

    def test_linf_clamp(self):
        np.testing.assert_allclose(
            project_ball(GaugeSpec("linf", 2), np.array([2.0, -0.5]), 1.0), [1.0, -0.5])

    def test_l1_simplex_point(self):
        np.testing.assert_allclose(
            project_ball(GaugeSpec("l1", 2), np.array([1.0, 1.0]), 1.0), [0.5, 0.5],
            atol=1e-12)

    def test_matrix_balls(self):
        gen = RngState(32).generator()
        for _ in range(20):
            M = gen.standard_normal((4, 4))
            vec = np.ascontiguousarray(M.reshape(-1, order="F"))
            for kind, alpha in (("schatten1", 1.5), ("operator", 0.8)):
                spec = GaugeSpec(kind, 4)
                p = project_ball(spec, vec, alpha)
                assert gauge_value(spec, p) <= alpha * (1 + 1e-9)
                # idempotence
                np.testing.assert_allclose(project_ball(spec, p, alpha), p, atol=1e-9)

    def test_nonexpansive(self):
        gen = RngState(33).generator()
        for kind, shape in (("l1", 9), ("linf", 9), ("schatten1", 3), ("operator", 3)):
            spec = GaugeSpec(kind, shape)
            for _ in range(50):
                u = gen.standard_normal(spec.ambient_dim)
                v = gen.standard_normal(spec.ambient_dim)
                pu = project_ball(spec, u, 1.0)
                pv = project_ball(spec, v, 1.0)
                assert np.linalg.norm(pu - pv) <= np.linalg.norm(u - v) + 1e-9


class TestProxSchatten1:
    def test_zero_t(self):
        M = RngState(34).generator().standard_normal((3, 3))
        np.testing.assert_allclose(prox_schatten1(M, 0.0), M, atol=1e-12)

    def test_rank_one_shrink(self):
        u = np.array([1.0, 0.0, 0.0])
        v = np.array([0.0, 1.0, 0.0])
        np.testing.assert_allclose(prox_schatten1(np.outer(u, v), 0.4),
                                   0.6 * np.outer(u, v), atol=1e-12)

    def test_nuclear_subdifferential(self):
        gen = RngState(35).generator()
        for _ in range(50):
            M = gen.standard_normal((5, 5))
            t = float(gen.uniform(0.2, 1.5))
            P = prox_schatten1(M, t)
            R = M - P
            s = svd(R).singular_values
            assert s[0] <= t + 1e-8
            nuc = np.sum(svd(P).singular_values)
            assert abs(np.sum(R * P) - t * nuc) < 1e-7


class TestDemixProblem:
    def test_non_orthogonal_rejected(self):
        with pytest.raises(ValueError):
            DemixProblem(np.zeros(2), np.array([[1.0, 1.0], [0.0, 1.0]]),
                         GaugeSpec("l1", 2), GaugeSpec("l1", 2), 1.0)

    def test_truth_consistency(self):
        Q = np.eye(2)
        x0 = np.array([1.0, 0.0])
        y0 = np.array([0.0, 2.0])
        z0 = x0 + y0
        p = DemixProblem(z0, Q, GaugeSpec("l1", 2), GaugeSpec("l1", 2), 2.0,
                         truth_x0=x0, truth_y0=y0)
        assert p.alpha == 2.0
        with pytest.raises(ValueError):
            DemixProblem(z0, Q, GaugeSpec("l1", 2), GaugeSpec("l1", 2), 1.0,
                         truth_x0=x0, truth_y0=y0)
        with pytest.raises(ValueError):
            DemixProblem(z0 + 1.0, Q, GaugeSpec("l1", 2), GaugeSpec("l1", 2), 2.0,
                         truth_x0=x0, truth_y0=y0)


class TestSolveDemix:
    def test_degenerate_alpha_zero(self):
        d = 8
        rng = RngState(36)
        Q = haar_orthogonal(d, rng.child("Q"))
        x0 = sparse_signal(d, 3, rng.child("x"))
        p = DemixProblem(x0, Q, GaugeSpec("l1", d), GaugeSpec("linf", d), 0.0)
        rep = solve_demix(p)
        np.testing.assert_array_equal(rep.x_star, x0)
        assert rep.converged

    def test_matches_lp_oracle_small(self):
        rng = RngState(37)
        for trial in range(20):
            r = rng.child(trial)
            d = 4
            Q = haar_orthogonal(d, r.child("Q"))
            x0 = sparse_signal(d, 1, r.child("x"))
            y0 = sparse_signal(d, 1, r.child("y"))
            z0 = x0 + Q @ y0
            alpha = float(np.sum(np.abs(y0)))
            p = DemixProblem(z0, Q, GaugeSpec("l1", d), GaugeSpec("l1", d), alpha)
            rep = solve_demix(p, tol=1e-10)
            x_lp = l1_l1_lp_oracle(z0, Q, alpha)
            # compare objective values (the optimum may be non-unique)
            assert np.sum(np.abs(rep.x_star)) <= np.sum(np.abs(x_lp)) + 1e-5

    def test_feasibility_invariants(self):
        rng = RngState(38)
        for trial in range(20):
            r = rng.child(trial)
            d = 12
            Q = haar_orthogonal(d, r.child("Q"))
            z0 = r.child("z").generator().standard_normal(d)
            p = DemixProblem(z0, Q, GaugeSpec("l1", d), GaugeSpec("linf", d), 1.0)
            rep = solve_demix(p)
            assert np.max(np.abs(rep.x_star + Q @ rep.y_star - z0)) < 1e-7
            assert gauge_value(GaugeSpec("linf", d), rep.y_star) <= 1.0 + 1e-7

    def test_geometry_agreement_sample(self):
        # solver success vs cone-intersection verdict on small MCA instances
        rng = RngState(39)
        agree = 0
        n_trials = 60
        for trial in range(n_trials):
            r = rng.child(trial)
            d = 7
            kx, ky = 2, 2
            x0 = sparse_signal(d, kx, r.child("x"))
            y0 = sparse_signal(d, ky, r.child("y"))
            Q = haar_orthogonal(d, r.child("Q"))
            z0 = x0 + Q @ y0
            p = DemixProblem(z0, Q, GaugeSpec("l1", d), GaugeSpec("l1", d),
                             float(np.sum(np.abs(y0))))
            rep = solve_demix(p)
            solver_success = np.max(np.abs(rep.x_star - x0)) < 1e-4
            K = l1_descent_cone(SparsityPattern.from_vector(x0))
            Kt = l1_descent_cone(SparsityPattern.from_vector(y0))
            Kt_neg = PolyhedralCone(d, -Kt.A)
            geometry_success = not intersects_nontrivially(K, Kt_neg, Q)
            agree += solver_success == geometry_success
        assert agree / n_trials >= 0.95

    def test_role_interchange(self):
        d = 10
        rng = RngState(40)
        Q = haar_orthogonal(d, rng.child("Q"))
        m0 = rng.child("m").generator().choice([-1.0, 1.0], size=d)
        c0 = sparse_signal(d, 1, rng.child("c"))
        z0 = Q @ m0 + c0
        # corruption in the objective ...
        p1 = DemixProblem(z0, Q, GaugeSpec("l1", d), GaugeSpec("linf", d), 1.0)
        r1 = solve_demix(p1)
        # ... and the interchanged program on the transported observation
        p2 = DemixProblem(Q.T @ z0, Q.T, GaugeSpec("linf", d), GaugeSpec("l1", d),
                          float(np.sum(np.abs(c0))))
        r2 = solve_demix(p2)
        assert np.max(np.abs(r1.y_star - m0)) < 1e-4
        assert np.max(np.abs(r2.x_star - m0)) < 1e-4


class TestSolveReport:
    def test_json_roundtrip(self):
        rep = SolveReport(np.array([1.0, 2.0]), np.array([0.5, -0.5]), 12, 1e-9, True)
        back = SolveReport.from_json(rep.to_json())
        np.testing.assert_array_equal(back.x_star, rep.x_star)
        np.testing.assert_array_equal(back.y_star, rep.y_star)
        assert back.iterations == 12 and back.converged


class TestSimplexLp:
    def test_trivial(self):
        st, x, obj = simplex_lp(np.array([-1.0]), np.eye(1), np.array([1.0]))
        assert st == "optimal" and abs(x[0] - 1.0) < 1e-9

    def test_infeasible(self):
        st, *_ = simplex_lp(np.array([1.0]), np.array([[1.0]]), np.array([-1.0]))
        assert st == "infeasible"

    def test_unbounded(self):
        st, *_ = simplex_lp(np.array([-1.0]), np.zeros((1, 1)), np.array([1.0]))
        assert st == "unbounded"

    def test_random_against_linprog(self):
        gen = RngState(41).generator()
        for _ in range(40):
            n, m = 5, 7
            A = gen.standard_normal((m, n))
            b = gen.uniform(0.5, 2.0, size=m)
            c = gen.standard_normal(n)
            bounds = [(-1.0, 1.0)] * n
            st, x, obj = simplex_lp(c, A, b, bounds)
            ref = linprog(c, A_ub=A, b_ub=b, bounds=bounds, method="highs")
            if st == "optimal":
                assert ref.success
                assert abs(obj - ref.fun) < 1e-8
                assert np.all(A @ x <= b + 1e-9)
                assert np.all(np.abs(x) <= 1.0 + 1e-9)
            else:
                assert not ref.success

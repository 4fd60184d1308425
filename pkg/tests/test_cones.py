import math

import numpy as np
import pytest

from conedemix.cones import (
    IntrinsicVolumeProfile,
    PolyhedralCone,
    estimate_gaussian_width,
    exact_orthant_volumes,
    exact_subspace_volumes,
    face_dimension,
    intersects_nontrivially,
    kinematic_probability,
    l1_descent_cone,
    linf_descent_cone,
    mc_intrinsic_volumes,
    orthant_cone,
    project_cone,
)
from conedemix.numerics import RngState
from conedemix.random_models import SparsityPattern, haar_orthogonal


class TestPolyhedralCone:
    def test_full_space(self):
        K = PolyhedralCone(3, np.zeros((0, 3)))
        assert K.n_halfspaces == 0
        assert K.contains(np.array([5.0, -2.0, 0.0]))

    def test_contains(self):
        K = orthant_cone(2)
        assert K.contains(np.array([1.0, 0.0]))
        assert not K.contains(np.array([-1.0, 0.0]))

    def test_shape_validation(self):
        with pytest.raises(ValueError):
            PolyhedralCone(3, np.ones((2, 2)))


class TestDescentCones:
    def test_l1_scalar(self):
        K = l1_descent_cone(SparsityPattern(1, (0,), (1,)))
        assert K.A.shape == (1, 1)
        assert K.contains(np.array([-1.0]))
        assert not K.contains(np.array([1.0]))

    def test_l1_d2(self):
        K = l1_descent_cone(SparsityPattern(2, (0,), (1,)))
        rows = {tuple(r) for r in K.A}
        assert rows == {(1.0, 1.0), (1.0, -1.0)}

    def test_l1_membership_matches_directional_derivative(self):
        pattern = SparsityPattern(4, (0, 2), (1, -1))
        K = l1_descent_cone(pattern)
        x0 = pattern.to_vector()
        gen = RngState(21).generator()
        for _ in range(1000):
            delta = gen.standard_normal(4)
            # analytic directional derivative of the l1 norm at x0 along delta
            deriv = sum(np.sign(x0[i]) * delta[i] if x0[i] != 0 else abs(delta[i])
                        for i in range(4))
            assert K.contains(delta) == (deriv <= 1e-9)

    def test_l1_complement_cap(self):
        with pytest.raises(ValueError):
            l1_descent_cone(SparsityPattern(30, (0,), (1,)))

    def test_orthant(self):
        np.testing.assert_array_equal(orthant_cone(2).A, -np.eye(2))

    def test_linf(self):
        K = linf_descent_cone(np.array([1.0, -1.0]))
        assert K.contains(np.array([-1.0, 1.0]))
        assert not K.contains(np.array([1.0, 1.0]))
        with pytest.raises(ValueError):
            linf_descent_cone(np.array([1.0, 0.5]))

    def test_linf_volumes_match_orthant(self):
        m0 = np.array([1.0, -1.0, 1.0, 1.0, -1.0])
        prof = mc_intrinsic_volumes(linf_descent_cone(m0), 20000, RngState(8))
        exact = exact_orthant_volumes(5)
        se = np.sqrt(exact.values * (1 - exact.values) / 20000)
        assert np.all(np.abs(prof.values - exact.values) <= 3 * se + 1e-12)


class TestProjection:
    def test_identity_inside(self):
        K = orthant_cone(3)
        w = np.array([1.0, 2.0, 0.5])
        np.testing.assert_allclose(project_cone(K, w), w, atol=1e-12)

    def test_orthant_clamp(self):
        np.testing.assert_allclose(project_cone(orthant_cone(2), np.array([1.0, -2.0])),
                                   [1.0, 0.0], atol=1e-10)

    def test_variational_inequality(self):
        gen = RngState(22).generator()
        for _ in range(25):
            A = gen.standard_normal((4, 3))
            K = PolyhedralCone(3, A)
            w = gen.standard_normal(3)
            p = project_cone(K, w)
            assert np.all(A @ p <= 1e-8)
            assert abs((w - p) @ p) < 1e-8
            # obtuseness against sampled cone points (NNLS-projected probes)
            for _ in range(20):
                v = project_cone(K, gen.standard_normal(3))
                assert (w - p) @ (v - p) <= 1e-7

    def test_idempotent(self):
        gen = RngState(23).generator()
        K = orthant_cone(5)
        for _ in range(50):
            p = project_cone(K, gen.standard_normal(5))
            np.testing.assert_allclose(project_cone(K, p), p, atol=1e-9)


class TestFaceDimension:
    def test_orthant_cases(self):
        K = orthant_cone(3)
        assert face_dimension(K, np.array([1.0, 1.0, 1.0])) == 3
        assert face_dimension(K, np.zeros(3)) == 0
        assert face_dimension(K, np.array([1.0, 0.0, 0.0])) == 1

    def test_outside_rejected(self):
        with pytest.raises(ValueError):
            face_dimension(orthant_cone(2), np.array([-1.0, 0.0]))

    def test_full_space(self):
        K = PolyhedralCone(4, np.zeros((0, 4)))
        assert face_dimension(K, np.ones(4)) == 4


class TestIntrinsicVolumes:
    def test_profile_validation(self):
        with pytest.raises(ValueError):
            IntrinsicVolumeProfile(2, np.array([0.5, 0.5, 0.5]))
        with pytest.raises(ValueError):
            IntrinsicVolumeProfile(2, np.array([1.2, -0.2, 0.0]))

    def test_exact_orthant_d2(self):
        np.testing.assert_allclose(exact_orthant_volumes(2).values,
                                   [0.25, 0.5, 0.25], atol=1e-15)

    def test_unit_sum_and_gauss_bonnet(self):
        for d in range(1, 21):
            v = exact_orthant_volumes(d).values
            assert abs(v.sum() - 1.0) < 1e-12
            assert abs(v[::2].sum() - 0.5) < 1e-12
            assert abs(v[1::2].sum() - 0.5) < 1e-12

    def test_subspace_profiles(self):
        assert exact_subspace_volumes(5, 0).volume(-1) == 1.0
        assert exact_subspace_volumes(5, 5).volume(4) == 1.0
        assert exact_subspace_volumes(7, 3).volume(2) == 1.0
        assert exact_subspace_volumes(7, 3).is_subspace_profile() == 3

    def test_mc_full_space(self):
        K = PolyhedralCone(4, np.zeros((0, 4)))
        prof = mc_intrinsic_volumes(K, 10, RngState(0))
        assert prof.volume(3) == 1.0

    def test_mc_orthant_small(self):
        prof = mc_intrinsic_volumes(orthant_cone(4), 20000, RngState(1))
        exact = exact_orthant_volumes(4)
        se = np.sqrt(exact.values * (1 - exact.values) / 20000)
        assert np.all(np.abs(prof.values - exact.values) <= 4 * se)

    def test_mc_l1_cone_face_floor(self):
        # every face of the l1 descent cone has dimension at least k - 1
        pattern = SparsityPattern(6, (0, 3), (1, 1))
        prof = mc_intrinsic_volumes(l1_descent_cone(pattern), 5000, RngState(2))
        for j in range(pattern.k - 1):
            assert prof.values[j] == 0.0
        assert abs(prof.values[pattern.k - 1:].sum() - 1.0) < 1e-12

    def test_mc_rotation_invariance(self):
        K = orthant_cone(4)
        U = haar_orthogonal(4, RngState(3))
        KU = PolyhedralCone(4, K.A @ U.T)
        a = mc_intrinsic_volumes(K, 20000, RngState(4))
        b = mc_intrinsic_volumes(KU, 20000, RngState(5))
        se = np.sqrt(a.values * (1 - a.values) / 20000)
        assert np.all(np.abs(a.values - b.values) <= 4 * np.sqrt(2) * se + 1e-3)

    def test_csv_roundtrip(self, tmp_path):
        prof = exact_orthant_volumes(5)
        path = tmp_path / "prof.csv"
        prof.to_csv(path)
        back = IntrinsicVolumeProfile.from_csv(path)
        np.testing.assert_array_equal(back.values, prof.values)


class TestKinematic:
    def test_two_orthants_d2(self):
        prof = exact_orthant_volumes(2)
        assert kinematic_probability(prof, prof) == 0.5

    def test_subspace_pair(self):
        assert kinematic_probability(exact_subspace_volumes(4, 2),
                                     exact_subspace_volumes(4, 3)) == 1.0
        assert kinematic_probability(exact_subspace_volumes(4, 2),
                                     exact_subspace_volumes(4, 2)) == 0.0

    def test_dimension_mismatch(self):
        with pytest.raises(ValueError):
            kinematic_probability(exact_orthant_volumes(2), exact_orthant_volumes(3))

    def test_subspace_vs_cone_crofton(self):
        # Crofton case: random n-subspace meets K with prob = 2(v_{d-n+1} + v_{d-n+3} + ...)
        d, n = 6, 3
        prof = exact_orthant_volumes(d)
        p = kinematic_probability(prof, exact_subspace_volumes(d, n))
        expected = 2 * sum(prof.volume(i) for i in range(d - n, d, 2))
        assert abs(p - expected) < 1e-14


class TestIntersectionOracle:
    def test_shared_ray(self):
        K = orthant_cone(2)
        assert intersects_nontrivially(K, K, np.eye(2))

    def test_opposite_orthants(self):
        K = orthant_cone(2)
        Kneg = PolyhedralCone(2, np.eye(2))
        assert not intersects_nontrivially(K, Kneg, np.eye(2))

    def test_non_orthogonal_rejected(self):
        with pytest.raises(ValueError):
            intersects_nontrivially(orthant_cone(2), orthant_cone(2),
                                    np.array([[1.0, 1.0], [0.0, 1.0]]))

    def test_orthant_pair_frequency_d2(self):
        K = orthant_cone(2)
        hits = sum(intersects_nontrivially(K, K, haar_orthogonal(2, RngState(6).child(i)))
                   for i in range(2000))
        # exact probability 1/2; 4 sigma at N=2000 is 0.045
        assert abs(hits / 2000 - 0.5) < 0.045

    def test_symmetry_of_roles(self):
        K = orthant_cone(3)
        pattern = SparsityPattern(3, (0,), (1,))
        Kt = l1_descent_cone(pattern)
        for i in range(50):
            Q = haar_orthogonal(3, RngState(7).child(i))
            assert (intersects_nontrivially(K, Kt, Q)
                    == intersects_nontrivially(Kt, K, Q.T))

    def test_subspace_line_always_hits_halfspace(self):
        # a line almost surely misses the orthant in d=3 only when tilted away;
        # compare against the Crofton probability estimate
        d = 3
        line = PolyhedralCone(d, np.array([[0.0, 0.0, 1.0], [0.0, 0.0, -1.0],
                                           [0.0, 1.0, 0.0], [0.0, -1.0, 0.0]]))
        prof_line = exact_subspace_volumes(d, 1)
        p_exact = kinematic_probability(exact_orthant_volumes(d), prof_line)
        hits = sum(intersects_nontrivially(orthant_cone(d), line,
                                           haar_orthogonal(d, RngState(9).child(i)))
                   for i in range(1000))
        se = math.sqrt(p_exact * (1 - p_exact) / 1000)
        assert abs(hits / 1000 - p_exact) < 4 * se


class TestGaussianWidth:
    def test_full_space_chi_mean(self):
        d = 9
        K = PolyhedralCone(d, np.zeros((0, d)))
        mean, se = estimate_gaussian_width(K, 20000, RngState(10))
        assert abs(mean - math.sqrt(d) * (1 - 1 / (4 * d))) < 2 * se + 0.01

    def test_half_line(self):
        A = np.array([[-1.0, 0.0], [0.0, 1.0], [0.0, -1.0]])
        mean, se = estimate_gaussian_width(PolyhedralCone(2, A), 20000, RngState(0))
        assert abs(mean - 1 / math.sqrt(2 * math.pi)) < 3 * se

    def test_orthant_second_moment(self):
        # E ||Pi(omega)||^2 = d/2 exactly for the orthant
        d, n = 10, 20000
        mean, se = estimate_gaussian_width(orthant_cone(d), n, RngState(0))
        second_moment = mean ** 2 + se ** 2 * n
        assert abs(second_moment / d - 0.5) < 0.03

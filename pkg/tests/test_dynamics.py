import numpy as np
import pytest

from eqlab.dynamics import (
    Correspondence,
    CostGuardError,
    RationalSelfMap,
    backward_orbit_sample,
    degree_growth,
    invariance_defect,
    mixing_correlations,
    preimages,
    pushforward_regression,
    topological_degree,
)
from eqlab.poly import HomogeneousPoly, PolyMap
from eqlab.projective import (
    EmpiricalMeasure,
    ProjectivePoint,
    builtin_test_functions,
    get_test_function,
    sample_fs_many,
)
from eqlab.statutil import fit_log_slope


def squaring_map():
    return RationalSelfMap.from_texts(["x0^2", "x1^2"], 2)


def quadratic_map(c: complex) -> RationalSelfMap:
    comps = [
        HomogeneousPoly(2, 2, {(2, 0): 1.0 + 0j, (0, 2): complex(c)}, "float"),
        HomogeneousPoly(2, 2, {(0, 2): 1.0 + 0j}, "float"),
    ]
    return RationalSelfMap(PolyMap(comps, reduced=True))


def cremona():
    return RationalSelfMap.from_texts(["x1*x2", "x0*x2", "x0*x1"], 3)


class TestPreimages:
    def test_square_roots_of_one(self):
        fib = preimages(squaring_map(), ProjectivePoint.from_coords([1, 1]))
        want = {ProjectivePoint.from_coords([1, 1]), ProjectivePoint.from_coords([-1, 1])}
        assert len(fib) == 2 and all(p in want for p in fib)

    def test_double_point_at_zero(self):
        fib = preimages(squaring_map(), ProjectivePoint.from_coords([0, 1]))
        assert len(fib) == 2
        assert all(p == ProjectivePoint.from_coords([0, 1]) for p in fib)

    def test_cremona_involution_fiber(self):
        # sigma is a birational involution: the generic fiber is sigma(y)
        sigma = cremona()
        y = ProjectivePoint.from_coords([1.3, 0.4 + 0.2j, 0.9])
        fib = preimages(sigma, y)
        assert len(fib) == 1
        img = sigma.forward_many(fib[0].coords[None, :])[0]
        assert ProjectivePoint.from_coords(img) == y


class TestTopologicalDegree:
    def test_cubing(self):
        assert topological_degree(RationalSelfMap.from_texts(["x0^3", "x1^3"], 2)) == 3

    def test_squares_on_p2(self):
        # brute force: solving for a generic target gives the 4 sign classes
        assert topological_degree(RationalSelfMap.from_texts(["x0^2", "x1^2", "x2^2"], 3)) == 4

    def test_cremona_is_birational(self):
        assert topological_degree(cremona()) == 1

    def test_correspondence_degree_follows_g(self):
        corr = Correspondence(g=squaring_map(), h=RationalSelfMap.from_texts(["x0^3", "x1^3"], 2))
        assert corr.d_top == 2
        y = ProjectivePoint.from_coords([1.2, 1])
        assert len(preimages(corr, y)) == 2


class TestBackwardOrbit:
    def test_depth_zero_is_dirac(self):
        x0 = ProjectivePoint.from_coords([2, 1])
        mu = backward_orbit_sample(squaring_map(), x0, 0, 100, np.random.default_rng(0))
        assert abs(mu.total - 1.0) < 1e-12
        assert all(ProjectivePoint.from_coords(p) == x0 for p in mu.points)

    def test_circle_moments(self):
        # backward orbits of the squaring map equidistribute on the unit
        # circle whose moments all vanish
        mu = backward_orbit_sample(
            squaring_map(), ProjectivePoint.from_coords([2, 1]), 25, 100_000,
            np.random.default_rng(1),
        )
        z = mu.points[:, 0] / mu.points[:, 1]
        for j in range(1, 9):
            assert abs(np.mean(z**j)) <= 0.02

    def test_independence_from_start(self):
        rng = np.random.default_rng(2)
        psis = builtin_test_functions(1)
        mus = [
            backward_orbit_sample(squaring_map(), ProjectivePoint.from_coords(v), 25, 40_000, rng)
            for v in ([2, 1], [0.31 + 0.2j, 1])
        ]
        for psi in psis:
            assert abs(mus[0].pair(psi) - mus[1].pair(psi)) <= 0.02

    def test_schedule_pullback_independence(self):
        # a fixed random composition schedule yields the same cloud
        # statistics for two generic starting points
        rng = np.random.default_rng(3)
        pool = [squaring_map(), quadratic_map(-1.0)]
        schedule = [pool[i] for i in rng.integers(0, 2, size=20)]
        psis = builtin_test_functions(1)
        mus = [
            backward_orbit_sample(schedule, ProjectivePoint.from_coords(v), 20, 40_000, rng)
            for v in ([1.7, 1], [0.4 - 1.1j, 1])
        ]
        for psi in psis:
            assert abs(mus[0].pair(psi) - mus[1].pair(psi)) <= 0.03

    def test_consistency_scaling(self):
        # doubling the sample size shrinks the spread of pairings by ~sqrt(2)
        psi = get_test_function(1, "re_01")
        x0 = ProjectivePoint.from_coords([2, 1])
        spreads = []
        for n_samples in (2000, 4000):
            vals = [
                backward_orbit_sample(
                    quadratic_map(-1.0), x0, 15, n_samples, np.random.default_rng(100 + r)
                ).pair(psi)
                for r in range(20)
            ]
            spreads.append(np.std(vals))
        assert 1.1 <= spreads[0] / spreads[1] <= 1.9


class TestInvarianceDefect:
    def test_equilibrium_cloud_small_defect(self):
        mu = backward_orbit_sample(
            squaring_map(), ProjectivePoint.from_coords([2, 1]), 25, 100_000,
            np.random.default_rng(4),
        )
        assert invariance_defect(squaring_map(), mu, builtin_test_functions(1)) <= 0.02

    def test_fixed_critical_point_exact(self):
        # the fiber of [1:0] under the squaring map is [1:0] doubled, so a
        # Dirac mass there has zero defect
        mu = EmpiricalMeasure(np.array([[1.0 + 0j, 0.0]]), np.array([1.0]))
        assert invariance_defect(squaring_map(), mu, builtin_test_functions(1)) < 1e-14

    def test_identity_map_exact(self):
        ident = RationalSelfMap.from_texts(["x0", "x1"], 2)
        pts = sample_fs_many(1, 2000, np.random.default_rng(5))
        mu = EmpiricalMeasure(pts, np.full(2000, 1 / 2000))
        assert invariance_defect(ident, mu, builtin_test_functions(1)) < 1e-13


class TestMixing:
    def test_fourier_pair_statistically_zero(self):
        # cos dies under one pushforward of the doubling map, so every
        # correlation at positive lag is zero (up to machine noise)
        f = squaring_map()
        mu = backward_orbit_sample(f, ProjectivePoint.from_coords([1.7, 1]), 25, 20_000,
                                   np.random.default_rng(6))
        phi = get_test_function(1, "re_01")
        corr = mixing_correlations(f, mu, phi, phi, 8)
        assert corr[0][0] >= 0.0  # variance at lag zero
        for i_n, se in corr[1:]:
            assert abs(i_n) <= max(3 * se, 1e-12)

    def test_generic_quadratic_decay_rate(self):
        f = quadratic_map(-0.2 + 0.15j)
        mu = backward_orbit_sample(f, ProjectivePoint.from_coords([1.7, 1]), 30, 20_000,
                                   np.random.default_rng(7))
        phi = get_test_function(1, "re2_01")
        corr = mixing_correlations(f, mu, phi, phi, 10)
        slope = fit_log_slope(range(1, 11), [abs(i) for i, _ in corr[1:]])
        # the mixing speed is d_{k-1}/d_t = 1/2 up to epsilon
        assert np.exp(slope) <= 0.5 + 0.1

    def test_correspondences_rejected(self):
        corr = Correspondence(g=squaring_map(), h=squaring_map())
        mu = EmpiricalMeasure(sample_fs_many(1, 10, np.random.default_rng(8)), np.full(10, 0.1))
        phi = get_test_function(1, "re_01")
        with pytest.raises(TypeError):
            mixing_correlations(corr, mu, phi, phi, 3)

    def test_pushforward_regression_report(self):
        corr = Correspondence(g=squaring_map(), h=cremona_like_p1())
        mu = backward_orbit_sample(squaring_map(), ProjectivePoint.from_coords([2, 1]), 15,
                                   200, np.random.default_rng(9))
        devs = pushforward_regression(corr, mu, get_test_function(1, "re2_01"), 3)
        assert len(devs) == 3 and all(d >= 0 for d in devs)


def cremona_like_p1():
    # an involution of P^1 to pair with the squaring map in correspondences
    return RationalSelfMap.from_texts(["x1", "x0"], 2)


class TestDegreeGrowth:
    def test_pure_powers(self):
        res = degree_growth(RationalSelfMap.from_texts(["x0^2", "x1^2", "x2^2"], 3), 4)
        assert res.degrees == [2, 4, 8, 16]
        assert res.d_top == 4
        assert res.hypothesis_satisfied  # d_1 = 2 < 4 = d_t

    def test_cremona_alternates(self):
        res = degree_growth(cremona(), 6)
        assert res.degrees == [2, 1, 2, 1, 2, 1]

    def test_monomial_map_golden_ratio(self):
        # exponent matrix [[1,1],[1,0]]: degrees follow the Fibonacci
        # recursion and the 8th root approaches the golden ratio
        res = degree_growth(RationalSelfMap.from_texts(["x0*x1", "x0*x2", "x2^2"], 3), 8)
        assert res.degrees == [2, 3, 5, 8, 13, 21, 34, 55]
        golden = (1 + np.sqrt(5)) / 2
        assert abs(res.roots[-1] - golden) / golden < 0.05

    def test_p1_records_d0(self):
        res = degree_growth(squaring_map(), 3)
        assert res.d_km1_estimate == 1.0
        assert res.hypothesis_satisfied

    def test_cost_guard(self):
        with pytest.raises(CostGuardError):
            degree_growth(cremona(), 9)

    def test_float_mode_rejected(self):
        with pytest.raises(ValueError):
            degree_growth(quadratic_map(0.5), 3)

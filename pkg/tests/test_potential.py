import math

import numpy as np
import pytest

from eqlab.poly import parse_poly
from eqlab.potential import (
    CompactSet,
    QpshWitness,
    capacity_upper_bound,
    chordal_potential_eval,
    coordinate_hyperplane,
    exceedance_profile,
    full_space,
    make_witness,
    moderate_integral,
    normalize_qpsh,
    r1_bound_audit,
    real_locus,
)
from eqlab.projective import (
    EmpiricalMeasure,
    ProjectivePoint,
    chordal_distance_many,
    sample_fs_many,
)
from eqlab.sections import SectionEnsemble, sample_section


def random_witness(k, n, rng, mode, samples=10**4):
    sec = sample_section(SectionEnsemble(k=k, n=n, l=1, field="complex"), rng)[0]
    return normalize_qpsh(make_witness(sec), mode, samples, rng)


class TestNormalization:
    def test_power_witness_max_already_zero(self):
        # sup of |x0|/||z|| is 1, so the shift stays at 0
        w = normalize_qpsh(
            make_witness(parse_poly("x0^8", 2)), "max_zero", 2000, np.random.default_rng(0)
        )
        assert abs(w.shift) < 1e-9
        assert w.max_location is not None
        assert abs(w.value_at(w.max_location)) < 1e-15

    def test_balanced_product_witness(self):
        # maximizing |st| on the unit sphere gives 1/2, so the witness value
        # peaks at log(1/2)/2
        w = make_witness(parse_poly("(x0*x1)^4", 2))
        wn = normalize_qpsh(w, "max_zero", 2000, np.random.default_rng(1))
        assert abs(-wn.shift - 0.5 * math.log(0.5)) < 1e-10

    def test_mean_then_max_idempotent_within_noise(self):
        rng = np.random.default_rng(2)
        w = random_witness(1, 12, rng, "mean_zero", samples=2 * 10**4)
        w2 = normalize_qpsh(w, "mean_zero", 2 * 10**4, rng)
        assert abs(w2.shift - w.shift) <= 5 * (w.mean_stderr + w2.mean_stderr)

    def test_mean_zero_needs_samples(self):
        with pytest.raises(ValueError):
            normalize_qpsh(
                make_witness(parse_poly("x0^2", 2)), "mean_zero", 100, np.random.default_rng(0)
            )

    def test_values_stay_below_shift(self):
        rng = np.random.default_rng(3)
        w = random_witness(1, 16, rng, "max_zero", samples=4000)
        pts = sample_fs_many(1, 10**4, rng)
        assert np.max(w.value_many(pts)) <= 1e-9


class TestR1Audit:
    def test_k1_bound(self):
        res = r1_bound_audit(1, 40, [10, 20], np.random.default_rng(4),
                             n_mean_samples=10**4, n_sup_samples=800)
        assert res.bound == 0.5
        assert res.passed and res.observed_max <= 0.55

    def test_k2_bound_value(self):
        res = r1_bound_audit(2, 10, [6], np.random.default_rng(5),
                             n_mean_samples=10**4, n_sup_samples=500)
        assert abs(res.bound - 0.5 * (1 + math.log(2))) < 1e-15
        assert res.passed


class TestModerateIntegral:
    def test_alpha_zero_limit(self):
        rng = np.random.default_rng(6)
        w = random_witness(1, 10, rng, "max_zero", samples=2000)
        res = moderate_integral("fs", w, 0.01, 50_000, rng)
        assert abs(res.estimate - 1.0) < 0.05

    def test_monotone_in_alpha(self):
        rng = np.random.default_rng(7)
        w = random_witness(1, 10, rng, "max_zero", samples=2000)
        vals = [moderate_integral("fs", w, a, 50_000, rng).estimate for a in (0.25, 0.5, 1.0)]
        assert vals[0] <= vals[1] <= vals[2]

    def test_requires_max_zero(self):
        rng = np.random.default_rng(8)
        w = random_witness(1, 10, rng, "mean_zero", samples=10**4)
        with pytest.raises(ValueError):
            moderate_integral("fs", w, 0.5, 1000, rng)

    def test_real_measure_finite(self):
        rng = np.random.default_rng(9)
        w = random_witness(1, 10, rng, "max_zero", samples=2000)
        res = moderate_integral("real_fs", w, 0.5, 50_000, rng)
        assert np.isfinite(res.estimate)


class TestExceedance:
    def test_rows_monotone_and_bounded(self):
        rng = np.random.default_rng(10)
        w = random_witness(1, 20, rng, "mean_zero", samples=2 * 10**4)
        prof = exceedance_profile("fs", w, [0.05, 0.1, 0.2], 10**5, rng)
        ps = [r.count for r in prof.rows]
        assert all(a >= b for a, b in zip(ps, ps[1:]))
        assert all(r.p_hat <= 1.0 for r in prof.rows)

    def test_exponential_decay_slope(self):
        rng = np.random.default_rng(11)
        w = random_witness(1, 20, rng, "mean_zero", samples=2 * 10**4)
        prof = exceedance_profile("fs", w, [0.05, 0.1, 0.15, 0.2], 2 * 10**5, rng)
        assert prof.slope is not None and prof.slope <= -0.5

    def test_grid_validation(self):
        rng = np.random.default_rng(12)
        w = random_witness(1, 10, rng, "mean_zero", samples=10**4)
        with pytest.raises(ValueError):
            exceedance_profile("fs", w, [0.2, 0.1], 1000, rng)


class TestCapacity:
    def test_full_space_is_exactly_one(self):
        rng = np.random.default_rng(13)
        wits = [random_witness(1, n, rng, "max_zero", samples=2000) for n in (6, 12)]
        assert capacity_upper_bound(full_space(1), wits, rng) == 1.0

    def test_hyperplane_is_zero(self):
        rng = np.random.default_rng(14)
        w = normalize_qpsh(
            make_witness(parse_poly("x0", 3)), "max_zero", 2000, rng
        )
        assert capacity_upper_bound(coordinate_hyperplane(2, 0), [w], rng) == 0.0

    def test_antitone_in_nested_sets(self):
        rng = np.random.default_rng(15)
        wits = [random_witness(1, n, rng, "max_zero", samples=2000) for n in (8, 14)]

        def ball(radius):
            center = np.array([1.0 + 0j, 0.0])
            return CompactSet(
                name=f"ball{radius}",
                dim=1,
                membership=lambda pts: chordal_distance_many(pts, center) <= radius,
                sampler=lambda n, r: _ball_sampler(center, radius, n, r),
            )

        def _ball_sampler(center, radius, n, r):
            out = []
            while len(out) < n:
                pts = sample_fs_many(1, 4 * n, r)
                keep = chordal_distance_many(pts, center) <= radius
                out.extend(pts[keep])
            return np.array(out[:n])

        small = capacity_upper_bound(ball(0.3), wits, np.random.default_rng(16))
        big = capacity_upper_bound(ball(0.9), wits, np.random.default_rng(16))
        assert small <= big

    def test_real_locus_consistency_across_dimensions(self):
        # the real locus bound computed by the same protocol is stable in k
        rng = np.random.default_rng(17)
        caps = {}
        for k in (2, 3):
            wits = [
                random_witness(k, n, rng, "max_zero", samples=3000)
                for n in (6, 8, 10)
                for _ in range(30)
            ]
            caps[k] = capacity_upper_bound(real_locus(k), wits, rng, n_samples=2000)
        assert abs(caps[3] - caps[2]) <= 0.05


class TestChordalPotential:
    def test_antipodal_atom(self):
        nu = EmpiricalMeasure.from_points([ProjectivePoint.from_coords([0, 1])], [1.0])
        val = chordal_potential_eval(nu, ProjectivePoint.from_coords([1, 0]))
        assert val == 0.0

    def test_atom_hit_flagged(self):
        p = ProjectivePoint.from_coords([1, 1])
        nu = EmpiricalMeasure.from_points([p], [1.0])
        assert chordal_potential_eval(nu, p) == float("-inf")

    def test_never_positive(self):
        rng = np.random.default_rng(18)
        nu = EmpiricalMeasure(sample_fs_many(1, 200, rng), np.full(200, 1 / 200))
        for _ in range(20):
            x = ProjectivePoint.from_coords(sample_fs_many(1, 1, rng)[0])
            assert chordal_potential_eval(nu, x) <= 0.0

    def test_fs_cloud_matches_log_kernel_constant(self):
        # rotation invariance: the potential of the invariant measure is the
        # constant E[log d]; on P^1 the squared distance is uniform on [0,1]
        # so the constant is the quadrature value of (1/2)log(s) ds
        grid = np.linspace(1e-12, 1.0, 200001)
        const = float(np.trapezoid(0.5 * np.log(grid), grid))
        rng = np.random.default_rng(19)
        nu = EmpiricalMeasure(sample_fs_many(1, 10**4, rng), np.full(10**4, 1e-4))
        x = ProjectivePoint.from_coords([1.3, 0.7 - 0.2j])
        assert abs(chordal_potential_eval(nu, x) - const) < 0.01
        assert abs(const - (-0.5)) < 1e-3

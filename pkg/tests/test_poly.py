from fractions import Fraction

import numpy as np
import pytest

from eqlab.poly import (
    ExactComplex,
    HomogeneousPoly,
    InhomogeneityError,
    ModeError,
    PolyMap,
    PolyParseError,
    ZeroMapError,
    compose_and_reduce,
    exact_gcd,
    exact_resultant_x0,
    parse_poly,
    restrict_to_line,
)
from eqlab.projective import ProjectivePoint


def rand_exact_poly(rng, nvars, degree, density=0.7):
    from itertools import product

    d = {}
    for e in product(range(degree + 1), repeat=nvars):
        if sum(e) == degree and rng.random() < density:
            d[e] = ExactComplex(Fraction(int(rng.integers(-5, 6))), Fraction(int(rng.integers(-2, 3))))
    if not d:
        d[(degree,) + (0,) * (nvars - 1)] = ExactComplex(1)
    return HomogeneousPoly(nvars, degree, d, "exact")


class TestParser:
    def test_simple_terms(self):
        p = parse_poly("x0^2 + 2*x1*x2", 3)
        assert p.degree == 2 and p.n_terms() == 2
        assert p.coeffs[(0, 1, 1)] == ExactComplex(2)

    def test_inhomogeneous_names_both_degrees(self):
        with pytest.raises(InhomogeneityError) as exc:
            parse_poly("x0 + x1^2", 2)
        assert exc.value.degrees == (1, 2)

    def test_expansion(self):
        p = parse_poly("(x0+x1)^2", 2)
        assert p.coeffs == parse_poly("x0^2 + 2*x0*x1 + x1^2", 2).coeffs

    def test_rational_and_decimal_coefficients(self):
        p = parse_poly("3/4*x0 - 0.25*x1", 2)
        assert p.coeffs[(1, 0)] == ExactComplex(Fraction(3, 4))
        assert p.coeffs[(0, 1)] == ExactComplex(Fraction(-1, 4))

    def test_imaginary_unit(self):
        p = parse_poly("i*x0^2 + x1^2", 2)
        assert p.coeffs[(2, 0)] == ExactComplex(0, 1)

    def test_syntax_error_carries_position(self):
        with pytest.raises(PolyParseError) as exc:
            parse_poly("x0 + @", 2)
        assert exc.value.pos == 5

    def test_unknown_variable_rejected(self):
        with pytest.raises(PolyParseError):
            parse_poly("x5", 2)

    def test_division_by_constant_only(self):
        p = parse_poly("x0/2", 2)
        assert p.coeffs[(1, 0)] == ExactComplex(Fraction(1, 2))
        with pytest.raises(PolyParseError):
            parse_poly("x0/x1", 2)

    def test_roundtrip_through_text(self):
        rng = np.random.default_rng(0)
        for _ in range(20):
            p = rand_exact_poly(rng, 3, int(rng.integers(1, 5)))
            q = parse_poly(p.to_text(), 3)
            assert q.coeffs == p.coeffs

    def test_canonical_order_is_reverse_lex(self):
        p = parse_poly("x2^2 + x0*x1 + x0*x2", 3)
        assert [e for e, _ in p.sorted_terms()] == [(0, 0, 2), (1, 0, 1), (1, 1, 0)]


class TestEvaluation:
    def test_product_at_diagonal_point(self):
        p = parse_poly("x0*x1", 2)
        pt = ProjectivePoint.from_coords([1, 1])
        assert abs(p.evaluate(pt) - 0.5) < 1e-14

    def test_zero_of_square(self):
        p = parse_poly("x0^2", 2)
        assert p.evaluate(ProjectivePoint.from_coords([0, 1])) == 0

    def test_log_scaled_is_scale_invariant(self):
        p = parse_poly("x0^3 + x1^2*x2", 3)
        z = np.array([0.3 + 0.1j, -0.7, 0.2 + 0.9j])
        lam = 3 + 4j
        assert abs(p.log_scaled(z) - p.log_scaled(lam * z)) < 1e-10

    def test_high_degree_two_chart_stability(self):
        # direct monomial evaluation agrees with the split-chart Horner
        rng = np.random.default_rng(1)
        n = 80
        coeffs = {(j, n - j): complex(rng.standard_normal(), rng.standard_normal())
                  for j in range(n + 1)}
        p = HomogeneousPoly(2, n, coeffs, "float")
        pts = rng.standard_normal((50, 2)) + 1j * rng.standard_normal((50, 2))
        pts /= np.linalg.norm(pts, axis=1, keepdims=True)
        direct = sum(c * pts[:, 0] ** e[0] * pts[:, 1] ** e[1] for e, c in coeffs.items())
        assert np.max(np.abs(p.eval_many(pts) - direct)) < 1e-9


class TestComposeAndReduce:
    def test_cremona_squared_is_identity(self):
        # hand expansion: components of sigma(sigma) share the factor x0*x1*x2
        sigma = PolyMap.from_texts(["x1*x2", "x0*x2", "x0*x1"], 3)
        s2 = compose_and_reduce(sigma, sigma)
        assert s2.degree == 1
        assert [c.to_text() for c in s2.components] == ["x0", "x1", "x2"]

    def test_pure_powers_do_not_reduce(self):
        f = PolyMap.from_texts(["x0^2", "x1^2", "x2^2"], 3)
        assert compose_and_reduce(f, f).degree == 4

    def test_monomial_map_degree_sequence(self):
        # exponent-matrix oracle: [[1,1],[1,0]]^n row sums give 2,3,5,8,...
        f = PolyMap.from_texts(["x0*x1", "x0*x2", "x2^2"], 3)
        M = np.array([[1, 1], [1, 0]])
        expected = []
        P = M.copy()
        for _ in range(4):
            expected.append(int(P.sum(axis=1).max()))
            P = P @ M
        g = f
        degs = [f.degree]
        for _ in range(3):
            g = compose_and_reduce(g, f)
            degs.append(g.degree)
        assert degs == expected == [2, 3, 5, 8]

    def test_float_mode_refused(self):
        f = PolyMap.from_texts(["x0^2", "x1^2"], 2)
        g = PolyMap([c.to_float() for c in f.components])
        with pytest.raises(ModeError):
            compose_and_reduce(g, g)

    def test_zero_map_rejected(self):
        with pytest.raises(ZeroMapError):
            PolyMap([HomogeneousPoly(2, 1, {}, "exact"), HomogeneousPoly(2, 1, {}, "exact")])

    def test_degree_associativity_on_random_maps(self):
        rng = np.random.default_rng(2)
        for _ in range(5):
            f = PolyMap([rand_exact_poly(rng, 3, 2, 0.5) for _ in range(3)])
            g = PolyMap([rand_exact_poly(rng, 3, 2, 0.5) for _ in range(3)])
            h = PolyMap([rand_exact_poly(rng, 3, 1, 0.8) for _ in range(3)])
            left = compose_and_reduce(compose_and_reduce(f, g), h)
            right = compose_and_reduce(f, compose_and_reduce(g, h))
            assert left.degree == right.degree

    def test_degree_submultiplicative(self):
        rng = np.random.default_rng(3)
        maps = [
            PolyMap.from_texts(["x1*x2", "x0*x2", "x0*x1"], 3),
            PolyMap.from_texts(["x0*x1", "x0*x2", "x2^2"], 3),
            PolyMap([rand_exact_poly(rng, 3, 2, 0.6) for _ in range(3)]),
        ]
        for f in maps:
            iterates = [f]
            for _ in range(3):
                iterates.append(compose_and_reduce(iterates[-1], f))
            degs = [g.degree for g in iterates]
            for i in range(len(degs)):
                for j in range(len(degs)):
                    if i + j + 1 < len(degs):
                        assert degs[i + j + 1] <= degs[i] * degs[j]

    def test_homogeneity_preserved_by_all_ops(self):
        rng = np.random.default_rng(4)
        p = rand_exact_poly(rng, 3, 3)
        q = rand_exact_poly(rng, 3, 3)
        for out in (p + q, p * q, p**2):
            for e in out.coeffs:
                assert sum(e) == out.degree


class TestGcdAndResultant:
    def test_exact_gcd_of_shared_factor(self):
        p = parse_poly("x0*x1*(x0 + x1)", 3)
        q = parse_poly("x0*x1*(x0 - x2)", 3)
        g = exact_gcd(p, q)
        assert g.degree == 2  # x0*x1

    def test_resultant_degree_is_bezout(self):
        # the resultant of coprime forms of full x0-degree is a binary form
        # of degree deg(p)*deg(q)
        rng = np.random.default_rng(5)
        for np_, nq_ in [(1, 1), (2, 1), (2, 2), (3, 2)]:
            p = rand_exact_poly(rng, 3, np_, 1.0)
            q = rand_exact_poly(rng, 3, nq_, 1.0)
            if exact_gcd(p, q).degree > 0:
                continue
            r = exact_resultant_x0(p, q)
            assert r.degree == np_ * nq_


class TestRestrictToLine:
    def test_line_inside_zero_set_flagged(self):
        a = ProjectivePoint.from_coords([0, 1, 0])
        b = ProjectivePoint.from_coords([0, 0, 1])
        assert restrict_to_line(parse_poly("x0", 3), a, b) is None

    def test_linear_restriction(self):
        a = ProjectivePoint.from_coords([1, 0, 0])
        b = ProjectivePoint.from_coords([0, 1, 0])
        q = restrict_to_line(parse_poly("x0", 3), a, b)
        assert q.degree == 1
        assert abs(q.coeffs[(1, 0)] - 1.0) < 1e-14
        assert (0, 1) not in q.coeffs

    def test_degree_preserved_when_nonzero(self):
        rng = np.random.default_rng(6)
        p = rand_exact_poly(rng, 3, 4)
        a = ProjectivePoint.from_coords(rng.standard_normal(3) + 1j * rng.standard_normal(3))
        b = ProjectivePoint.from_coords(rng.standard_normal(3) + 1j * rng.standard_normal(3))
        q = restrict_to_line(p, a, b)
        assert q is not None and q.degree == 4

    def test_coincident_points_rejected(self):
        a = ProjectivePoint.from_coords([1, 2, 3])
        with pytest.raises(ValueError):
            restrict_to_line(parse_poly("x0", 3), a, a)

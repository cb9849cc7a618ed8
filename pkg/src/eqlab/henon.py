"""Regular polynomial automorphisms of C^2 (Henon type).

Maps are kept in the normal form f(x, y) = (y, p(y) - a*x) with the
symbolic inverse g(x, y) = ((p(x) - y)/a, x); the pair is verified to
compose to the identity in exact arithmetic.  Intersection clouds of
backward/forward images of affine lines are computed by exact symbolic
composition of the two scalar line equations followed by one floating
resultant solve in P^2.  Green functions are estimated by scaled-log
forward iteration, which cannot overflow.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .dynamics import CostGuardError
from .poly import ExactComplex, HomogeneousPoly, parse_expression
from .projective import EmpiricalMeasure

BEZOUT_GUARD = 4096


class DegeneratePairError(RuntimeError):
    pass


# ---------------------------------------------------------------------------
# affine polynomials in two variables


class AffinePoly:
    """Sparse polynomial in affine coordinates (x, y); exact or float mode."""

    __slots__ = ("coeffs", "mode")

    def __init__(self, coeffs: dict, mode: str):
        self.coeffs = {
            (int(i), int(j)): c
            for (i, j), c in coeffs.items()
            if (bool(c) if mode == "exact" else c != 0)
        }
        self.mode = mode

    @classmethod
    def constant(cls, v, mode: str = "exact") -> "AffinePoly":
        c = ExactComplex.from_number(v) if mode == "exact" else complex(v)
        return cls({(0, 0): c}, mode)

    @classmethod
    def var_x(cls) -> "AffinePoly":
        return cls({(1, 0): ExactComplex(1)}, "exact")

    @classmethod
    def var_y(cls) -> "AffinePoly":
        return cls({(0, 1): ExactComplex(1)}, "exact")

    @classmethod
    def from_univariate(cls, coeffs_asc: list, in_y: bool) -> "AffinePoly":
        d = {}
        for j, c in enumerate(coeffs_asc):
            key = (0, j) if in_y else (j, 0)
            d[key] = ExactComplex.from_number(c)
        return cls(d, "exact")

    @property
    def degree(self) -> int:
        return max((i + j for i, j in self.coeffs), default=0)

    @property
    def is_zero(self) -> bool:
        return not self.coeffs

    def __add__(self, o: "AffinePoly") -> "AffinePoly":
        out = dict(self.coeffs)
        for e, c in o.coeffs.items():
            out[e] = out[e] + c if e in out else c
        return AffinePoly(out, self.mode)

    def __neg__(self) -> "AffinePoly":
        return AffinePoly({e: -c for e, c in self.coeffs.items()}, self.mode)

    def __sub__(self, o: "AffinePoly") -> "AffinePoly":
        return self + (-o)

    def __mul__(self, o: "AffinePoly") -> "AffinePoly":
        out: dict = {}
        for (i1, j1), c1 in self.coeffs.items():
            for (i2, j2), c2 in o.coeffs.items():
                e = (i1 + i2, j1 + j2)
                prod = c1 * c2
                out[e] = out[e] + prod if e in out else prod
        return AffinePoly(out, self.mode)

    def scale(self, v) -> "AffinePoly":
        c0 = ExactComplex.from_number(v) if self.mode == "exact" else complex(v)
        return AffinePoly({e: c * c0 for e, c in self.coeffs.items()}, self.mode)

    def substitute(self, fx: "AffinePoly", fy: "AffinePoly") -> "AffinePoly":
        max_i = max((i for i, _ in self.coeffs), default=0)
        max_j = max((j for _, j in self.coeffs), default=0)
        px = [AffinePoly.constant(1, self.mode)]
        for _ in range(max_i):
            px.append(px[-1] * fx)
        py = [AffinePoly.constant(1, self.mode)]
        for _ in range(max_j):
            py.append(py[-1] * fy)
        out = AffinePoly({}, self.mode)
        for (i, j), c in self.coeffs.items():
            out = out + (px[i] * py[j]).scale(c)
        return out

    def to_float(self) -> "AffinePoly":
        if self.mode == "float":
            return self
        return AffinePoly({e: c.to_complex() for e, c in self.coeffs.items()}, "float")

    def float_terms(self) -> list[tuple[int, int, complex]]:
        return [(i, j, complex(c)) for (i, j), c in self.to_float().coeffs.items()]

    def eval(self, x: complex, y: complex) -> complex:
        return sum(c * x**i * y**j for i, j, c in self.float_terms())

    def eval_many(self, xs: np.ndarray, ys: np.ndarray) -> np.ndarray:
        out = np.zeros(len(xs), dtype=complex)
        for i, j, c in self.float_terms():
            out += c * xs**i * ys**j
        return out

    def derivative(self, var: int) -> "AffinePoly":
        out = {}
        for (i, j), c in self.coeffs.items():
            if var == 0 and i > 0:
                k = ExactComplex(i) if self.mode == "exact" else float(i)
                out[(i - 1, j)] = c * k
            elif var == 1 and j > 0:
                k = ExactComplex(j) if self.mode == "exact" else float(j)
                out[(i, j - 1)] = c * k
        return AffinePoly(out, self.mode)

    def coeff_norm(self) -> float:
        return math.sqrt(sum(abs(c) ** 2 for _, _, c in self.float_terms()))

    def homogenize(self, degree: int | None = None) -> HomogeneousPoly:
        """x -> x0/x2, y -> x1/x2 cleared to the given total degree."""
        d = self.degree if degree is None else degree
        if d < self.degree:
            raise ValueError("homogenization degree below the polynomial degree")
        coeffs = {(i, j, d - i - j): c for (i, j), c in self.coeffs.items()}
        return HomogeneousPoly(3, d, coeffs, self.mode)

    def __eq__(self, o):
        return isinstance(o, AffinePoly) and self.mode == o.mode and self.coeffs == o.coeffs

    def __repr__(self):
        return f"AffinePoly({self.coeffs})"


def parse_univariate(text: str) -> list[ExactComplex]:
    """Ascending exact coefficients of a univariate polynomial in x0."""
    d = parse_expression(text, 1)
    deg = max((e[0] for e in d), default=0)
    out = [ExactComplex(0)] * (deg + 1)
    for e, c in d.items():
        out[e[0]] = c
    return out


# ---------------------------------------------------------------------------
# regular automorphisms


@dataclass
class RegularAutomorphism:
    """Henon-form automorphism with its exact inverse."""

    forward: tuple[AffinePoly, AffinePoly]
    inverse: tuple[AffinePoly, AffinePoly]
    d_plus: int
    d_minus: int
    p_coeffs: list = field(default_factory=list, repr=False)
    a: ExactComplex | None = field(default=None, repr=False)

    def forward_eval(self, x: complex, y: complex) -> tuple[complex, complex]:
        return self.forward[0].eval(x, y), self.forward[1].eval(x, y)

    def inverse_eval(self, x: complex, y: complex) -> tuple[complex, complex]:
        return self.inverse[0].eval(x, y), self.inverse[1].eval(x, y)


def _identity_check(comp: tuple[AffinePoly, AffinePoly]) -> bool:
    return comp[0] == AffinePoly.var_x() and comp[1] == AffinePoly.var_y()


def compose_map(
    outer: tuple[AffinePoly, AffinePoly], inner: tuple[AffinePoly, AffinePoly]
) -> tuple[AffinePoly, AffinePoly]:
    return (
        outer[0].substitute(inner[0], inner[1]),
        outer[1].substitute(inner[0], inner[1]),
    )


def build_regular_automorphism(p, a) -> RegularAutomorphism:
    """Normal form f(x, y) = (y, p(y) - a*x) with symbolic inverse.

    ``p`` is a univariate polynomial text in x0 (or an ascending
    coefficient list); deg p >= 2 and a != 0 are required.  The composed
    identity f o g = g o f = id is verified exactly.
    """
    coeffs = parse_univariate(p) if isinstance(p, str) else [ExactComplex.from_number(c) for c in p]
    deg = len(coeffs) - 1
    while deg > 0 and not coeffs[deg]:
        deg -= 1
    coeffs = coeffs[: deg + 1]
    if deg < 2:
        raise ValueError("deg p >= 2 required for a Henon-type map")
    av = ExactComplex.from_number(a)
    if not av:
        raise ValueError("a != 0 required")
    p_of_y = AffinePoly.from_univariate(coeffs, in_y=True)
    p_of_x = AffinePoly.from_univariate(coeffs, in_y=False)
    x, y = AffinePoly.var_x(), AffinePoly.var_y()
    forward = (y, p_of_y - x.scale(av))
    inverse = ((p_of_x - y).scale(ExactComplex(1) / av), x)
    for comp in (compose_map(inverse, forward), compose_map(forward, inverse)):
        if not _identity_check(comp):
            raise RuntimeError("symbolic inverse verification failed")
    return RegularAutomorphism(
        forward=forward, inverse=inverse, d_plus=deg, d_minus=deg, p_coeffs=coeffs, a=av
    )


# ---------------------------------------------------------------------------
# line intersection clouds


@dataclass(frozen=True)
class LinePair:
    """Two affine lines, each as (point, direction) in exact coordinates."""

    point1: tuple
    dir1: tuple
    point2: tuple
    dir2: tuple

    def line_equation(self, which: int) -> AffinePoly:
        pt = self.point1 if which == 1 else self.point2
        dr = self.dir1 if which == 1 else self.dir2
        px, py = (ExactComplex.from_number(v) for v in pt)
        dx, dy = (ExactComplex.from_number(v) for v in dr)
        if not dx and not dy:
            raise ValueError("line direction must be nonzero")
        # normal (-dy, dx): alpha*x + beta*y + gamma
        alpha, beta = -dy, dx
        gamma = dy * px - dx * py
        x, y = AffinePoly.var_x(), AffinePoly.var_y()
        return x.scale(alpha) + y.scale(beta) + AffinePoly.constant(gamma)


def random_line_pair(
    rng: np.random.Generator, box: float = 1.0, axis_adapted: bool = True
) -> LinePair:
    """Generic pair with small-denominator rational coordinates.

    The default pairs a horizontal first line with a vertical second one
    (random complex intercepts).  That family is adapted to the dynamics:
    the far branches of forward line images turn vertical (they cluster
    at the forward point at infinity) and backward images turn
    horizontal, so intersections stay inside the folding region instead
    of escaping down the line tails.  ``axis_adapted=False`` draws fully
    random lines instead.
    """
    from fractions import Fraction

    def rat():
        return Fraction(int(rng.integers(-16 * box, 16 * box + 1)), 16)

    def cpx():
        return ExactComplex(rat(), rat())

    one, zero = ExactComplex(1), ExactComplex(0)
    if axis_adapted:
        return LinePair(
            point1=(zero, cpx()),
            dir1=(one, zero),
            point2=(cpx(), zero),
            dir2=(zero, one),
        )
    return LinePair(
        point1=(cpx(), cpx()),
        dir1=(cpx(), cpx()),
        point2=(cpx(), cpx()),
        dir2=(cpx(), cpx()),
    )


def _pullback_line(f: RegularAutomorphism, ell: AffinePoly, n: int, use_inverse: bool) -> AffinePoly:
    d = f.d_minus if use_inverse else f.d_plus
    cur = ell
    expected = 1
    comp = f.inverse if use_inverse else f.forward
    for _ in range(n):
        cur = cur.substitute(comp[0], comp[1])
        expected *= d
        if cur.degree != expected:
            raise DegeneratePairError(
                f"line equation degree dropped to {cur.degree} (expected {expected})"
            )
    return cur


@dataclass
class LineIntersectionCloud:
    measure: EmpiricalMeasure
    raw_count: int
    at_infinity: int
    n: int
    m: int

    def affine_atoms(self) -> np.ndarray:
        """(N, 2) complex affine coordinates of the atoms."""
        pts = self.measure.points
        return np.stack([pts[:, 0] / pts[:, 2], pts[:, 1] / pts[:, 2]], axis=1)


def _exact_resultant_y(c1: AffinePoly, c2: AffinePoly):
    """Exact Sylvester resultant eliminating x, as float coefficients in y."""
    import sympy
    from sympy.polys.domains import QQ, QQ_I

    x, y = sympy.symbols("x y")

    def to_sym(ap: AffinePoly):
        rep = {
            (i, j): QQ_I.new(
                QQ(c.re.numerator, c.re.denominator), QQ(c.im.numerator, c.im.denominator)
            )
            for (i, j), c in ap.coeffs.items()
        }
        return sympy.Poly.from_dict(rep, x, y, domain=QQ_I)

    r = to_sym(c1).resultant(to_sym(c2))
    ry = sympy.Poly(r, y)
    return np.array([complex(c) for c in ry.all_coeffs()][::-1], dtype=complex)


def _newton_polish(c1f, c2f, d1x, d1y, d2x, d2y, xs, ys, iters: int = 12):
    """Simultaneous Newton iterations on the curve pair, vectorized."""
    x, y = xs.copy(), ys.copy()
    for _ in range(iters):
        f1 = c1f.eval_many(x, y)
        f2 = c2f.eval_many(x, y)
        a = d1x.eval_many(x, y)
        b = d1y.eval_many(x, y)
        c = d2x.eval_many(x, y)
        d = d2y.eval_many(x, y)
        det = a * d - b * c
        det = np.where(np.abs(det) < 1e-300, 1e-300, det)
        dx = (d * f1 - b * f2) / det
        dy = (-c * f1 + a * f2) / det
        x, y = x - dx, y - dy
    return x, y


def line_intersection_cloud(
    f: RegularAutomorphism, n: int, m: int, pair: LinePair
) -> LineIntersectionCloud:
    """Normalized intersection cloud of the n-th backward image of the first
    line with the m-th forward image of the second.

    The two scalar line equations are composed symbolically in exact
    arithmetic (degrees d_+^n and d_-^m), x is eliminated by an exact
    Sylvester resultant, and the floating candidates are Newton-polished
    on the exact curve pair.  Raw counts equal d_+^n * d_-^m with
    multiplicity for generic pairs; the measure is renormalized to total
    weight 1.  The exact resultant dominates the cost and grows quickly
    with the Bezout count (~0.5 s at 64, a few seconds at 128).
    """
    if n < 1 or m < 1:
        raise ValueError("n, m >= 1 required")
    bez = f.d_plus**n * f.d_minus**m
    if bez > BEZOUT_GUARD:
        raise CostGuardError(f"Bezout count {bez} exceeds the guard {BEZOUT_GUARD}")
    c1 = _pullback_line(f, pair.line_equation(1), n, use_inverse=False)
    c2 = _pullback_line(f, pair.line_equation(2), m, use_inverse=True)
    r = _exact_resultant_y(c1, c2)
    if not np.any(r != 0):
        raise DegeneratePairError("resultant vanishes identically (shared component)")
    at_inf = len(r) - 1
    while at_inf > 0 and r[at_inf] == 0:
        at_inf -= 1
    y_roots = np.roots(r[: at_inf + 1][::-1]) if at_inf >= 1 else np.array([], dtype=complex)
    at_inf = (len(r) - 1) - at_inf
    c1f, c2f = c1.to_float(), c2.to_float()
    s1, s2 = max(c1f.coeff_norm(), 1e-300), max(c2f.coeff_norm(), 1e-300)
    # per y-root, polish every x candidate from the first curve and keep the
    # converged point whose y stayed closest to the resultant root
    cand_x, cand_y, cand_idx = [], [], []
    for ridx, yv in enumerate(y_roots):
        cx = np.zeros(c1f.degree + 1, dtype=complex)
        for (i, j), c in c1f.coeffs.items():
            cx[i] += c * yv**j
        deg = len(cx) - 1
        while deg > 0 and cx[deg] == 0:
            deg -= 1
        if deg < 1:
            continue  # x escaped to infinity over this root
        roots_x = np.roots(cx[: deg + 1][::-1])
        cand_x.extend(roots_x)
        cand_y.extend([yv] * len(roots_x))
        cand_idx.extend([ridx] * len(roots_x))
    if not cand_x:
        raise DegeneratePairError("no finite intersection points (degenerate pair)")
    cand_x, cand_y = np.array(cand_x), np.array(cand_y)
    cand_idx = np.array(cand_idx)
    d1x, d1y = c1f.derivative(0), c1f.derivative(1)
    d2x, d2y = c2f.derivative(0), c2f.derivative(1)
    px, py = _newton_polish(c1f, c2f, d1x, d1y, d2x, d2y, cand_x, cand_y)
    r1 = np.abs(c1f.eval_many(px, py)) / s1
    r2 = np.abs(c2f.eval_many(px, py)) / s2
    scale = 1.0 + np.abs(px) + np.abs(py)
    resid = r1 / scale**c1f.degree + r2 / scale**c2f.degree
    converged = resid < 1e-8
    xs, ys = [], []
    for ridx, yv in enumerate(y_roots):
        mask = (cand_idx == ridx) & converged
        if not np.any(mask):
            raise DegeneratePairError(
                "an intersection candidate failed to converge; resample the pair"
            )
        drift = np.abs(py - yv)
        drift[~mask] = np.inf
        best = int(np.argmin(drift))
        xs.append(px[best])
        ys.append(py[best])
    xs, ys = np.array(xs), np.array(ys)
    pts = np.stack([xs, ys, np.ones_like(xs)], axis=1)
    pts = pts / np.linalg.norm(pts, axis=1, keepdims=True)
    w = np.full(len(pts), 1.0 / len(pts))
    return LineIntersectionCloud(
        measure=EmpiricalMeasure(pts, w), raw_count=len(pts) + at_inf, at_infinity=at_inf, n=n, m=m
    )


# ---------------------------------------------------------------------------
# test functions on an affine box and equidistribution gaps


def _bump(u: np.ndarray) -> np.ndarray:
    """Smooth cutoff: 1 at u=0, 0 for u >= 1."""
    out = np.zeros_like(u)
    inside = u < 1.0
    with np.errstate(over="ignore", divide="ignore"):
        out[inside] = np.exp(1.0 - 1.0 / (1.0 - u[inside]))
    return out


class BoxTestFunction:
    """Bump-modulated polynomial supported in the box |x|, |y| <= width."""

    def __init__(self, fn_id: str, width: float, poly):
        self.id = fn_id
        self.width = width
        self._poly = poly

    def __call__(self, xy: np.ndarray) -> np.ndarray:
        x, y = xy[:, 0], xy[:, 1]
        u = (np.abs(x) ** 2 + np.abs(y) ** 2) / (2.0 * self.width**2)
        return _bump(u) * self._poly(x, y)


def box_test_functions(width: float = 3.0) -> list[BoxTestFunction]:
    polys = [
        ("one", lambda x, y: np.ones(len(x))),
        ("re_x", lambda x, y: np.real(x)),
        ("im_x", lambda x, y: np.imag(x)),
        ("re_y", lambda x, y: np.real(y)),
        ("im_y", lambda x, y: np.imag(y)),
        ("re_xy", lambda x, y: np.real(x * y)),
        ("abs_x2", lambda x, y: np.abs(x) ** 2),
        ("re_x2", lambda x, y: np.real(x * x)),
    ]
    return [BoxTestFunction(name, width, fn) for name, fn in polys]


def cloud_pairing(cloud: LineIntersectionCloud, psi: BoxTestFunction) -> float:
    xy = cloud.affine_atoms()
    w = cloud.measure.weights / cloud.measure.total
    return float(np.dot(w, psi(xy)))


def equidistribution_gap(
    f: RegularAutomorphism,
    n: int,
    m: int,
    pairs: list[LinePair],
    psi_set: list[BoxTestFunction] | None = None,
) -> float:
    """max over pair couples and test functions of the pairing difference."""
    if len(pairs) < 2:
        raise ValueError("at least two line pairs required")
    psi_set = psi_set if psi_set is not None else box_test_functions()
    clouds = [line_intersection_cloud(f, n, m, pr) for pr in pairs]
    worst = 0.0
    for i in range(len(clouds)):
        for j in range(i + 1, len(clouds)):
            for psi in psi_set:
                gap = abs(cloud_pairing(clouds[i], psi) - cloud_pairing(clouds[j], psi))
                worst = max(worst, gap)
    return worst


# ---------------------------------------------------------------------------
# Green functions


def _eval_scaled(terms: list[tuple[int, int, complex]], x: complex, y: complex, logscale: float):
    """Value of the polynomial at e^logscale * (x, y) as (mantissa, log factor).

    Terms are grouped by the degree maximizing logscale * degree so every
    exponential factor is <= 1; underflow of far-subdominant terms is the
    only loss and it is harmless.
    """
    degs = {i + j for i, j, _ in terms}
    dstar = max(degs, key=lambda d: logscale * d)
    s = 0.0 + 0.0j
    for i, j, c in terms:
        w = logscale * (i + j - dstar)
        if w < -745.0:
            continue
        s += c * (x**i) * (y**j) * math.exp(w)
    return s, logscale * dstar


def _step_scaled(comp: tuple[AffinePoly, AffinePoly], x, y, logscale):
    t1 = comp[0].float_terms()
    t2 = comp[1].float_terms()
    v1, s1 = _eval_scaled(t1, x, y, logscale)
    v2, s2 = _eval_scaled(t2, x, y, logscale)
    s = max(s1, s2)
    w1 = v1 * math.exp(min(0.0, s1 - s))
    w2 = v2 * math.exp(min(0.0, s2 - s))
    mag = max(abs(w1), abs(w2))
    if mag == 0.0:
        return 0.0 + 0.0j, 0.0 + 0.0j, float("-inf")
    return w1 / mag, w2 / mag, s + math.log(mag)


def green_function(
    f: RegularAutomorphism, q: tuple[complex, complex], depth: int = 40
) -> tuple[tuple[float, float], tuple[float, float]]:
    """Forward and backward Green function estimates at q.

    Returns ((G_plus, last_increment_plus), (G_minus, last_increment_minus));
    the estimators are d^{-n} log^+ ||f^{+-n}(q)|| with scaled-log iteration,
    so large orbits rescale instead of overflowing.
    """
    if depth > 60:
        raise CostGuardError("depth > 60 refused (use the functional equation instead)")
    out = []
    for comp, d in ((f.forward, f.d_plus), (f.inverse, f.d_minus)):
        x, y = complex(q[0]), complex(q[1])
        mag = max(abs(x), abs(y))
        logscale = math.log(mag) if mag > 0 else float("-inf")
        if mag > 0:
            x, y = x / mag, y / mag
        g_prev = max(logscale, 0.0)
        g_last = g_prev
        inc = 0.0
        for nstep in range(1, depth + 1):
            if logscale == float("-inf"):
                g_last, inc = 0.0, 0.0
                break
            x, y, logscale = _step_scaled(comp, x, y, logscale)
            g = max(logscale, 0.0) / d**nstep
            inc = abs(g - g_prev)
            g_prev = g
            g_last = g
        out.append((g_last, inc))
    return out[0], out[1]

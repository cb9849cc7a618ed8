"""Exact and floating homogeneous polynomial algebra.

Polynomials are sparse tables keyed by exponent multi-indices.  Two
coefficient modes exist: ``exact`` (Gaussian rationals, pairs of
``fractions.Fraction``) and ``float`` (double-precision complex).  Exact
mode is mandatory wherever gcd reduction decides algebraic degrees
(iterated map composition); floating mode is used for all numerical
root extraction.

The text grammar accepted by :func:`parse_poly` is the on-disk and CLI
format: variables ``x0..x{nvars-1}``, integer/decimal/rational
coefficients, ``+ - * / ^`` and parentheses.  Serialization sorts
monomials by reverse-lexicographic exponent order.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import reduce

import numpy as np
import sympy
from sympy.polys.domains import QQ, QQ_I

from .projective import ProjectivePoint


class PolyError(Exception):
    pass


class PolyParseError(PolyError):
    """Syntax error; carries the 0-based position in the input text."""

    def __init__(self, message: str, pos: int):
        super().__init__(f"{message} (at position {pos})")
        self.pos = pos


class InhomogeneityError(PolyError):
    """Raised when a parsed polynomial mixes two distinct degrees."""

    def __init__(self, deg_a: int, deg_b: int):
        super().__init__(f"not homogeneous: found terms of degrees {deg_a} and {deg_b}")
        self.degrees = (deg_a, deg_b)


class ModeError(PolyError):
    pass


class ZeroMapError(PolyError):
    pass


# ---------------------------------------------------------------------------
# exact coefficients


class ExactComplex:
    """Gaussian rational a + b*i with Fraction components."""

    __slots__ = ("re", "im")

    def __init__(self, re=0, im=0):
        self.re = Fraction(re)
        self.im = Fraction(im)

    @classmethod
    def from_number(cls, v) -> "ExactComplex":
        if isinstance(v, ExactComplex):
            return v
        if isinstance(v, complex):
            return cls(Fraction(v.real), Fraction(v.imag))
        return cls(Fraction(v))

    def __bool__(self):
        return bool(self.re) or bool(self.im)

    def __add__(self, o):
        return ExactComplex(self.re + o.re, self.im + o.im)

    def __sub__(self, o):
        return ExactComplex(self.re - o.re, self.im - o.im)

    def __neg__(self):
        return ExactComplex(-self.re, -self.im)

    def __mul__(self, o):
        return ExactComplex(self.re * o.re - self.im * o.im, self.re * o.im + self.im * o.re)

    def __truediv__(self, o):
        d = o.re * o.re + o.im * o.im
        if not d:
            raise ZeroDivisionError("division by zero coefficient")
        return ExactComplex(
            (self.re * o.re + self.im * o.im) / d, (self.im * o.re - self.re * o.im) / d
        )

    def __eq__(self, o):
        return isinstance(o, ExactComplex) and self.re == o.re and self.im == o.im

    def __hash__(self):
        return hash((self.re, self.im))

    def __pow__(self, n: int) -> "ExactComplex":
        if n < 0:
            raise ValueError("nonnegative power required")
        out = ExactComplex(1)
        base = self
        while n:
            if n & 1:
                out = out * base
            base = base * base
            n >>= 1
        return out

    def conj(self) -> "ExactComplex":
        return ExactComplex(self.re, -self.im)

    def to_complex(self) -> complex:
        return complex(self.re) + 1j * complex(self.im)

    def __complex__(self) -> complex:
        return self.to_complex()

    def __repr__(self):
        if not self.im:
            return str(self.re)
        return f"({self.re}{'+' if self.im >= 0 else '-'}{abs(self.im)}*i)"


EXACT_ONE = ExactComplex(1)


def _coeff_is_zero(c, mode: str) -> bool:
    if mode == "exact":
        return not c
    return c == 0


# ---------------------------------------------------------------------------
# the polynomial type


class HomogeneousPoly:
    """Sparse homogeneous polynomial in ``nvars`` variables.

    ``coeffs`` maps exponent tuples (summing to ``degree``) to nonzero
    coefficients. ``mode`` is ``'exact'`` or ``'float'``.  The zero
    polynomial is represented by an empty table with a declared degree.
    """

    __slots__ = ("nvars", "degree", "coeffs", "mode")

    def __init__(self, nvars: int, degree: int, coeffs: dict, mode: str):
        if nvars < 2:
            raise ValueError("nvars >= 2 required")
        if degree < 0:
            raise ValueError("degree >= 0 required")
        if mode not in ("exact", "float"):
            raise ValueError("mode must be 'exact' or 'float'")
        clean = {}
        for exps, c in coeffs.items():
            if len(exps) != nvars or any(e < 0 for e in exps):
                raise ValueError(f"bad exponent tuple {exps} for nvars={nvars}")
            if sum(exps) != degree:
                raise InhomogeneityError(degree, sum(exps))
            if not _coeff_is_zero(c, mode):
                clean[tuple(exps)] = c
        self.nvars = nvars
        self.degree = degree
        self.coeffs = clean
        self.mode = mode

    # -- construction helpers

    @classmethod
    def from_dict(cls, coeffs: dict, nvars: int, mode: str = "exact") -> "HomogeneousPoly":
        degrees = {sum(e) for e, c in coeffs.items() if not _coeff_is_zero(c, mode)}
        if len(degrees) > 1:
            lo, hi = min(degrees), max(degrees)
            raise InhomogeneityError(lo, hi)
        degree = degrees.pop() if degrees else 0
        return cls(nvars, degree, coeffs, mode)

    @classmethod
    def variable(cls, i: int, nvars: int, mode: str = "exact") -> "HomogeneousPoly":
        exps = tuple(1 if j == i else 0 for j in range(nvars))
        one = EXACT_ONE if mode == "exact" else 1.0 + 0.0j
        return cls(nvars, 1, {exps: one}, mode)

    @classmethod
    def constant(cls, value, nvars: int, mode: str = "exact") -> "HomogeneousPoly":
        c = ExactComplex.from_number(value) if mode == "exact" else complex(value)
        return cls(nvars, 0, {tuple([0] * nvars): c}, mode)

    @property
    def is_zero(self) -> bool:
        return not self.coeffs

    def n_terms(self) -> int:
        return len(self.coeffs)

    # -- ring operations

    def _require(self, other: "HomogeneousPoly"):
        if self.nvars != other.nvars:
            raise ValueError("nvars mismatch")
        if self.mode != other.mode:
            raise ModeError("mixed exact/float operands; convert explicitly")

    def __add__(self, other: "HomogeneousPoly") -> "HomogeneousPoly":
        self._require(other)
        if self.is_zero:
            return other
        if other.is_zero:
            return self
        if self.degree != other.degree:
            raise InhomogeneityError(self.degree, other.degree)
        out = dict(self.coeffs)
        for e, c in other.coeffs.items():
            out[e] = out[e] + c if e in out else c
        return HomogeneousPoly(self.nvars, self.degree, out, self.mode)

    def __sub__(self, other: "HomogeneousPoly") -> "HomogeneousPoly":
        return self + (-other)

    def __neg__(self) -> "HomogeneousPoly":
        return HomogeneousPoly(
            self.nvars, self.degree, {e: -c for e, c in self.coeffs.items()}, self.mode
        )

    def __mul__(self, other: "HomogeneousPoly") -> "HomogeneousPoly":
        self._require(other)
        deg = self.degree + other.degree
        if self.is_zero or other.is_zero:
            return HomogeneousPoly(self.nvars, deg, {}, self.mode)
        out: dict = {}
        for e1, c1 in self.coeffs.items():
            for e2, c2 in other.coeffs.items():
                e = tuple(a + b for a, b in zip(e1, e2))
                prod = c1 * c2
                out[e] = out[e] + prod if e in out else prod
        return HomogeneousPoly(self.nvars, deg, out, self.mode)

    def scale(self, value) -> "HomogeneousPoly":
        c0 = ExactComplex.from_number(value) if self.mode == "exact" else complex(value)
        return HomogeneousPoly(
            self.nvars, self.degree, {e: c * c0 for e, c in self.coeffs.items()}, self.mode
        )

    def __pow__(self, n: int) -> "HomogeneousPoly":
        if n < 0:
            raise ValueError("nonnegative power required")
        result = HomogeneousPoly.constant(1, self.nvars, self.mode)
        base = self
        while n:
            if n & 1:
                result = result * base
            base = base * base if n > 1 else base
            n >>= 1
        return result

    def substitute(self, replacements: list["HomogeneousPoly"]) -> "HomogeneousPoly":
        """Plug ``replacements[i]`` in for variable i; all must share degree."""
        if len(replacements) != self.nvars:
            raise ValueError("one replacement per variable required")
        rdeg = {r.degree for r in replacements}
        if len(rdeg) != 1:
            raise ValueError("replacements must share a common degree")
        d = rdeg.pop()
        nv = replacements[0].nvars
        mode = replacements[0].mode
        if mode != self.mode:
            raise ModeError("substitute requires matching coefficient modes")
        out = HomogeneousPoly(nv, self.degree * d, {}, mode)
        # cache powers of each replacement up to the largest exponent used
        max_e = [0] * self.nvars
        for e in self.coeffs:
            for i, ei in enumerate(e):
                max_e[i] = max(max_e[i], ei)
        pows = []
        for i, r in enumerate(replacements):
            tbl = [HomogeneousPoly.constant(1, nv, mode)]
            for _ in range(max_e[i]):
                tbl.append(tbl[-1] * r)
            pows.append(tbl)
        for e, c in self.coeffs.items():
            term = HomogeneousPoly.constant(c if mode == "exact" else complex(c), nv, mode)
            for i, ei in enumerate(e):
                if ei:
                    term = term * pows[i][ei]
            out = out + term
        if out.is_zero:
            return HomogeneousPoly(nv, self.degree * d, {}, mode)
        return out

    # -- conversions

    def to_float(self) -> "HomogeneousPoly":
        if self.mode == "float":
            return self
        return HomogeneousPoly(
            self.nvars, self.degree, {e: c.to_complex() for e, c in self.coeffs.items()}, "float"
        )

    def to_exact(self) -> "HomogeneousPoly":
        if self.mode == "exact":
            return self
        return HomogeneousPoly(
            self.nvars,
            self.degree,
            {e: ExactComplex.from_number(c) for e, c in self.coeffs.items()},
            "exact",
        )

    def coeff_norm(self) -> float:
        """Euclidean norm of the coefficient vector (float view)."""
        if self.mode == "exact":
            return math.sqrt(sum(abs(c.to_complex()) ** 2 for c in self.coeffs.values()))
        return math.sqrt(sum(abs(c) ** 2 for c in self.coeffs.values()))

    # -- evaluation

    def evaluate(self, point) -> complex:
        """Value at the normalized representative of ``point``."""
        if isinstance(point, ProjectivePoint):
            z = point.coords
        else:
            z = np.asarray(point, dtype=complex)
        if len(z) != self.nvars:
            raise ValueError(f"point has {len(z)} coordinates, polynomial has {self.nvars}")
        return complex(self.eval_many(z[None, :])[0])

    def eval_many(self, points: np.ndarray) -> np.ndarray:
        """Vectorized evaluation on an (N, nvars) coordinate array."""
        pts = np.asarray(points, dtype=complex)
        if pts.ndim != 2 or pts.shape[1] != self.nvars:
            raise ValueError("points must be (N, nvars)")
        if self.is_zero:
            return np.zeros(len(pts), dtype=complex)
        if self.nvars == 2:
            return self._eval_many_p1(pts)
        coeffs = self.to_float().coeffs
        max_e = [0] * self.nvars
        for e in coeffs:
            for i, ei in enumerate(e):
                max_e[i] = max(max_e[i], ei)
        pows = []
        for i in range(self.nvars):
            tbl = np.empty((max_e[i] + 1, len(pts)), dtype=complex)
            tbl[0] = 1.0
            for j in range(1, max_e[i] + 1):
                tbl[j] = tbl[j - 1] * pts[:, i]
            pows.append(tbl)
        out = np.zeros(len(pts), dtype=complex)
        for e, c in coeffs.items():
            term = np.full(len(pts), c, dtype=complex)
            for i, ei in enumerate(e):
                if ei:
                    term = term * pows[i][ei]
            out += term
        return out

    def _eval_many_p1(self, pts: np.ndarray) -> np.ndarray:
        # two-chart Horner: |ratio| <= 1 keeps high degrees stable
        from numpy.polynomial import polynomial as npp

        n = self.degree
        c_asc = np.zeros(n + 1, dtype=complex)  # index j = coeff of x0^j x1^(n-j)
        for e, c in self.to_float().coeffs.items():
            c_asc[e[0]] = c
        z0, z1 = pts[:, 0], pts[:, 1]
        use0 = np.abs(z0) <= np.abs(z1)
        out = np.empty(len(pts), dtype=complex)
        with np.errstate(invalid="ignore", divide="ignore"):
            if np.any(use0):
                t = z0[use0] / z1[use0]
                out[use0] = (z1[use0] ** n) * npp.polyval(t, c_asc)
            if np.any(~use0):
                s = z1[~use0] / z0[~use0]
                out[~use0] = (z0[~use0] ** n) * npp.polyval(s, c_asc[::-1])
        return out

    def log_abs_many(self, points: np.ndarray) -> np.ndarray:
        """log|p(z)| - degree*log||z|| on an (N, nvars) array (scale invariant)."""
        pts = np.asarray(points, dtype=complex)
        nrm = np.linalg.norm(pts, axis=1)
        vals = self.eval_many(pts / nrm[:, None])
        with np.errstate(divide="ignore"):
            return np.log(np.abs(vals))

    def log_scaled(self, point) -> float:
        """Scalar log|p(z)| - degree*log||z|| at one point (any representative)."""
        if isinstance(point, ProjectivePoint):
            z = point.coords
        else:
            z = np.asarray(point, dtype=complex)
        return float(self.log_abs_many(z[None, :])[0])

    # -- serialization

    def sorted_terms(self):
        """Terms in reverse-lexicographic exponent order (canonical form)."""
        return sorted(self.coeffs.items(), key=lambda kv: kv[0][::-1], reverse=True)

    def to_text(self) -> str:
        if self.is_zero:
            return "0"
        parts = []
        for e, c in self.sorted_terms():
            factors = []
            for i, ei in enumerate(e):
                if ei == 1:
                    factors.append(f"x{i}")
                elif ei > 1:
                    factors.append(f"x{i}^{ei}")
            if self.mode == "exact":
                cs = repr(c)
                skip_one = c == EXACT_ONE and factors
            else:
                re, im = float(c.real), float(c.imag)
                cs = f"({re!r}{'+' if im >= 0 else '-'}{abs(im)!r}*i)"
                skip_one = False
            if skip_one:
                parts.append("*".join(factors))
            elif factors:
                parts.append(cs + "*" + "*".join(factors))
            else:
                parts.append(cs)
        return " + ".join(parts)

    def __repr__(self):
        return f"HomogeneousPoly({self.to_text()!r}, nvars={self.nvars}, mode={self.mode!r})"

    def __eq__(self, other):
        return (
            isinstance(other, HomogeneousPoly)
            and self.nvars == other.nvars
            and self.mode == other.mode
            and self.degree == other.degree
            and self.coeffs == other.coeffs
        )

    def __hash__(self):
        return hash((self.nvars, self.degree, frozenset(self.coeffs.items())))


# ---------------------------------------------------------------------------
# parser


_WS = " \t\r\n"


class _Tokenizer:
    def __init__(self, text: str):
        self.text = text
        self.pos = 0

    def peek(self):
        while self.pos < len(self.text) and self.text[self.pos] in _WS:
            self.pos += 1
        if self.pos >= len(self.text):
            return None, self.pos
        return self.text[self.pos], self.pos

    def next_token(self):
        ch, pos = self.peek()
        if ch is None:
            return ("end", None, pos)
        if ch in "+-*/^()":
            self.pos += 1
            return ("op", ch, pos)
        if ch.isdigit() or ch == ".":
            start = self.pos
            seen_dot = False
            while self.pos < len(self.text) and (
                self.text[self.pos].isdigit() or (self.text[self.pos] == "." and not seen_dot)
            ):
                if self.text[self.pos] == ".":
                    seen_dot = True
                self.pos += 1
            return ("num", self.text[start : self.pos], start)
        if ch == "x":
            start = self.pos
            self.pos += 1
            dstart = self.pos
            while self.pos < len(self.text) and self.text[self.pos].isdigit():
                self.pos += 1
            if self.pos == dstart:
                raise PolyParseError("variable name must be x<index>", start)
            return ("var", int(self.text[dstart : self.pos]), start)
        if ch == "i":
            self.pos += 1
            return ("imag", None, pos)
        raise PolyParseError(f"unexpected character {ch!r}", pos)


class _Parser:
    """Recursive descent over +, -, *, /, ^ producing an exact exponent table."""

    def __init__(self, text: str, nvars: int):
        self.tok = _Tokenizer(text)
        self.nvars = nvars
        self.current = self.tok.next_token()

    def advance(self):
        self.current = self.tok.next_token()

    def expect_op(self, ch):
        kind, val, pos = self.current
        if kind != "op" or val != ch:
            raise PolyParseError(f"expected {ch!r}", pos)
        self.advance()

    def parse(self) -> dict:
        d = self.expr()
        kind, val, pos = self.current
        if kind != "end":
            raise PolyParseError("trailing input", pos)
        return d

    def expr(self) -> dict:
        kind, val, pos = self.current
        sign = 1
        if kind == "op" and val in "+-":
            sign = -1 if val == "-" else 1
            self.advance()
        d = self.term()
        if sign == -1:
            d = {e: -c for e, c in d.items()}
        while True:
            kind, val, pos = self.current
            if kind == "op" and val in "+-":
                self.advance()
                rhs = self.term()
                for e, c in rhs.items():
                    c = -c if val == "-" else c
                    d[e] = d[e] + c if e in d else c
            else:
                return d

    def term(self) -> dict:
        d = self.factor()
        while True:
            kind, val, pos = self.current
            if kind == "op" and val in "*/":
                self.advance()
                rhs = self.factor()
                if val == "*":
                    d = self._mul(d, rhs)
                else:
                    d = self._div(d, rhs, pos)
            else:
                return d

    def factor(self) -> dict:
        d = self.base()
        kind, val, pos = self.current
        if kind == "op" and val == "^":
            self.advance()
            kind, val, pos = self.current
            if kind != "num" or "." in val:
                raise PolyParseError("exponent must be a nonnegative integer", pos)
            self.advance()
            n = int(val)
            out = {tuple([0] * self.nvars): ExactComplex(1)}
            for _ in range(n):
                out = self._mul(out, d)
            return out
        return d

    def base(self) -> dict:
        kind, val, pos = self.current
        if kind == "op" and val == "(":
            self.advance()
            d = self.expr()
            self.expect_op(")")
            return d
        if kind == "op" and val in "+-":
            sign = -1 if val == "-" else 1
            self.advance()
            d = self.base()
            return d if sign == 1 else {e: -c for e, c in d.items()}
        if kind == "num":
            self.advance()
            return {tuple([0] * self.nvars): ExactComplex(Fraction(val))}
        if kind == "imag":
            self.advance()
            return {tuple([0] * self.nvars): ExactComplex(0, 1)}
        if kind == "var":
            if val >= self.nvars:
                raise PolyParseError(f"variable x{val} out of range for nvars={self.nvars}", pos)
            self.advance()
            e = tuple(1 if j == val else 0 for j in range(self.nvars))
            return {e: ExactComplex(1)}
        raise PolyParseError("expected number, variable or parenthesized expression", pos)

    @staticmethod
    def _mul(a: dict, b: dict) -> dict:
        out: dict = {}
        for e1, c1 in a.items():
            for e2, c2 in b.items():
                e = tuple(x + y for x, y in zip(e1, e2))
                prod = c1 * c2
                out[e] = out[e] + prod if e in out else prod
        return out

    def _div(self, a: dict, b: dict, pos: int) -> dict:
        live = {e: c for e, c in b.items() if c}
        if len(live) != 1 or any(sum(e) != 0 for e in live):
            raise PolyParseError("division only by a nonzero constant", pos)
        (c0,) = live.values()
        return {e: c / c0 for e, c in a.items()}


def parse_expression(text: str, nvars: int) -> dict:
    """Parse to a raw exponent table without any homogeneity requirement."""
    d = _Parser(text, nvars).parse()
    return {e: c for e, c in d.items() if c}


def parse_poly(text: str, nvars: int) -> HomogeneousPoly:
    """Parse a homogeneous polynomial in variables x0..x{nvars-1} (exact mode)."""
    d = parse_expression(text, nvars)
    return HomogeneousPoly.from_dict(d, nvars, mode="exact")


# ---------------------------------------------------------------------------
# polynomial maps and gcd reduction


@dataclass
class PolyMap:
    """Tuple of homogeneous polynomials of a common degree, defining a map of P^k."""

    components: list
    reduced: bool = False

    def __post_init__(self):
        comps = list(self.components)
        if not comps:
            raise ValueError("a map needs at least one component")
        nv = {c.nvars for c in comps}
        dg = {c.degree for c in comps}
        md = {c.mode for c in comps}
        if len(nv) != 1 or len(dg) != 1 or len(md) != 1:
            raise ValueError("components must share nvars, degree and mode")
        if all(c.is_zero for c in comps):
            raise ZeroMapError("all components vanish identically")
        self.components = comps

    @classmethod
    def from_texts(cls, texts: list[str], nvars: int, reduced: bool = False) -> "PolyMap":
        return cls([parse_poly(t, nvars) for t in texts], reduced=reduced)

    @property
    def nvars(self) -> int:
        return self.components[0].nvars

    @property
    def degree(self) -> int:
        return self.components[0].degree

    @property
    def mode(self) -> str:
        return self.components[0].mode

    def to_float(self) -> "PolyMap":
        return PolyMap([c.to_float() for c in self.components], reduced=self.reduced)

    def eval_many(self, points: np.ndarray) -> np.ndarray:
        """Raw image vectors, shape (N, nvars); rows may be ~0 at indeterminacy."""
        pts = np.asarray(points, dtype=complex)
        return np.stack([c.eval_many(pts) for c in self.components], axis=1)

    def __repr__(self):
        return "PolyMap[" + " : ".join(c.to_text() for c in self.components) + "]"


_SYMS_CACHE: dict = {}


def _sympy_gens(nvars: int):
    if nvars not in _SYMS_CACHE:
        _SYMS_CACHE[nvars] = sympy.symbols(f"x0:{nvars}")
    return _SYMS_CACHE[nvars]


def _to_sympy(p: HomogeneousPoly):
    gens = _sympy_gens(p.nvars)
    rep = {
        e: QQ_I.new(QQ(c.re.numerator, c.re.denominator), QQ(c.im.numerator, c.im.denominator))
        for e, c in p.coeffs.items()
    }
    return sympy.Poly.from_dict(rep, *gens, domain=QQ_I)


def _from_sympy(sp, nvars: int, degree_hint: int | None = None) -> HomogeneousPoly:
    d = {}
    for e, v in sp.as_dict(native=True).items():
        re = Fraction(int(v.x.numerator), int(v.x.denominator))
        im = Fraction(int(v.y.numerator), int(v.y.denominator))
        d[tuple(e)] = ExactComplex(re, im)
    if not d and degree_hint is not None:
        return HomogeneousPoly(nvars, degree_hint, {}, "exact")
    return HomogeneousPoly.from_dict(d, nvars, mode="exact")


def _restrict_exact(p: HomogeneousPoly, a: tuple, b: tuple) -> list[ExactComplex]:
    """Exact coefficients (ascending in s) of p(s*a + t*b) for integer points."""
    av = [ExactComplex(x) for x in a]
    bv = [ExactComplex(x) for x in b]
    n = p.degree
    out = [ExactComplex(0) for _ in range(n + 1)]
    for e, c in p.coeffs.items():
        term = [ExactComplex(1)]
        for i, ei in enumerate(e):
            if not ei:
                continue
            binom = [
                ExactComplex(math.comb(ei, j)) * av[i] ** j * bv[i] ** (ei - j)
                for j in range(ei + 1)
            ]
            new = [ExactComplex(0)] * (len(term) + ei)
            for u, cu in enumerate(term):
                if not cu:
                    continue
                for v, cv in enumerate(binom):
                    new[u + v] = new[u + v] + cu * cv
            term = new
        for j, cj in enumerate(term):
            out[j] = out[j] + c * cj
    return out


def _univar_gcd_exact(a: list[ExactComplex], b: list[ExactComplex]) -> list[ExactComplex]:
    """Gcd of two exact univariate polynomials given by ascending coefficients."""

    def trim(u):
        while u and not u[-1]:
            u.pop()
        return u

    fa, fb = trim(list(a)), trim(list(b))
    while fb:
        if len(fa) < len(fb):
            fa, fb = fb, fa
            continue
        lead = fb[-1]
        rem = list(fa)
        for i in range(len(fa) - len(fb), -1, -1):
            if not rem[i + len(fb) - 1]:
                continue
            q = rem[i + len(fb) - 1] / lead
            for j, cb in enumerate(fb):
                rem[i + j] = rem[i + j] - q * cb
        fa, fb = fb, trim(rem)
    return fa if fa else [ExactComplex(0)]


_CERT_LINES = [
    ((1, 2, 3), (2, -1, 1)),
    ((1, -1, 2), (3, 1, -2)),
    ((2, 3, -1), (-1, 2, 5)),
    ((1, 0, 1), (0, 1, -1)),
]


def _coprime_certificate(polys: list[HomogeneousPoly]) -> bool:
    """True when a line restriction proves the common gcd is constant.

    A nonconstant common divisor restricts to a nonconstant binary form
    on every line outside its zero set, so a constant gcd of the exact
    restrictions certifies a constant gcd upstairs.  The restrictions are
    binary forms: the gcd splits into common powers of the two chart
    variables plus the gcd of the dehomogenized middles.  False means
    'undecided', never 'definitely nonconstant'.
    """
    nv = polys[0].nvars
    for a, b in _CERT_LINES:
        a, b = a[:nv], b[:nv]
        rests = [_restrict_exact(p, a, b) for p in polys]
        if any(all(not c for c in r) for r in rests):
            continue  # a component vanishes on this line; try another
        lo = min(next(j for j, c in enumerate(r) if c) for r in rests)
        hi_def = min((len(r) - 1) - max(j for j, c in enumerate(r) if c) for r in rests)
        if lo > 0 or hi_def > 0:
            continue  # common chart-variable power; this line cannot certify
        g = rests[0]
        for r in rests[1:]:
            g = _univar_gcd_exact(g, r)
            if len(g) <= 1:
                break
        if len(g) <= 1:
            return True
    return False


def _monomial_content(comps: list[HomogeneousPoly]) -> tuple[int, ...]:
    """Largest monomial dividing every term of every nonzero component."""
    nv = comps[0].nvars
    mins = None
    for c in comps:
        if c.is_zero:
            continue
        local = [min(e[i] for e in c.coeffs) for i in range(nv)]
        mins = local if mins is None else [min(a, b) for a, b in zip(mins, local)]
    return tuple(mins or [0] * nv)


def _shift_exponents(p: HomogeneousPoly, shift: tuple[int, ...], sign: int) -> HomogeneousPoly:
    if p.is_zero:
        return HomogeneousPoly(p.nvars, p.degree + sign * sum(shift), {}, p.mode)
    d = {tuple(e[i] + sign * shift[i] for i in range(p.nvars)): c for e, c in p.coeffs.items()}
    return HomogeneousPoly(p.nvars, p.degree + sign * sum(shift), d, p.mode)


def gcd_reduce(components: list[HomogeneousPoly]) -> list[HomogeneousPoly]:
    """Divide exact components by their polynomial gcd (verified by exact division)."""
    comps = [c for c in components]
    if any(c.mode != "exact" for c in comps):
        raise ModeError("gcd reduction requires exact coefficients")
    nonzero = [c for c in comps if not c.is_zero]
    if not nonzero:
        raise ZeroMapError("all components vanish identically")
    # cheap pass: common monomial factor (handles monomial maps outright)
    content = _monomial_content(comps)
    if any(content):
        comps = [_shift_exponents(c, content, -1) for c in comps]
        nonzero = [c for c in comps if not c.is_zero]
    if all(c.n_terms() == 1 for c in nonzero):
        return comps
    # exact line-restriction certificate avoids the expensive multivariate
    # gcd in the generic (coprime) case
    if len(nonzero) > 1 and _coprime_certificate(nonzero):
        return comps
    sps = [_to_sympy(c) for c in nonzero]
    g = reduce(lambda a, b: a.gcd(b), sps)
    if g.is_ground or g.total_degree() == 0:
        return comps
    out = []
    for c in comps:
        if c.is_zero:
            out.append(HomogeneousPoly(c.nvars, c.degree - g.total_degree(), {}, "exact"))
            continue
        quo, rem = _to_sympy(c).div(g)
        if not rem.is_zero:
            raise PolyError("gcd verification failed: inexact division")
        out.append(_from_sympy(quo, c.nvars, degree_hint=c.degree - g.total_degree()))
    return out


def compose_and_reduce(f: PolyMap, g: PolyMap) -> PolyMap:
    """Expanded components of f o g divided by their gcd; the result carries the
    algebraic degree of the composed map."""
    if f.nvars != g.nvars:
        raise ValueError("maps must share nvars")
    if f.mode != "exact" or g.mode != "exact":
        raise ModeError("composition for degree sequences requires exact coefficients")
    raw = [c.substitute(g.components) for c in f.components]
    if all(c.is_zero for c in raw):
        raise ZeroMapError("composition vanishes identically")
    return PolyMap(gcd_reduce(raw), reduced=True)


def exact_gcd(p: HomogeneousPoly, q: HomogeneousPoly) -> HomogeneousPoly:
    """Polynomial gcd of two exact homogeneous polynomials."""
    if p.mode != "exact" or q.mode != "exact":
        raise ModeError("exact gcd requires exact coefficients")
    if not p.is_zero and not q.is_zero and _coprime_certificate([p, q]):
        return HomogeneousPoly.constant(1, p.nvars, "exact")
    g = _to_sympy(p).gcd(_to_sympy(q))
    return _from_sympy(g, p.nvars)


def exact_resultant_x0(p: HomogeneousPoly, q: HomogeneousPoly) -> HomogeneousPoly:
    """Sylvester resultant eliminating x0, over exact arithmetic."""
    if p.mode != "exact" or q.mode != "exact":
        raise ModeError("exact resultant requires exact coefficients")
    r = _to_sympy(p).resultant(_to_sympy(q))
    gens = _sympy_gens(p.nvars)
    rp = sympy.Poly(r, *gens, domain=QQ_I)
    return _from_sympy(rp, p.nvars, degree_hint=0)


# ---------------------------------------------------------------------------
# line restriction


def restrict_to_line(
    p: HomogeneousPoly, a: ProjectivePoint, b: ProjectivePoint
) -> HomogeneousPoly | None:
    """Restriction q(s, t) = p(s*a + t*b) as a binary form of the same degree.

    Returns ``None`` when the restriction vanishes identically, i.e. the
    line through a and b lies inside the zero set of p.
    """
    from .projective import chordal_distance

    if chordal_distance(a, b) <= 1e-12:
        raise ValueError("coincident points do not span a line")
    if p.nvars != a.dim + 1 or p.nvars != b.dim + 1:
        raise ValueError("point dimension does not match polynomial nvars")
    pf = p.to_float()
    n = pf.degree
    av, bv = a.coords, b.coords
    # per variable i: (s*a_i + t*b_i)^e has ascending-in-s coefficients
    # C(e, j) a_i^j b_i^(e-j)
    out = np.zeros(n + 1, dtype=complex)
    for e, c in pf.coeffs.items():
        term = np.array([1.0 + 0j])
        for i, ei in enumerate(e):
            if not ei:
                continue
            binom = np.array(
                [math.comb(ei, j) * (av[i] ** j) * (bv[i] ** (ei - j)) for j in range(ei + 1)],
                dtype=complex,
            )
            term = np.convolve(term, binom)
        out[: len(term)] += c * term
    scale = max(1e-300, float(np.max(np.abs(out))))
    ref = pf.coeff_norm()
    if scale <= 1e-12 * max(ref, 1e-300):
        return None
    coeffs = {(j, n - j): out[j] for j in range(n + 1) if out[j] != 0}
    return HomogeneousPoly(2, n, coeffs, "float")

"""Random holomorphic section ensembles on P^1 and P^2 and their zeros.

Sections of degree n are homogeneous polynomials sampled with independent
standard Gaussian coefficients in the invariant orthonormal monomial basis
(monomial z^alpha carries the weight sqrt(multinomial(n; alpha))), which
induces exactly the unitarily invariant probability on the projectivized
section space; the real field gives the orthogonally invariant ensemble.

Zero sets are extracted directly (points with multiplicity, total mass
n^l) or paired against test forms by Crofton slicing with invariant
random lines when only a hypersurface is available.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from itertools import product

import numpy as np

from .poly import HomogeneousPoly, restrict_to_line
from .projective import (
    EmpiricalMeasure,
    ProjectivePoint,
    TestFunction,
    chordal_distance,
    chordal_distance_many,
    sample_fs_many,
)
from .solve import bivariate_common_zeros, roots_p1_coeffs, univariate_roots
from .statutil import fit_log_slope, mean_stderr, wilson_interval

#: default number of random lines in a Crofton pairing
CROFTON_LINES = 2000
#: fraction of degenerate lines tolerated before erroring
DEGENERATE_LINE_CAP = 0.01


@dataclass(frozen=True)
class SectionEnsemble:
    """Gaussian ensemble of l sections of degree n on P^k."""

    k: int
    n: int
    l: int = 1
    field: str = "complex"

    def __post_init__(self):
        if self.k < 1:
            raise ValueError("k >= 1 required")
        if self.n < 1:
            raise ValueError("n >= 1 required")
        if not 1 <= self.l <= self.k:
            raise ValueError("1 <= l <= k required")
        if self.field not in ("complex", "real"):
            raise ValueError("field must be 'complex' or 'real'")


def monomial_basis(k: int, n: int) -> list[tuple[int, ...]]:
    """Exponent multi-indices of degree n in k+1 variables."""
    return [e for e in product(range(n + 1), repeat=k + 1) if sum(e) == n]


def _multinomial(n: int, exps: tuple[int, ...]) -> int:
    out = math.factorial(n)
    for e in exps:
        out //= math.factorial(e)
    return out


def kostlan_weights(k: int, n: int, basis=None) -> np.ndarray:
    basis = basis if basis is not None else monomial_basis(k, n)
    return np.sqrt(np.array([_multinomial(n, e) for e in basis], dtype=float))


def sample_section(ens: SectionEnsemble, rng: np.random.Generator) -> list[HomogeneousPoly]:
    """Draw the l independent random sections of the ensemble."""
    basis = monomial_basis(ens.k, ens.n)
    w = kostlan_weights(ens.k, ens.n, basis)
    out = []
    for _ in range(ens.l):
        if ens.field == "complex":
            a = rng.standard_normal(len(basis)) + 1j * rng.standard_normal(len(basis))
        else:
            a = rng.standard_normal(len(basis)).astype(complex)
        coeffs = {e: complex(c) for e, c in zip(basis, a * w) if c != 0}
        out.append(HomogeneousPoly(ens.k + 1, ens.n, coeffs, "float"))
    return out


def sample_coeffs_p1(n: int, field: str, rng: np.random.Generator) -> np.ndarray:
    """Weighted coefficient vector (ascending in x0) of one P^1 section."""
    w = np.sqrt(np.array([math.comb(n, j) for j in range(n + 1)], dtype=float))
    if field == "complex":
        a = rng.standard_normal(n + 1) + 1j * rng.standard_normal(n + 1)
    else:
        a = rng.standard_normal(n + 1).astype(complex)
    return a * w


# ---------------------------------------------------------------------------
# zero sets


@dataclass
class ZeroSet:
    """Zeros of l sections on P^k.

    ``method`` is ``'direct'`` (point-supported, total weight n^l) or
    ``'crofton'`` (lazy hypersurface handle for l=1 on P^2).
    """

    n: int
    l: int
    k: int
    method: str
    points: EmpiricalMeasure | None = None
    sections: list = field(default_factory=list)

    @property
    def dim(self) -> int:
        return self.k

    def require_points(self) -> EmpiricalMeasure:
        if self.points is None:
            raise ValueError("hypersurface zero set has no point list; pair via Crofton")
        return self.points


def zero_set(sections: list[HomogeneousPoly], k: int) -> ZeroSet:
    """Extract the common zero set of l sections on P^k."""
    l = len(sections)
    n = sections[0].degree
    if any(s.degree != n for s in sections):
        raise ValueError("sections must share a common degree")
    if any(s.nvars != k + 1 for s in sections):
        raise ValueError("sections must live on P^k")
    if k == 1 and l == 1:
        pts = univariate_roots(sections[0])
        measure = EmpiricalMeasure.from_points(pts, np.ones(len(pts)))
        return ZeroSet(n=n, l=1, k=1, method="direct", points=measure, sections=sections)
    if k == 2 and l == 2:
        pts = bivariate_common_zeros(sections[0], sections[1])
        measure = EmpiricalMeasure.from_points(pts, np.ones(len(pts)))
        return ZeroSet(n=n, l=2, k=2, method="direct", points=measure, sections=sections)
    if k == 2 and l == 1:
        return ZeroSet(n=n, l=1, k=2, method="crofton", points=None, sections=sections)
    raise ValueError(f"unsupported zero extraction for k={k}, l={l}")


class DegenerateLinesError(RuntimeError):
    pass


def _crofton_pairing(
    s: HomogeneousPoly, psi: TestFunction, m_lines: int, rng: np.random.Generator
) -> tuple[float, float]:
    """Average over invariant random lines of the sum of psi at the slice roots."""
    n = s.degree
    sums = np.empty(m_lines)
    degenerate = 0
    cap = max(1, int(DEGENERATE_LINE_CAP * m_lines))
    filled = 0
    while filled < m_lines:
        ab = sample_fs_many(2, 2, rng)
        pa = ProjectivePoint.from_coords(ab[0])
        pb = ProjectivePoint.from_coords(ab[1])
        if chordal_distance(pa, pb) <= 1e-12:
            continue
        q = restrict_to_line(s, pa, pb)
        if q is None:
            degenerate += 1
            if degenerate > cap:
                raise DegenerateLinesError(
                    f"more than {100 * DEGENERATE_LINE_CAP:.0f}% of slicing lines are degenerate"
                )
            continue
        c = np.zeros(n + 1, dtype=complex)
        for e, v in q.coeffs.items():
            c[e[0]] = v
        st = roots_p1_coeffs(c)
        pts = st[:, 0:1] * pa.coords[None, :] + st[:, 1:2] * pb.coords[None, :]
        pts = pts / np.linalg.norm(pts, axis=1, keepdims=True)
        sums[filled] = float(np.sum(psi(pts)))
        filled += 1
    return mean_stderr(sums)


def pair_zero_current(
    zs: ZeroSet,
    psi: TestFunction,
    m_lines: int = CROFTON_LINES,
    rng: np.random.Generator | None = None,
) -> tuple[float, float | None]:
    """Pairing of the zero current with psi times the complementary invariant power.

    Point-supported zero sets give the exact weighted sum; hypersurfaces in
    P^2 are paired by the Crofton average over ``m_lines`` invariant lines,
    with a reported standard error.
    """
    if psi.dim != zs.dim:
        raise ValueError("test function dimension mismatch")
    if zs.method == "direct":
        m = zs.require_points()
        return m.pair(psi), None
    rng = rng if rng is not None else np.random.default_rng(0)
    return _crofton_pairing(zs.sections[0], psi, m_lines, rng)


def discrepancy(
    sections: list[HomogeneousPoly],
    psi: TestFunction,
    m_lines: int = CROFTON_LINES,
    rng: np.random.Generator | None = None,
) -> float:
    """Normalized pairing minus the closed-form invariant baseline.

    D = n^{-l} <[Z], psi w^{k-l}> - integral of psi, which tends to zero as
    the degree grows for typical sections.
    """
    if psi.fs_integral is None:
        raise ValueError("discrepancy needs a test function with a closed-form integral")
    k = sections[0].nvars - 1
    zs = zero_set(sections, k)
    val, _ = pair_zero_current(zs, psi, m_lines=m_lines, rng=rng)
    return val / zs.n**zs.l - psi.fs_integral


def discrepancy_p1_coeffs(c_asc: np.ndarray, psi: TestFunction) -> float:
    """Fast-path discrepancy for one P^1 section given by raw coefficients."""
    n = len(c_asc) - 1
    pts = roots_p1_coeffs(c_asc)
    return float(np.sum(psi(pts))) / n - psi.fs_integral


def discrepancies_p1_coeffs(c_asc: np.ndarray, psis: list[TestFunction]) -> list[float]:
    """Discrepancies of one P^1 section against several test functions
    (the root extraction is shared)."""
    n = len(c_asc) - 1
    pts = roots_p1_coeffs(c_asc)
    return [float(np.sum(psi(pts))) / n - psi.fs_integral for psi in psis]


# ---------------------------------------------------------------------------
# ensemble experiments


@dataclass
class ConcentrationRow:
    n: int
    trials: int
    exceed: int
    p_hat: float
    wilson_low: float
    wilson_high: float
    is_upper_bound: bool


@dataclass
class ConcentrationResult:
    epsilon: float
    rows: list[ConcentrationRow]
    slope: float | None
    discrepancies: dict[int, np.ndarray]


def concentration_experiment(
    ens: SectionEnsemble,
    psi: TestFunction,
    epsilon: float,
    n_grid: list[int],
    trials: int,
    rng: np.random.Generator,
) -> ConcentrationResult:
    """Exceedance table P(|D| >= epsilon) along a degree grid.

    Cells with zero exceedances are reported through their Wilson upper
    bound; the log-slope over the grid is fitted only when every cell is
    nonzero.
    """
    if trials < 100:
        raise ValueError("trials >= 100 per degree required")
    if ens.k != 1 or ens.l != 1:
        raise ValueError("concentration experiment is implemented for k=1, l=1")
    rows = []
    discs: dict[int, np.ndarray] = {}
    for n in n_grid:
        d = np.empty(trials)
        for t in range(trials):
            c = sample_coeffs_p1(n, ens.field, rng)
            d[t] = discrepancy_p1_coeffs(c, psi)
        discs[n] = d
        exceed = int(np.sum(np.abs(d) >= epsilon))
        lo, hi = wilson_interval(exceed, trials)
        rows.append(
            ConcentrationRow(
                n=n,
                trials=trials,
                exceed=exceed,
                p_hat=exceed / trials if exceed else hi,
                wilson_low=lo,
                wilson_high=hi,
                is_upper_bound=exceed == 0,
            )
        )
    slope = None
    if all(r.exceed > 0 for r in rows) and len(rows) >= 2:
        slope = fit_log_slope([r.n for r in rows], [r.exceed / r.trials for r in rows])
    return ConcentrationResult(epsilon=epsilon, rows=rows, slope=slope, discrepancies=discs)


@dataclass(frozen=True)
class ChordalBall:
    """Region {x : chordal distance to center <= radius}."""

    center: ProjectivePoint
    radius: float

    def indicator(self, points: np.ndarray) -> np.ndarray:
        return chordal_distance_many(points, self.center.coords) <= self.radius


@dataclass
class VolumeCountResult:
    counts: np.ndarray
    mean: float
    stderr: float
    region_volume: float
    baseline: float


def volume_count(
    ens: SectionEnsemble,
    region: ChordalBall,
    trials: int,
    rng: np.random.Generator,
    vol_samples: int = 200_000,
) -> VolumeCountResult:
    """Ensemble mean of n^{-l} times the weighted zero count inside a region.

    The baseline is k!/(k-l)! times the Riemannian volume of the region.
    With the invariant probability mass vol_P estimated by Monte Carlo,
    the Riemannian volume is vol_P/k!, so the baseline reduces to
    vol_P/(k-l)! (for k = l the normalized count of the full space is
    exactly 1).
    """
    if not ((ens.k == 1 and ens.l == 1) or (ens.k == 2 and ens.l == 2)):
        raise ValueError("volume counting needs point-supported zero sets")
    counts = np.empty(trials)
    for t in range(trials):
        secs = sample_section(ens, rng)
        zs = zero_set(secs, ens.k)
        m = zs.require_points()
        inside = region.indicator(m.points)
        counts[t] = float(np.dot(m.weights, inside)) / ens.n**ens.l
    mean, se = mean_stderr(counts)
    vol = float(np.mean(region.indicator(sample_fs_many(ens.k, vol_samples, rng))))
    baseline = vol / math.factorial(ens.k - ens.l)
    return VolumeCountResult(
        counts=counts, mean=mean, stderr=se, region_volume=vol, baseline=baseline
    )

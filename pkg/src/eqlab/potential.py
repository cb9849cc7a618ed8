"""Quasi-plurisubharmonic witnesses and the pluripotential constant audits.

Witnesses are functions (1/n) log(|f(z)| / ||z||^n) + shift built from
degree-n homogeneous polynomials; their curvature bound is automatic for
this representation, so the family is a necessary-condition probe for
capacity and moderation constants.  Suprema are estimated by invariant
sampling plus local chordal-ball refinement with radius halving; the
estimate is heuristic and audit thresholds carry a 0.05 allowance.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .poly import HomogeneousPoly
from .projective import (
    EmpiricalMeasure,
    ProjectivePoint,
    chordal_distance_many,
    normalize_coords,
    sample_fs_many,
    sample_real_many,
)
from .sections import SectionEnsemble, sample_section
from .statutil import fit_log_slope, mean_stderr, wilson_interval

REFINE_ROUNDS = 50
REFINE_BATCH = 48


@dataclass
class QpshWitness:
    """Scale-invariant log-modulus witness of a homogeneous polynomial."""

    poly: HomogeneousPoly
    shift: float = 0.0
    normalization: str | None = None
    max_location: ProjectivePoint | None = field(default=None, repr=False)
    mean_stderr: float | None = None

    def __post_init__(self):
        if self.poly.degree < 1:
            raise ValueError("witness polynomial must have degree >= 1")
        self.poly = self.poly.to_float()

    @property
    def dim(self) -> int:
        return self.poly.nvars - 1

    def value_many(self, points: np.ndarray) -> np.ndarray:
        """Witness values on an (N, k+1) coordinate array (any representatives)."""
        return self.poly.log_abs_many(points) / self.poly.degree + self.shift

    def value_at(self, p: ProjectivePoint) -> float:
        return float(self.value_many(p.coords[None, :])[0])

    def with_shift(self, shift: float, **meta) -> "QpshWitness":
        return QpshWitness(poly=self.poly, shift=shift, **meta)


def make_witness(f: HomogeneousPoly, shift: float = 0.0) -> QpshWitness:
    return QpshWitness(poly=f, shift=shift)


# ---------------------------------------------------------------------------
# compact sets


@dataclass
class CompactSet:
    """Membership test plus invariant-flavored sampler for a compact K in P^k."""

    name: str
    dim: int
    membership: Callable[[np.ndarray], np.ndarray]
    sampler: Callable[[int, np.random.Generator], np.ndarray]


def full_space(k: int) -> CompactSet:
    return CompactSet(
        name=f"P^{k}",
        dim=k,
        membership=lambda pts: np.ones(len(pts), dtype=bool),
        sampler=lambda n, rng: sample_fs_many(k, n, rng),
    )


def coordinate_hyperplane(k: int, index: int = 0) -> CompactSet:
    """The hyperplane {z_index = 0} in P^k."""

    def member(pts):
        return np.abs(pts[:, index]) <= 1e-9

    def sampler(n, rng):
        sub = sample_fs_many(k - 1, n, rng)
        out = np.insert(sub, index, 0.0, axis=1)
        return out

    return CompactSet(name=f"hyperplane z{index}=0", dim=k, membership=member, sampler=sampler)


def real_locus(k: int) -> CompactSet:
    """RP^k inside P^k (phases removed before testing realness)."""

    def member(pts):
        pts = np.atleast_2d(pts)
        idx = np.argmax(np.abs(pts) > 1e-12, axis=1)
        lead = pts[np.arange(len(pts)), idx]
        phase = lead / np.abs(lead)
        fixed = pts / phase[:, None]
        return np.max(np.abs(np.imag(fixed)), axis=1) <= 1e-8

    return CompactSet(
        name=f"RP^{k}",
        dim=k,
        membership=member,
        sampler=lambda n, rng: sample_real_many(k, n, rng),
    )


# ---------------------------------------------------------------------------
# sup estimation and normalization


def _refine_within(
    w: QpshWitness,
    start: np.ndarray,
    start_val: float,
    membership,
    rng: np.random.Generator,
    rounds: int = REFINE_ROUNDS,
) -> tuple[float, np.ndarray]:
    best, best_val = start.copy(), start_val
    radius = 0.5
    k1 = len(start)
    for _ in range(rounds):
        g = rng.standard_normal((REFINE_BATCH, k1)) + 1j * rng.standard_normal((REFINE_BATCH, k1))
        cand = best[None, :] + radius * g
        cand = cand / np.linalg.norm(cand, axis=1, keepdims=True)
        if membership is not None:
            keep = membership(cand)
            cand = cand[keep]
        if len(cand):
            vals = w.value_many(cand)
            i = int(np.argmax(vals))
            if vals[i] > best_val:
                best_val = float(vals[i])
                best = cand[i]
        radius *= 0.5
    return best_val, best


def estimate_sup(
    w: QpshWitness,
    K: CompactSet,
    n_samples: int,
    rng: np.random.Generator,
    rounds: int = REFINE_ROUNDS,
) -> tuple[float, np.ndarray]:
    """Heuristic supremum of the witness over K: sampling plus refinement."""
    pts = K.sampler(n_samples, rng)
    vals = w.value_many(pts)
    finite = np.isfinite(vals)
    if not np.any(finite):
        # the witness is -inf on every sample (K inside the zero divisor)
        return float("-inf"), pts[0]
    i = int(np.argmax(np.where(finite, vals, -np.inf)))
    membership = None if K.name.startswith("P^") else K.membership
    return _refine_within(w, pts[i], float(vals[i]), membership, rng, rounds=rounds)


def normalize_qpsh(
    w: QpshWitness,
    mode: str,
    n_samples: int,
    rng: np.random.Generator,
    mu_sampler: Callable[[int, np.random.Generator], np.ndarray] | None = None,
) -> QpshWitness:
    """Shift the witness so that max = 0 or mean = 0 under the chosen measure.

    ``max_zero`` estimates the supremum by sampling plus 50 halving
    rounds of local refinement around the best sample and remembers the
    maximizing location (the witness value there becomes exactly 0).
    ``mean_zero`` uses Monte Carlo with a reported standard error.
    """
    k = w.dim
    if mode == "max_zero":
        sup, loc = estimate_sup(w, full_space(k), max(n_samples, 256), rng)
        return w.with_shift(
            w.shift - sup,
            normalization="max_zero",
            max_location=ProjectivePoint.from_coords(normalize_coords(loc)),
        )
    if mode == "mean_zero":
        if n_samples < 10**4:
            raise ValueError("mean_zero normalization needs n_samples >= 10^4")
        sampler = mu_sampler if mu_sampler is not None else (lambda n, r: sample_fs_many(k, n, r))
        vals = w.value_many(sampler(n_samples, rng))
        vals = vals[np.isfinite(vals)]
        mean, se = mean_stderr(vals)
        return w.with_shift(w.shift - mean, normalization="mean_zero", mean_stderr=se)
    raise ValueError("mode must be 'max_zero' or 'mean_zero'")


# ---------------------------------------------------------------------------
# audits


@dataclass
class R1AuditResult:
    k: int
    bound: float
    observed_max: float
    passed: bool
    sups: list[float]


def r1_bound_audit(
    k: int,
    n_witnesses: int,
    degree_pool: list[int],
    rng: np.random.Generator,
    n_mean_samples: int = 20000,
    n_sup_samples: int = 1500,
) -> R1AuditResult:
    """Max observed supremum of mean-zero witnesses versus (1 + log k)/2.

    Witnesses are log-moduli of random sections over the degree pool;
    the audit passes when the observed max stays below the bound plus
    the 0.05 estimation allowance.
    """
    sups = []
    for i in range(n_witnesses):
        n = int(degree_pool[int(rng.integers(0, len(degree_pool)))])
        sec = sample_section(SectionEnsemble(k=k, n=n, l=1, field="complex"), rng)[0]
        w = normalize_qpsh(make_witness(sec), "mean_zero", n_mean_samples, rng)
        sup, _ = estimate_sup(w, full_space(k), n_sup_samples, rng)
        sups.append(sup)
    bound = 0.5 * (1.0 + math.log(k))
    observed = max(sups)
    return R1AuditResult(
        k=k, bound=bound, observed_max=observed, passed=observed <= bound + 0.05, sups=sups
    )


@dataclass
class ModerateIntegralResult:
    estimate: float
    stderr: float
    heavy_tail: bool
    alpha: float


def moderate_integral(
    mu,
    w: QpshWitness,
    alpha: float,
    n_samples: int,
    rng: np.random.Generator,
) -> ModerateIntegralResult:
    """Monte Carlo estimate of the exponential moment of -alpha times the witness.

    ``mu`` is 'fs', 'real_fs', or an :class:`EmpiricalMeasure`.  The
    witness must be max-zero normalized (values <= 0 make the integrand
    >= 1).  A heavy-tail flag is raised when the top 0.1% of samples
    carry more than half of the sum; that is a warning, not a failure.
    """
    if not 0 < alpha <= 1:
        raise ValueError("alpha in (0, 1] required")
    if w.normalization != "max_zero":
        raise ValueError("moderate_integral expects a max-zero normalized witness")
    k = w.dim
    if isinstance(mu, EmpiricalMeasure):
        pts, weights = mu.points, mu.weights / mu.total
    else:
        sampler = {"fs": sample_fs_many, "real_fs": sample_real_many}[mu]
        pts = sampler(k, n_samples, rng)
        weights = np.full(len(pts), 1.0 / len(pts))
    vals = w.value_many(pts)
    contrib = weights * np.exp(-alpha * vals)
    total = float(np.sum(contrib))
    est = total
    se = float(np.sqrt(max(0.0, np.sum(weights * (np.exp(-alpha * vals) - total) ** 2) / len(pts))))
    top = max(1, int(0.001 * len(pts)))
    tail_share = float(np.sort(contrib)[-top:].sum()) / total if total > 0 else 0.0
    return ModerateIntegralResult(
        estimate=est, stderr=se, heavy_tail=bool(tail_share > 0.5), alpha=alpha
    )


@dataclass
class ExceedanceRow:
    t: float
    count: int
    p_hat: float
    wilson_low: float
    wilson_high: float
    is_upper_bound: bool


@dataclass
class ExceedanceProfile:
    rows: list[ExceedanceRow]
    slope: float | None


def exceedance_profile(
    mu_sampler: str | Callable[[int, np.random.Generator], np.ndarray],
    w: QpshWitness,
    t_grid: list[float],
    n_samples: int,
    rng: np.random.Generator,
) -> ExceedanceProfile:
    """Empirical tail table mu(value < -t) over an increasing positive grid.

    One shared sample batch keeps the rows nested (hence monotone); rows
    with zero counts are reported through their Wilson upper bound, and
    the fitted log-slope uses the nonzero rows only.
    """
    if any(t <= 0 for t in t_grid) or any(
        t2 <= t1 for t1, t2 in zip(t_grid, t_grid[1:])
    ):
        raise ValueError("t_grid must be positive and strictly increasing")
    if w.normalization != "mean_zero":
        raise ValueError("exceedance_profile expects a mean-zero normalized witness")
    k = w.dim
    sampler = (
        {"fs": sample_fs_many, "real_fs": sample_real_many}[mu_sampler]
        if isinstance(mu_sampler, str)
        else mu_sampler
    )
    vals = w.value_many(sampler(k, n_samples, rng))
    rows = []
    for t in t_grid:
        count = int(np.sum(vals < -t))
        lo, hi = wilson_interval(count, n_samples)
        rows.append(
            ExceedanceRow(
                t=t,
                count=count,
                p_hat=count / n_samples if count else hi,
                wilson_low=lo,
                wilson_high=hi,
                is_upper_bound=count == 0,
            )
        )
    nz = [(r.t, r.count / n_samples) for r in rows if r.count > 0]
    slope = fit_log_slope([t for t, _ in nz], [p for _, p in nz]) if len(nz) >= 2 else None
    return ExceedanceProfile(rows=rows, slope=slope)


def capacity_upper_bound(
    K: CompactSet,
    witnesses: list[QpshWitness],
    rng: np.random.Generator,
    n_samples: int = 2000,
) -> float:
    """min over max-zero witnesses of exp(sup over K): an upper capacity bound.

    Suprema are clipped at 0 (the family is max-normalized, so positive
    estimates are refinement noise); a witness that is identically -inf
    on K certifies the bound 0.
    """
    if not witnesses:
        raise ValueError("a nonempty witness list is required")
    best = 1.0
    for w in witnesses:
        if w.normalization != "max_zero":
            raise ValueError("capacity bounds need max-zero normalized witnesses")
        sup, _ = estimate_sup(w, K, n_samples, rng)
        if w.max_location is not None and bool(K.membership(w.max_location.coords[None, :])[0]):
            sup = max(sup, 0.0)
        sup = min(sup, 0.0)
        best = min(best, math.exp(sup) if np.isfinite(sup) else 0.0)
    return best


# ---------------------------------------------------------------------------
# chordal potentials on P^1


def chordal_potential_eval(nu: EmpiricalMeasure, x: ProjectivePoint) -> float:
    """Weighted log chordal-distance potential; -inf flags an atom hit.

    The hit threshold 1e-7 sits above the cancellation floor of the fast
    vectorized distance, so evaluation at an atom is flagged reliably.
    """
    d = chordal_distance_many(nu.points, x.coords)
    hit = d < 1e-7
    if np.any(hit & (nu.weights > 0)):
        return float("-inf")
    with np.errstate(divide="ignore"):
        vals = np.log(d)
    return float(np.dot(nu.weights, vals))

"""Rational self-maps and correspondences of P^1 and P^2.

Equilibrium measures are sampled by backward orbits: each sample walks a
uniformly chosen preimage branch (weighted by multiplicity) at every
step, which realizes the normalized pullback d_t^{-n} (f^n)^* of a Dirac
mass without any reweighting.  Mixing correlations are estimated through
the exact fiber average d_t^{-n} sum_{x in f^{-n}(y)} phi(x): pairing
that average against psi over the equilibrium cloud equals the forward
correlation integral by the invariance f^*(mu) = d_t mu, and its Monte
Carlo noise decays at the same exponential rate as the signal, so fitted
decay exponents stay meaningful down to the noise floor.
"""

from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass, field

import numpy as np

from .poly import HomogeneousPoly, PolyMap, gcd_reduce
from .projective import (
    EmpiricalMeasure,
    ProjectivePoint,
    TestFunction,
    normalize_coords,
    sample_point_fs,
)
from .solve import bivariate_common_zeros, roots_p1_coeffs, univariate_roots

MAX_DEGREE_GROWTH = 8


class ExceptionalPointError(RuntimeError):
    pass


class IndeterminacyError(RuntimeError):
    pass


class InconsistentDegreeError(RuntimeError):
    pass


class CostGuardError(RuntimeError):
    pass


@dataclass
class RationalSelfMap:
    """Dominant rational self-map of P^k given by a reduced polynomial tuple."""

    map: PolyMap
    k: int = field(init=False)
    _d_top: int | None = field(default=None, repr=False)

    def __post_init__(self):
        nv = self.map.nvars
        if nv not in (2, 3):
            raise ValueError("self-maps are supported on P^1 and P^2")
        if self.map.mode == "exact" and not self.map.reduced:
            self.map = PolyMap(gcd_reduce(self.map.components), reduced=True)
        self.k = nv - 1

    @classmethod
    def from_texts(cls, texts: list[str], nvars: int) -> "RationalSelfMap":
        return cls(PolyMap.from_texts(texts, nvars))

    @property
    def d_alg(self) -> int:
        return self.map.degree

    @property
    def d_top(self) -> int:
        if self._d_top is None:
            self._d_top = topological_degree(self)
        return self._d_top

    # -- vectorized P^1 machinery

    def _p1_coeff_vectors(self) -> tuple[np.ndarray, np.ndarray]:
        d = self.d_alg
        P = np.zeros(d + 1, dtype=complex)
        Q = np.zeros(d + 1, dtype=complex)
        fm = self.map.to_float()
        for e, c in fm.components[0].coeffs.items():
            P[e[0]] = c
        for e, c in fm.components[1].coeffs.items():
            Q[e[0]] = c
        return P, Q

    def p1_cross_coeffs(self, targets: np.ndarray) -> np.ndarray:
        """Coefficients (ascending) of the fiber equation for each target row."""
        if self.k != 1:
            raise ValueError("P^1 maps only")
        P, Q = self._p1_coeff_vectors()
        t = np.asarray(targets, dtype=complex)
        return t[:, 1:2] * P[None, :] - t[:, 0:1] * Q[None, :]

    def forward_many(self, points: np.ndarray) -> np.ndarray:
        """Unit image vectors; rows at indeterminacy come back as nan."""
        fm = self.map.to_float()
        img = fm.eval_many(points)
        nrm = np.linalg.norm(img, axis=1, keepdims=True)
        scale = sum(c.coeff_norm() for c in fm.components)
        bad = nrm[:, 0] < 1e-13 * max(scale, 1e-300)
        with np.errstate(invalid="ignore", divide="ignore"):
            out = img / nrm
        out[bad] = np.nan
        return out


def batched_roots_p1(coeffs: np.ndarray) -> np.ndarray:
    """All projective roots per row of an (N, d+1) ascending coefficient array.

    Returns (N, d, 2) unit vectors; rows whose polynomial degenerates to
    zero are filled with nan (caller treats them as exceptional).
    """
    C = np.asarray(coeffs, dtype=complex)
    N, d1 = C.shape
    d = d1 - 1
    out = np.full((N, d, 2), np.nan, dtype=complex)
    rownorm = np.max(np.abs(C), axis=1)
    alive = rownorm > 0
    if d == 0:
        return out[:, :0, :]
    if d == 1:
        out[alive, 0, 0] = -C[alive, 0]
        out[alive, 0, 1] = C[alive, 1]
    elif d == 2:
        a, b, c = C[:, 2], C[:, 1], C[:, 0]
        s = np.sqrt(b * b - 4 * a * c)
        s = np.where(np.real(np.conj(b) * s) < 0, -s, s)
        q = -0.5 * (b + s)
        out[:, 0, 0], out[:, 0, 1] = q, a
        out[:, 1, 0], out[:, 1, 1] = c, q
        # degenerate homogeneous pairs (0, 0) occur only when b = 0 and the
        # form is a pure square: a*x0^2 has the double root [0:1], c*x1^2
        # the double root [1:0]
        zero1 = (out[:, 0, 0] == 0) & (out[:, 0, 1] == 0)
        out[zero1, 0, 0] = 1.0
        zero2 = (out[:, 1, 0] == 0) & (out[:, 1, 1] == 0)
        out[zero2, 1, 1] = 1.0
        out[~alive] = np.nan
    else:
        lead_ok = alive & (C[:, d] != 0)
        idx = np.nonzero(lead_ok)[0]
        if len(idx) > 0:
            comp = np.zeros((len(idx), d, d), dtype=complex)
            comp[:, 1:, :-1] = np.eye(d - 1)[None, :, :]
            comp[:, :, -1] = -C[idx, :d] / C[idx, d][:, None]
            ev = np.linalg.eigvals(comp)
            out[idx, :, 0] = ev
            out[idx, :, 1] = 1.0
        for i in np.nonzero(alive & ~lead_ok)[0]:
            out[i] = roots_p1_coeffs(C[i])
    nrm = np.linalg.norm(out, axis=2, keepdims=True)
    with np.errstate(invalid="ignore", divide="ignore"):
        out = out / nrm
    return out


# ---------------------------------------------------------------------------
# preimages and topological degree


@dataclass
class Correspondence:
    """Multivalued map y -> g^{-1}(h(y)) built from two self-maps of the same P^k."""

    g: RationalSelfMap
    h: RationalSelfMap

    def __post_init__(self):
        if self.g.k != self.h.k:
            raise ValueError("g and h must act on the same P^k")

    @property
    def k(self) -> int:
        return self.g.k

    @property
    def d_top(self) -> int:
        return self.g.d_top


def _preimages_p1(f: RationalSelfMap, y: ProjectivePoint) -> list[ProjectivePoint]:
    c = f.p1_cross_coeffs(y.coords[None, :])[0]
    scale = float(np.max(np.abs(c)))
    ref = max(x.coeff_norm() for x in f.map.to_float().components)
    if scale <= 1e-13 * max(ref, 1e-300):
        raise ExceptionalPointError("fiber equation vanishes identically at this target")
    pts = roots_p1_coeffs(c)
    return [ProjectivePoint.from_coords(r) for r in pts]


def _preimages_p2(f: RationalSelfMap, y: ProjectivePoint) -> list[ProjectivePoint]:
    fm = f.map.to_float()
    F = fm.components
    yv = y.coords
    j = int(np.argmax(np.abs(yv)))
    others = [i for i in range(3) if i != j]
    eqs = []
    for a in others:
        e = F[a].scale(yv[j]) - F[j].scale(yv[a])
        eqs.append(e)
    sols = bivariate_common_zeros(eqs[0], eqs[1])
    scale = max(c.coeff_norm() for c in F)
    out = []
    for p in sols:
        img = fm.eval_many(p.coords[None, :])[0]
        nrm = np.linalg.norm(img)
        if nrm <= 1e-8 * scale:
            continue  # indeterminacy point of f satisfies both cross equations
        img = img / nrm
        cross = np.linalg.norm(np.cross(img, yv))
        if cross < 1e-6:
            out.append(p)
    if not out:
        raise ExceptionalPointError("empty generic fiber (exceptional target)")
    return out


def preimages(f: RationalSelfMap | Correspondence, y: ProjectivePoint) -> list[ProjectivePoint]:
    """Fiber of the map over y, as a multiset (points repeat per multiplicity)."""
    if isinstance(f, Correspondence):
        img = f.h.forward_many(y.coords[None, :])[0]
        if np.any(np.isnan(img)):
            raise IndeterminacyError("target hits the indeterminacy set of h")
        return preimages(f.g, ProjectivePoint.from_coords(img))
    if f.k == 1:
        return _preimages_p1(f, y)
    return _preimages_p2(f, y)


def topological_degree(
    f: RationalSelfMap | Correspondence, trials: int = 8, rng: np.random.Generator | None = None
) -> int:
    """Modal preimage count over generic random targets.

    Counts below the mode are tolerated as exceptional targets; a count
    above the mode is an inconsistency and raises.
    """
    rng = rng if rng is not None else np.random.default_rng(20127)
    k = f.k
    counts = []
    for _ in range(trials):
        y = sample_point_fs(k, rng)
        try:
            counts.append(len(preimages(f, y)))
        except (ExceptionalPointError, IndeterminacyError):
            continue
    if not counts:
        raise ExceptionalPointError("no generic target produced a fiber")
    mode, _ = Counter(counts).most_common(1)[0]
    if max(counts) > mode:
        raise InconsistentDegreeError(f"fiber counts disagree above the mode: {sorted(counts)}")
    return mode


# ---------------------------------------------------------------------------
# backward orbits


def _fibers_batch_p1(f: RationalSelfMap, pts: np.ndarray) -> np.ndarray:
    """(N, d_top, 2) unit preimage vectors per point (nan rows = exceptional)."""
    return batched_roots_p1(f.p1_cross_coeffs(pts))


def backward_orbit_sample(
    schedule: RationalSelfMap | list[RationalSelfMap],
    x0: ProjectivePoint,
    depth: int,
    n_samples: int,
    rng: np.random.Generator,
) -> EmpiricalMeasure:
    """Monte Carlo sample of the normalized backward iteration of a Dirac mass.

    Each sample follows an independent backward path, choosing uniformly
    (by multiplicity) among the preimages at every step; the cloud is an
    unbiased sample of d_t^{-depth} pullback of delta_{x0}.  Non-constant
    schedules pull back through the maps in reverse composition order.
    Aborted paths (exceptional fibers) are resampled and counted; more
    than 1% aborts is an error.
    """
    maps = [schedule] * depth if isinstance(schedule, RationalSelfMap) else list(schedule)
    if len(maps) != depth:
        raise ValueError("schedule length must equal depth")
    if depth == 0 or not maps:
        pts = np.tile(x0.coords, (n_samples, 1))
        return EmpiricalMeasure(pts, np.full(n_samples, 1.0 / n_samples))
    k = maps[0].k
    if any(m.k != k for m in maps):
        raise ValueError("all maps in the schedule must act on the same P^k")
    if k == 1:
        return _backward_p1(maps, x0, depth, n_samples, rng)
    return _backward_generic(maps, x0, depth, n_samples, rng)


def _backward_p1(maps, x0, depth, n_samples, rng) -> EmpiricalMeasure:
    batches = []
    need = n_samples
    aborts = 0
    cap = max(10, int(0.01 * n_samples))
    while need > 0:
        cur = np.tile(x0.coords, (need, 1))
        alive = np.ones(need, dtype=bool)
        for m in reversed(maps):
            fib = _fibers_batch_p1(m, cur)
            pick = rng.integers(0, fib.shape[1], size=need)
            nxt = fib[np.arange(need), pick]
            bad = np.any(np.isnan(nxt), axis=1)
            alive &= ~bad
            nxt[bad] = cur[bad]  # keep the row finite; it is discarded below
            cur = nxt
        batches.append(cur[alive])
        n_bad = int((~alive).sum())
        aborts += n_bad
        if aborts > cap:
            raise ExceptionalPointError(f"{aborts} backward paths aborted (> 1%)")
        need = n_bad
    pts = np.concatenate(batches, axis=0)
    return EmpiricalMeasure(pts, np.full(n_samples, 1.0 / n_samples))


def _backward_generic(maps, x0, depth, n_samples, rng) -> EmpiricalMeasure:
    rows = []
    aborts = 0
    target = n_samples
    while len(rows) < target:
        y = x0
        ok = True
        for m in reversed(maps):
            try:
                fiber = preimages(m, y)
            except (ExceptionalPointError, IndeterminacyError):
                ok = False
                break
            y = fiber[int(rng.integers(0, len(fiber)))]
        if ok:
            rows.append(y.coords)
        else:
            aborts += 1
            if aborts > max(10, 0.01 * n_samples):
                raise ExceptionalPointError(f"{aborts} backward paths aborted (> 1%)")
    return EmpiricalMeasure(np.array(rows), np.full(n_samples, 1.0 / n_samples))


# ---------------------------------------------------------------------------
# invariance and mixing


def invariance_defect(
    f: RationalSelfMap | Correspondence,
    mu: EmpiricalMeasure,
    psi_set: list[TestFunction],
) -> float:
    """max over the test set of |d_t^{-1} <mu, f_* psi> - <mu, psi>|.

    A measure invariant under the normalized pullback makes every term
    vanish; atoms whose fiber is exceptional are skipped and counted.
    """
    w = mu.weights / mu.total
    pts = mu.points
    d_t = f.d_top
    if isinstance(f, Correspondence) or f.k != 1:
        return _invariance_defect_slow(f, mu, psi_set)
    fib = _fibers_batch_p1(f, pts)
    bad = np.any(np.isnan(fib), axis=(1, 2))
    if bad.mean() > 0.01:
        raise ExceptionalPointError("more than 1% of atoms sit over exceptional fibers")
    keep = ~bad
    wk = w[keep] / w[keep].sum()
    flat = fib[keep].reshape(-1, 2)
    worst = 0.0
    for psi in psi_set:
        fiber_means = psi(flat).reshape(-1, d_t).sum(axis=1) / d_t
        lhs = float(np.dot(wk, fiber_means))
        rhs = float(np.dot(wk, psi(pts[keep])))
        worst = max(worst, abs(lhs - rhs))
    return worst


def _invariance_defect_slow(f, mu, psi_set) -> float:
    w = mu.weights / mu.total
    d_t = f.d_top
    vals = {psi.id: [] for psi in psi_set}
    kept_w = []
    base = {psi.id: [] for psi in psi_set}
    skipped = 0
    for i in range(len(mu.points)):
        y = ProjectivePoint.from_coords(mu.points[i])
        try:
            fiber = preimages(f, y)
        except (ExceptionalPointError, IndeterminacyError):
            skipped += 1
            continue
        kept_w.append(w[i])
        arr = np.array([p.coords for p in fiber])
        for psi in psi_set:
            vals[psi.id].append(float(np.sum(psi(arr))) / d_t)
            base[psi.id].append(psi.at(y))
    if skipped > 0.01 * len(mu.points) and skipped > 2:
        raise ExceptionalPointError("more than 1% of atoms sit over exceptional fibers")
    wk = np.array(kept_w)
    wk = wk / wk.sum()
    worst = 0.0
    for psi in psi_set:
        worst = max(worst, abs(float(np.dot(wk, vals[psi.id])) - float(np.dot(wk, base[psi.id]))))
    return worst


def mixing_correlations(
    f: RationalSelfMap,
    mu: EmpiricalMeasure,
    phi: TestFunction,
    psi: TestFunction,
    n_max: int,
    chunk_budget: int = 1 << 21,
) -> list[tuple[float, float]]:
    """Correlation sequence I_n with Monte Carlo standard errors, n = 0..n_max.

    I_n pairs the exact fiber average of phi over f^{-n} against psi on
    the equilibrium cloud, centered by the product of means; under the
    invariance of the measure this equals the forward correlation of phi
    with psi composed with the n-th iterate.
    """
    if isinstance(f, Correspondence):
        raise TypeError("mixing correlations are defined for maps, not correspondences")
    if f.k != 1:
        raise NotImplementedError("mixing correlations are implemented on P^1")
    d_t = f.d_top
    pts = mu.points
    N = len(pts)
    psi_vals = psi(pts)
    A = np.empty((n_max + 1, N))
    A[0] = phi(pts)
    chunk = max(1, chunk_budget // max(1, d_t**n_max))
    for start in range(0, N, chunk):
        block = pts[start : start + chunk]
        level = block
        for n in range(1, n_max + 1):
            fib = _fibers_batch_p1(f, level)
            level = fib.reshape(-1, 2)
            if np.any(np.isnan(level)):
                # exceptional branches: reuse parent points (measure-zero event)
                nanrows = np.any(np.isnan(level), axis=1)
                level[nanrows] = np.repeat(
                    block, d_t**n, axis=0
                )[nanrows]
            A[n, start : start + len(block)] = (
                phi(level).reshape(len(block), -1).mean(axis=1)
            )
    w = mu.weights / mu.total
    mean_psi = float(np.dot(w, psi_vals))
    out = []
    for n in range(0, n_max + 1):
        mean_a = float(np.dot(w, A[n]))
        resid = (A[n] - mean_a) * (psi_vals - mean_psi)
        i_n = float(np.dot(w, resid))
        se = float(np.std(resid, ddof=1) / math.sqrt(N)) if N > 1 else 0.0
        out.append((i_n, se))
    return out


def pushforward_regression(
    f: RationalSelfMap | Correspondence,
    mu: EmpiricalMeasure,
    phi: TestFunction,
    n_max: int,
) -> list[float]:
    """L^1 deviation of the normalized pushforward averages along the cloud.

    Report-only diagnostic (the natural mixing statement for
    correspondences, which need not preserve the measure forward).
    """
    d_t = f.d_top
    w = mu.weights / mu.total
    out = []
    for n in range(1, n_max + 1):
        vals = []
        kept = []
        for i in range(len(mu.points)):
            y = ProjectivePoint.from_coords(mu.points[i])
            try:
                level = [y]
                for _ in range(n):
                    level = [q for p in level for q in preimages(f, p)]
            except (ExceptionalPointError, IndeterminacyError):
                continue
            arr = np.array([p.coords for p in level])
            vals.append(float(np.sum(phi(arr))) / d_t**n)
            kept.append(w[i])
        wk = np.array(kept)
        wk /= wk.sum()
        v = np.array(vals)
        m = float(np.dot(wk, v))
        out.append(float(np.dot(wk, np.abs(v - m))))
    return out


# ---------------------------------------------------------------------------
# degree growth


@dataclass
class DegreeGrowthResult:
    degrees: list[int]
    roots: list[float]
    d_top: int
    d_km1_estimate: float
    hypothesis_satisfied: bool


def degree_growth(f: RationalSelfMap, n_max: int) -> DegreeGrowthResult:
    """Exact algebraic degrees of the iterates with n-th-root estimates.

    Exact coefficients are mandatory (gcd reduction decides the degree
    drop); the cost guard rejects n_max > 8.
    """
    if f.map.mode != "exact":
        raise ValueError("degree growth requires exact coefficients")
    if n_max > MAX_DEGREE_GROWTH:
        raise CostGuardError(f"n_max > {MAX_DEGREE_GROWTH} refused")
    from .poly import compose_and_reduce

    degrees = [f.map.degree]
    g = f.map
    for _ in range(1, n_max):
        g = compose_and_reduce(f.map, g)
        degrees.append(g.degree)
    roots = [d ** (1.0 / (i + 1)) for i, d in enumerate(degrees)]
    d_top = f.d_top
    if f.k == 1:
        d_km1 = 1.0
    else:
        d_km1 = degrees[-1] ** (1.0 / n_max)
    return DegreeGrowthResult(
        degrees=degrees,
        roots=roots,
        d_top=d_top,
        d_km1_estimate=d_km1,
        hypothesis_satisfied=d_km1 < d_top,
    )

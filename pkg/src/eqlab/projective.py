"""Points, invariant measures, metrics and closed-form constants on P^k.

Conventions used throughout the package:

* points of P^k are stored as unit vectors in C^{k+1} whose first
  coordinate of modulus > 1e-12 has phase zero;
* the invariant probability measure on P^k (mass-1 Fubini-Study volume)
  is sampled by normalizing a standard complex Gaussian vector, which is
  exact by unitary invariance; the real locus RP^k is sampled the same
  way from a real Gaussian;
* distances are chordal: d(p, q) = sqrt(1 - |<p, q>|^2) in [0, 1].
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

#: tolerance for projective point equality (chordal distance)
POINT_TOL = 1e-12


def normalize_coords(coords: np.ndarray) -> np.ndarray:
    """Return the canonical unit representative of a nonzero vector.

    Scales to Euclidean norm 1 and rotates the phase so that the first
    coordinate of modulus > 1e-12 is real positive.
    """
    v = np.asarray(coords, dtype=complex)
    nrm = np.linalg.norm(v)
    if nrm == 0.0 or not np.isfinite(nrm):
        raise ValueError("projective point requires a nonzero finite vector")
    v = v / nrm
    idx = int(np.argmax(np.abs(v) > POINT_TOL))
    phase = v[idx] / abs(v[idx])
    return v / phase


@dataclass(frozen=True)
class ProjectivePoint:
    """A point of P^k stored in normalized homogeneous coordinates."""

    coords: np.ndarray
    dim: int

    @classmethod
    def from_coords(cls, coords) -> "ProjectivePoint":
        v = normalize_coords(np.asarray(coords, dtype=complex))
        return cls(coords=v, dim=len(v) - 1)

    def __eq__(self, other) -> bool:
        if not isinstance(other, ProjectivePoint):
            return NotImplemented
        if self.dim != other.dim:
            return False
        return chordal_distance(self, other) <= POINT_TOL

    def __hash__(self):
        # rounded modulus profile; equality stays the authoritative test
        return hash((self.dim, tuple(np.round(np.abs(self.coords), 6))))

    def __repr__(self):
        inside = " : ".join(f"{c:.6g}" for c in self.coords)
        return f"[{inside}]"


def chordal_distance(p: ProjectivePoint | np.ndarray, q: ProjectivePoint | np.ndarray) -> float:
    """Chordal distance sqrt(1 - |<p,q>|^2) between unit representatives.

    Computed as the norm of the wedge product, which equals the same
    quantity for unit vectors but avoids the catastrophic cancellation of
    1 - |<u,v>|^2 near coincident points (self-distance is exactly 0).
    """
    u = p.coords if isinstance(p, ProjectivePoint) else np.asarray(p, dtype=complex)
    v = q.coords if isinstance(q, ProjectivePoint) else np.asarray(q, dtype=complex)
    total = 0.0
    for i in range(len(u)):
        for j in range(i + 1, len(u)):
            total += abs(u[i] * v[j] - u[j] * v[i]) ** 2
    return math.sqrt(min(1.0, total))


def chordal_distance_many(points: np.ndarray, q: np.ndarray) -> np.ndarray:
    """Vectorized chordal distance from rows of ``points`` to the point ``q``."""
    inner = np.abs(points @ np.conj(q)) ** 2
    return np.sqrt(np.clip(1.0 - inner, 0.0, 1.0))


# ---------------------------------------------------------------------------
# invariant samplers


def sample_fs_many(k: int, n: int, rng: np.random.Generator) -> np.ndarray:
    """n unit vectors distributed by the invariant probability on P^k.

    Normalized standard complex Gaussians; rows are unit norm but not
    phase-normalized (test functions are phase invariant).
    """
    if k < 1:
        raise ValueError("k >= 1 required")
    z = rng.standard_normal((n, k + 1)) + 1j * rng.standard_normal((n, k + 1))
    return z / np.linalg.norm(z, axis=1, keepdims=True)


def sample_real_many(k: int, n: int, rng: np.random.Generator) -> np.ndarray:
    """n unit vectors distributed by the invariant probability on RP^k."""
    if k < 1:
        raise ValueError("k >= 1 required")
    x = rng.standard_normal((n, k + 1))
    return (x / np.linalg.norm(x, axis=1, keepdims=True)).astype(complex)


def sample_point_fs(k: int, rng: np.random.Generator) -> ProjectivePoint:
    """One point of P^k distributed by the invariant (Fubini-Study) probability."""
    return ProjectivePoint.from_coords(sample_fs_many(k, 1, rng)[0])


def sample_point_real(k: int, rng: np.random.Generator) -> ProjectivePoint:
    """One point of RP^k distributed by the orthogonally invariant probability."""
    return ProjectivePoint.from_coords(sample_real_many(k, 1, rng)[0])


def random_unitary(n: int, rng: np.random.Generator) -> np.ndarray:
    """Haar-distributed n x n unitary (QR of a complex Gaussian, phases fixed)."""
    z = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
    q, r = np.linalg.qr(z)
    d = np.diagonal(r)
    return q * (d / np.abs(d))


# ---------------------------------------------------------------------------
# test functions


@dataclass(frozen=True)
class TestFunction:
    """Smooth scalar test function on P^k with its exact invariant integral.

    ``eval`` acts on an (N, k+1) array of unit homogeneous coordinates and
    returns an (N,) real array.  ``fs_integral`` is the closed-form value of
    the integral against the invariant volume; ``c2_norm_bound`` is an a
    priori bound on the C^2 norm, recorded as report metadata.
    """

    id: str
    dim: int
    eval: Callable[[np.ndarray], np.ndarray] = field(repr=False)
    fs_integral: float | None = None
    c2_norm_bound: float = 1.0

    def __call__(self, points: np.ndarray) -> np.ndarray:
        pts = np.atleast_2d(np.asarray(points, dtype=complex))
        return self.eval(pts)

    def at(self, p: ProjectivePoint) -> float:
        return float(self.eval(p.coords[None, :])[0])


def _abs2(j: int):
    return lambda z: np.abs(z[:, j]) ** 2


def _re_cross(i: int, j: int):
    return lambda z: np.real(z[:, i] * np.conj(z[:, j]))


def _im_cross(i: int, j: int):
    return lambda z: np.imag(z[:, i] * np.conj(z[:, j]))


def _abs4(j: int):
    return lambda z: np.abs(z[:, j]) ** 4


def _re_cross2(i: int, j: int):
    return lambda z: np.real((z[:, i] * np.conj(z[:, j])) ** 2)


def _im_cross2(i: int, j: int):
    return lambda z: np.imag((z[:, i] * np.conj(z[:, j])) ** 2)


def builtin_test_functions(k: int) -> list[TestFunction]:
    """The closed-form library on P^k.

    Contains the constant 1, the coordinate family |z_j|^2/||z||^2 for
    j = 0..k (which sums to 1 pointwise), the first cross terms
    Re/Im(z_0 conj(z_1))/||z||^2 (integral 0 by phase invariance), and
    |z_0|^4/||z||^4 with integral 2/((k+1)(k+2)).
    """
    fns = [TestFunction("one", k, lambda z: np.ones(len(z)), fs_integral=1.0, c2_norm_bound=1.0)]
    for j in range(k + 1):
        fns.append(
            TestFunction(f"abs2_{j}", k, _abs2(j), fs_integral=1.0 / (k + 1), c2_norm_bound=8.0)
        )
    fns.append(TestFunction("re_01", k, _re_cross(0, 1), fs_integral=0.0, c2_norm_bound=8.0))
    fns.append(TestFunction("im_01", k, _im_cross(0, 1), fs_integral=0.0, c2_norm_bound=8.0))
    fns.append(
        TestFunction(
            "abs4_0", k, _abs4(0), fs_integral=2.0 / ((k + 1) * (k + 2)), c2_norm_bound=16.0
        )
    )
    # squared cross terms stay even under coordinate sign flips, which keeps
    # them alive on the symmetric fibers of even maps
    fns.append(TestFunction("re2_01", k, _re_cross2(0, 1), fs_integral=0.0, c2_norm_bound=16.0))
    fns.append(TestFunction("im2_01", k, _im_cross2(0, 1), fs_integral=0.0, c2_norm_bound=16.0))
    return fns


def get_test_function(k: int, fn_id: str) -> TestFunction:
    for fn in builtin_test_functions(k):
        if fn.id == fn_id:
            return fn
    raise KeyError(f"unknown test function id {fn_id!r} on P^{k}")


# ---------------------------------------------------------------------------
# empirical measures


@dataclass
class EmpiricalMeasure:
    """Weighted point cloud on P^k: rows of ``points`` are unit vectors."""

    points: np.ndarray
    weights: np.ndarray

    def __post_init__(self):
        self.points = np.asarray(self.points, dtype=complex)
        self.weights = np.asarray(self.weights, dtype=float)
        if self.points.ndim != 2 or len(self.points) != len(self.weights):
            raise ValueError("points must be (N, k+1) with matching weights")
        if np.any(self.weights < 0):
            raise ValueError("weights must be nonnegative")

    @classmethod
    def from_points(cls, points: Sequence, weights=None) -> "EmpiricalMeasure":
        rows = []
        for p in points:
            v = p.coords if isinstance(p, ProjectivePoint) else normalize_coords(p)
            rows.append(v)
        pts = np.array(rows, dtype=complex)
        if weights is None:
            weights = np.ones(len(pts))
        return cls(pts, np.asarray(weights, dtype=float))

    @property
    def dim(self) -> int:
        return self.points.shape[1] - 1

    @property
    def total(self) -> float:
        return float(self.weights.sum())

    def normalized(self) -> "EmpiricalMeasure":
        t = self.total
        if t <= 0:
            raise ValueError("cannot normalize a zero measure")
        return EmpiricalMeasure(self.points, self.weights / t)

    def pair(self, fn: TestFunction | Callable[[np.ndarray], np.ndarray]) -> float:
        """Integral of ``fn`` against the measure."""
        vals = fn(self.points) if isinstance(fn, TestFunction) else fn(self.points)
        return float(np.dot(self.weights, vals))


# ---------------------------------------------------------------------------
# closed-form constants


def harmonic_number(k: int) -> float:
    return sum(1.0 / n for n in range(1, k + 1))


def sphere_log_modulus_integral(
    k: int, n_samples: int, rng: np.random.Generator
) -> tuple[float, float]:
    """Monte Carlo estimate of the mean of log|z_1| on the unit sphere of C^{k+1}.

    The exact value is -H_k/2 where H_k is the k-th harmonic number.
    Returns (estimate, standard error).
    """
    if k < 1:
        raise ValueError("k >= 1 required")
    if n_samples < 10**3:
        raise ValueError("n_samples >= 1000 required")
    total = 0.0
    total_sq = 0.0
    left = n_samples
    while left > 0:
        m = min(left, 1_000_000)
        pts = sample_fs_many(k, m, rng)
        v = np.log(np.abs(pts[:, 0]))
        total += float(v.sum())
        total_sq += float((v * v).sum())
        left -= m
    mean = total / n_samples
    var = max(0.0, total_sq / n_samples - mean * mean)
    return mean, math.sqrt(var / n_samples)


def multiproj_normalization(k: int, l: int) -> float:
    """Normalizing constant c making the product Kaehler form on (P^k)^l unit volume.

    c^{-kl} is the exact big-integer product of binomials
    C(kl, k) C(kl-k, k) ... C(2k, k); the l = 1 product is empty and c = 1.
    """
    if k < 1 or l < 1:
        raise ValueError("k, l >= 1 required")
    prod = 1
    for j in range(2, l + 1):
        prod *= math.comb(j * k, k)
    if prod == 1:
        return 1.0
    return math.exp(-math.log(prod) / (k * l))

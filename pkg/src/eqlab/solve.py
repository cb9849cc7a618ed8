"""Numerical root extraction: companion matrices on P^1 and resultant
elimination in P^2.

The elimination pipeline works in a generically rotated unitary frame:
the resultant in the eliminated variable is sampled at roots of unity and
interpolated by inverse FFT, its roots give one coordinate, and
back-substitution recovers full points.  Frames are retried up to three
times before a conditioning error is raised.  Multiplicities of numerical
roots are assigned by clustering within chordal radius 1e-6.
"""

from __future__ import annotations

import numpy as np

from .poly import HomogeneousPoly, PolyError, exact_gcd
from .projective import ProjectivePoint, chordal_distance, random_unitary

CLUSTER_RADIUS = 1e-6
RESIDUAL_TOL = 1e-6


class ZeroPolynomialError(PolyError):
    pass


class CommonFactorError(PolyError):
    pass


class ConditioningError(PolyError):
    pass


# ---------------------------------------------------------------------------
# P^1 roots


def _p1_points_from_affine(roots: np.ndarray) -> np.ndarray:
    """Unit vectors [z : 1]/norm for an array of affine roots."""
    out = np.stack([roots, np.ones_like(roots)], axis=1)
    return out / np.linalg.norm(out, axis=1, keepdims=True)


def roots_p1_coeffs(c_asc: np.ndarray) -> np.ndarray:
    """All projective roots of sum_j c[j] x0^j x1^(n-j), as (n, 2) unit vectors.

    Exact zero leading (resp. trailing) coefficients contribute roots at
    [1:0] (resp. [0:1]); the remaining roots come from companion-matrix
    eigenvalues.  The count always equals the degree.
    """
    c = np.asarray(c_asc, dtype=complex)
    n = len(c) - 1
    if n < 0 or not np.any(c != 0):
        raise ZeroPolynomialError("zero polynomial has no well-defined root set")
    hi = n
    while c[hi] == 0:
        hi -= 1
    lo = 0
    while c[lo] == 0:
        lo += 1
    rows = []
    if hi < n:
        inf = np.zeros((n - hi, 2), dtype=complex)
        inf[:, 0] = 1.0
        rows.append(inf)
    if lo > 0:
        zero = np.zeros((lo, 2), dtype=complex)
        zero[:, 1] = 1.0
        rows.append(zero)
    mid = c[lo : hi + 1]
    if len(mid) > 1:
        finite = np.roots(mid[::-1])
        rows.append(_p1_points_from_affine(finite))
    return np.concatenate(rows, axis=0) if rows else np.zeros((0, 2), dtype=complex)


def univariate_roots(p: HomogeneousPoly) -> list[ProjectivePoint]:
    """Roots of a binary form on P^1, with multiplicity (degree many points)."""
    if p.nvars != 2:
        raise ValueError("univariate_roots expects nvars == 2")
    if p.is_zero:
        raise ZeroPolynomialError("zero polynomial has no well-defined root set")
    pf = p.to_float()
    c = np.zeros(pf.degree + 1, dtype=complex)
    for e, v in pf.coeffs.items():
        c[e[0]] = v
    pts = roots_p1_coeffs(c)
    return [ProjectivePoint.from_coords(row) for row in pts]


# ---------------------------------------------------------------------------
# elimination in P^2


def transform_unitary(p: HomogeneousPoly, U: np.ndarray) -> HomogeneousPoly:
    """p(U w) as a polynomial in the rotated coordinates w."""
    pf = p.to_float()
    nv = pf.nvars
    linear = []
    for i in range(nv):
        coeffs = {}
        for j in range(nv):
            if U[i, j] != 0:
                e = tuple(1 if t == j else 0 for t in range(nv))
                coeffs[e] = complex(U[i, j])
        linear.append(HomogeneousPoly(nv, 1, coeffs, "float"))
    return pf.substitute(linear)


def _x0_coeff_table(p: HomogeneousPoly) -> list[list[tuple[int, complex]]]:
    """table[e0] lists (e1, coeff) with the x2-exponent implied by homogeneity."""
    table: list[list[tuple[int, complex]]] = [[] for _ in range(p.degree + 1)]
    for e, c in p.coeffs.items():
        table[e[0]].append((e[1], complex(c)))
    return table


def _univar_coeffs_at(table, degree: int, t: complex) -> np.ndarray:
    """Coefficients in x0 of p(x0, t, 1), ascending."""
    out = np.zeros(degree + 1, dtype=complex)
    for e0, entries in enumerate(table):
        s = 0.0 + 0.0j
        for e1, c in entries:
            s += c * (t**e1)
        out[e0] = s
    return out


def _sylvester_batch(pc: np.ndarray, qc: np.ndarray) -> np.ndarray:
    """Batched Sylvester determinants.

    pc: (M, np+1) ascending coefficients per node; qc: (M, nq+1).
    Returns the (M,) resultants.
    """
    m, np1 = pc.shape
    nq1 = qc.shape[1]
    n_p, n_q = np1 - 1, nq1 - 1
    dim = n_p + n_q
    S = np.zeros((m, dim, dim), dtype=complex)
    for r in range(n_q):
        S[:, r, r : r + np1] = pc[:, ::-1]
    for r in range(n_p):
        S[:, n_q + r, r : r + nq1] = qc[:, ::-1]
    return np.linalg.det(S)


def _cluster_p1(points: np.ndarray, radius: float) -> list[list[int]]:
    """Greedy union of indices whose chordal distance is below ``radius``."""
    n = len(points)
    parent = list(range(n))

    def find(i):
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    inner = np.abs(points @ points.conj().T) ** 2
    d = np.sqrt(np.clip(1.0 - inner, 0.0, 1.0))
    for i in range(n):
        for j in range(i + 1, n):
            if d[i, j] <= radius:
                ri, rj = find(i), find(j)
                if ri != rj:
                    parent[ri] = rj
    groups: dict[int, list[int]] = {}
    for i in range(n):
        groups.setdefault(find(i), []).append(i)
    return list(groups.values())


def _normalized_float(p: HomogeneousPoly) -> HomogeneousPoly:
    pf = p.to_float()
    nrm = pf.coeff_norm()
    if nrm == 0:
        raise ZeroPolynomialError("zero polynomial")
    return pf.scale(1.0 / nrm)


def bivariate_common_zeros(
    p: HomogeneousPoly,
    q: HomogeneousPoly,
    rng: np.random.Generator | None = None,
    retries: int = 3,
) -> list[ProjectivePoint]:
    """Common zeros in P^2 of two coprime forms, with multiplicity.

    Returns exactly deg(p)*deg(q) points (Bezout), repeated per
    multiplicity.  Raises :class:`CommonFactorError` when the resultant
    vanishes identically and :class:`ConditioningError` when
    back-substitution stays ambiguous after frame retries.
    """
    if p.nvars != 3 or q.nvars != 3:
        raise ValueError("bivariate_common_zeros expects nvars == 3")
    if p.degree < 1 or q.degree < 1:
        raise ValueError("both degrees must be >= 1")
    if p.mode == "exact" and q.mode == "exact":
        g = exact_gcd(p, q)
        if g.degree > 0:
            raise CommonFactorError(f"common factor of degree {g.degree}")
    rng = rng if rng is not None else np.random.default_rng(1905)
    pn, qn = _normalized_float(p), _normalized_float(q)
    n_p, n_q = pn.degree, qn.degree
    D = n_p * n_q
    last_reason = ""
    for _ in range(retries):
        U = random_unitary(3, rng)
        pr, qr = transform_unitary(pn, U), transform_unitary(qn, U)
        # full x0-degree in the rotated frame, else the frame is unusable
        e0p = tuple([n_p, 0, 0])
        e0q = tuple([n_q, 0, 0])
        if abs(pr.coeffs.get(e0p, 0)) < 1e-9 or abs(qr.coeffs.get(e0q, 0)) < 1e-9:
            last_reason = "degenerate frame (dropped x0-degree)"
            continue
        tp, tq = _x0_coeff_table(pr), _x0_coeff_table(qr)
        M = D + 1
        nodes = np.exp(2j * np.pi * np.arange(M) / M)
        pc = np.stack([_univar_coeffs_at(tp, n_p, t) for t in nodes])
        qc = np.stack([_univar_coeffs_at(tq, n_q, t) for t in nodes])
        res_vals = _sylvester_batch(pc, qc)
        # identically vanishing resultant = common factor; judge against the
        # Hadamard scale of the Sylvester rows, not absolutely
        hadamard = np.linalg.norm(pc, axis=1) ** n_q * np.linalg.norm(qc, axis=1) ** n_p
        if np.max(np.abs(res_vals) / np.maximum(hadamard, 1e-300)) < 1e-12:
            raise CommonFactorError("resultant vanishes identically (within tolerance)")
        # samples at the M-th roots of unity: ascending coefficients via DFT
        r = np.fft.fft(res_vals) / M
        peak = float(np.max(np.abs(r)))
        if abs(r[-1]) < 1e-13 * peak:
            last_reason = "resultant leading coefficient collapsed"
            continue
        w1_roots = np.roots(r[::-1])
        clusters = _cluster_p1(_p1_points_from_affine(w1_roots), CLUSTER_RADIUS)
        points: list[ProjectivePoint] = []
        ok = True
        for idx in clusters:
            mult = len(idx)
            t = complex(w1_roots[idx[0]])
            cand = roots_p1_coeffs(_univar_coeffs_at(tp, n_p, t))
            accepted = []
            for u in cand:
                alpha, beta = u
                w = np.array([alpha, beta * t, beta], dtype=complex)
                z = U @ w
                nz = z / np.linalg.norm(z)
                res = max(abs(pn.eval_many(nz[None, :])[0]), abs(qn.eval_many(nz[None, :])[0]))
                if res < RESIDUAL_TOL:
                    accepted.append(nz)
            if not accepted:
                ok = False
                last_reason = "no back-substitution candidate passed the residual check"
                break
            base = accepted[0]
            if any(chordal_distance(base, other) > 1e-4 for other in accepted[1:]):
                ok = False
                last_reason = "ambiguous back-substitution (two distinct matches)"
                break
            pt = ProjectivePoint.from_coords(base)
            points.extend([pt] * mult)
        if ok:
            return points
    raise ConditioningError(f"elimination failed after {retries} frames: {last_reason}")

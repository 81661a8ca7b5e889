"""Qubit Bloch-vector conversion and computational geometry in R^3.

A qubit state is rho(v) = (I + v . sigma)/2 with sigma the standard Pauli
triple and |0> the +Z eigenstate. Dual optimization of qubit discrimination
reduces to ball problems over scaled Bloch points:

* equal priors: the minimum enclosing ball of the points v_x / N,
* general priors: minimize over k the piecewise-smooth convex function
  f(k) = max_x (q_x + |k - q_x v_x|), the "shifted" enclosing ball.

Both are solved exactly here. The minimum enclosing ball uses Welzl's
randomized move-to-front recursion with exact basis solves for one to four
support points. The shifted problem runs a subgradient pass for
localization and then refines to machine precision by enumerating active
subsets of size <= 4: restricted to the affine hull of a subset's centers,
the equal-value equations collapse to a linear system plus one quadratic
in the optimal value, so every candidate optimum is available in closed
form.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass
from itertools import combinations

import numpy as np

from .errors import ConvergenceError
from .operators import DensityOperator, HermitianOperator, _as_matrix

PAULI_X = np.array([[0, 1], [1, 0]], dtype=complex)
PAULI_Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
PAULI_Z = np.array([[1, 0], [0, -1]], dtype=complex)

BLOCH_NORM_TOL = 1e-10
SUPPORT_TOL = 1e-9
_DEDUP_TOL = 1e-12
_CONTAIN_EPS = 1 + 1e-14


def to_bloch(rho) -> np.ndarray:
    """Bloch vector (x, y, z) of a single-qubit density operator."""
    m = _as_matrix(rho)
    if m.shape != (2, 2):
        raise ValueError(f"expected a qubit operator, got dimension {m.shape[0]}")
    return np.array(
        [
            np.trace(m @ PAULI_X).real,
            np.trace(m @ PAULI_Y).real,
            np.trace(m @ PAULI_Z).real,
        ]
    )


def from_bloch(v) -> DensityOperator:
    """Density operator (I + v . sigma)/2 for a Bloch vector with |v| <= 1."""
    v = np.asarray(v, dtype=float).reshape(3)
    if not np.all(np.isfinite(v)):
        raise ValueError("Bloch vector must be finite")
    norm = float(np.linalg.norm(v))
    if norm > 1 + BLOCH_NORM_TOL:
        raise ValueError(f"Bloch vector norm {norm} exceeds 1")
    m = 0.5 * (np.eye(2, dtype=complex) + v[0] * PAULI_X + v[1] * PAULI_Y + v[2] * PAULI_Z)
    return DensityOperator(HermitianOperator(m))


@dataclass(frozen=True, eq=False)
class BallResult:
    """Smallest ball enclosing a point set.

    support holds the indices of input points on the boundary (within a
    1e-9 relative tolerance); the center always lies in their convex
    hull, which convex_weights_for_center can witness. seed records the
    shuffle seed for reproducibility.
    """

    center: np.ndarray
    radius: float
    support: tuple[int, ...]
    seed: int


@dataclass(frozen=True, eq=False)
class ShiftedBallResult:
    """Minimizer of max_x (shift_x + |k - point_x|) over k in R^3.

    value is the optimal objective; active lists the indices attaining it
    within tolerance.
    """

    center: np.ndarray
    value: float
    active: tuple[int, ...]


def _ball_contains(center, radius_sq, p) -> bool:
    d = p - center
    return float(d @ d) <= radius_sq * _CONTAIN_EPS + 1e-30


def _circumcenter_3(a, b, c):
    """Center of the circle through three points, in their plane."""
    ab = b - a
    ac = c - a
    g11 = float(ab @ ab)
    g22 = float(ac @ ac)
    g12 = float(ab @ ac)
    det = g11 * g22 - g12 * g12
    if det <= 1e-28 * max(g11 * g22, 1e-300):
        return None
    alpha = (0.5 * g11 * g22 - 0.5 * g22 * g12) / det
    beta = (0.5 * g11 * g22 - 0.5 * g11 * g12) / det
    return a + alpha * ab + beta * ac


def _circumcenter_4(a, b, c, d):
    """Center of the sphere through four points."""
    m = 2.0 * np.array([b - a, c - a, d - a])
    rhs = np.array([b @ b - a @ a, c @ c - a @ a, d @ d - a @ a])
    det = float(np.linalg.det(m))
    scale = max(float(np.max(np.abs(m))) ** 3, 1e-300)
    if abs(det) <= 1e-12 * scale:
        return None
    return np.linalg.solve(m, rhs)


def _ball_of_basis(basis):
    """Smallest ball enclosing at most four points, by subset enumeration."""
    if not basis:
        return None
    best = None
    n = len(basis)
    for size in range(1, n + 1):
        for subset in combinations(range(n), size):
            pts = [basis[i] for i in subset]
            if size == 1:
                center = pts[0]
            elif size == 2:
                center = 0.5 * (pts[0] + pts[1])
            elif size == 3:
                center = _circumcenter_3(*pts)
            else:
                center = _circumcenter_4(*pts)
            if center is None:
                continue
            radius_sq = max(float((p - center) @ (p - center)) for p in pts)
            if all(_ball_contains(center, radius_sq, basis[i]) for i in range(n)):
                if best is None or radius_sq < best[1]:
                    best = (center, radius_sq)
    return best


def _welzl(points: list, count: int, boundary: list):
    """Welzl recursion over the first count points with a fixed boundary set."""
    ball = _ball_of_basis(boundary)
    if len(boundary) == 4:
        return ball
    i = 0
    while i < count:
        p = points[i]
        if ball is None or not _ball_contains(ball[0], ball[1], p):
            ball = _welzl(points, i, boundary + [p])
            points.pop(i)
            points.insert(0, p)
        i += 1
    return ball


def min_enclosing_ball(points, seed: int = 0) -> BallResult:
    """Exact smallest enclosing ball of points in R^3.

    Duplicates within 1e-12 are collapsed before the randomized recursion;
    support membership is evaluated on the original list afterwards.
    """
    pts = [np.asarray(p, dtype=float).reshape(3) for p in points]
    if not pts:
        raise ValueError("at least one point is required")
    if not all(np.all(np.isfinite(p)) for p in pts):
        raise ValueError("points must be finite")

    unique: list[np.ndarray] = []
    for p in pts:
        if all(float(np.linalg.norm(p - u)) > _DEDUP_TOL for u in unique):
            unique.append(p)

    shuffled = list(unique)
    random.Random(seed).shuffle(shuffled)
    ball = _welzl(shuffled, len(shuffled), [])
    center = ball[0]
    radius = math.sqrt(max(ball[1], 0.0))

    tol = SUPPORT_TOL * (1.0 + radius)
    support = tuple(
        i for i, p in enumerate(pts) if abs(float(np.linalg.norm(p - center)) - radius) <= tol
    )
    center = center.copy()
    center.setflags(write=False)
    return BallResult(center=center, radius=radius, support=support, seed=seed)


def convex_weights_for_center(points, center, tol: float = 1e-9) -> np.ndarray:
    """Convex weights over points reproducing a target inside their hull.

    Enumerates subsets of size <= 4 in lexicographic order and accepts the
    first non-negative least-squares solution whose residual is below tol.
    Raising here signals a point set that does not actually contain the
    target, e.g. a support set that is not a true enclosing-ball support.
    """
    pts = np.asarray([np.asarray(p, dtype=float).reshape(3) for p in points])
    target = np.asarray(center, dtype=float).reshape(3)
    n = len(pts)
    rhs = np.append(target, 1.0)
    for size in range(1, min(4, n) + 1):
        for subset in combinations(range(n), size):
            a = np.vstack([pts[list(subset)].T, np.ones((1, size))])
            sol, *_ = np.linalg.lstsq(a, rhs, rcond=None)
            if np.min(sol) < -1e-9 or float(np.linalg.norm(a @ sol - rhs)) > tol:
                continue
            weights = np.zeros(n)
            weights[list(subset)] = np.clip(sol, 0.0, None)
            weights /= weights.sum()
            return weights
    raise ValueError("target point is not in the convex hull of the given points")


def _max_shifted_distance(k, pts, shifts) -> float:
    return float(np.max(shifts + np.linalg.norm(pts - k, axis=1)))


def _subgradient_localize(pts, shifts, max_iter: int):
    """Subgradient descent on f(k) = max_x (shift_x + |k - p_x|).

    Diminishing steps c/sqrt(iter) with c the initial spread of the
    points; returns the best iterate. Used only to localize the optimum
    and bound it from above, so it stops early once progress stalls.
    """
    k = np.average(pts, axis=0, weights=shifts)
    spread = 0.0
    for i in range(len(pts)):
        for j in range(i + 1, len(pts)):
            spread = max(spread, float(np.linalg.norm(pts[i] - pts[j])))
    c = spread if spread > 0 else 1e-3

    best_k = k.copy()
    best_f = _max_shifted_distance(k, pts, shifts)
    stall = 0
    for it in range(1, max_iter + 1):
        gaps = shifts + np.linalg.norm(pts - k, axis=1)
        x = int(np.argmax(gaps))
        direction = k - pts[x]
        norm = float(np.linalg.norm(direction))
        if norm < 1e-15:
            break
        k = k - (c / math.sqrt(it)) * direction / norm
        f = _max_shifted_distance(k, pts, shifts)
        if f < best_f - 1e-13:
            best_f = f
            best_k = k.copy()
            stall = 0
        else:
            stall += 1
            if stall > 40:
                break
    return best_k, best_f


def _solve_quadratic(a: float, b: float, c: float) -> list[float]:
    if abs(a) < 1e-14:
        return [] if abs(b) < 1e-14 else [-c / b]
    disc = b * b - 4 * a * c
    if disc < -1e-18:
        return []
    disc = max(disc, 0.0)
    root = math.sqrt(disc)
    return [(-b - root) / (2 * a), (-b + root) / (2 * a)]


def _basis_candidates(pts, shifts, subset) -> list[np.ndarray]:
    """Candidate optima with every subset constraint active.

    The optimal center lies in the affine hull of the active points, so
    restricting to that hull loses nothing. Differences of squared
    constraint equations are linear in the center for a fixed value t,
    yielding center(t) affine in t; the remaining norm equation is then a
    quadratic in t.
    """
    idx = list(subset)
    base = pts[idx[0]]
    s0 = shifts[idx[0]]

    if len(idx) == 1:
        return [base]

    if len(idx) == 2:
        delta = pts[idx[1]] - base
        d = float(np.linalg.norm(delta))
        if d < 1e-14:
            return []
        tau = 0.5 * (d + shifts[idx[1]] - s0)
        if tau < 0.0 or tau > d:
            return []
        return [base + (tau / d) * delta]

    edges = np.array([pts[i] - base for i in idx[1:]])
    diffs = np.array([shifts[i] - s0 for i in idx[1:]])
    lengths_sq = np.sum(edges * edges, axis=1)
    a_vec = lengths_sq - diffs * (np.array([shifts[i] for i in idx[1:]]) + s0)
    b_vec = 2.0 * diffs

    if len(idx) == 3:
        gram = edges @ edges.T
        det = float(np.linalg.det(gram))
        if abs(det) <= 1e-24 * max(float(lengths_sq[0] * lengths_sq[1]), 1e-300):
            return []
        coeff_a = np.linalg.solve(gram, 0.5 * a_vec)
        coeff_b = np.linalg.solve(gram, 0.5 * b_vec)
        w_a = coeff_a @ edges
        w_b = coeff_b @ edges
    else:
        det = float(np.linalg.det(edges))
        scale = max(float(np.max(np.abs(edges))) ** 3, 1e-300)
        if abs(det) <= 1e-12 * scale:
            return []
        w_a = np.linalg.solve(edges, 0.5 * a_vec)
        w_b = np.linalg.solve(edges, 0.5 * b_vec)

    # |w_a + t w_b|^2 = (t - s0)^2
    qa = float(w_b @ w_b) - 1.0
    qb = 2.0 * float(w_a @ w_b) + 2.0 * s0
    qc = float(w_a @ w_a) - s0 * s0
    out = []
    s_max = max(shifts[i] for i in idx)
    for t in _solve_quadratic(qa, qb, qc):
        if t < s_max - 1e-12:
            continue
        k = base + w_a + t * w_b
        if all(abs(float(np.linalg.norm(k - pts[i])) - (t - shifts[i])) <= 1e-7 for i in idx):
            out.append(k)
    return out


def shifted_ball_dual(points, shifts, max_iter: int = 100_000) -> ShiftedBallResult:
    """Minimize max_x (shift_x + |k - point_x|) exactly.

    A short subgradient pass localizes the optimum and supplies an upper
    bound; enumeration of active subsets then produces the exact
    minimizer. The two must agree, otherwise the routine reports
    non-convergence.
    """
    pts = np.asarray([np.asarray(p, dtype=float).reshape(3) for p in points])
    s = np.asarray(shifts, dtype=float).reshape(-1)
    if len(pts) != len(s):
        raise ValueError("points and shifts must have equal length")
    if not (np.all(np.isfinite(pts)) and np.all(np.isfinite(s))):
        raise ValueError("points and shifts must be finite")
    if np.any(s <= 0):
        raise ValueError("shifts must be positive")
    if abs(float(np.sum(s)) - 1.0) > 1e-10:
        raise ValueError("shifts must sum to 1")

    sub_k, sub_f = _subgradient_localize(pts, s, min(max_iter, 600))

    candidates = [sub_k]
    n = len(pts)
    for size in range(1, min(4, n) + 1):
        for subset in combinations(range(n), size):
            candidates.extend(_basis_candidates(pts, s, subset))

    cand = np.asarray(candidates)
    values = s[None, :] + np.linalg.norm(cand[:, None, :] - pts[None, :, :], axis=2)
    objective = np.max(values, axis=1)
    best = int(np.argmin(objective))
    k = cand[best]
    t = float(objective[best])

    if t > sub_f + 1e-6:
        raise ConvergenceError("shifted ball refinement is inconsistent with descent bound")

    gaps = s + np.linalg.norm(pts - k, axis=1)
    active = tuple(int(i) for i in np.flatnonzero(gaps >= t - 1e-7 * (1.0 + t)))
    k = k.copy()
    k.setflags(write=False)
    return ShiftedBallResult(center=k, value=t, active=active)

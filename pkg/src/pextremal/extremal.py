"""Extremal functions of the closed unit ball, torus, and product sets.

The ball value at a point outside the ball is the maximum of the
concave 1-homogeneous functional over the constraint set
{theta >= 0, |theta|_P = 1}.  Closed forms exist for q = 1 (radial) and
for q = inf in two variables; every other case is solved numerically
from the Lagrange system, whose multiplier equals the optimal value.
"""
from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np
from scipy.special import gammaln

from .body import ConvexBody
from .functional import BoundaryError, DomainError, ModuliPoint, f_gradient, f_hessian, f_value

# Points with |z|^2 <= 1 + HULL_TOL are treated as lying in the closed ball.
HULL_TOL = 1e-14

MAX_ITER = 10_000


class ConvergenceError(RuntimeError):
    """Solver failed to reach tolerance; carries the best iterate found."""

    def __init__(self, message, result=None):
        super().__init__(message)
        self.result = result


@dataclass(frozen=True)
class ExtremalResult:
    value: float
    theta_star: Optional[np.ndarray]
    kkt_residual: float
    iterations: int
    method: str  # closed_form_simplex | closed_form_linf2d | numeric_kkt | hull_interior


def v_ball_simplex(p: ModuliPoint) -> float:
    """Classical-degree value: log of the euclidean norm, clamped at 0."""
    r2 = p.norm_sq
    return 0.5 * math.log(r2) if r2 > 1 else 0.0


def v_ball_linf_2d(p: ModuliPoint) -> float:
    """Max-degree value in two variables: the three-case piecewise formula."""
    if p.d != 2:
        raise ValueError("v_ball_linf_2d requires d = 2")
    s1, s2 = p.moduli_sq
    if s1 + s2 <= 1.0:
        return 0.0
    if s1 <= 0.5 <= s2:
        v = 0.5 * (math.log(s2) - math.log1p(-s1))
    elif s2 <= 0.5 <= s1:
        v = 0.5 * (math.log(s1) - math.log1p(-s2))
    else:
        v = 0.5 * math.log(s1 * s2) + math.log(2.0)
    return max(v, 0.0)


def _linf2d_theta(s1: float, s2: float) -> np.ndarray:
    if s1 <= 0.5 <= s2:
        return np.array([s1 / (1.0 - s1), 1.0])
    if s2 <= 0.5 <= s1:
        return np.array([1.0, s2 / (1.0 - s2)])
    return np.array([1.0, 1.0])


def kkt_residual(q: float, theta, p: ModuliPoint) -> float:
    """Stationarity defect of the Lagrange system, multiplier = value."""
    if math.isinf(q):
        raise ValueError("kkt_residual is defined for finite q")
    theta = np.asarray(theta, dtype=float)
    grad = f_gradient(theta, p)
    val = f_value(theta, p)
    stat = np.max(np.abs(grad - val * theta ** (q - 1.0)))
    constraint = abs(float(np.sum(theta ** q) ** (1.0 / q)) - 1.0)
    return float(max(stat, constraint))


def _solve_kkt(q: float, s: np.ndarray, tol: float, theta0=None):
    """Maximize F over {theta > 0, |theta|_q = 1} for finite q >= 1.

    Scale-invariant gradient ascent with Armijo backtracking brings the
    iterate near the optimum; Newton on the Lagrange system finishes to
    tolerance.  The boundary repels (the gradient blows up there), so no
    active-set handling is needed.
    """
    d = s.size
    p = ModuliPoint(tuple(s))

    def norm_q(t):
        return float(np.sum(t ** q) ** (1.0 / q))

    def residual(t):
        grad = 0.5 * (np.log(s) - np.log(t) + math.log(t.sum()))
        val = 0.5 * float(t @ np.log(s) - t @ np.log(t) + t.sum() * math.log(t.sum()))
        stat = np.max(np.abs(grad - val * t ** (q - 1.0)))
        return max(stat, abs(norm_q(t) - 1.0)), val, grad

    if theta0 is None:
        theta = s / norm_q(s)
    else:
        theta0 = np.asarray(theta0, dtype=float)
        if theta0.shape != s.shape or np.any(theta0 <= 0):
            raise ValueError("theta0 must be a positive vector matching s")
        theta = theta0 / norm_q(theta0)
    iters = 0

    res, val, grad = residual(theta)
    best = (res, theta.copy(), val)
    while iters < MAX_ITER:
        if res <= tol:
            return theta, val, res, iters
        if res < best[0]:
            best = (res, theta.copy(), val)

        if res < 1e-2 * max(1.0, abs(val)):
            # Newton on [grad_i - F*theta_i^(q-1) = 0 (i < d-1), |theta|_q^q = 1]
            new_theta = _newton_step(q, s, theta, val, grad)
            if new_theta is not None:
                new_res, new_val, new_grad = residual(new_theta)
                iters += 1
                if new_res < res:
                    theta, res, val, grad = new_theta, new_res, new_val, new_grad
                    continue
        # ascent step projected onto the tangent of the constraint
        m = theta ** (q - 1.0)
        proj = grad - (grad @ m) / (m @ m) * m
        step = 1.0
        accepted = False
        slope = float(proj @ proj)
        while step > 1e-18:
            cand = np.maximum(theta + step * proj, 1e-300)
            cand = cand / norm_q(cand)
            cand_val = f_value(cand, p)
            iters += 1
            if cand_val >= val + 1e-4 * step * slope:
                theta = cand
                res, val, grad = residual(theta)
                accepted = True
                break
            step *= 0.5
        if not accepted:
            # line search stalled; fall back to a pure Newton attempt
            new_theta = _newton_step(q, s, theta, val, grad)
            iters += 1
            if new_theta is None:
                break
            new_res, new_val, new_grad = residual(new_theta)
            if new_res >= res:
                break
            theta, res, val, grad = new_theta, new_res, new_val, new_grad

    if res <= tol:
        return theta, val, res, iters
    raise ConvergenceError(
        f"KKT residual {best[0]:.3e} > tol {tol:.1e} after {iters} iterations",
        result=ExtremalResult(float(best[2]), best[1], float(best[0]), iters, "numeric_kkt"),
    )


def _newton_step(q, s, theta, val, grad):
    d = theta.size
    S = theta.sum()
    hess = 0.5 * (np.ones((d, d)) / S - np.diag(1.0 / theta))
    tq1 = theta ** (q - 1.0)
    J = np.empty((d, d))
    E = np.empty(d)
    E[: d - 1] = grad[: d - 1] - val * tq1[: d - 1]
    E[d - 1] = float(np.sum(theta ** q)) - 1.0
    J[: d - 1, :] = hess[: d - 1, :] - np.outer(tq1[: d - 1], grad)
    if q != 1.0:
        J[: d - 1, : d - 1] -= np.diag(val * (q - 1.0) * theta[: d - 1] ** (q - 2.0))
    J[d - 1, :] = q * tq1
    try:
        dx = np.linalg.solve(J, -E)
    except np.linalg.LinAlgError:
        return None
    t = 1.0
    while t > 1e-12 and np.any(theta + t * dx <= 0):
        t *= 0.5
    if t <= 1e-12:
        return None
    return theta + t * dx


def _solve_box_linf(s: np.ndarray, tol: float):
    """Maximize F over the box (0, 1]^d (the q = inf constraint set).

    L-BFGS-B gets close; an active-set Newton polish (coordinates pinned
    at 1) drives the projected-gradient residual to tolerance.
    """
    from scipy.optimize import minimize

    d = s.size
    p = ModuliPoint(tuple(s))
    x0 = np.clip(s / s.max(), 1e-6, 1.0)

    def neg(t):
        t = np.maximum(t, 1e-300)
        return -f_value(t, p), -f_gradient(t, p)

    opt = minimize(neg, x0, jac=True, method="L-BFGS-B",
                   bounds=[(1e-12, 1.0)] * d,
                   options={"ftol": 1e-18, "gtol": 1e-14, "maxiter": 2000})
    theta = np.clip(opt.x, 1e-300, 1.0)
    iters = int(opt.nit)

    for _ in range(60):
        grad = f_gradient(theta, p)
        active = (theta >= 1.0 - 1e-9) & (grad >= -1e-9)
        free = ~active
        resid = _box_residual(theta, grad)
        if resid <= tol:
            break
        iters += 1
        if not np.any(free):
            break
        hess = f_hessian(theta, p)
        try:
            dx = np.linalg.solve(hess[np.ix_(free, free)], -grad[free])
        except np.linalg.LinAlgError:
            break
        step = np.zeros(d)
        step[free] = dx
        t = 1.0
        while t > 1e-12 and np.any(theta + t * step <= 0):
            t *= 0.5
        theta = np.minimum(theta + t * step, 1.0)
    grad = f_gradient(theta, p)
    return theta, f_value(theta, p), _box_residual(theta, grad), iters


def _box_residual(theta, grad):
    """Projected-gradient stationarity defect on the unit box."""
    pushed = np.clip(theta + grad, 1e-300, 1.0)
    return float(np.max(np.abs(pushed - theta)))


def v_ball(P: ConvexBody, p: ModuliPoint, tol: float = 1e-10,
           force_numeric: bool = False) -> ExtremalResult:
    """Extremal-function value of the closed unit ball at a moduli point."""
    if tol <= 0:
        raise ValueError("tol must be positive")
    if p.d != P.d:
        raise ValueError(f"point dimension {p.d} != body dimension {P.d}")

    if p.norm_sq <= 1.0 + HULL_TOL:
        return ExtremalResult(0.0, None, 0.0, 0, "hull_interior")

    # Coordinates many orders below the largest modulus carry optimal
    # weight O(s_i) and shift the value by O(s_i log(1/s_i)), well under
    # any workable tolerance, while wrecking the conditioning of the
    # stationarity system.  Treat them as off-support.
    s_max = max(p.moduli_sq)
    support = tuple(i for i in p.support
                    if p.moduli_sq[i] >= 1e-14 * s_max)
    s = np.array([p.moduli_sq[i] for i in support])

    def embed(theta_red):
        full = np.zeros(P.d)
        full[list(support)] = theta_red
        return full

    dr = s.size
    if dr == 1 and not force_numeric:
        value = 0.5 * math.log(s[0])
        return ExtremalResult(value, embed([1.0]), 0.0, 0, "closed_form_simplex")

    if P.q == 1 and not force_numeric:
        value = 0.5 * math.log(p.norm_sq)
        return ExtremalResult(value, embed(s / s.sum()), 0.0, 0, "closed_form_simplex")

    if math.isinf(P.q):
        if dr <= 2 and not force_numeric:
            if dr == 1:
                value, theta = 0.5 * math.log(s[0]), [1.0]
            else:
                value = v_ball_linf_2d(ModuliPoint(tuple(s)))
                theta = _linf2d_theta(s[0], s[1])
            return ExtremalResult(value, embed(theta), 0.0, 0, "closed_form_linf2d")
        theta, value, res, iters = _solve_box_linf(s, tol)
        if res > tol:
            raise ConvergenceError(
                f"box residual {res:.3e} > tol {tol:.1e}",
                result=ExtremalResult(value, embed(theta), res, iters, "numeric_kkt"))
        return ExtremalResult(value, embed(theta), res, iters, "numeric_kkt")

    theta, value, res, iters = _solve_kkt(P.q, s, tol)
    return ExtremalResult(value, embed(theta), res, iters, "numeric_kkt")


def h_p(P: ConvexBody, p: ModuliPoint) -> float:
    """Logarithmic indicator: support function applied to the coordinate logs."""
    logs = np.array([0.5 * math.log(v) if v > 0 else -math.inf for v in p.moduli_sq])
    xp = np.maximum(logs, 0.0)
    return P.indicator(xp)


def v_torus(P: ConvexBody, p: ModuliPoint) -> float:
    """Extremal value of the unit torus: dual-norm of the positive log moduli."""
    xp = np.array([max(0.0, 0.5 * math.log(v)) if v > 0 else 0.0 for v in p.moduli_sq])
    return P.indicator(xp)


@dataclass(frozen=True)
class UnivariateExtremal:
    """One factor of a product set: a closed disk or a real interval."""

    kind: str  # "unit_disk" | "interval"
    radius: float = 1.0
    endpoints: tuple = (-1.0, 1.0)

    def value(self, w: complex) -> float:
        w = complex(w)
        if self.kind == "unit_disk":
            return max(0.0, math.log(abs(w) / self.radius))
        if self.kind == "interval":
            a, b = self.endpoints
            u = (2.0 * w - (a + b)) / (b - a)
            # Joukowski inverse with |u + sqrt(u-1)sqrt(u+1)| >= 1
            r = u + cmath.sqrt(u - 1.0) * cmath.sqrt(u + 1.0)
            return max(0.0, math.log(abs(r)))
        raise ValueError(f"unknown kind {self.kind!r}")


def v_product(P: ConvexBody, factors: Sequence[UnivariateExtremal], w) -> float:
    """Product-set extremal value: indicator of the univariate values."""
    if len(factors) != P.d:
        raise ValueError("need one univariate factor per dimension")
    vals = np.array([f.value(wi) for f, wi in zip(factors, w)])
    return P.indicator(vals)


def monomial_bound(P: ConvexBody, p: ModuliPoint, n: int) -> float:
    """Finite-degree lower bound from sup-normalized monomials.

    Maximizes ((1/2) sum a_i log s_i - log b_a) / |a|_P over nonzero
    lattice points a of nP supported where the point is, where b_a is
    the sup of |z^a| on the ball.  Each term equals the functional at
    the direction a/|a|_P, so the bound never exceeds the ball value
    and converges to it as the lattice directions fill the constraint
    set.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    if p.norm_sq <= 1.0 + HULL_TOL:
        raise DomainError("monomial bound applies outside the closed ball")
    A = P.index_set(n).as_array()
    A = A[np.any(A != 0, axis=1)]
    s = p.as_array()
    dead = s == 0
    if np.any(dead):
        A = A[~np.any(A[:, dead] != 0, axis=1)]
    if A.shape[0] == 0:
        raise DomainError("no admissible monomials at this point")
    Af = A.astype(float)
    tot = Af.sum(axis=1)
    # log b_a = (1/2)(sum a_i log a_i - |a| log |a|), 0 log 0 = 0
    a_log_a = np.where(Af > 0, Af * np.log(np.where(Af > 0, Af, 1.0)), 0.0).sum(axis=1)
    log_b = 0.5 * (a_log_a - tot * np.log(tot))
    log_s = np.where(s > 0, np.log(np.where(s > 0, s, 1.0)), 0.0)
    vals = (0.5 * (Af @ log_s) - log_b) / P.minkowski_norm_many(Af)
    return float(np.max(vals))

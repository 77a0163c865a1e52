"""Best-L2 approximation on the ball and the rates it exposes.

Monomials are orthogonal on the ball, so the best L2 approximant from
any monomial index set is the Taylor truncation to that set and the
error is an exact orthogonal tail sum.  The three test functions have
axis, even-pair and diagonal coefficient supports respectively, which
is what makes their rates react so differently to the body exponent q.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Iterator, Optional, Tuple

import numpy as np
from scipy.special import gammaln

from .body import ConvexBody
from .extremal import ConvergenceError, v_ball
from .functional import ModuliPoint

LOG_PI = math.log(math.pi)

# Relative size below which the neglected tail past the cutoff must fall.
TAIL_REL_TOL = 1e-16


class TruncationError(RuntimeError):
    """Cutoff too small: the neglected tail is not negligible."""


def monomial_l2_norm_sq(alpha, d: int) -> float:
    """Squared L2(ball) norm of z^alpha: alpha! pi^d / (|alpha| + d)!."""
    alpha = np.asarray(alpha)
    if alpha.shape != (d,) or np.any(alpha < 0):
        raise ValueError("alpha must be a nonnegative integer vector of length d")
    return math.exp(log_monomial_l2_norm_sq(alpha, d))


def log_monomial_l2_norm_sq(alpha, d: int) -> float:
    alpha = np.asarray(alpha, dtype=float)
    tot = float(alpha.sum())
    return float(gammaln(alpha + 1).sum() + d * LOG_PI - gammaln(tot + d + 1))


def monomial_sup_norm(alpha) -> float:
    """Sup of |z^alpha| over the closed unit ball: (prod a_i^a_i / |a|^|a|)^(1/2)."""
    alpha = np.asarray(alpha, dtype=float)
    if np.any(alpha < 0):
        raise ValueError("alpha must be nonnegative")
    tot = alpha.sum()
    if tot == 0:
        return 1.0
    pos = alpha[alpha > 0]
    return math.exp(0.5 * (float(pos @ np.log(pos)) - tot * math.log(tot)))


@dataclass(frozen=True)
class CoefficientSeries:
    """Sparse Taylor coefficients of a test function, by kind.

    f1: geometric series along each axis (poles at z_i = 2),
    f2: Runge-type 1/(a^2 + z1^2 + z2^2), even-pair support,
    f3: 1/(1 - z1 z2), diagonal support.
    """

    kind: str  # "f1" | "f2" | "f3" | "custom"
    a: float = 2.0
    custom_coeffs: Optional[dict] = None

    def __post_init__(self):
        if self.kind not in ("f1", "f2", "f3", "custom"):
            raise ValueError(f"unknown kind {self.kind!r}")
        if self.kind == "f2" and not self.a > 1:
            raise ValueError("f2 requires a > 1")
        if self.kind == "custom" and self.custom_coeffs is None:
            raise ValueError("custom kind requires coefficients")

    def coeff(self, alpha) -> complex:
        a1, a2 = alpha
        if self.kind == "f1":
            if a1 == 0 and a2 == 0:
                return 2.0
            if a2 == 0:
                return 2.0 ** -a1
            if a1 == 0:
                return 2.0 ** -a2
            return 0.0
        if self.kind == "f2":
            if a1 % 2 or a2 % 2:
                return 0.0
            j, m = a1 // 2, a2 // 2
            k = j + m
            return (-1) ** k * math.comb(k, j) * self.a ** (-2 * k - 2)
        if self.kind == "f3":
            return 1.0 if a1 == a2 else 0.0
        return self.custom_coeffs.get(tuple(alpha), 0.0)

    def log_sq_terms(self, cutoff: int) -> Iterator[Tuple[Tuple[int, int], float]]:
        """Nonzero (alpha, log |coeff|^2) with total degree <= cutoff."""
        if self.kind == "f1":
            yield (0, 0), math.log(4.0)
            for k in range(1, cutoff + 1):
                lg = -2 * k * math.log(2.0)
                yield (k, 0), lg
                yield (0, k), lg
        elif self.kind == "f2":
            log_a = math.log(self.a)
            for k in range(cutoff // 2 + 1):
                base = -(4 * k + 4) * log_a
                for j in range(k + 1):
                    lgc = gammaln(k + 1) - gammaln(j + 1) - gammaln(k - j + 1)
                    yield (2 * j, 2 * (k - j)), 2.0 * lgc + base
        elif self.kind == "f3":
            for k in range(cutoff // 2 + 1):
                yield (k, k), 0.0
        else:
            for alpha, c in self.custom_coeffs.items():
                if sum(alpha) <= cutoff and c != 0:
                    yield tuple(alpha), 2.0 * math.log(abs(c))


def f1() -> CoefficientSeries:
    return CoefficientSeries("f1")


def f2(a: float) -> CoefficientSeries:
    return CoefficientSeries("f2", a=a)


def f3() -> CoefficientSeries:
    return CoefficientSeries("f3")


def default_cutoff(n: int) -> int:
    return 4 * n + 200


def l2_error(f: CoefficientSeries, P: ConvexBody, n: int,
             cutoff: Optional[int] = None) -> float:
    """Exact best-L2 error on the ball from the degree-n index set.

    Orthogonality makes this the square root of the tail sum of
    |coeff|^2 times the monomial norm over excluded indices.  Per-level
    sums are tracked so the neglected tail past the cutoff can be
    bounded by geometric extrapolation.
    """
    if cutoff is None:
        cutoff = default_cutoff(n)
    if P.d != 2:
        raise ValueError("test series are bivariate")
    level_sums: dict = {}
    total = 0.0
    for alpha, log_sq in f.log_sq_terms(cutoff):
        if P.contains_index(alpha, n):
            continue
        term = math.exp(log_sq + log_monomial_l2_norm_sq(np.asarray(alpha), 2))
        lev = alpha[0] + alpha[1]
        level_sums[lev] = level_sums.get(lev, 0.0) + term
        total += term
    if total == 0.0:
        return 0.0
    _check_tail(level_sums, total)
    return math.sqrt(total)


def _check_tail(level_sums: dict, total: float):
    levels = sorted(level_sums)
    if len(levels) < 2:
        raise TruncationError("cutoff leaves fewer than two coefficient levels")
    last, prev = level_sums[levels[-1]], level_sums[levels[-2]]
    if last == 0.0:
        return
    ratio = last / prev if prev > 0 else 1.0
    if ratio >= 1.0:
        raise TruncationError("tail not yet decaying at the cutoff")
    tail = last * ratio / (1.0 - ratio)
    if tail > TAIL_REL_TOL * total:
        raise TruncationError(
            f"estimated neglected tail {tail:.2e} exceeds {TAIL_REL_TOL:.0e} of the sum")


def uniform_tail_bound_f3(m: int) -> float:
    """Sup-norm bound on the f3 remainder after the diagonal block k <= m."""
    if m < 0:
        raise ValueError("m must be >= 0")
    return 2.0 ** -m


def _v_value(P: ConvexBody, p: ModuliPoint) -> float:
    """Extremal value, tolerating stalled refinement near the axes.

    Points with one modulus many orders below the other cannot reach a
    tiny absolute stationarity residual in double precision, yet the
    carried best iterate is accurate in value to far better than the
    rate tolerance, so it is used as a fallback.
    """
    try:
        return v_ball(P, p, tol=1e-12).value
    except ConvergenceError as exc:
        res = exc.result
        if res is None or res.kkt_residual > 1e-4:
            raise
        return res.value


@dataclass(frozen=True)
class RatePrediction:
    """Predicted exponential approximation rate and its singular witness."""

    log_R: float
    witness_point: ModuliPoint
    q: float


def singular_rate(f: CoefficientSeries, P: ConvexBody, tol: float = 1e-10) -> RatePrediction:
    """Minimize the ball extremal value over the singular set of f.

    Torus invariance collapses the singular sets to low-dimensional
    families: a (radius, phase) family for f2 and a hyperbola for f3.
    A coarse grid locates the basin and a local search refines it.
    """
    from scipy.optimize import minimize, minimize_scalar

    if P.d != 2:
        raise ValueError("singular sets are bivariate")

    if f.kind == "f1":
        # poles at z_i = 2 meet the axes; the rate is log 2 for every q
        return RatePrediction(math.log(2.0), ModuliPoint((4.0, 0.0)), P.q)

    if f.kind == "f2":
        a = f.a

        def moduli(r, phi):
            s2 = abs(a * a + (r * r) * complex(math.cos(2 * phi), math.sin(2 * phi)))
            return ModuliPoint((r * r, s2))

        def g(x):
            r, phi = x
            return _v_value(P, moduli(abs(r), phi))

        rs = np.linspace(0.0, 3.0, 80)
        phis = np.linspace(0.0, math.pi, 80)
        best = (math.inf, (a, math.pi / 2))
        for r in rs:
            for phi in phis:
                val = g((r, phi))
                if val < best[0]:
                    best = (val, (r, phi))
        opt = minimize(g, x0=np.asarray(best[1]), method="Nelder-Mead",
                       options={"xatol": 1e-10, "fatol": 1e-13, "maxiter": 2000})
        r, phi = abs(opt.x[0]), opt.x[1]
        return RatePrediction(float(opt.fun), moduli(r, phi), P.q)

    if f.kind == "f3":
        # singular set z1 z2 = 1; moduli family (r^2, 1/r^2)
        def g(t):
            return _v_value(P, ModuliPoint((math.exp(2 * t), math.exp(-2 * t))))

        opt = minimize_scalar(g, bounds=(-1.2, 1.2), method="bounded",
                              options={"xatol": 1e-9})
        t = float(opt.x)
        return RatePrediction(float(opt.fun),
                              ModuliPoint((math.exp(2 * t), math.exp(-2 * t))), P.q)

    raise ValueError("singular_rate supports the built-in series only")


def fit_decay_slope(errors) -> float:
    """Empirical log-rate from (n, error) pairs.

    Least-squares fit of log(error) against n with a log(n) nuisance
    regressor soaking up algebraic prefactors; returns the negated
    linear coefficient, so geometric decay base^-n gives log(base)
    exactly.
    """
    pts = [(float(n), float(e)) for n, e in errors]
    if len(pts) < 5:
        raise ValueError("need at least 5 points to fit a rate")
    if any(e <= 0 for _, e in pts):
        raise ValueError("errors must be positive")
    ns = np.array([n for n, _ in pts])
    ys = np.array([math.log(e) for _, e in pts])
    X = np.column_stack([ns, np.log(ns), np.ones_like(ns)])
    coef, *_ = np.linalg.lstsq(X, ys, rcond=None)
    return float(-coef[0])

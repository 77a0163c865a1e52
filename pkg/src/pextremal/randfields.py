"""Gaussian random polynomial pairs and their normalized potentials.

Coefficients are standard complex Gaussians in the orthonormal monomial
basis of the ball.  The potential (1/2n) log(|P_n|^2 + |Q_n|^2) of a
pair converges almost surely to the ball extremal function; here that
is probed at desk scale on annulus grids.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np
from scipy.special import gammaln

from .body import ConvexBody
from .extremal import v_ball
from .functional import ModuliPoint

LOG_PI = math.log(math.pi)


@dataclass(frozen=True)
class RandomPolyPair:
    n: int
    P: ConvexBody
    coeffs_p: dict  # alpha -> complex
    coeffs_q: dict
    seed: int


def _gaussian_block(seed: int, count: int) -> np.ndarray:
    """Counter-based stream of standard complex Gaussians (variance 1)."""
    rng = np.random.Generator(np.random.Philox(key=seed))
    re = rng.normal(scale=math.sqrt(0.5), size=count)
    im = rng.normal(scale=math.sqrt(0.5), size=count)
    return re + 1j * im


def sample_pair(P: ConvexBody, n: int, seed: int) -> RandomPolyPair:
    """Draw the two coefficient vectors; deterministic per seed."""
    if n < 1:
        raise ValueError("n must be >= 1")
    idx = P.index_set(n)
    d_n = len(idx)
    draws = _gaussian_block(seed, 2 * d_n)
    cp = dict(zip(idx, draws[:d_n]))
    cq = dict(zip(idx, draws[d_n:]))
    return RandomPolyPair(n=n, P=P, coeffs_p=cp, coeffs_q=cq, seed=seed)


def _log_c(A: np.ndarray, d: int) -> np.ndarray:
    tot = A.sum(axis=1)
    return 0.5 * (gammaln(tot + d + 1) - gammaln(A + 1).sum(axis=1) - d * LOG_PI)


def potential(pair: RandomPolyPair, z) -> float:
    """Normalized log modulus of the random mapping at a point of C^2.

    Terms are accumulated at a shared log scale so large |z| and high
    degree do not overflow.
    """
    idx = pair.P.index_set(pair.n)
    A = idx.as_array()
    ap = np.array([pair.coeffs_p[a] for a in idx])
    aq = np.array([pair.coeffs_q[a] for a in idx])
    z = [complex(w) for w in z]
    log_mod, phase, alive = _term_logs(A, z, pair.P.d)
    if not np.any(alive):
        return -math.inf
    m = float(np.max(log_mod[alive]))
    factor = np.zeros(len(A), dtype=complex)
    factor[alive] = np.exp(log_mod[alive] - m + 1j * phase[alive])
    sp = ap @ factor
    sq = aq @ factor
    mag_sq = abs(sp) ** 2 + abs(sq) ** 2
    if mag_sq == 0.0:
        return -math.inf
    return (2.0 * m + math.log(mag_sq)) / (2.0 * pair.n)


def _term_logs(A, z, d):
    log_abs = np.array([math.log(abs(w)) if w != 0 else -math.inf for w in z])
    args = np.array([np.angle(w) for w in z])
    alive = np.ones(len(A), dtype=bool)
    log_mod = _log_c(A, d).astype(float)
    phase = np.zeros(len(A))
    for i in range(d):
        if np.isinf(log_abs[i]):
            alive &= A[:, i] == 0
        else:
            log_mod = log_mod + A[:, i] * log_abs[i]
            phase = phase + A[:, i] * args[i]
    return log_mod, phase, alive


@dataclass(frozen=True)
class AnnulusGrid:
    """Seeded random evaluation points with 1.1 <= |z| <= 2.5."""

    count: int = 200
    rmin: float = 1.1
    rmax: float = 2.5
    seed: int = 12345

    def __post_init__(self):
        if not 1.1 - 1e-12 <= self.rmin < self.rmax <= 2.5 + 1e-12:
            raise ValueError("annulus must lie within 1.1 <= |z| <= 2.5")

    def points(self) -> list:
        rng = np.random.Generator(np.random.Philox(key=self.seed))
        r = rng.uniform(self.rmin, self.rmax, self.count)
        t = rng.uniform(0.0, math.pi / 2, self.count)
        p1 = rng.uniform(0.0, 2 * math.pi, self.count)
        p2 = rng.uniform(0.0, 2 * math.pi, self.count)
        return [(r[i] * math.cos(t[i]) * np.exp(1j * p1[i]),
                 r[i] * math.sin(t[i]) * np.exp(1j * p2[i]))
                for i in range(self.count)]


def _potentials_on_grid(pair: RandomPolyPair, pts) -> np.ndarray:
    """Vectorized potential over many points (shared basis arrays)."""
    idx = pair.P.index_set(pair.n)
    A = idx.as_array()
    ap = np.array([pair.coeffs_p[a] for a in idx])
    aq = np.array([pair.coeffs_q[a] for a in idx])
    out = np.empty(len(pts))
    for k, z in enumerate(pts):
        log_mod, phase, alive = _term_logs(A, [complex(z[0]), complex(z[1])], 2)
        if not np.any(alive):
            out[k] = -math.inf
            continue
        m = float(np.max(log_mod[alive]))
        factor = np.zeros(len(A), dtype=complex)
        factor[alive] = np.exp(log_mod[alive] - m + 1j * phase[alive])
        sp = ap @ factor
        sq = aq @ factor
        mag_sq = abs(sp) ** 2 + abs(sq) ** 2
        out[k] = -math.inf if mag_sq == 0 else (2 * m + math.log(mag_sq)) / (2 * pair.n)
    return out


def l1_deviation(P: ConvexBody, n: int, seeds: Sequence[int],
                 grid: AnnulusGrid) -> float:
    """Mean absolute gap between the potential and the extremal value.

    Averaged over the grid points and the supplied seeds; the sequence
    over growing n tracks the almost-sure convergence at desk scale.
    """
    pts = grid.points()
    targets = np.array([
        v_ball(P, ModuliPoint.from_point(z)).value for z in pts])
    devs = []
    for seed in seeds:
        pair = sample_pair(P, n, seed)
        vals = _potentials_on_grid(pair, pts)
        devs.append(np.mean(np.abs(vals - targets)))
    return float(np.mean(devs))

"""Grid-restricted search for near-Fekete arrays on the ball boundary.

Fekete points maximize the modulus of the generalized Vandermonde
determinant over the monomial basis of the degree-n index set.  The
search here is a seeded coordinate-exchange sweep over a boundary grid:
each point in turn is moved to the grid location that most increases
|det|, which is a rank-one (Cramer) update, so a whole candidate grid
is scored with one linear solve.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import List, Tuple

import numpy as np

from .body import ConvexBody

DESK_CAP = 400


class ResourceCapError(RuntimeError):
    """Basis dimension exceeds the desk-scale cap."""


@dataclass(frozen=True)
class FeketeConfig:
    P: ConvexBody
    n: int
    grid_s: int = 16
    grid_phi: int = 16
    seed: int = 0
    sweeps: int = 30

    def __post_init__(self):
        if self.P.d != 2:
            raise ValueError("Fekete search is implemented for d = 2")
        if self.n < 1:
            raise ValueError("n must be >= 1")
        if self.grid_s < 8 or self.grid_phi < 8:
            raise ValueError("grid sizes must be >= 8")
        if len(self.P.index_set(self.n)) > DESK_CAP:
            raise ResourceCapError(
                f"d_n = {len(self.P.index_set(self.n))} exceeds cap {DESK_CAP}")


@dataclass
class FeketeResult:
    points: List[Tuple[complex, complex]]
    log_abs_vdm: float
    delta_estimate: float
    radial_fractions: np.ndarray  # histogram of |z1| over 10 bins of [0, 1]
    converged: bool
    n: int
    d_n: int
    l_n: int
    seed: int
    log_abs_vdm_trace: List[float] = None


def degree_sum(P: ConvexBody, n: int) -> int:
    """Sum of classical total degrees over the degree-n monomial basis."""
    A = P.index_set(n).as_array()
    return int(A.sum())


def _basis_columns(A: np.ndarray, z1: np.ndarray, z2: np.ndarray) -> np.ndarray:
    """Matrix of monomial values: rows indexed by basis, columns by points."""
    # 0^0 must be 1 at the grid poles s = 0, pi/2
    c1 = np.power(z1[None, :], A[:, 0][:, None])
    c2 = np.power(z2[None, :], A[:, 1][:, None])
    return c1 * c2


def log_abs_vandermonde(P: ConvexBody, n: int, points) -> float:
    """log |det| of the basis-evaluation matrix; -inf marks singularity."""
    A = P.index_set(n).as_array()
    if len(points) != A.shape[0]:
        raise ValueError(f"need exactly {A.shape[0]} points, got {len(points)}")
    z1 = np.array([complex(p[0]) for p in points])
    z2 = np.array([complex(p[1]) for p in points])
    V = _basis_columns(A, z1, z2)
    sign, logdet = np.linalg.slogdet(V)
    if sign == 0 or not np.isfinite(logdet):
        return -math.inf
    return float(logdet)


def _candidate_grid(cfg: FeketeConfig):
    s = np.linspace(0.0, math.pi / 2, cfg.grid_s)
    phi = np.linspace(0.0, 2 * math.pi, cfg.grid_phi, endpoint=False)
    S, P1, P2 = np.meshgrid(s, phi, phi, indexing="ij")
    z1 = (np.cos(S) * np.exp(1j * P1)).ravel()
    z2 = (np.sin(S) * np.exp(1j * P2)).ravel()
    return z1, z2


def search_fekete(cfg: FeketeConfig) -> FeketeResult:
    A = cfg.P.index_set(cfg.n).as_array()
    d_n = A.shape[0]
    l_n = int(A.sum())
    z1g, z2g = _candidate_grid(cfg)
    C = _basis_columns(A, z1g, z2g)  # d_n x ncand
    ncand = C.shape[1]

    rng = np.random.default_rng(cfg.seed)
    # seeded distinct initialization, re-drawn if the start is singular
    logdet = -math.inf
    for _ in range(64):
        sel = rng.choice(ncand, size=d_n, replace=False)
        V = C[:, sel].copy()
        sign, logdet = np.linalg.slogdet(V)
        if sign != 0 and np.isfinite(logdet):
            break
    if not np.isfinite(logdet):
        raise RuntimeError("could not find a nonsingular starting configuration")
    sel = np.array(sel)
    trace = [float(logdet)]

    converged = False
    for _ in range(cfg.sweeps):
        improved = False
        for j in range(d_n):
            try:
                W = np.linalg.solve(V, C)  # gain for column j <- cand c is (V^-1 c)_j
            except np.linalg.LinAlgError:
                break
            gains = np.abs(W[j, :])
            best = int(np.argmax(gains))  # ties resolve to the lowest grid index
            if gains[best] > 1.0 + 1e-12 and best != sel[j]:
                V[:, j] = C[:, best]
                sel[j] = best
                logdet += math.log(gains[best])
                improved = True
        # re-anchor against accumulated rank-one drift
        sign, exact = np.linalg.slogdet(V)
        if sign != 0 and np.isfinite(exact):
            logdet = float(exact)
        trace.append(float(logdet))
        if not improved:
            converged = True
            break

    pts = [(complex(z1g[k]), complex(z2g[k])) for k in sel]
    abs_z1 = np.abs(z1g[sel])
    hist, _ = np.histogram(abs_z1, bins=10, range=(0.0, 1.0))
    return FeketeResult(
        points=pts,
        log_abs_vdm=float(logdet),
        delta_estimate=float(math.exp(logdet / l_n)),
        radial_fractions=hist / d_n,
        converged=converged,
        n=cfg.n, d_n=d_n, l_n=l_n, seed=cfg.seed,
        log_abs_vdm_trace=trace,
    )


def torus_band_fraction(result: FeketeResult, half_width: float = 0.15) -> float:
    """Fraction of points with |z1| within half_width of 1/sqrt(2)."""
    abs_z1 = np.array([abs(p[0]) for p in result.points])
    return float(np.mean(np.abs(abs_z1 - 1.0 / math.sqrt(2.0)) < half_width))

"""The entropy-like limit functional behind every extremal-function value.

For a point with coordinate moduli squared s_i and a nonnegative weight
vector theta supported where s_i > 0,

    F(theta; s) = (1/2) * ( sum theta_i log s_i
                            - sum theta_i log theta_i
                            + S log S ),   S = sum theta_i,

with 0*log(0) read as 0.  F is concave, 1-homogeneous in theta, and its
maximum over {theta >= 0, |theta|_P = 1} is the extremal-function value
at the point.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np


class DomainError(ValueError):
    """theta puts weight on a vanishing coordinate: F = -inf."""


class BoundaryError(ValueError):
    """theta touches the boundary theta_i = 0 where a derivative blows up."""


@dataclass(frozen=True)
class ModuliPoint:
    """A point of C^d known only through its coordinate moduli squared."""

    moduli_sq: tuple

    def __post_init__(self):
        s = tuple(float(v) for v in self.moduli_sq)
        if any(v < 0 for v in s):
            raise ValueError("moduli squared must be nonnegative")
        object.__setattr__(self, "moduli_sq", s)

    @classmethod
    def from_point(cls, z) -> "ModuliPoint":
        return cls(tuple(abs(complex(w)) ** 2 for w in z))

    @property
    def d(self) -> int:
        return len(self.moduli_sq)

    @property
    def support(self) -> tuple:
        return tuple(i for i, v in enumerate(self.moduli_sq) if v > 0)

    @property
    def norm_sq(self) -> float:
        return float(sum(self.moduli_sq))

    def restrict_to_support(self) -> "ModuliPoint":
        return ModuliPoint(tuple(self.moduli_sq[i] for i in self.support))

    def as_array(self) -> np.ndarray:
        return np.asarray(self.moduli_sq, dtype=float)


@dataclass(frozen=True)
class FunctionalEval:
    """Value, gradient and optional Hessian at one (theta, point)."""

    value: float
    gradient: np.ndarray
    euler_residual: float
    hessian: Optional[np.ndarray] = None


def _validate(theta, p: ModuliPoint):
    theta = np.asarray(theta, dtype=float)
    s = p.as_array()
    if theta.shape != s.shape:
        raise ValueError(f"theta has shape {theta.shape}, point has dimension {p.d}")
    if np.any(theta < 0):
        raise ValueError("theta must be nonnegative")
    return theta, s


def f_value(theta, p: ModuliPoint) -> float:
    theta, s = _validate(theta, p)
    on = theta > 0
    if np.any(on & (s == 0)):
        raise DomainError("positive weight on a vanishing coordinate (value -inf)")
    th = theta[on]
    if th.size == 0:
        return 0.0
    S = th.sum()
    return 0.5 * float(th @ np.log(s[on]) - th @ np.log(th) + S * math.log(S))


def f_gradient(theta, p: ModuliPoint) -> np.ndarray:
    theta, s = _validate(theta, p)
    if np.any(theta == 0):
        raise BoundaryError("gradient component is +inf at theta_i = 0")
    if np.any(s == 0):
        raise DomainError("gradient undefined on a vanishing coordinate")
    S = theta.sum()
    return 0.5 * (np.log(s) - np.log(theta) + math.log(S))


def f_hessian(theta, p: ModuliPoint) -> np.ndarray:
    theta, s = _validate(theta, p)
    if np.any(theta == 0):
        raise BoundaryError("Hessian undefined at theta_i = 0")
    S = theta.sum()
    d = theta.size
    return 0.5 * (np.ones((d, d)) / S - np.diag(1.0 / theta))


def evaluate(theta, p: ModuliPoint, with_hessian: bool = False) -> FunctionalEval:
    val = f_value(theta, p)
    grad = f_gradient(theta, p)
    theta = np.asarray(theta, dtype=float)
    resid = abs(float(theta @ grad) - val)
    hess = f_hessian(theta, p) if with_hessian else None
    return FunctionalEval(value=val, gradient=grad, euler_residual=resid, hessian=hess)

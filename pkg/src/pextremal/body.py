"""lq-ball quadrants and the lattice index sets they carve out.

A body here is the part of the unit lq ball lying in the nonnegative
orthant of R^d.  It defines a generalized notion of polynomial degree:
a monomial z^alpha has degree <= n exactly when alpha lies in n times
the body.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

# Values within this distance of an integer are treated as that integer
# when rounding norms up to lattice degrees.
INTEGER_SNAP = 1e-12

# Relative slack when testing lattice membership sum(a_i^q) <= n^q in floats.
MEMBERSHIP_SLACK = 1e-9


def _as_q(q) -> float:
    if q == "inf" or q == "oo":
        return math.inf
    return float(q)


@dataclass(frozen=True)
class ConvexBody:
    """Quadrant of the unit lq ball in R^d, 1 <= q <= inf."""

    q: float
    d: int

    def __post_init__(self):
        object.__setattr__(self, "q", _as_q(self.q))
        if not self.q >= 1:
            raise ValueError(f"q must be >= 1, got {self.q}")
        if int(self.d) != self.d or self.d < 1:
            raise ValueError(f"d must be a positive integer, got {self.d}")
        object.__setattr__(self, "d", int(self.d))

    @property
    def dual_exponent(self) -> float:
        """Holder conjugate q' with 1/q + 1/q' = 1."""
        if self.q == 1:
            return math.inf
        if math.isinf(self.q):
            return 1.0
        return self.q / (self.q - 1.0)

    @property
    def q_label(self) -> str:
        """Serialization label: '1', '2', '1.5', 'inf'."""
        if math.isinf(self.q):
            return "inf"
        if self.q == int(self.q):
            return str(int(self.q))
        return repr(self.q)

    def _check_vector(self, x):
        x = np.asarray(x, dtype=float)
        if x.shape != (self.d,):
            raise ValueError(f"expected a vector of length {self.d}, got shape {x.shape}")
        return x

    def minkowski_norm(self, x) -> float:
        """Gauge of the body: the lq norm of a nonnegative vector."""
        x = self._check_vector(x)
        if np.any(x < 0):
            raise ValueError("minkowski_norm requires nonnegative components")
        if math.isinf(self.q):
            return float(np.max(x))
        if self.q == 1:
            return float(np.sum(x))
        return float(np.sum(x ** self.q) ** (1.0 / self.q))

    def minkowski_norm_many(self, X) -> np.ndarray:
        """Row-wise gauge of an (m, d) array of nonnegative vectors."""
        X = np.asarray(X, dtype=float)
        if math.isinf(self.q):
            return np.max(X, axis=-1)
        if self.q == 1:
            return np.sum(X, axis=-1)
        return np.sum(X ** self.q, axis=-1) ** (1.0 / self.q)

    def deg_p(self, alpha) -> int:
        """Smallest integer n with alpha in n times the body."""
        alpha = np.asarray(alpha)
        if alpha.shape != (self.d,) or np.any(alpha < 0) or np.any(alpha != np.round(alpha)):
            raise ValueError("alpha must be a nonnegative integer vector of length d")
        nrm = self.minkowski_norm(alpha.astype(float))
        return max(0, math.ceil(nrm - INTEGER_SNAP))

    def contains_index(self, alpha, n: int) -> bool:
        """Lattice membership alpha in nP, with a float-safe slack."""
        alpha = np.asarray(alpha, dtype=float)
        if math.isinf(self.q):
            return bool(np.max(alpha, initial=0.0) <= n)
        if self.q == 1:
            return bool(np.sum(alpha) <= n)
        return bool(np.sum(alpha ** self.q) <= n ** self.q * (1.0 + MEMBERSHIP_SLACK))

    def index_set(self, n: int) -> "IndexSet":
        """All lattice points of nP, graded by degree then lex."""
        if int(n) != n or n < 0:
            raise ValueError(f"n must be a nonnegative integer, got {n}")
        return _index_set_cached(self.q, self.d, int(n))

    def indicator(self, x) -> float:
        """Support function of the body: dual lq' norm of the positive part."""
        x = self._check_vector(x)
        xp = np.maximum(x, 0.0)
        qp = self.dual_exponent
        if math.isinf(qp):
            return float(np.max(xp))
        if qp == 1:
            return float(np.sum(xp))
        return float(np.sum(xp ** qp) ** (1.0 / qp))

    def volume(self) -> float:
        """Lebesgue measure of the quadrant body, Gamma(1+1/q)^d / Gamma(1+d/q)."""
        if math.isinf(self.q):
            return 1.0
        return math.gamma(1.0 + 1.0 / self.q) ** self.d / math.gamma(1.0 + self.d / self.q)

    def simplex_cover_constant(self) -> int:
        """Minimal integer A with the body inside A times the unit simplex."""
        if math.isinf(self.q):
            return self.d
        # max of sum(y_i) over the body is d^(1 - 1/q)
        return max(1, math.ceil(self.d ** (1.0 - 1.0 / self.q) - INTEGER_SNAP))


@dataclass(frozen=True)
class IndexSet:
    """Ordered lattice points of nP; order is graded by degree then lex."""

    n: int
    indices: tuple  # tuple of d-tuples of ints

    def __len__(self):
        return len(self.indices)

    def __iter__(self):
        return iter(self.indices)

    def __contains__(self, alpha):
        return tuple(alpha) in set(self.indices)

    def as_array(self) -> np.ndarray:
        return np.asarray(self.indices, dtype=np.int64)


@lru_cache(maxsize=256)
def _index_set_cached(q: float, d: int, n: int) -> IndexSet:
    body = ConvexBody(q, d)
    out = []

    def extend(prefix, budget_pow):
        # budget_pow = n^q - sum(prefix_i^q) for finite q (unused for q=inf)
        k = len(prefix)
        if k == d - 1:
            last_max = _component_max(q, n, budget_pow)
            for a in range(last_max + 1):
                out.append(prefix + (a,))
            return
        comp_max = _component_max(q, n, budget_pow)
        for a in range(comp_max + 1):
            if math.isinf(q):
                extend(prefix + (a,), budget_pow)
            else:
                extend(prefix + (a,), budget_pow - float(a) ** q)

    if math.isinf(q):
        extend((), None)
    else:
        extend((), float(n) ** q)

    out.sort(key=lambda a: (body.deg_p(a), a))
    return IndexSet(n=n, indices=tuple(out))


def _component_max(q: float, n: int, budget_pow) -> int:
    if math.isinf(q):
        return n
    if budget_pow <= 0:
        return 0
    slack = (1.0 + MEMBERSHIP_SLACK)
    m = int(math.floor((budget_pow * slack) ** (1.0 / q) + INTEGER_SNAP))
    return min(m, n)

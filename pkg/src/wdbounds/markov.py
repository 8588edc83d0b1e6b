"""Finite Markov chains: validated vectors/matrices and transient solutions.

Continuous-time chains are given by a generator matrix ``Q`` (nonnegative
off-diagonal rates, zero row sums); discrete-time chains by a row-stochastic
matrix ``P``.  Transient distributions of a CTMC are computed by
uniformization, which reduces matrix exponentials to a Poisson-weighted sum
of powers of a stochastic matrix and allows an explicit truncation-error
budget (total-variation error at most ``1e-12`` here).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import DimensionMismatch, IndexOutOfRange, NegativeTime

__all__ = [
    "ProbVec",
    "Generator",
    "TransitionMatrix",
    "dirac",
    "uniformize",
    "transient_ctmc",
    "transient_dtmc",
]

#: Largest negative entry that is treated as a rounding artefact and clamped.
CLAMP_TOL = 1e-12
#: Allowed deviation of a probability mass (or generator row sum) from its target.
SUM_TOL = 1e-9
#: Total-variation budget for transient CTMC solutions.
TRANSIENT_TOL = 1e-12


def _clean_distribution(p: np.ndarray, what: str) -> np.ndarray:
    """Clamp tiny negatives, check the mass, and normalize exactly to 1."""
    if (p < -CLAMP_TOL).any():
        i = int(np.argmin(p))
        raise ValueError(f"{what} has negative entry {p[i]!r} at position {i + 1}")
    p = np.where(p < 0, 0.0, p)
    total = float(p.sum())
    if abs(total - 1.0) > SUM_TOL:
        raise ValueError(f"{what} sums to {total!r}, expected 1")
    return p / total


@dataclass(frozen=True)
class ProbVec:
    """A probability distribution over states ``1..n``."""

    p: np.ndarray
    n: int = field(init=False)

    def __post_init__(self) -> None:
        p = np.ascontiguousarray(self.p, dtype=float)
        if p.ndim != 1 or p.size == 0:
            raise ValueError("probability vector must be a nonempty 1-d array")
        p = _clean_distribution(p, "probability vector")
        p.setflags(write=False)
        object.__setattr__(self, "p", p)
        object.__setattr__(self, "n", p.size)


@dataclass(frozen=True)
class Generator:
    """A CTMC generator: nonnegative off-diagonal rates, zero row sums.

    The diagonal is recomputed as minus the off-diagonal row sum, so row
    sums are exactly zero; the input diagonal must agree within ``1e-9``.
    """

    q: np.ndarray
    n: int = field(init=False)

    def __post_init__(self) -> None:
        q = np.ascontiguousarray(self.q, dtype=float)
        if q.ndim != 2 or q.shape[0] != q.shape[1] or q.shape[0] == 0:
            raise ValueError(f"generator must be square and nonempty, got shape {q.shape}")
        n = q.shape[0]
        off = q.copy()
        np.fill_diagonal(off, 0.0)
        if (off < -CLAMP_TOL).any():
            r, s = np.argwhere(off < -CLAMP_TOL)[0]
            raise ValueError(
                f"off-diagonal rate Q({r + 1},{s + 1})={q[r, s]!r} is negative"
            )
        off = np.where(off < 0, 0.0, off)
        rowsum = off.sum(axis=1)
        if (np.abs(np.diagonal(q) + rowsum) > SUM_TOL * np.maximum(1.0, rowsum)).any():
            r = int(np.argmax(np.abs(np.diagonal(q) + rowsum)))
            raise ValueError(
                f"row {r + 1} of the generator sums to {q[r].sum()!r}, expected 0"
            )
        q = off
        q[np.diag_indices(n)] = -rowsum
        q.setflags(write=False)
        object.__setattr__(self, "q", q)
        object.__setattr__(self, "n", n)

    def row(self, r: int) -> np.ndarray:
        """Row of 1-based state ``r``."""
        return self.q[r - 1]


@dataclass(frozen=True)
class TransitionMatrix:
    """A row-stochastic matrix: each row is a probability distribution."""

    p: np.ndarray
    n: int = field(init=False)

    def __post_init__(self) -> None:
        p = np.ascontiguousarray(self.p, dtype=float)
        if p.ndim != 2 or p.shape[0] != p.shape[1] or p.shape[0] == 0:
            raise ValueError(f"transition matrix must be square and nonempty, got shape {p.shape}")
        rows = [
            _clean_distribution(p[r], f"transition-matrix row {r + 1}")
            for r in range(p.shape[0])
        ]
        p = np.vstack(rows)
        p.setflags(write=False)
        object.__setattr__(self, "p", p)
        object.__setattr__(self, "n", p.shape[0])

    def row(self, r: int) -> np.ndarray:
        """Row of 1-based state ``r``."""
        return self.p[r - 1]


def dirac(n: int, r: int) -> ProbVec:
    """Point mass on 1-based state ``r`` of an ``n``-state space."""
    if not (1 <= r <= n):
        raise IndexOutOfRange(r, n)
    p = np.zeros(n)
    p[r - 1] = 1.0
    return ProbVec(p)


def uniformize(gen: Generator) -> tuple[TransitionMatrix, float]:
    """Uniformization ``P = I + Q/lam`` with ``lam`` the largest exit rate.

    For the zero generator ``lam = 1`` (any positive rate works; the choice
    is fixed for determinism) and ``P`` is the identity.
    """
    lam = float(np.max(-np.diagonal(gen.q)))
    if lam <= 0.0:
        lam = 1.0
    p = np.eye(gen.n) + gen.q / lam
    return TransitionMatrix(p), lam


def _poisson_step_count(lt: float) -> int:
    """Truncation point for the Poisson(lt) series with tail below 1e-13."""
    return int(math.ceil(lt + 40.0 * math.sqrt(lt + 1.0) + 50.0))


def _transient_chunk(p: np.ndarray, pmat: np.ndarray, lt: float) -> np.ndarray:
    """One uniformization step: ``p @ expm(lt (P - I))`` with lt small enough
    that ``exp(-lt)`` is comfortably inside double range."""
    w = math.exp(-lt)
    acc = w * p
    cum = w
    v = p
    cap = _poisson_step_count(lt)
    for k in range(1, cap + 1):
        v = v @ pmat
        w *= lt / k
        acc = acc + w * v
        cum += w
        if 1.0 - cum < 1e-13:
            break
    return acc


def transient_ctmc(p0: ProbVec, gen: Generator, t: float) -> ProbVec:
    """Distribution at time ``t`` of the CTMC started from ``p0``.

    Uniformization with the Poisson series truncated once its tail is below
    ``1e-13``; horizons with ``lam * t`` beyond 500 are split into chunks so
    the leading Poisson weight stays representable.  The result is clamped
    and renormalized, keeping the total-variation error within ``1e-12``.
    """
    if t < 0:
        raise NegativeTime(t)
    if p0.n != gen.n:
        raise DimensionMismatch(
            f"initial distribution has {p0.n} states but generator has {gen.n}"
        )
    if t == 0:
        return p0
    pmat, lam = uniformize(gen)
    remaining = lam * t
    v = p0.p
    while remaining > 0:
        lt = min(remaining, 500.0)
        v = _transient_chunk(v, pmat.p, lt)
        remaining -= lt
    v = np.where(v < 0, 0.0, v)
    return ProbVec(v / v.sum())


def transient_dtmc(p0: ProbVec, pmat: TransitionMatrix, k: int) -> ProbVec:
    """Distribution after ``k`` steps of the DTMC started from ``p0``."""
    if not isinstance(k, (int, np.integer)) or isinstance(k, bool):
        raise ValueError(f"step count must be an integer, got {k!r}")
    if k < 0:
        raise NegativeTime(float(k))
    if p0.n != pmat.n:
        raise DimensionMismatch(
            f"initial distribution has {p0.n} states but transition matrix has {pmat.n}"
        )
    v = p0.p
    for _ in range(int(k)):
        v = v @ pmat.p
    return ProbVec(v)

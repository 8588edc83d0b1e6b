"""Exact 1-Wasserstein distances on finite metric spaces.

Two independent routes compute the same number:

* ``method="transport"`` (default) - a transportation simplex specialized to
  the coupling polytope (:func:`wdbounds._kernels.transport_loop`);
* ``method="lp"`` - the same problem assembled as a generic linear program
  and handed to :func:`wdbounds.lp.solve`.

Both return the optimal coupling and a Kantorovich potential.  The coupling
is canonicalized so that no state both sends and receives off-diagonal mass
(which some optimal vertices violate).  The potential is recovered from the
row duals by a double c-transform, which makes it 1-Lipschitz with the same
objective value as the primal cost, and it is shifted so its minimum is
``0`` (hence ``0 <= f <= d_max``).

Signed variants measure rows of generator-like matrices: a vector ``v``
with ``sum(v) = 0`` has ``W(v) = W1(v+, v-)``, the cost of moving its
positive part onto its negative part.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np

from . import _kernels
from .errors import (
    DimensionMismatch,
    NotOptimalInput,
    NumericalFailure,
    RowSumNotZero,
)
from .lp import LinearProgram, LpStatus, solve
from .markov import ProbVec
from .metric import Metric

__all__ = [
    "Coupling",
    "Potential",
    "SignedRow",
    "OptimalPairReport",
    "WassersteinResult",
    "wasserstein",
    "wasserstein_signed",
    "row_wasserstein_vector",
    "wasserstein_matrix_norm",
    "canonicalize_coupling",
    "verify_optimal_pair",
    "tv_distance",
]

#: Marginals of a coupling must match the prescribed distributions this well.
MARGINAL_TOL = 1e-8
#: Primal cost and dual potential value must agree this well.
GAP_TOL = 1e-7
#: Coupling entries below this threshold are treated as zero in support logic.
SUPPORT_TOL = 1e-10


@dataclass(frozen=True)
class Coupling:
    """A transport plan between two distributions on the same state space."""

    gamma: np.ndarray
    p: np.ndarray
    q: np.ndarray

    def __post_init__(self) -> None:
        g = np.ascontiguousarray(self.gamma, dtype=float)
        p = np.ascontiguousarray(self.p, dtype=float)
        q = np.ascontiguousarray(self.q, dtype=float)
        if g.ndim != 2 or g.shape != (p.size, q.size):
            raise DimensionMismatch(
                f"coupling shape {g.shape} does not match marginals {p.size}, {q.size}"
            )
        if (g < -1e-12).any():
            r, s = np.argwhere(g < -1e-12)[0]
            raise ValueError(f"coupling entry ({r + 1},{s + 1}) is negative: {g[r, s]!r}")
        g = np.where(g < 0, 0.0, g)
        if np.abs(g.sum(axis=1) - p).max() > MARGINAL_TOL:
            r = int(np.argmax(np.abs(g.sum(axis=1) - p)))
            raise ValueError(f"row marginal {r + 1} deviates beyond {MARGINAL_TOL}")
        if np.abs(g.sum(axis=0) - q).max() > MARGINAL_TOL:
            s = int(np.argmax(np.abs(g.sum(axis=0) - q)))
            raise ValueError(f"column marginal {s + 1} deviates beyond {MARGINAL_TOL}")
        for arr in (g, p, q):
            arr.setflags(write=False)
        object.__setattr__(self, "gamma", g)
        object.__setattr__(self, "p", p)
        object.__setattr__(self, "q", q)

    def cost(self, metric: Metric) -> float:
        """Transport cost of this plan under ``metric``."""
        return float(np.sum(self.gamma * metric.dist))


@dataclass(frozen=True)
class Potential:
    """A Kantorovich potential: 1-Lipschitz, minimum 0 (so values in [0, d_max])."""

    f: np.ndarray
    metric: Metric = field(repr=False)

    def __post_init__(self) -> None:
        f = np.ascontiguousarray(self.f, dtype=float)
        if f.size != self.metric.n:
            raise DimensionMismatch(
                f"potential has {f.size} entries for a {self.metric.n}-state metric"
            )
        if abs(float(f.min())) > 1e-9:
            raise ValueError(f"potential minimum is {f.min()!r}, expected 0")
        lip = f[:, None] - f[None, :] - self.metric.dist
        if lip.max() > 1e-8:
            r, s = np.argwhere(lip == lip.max())[0]
            raise ValueError(
                f"potential is not 1-Lipschitz: f({r + 1})-f({s + 1}) exceeds d by {lip.max():.3g}"
            )
        f.setflags(write=False)
        object.__setattr__(self, "f", f)


@dataclass(frozen=True)
class SignedRow:
    """A signed vector with zero total mass (a generator-like matrix row)."""

    v: np.ndarray
    index: int | None = None

    def __post_init__(self) -> None:
        v = np.ascontiguousarray(self.v, dtype=float)
        total = float(v.sum())
        if abs(total) > 1e-9:
            raise RowSumNotZero(self.index, total)
        v.setflags(write=False)
        object.__setattr__(self, "v", v)


class WassersteinResult(NamedTuple):
    value: float
    coupling: Coupling
    potential: Potential


def _ot(p: np.ndarray, q: np.ndarray, metric: Metric, method: str):
    """Optimal transport between nonnegative vectors of equal total mass.

    Returns ``(value, gamma, f)`` with ``f`` the double-c-transformed row
    potential, shifted to minimum 0.
    """
    d = metric.dist
    n = metric.n
    if method == "transport":
        status, gamma, u, v, _ = _kernels.transport_loop(
            d, np.ascontiguousarray(p), np.ascontiguousarray(q), 1e-11, 200 * (2 * n) + 2000
        )
        if status != _kernels.STATUS_OPTIMAL:
            method = "lp"  # degenerate pivoting stalled; the generic route is Bland-guarded
        else:
            f = _potential_from_row_duals(u, metric)
            value = float(np.sum(gamma * d))
            return value, gamma, f
    if method != "lp":
        raise ValueError(f"unknown method {method!r}; expected 'transport' or 'lp'")

    # generic route: minimize <d, gamma> over the coupling polytope
    a_eq = np.zeros((2 * n, n * n))
    for r in range(n):
        a_eq[r, r * n : (r + 1) * n] = 1.0
        a_eq[n + r, r::n] = 1.0
    b_eq = np.concatenate([p, q])
    sol = solve(LinearProgram(c=-d.ravel(), a_eq=a_eq, b_eq=b_eq))
    if sol.status != LpStatus.OPTIMAL:
        raise NumericalFailure(f"transport LP ended with status {sol.status.value}")
    gamma = sol.x.reshape(n, n)
    u = -sol.duals[:n]
    f = _potential_from_row_duals(u, metric)
    value = float(np.sum(gamma * d))
    return value, gamma, f


def _potential_from_row_duals(u: np.ndarray, metric: Metric) -> np.ndarray:
    """Double c-transform of row duals; 1-Lipschitz with minimum exactly 0."""
    d = metric.dist
    vbar = np.min(d - u[:, None], axis=0)
    f = np.min(d - vbar[None, :], axis=1)
    return f - f.min()


def wasserstein(
    p: ProbVec, q: ProbVec, metric: Metric, method: str = "transport"
) -> WassersteinResult:
    """Exact W1 between two distributions, with optimal coupling and potential.

    The value is the primal transport cost; the returned potential achieves
    the same value in the dual (checked to ``1e-7``, else
    :class:`NumericalFailure`).
    """
    if p.n != q.n or p.n != metric.n:
        raise DimensionMismatch(
            f"distributions on {p.n} and {q.n} states with a {metric.n}-state metric"
        )
    value, gamma, f = _ot(p.p, q.p, metric, method)
    gap = abs(float((p.p - q.p) @ f) - value)
    if gap > GAP_TOL:
        raise NumericalFailure(f"primal/dual gap {gap:.3g} exceeds {GAP_TOL}")
    coupling = canonicalize_coupling(Coupling(gamma, p.p, q.p), metric)
    return WassersteinResult(value, coupling, Potential(f, metric))


def wasserstein_signed(row: SignedRow | np.ndarray, metric: Metric) -> float:
    """W of a zero-sum signed vector: the cost of moving its positive part
    onto its negative part."""
    if not isinstance(row, SignedRow):
        row = SignedRow(np.asarray(row, dtype=float))
    v = row.v
    if v.size != metric.n:
        raise DimensionMismatch(f"row has {v.size} entries for a {metric.n}-state metric")
    pos = np.where(v > 0, v, 0.0)
    neg = np.where(v < 0, -v, 0.0)
    mass = float(pos.sum())
    neg_mass = float(neg.sum())
    if mass <= 1e-15 or neg_mass <= 1e-15:
        # one side is numerically empty; the row is zero up to rounding
        return 0.0
    # rebalance the tiny rounding mismatch so the kernel sees equal masses
    neg *= mass / neg_mass
    value, _, _ = _ot(pos, neg, metric, "transport")
    return value


def row_wasserstein_vector(mat: np.ndarray, metric: Metric) -> np.ndarray:
    """Per-row signed Wasserstein of a matrix whose rows each sum to zero.

    Raises :class:`RowSumNotZero` naming the (1-based) offending row.
    """
    mat = np.asarray(mat, dtype=float)
    if mat.ndim != 2 or mat.shape[1] != metric.n:
        raise DimensionMismatch(
            f"matrix shape {mat.shape} does not match a {metric.n}-state metric"
        )
    out = np.empty(mat.shape[0])
    for i in range(mat.shape[0]):
        out[i] = wasserstein_signed(SignedRow(mat[i], index=i + 1), metric)
    return out


def wasserstein_matrix_norm(mat: np.ndarray, metric: Metric) -> float:
    """Max of the per-row signed Wasserstein, or ``+inf`` when some row has
    nonzero total mass (such a matrix has no finite defect)."""
    mat = np.asarray(mat, dtype=float)
    if mat.ndim != 2 or mat.shape[1] != metric.n:
        raise DimensionMismatch(
            f"matrix shape {mat.shape} does not match a {metric.n}-state metric"
        )
    if mat.shape[0] == 0:
        return 0.0
    if np.abs(mat.sum(axis=1)).max() > 1e-9:
        return math.inf
    return float(max(wasserstein_signed(row, metric) for row in mat))


def tv_distance(p: ProbVec, q: ProbVec) -> float:
    """Total-variation distance ``0.5 * sum |p - q|``."""
    if p.n != q.n:
        raise DimensionMismatch(f"distributions on {p.n} and {q.n} states")
    return 0.5 * float(np.abs(p.p - q.p).sum())


def canonicalize_coupling(coupling: Coupling, metric: Metric) -> Coupling:
    """Rewrite an *optimal* coupling so no state both sends and receives.

    Repeatedly, for the lowest state ``r`` with off-diagonal outflow and
    inflow, mass is rerouted from the length-two chain ``s -> r -> u`` to the
    direct edge ``s -> u`` plus the diagonal ``(r, r)``.  By the triangle
    inequality this never increases the cost, and on an optimal input the
    cost is unchanged; a cost change beyond ``1e-9`` therefore raises
    :class:`NotOptimalInput`.
    """
    if coupling.gamma.shape[0] != metric.n:
        raise DimensionMismatch(
            f"coupling on {coupling.gamma.shape[0]} states with a {metric.n}-state metric"
        )
    g = coupling.gamma.copy()
    n = metric.n
    before = float(np.sum(g * metric.dist))
    off = ~np.eye(n, dtype=bool)
    max_steps = n * n * n + 1000
    for _ in range(max_steps):
        outflow = np.where(off, g, 0.0).sum(axis=1)
        inflow = np.where(off, g, 0.0).sum(axis=0)
        both = (outflow > SUPPORT_TOL) & (inflow > SUPPORT_TOL)
        if not both.any():
            break
        r = int(np.argmax(both))
        row = np.where(off[r], g[r], 0.0)
        col = np.where(off[:, r], g[:, r], 0.0)
        u = int(np.argmax(row > SUPPORT_TOL))
        s = int(np.argmax(col > SUPPORT_TOL))
        eps = min(g[r, u], g[s, r])
        g[r, u] -= eps
        g[s, r] -= eps
        g[s, u] += eps
        g[r, r] += eps
    else:
        raise NumericalFailure("coupling canonicalization did not terminate")
    after = float(np.sum(g * metric.dist))
    if abs(after - before) > 1e-9 * max(1.0, abs(before)):
        raise NotOptimalInput(
            f"cost moved from {before!r} to {after!r}; the input coupling was not optimal"
        )
    return Coupling(g, coupling.p, coupling.q)


@dataclass(frozen=True)
class OptimalPairReport:
    """Check results for the four structural properties of an optimal pair.

    * ``coupling_ok`` - marginals match within ``1e-8``;
    * ``one_sided_ok`` - no state both sends and receives off-diagonal mass;
    * ``potential_ok`` - ``0 <= f <= d_max`` and 1-Lipschitz;
    * ``slackness_ok`` - mass only flows where the potential drops by the
      full distance (``gamma > 1e-10`` implies ``f(r)-f(s) = d(r,s)`` within
      ``1e-7``);
    * ``duality_ok`` - primal cost equals the potential's objective within
      ``1e-7``.
    """

    coupling_ok: bool
    one_sided_ok: bool
    potential_ok: bool
    slackness_ok: bool
    duality_ok: bool
    primal_cost: float
    dual_value: float

    @property
    def all_ok(self) -> bool:
        return (
            self.coupling_ok
            and self.one_sided_ok
            and self.potential_ok
            and self.slackness_ok
            and self.duality_ok
        )


def verify_optimal_pair(
    coupling: Coupling, potential: Potential, metric: Metric
) -> OptimalPairReport:
    """Independently re-check a (coupling, potential) pair for optimality."""
    g = coupling.gamma
    f = potential.f
    n = metric.n
    d = metric.dist
    coupling_ok = (
        np.abs(g.sum(axis=1) - coupling.p).max() <= MARGINAL_TOL
        and np.abs(g.sum(axis=0) - coupling.q).max() <= MARGINAL_TOL
    )
    off = ~np.eye(n, dtype=bool)
    outflow = np.where(off, g, 0.0).sum(axis=1)
    inflow = np.where(off, g, 0.0).sum(axis=0)
    one_sided_ok = bool((np.minimum(outflow, inflow) <= SUPPORT_TOL).all())
    lip = f[:, None] - f[None, :] - d
    potential_ok = (
        f.min() >= -1e-9 and f.max() <= metric.d_max + 1e-8 and lip.max() <= 1e-8
    )
    support = g > SUPPORT_TOL
    slackness_ok = bool((np.abs(lip[support]) <= GAP_TOL).all()) if support.any() else True
    primal = float(np.sum(g * d))
    dual = float((coupling.p - coupling.q) @ f)
    duality_ok = abs(primal - dual) <= GAP_TOL
    return OptimalPairReport(
        coupling_ok=bool(coupling_ok),
        one_sided_ok=one_sided_ok,
        potential_ok=bool(potential_ok),
        slackness_ok=slackness_ok,
        duality_ok=duality_ok,
        primal_cost=primal,
        dual_value=dual,
    )

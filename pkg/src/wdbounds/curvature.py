"""Coarse Ricci curvature of finite Markov chains.

For a CTMC with generator ``Q`` and metric ``d``, the curvature of a pair
``(r, s)`` is ``kappa(r,s) = -V(r,s) / d(r,s)`` where

    V(r,s) = max (Q_r - Q_s) . f   over 0 <= f <= d_max, f 1-Lipschitz,
                                         f(r) - f(s) = d(r,s),

the one-sided derivative at ``t=0`` of ``t -> W1(delta_r e^{tQ}, delta_s e^{tQ})``
divided by ``-d(r,s)``.  For a DTMC, ``kappa(r,s) = 1 - W1(P_r, P_s)/d(r,s)``.

Two LP encodings are available for ``V``:

* ``method="direct"`` - the definition above with one Lipschitz row per
  ordered pair (``n^2`` rows over ``n`` variables);
* ``method="dual"`` (default) - the LP dual of the definition, with one row
  per *state* and one variable per ordered pair, which is far cheaper for
  all-pairs sweeps on larger spaces.

``k_lower`` is the closed-form lower bound ``k(r,s) <= kappa(r,s)`` obtained
from the feasible potentials ``min(d(x,r), d(x,s))``-shaped candidates; it
needs only two dot products per pair and powers the prefiltered exact
minimum :func:`kappa_min`: solve the pair minimizing ``k`` exactly to get a
candidate ``tau``, then solve exactly every pair with ``k < tau + margin``.
Since ``kappa >= k`` pairwise, pairs above the threshold cannot beat the
candidate, so the returned minimum is exact.
"""

from __future__ import annotations

import time
from dataclasses import dataclass

import numpy as np

from .errors import DimensionMismatch, NumericalFailure, SamePair, SingleState
from .lp import LinearProgram, LpStatus, solve
from .markov import Generator, ProbVec, TransitionMatrix
from .metric import Metric
from .transport import wasserstein

__all__ = [
    "kappa_ctmc",
    "kappa_dtmc",
    "k_lower",
    "k_matrix",
    "k_min",
    "K_global",
    "K_local",
    "kappa_min",
    "kappa_all_pairs",
    "wasserstein_derivative",
    "KappaMinStrategy",
    "PairCurvature",
    "CurvatureReport",
    "curvature_report",
]

#: Two-sided slack used when pinning the stage-1 optimum in the two-stage
#: derivative LP (the argmax set is taken up to this tolerance).  The stage-1
#: value is vertex-exact, so the slack only needs to absorb float rounding;
#: any looseness here biases the stage-2 maximum proportionally.
DERIVATIVE_PIN_SLACK = 1e-9
#: All-pairs sweeps above this state count must be forced explicitly.
ALL_PAIRS_GATE = 200


def _check_pair(n: int, r: int, s: int) -> None:
    for idx in (r, s):
        if not (1 <= idx <= n):
            raise DimensionMismatch(f"state index {idx} out of range 1..{n}")
    if r == s:
        raise SamePair(r)


def _lipschitz_value(
    obj: np.ndarray,
    metric: Metric,
    pin: np.ndarray,
    lo: float,
    hi: float,
    method: str,
) -> float:
    """``max obj . f`` over ``{0 <= f <= d_max, 1-Lipschitz, lo <= pin.f <= hi}``.

    The feasible set always contains ``f = min(d(., x) ...)``-type potentials,
    and is compact, so the value is finite.  ``method="dual"`` solves the LP
    dual (rows indexed by states), ``method="direct"`` the definition.
    """
    d = metric.dist
    n = metric.n
    dmax = metric.d_max
    if method == "direct":
        pairs = [(a, b) for a in range(n) for b in range(n) if a != b]
        a_ub = np.zeros((len(pairs) + 2, n))
        b_ub = np.empty(len(pairs) + 2)
        for row, (a, b) in enumerate(pairs):
            a_ub[row, a] = 1.0
            a_ub[row, b] = -1.0
            b_ub[row] = d[a, b]
        a_ub[len(pairs)] = pin
        b_ub[len(pairs)] = hi
        a_ub[len(pairs) + 1] = -pin
        b_ub[len(pairs) + 1] = -lo
        sol = solve(LinearProgram(c=obj, a_ub=a_ub, b_ub=b_ub, upper=np.full(n, dmax)))
        if sol.status != LpStatus.OPTIMAL:
            raise NumericalFailure(f"Lipschitz LP ended with status {sol.status.value}")
        return float(sol.value)

    if method != "dual":
        raise ValueError(f"unknown method {method!r}; expected 'dual' or 'direct'")

    # Dual variables: gamma_ab >= 0 per ordered pair (a != b), mu+ >= 0 for
    # the row pin.f <= hi, mu- >= 0 for -pin.f <= -lo, beta_a >= 0 for the
    # upper box f <= d_max.  One >=-constraint per state a:
    #   sum_b gamma_ab - sum_b gamma_ba + pin_a (mu+ - mu-) + beta_a >= obj_a
    # minimizing  sum d_ab gamma_ab + hi mu+ - lo mu- + d_max sum beta.
    pairs = [(a, b) for a in range(n) for b in range(n) if a != b]
    npair = len(pairs)
    ncols = npair + 2 + n
    rows = np.zeros((n, ncols))
    cost = np.empty(ncols)
    for col, (a, b) in enumerate(pairs):
        rows[a, col] += 1.0
        rows[b, col] -= 1.0
        cost[col] = d[a, b]
    rows[:, npair] = pin
    rows[:, npair + 1] = -pin
    cost[npair] = hi
    cost[npair + 1] = -lo
    for a in range(n):
        rows[a, npair + 2 + a] = 1.0
        cost[npair + 2 + a] = dmax
    # pose the minimization as:  maximize -cost . z  s.t.  -rows z <= -obj
    sol = solve(LinearProgram(c=-cost, a_ub=-rows, b_ub=-obj))
    if sol.status != LpStatus.OPTIMAL:
        raise NumericalFailure(f"Lipschitz dual LP ended with status {sol.status.value}")
    return -float(sol.value)


def kappa_ctmc(gen: Generator, metric: Metric, r: int, s: int, method: str = "dual") -> float:
    """Exact coarse Ricci curvature of the pair ``(r, s)`` of a CTMC."""
    if gen.n != metric.n:
        raise DimensionMismatch(f"generator on {gen.n} states, metric on {metric.n}")
    _check_pair(gen.n, r, s)
    drs = metric.d(r, s)
    obj = gen.row(r) - gen.row(s)
    pin = np.zeros(gen.n)
    pin[r - 1] = 1.0
    pin[s - 1] = -1.0
    v = _lipschitz_value(obj, metric, pin, drs, drs, method)
    return -v / drs


def kappa_dtmc(pmat: TransitionMatrix, metric: Metric, r: int, s: int) -> float:
    """Coarse Ricci curvature ``1 - W1(P_r, P_s)/d(r,s)`` of a DTMC pair."""
    if pmat.n != metric.n:
        raise DimensionMismatch(f"transition matrix on {pmat.n} states, metric on {metric.n}")
    _check_pair(pmat.n, r, s)
    w, _, _ = wasserstein(ProbVec(pmat.row(r)), ProbVec(pmat.row(s)), metric)
    return 1.0 - w / metric.d(r, s)


def k_lower(gen: Generator, metric: Metric, r: int, s: int) -> float:
    """Closed-form lower bound ``k(r,s) <= kappa_ctmc(r,s)``; two dot products."""
    if gen.n != metric.n:
        raise DimensionMismatch(f"generator on {gen.n} states, metric on {metric.n}")
    _check_pair(gen.n, r, s)
    d = metric.dist
    qr = gen.row(r)
    qs = gen.row(s)
    num = min(float(qr @ d[:, r - 1]), float(qr @ d[:, s - 1])) + min(
        float(qs @ d[:, s - 1]), float(qs @ d[:, r - 1])
    )
    return -num / metric.d(r, s)


def k_matrix(gen: Generator, metric: Metric) -> np.ndarray:
    """All pairwise ``k(r,s)`` values at once (``nan`` on the diagonal)."""
    if gen.n != metric.n:
        raise DimensionMismatch(f"generator on {gen.n} states, metric on {metric.n}")
    g = gen.q @ metric.dist  # g[a, b] = Q_a . d(., b)
    own = np.minimum(np.diagonal(g)[:, None], g)  # own[r, s] = min(g_rr, g_rs)
    kmat = np.full((gen.n, gen.n), np.nan)
    off = ~np.eye(gen.n, dtype=bool)
    kmat[off] = -(own + own.T)[off] / metric.dist[off]
    return kmat


def k_min(gen: Generator, metric: Metric) -> float:
    """Minimum of ``k(r,s)`` over all pairs of distinct states."""
    if gen.n < 2:
        raise SingleState()
    kmat = k_matrix(gen, metric)
    return float(np.nanmin(kmat))


def K_global(gen: Generator, metric: Metric) -> float:
    """Curvature defect constant ``K = max(0, max_{r != s} -d(r,s) k(r,s))``."""
    if gen.n < 2:
        raise SingleState()
    kmat = k_matrix(gen, metric)
    prod = -metric.dist * kmat
    return max(0.0, float(np.nanmax(prod)))


def K_local(gen: Generator, metric: Metric, r: int) -> float:
    """Per-state defect constant ``K_loc(r) = max(0, max_{s != r} -d(r,s) k(r,s))``."""
    if gen.n < 2:
        raise SingleState()
    if not (1 <= r <= gen.n):
        raise DimensionMismatch(f"state index {r} out of range 1..{gen.n}")
    kmat = k_matrix(gen, metric)
    prod = -metric.dist[r - 1] * kmat[r - 1]
    return max(0.0, float(np.nanmax(prod)))


@dataclass(frozen=True)
class KappaMinStrategy:
    """How :func:`kappa_min` reached its answer."""

    tau: float  # exact kappa on the pair with the smallest k
    margin: float
    threshold: float  # pairs with k below this were solved exactly
    pairs_solved: tuple[tuple[int, int], ...]
    pairs_total: int
    seconds: float


def kappa_min(
    gen: Generator,
    metric: Metric,
    margin: float | None = None,
    method: str = "dual",
) -> tuple[float, KappaMinStrategy]:
    """Exact minimum curvature over all pairs, via the k-prefilter.

    Pairs with ``k(r,s) >= tau + margin`` cannot have curvature below the
    candidate ``tau`` (kappa dominates k), so only the remaining pairs are
    solved exactly.  ``margin`` defaults to ``0.01 * (1 + |tau|)``; any
    nonnegative value yields the same exact result, larger values just solve
    more pairs.
    """
    if gen.n < 2:
        raise SingleState()
    if margin is not None and margin < 0:
        raise ValueError(f"margin must be nonnegative, got {margin!r}")
    start = time.perf_counter()
    kmat = k_matrix(gen, metric)
    n = gen.n
    iu = np.triu_indices(n, k=1)
    kvals = np.minimum(kmat[iu], kmat.T[iu])  # k is symmetric; belt and braces
    order = int(np.argmin(kvals))
    r0, s0 = int(iu[0][order]) + 1, int(iu[1][order]) + 1
    tau = kappa_ctmc(gen, metric, r0, s0, method=method)
    if margin is None:
        margin = 0.01 * (1.0 + abs(tau))
    threshold = tau + margin
    best = tau
    solved = [(r0, s0)]
    for idx in range(kvals.size):
        r, s = int(iu[0][idx]) + 1, int(iu[1][idx]) + 1
        if (r, s) == (r0, s0) or kvals[idx] >= threshold:
            continue
        val = kappa_ctmc(gen, metric, r, s, method=method)
        solved.append((r, s))
        if val < best:
            best = val
    strategy = KappaMinStrategy(
        tau=tau,
        margin=float(margin),
        threshold=float(threshold),
        pairs_solved=tuple(solved),
        pairs_total=kvals.size,
        seconds=time.perf_counter() - start,
    )
    return best, strategy


def kappa_all_pairs(
    gen: Generator, metric: Metric, method: str = "dual", force: bool = False
) -> np.ndarray:
    """Exact curvature for every pair (``nan`` diagonal).

    Quadratically many LPs; spaces beyond 200 states require ``force=True``.
    """
    n = gen.n
    if n < 2:
        raise SingleState()
    if n > ALL_PAIRS_GATE and not force:
        raise ValueError(
            f"all-pairs curvature on {n} states solves {n * (n - 1) // 2} LPs; "
            "pass force=True to insist, or use kappa_min for the minimum"
        )
    out = np.full((n, n), np.nan)
    for r in range(1, n + 1):
        for s in range(r + 1, n + 1):
            val = kappa_ctmc(gen, metric, r, s, method=method)
            out[r - 1, s - 1] = out[s - 1, r - 1] = val
    return out


def wasserstein_derivative(
    p: ProbVec, q: ProbVec, gen: Generator, metric: Metric, method: str = "dual"
) -> float:
    """Right derivative at ``t=0`` of ``t -> W1(p e^{tQ}, q e^{tQ})``.

    Danskin's rule: the derivative is ``max (p - q) . (Q f)`` over the set of
    *optimal* Kantorovich potentials for ``W1(p, q)``.  Stage 1 computes the
    distance, stage 2 maximizes over feasible potentials whose objective is
    pinned to the stage-1 optimum (within ``DERIVATIVE_PIN_SLACK``).
    """
    if p.n != q.n or p.n != gen.n or gen.n != metric.n:
        raise DimensionMismatch("p, q, generator and metric must share the state space")
    w, _, _ = wasserstein(p, q, metric)
    diff = p.p - q.p
    obj = diff @ gen.q
    return _lipschitz_value(
        obj, metric, diff, w - DERIVATIVE_PIN_SLACK, w + DERIVATIVE_PIN_SLACK, method
    )


@dataclass(frozen=True)
class PairCurvature:
    r: int
    s: int
    k: float
    kappa: float | None


@dataclass(frozen=True)
class CurvatureReport:
    """Pairwise curvature data plus the summary constants."""

    pairs: tuple[PairCurvature, ...]
    k_min: float
    K_global: float
    kappa_min: float | None
    strategy: KappaMinStrategy | None


def curvature_report(
    gen: Generator,
    metric: Metric,
    pairs: str | tuple[int, int] = "min",
    margin: float | None = None,
    k_only: bool = False,
    method: str = "dual",
) -> CurvatureReport:
    """Assemble pairwise and summary curvature data (used by the CLI).

    ``pairs`` is ``"all"`` (exact kappa everywhere), ``"min"`` (exact kappa
    only where the prefilter needs it) or a single 1-based pair.
    """
    if gen.n < 2:
        raise SingleState()
    kmat = k_matrix(gen, metric)
    kappa_vals: dict[tuple[int, int], float] = {}
    kap_min: float | None = None
    strategy: KappaMinStrategy | None = None
    if isinstance(pairs, tuple):
        _check_pair(gen.n, pairs[0], pairs[1])
        selected = [tuple(sorted(pairs))]
        if not k_only:
            kappa_vals[selected[0]] = kappa_ctmc(gen, metric, *selected[0], method=method)
    elif pairs == "all":
        selected = [(r, s) for r in range(1, gen.n + 1) for s in range(r + 1, gen.n + 1)]
        if not k_only:
            full = kappa_all_pairs(gen, metric, method=method)
            for r, s in selected:
                kappa_vals[(r, s)] = float(full[r - 1, s - 1])
            kap_min = float(np.nanmin(full))
    elif pairs == "min":
        selected = [(r, s) for r in range(1, gen.n + 1) for s in range(r + 1, gen.n + 1)]
        if not k_only:
            kap_min, strategy = kappa_min(gen, metric, margin=margin, method=method)
            for r, s in strategy.pairs_solved:
                kappa_vals[tuple(sorted((r, s)))] = kappa_ctmc(gen, metric, r, s, method=method)
    else:
        raise ValueError(f"pairs must be 'all', 'min' or an (r, s) tuple, got {pairs!r}")
    rows = tuple(
        PairCurvature(r=r, s=s, k=float(kmat[r - 1, s - 1]), kappa=kappa_vals.get((r, s)))
        for r, s in selected
    )
    return CurvatureReport(
        pairs=rows,
        k_min=float(np.nanmin(kmat)),
        K_global=K_global(gen, metric),
        kappa_min=kap_min,
        strategy=strategy,
    )

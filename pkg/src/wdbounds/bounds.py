"""Certified error bounds for aggregated Markov chains.

Let ``p_t`` be the true transient distribution and ``p~_t = pi_t^T A`` the
aggregation's approximation.  With the per-aggregate defect vector
``v = |Theta A - A Q|_W`` (row-wise signed Wasserstein), its norm
``B = max(v)``, the curvature constants ``k_min <= kappa_min`` and the
defect constant ``K``, the error ``W(t) = W1(p~_t, p_t)`` satisfies

    dW/dt <= pi_t . v + K           and       dW/dt <= pi_t . v - rate * W

(``rate`` is ``k_min`` or ``kappa_min``).  Integrating yields the bound
family implemented here:

* ``bound_linear_K``            - ``W0 + t (B + K)``;
* ``bound_linear_K_timevarying``- ``W0 + integral(pi_s . v) + t K`` with the
  integral evaluated adaptively;
* ``bound_exponential``         - ``(W0 - B/rate) e^{-rate t} + B/rate``
  (``W0 + B t`` when the rate is zero);
* ``bound_local_K``             - ``W0 + integral(pi_s . v + p~_s . K_loc)``,
  the per-state refinement of the linear bound;
* ``bound_hybrid``              - exact integration of the pointwise best
  derivative ``min(B + K, B - rate W)``: exponential early, linear once the
  exponential's slope would exceed ``B + K``.

All bounds are valid for every ``t`` in the requested grid; "clipped"
variants additionally cap values at the metric diameter, which is always a
valid upper bound for a Wasserstein distance between distributions.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .aggregation import Aggregation, aggregate_initial
from .curvature import K_global, K_local, k_min, kappa_min
from .errors import NegativeTime, RateUnavailable
from .markov import Generator, ProbVec, TransitionMatrix, transient_ctmc
from .metric import Metric
from .transport import row_wasserstein_vector, wasserstein

__all__ = [
    "BoundInputs",
    "BoundCurve",
    "defect",
    "prepare_bound_inputs",
    "bound_linear_K",
    "bound_linear_K_timevarying",
    "bound_exponential",
    "bound_local_K",
    "bound_hybrid",
    "exact_error_curve",
    "dtmc_bound_sequence",
    "time_grid",
    "compute_bound_curve",
]

#: Default number of grid points for bound curves.
GRID_POINTS = 200
#: Adaptive quadrature stops when another halving changes an interval this little.
QUAD_TOL = 1e-8


def time_grid(horizon: float, points: int = GRID_POINTS) -> np.ndarray:
    """Uniform grid ``0..horizon`` with ``points`` entries."""
    if horizon < 0:
        raise NegativeTime(horizon)
    if points < 2:
        raise ValueError(f"need at least two grid points, got {points}")
    return np.linspace(0.0, horizon, points)


def _check_grid(t_grid: np.ndarray) -> np.ndarray:
    t = np.atleast_1d(np.asarray(t_grid, dtype=float))
    if t.size == 0:
        raise ValueError("time grid is empty")
    if t[0] < 0:
        raise NegativeTime(float(t[0]))
    if (np.diff(t) < 0).any():
        raise ValueError("time grid must be nondecreasing")
    return t


def defect(gen: Generator, metric: Metric, agg: Aggregation) -> tuple[np.ndarray, float]:
    """Per-aggregate defect ``v = |Theta A - A Q|_W`` and its max ``B``.

    Rows of ``Theta A - A Q`` sum to zero by construction, so each row has a
    finite signed Wasserstein value.
    """
    if agg.theta is None:
        raise ValueError("aggregation carries no CTMC generator")
    mat = agg.theta.q @ agg.a - agg.a @ gen.q
    v = row_wasserstein_vector(mat, metric)
    return v, float(v.max())


def defect_dtmc(
    pmat: TransitionMatrix, metric: Metric, agg: Aggregation
) -> tuple[np.ndarray, float]:
    """Discrete-time defect ``v = |Pi A - A P|_W`` and its max."""
    if agg.pi_mat is None:
        raise ValueError("aggregation carries no DTMC transition matrix")
    mat = agg.pi_mat.p @ agg.a - agg.a @ pmat.p
    v = row_wasserstein_vector(mat, metric)
    return v, float(v.max())


@dataclass(frozen=True)
class BoundInputs:
    """Everything the bound formulas need, computed once."""

    w0: float
    defect_vector: np.ndarray
    defect_norm: float
    k_min: float
    K: float
    d_max: float
    kappa_min: float | None = None
    K_local: np.ndarray | None = None

    def rate(self, which: str) -> float:
        """Contraction rate by name (``"k_min"`` or ``"kappa_min"``)."""
        if which == "k_min":
            return self.k_min
        if which == "kappa_min":
            if self.kappa_min is None:
                raise RateUnavailable(
                    "kappa_min was not computed; prepare inputs with with_kappa=True"
                )
            return self.kappa_min
        raise ValueError(f"unknown rate {which!r}; expected 'k_min' or 'kappa_min'")


def prepare_bound_inputs(
    gen: Generator,
    metric: Metric,
    agg: Aggregation,
    p0: ProbVec,
    with_kappa: bool = False,
    with_local: bool = False,
    margin: float | None = None,
) -> BoundInputs:
    """Assemble :class:`BoundInputs` for a partition-based CTMC aggregation."""
    v, b = defect(gen, metric, agg)
    pi0 = aggregate_initial(p0, agg)
    ptilde0 = ProbVec(pi0.p @ agg.a)
    w0, _, _ = wasserstein(ptilde0, p0, metric)
    kap = kappa_min(gen, metric, margin=margin)[0] if with_kappa else None
    kloc = (
        np.array([K_local(gen, metric, r) for r in range(1, gen.n + 1)])
        if with_local
        else None
    )
    return BoundInputs(
        w0=w0,
        defect_vector=v,
        defect_norm=b,
        k_min=k_min(gen, metric),
        K=K_global(gen, metric),
        d_max=metric.d_max,
        kappa_min=kap,
        K_local=kloc,
    )


def bound_linear_K(inputs: BoundInputs, t_grid: np.ndarray) -> np.ndarray:
    """Linear bound ``W0 + t (B + K)``."""
    t = _check_grid(t_grid)
    return inputs.w0 + t * (inputs.defect_norm + inputs.K)


def bound_exponential(
    inputs: BoundInputs, t_grid: np.ndarray, rate: str = "k_min"
) -> np.ndarray:
    """Exponential bound from ``dW/dt <= B - rate * W``."""
    t = _check_grid(t_grid)
    kap = inputs.rate(rate)
    b = inputs.defect_norm
    if kap == 0.0:
        return inputs.w0 + b * t
    c = b / kap
    return (inputs.w0 - c) * np.exp(-kap * t) + c


def _adaptive_interval(g, a: float, b: float, fa: float, fb: float, h0: float) -> float:
    """Trapezoid value of ``integral_a^b g`` refined by halving to ``QUAD_TOL``."""
    if b <= a:
        return 0.0
    pieces = max(1, int(math.ceil((b - a) / h0))) if h0 > 0 else 1
    xs = np.linspace(a, b, pieces + 1)
    ys = [fa] + [g(float(x)) for x in xs[1:-1]] + [fb]
    val = float(np.trapezoid(ys, xs))
    for _ in range(24):
        mid = 0.5 * (xs[:-1] + xs[1:])
        ym = [g(float(x)) for x in mid]
        xs2 = np.empty(xs.size + mid.size)
        xs2[0::2] = xs
        xs2[1::2] = mid
        ys2 = np.empty_like(xs2)
        ys2[0::2] = ys
        ys2[1::2] = ym
        val2 = float(np.trapezoid(ys2, xs2))
        xs, ys = xs2, list(ys2)
        if abs(val2 - val) < QUAD_TOL * max(1.0, abs(val2)):
            return val2
        val = val2
    return val


def bound_linear_K_timevarying(
    inputs: BoundInputs,
    pi_path,
    t_grid: np.ndarray,
    rate: float | None = None,
) -> np.ndarray:
    """Time-varying linear bound ``W0 + integral_0^t pi_s . v ds + t K``.

    ``pi_path(s)`` must return the aggregated distribution at time ``s`` as an
    array.  The integral is a cumulative adaptive trapezoid rule per grid
    interval (initial step also capped at ``0.01/rate`` when the aggregated
    chain's uniformization rate is supplied).
    """
    t = _check_grid(t_grid)
    v = inputs.defect_vector

    def g(s: float) -> float:
        return float(np.asarray(pi_path(s)) @ v)

    h0 = math.inf if rate is None or rate <= 0 else 0.01 / rate
    out = np.empty(t.size)
    acc = 0.0
    prev_t = 0.0
    prev_g = g(0.0)
    for i, ti in enumerate(t):
        ti = float(ti)
        if ti > prev_t:
            gi = g(ti)
            acc += _adaptive_interval(g, prev_t, ti, prev_g, gi, min(h0, ti - prev_t))
            prev_t, prev_g = ti, gi
        out[i] = inputs.w0 + acc + ti * inputs.K
    return out


def bound_local_K(
    inputs: BoundInputs,
    agg: Aggregation,
    pi_path,
    t_grid: np.ndarray,
    rate: float | None = None,
) -> np.ndarray:
    """Locally-weighted linear bound ``W0 + integral (pi_s . v + p~_s . K_loc)``."""
    if inputs.K_local is None:
        raise ValueError("K_local was not computed; prepare inputs with with_local=True")
    t = _check_grid(t_grid)
    v = inputs.defect_vector
    kloc = inputs.K_local
    a = agg.a

    def g(s: float) -> float:
        pi = np.asarray(pi_path(s))
        return float(pi @ v + (pi @ a) @ kloc)

    h0 = math.inf if rate is None or rate <= 0 else 0.01 / rate
    out = np.empty(t.size)
    acc = 0.0
    prev_t = 0.0
    prev_g = g(0.0)
    for i, ti in enumerate(t):
        ti = float(ti)
        if ti > prev_t:
            gi = g(ti)
            acc += _adaptive_interval(g, prev_t, ti, prev_g, gi, min(h0, ti - prev_t))
            prev_t, prev_g = ti, gi
        out[i] = inputs.w0 + acc
    return out


def bound_hybrid(
    inputs: BoundInputs, t_grid: np.ndarray, rate: str = "k_min"
) -> np.ndarray:
    """Exact integral of the pointwise best derivative ``min(B + K, B - rate W)``.

    For a negative rate the exponential branch is steeper once ``W`` exceeds
    ``K / (-rate)``, so the curve follows the exponential until that level and
    a line of slope ``B + K`` afterwards; for a nonnegative rate the
    exponential branch is never worse.  Dominated by both pure bounds.
    """
    t = _check_grid(t_grid)
    kap = inputs.rate(rate)
    b = inputs.defect_norm
    big_k = inputs.K
    w0 = inputs.w0
    if kap >= 0:
        return bound_exponential(inputs, t, rate)
    w_switch = big_k / (-kap)
    if w0 >= w_switch:
        return w0 + (b + big_k) * t
    amp = w0 - b / kap
    if amp <= 0:  # B = 0 and W0 = 0: the error stays at zero
        return np.zeros_like(t)
    t_star = math.log((w_switch - b / kap) / amp) / (-kap)
    exp_part = amp * np.exp(-kap * np.minimum(t, t_star)) + b / kap
    lin_part = np.where(t > t_star, (t - t_star) * (b + big_k), 0.0)
    return exp_part + lin_part


def exact_error_curve(
    p0: ProbVec,
    gen: Generator,
    metric: Metric,
    agg: Aggregation,
    t_grid: np.ndarray,
    pi0: ProbVec | None = None,
) -> np.ndarray:
    """The true aggregation error ``W1(p~_t, p_t)`` on a grid (reference curve)."""
    if agg.theta is None:
        raise ValueError("aggregation carries no CTMC generator")
    t = _check_grid(t_grid)
    if pi0 is None:
        pi0 = aggregate_initial(p0, agg)
    out = np.empty(t.size)
    for i, ti in enumerate(t):
        pi_t = transient_ctmc(pi0, agg.theta, float(ti))
        ptilde = ProbVec(pi_t.p @ agg.a)
        p_t = transient_ctmc(p0, gen, float(ti))
        out[i] = wasserstein(ptilde, p_t, metric)[0]
    return out


def dtmc_bound_sequence(
    w0: float, defect_vector: np.ndarray, kappa_min_p: float, pi_seq: np.ndarray
) -> np.ndarray:
    """Discrete-time error recurrence ``W_{k+1} = pi_k . v + (1 - kappa) W_k``.

    ``pi_seq`` holds the aggregated distributions ``pi_0 .. pi_{K-1}`` as
    rows; the result has ``K + 1`` entries ``W_0 .. W_K``.
    """
    pi_seq = np.atleast_2d(np.asarray(pi_seq, dtype=float))
    if pi_seq.shape[1] != defect_vector.size:
        raise ValueError(
            f"pi rows have {pi_seq.shape[1]} entries, defect vector {defect_vector.size}"
        )
    out = np.empty(pi_seq.shape[0] + 1)
    out[0] = w0
    factor = 1.0 - kappa_min_p
    for k in range(pi_seq.shape[0]):
        out[k + 1] = float(pi_seq[k] @ defect_vector) + factor * out[k]
    return out


@dataclass
class BoundCurve:
    """A family of bound curves on a common grid (plus the exact error, if computed)."""

    t: np.ndarray
    columns: dict[str, np.ndarray]
    d_max: float
    exact: np.ndarray | None = None

    def clipped(self) -> dict[str, np.ndarray]:
        """The same columns capped at the metric diameter (always a valid bound)."""
        return {name: np.minimum(vals, self.d_max) for name, vals in self.columns.items()}


def compute_bound_curve(
    gen: Generator,
    metric: Metric,
    agg: Aggregation,
    p0: ProbVec,
    t_grid: np.ndarray,
    variants: tuple[str, ...] = ("linear", "exp-k", "hybrid"),
    with_exact: bool = False,
    margin: float | None = None,
) -> BoundCurve:
    """Evaluate the requested bound variants on a grid.

    Variant names: ``linear``, ``timevarying``, ``exp-k``, ``exp-kappa``,
    ``local``, ``hybrid``, ``hybrid-kappa``.
    """
    if agg.theta is None:
        raise ValueError("aggregation carries no CTMC generator")
    t = _check_grid(t_grid)
    known = {"linear", "timevarying", "exp-k", "exp-kappa", "local", "hybrid", "hybrid-kappa"}
    bad = set(variants) - known
    if bad:
        raise ValueError(f"unknown bound variants: {sorted(bad)}")
    need_kappa = bool({"exp-kappa", "hybrid-kappa"} & set(variants))
    need_local = "local" in variants
    inputs = prepare_bound_inputs(
        gen, metric, agg, p0, with_kappa=need_kappa, with_local=need_local, margin=margin
    )
    pi0 = aggregate_initial(p0, agg)
    theta_rate = float(max(1.0, np.max(-np.diagonal(agg.theta.q))))

    cache: dict[float, np.ndarray] = {}

    def pi_path(s: float) -> np.ndarray:
        if s not in cache:
            cache[s] = transient_ctmc(pi0, agg.theta, s).p
        return cache[s]

    columns: dict[str, np.ndarray] = {}
    for name in variants:
        if name == "linear":
            columns[name] = bound_linear_K(inputs, t)
        elif name == "timevarying":
            columns[name] = bound_linear_K_timevarying(inputs, pi_path, t, rate=theta_rate)
        elif name == "exp-k":
            columns[name] = bound_exponential(inputs, t, rate="k_min")
        elif name == "exp-kappa":
            columns[name] = bound_exponential(inputs, t, rate="kappa_min")
        elif name == "local":
            columns[name] = bound_local_K(inputs, agg, pi_path, t, rate=theta_rate)
        elif name == "hybrid":
            columns[name] = bound_hybrid(inputs, t, rate="k_min")
        elif name == "hybrid-kappa":
            columns[name] = bound_hybrid(inputs, t, rate="kappa_min")
    exact = exact_error_curve(p0, gen, metric, agg, t) if with_exact else None
    return BoundCurve(t=t, columns=columns, d_max=metric.d_max, exact=exact)

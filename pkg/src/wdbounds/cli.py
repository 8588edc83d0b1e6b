"""Batch command-line front-end.

Subcommands
-----------
* ``w1``        - Wasserstein distance between two distributions, optionally
  with the optimal coupling and potential (CSV);
* ``curvature`` - pairwise coarse Ricci curvature and the summary constants
  (CSV);
* ``bounds``    - certified error-bound curves for an aggregation, optionally
  with the exact error (CSV);
* ``aggregate`` - build an aggregation and report its defect (JSON).

Models are single JSON documents (``--model file.json``) or built-ins
(``--builtin toy``, ``--builtin grid`` with ``--grid-*`` flags).  A model
holds ``n``, a ``generator`` (dense rows, or ``{"triplets": [[r, s, rate],
...]}``; the diagonal may be omitted) or a ``dtmc`` matrix, a ``metric`` spec
(``discrete`` / ``line`` / ``graph`` / ``explicit`` / ``product``), and
optionally ``partition``, ``alpha``, ``initial`` and an explicit
``aggregation``.  Serialization is canonical: sorted keys, floats at 17
significant digits, so load -> serialize -> load round-trips byte-identically.

Output goes to stdout (data) and stderr (diagnostics).  CSV files carry
``#``-prefixed metadata lines, then a header row; every value is printed with
17 significant digits.  Exit codes: 0 success, 2 validation error, 3
numerical failure.

Distribution specs: ``dirac:<i>``, ``uniform``, ``uniform-block:<b>``,
``file:<path>`` (a JSON array).
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import dataclass

import numpy as np

from . import bounds as bounds_mod
from .aggregation import (
    Aggregation,
    Partition,
    aggregate_initial,
    epsilon_partition,
    partition_aggregation_ctmc,
    partition_aggregation_dtmc,
)
from .curvature import curvature_report, kappa_dtmc
from .errors import NumericalFailure, WdboundsError
from .markov import Generator, ProbVec, TransitionMatrix, dirac
from .metric import (
    Metric,
    discrete_metric,
    line_metric,
    product_metric,
    shortest_path_metric,
    validate_metric,
)
from .models import Box, JumpDistribution, toy_ctmc, translation_invariant_ctmc
from .transport import SUPPORT_TOL, canonicalize_coupling, wasserstein

__all__ = ["main", "Model", "load_model", "load_model_dict", "canonical_model_json"]


# --------------------------------------------------------------------------
# canonical JSON
# --------------------------------------------------------------------------


def _fmt(x: float) -> str:
    """A float at 17 significant digits (round-trips exactly through JSON)."""
    x = float(x)
    if x == 0.0:
        x = 0.0  # normalize -0.0
    return format(x, ".17g")


def canonical_json(obj) -> str:
    """Deterministic JSON: sorted keys, floats at 17 significant digits."""
    if obj is None:
        return "null"
    if isinstance(obj, bool):
        return "true" if obj else "false"
    if isinstance(obj, (int, np.integer)):
        return str(int(obj))
    if isinstance(obj, (float, np.floating)):
        if not np.isfinite(obj):
            raise ValueError(f"non-finite number {obj!r} cannot be serialized")
        return _fmt(obj)
    if isinstance(obj, str):
        return json.dumps(obj)
    if isinstance(obj, (list, tuple)):
        return "[" + ", ".join(canonical_json(v) for v in obj) + "]"
    if isinstance(obj, dict):
        items = sorted(obj.items())
        return "{" + ", ".join(f"{json.dumps(k)}: {canonical_json(v)}" for k, v in items) + "}"
    raise TypeError(f"cannot serialize {type(obj).__name__}")


# --------------------------------------------------------------------------
# model files
# --------------------------------------------------------------------------


@dataclass
class Model:
    """A loaded model plus its canonical document (for round-tripping)."""

    n: int
    gen: Generator | None
    pmat: TransitionMatrix | None
    metric: Metric | None
    partition: Partition | None
    alpha: list[np.ndarray] | None
    initial: ProbVec | None
    agg: Aggregation | None
    agg_pi0: ProbVec | None
    canon: dict
    source: str = "<dict>"


def _float_matrix(val, rows: int, cols: int, what: str) -> np.ndarray:
    mat = np.asarray(val, dtype=float)
    if mat.shape != (rows, cols):
        raise ValueError(f"{what} must be {rows}x{cols}, got shape {mat.shape}")
    if not np.isfinite(mat).all():
        raise ValueError(f"{what} contains non-finite entries")
    return mat


def _matrix_doc(mat: np.ndarray) -> list[list[float]]:
    return [[float(v) for v in row] for row in mat]


def _parse_metric_spec(spec, n: int) -> tuple[Metric, dict]:
    if not isinstance(spec, dict) or "kind" not in spec:
        raise ValueError("metric spec must be an object with a 'kind' field")
    kind = spec["kind"]
    known_fields = {
        "discrete": {"kind"},
        "line": {"kind", "positions"},
        "graph": {"kind", "edges"},
        "explicit": {"kind", "dist"},
        "product": {"kind", "components"},
    }
    if kind not in known_fields:
        raise ValueError(f"unknown metric kind {kind!r}")
    unknown = set(spec) - known_fields[kind]
    if unknown:
        raise ValueError(f"unknown fields in {kind!r} metric spec: {sorted(unknown)}")
    if kind == "discrete":
        return discrete_metric(n), {"kind": "discrete"}
    if kind == "line":
        positions = [float(v) for v in spec["positions"]]
        if len(positions) != n:
            raise ValueError(f"line metric needs {n} positions, got {len(positions)}")
        return line_metric(np.array(positions)), {"kind": "line", "positions": positions}
    if kind == "graph":
        edges = []
        for e in spec["edges"]:
            if len(e) != 3:
                raise ValueError(f"graph edge must be [r, s, weight], got {e!r}")
            r, s, w = int(e[0]), int(e[1]), float(e[2])
            edges.append((min(r, s), max(r, s), w))
        metric = shortest_path_metric(n, edges)
        # canonical: endpoints ordered, parallel edges collapsed to the
        # minimum weight, sorted
        dedup: dict[tuple[int, int], float] = {}
        for r, s, w in edges:
            key = (r, s)
            dedup[key] = min(w, dedup.get(key, np.inf))
        canon_edges = [[r, s, w] for (r, s), w in sorted(dedup.items())]
        return metric, {"kind": "graph", "edges": canon_edges}
    if kind == "explicit":
        dist = _float_matrix(spec["dist"], n, n, "metric")
        return validate_metric(dist), {"kind": "explicit", "dist": _matrix_doc(dist)}
    # product
    comps = []
    canon_comps = []
    for comp in spec["components"]:
        if not isinstance(comp, dict) or "weight" not in comp or "n" not in comp:
            raise ValueError("product component must carry 'n', 'weight' and a metric spec")
        weight = float(comp["weight"])
        sub_n = int(comp["n"])
        sub_spec = {k: v for k, v in comp.items() if k not in ("weight", "n")}
        sub_metric, sub_canon = _parse_metric_spec(sub_spec, sub_n)
        comps.append((sub_metric, weight))
        canon_comps.append({**sub_canon, "n": sub_n, "weight": weight})
    metric = product_metric(comps)
    if metric.n != n:
        raise ValueError(f"product metric has {metric.n} states but the model has {n}")
    return metric, {"kind": "product", "components": canon_comps}


def _parse_generator(val, n: int) -> Generator:
    if isinstance(val, dict):
        unknown = set(val) - {"triplets"}
        if unknown:
            raise ValueError(f"unknown generator fields: {sorted(unknown)}")
        q = np.zeros((n, n))
        seen = set()
        for t in val["triplets"]:
            if len(t) != 3:
                raise ValueError(f"generator triplet must be [r, s, rate], got {t!r}")
            r, s, rate = int(t[0]), int(t[1]), float(t[2])
            if not (1 <= r <= n and 1 <= s <= n):
                raise ValueError(f"triplet index ({r},{s}) out of range 1..{n}")
            if (r, s) in seen:
                raise ValueError(f"duplicate generator triplet for ({r},{s})")
            seen.add((r, s))
            q[r - 1, s - 1] = rate
    else:
        q = _float_matrix(val, n, n, "generator")
    diag = np.diagonal(q)
    off_sums = q.sum(axis=1) - diag
    if np.allclose(diag, 0.0) and (off_sums > 0).any():
        q = q.copy()
        np.fill_diagonal(q, -off_sums)
    return Generator(q)


def load_model_dict(doc: dict, source: str = "<dict>") -> Model:
    """Validate a model document and return the loaded :class:`Model`."""
    if not isinstance(doc, dict):
        raise ValueError("model file must be a JSON object")
    known = {"n", "generator", "dtmc", "metric", "partition", "alpha", "initial", "aggregation"}
    unknown = set(doc) - known
    if unknown:
        raise ValueError(f"unknown model fields: {sorted(unknown)}")
    if "n" not in doc:
        raise ValueError("model file must declare 'n'")
    n = int(doc["n"])
    if n < 1:
        raise ValueError(f"n must be positive, got {n}")
    canon: dict = {"n": n}

    gen = pmat = None
    if "generator" in doc and "dtmc" in doc:
        raise ValueError("model declares both 'generator' and 'dtmc'")
    if "generator" in doc:
        gen = _parse_generator(doc["generator"], n)
        canon["generator"] = _matrix_doc(gen.q)
    if "dtmc" in doc:
        pmat = TransitionMatrix(_float_matrix(doc["dtmc"], n, n, "dtmc matrix"))
        canon["dtmc"] = _matrix_doc(pmat.p)

    metric = None
    if "metric" in doc:
        metric, metric_canon = _parse_metric_spec(doc["metric"], n)
        canon["metric"] = metric_canon

    partition = None
    if "partition" in doc:
        blocks = tuple(tuple(int(v) for v in block) for block in doc["partition"])
        partition = Partition(blocks)
        if partition.n != n:
            raise ValueError(f"partition covers {partition.n} states but the model has {n}")
        canon["partition"] = [list(b) for b in partition.blocks]

    alpha = None
    if "alpha" in doc:
        if partition is None:
            raise ValueError("'alpha' requires a 'partition'")
        alpha = [np.asarray(a, dtype=float) for a in doc["alpha"]]
        canon["alpha"] = [[float(v) for v in a] for a in alpha]

    initial = None
    if "initial" in doc:
        vec = np.asarray(doc["initial"], dtype=float)
        if vec.shape != (n,):
            raise ValueError(f"initial distribution must have {n} entries")
        initial = ProbVec(vec)
        canon["initial"] = [float(v) for v in initial.p]

    agg = None
    agg_pi0 = None
    if "aggregation" in doc:
        spec = doc["aggregation"]
        unknown = set(spec) - {"a", "theta", "pi", "lam", "pi0"}
        if unknown:
            raise ValueError(f"unknown aggregation fields: {sorted(unknown)}")
        if "a" not in spec:
            raise ValueError("explicit aggregation must carry 'a'")
        a = np.asarray(spec["a"], dtype=float)
        if a.ndim != 2 or a.shape[1] != n:
            raise ValueError(f"aggregation matrix must have {n} columns")
        m = a.shape[0]
        lam = None
        if "lam" in spec:
            lam = _float_matrix(spec["lam"], n, m, "lifting matrix")
        theta = None
        if "theta" in spec:
            theta = Generator(_float_matrix(spec["theta"], m, m, "aggregated generator"))
        pi_spec = None
        if "pi" in spec:
            pi_spec = TransitionMatrix(_float_matrix(spec["pi"], m, m, "aggregated dtmc"))
        agg = Aggregation(a=a, lam=lam, theta=theta, pi_mat=pi_spec)
        canon_agg: dict = {"a": _matrix_doc(agg.a)}
        if lam is not None:
            canon_agg["lam"] = _matrix_doc(agg.lam)
        if theta is not None:
            canon_agg["theta"] = _matrix_doc(theta.q)
        if pi_spec is not None:
            canon_agg["pi"] = _matrix_doc(pi_spec.p)
        if "pi0" in spec:
            vec = np.asarray(spec["pi0"], dtype=float)
            if vec.shape != (m,):
                raise ValueError(f"pi0 must have {m} entries")
            agg_pi0 = ProbVec(vec)
            canon_agg["pi0"] = [float(v) for v in agg_pi0.p]
        canon["aggregation"] = canon_agg

    return Model(
        n=n,
        gen=gen,
        pmat=pmat,
        metric=metric,
        partition=partition,
        alpha=alpha,
        initial=initial,
        agg=agg,
        agg_pi0=agg_pi0,
        canon=canon,
        source=source,
    )


def load_model(path: str) -> Model:
    """Load and validate a model JSON file."""
    with open(path, encoding="utf-8") as fh:
        doc = json.load(fh)
    return load_model_dict(doc, source=path)


def canonical_model_json(model: Model) -> str:
    """The model's canonical serialization (ends with a newline)."""
    return canonical_json(model.canon) + "\n"


# --------------------------------------------------------------------------
# shared CLI plumbing
# --------------------------------------------------------------------------


def _add_model_args(sub: argparse.ArgumentParser) -> None:
    src = sub.add_mutually_exclusive_group(required=True)
    src.add_argument("--model", help="path to a model JSON file")
    src.add_argument("--builtin", choices=["toy", "grid"], help="use a built-in model")
    sub.add_argument("--grid-lo", default="0", help="grid builtin: comma-separated lower corner")
    sub.add_argument("--grid-hi", default="4", help="grid builtin: comma-separated upper corner")
    sub.add_argument("--grid-rate", type=float, default=1.0, help="grid builtin: jump rate")
    sub.add_argument(
        "--grid-jumps",
        default="[[[1], 0.5], [[-1], 0.5]]",
        help="grid builtin: JSON list of [offset-vector, probability] pairs",
    )
    sub.add_argument("--grid-root", type=int, default=None, help="grid builtin: root state")
    sub.add_argument(
        "--grid-root-rate", type=float, default=0.0, help="grid builtin: rate to the root"
    )


def _resolve_model(args) -> Model:
    if args.model is not None:
        return load_model(args.model)
    if args.builtin == "toy":
        gen, metric = toy_ctmc()
        doc = {
            "n": 3,
            "generator": _matrix_doc(gen.q),
            "metric": {"kind": "explicit", "dist": _matrix_doc(metric.dist)},
        }
        return load_model_dict(doc, source="builtin:toy")
    lo = tuple(int(v) for v in args.grid_lo.split(","))
    hi = tuple(int(v) for v in args.grid_hi.split(","))
    jumps = JumpDistribution(
        tuple((tuple(off), float(p)) for off, p in json.loads(args.grid_jumps))
    )
    gen, metric = translation_invariant_ctmc(
        Box(lo, hi), args.grid_rate, jumps, root=args.grid_root, root_rate=args.grid_root_rate
    )
    doc = {
        "n": gen.n,
        "generator": _matrix_doc(gen.q),
        "metric": {"kind": "explicit", "dist": _matrix_doc(metric.dist)},
    }
    return load_model_dict(doc, source="builtin:grid")


def _require(cond: bool, message: str) -> None:
    if not cond:
        raise ValueError(message)


def _parse_dist(spec: str, model: Model) -> ProbVec:
    n = model.n
    if spec == "uniform":
        return ProbVec(np.full(n, 1.0 / n))
    if spec.startswith("dirac:"):
        return dirac(n, int(spec.split(":", 1)[1]))
    if spec.startswith("uniform-block:"):
        _require(model.partition is not None, "uniform-block needs a model with a partition")
        b = int(spec.split(":", 1)[1])
        blocks = model.partition.blocks
        _require(1 <= b <= len(blocks), f"block index {b} out of range 1..{len(blocks)}")
        p = np.zeros(n)
        for r in blocks[b - 1]:
            p[r - 1] = 1.0 / len(blocks[b - 1])
        return ProbVec(p)
    if spec.startswith("file:"):
        with open(spec.split(":", 1)[1], encoding="utf-8") as fh:
            vec = np.asarray(json.load(fh), dtype=float)
        _require(vec.shape == (n,), f"distribution file must hold {n} entries")
        return ProbVec(vec)
    raise ValueError(
        f"unknown distribution spec {spec!r}; expected dirac:<i>, uniform, "
        "uniform-block:<b> or file:<path>"
    )


def _metadata_line(args, sub: str, keys: list[str]) -> str:
    parts = [f"# wdbounds {sub}"]
    parts.append(f"model={args.model if args.model else 'builtin:' + args.builtin}")
    for key in keys:
        parts.append(f"{key}={getattr(args, key.replace('-', '_'))}")
    return " ".join(parts)


def _emit_csv(lines: list[str]) -> None:
    sys.stdout.write("\n".join(lines) + "\n")


def _resolve_aggregation(model: Model, partition: Partition | None) -> Aggregation:
    """An aggregation from an explicit spec or a (possibly overriding) partition."""
    if partition is not None:
        if model.gen is not None:
            return partition_aggregation_ctmc(model.gen, partition, model.alpha)
        _require(model.pmat is not None, "aggregation needs a generator or a dtmc matrix")
        return partition_aggregation_dtmc(model.pmat, partition, model.alpha)
    if model.agg is not None:
        return model.agg
    if model.partition is not None:
        return _resolve_aggregation(model, model.partition)
    raise ValueError("model supplies neither a partition nor an explicit aggregation")


# --------------------------------------------------------------------------
# subcommands
# --------------------------------------------------------------------------


def _cmd_w1(args) -> int:
    model = _resolve_model(args)
    _require(model.metric is not None, "w1 needs a model with a metric")
    p = _parse_dist(args.p, model)
    q = _parse_dist(args.q, model)
    result = wasserstein(p, q, model.metric, method=args.method)
    lines = [_metadata_line(args, "w1", ["p", "q", "method"]), "kind,r,s,value"]
    lines.append(f"w1,,,{_fmt(result.value)}")
    if args.coupling:
        coupling = result.coupling
        if args.canonical:
            coupling = canonicalize_coupling(coupling, model.metric)
        gamma = coupling.gamma
        for r in range(model.n):
            for s in range(model.n):
                if gamma[r, s] > SUPPORT_TOL:
                    lines.append(f"coupling,{r + 1},{s + 1},{_fmt(gamma[r, s])}")
    if args.potential:
        for r in range(model.n):
            lines.append(f"potential,{r + 1},,{_fmt(result.potential.f[r])}")
    _emit_csv(lines)
    return 0


def _cmd_curvature(args) -> int:
    model = _resolve_model(args)
    _require(model.metric is not None, "curvature needs a model with a metric")
    if args.pairs in ("all", "min"):
        pairs: str | tuple[int, int] = args.pairs
    else:
        r, s = (int(v) for v in args.pairs.split(","))
        pairs = (r, s)

    lines = [
        _metadata_line(args, "curvature", ["pairs", "margin", "k_only", "method"]),
        "name,r,s,k,kappa",
    ]
    if model.gen is not None:
        report = curvature_report(
            model.gen,
            model.metric,
            pairs=pairs,
            margin=args.margin,
            k_only=args.k_only,
            method=args.method,
        )
        for pc in report.pairs:
            kap = "" if pc.kappa is None else _fmt(pc.kappa)
            lines.append(f"pair,{pc.r},{pc.s},{_fmt(pc.k)},{kap}")
        lines.append(f"k_min,,,{_fmt(report.k_min)},")
        lines.append(f"K_global,,,{_fmt(report.K_global)},")
        if report.kappa_min is not None:
            lines.append(f"kappa_min,,,,{_fmt(report.kappa_min)}")
    else:
        _require(model.pmat is not None, "curvature needs a generator or a dtmc matrix")
        _require(not args.k_only, "--k-only applies only to generator (CTMC) models")
        if isinstance(pairs, tuple):
            selected = [pairs]
        else:
            selected = [
                (r, s) for r in range(1, model.n + 1) for s in range(r + 1, model.n + 1)
            ]
        vals = {}
        for r, s in selected:
            vals[(r, s)] = kappa_dtmc(model.pmat, model.metric, r, s)
            lines.append(f"pair,{r},{s},,{_fmt(vals[(r, s)])}")
        lines.append(f"kappa_min,,,,{_fmt(min(vals.values()))}")
    _emit_csv(lines)
    return 0


def _load_partition_file(path: str) -> Partition:
    with open(path, encoding="utf-8") as fh:
        blocks = json.load(fh)
    return Partition(tuple(tuple(int(v) for v in block) for block in blocks))


def _cmd_bounds(args) -> int:
    model = _resolve_model(args)
    _require(model.metric is not None, "bounds needs a model with a metric")
    _require(model.gen is not None, "bounds needs a CTMC model (a 'generator')")
    partition = _load_partition_file(args.partition_from_file) if args.partition_from_file else None
    agg = _resolve_aggregation(model, partition)
    _require(agg.theta is not None, "bounds needs an aggregation with a generator")
    if args.p0 is not None:
        p0 = _parse_dist(args.p0, model)
    else:
        _require(model.initial is not None, "bounds needs --p0 or a model 'initial'")
        p0 = model.initial
    variants = tuple(v.strip() for v in args.variants.split(",") if v.strip())
    t = bounds_mod.time_grid(args.T, args.grid)
    curve = bounds_mod.compute_bound_curve(
        model.gen,
        model.metric,
        agg,
        p0,
        t,
        variants=variants,
        with_exact=args.exact,
        margin=args.margin,
    )
    header = ["t"]
    if args.exact:
        header.append("exact")
    for name in variants:
        header += [f"{name}_raw", f"{name}_clipped"]
    lines = [
        _metadata_line(args, "bounds", ["T", "grid", "variants", "exact", "p0"]),
        ",".join(header),
    ]
    clipped = curve.clipped()
    for i, ti in enumerate(curve.t):
        row = [_fmt(ti)]
        if args.exact:
            row.append(_fmt(curve.exact[i]))
        for name in variants:
            row += [_fmt(curve.columns[name][i]), _fmt(clipped[name][i])]
        lines.append(",".join(row))
    _emit_csv(lines)
    return 0


def _cmd_aggregate(args) -> int:
    model = _resolve_model(args)
    if args.eps is not None:
        _require(model.metric is not None, "--eps needs a model with a metric")
        partition = epsilon_partition(model.metric, args.eps)
    elif args.partition_from_file:
        partition = _load_partition_file(args.partition_from_file)
    else:
        partition = None
    agg = _resolve_aggregation(model, partition)
    report: dict = {"m": agg.m, "n": agg.n, "a": _matrix_doc(agg.a)}
    src = partition if partition is not None else agg.partition
    if src is not None:
        report["partition"] = [list(b) for b in src.blocks]
    if agg.theta is not None:
        report["theta"] = _matrix_doc(agg.theta.q)
    if agg.pi_mat is not None:
        report["pi"] = _matrix_doc(agg.pi_mat.p)
    if model.metric is not None:
        if model.gen is not None and agg.theta is not None:
            v, norm = bounds_mod.defect(model.gen, model.metric, agg)
        elif model.pmat is not None and agg.pi_mat is not None:
            v, norm = bounds_mod.defect_dtmc(model.pmat, model.metric, agg)
        else:
            v = None
        if v is not None:
            report["defect_vector"] = [float(x) for x in v]
            report["defect_norm"] = norm
    sys.stdout.write(canonical_json(report) + "\n")
    return 0


# --------------------------------------------------------------------------
# entry point
# --------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="wdbounds",
        description="Certified Wasserstein error bounds for aggregated Markov chains.",
    )
    subs = parser.add_subparsers(dest="command", required=True)

    w1 = subs.add_parser("w1", help="Wasserstein distance between two distributions")
    _add_model_args(w1)
    w1.add_argument("--p", required=True, help="first distribution spec")
    w1.add_argument("--q", required=True, help="second distribution spec")
    w1.add_argument("--coupling", action="store_true", help="emit the optimal coupling")
    w1.add_argument("--potential", action="store_true", help="emit the optimal potential")
    w1.add_argument("--canonical", action="store_true", help="canonicalize the coupling")
    w1.add_argument(
        "--method", choices=["transport", "lp"], default="transport", help="solver route"
    )
    w1.set_defaults(func=_cmd_w1)

    curv = subs.add_parser("curvature", help="pairwise coarse Ricci curvature")
    _add_model_args(curv)
    curv.add_argument("--pairs", default="min", help="'all', 'min' or 'r,s'")
    curv.add_argument("--margin", type=float, default=None, help="prefilter margin")
    curv.add_argument("--k-only", action="store_true", help="skip all curvature LPs")
    curv.add_argument("--method", choices=["dual", "direct"], default="dual", help="LP encoding")
    curv.set_defaults(func=_cmd_curvature)

    bnd = subs.add_parser("bounds", help="certified error-bound curves")
    _add_model_args(bnd)
    bnd.add_argument("--T", type=float, default=1.0, help="time horizon")
    bnd.add_argument("--grid", type=int, default=200, help="number of grid points")
    bnd.add_argument(
        "--variants",
        default="linear,exp-k,hybrid",
        help="comma list of linear,timevarying,exp-k,exp-kappa,local,hybrid,hybrid-kappa",
    )
    bnd.add_argument("--exact", action="store_true", help="also compute the exact error")
    bnd.add_argument("--p0", default=None, help="initial distribution spec")
    bnd.add_argument("--margin", type=float, default=None, help="kappa_min prefilter margin")
    bnd.add_argument(
        "--partition-from-file", default=None, help="JSON file with partition blocks"
    )
    bnd.set_defaults(func=_cmd_bounds)

    agg = subs.add_parser("aggregate", help="build an aggregation and report its defect")
    _add_model_args(agg)
    group = agg.add_mutually_exclusive_group()
    group.add_argument("--eps", type=float, default=None, help="epsilon for metric clustering")
    group.add_argument(
        "--partition-from-file", default=None, help="JSON file with partition blocks"
    )
    agg.set_defaults(func=_cmd_aggregate)

    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except NumericalFailure as exc:
        print(f"{type(exc).__name__}: {exc}", file=sys.stderr)
        return 3
    except WdboundsError as exc:
        print(f"{type(exc).__name__}: {exc}", file=sys.stderr)
        return 2
    except (ValueError, KeyError, OSError, json.JSONDecodeError) as exc:
        print(f"{type(exc).__name__}: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())

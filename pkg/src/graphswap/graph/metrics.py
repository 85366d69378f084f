"""Structural measures over entity graphs.

Covers the degree/percolation statistics (mean degree, second moment,
kappa = <k^2>/<k>, giant component), exact unweighted centralities, the
leading eigenpair by shifted power iteration, first-order eigenvalue
perturbation estimates, and the clean-vs-poisoned comparison report.

Distances are unweighted hops throughout: multi-hop reasoning is
hop-structured, and co-occurrence weights only enter the spectral view.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ..errors import SpectralConvergenceError, ValidationError
from ..inventory import TypedEntity
from . import kernels
from .build import EntityGraph


@dataclass
class GraphMetrics:
    degrees: dict[TypedEntity, int]
    mean_degree: float
    second_moment: float
    kappa: float | None
    giant_fraction: float
    giant_size: int
    degree_histogram: dict[int, int]
    powerlaw_gamma: float | None
    avg_path_length_giant: float | None


@dataclass
class CentralityReport:
    degree: dict[TypedEntity, int]
    betweenness: dict[TypedEntity, float]
    closeness: dict[TypedEntity, float]
    component_restricted: bool


@dataclass
class SpectralReport:
    lambda_max: float
    eigenvector: dict[TypedEntity, float]
    iterations: int
    residual: float


@dataclass
class PerturbationReport:
    first_order: float
    exact: float
    changes: list[tuple[TypedEntity, TypedEntity, float]]


@dataclass
class HubAttackReport:
    targets: int
    nodes: tuple[int, int]
    edges: tuple[int, int]
    giant_fraction: tuple[float, float]
    kappa: tuple[float | None, float | None]
    lambda_max: tuple[float | None, float | None]
    avg_path_length: tuple[float | None, float | None]
    target_edge_preservation: float | None
    deltas: dict[str, float | None] = field(default_factory=dict)


def _fit_gamma(histogram: dict[int, int]) -> float | None:
    """Log-log least-squares slope over the positive-degree histogram.

    Informational only: desk-scale tails are too short for a serious fit.
    """
    points = [(k, c) for k, c in histogram.items() if k >= 1 and c > 0]
    if len(points) < 2:
        return None
    xs = np.log([float(k) for k, _ in points])
    ys = np.log([float(c) for _, c in points])
    slope = np.polyfit(xs, ys, 1)[0]
    return float(-slope)


def _component_labels(graph: EntityGraph) -> np.ndarray:
    return kernels.connected_components(graph.indptr, graph.indices)


def metrics(graph: EntityGraph) -> GraphMetrics:
    if graph.n == 0:
        raise ValidationError("metrics need at least one node")
    deg = graph.degrees()
    mean_k = float(deg.mean())
    second = float((deg.astype(np.float64) ** 2).mean())
    kappa = second / mean_k if mean_k > 0 else None

    labels = _component_labels(graph)
    sizes = np.bincount(labels)
    giant_size = int(sizes.max())
    giant_fraction = giant_size / graph.n

    histogram: dict[int, int] = {}
    for k in deg.tolist():
        histogram[k] = histogram.get(k, 0) + 1

    avg_path = None
    if giant_size >= 2:
        giant_label = int(sizes.argmax())
        sums, _ = kernels.closeness_sums(graph.indptr, graph.indices)
        in_giant = labels == giant_label
        total = float(sums[in_giant].sum())
        avg_path = total / (giant_size * (giant_size - 1))

    return GraphMetrics(
        degrees={graph.nodes[i]: int(deg[i]) for i in range(graph.n)},
        mean_degree=mean_k,
        second_moment=second,
        kappa=kappa,
        giant_fraction=giant_fraction,
        giant_size=giant_size,
        degree_histogram=dict(sorted(histogram.items())),
        powerlaw_gamma=_fit_gamma(histogram),
        avg_path_length_giant=avg_path,
    )


def centrality(graph: EntityGraph) -> CentralityReport:
    """Exact degree, betweenness, and closeness on unweighted hops.

    Closeness is component-restricted on disconnected graphs (flagged);
    isolated nodes get 0.
    """
    if graph.n == 0:
        raise ValidationError("centrality needs at least one node")
    deg = graph.degrees()
    cb = kernels.betweenness(graph.indptr, graph.indices)
    sums, counts = kernels.closeness_sums(graph.indptr, graph.indices)
    labels = _component_labels(graph)
    disconnected = int(labels.max()) > 0
    closeness = {}
    for i, node in enumerate(graph.nodes):
        closeness[node] = 1.0 / float(sums[i]) if counts[i] > 0 else 0.0
    return CentralityReport(
        degree={graph.nodes[i]: int(deg[i]) for i in range(graph.n)},
        betweenness={graph.nodes[i]: float(cb[i]) for i in range(graph.n)},
        closeness=closeness,
        component_restricted=disconnected,
    )


def spectral(graph: EntityGraph, tol: float = 1e-9, max_iter: int = 100_000) -> SpectralReport:
    """Leading eigenvalue and unit eigenvector of the weighted adjacency."""
    if graph.n_edges < 1:
        raise ValidationError("spectral analysis needs at least one edge")
    lam, u, iters, resid, converged = kernels.power_iteration(
        graph.indptr, graph.indices, graph.weights, tol, max_iter
    )
    if not converged:
        raise SpectralConvergenceError(
            f"power iteration stalled at residual {resid:.3e} after {iters} iterations",
            residual=float(resid),
            iterations=int(iters),
        )
    u = np.asarray(u, np.float64)
    if float(u.sum()) < 0:
        u = -u
    return SpectralReport(
        lambda_max=float(lam),
        eigenvector={graph.nodes[i]: float(u[i]) for i in range(graph.n)},
        iterations=int(iters),
        residual=float(resid),
    )


def perturbation(
    graph: EntityGraph,
    delta: dict[tuple[TypedEntity, TypedEntity], float],
    tol: float = 1e-10,
    max_iter: int = 200_000,
) -> PerturbationReport:
    """First-order eigenvalue shift u' dA u versus the recomputed exact shift.

    ``delta`` maps unordered entity pairs to weight changes; the perturbed
    adjacency must stay non-negative.
    """
    changes: dict[tuple[int, int], float] = {}
    listed: list[tuple[TypedEntity, TypedEntity, float]] = []
    for (u_ent, v_ent), dw in delta.items():
        iu, iv = graph.index_of(u_ent), graph.index_of(v_ent)
        if iu is None or iv is None:
            raise ValidationError(f"perturbation references unknown node {u_ent} or {v_ent}")
        if iu == iv:
            raise ValidationError("perturbation cannot create self-loops")
        key = (min(iu, iv), max(iu, iv))
        if key in changes and changes[key] != float(dw):
            raise ValidationError(f"conflicting deltas for pair {u_ent}, {v_ent}")
        changes[key] = float(dw)
        listed.append((u_ent, v_ent, float(dw)))

    base = spectral(graph, tol=tol, max_iter=max_iter)
    uvec = np.array([base.eigenvector[n] for n in graph.nodes], np.float64)
    first_order = 0.0
    for (i, j), dw in changes.items():
        first_order += 2.0 * uvec[i] * uvec[j] * dw

    pw = graph.pair_weights()
    for key, dw in changes.items():
        new_w = pw.get(key, 0.0) + dw
        if new_w < -1e-12:
            raise ValidationError(f"perturbation drives edge {key} negative ({new_w})")
        if new_w <= 0:
            pw.pop(key, None)
        else:
            pw[key] = new_w
    perturbed = EntityGraph(list(graph.nodes), pw)
    if perturbed.n_edges == 0:
        lam_new = 0.0
    else:
        lam_new = spectral(perturbed, tol=tol, max_iter=max_iter).lambda_max
    return PerturbationReport(
        first_order=float(first_order),
        exact=float(lam_new - base.lambda_max),
        changes=listed,
    )


def _safe_lambda(graph: EntityGraph) -> float | None:
    if graph.n_edges < 1:
        return None
    return spectral(graph).lambda_max


def _delta(a: float | None, b: float | None) -> float | None:
    if a is None or b is None:
        return None
    return b - a


def hub_attack_report(
    clean: EntityGraph, poisoned: EntityGraph, targets: set[TypedEntity]
) -> HubAttackReport:
    """Structural comparison of two graphs, target-aware.

    Edge preservation is restricted to clean edges touching a target node:
    the fraction that survive (same endpoints) in the poisoned graph.
    """
    m_clean = metrics(clean)
    m_pois = metrics(poisoned)
    lam_clean = _safe_lambda(clean)
    lam_pois = _safe_lambda(poisoned)

    target_edges = {
        (u, v) for (u, v) in clean.entity_edges() if u in targets or v in targets
    }
    preservation = None
    if target_edges:
        poisoned_edges = poisoned.entity_edges()
        kept = sum(1 for e in target_edges if e in poisoned_edges)
        preservation = kept / len(target_edges)

    return HubAttackReport(
        targets=len(targets),
        nodes=(clean.n, poisoned.n),
        edges=(clean.n_edges, poisoned.n_edges),
        giant_fraction=(m_clean.giant_fraction, m_pois.giant_fraction),
        kappa=(m_clean.kappa, m_pois.kappa),
        lambda_max=(lam_clean, lam_pois),
        avg_path_length=(m_clean.avg_path_length_giant, m_pois.avg_path_length_giant),
        target_edge_preservation=preservation,
        deltas={
            "giant_fraction": m_pois.giant_fraction - m_clean.giant_fraction,
            "kappa": _delta(m_clean.kappa, m_pois.kappa),
            "lambda_max": _delta(lam_clean, lam_pois),
            "avg_path_length": _delta(
                m_clean.avg_path_length_giant, m_pois.avg_path_length_giant
            ),
        },
    )

"""Entity graph construction, structural metrics, and synthetic fixtures."""

from .build import EntityGraph, build_graph, export_edgelist, sentence_spans
from .metrics import (
    CentralityReport,
    GraphMetrics,
    HubAttackReport,
    PerturbationReport,
    SpectralReport,
    centrality,
    hub_attack_report,
    metrics,
    perturbation,
    spectral,
)
from .synth import SynthFixture, synth_corpus

__all__ = [
    "CentralityReport",
    "EntityGraph",
    "GraphMetrics",
    "HubAttackReport",
    "PerturbationReport",
    "SpectralReport",
    "SynthFixture",
    "build_graph",
    "centrality",
    "export_edgelist",
    "hub_attack_report",
    "metrics",
    "perturbation",
    "sentence_spans",
    "spectral",
    "synth_corpus",
]

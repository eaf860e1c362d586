"""Critical-line screening with LODF contingency scans and 4-node graphlet census."""

from .caseio import emit_json, load_bundled, load_case, parse_matpower, parse_simple
from .contingency import N1Record, N2Record, N2Result, least_critical, n1_scan, n2_scan
from .dcsens import (
    IsfMatrix,
    LodfMatrix,
    PtdfMatrix,
    SensitivityStack,
    dc_flow,
    isf_matrix,
    lodf_matrix,
    predict_outage_flows,
    ptdf_matrix,
    sensitivities,
)
from .graphlets import Graphlet, GraphletCensus, classify, edge_census, edge_percentages, enumerate_4subgraphs
from .netmodel import (
    Branch,
    Bus,
    IslandingError,
    Network,
    NetworkError,
    SimpleGraph,
    ValidationError,
    build_graph,
    connected_components,
)
from .report import CaseReport, emit_report, multi_case_bubble_data, n1_report

__all__ = [
    "Branch",
    "Bus",
    "CaseReport",
    "Graphlet",
    "GraphletCensus",
    "IsfMatrix",
    "IslandingError",
    "LodfMatrix",
    "N1Record",
    "N2Record",
    "N2Result",
    "Network",
    "NetworkError",
    "PtdfMatrix",
    "SensitivityStack",
    "SimpleGraph",
    "ValidationError",
    "build_graph",
    "classify",
    "connected_components",
    "dc_flow",
    "edge_census",
    "edge_percentages",
    "emit_json",
    "emit_report",
    "enumerate_4subgraphs",
    "isf_matrix",
    "least_critical",
    "load_bundled",
    "load_case",
    "lodf_matrix",
    "multi_case_bubble_data",
    "n1_report",
    "n1_scan",
    "n2_scan",
    "parse_matpower",
    "parse_simple",
    "predict_outage_flows",
    "ptdf_matrix",
    "sensitivities",
]

__version__ = "0.1.0"

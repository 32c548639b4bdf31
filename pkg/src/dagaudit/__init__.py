"""Audit the hidden assumptions of a causal DAG.

Parse a root graph, enumerate the omitted-pathway and edge-direction
scenarios that would change what the analysis identifies, and render the
results as overlays, DOT, JSON and an assumption checklist.
"""
from .adoption import UnknownBranchError, adopt
from .branchgen import (
    AddedPathway,
    AuditResult,
    ChangeReason,
    ExclusionBranch,
    FlipSet,
    MisdirectionBranch,
    Rejection,
    RejectedCandidate,
    branch_id,
    evaluate_candidate,
    generate,
    generate_exclusions,
    generate_misdirections,
    attach_known_omitted,
    realize,
)
from .ident import (
    Graph,
    d_separated,
    directed_paths,
    frontdoor_count,
    graph_from_root,
    is_acyclic,
    is_sufficient_adjustment,
    iv_conditions_hold,
    minimal_sufficient_sets,
)
from .model import (
    DagParseError,
    DagValidationError,
    Diagnostic,
    EdgeSpec,
    Estimand,
    KnownOmitted,
    NodeSpec,
    RootDag,
)
from .overlay import (
    ChecklistItem,
    Overlay,
    OverlayEdge,
    build_overlay,
    checklist,
    checklist_markdown,
    overlay_to_dot,
    result_from_json,
    result_to_dict,
    result_to_json,
)
from .parser import emit_dag, infer_estimand, parse_dag, validate_root
from .sem import LinearSem, sem_oracle_check

__version__ = "0.1.0"

__all__ = [
    "AddedPathway",
    "AuditResult",
    "ChangeReason",
    "ChecklistItem",
    "DagParseError",
    "DagValidationError",
    "Diagnostic",
    "EdgeSpec",
    "Estimand",
    "ExclusionBranch",
    "FlipSet",
    "Graph",
    "KnownOmitted",
    "LinearSem",
    "MisdirectionBranch",
    "NodeSpec",
    "Overlay",
    "OverlayEdge",
    "Rejection",
    "RejectedCandidate",
    "RootDag",
    "UnknownBranchError",
    "adopt",
    "attach_known_omitted",
    "branch_id",
    "build_overlay",
    "checklist",
    "checklist_markdown",
    "d_separated",
    "directed_paths",
    "emit_dag",
    "evaluate_candidate",
    "frontdoor_count",
    "generate",
    "generate_exclusions",
    "generate_misdirections",
    "graph_from_root",
    "infer_estimand",
    "is_acyclic",
    "is_sufficient_adjustment",
    "iv_conditions_hold",
    "minimal_sufficient_sets",
    "overlay_to_dot",
    "parse_dag",
    "realize",
    "result_from_json",
    "result_to_dict",
    "result_to_json",
    "sem_oracle_check",
    "validate_root",
]

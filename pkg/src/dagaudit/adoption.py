"""Turn an accepted branch into a new root graph (iterative model building).

Adopting a misdirection applies its flip set. Adopting an exclusion either
promotes the pathway to a named, adjusted-for node (the default: adoption
models measuring the mechanism), or, with ``leave_unadjusted``, records it
as a known-omitted pathway of the new root instead. The adopted graph always
re-validates, so audit/adopt can loop indefinitely.
"""
from __future__ import annotations

from dataclasses import replace
from typing import Optional

from . import ident, parser
from .branchgen import AuditResult, ExclusionBranch, MisdirectionBranch, UNKNOWN_MEMBER
from .model import EdgeSpec, KnownOmitted, NodeSpec, RootDag


class UnknownBranchError(KeyError):
    pass


def _auto_name(taken: set[str]) -> str:
    i = 1
    while f"U{i}" in taken:
        i += 1
    return f"U{i}"


def _rebuild(
    nodes: tuple[NodeSpec, ...],
    edges: tuple[EdgeSpec, ...],
    known: tuple[KnownOmitted, ...],
) -> RootDag:
    """Re-derive roles and the estimand after a structural change.

    An instrument that lost its directed path to the exposure is demoted to
    an adjusted covariate: the adopted model no longer supports using it as
    an instrument, and a dangling instrument would not validate.
    """
    exposure = next(n.name for n in nodes if n.role == "exposure")
    outcome = next(n.name for n in nodes if n.role == "outcome")
    instrument = next((n.name for n in nodes if n.role == "instrument"), None)
    graph = ident.Graph(tuple(n.name for n in nodes), frozenset(e.pair for e in edges))
    if instrument is not None and exposure not in ident.descendants(graph, instrument):
        nodes = tuple(
            replace(n, role="adjusted") if n.name == instrument else n for n in nodes
        )
        instrument = None
    adjusted = frozenset(n.name for n in nodes if n.role == "adjusted")
    estimand = parser.infer_estimand_parts(graph, exposure, outcome, adjusted, instrument)
    new_root = RootDag(nodes, edges, estimand, known)
    parser.require_valid(new_root)
    return new_root


def adopt(
    root: RootDag,
    result: AuditResult,
    branch_id: str,
    name: Optional[str] = None,
    leave_unadjusted: bool = False,
) -> RootDag:
    """New root realizing the branch identified by ``branch_id``."""
    try:
        branch = result.find_branch(branch_id)
    except KeyError:
        raise UnknownBranchError(branch_id)

    if isinstance(branch, MisdirectionBranch):
        flips = set(branch.flips)
        edges = tuple(
            e.reversed() if e.pair in flips else e for e in root.edges
        )
        return _rebuild(root.nodes, edges, root.known_omitted)

    assert isinstance(branch, ExclusionBranch)
    a, b = branch.pair
    taken = set(root.node_names) | {k.name for k in root.known_omitted}
    if branch.pathway_kind == "directed":
        if name is not None:
            raise ValueError("--name applies only to common-cause pathways")
        if leave_unadjusted:
            entry = KnownOmitted(_auto_name(taken), (a, b), "directed")
            return _rebuild(root.nodes, root.edges, root.known_omitted + (entry,))
        return _rebuild(root.nodes, root.edges + (EdgeSpec(a, b),), root.known_omitted)

    known_names = [m for m in branch.known_members]
    new_name = name or (known_names[0] if known_names else _auto_name(taken))
    if new_name != UNKNOWN_MEMBER and new_name in root.node_names:
        raise ValueError(f"node name {new_name!r} already exists in the root")
    if leave_unadjusted:
        if new_name in {k.name for k in root.known_omitted}:
            raise ValueError(f"known pathway {new_name!r} already recorded")
        entry = KnownOmitted(new_name, (a, b), "bidirected-latent")
        return _rebuild(root.nodes, root.edges, root.known_omitted + (entry,))
    # Promoting a known member to a measured covariate consumes its registry
    # entry; the mechanism is now part of the model.
    remaining = tuple(k for k in root.known_omitted if k.name != new_name)
    nodes = root.nodes + (NodeSpec(new_name, "adjusted"),)
    edges = root.edges + (EdgeSpec(new_name, a), EdgeSpec(new_name, b))
    return _rebuild(nodes, edges, remaining)

"""Overlay construction, DOT and JSON emission, and the assumption checklist.

The overlay is the root graph plus one styled edge per branch (expanded) or
per merged group (collapsed). It is display shorthand, not a DAG; no
acyclicity is required or checked on the union.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field, replace
from typing import Any, Mapping, Optional, Sequence

from . import ident
from .branchgen import (
    UNKNOWN_MEMBER,
    AddedPathway,
    AuditResult,
    ChangeReason,
    ExclusionBranch,
    FlipSet,
    MisdirectionBranch,
    Rejection,
    RejectedCandidate,
    branch_id,
    realize,
)
from .model import (
    STATUS_NAMES,
    EdgeSpec,
    Estimand,
    KnownOmitted,
    NodeSpec,
    RootDag,
)

CLASSIFICATIONS = (
    "unmeasured-confounding",
    "direct-pathway",
    "reverse-causation",
    "collider-conditioning",
    "mediator-misread",
    "downstream-conditioning",
    "other",
)


@dataclass(frozen=True)
class OverlayEdge:
    edge: EdgeSpec
    refs: tuple[str, ...]  # branch ids; known members as "<id>#<member>"
    label: str
    family: str  # exclusion | misdirection


@dataclass(frozen=True)
class Overlay:
    nodes: tuple[str, ...]
    root_edges: tuple[EdgeSpec, ...]
    overlay_edges: tuple[OverlayEdge, ...]
    mode: str  # expanded | collapsed


@dataclass(frozen=True)
class ChecklistItem:
    id: str
    statement: str
    classification: str
    status: str = "open"
    note: str = ""


def member_ref(superset_id: str, member: str) -> str:
    return superset_id if member == UNKNOWN_MEMBER else f"{superset_id}#{member}"


def _exclusion_edge(branch: ExclusionBranch) -> EdgeSpec:
    a, b = branch.pair
    return EdgeSpec(a, b, branch.pathway_kind, False)  # type: ignore[arg-type]


def _misdirection_edge(branch: MisdirectionBranch) -> EdgeSpec:
    tail, head = branch.flips[0]
    return EdgeSpec(head, tail, "directed", False)


def build_overlay(result: AuditResult, mode: str = "collapsed") -> Overlay:
    """Expanded: one overlay edge per branch, known members drawn separately
    from the unknown residual. Collapsed: superset members merge into one
    edge, and misdirection edges that coincide merge with joined references."""
    if mode not in ("expanded", "collapsed"):
        raise ValueError(f"unknown overlay mode {mode!r}")
    edges: list[OverlayEdge] = []
    if mode == "expanded":
        for b in result.exclusions:
            for member in b.members:
                edges.append(
                    OverlayEdge(
                        _exclusion_edge(b),
                        (member_ref(b.id, member),),
                        b.id if member == UNKNOWN_MEMBER else f"{b.id}:{member}",
                        "exclusion",
                    )
                )
        for m in result.misdirections:
            edges.append(OverlayEdge(_misdirection_edge(m), (m.id,), m.id, "misdirection"))
    else:
        for b in result.exclusions:
            refs = tuple(member_ref(b.id, member) for member in (UNKNOWN_MEMBER,) + b.known_members)
            edges.append(OverlayEdge(_exclusion_edge(b), refs, b.id, "exclusion"))
        grouped: dict[tuple[str, str], list[MisdirectionBranch]] = {}
        for m in result.misdirections:
            grouped.setdefault(_misdirection_edge(m).pair, []).append(m)
        for pair, group in grouped.items():
            edges.append(
                OverlayEdge(
                    _misdirection_edge(group[0]),
                    tuple(g.id for g in group),
                    "+".join(g.id for g in group),
                    "misdirection",
                )
            )
    return Overlay(
        result.root.node_names,
        result.root.edges,
        tuple(edges),
        mode,
    )


def overlay_to_dot(
    overlay: Overlay,
    colors: bool = False,
    explicit_latents: bool = False,
    graph_name: str = "overlay",
) -> str:
    """Deterministic Graphviz text: root edges solid, exclusion pathways
    dashed (double-headed when bidirected), misdirection flips dotted and
    labelled with their branch ids."""
    color_for = {"exclusion": "firebrick", "misdirection": "steelblue"}
    lines = [f"digraph {graph_name} {{", "  rankdir=LR;"]
    for name in overlay.nodes:
        lines.append(f'  "{name}";')
    for e in overlay.root_edges:
        lines.append(f'  "{e.tail}" -> "{e.head}" [style=solid];')
    for oe in overlay.overlay_edges:
        style = "dashed" if oe.family == "exclusion" else "dotted"
        attrs = [f"style={style}"]
        if oe.edge.kind == "bidirected-latent" and not explicit_latents:
            attrs.append("dir=both")
        attrs.append(f'label="{oe.label}"')
        if colors:
            attrs.append(f"color={color_for[oe.family]}")
        if oe.edge.kind == "bidirected-latent" and explicit_latents:
            u = ident.latent_name(oe.edge.tail, oe.edge.head)
            lines.append(f'  "{u}" [shape=point, label=""];')
            lines.append(f'  "{u}" -> "{oe.edge.tail}" [{", ".join(attrs)}];')
            lines.append(f'  "{u}" -> "{oe.edge.head}" [{", ".join(attrs)}];')
        else:
            lines.append(f'  "{oe.edge.tail}" -> "{oe.edge.head}" [{", ".join(attrs)}];')
    lines.append("}")
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------
# checklist


def _classify_misdirection(result: AuditResult, branch: MisdirectionBranch) -> tuple[str, Optional[str]]:
    root = result.root
    e = root.estimand
    realized = realize(root, FlipSet(branch.flips))
    if e.exposure in ident.descendants(realized, e.outcome):
        return "reverse-causation", None
    root_graph = ident.graph_from_root(root)
    for c in sorted(e.adjusted_set):
        if c in ident.descendants(realized, e.exposure) and c in ident.descendants(realized, e.outcome):
            return "collider-conditioning", c
    down_x = ident.descendants(root_graph, e.exposure)
    up_y = ident.ancestors(root_graph, e.outcome)
    for c in sorted(e.adjusted_set):
        was_mediator = c in down_x and c in up_y
        is_mediator = c in ident.descendants(realized, e.exposure) and c in ident.ancestors(realized, e.outcome)
        if was_mediator != is_mediator:
            return "mediator-misread", c
    for c in sorted(e.adjusted_set):
        if c in ident.descendants(realized, e.exposure):
            return "downstream-conditioning", c
    return "other", None


def _statement_for_exclusion(result: AuditResult, b: ExclusionBranch) -> str:
    adjusted = sorted(result.root.adjusted_set)
    if b.pathway_kind == "bidirected-latent":
        a, z = b.pair
        text = f"Assumed negligible: common cause of {a} and {z}"
        if adjusted:
            text += f" beyond {', '.join(adjusted)}"
    else:
        text = f"Assumed negligible: direct causal pathway {b.pair[0]} -> {b.pair[1]}"
    if b.known_members:
        text += f" (known members: {', '.join(b.known_members)}; plus unknown residual)"
    else:
        text += " (unknown residual)"
    return text


def _statement_for_misdirection(
    result: AuditResult, b: MisdirectionBranch, classification: str, focus: Optional[str]
) -> str:
    clauses = " and ".join(f"{head} causes {tail}" for tail, head in b.flips)
    text = f"Assumed impossible: {clauses}"
    e = result.root.estimand
    gloss = {
        "reverse-causation": " (reverse causation)",
        "collider-conditioning": f" (adjusted {focus} would be a collider)",
        "mediator-misread": f" (adjusted {focus} changes mediator status)",
        "downstream-conditioning": f" (adjusted {focus} would be downstream of {e.exposure})",
    }
    return text + gloss.get(classification, "")


def checklist(
    result: AuditResult, statuses: Optional[Mapping[str, tuple[str, str]]] = None
) -> list[ChecklistItem]:
    """One item per branch: a generated assumption statement, a structural
    classification, and the recorded justification status."""
    statuses = statuses or {}
    items: list[ChecklistItem] = []
    for b in result.exclusions:
        cls = "unmeasured-confounding" if b.pathway_kind == "bidirected-latent" else "direct-pathway"
        status, note = statuses.get(b.id, ("open", ""))
        items.append(ChecklistItem(b.id, _statement_for_exclusion(result, b), cls, status, note))
    for m in result.misdirections:
        cls, focus = _classify_misdirection(result, m)
        status, note = statuses.get(m.id, ("open", ""))
        items.append(
            ChecklistItem(m.id, _statement_for_misdirection(result, m, cls, focus), cls, status, note)
        )
    return items


def checklist_markdown(items: Sequence[ChecklistItem]) -> str:
    lines = ["# Assumption checklist", ""]
    for i, item in enumerate(items, 1):
        lines.append(f"{i}. **[{item.status}]** {item.statement} (`{item.id}`, {item.classification})")
        if item.note:
            for note_line in item.note.splitlines():
                lines.append(f"   > {note_line}")
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------
# JSON


def _node_dict(n: NodeSpec) -> dict:
    d: dict[str, Any] = {"name": n.name, "role": n.role}
    if n.pos is not None:
        d["pos"] = [n.pos[0], n.pos[1]]
    return d


def _edge_dict(e: EdgeSpec) -> dict:
    return {"from": e.tail, "to": e.head, "fixed": e.fixed}


def _reason_dict(r: ChangeReason) -> dict:
    return {"kind": r.kind, "detail": r.detail}


def result_to_dict(
    result: AuditResult,
    statuses: Optional[Mapping[str, tuple[str, str]]] = None,
    include_rejected: Optional[bool] = None,
) -> dict:
    root = result.root
    e = root.estimand
    doc: dict[str, Any] = {
        "root": {
            "nodes": [_node_dict(n) for n in root.nodes],
            "edges": [_edge_dict(x) for x in root.edges],
            "estimand": {
                "exposure": e.exposure,
                "outcome": e.outcome,
                "adjusted_set": sorted(e.adjusted_set),
                "effect_type": e.effect_type,
                "iv_mode": e.iv_mode,
                "instrument": e.instrument,
            },
            "known_omitted": [
                {"name": k.name, "pair": [k.pair[0], k.pair[1]], "kind": k.kind}
                for k in root.known_omitted
            ],
        },
        "exclusions": [
            {
                "id": b.id,
                "pair": [b.pair[0], b.pair[1]],
                "pathway_kind": b.pathway_kind,
                "reason": _reason_dict(b.reason),
                "known_members": list(b.known_members),
            }
            for b in result.exclusions
        ],
        "misdirections": [
            {
                "id": m.id,
                "flips": [[t, h] for t, h in m.flips],
                "reason": _reason_dict(m.reason),
            }
            for m in result.misdirections
        ],
        "checklist": [
            {
                "id": item.id,
                "statement": item.statement,
                "classification": item.classification,
                "status": item.status,
                "note": item.note,
            }
            for item in checklist(result, statuses)
        ],
    }
    if include_rejected is None:
        include_rejected = bool(result.rejected)
    if include_rejected:
        doc["rejected"] = [
            {
                "kind": rc.kind,
                "candidate": _delta_dict(rc.delta),
                "reason": {"code": rc.rejection.code, "detail": rc.rejection.detail},
                **({"member": rc.member} if rc.member else {}),
            }
            for rc in result.rejected
        ]
    return doc


def _delta_dict(delta: Any) -> dict:
    if isinstance(delta, AddedPathway):
        return {"type": "added-pathway", "from": delta.tail, "to": delta.head, "kind": delta.kind}
    return {"type": "flip-set", "flips": [[t, h] for t, h in delta.flips]}


def result_to_json(
    result: AuditResult,
    statuses: Optional[Mapping[str, tuple[str, str]]] = None,
    include_rejected: Optional[bool] = None,
) -> str:
    return json.dumps(
        result_to_dict(result, statuses, include_rejected),
        indent=2,
        sort_keys=True,
        ensure_ascii=False,
    ) + "\n"


def _delta_from_dict(d: Mapping[str, Any]) -> Any:
    if d["type"] == "added-pathway":
        return AddedPathway(d["from"], d["to"], d["kind"])
    return FlipSet(tuple((t, h) for t, h in d["flips"]))


def result_from_json(text: str) -> tuple[AuditResult, dict[str, tuple[str, str]]]:
    """Rebuild a result and its checklist statuses from :func:`result_to_json`
    output. Branch ids are recomputed from content and must match."""
    doc = json.loads(text)
    r = doc["root"]
    est = r["estimand"]
    root = RootDag(
        nodes=tuple(
            NodeSpec(
                n["name"],
                n["role"],
                tuple(n["pos"]) if n.get("pos") is not None else None,
            )
            for n in r["nodes"]
        ),
        edges=tuple(EdgeSpec(x["from"], x["to"], "directed", x["fixed"]) for x in r["edges"]),
        estimand=Estimand(
            est["exposure"],
            est["outcome"],
            frozenset(est["adjusted_set"]),
            est["effect_type"],
            est["iv_mode"],
            est.get("instrument"),
        ),
        known_omitted=tuple(
            KnownOmitted(k["name"], (k["pair"][0], k["pair"][1]), k["kind"])
            for k in r.get("known_omitted", [])
        ),
    )
    exclusions = []
    for b in doc["exclusions"]:
        delta = AddedPathway(b["pair"][0], b["pair"][1], b["pathway_kind"])
        rebuilt = ExclusionBranch(
            branch_id("exclusion", delta),
            (b["pair"][0], b["pair"][1]),
            b["pathway_kind"],
            delta,
            ChangeReason(b["reason"]["kind"], b["reason"]["detail"]),
            tuple(b["known_members"]),
        )
        if rebuilt.id != b["id"]:
            raise ValueError(f"branch id {b['id']} does not match its content")
        exclusions.append(rebuilt)
    misdirections = []
    for m in doc["misdirections"]:
        flips = tuple((t, h) for t, h in m["flips"])
        rebuilt_m = MisdirectionBranch(
            branch_id("misdirection", FlipSet(flips)),
            flips,
            ChangeReason(m["reason"]["kind"], m["reason"]["detail"]),
        )
        if rebuilt_m.id != m["id"]:
            raise ValueError(f"branch id {m['id']} does not match its content")
        misdirections.append(rebuilt_m)
    rejected = tuple(
        RejectedCandidate(
            rc["kind"],
            _delta_from_dict(rc["candidate"]),
            Rejection(rc["reason"]["code"], rc["reason"]["detail"]),
            rc.get("member"),
        )
        for rc in doc.get("rejected", [])
    )
    statuses = {
        item["id"]: (item["status"], item["note"]) for item in doc.get("checklist", [])
    }
    result = AuditResult(root, tuple(exclusions), tuple(misdirections), rejected)
    return result, statuses

"""Branch scenario generation.

A branch is a minimal modification of the root graph that passes a
three-condition ruleset: it must actually modify the graph, the result must
be acyclic, and it must change what the implemented analysis identifies.
"Change identification" means the root's own adjusted set stops (or starts)
being a sufficient adjustment set for the estimand, the number of directed
exposure-to-outcome paths changes, or, for instrumental-variable analyses,
instrument validity flips.

Two families are generated:

* exclusions: for every unordered node pair, a directed edge in each
  direction plus one bidirected-latent pathway are proposed. Accepted
  candidates become supersets keyed by endpoints and pathway kind; analyst
  declared known-omitted pathways join matching supersets as named members,
  alongside the implicit unknown residual member.

* misdirections: for every non-fixed root edge, an iterative-deepening
  search over flip chains. A chain starts by flipping the originating edge
  and extends only by flipping an unflipped, non-fixed edge attached to the
  newly downstream node (the former tail of the edge just flipped). All
  chains at the smallest flip count that passes the ruleset are kept;
  deeper chains for that edge are not explored.

Candidate evaluation is a pure function of (root, delta), so callers may
fan evaluations out to parallel workers; results are merged here in a fixed
canonical order regardless of evaluation order.
"""
from __future__ import annotations

import hashlib
from dataclasses import dataclass, field
from itertools import combinations
from typing import Any, Iterable, Optional, Union

from . import ident, parser
from .model import EdgeSpec, Estimand, KnownOmitted, RootDag

UNKNOWN_MEMBER = "unknown"


@dataclass(frozen=True)
class AddedPathway:
    """Exclusion delta: one new directed edge or bidirected-latent pathway."""

    tail: str
    head: str
    kind: str  # directed | bidirected-latent

    @property
    def pair(self) -> tuple[str, str]:
        if self.kind == "bidirected-latent":
            return tuple(sorted((self.tail, self.head)))  # type: ignore[return-value]
        return (self.tail, self.head)


@dataclass(frozen=True)
class FlipSet:
    """Misdirection delta: root-orientation edges to reverse, in chain order."""

    flips: tuple[tuple[str, str], ...]


Delta = Union[AddedPathway, FlipSet]


@dataclass(frozen=True)
class ChangeReason:
    """Why a candidate changes identification, with before/after evidence."""

    kind: str  # adjustment-set-change | frontdoor-count-change | iv-validity-change
    detail: dict = field(default_factory=dict)


@dataclass(frozen=True)
class Rejection:
    code: str  # no-modification | cyclic | no-change
    detail: dict = field(default_factory=dict)


@dataclass(frozen=True)
class RejectedCandidate:
    kind: str  # exclusion | misdirection | known-omitted
    delta: Delta
    rejection: Rejection
    member: Optional[str] = None  # set for known-omitted entries


@dataclass(frozen=True)
class ExclusionBranch:
    """One exclusion superset: the unknown residual plus any known members."""

    id: str
    pair: tuple[str, str]
    pathway_kind: str
    delta: AddedPathway
    reason: ChangeReason
    known_members: tuple[str, ...] = ()

    @property
    def members(self) -> tuple[str, ...]:
        return self.known_members + (UNKNOWN_MEMBER,)


@dataclass(frozen=True)
class MisdirectionBranch:
    id: str
    flips: tuple[tuple[str, str], ...]
    reason: ChangeReason

    @property
    def flip_set(self) -> frozenset[tuple[str, str]]:
        return frozenset(self.flips)


@dataclass(frozen=True)
class AuditResult:
    root: RootDag
    exclusions: tuple[ExclusionBranch, ...]
    misdirections: tuple[MisdirectionBranch, ...]
    rejected: tuple[RejectedCandidate, ...] = ()

    def branch_count(self) -> int:
        """Branches counted the way an analyst reads them: one per exclusion
        member (known members and the unknown residual separately) plus one
        per misdirection."""
        return sum(len(b.members) for b in self.exclusions) + len(self.misdirections)

    def branch_ids(self) -> tuple[str, ...]:
        return tuple(b.id for b in self.exclusions) + tuple(b.id for b in self.misdirections)

    def find_branch(self, branch_id: str) -> Union[ExclusionBranch, MisdirectionBranch]:
        for b in self.exclusions:
            if b.id == branch_id:
                return b
        for b in self.misdirections:
            if b.id == branch_id:
                return b
        raise KeyError(branch_id)


def branch_id(kind: str, delta: Delta) -> str:
    """Stable content hash so ids survive regeneration across sessions."""
    if isinstance(delta, AddedPathway):
        a, b = delta.pair
        parts = ("exclusion", delta.kind, a, b)
    else:
        parts = ("misdirection",) + tuple(f"{t}->{h}" for t, h in sorted(delta.flips))
    digest = hashlib.sha256("|".join(parts).encode("utf-8")).hexdigest()
    return digest[:12]


def realize(root: RootDag, delta: Delta) -> ident.Graph:
    """The graph a candidate stands for: root plus the delta."""
    g = ident.graph_from_root(root)
    if isinstance(delta, AddedPathway):
        for endpoint in (delta.tail, delta.head):
            if endpoint not in root.node_names:
                raise ValueError(f"candidate references unknown node {endpoint!r}")
        if delta.kind == "bidirected-latent":
            return g.with_bidirected(delta.tail, delta.head)
        if (delta.tail, delta.head) in g.edges:
            return g  # unchanged; evaluation reports no-modification
        return g.with_edge(delta.tail, delta.head)
    if not delta.flips:
        raise ValueError("empty flip set")
    return g.with_flips(delta.flips)


def _root_baseline(root: RootDag) -> dict:
    g = ident.graph_from_root(root)
    e = root.estimand
    base: dict[str, Any] = {"frontdoor": ident.frontdoor_count(g, e)}
    if e.iv_mode:
        base["iv_valid"] = ident.iv_conditions_hold(g, e)
    else:
        base["sufficient"] = ident.is_sufficient_adjustment(g, e, e.adjusted_set)
    return base


# Minimal-set enumeration is exponential in the covariate count; the reason
# payload skips it beyond this size (the accept decision never needs it).
_DETAIL_ENUMERATION_CAP = 12


def _minimal_sets_detail(g: ident.Graph, e: Estimand) -> Optional[list[list[str]]]:
    if len(g.nodes) - 2 > _DETAIL_ENUMERATION_CAP:
        return None
    return sorted(sorted(s) for s in ident.minimal_sufficient_sets(g, e))


def evaluate_candidate(
    root: RootDag, delta: Delta, _baseline: Optional[dict] = None
) -> Union[ChangeReason, Rejection]:
    """Apply the three-condition ruleset to one candidate.

    Returns a :class:`ChangeReason` when accepted, a :class:`Rejection`
    (no-modification, cyclic, or no-change) otherwise. When both an
    identification-criterion change and a frontdoor-count change hold, the
    criterion change is reported, except when the realized graph has no
    directed exposure-to-outcome path left at all: with the causal pathway
    gone there is no adjustment question to ask, so the vanished path count
    is the informative reason.
    """
    e = root.estimand
    g_root = ident.graph_from_root(root)
    realized = realize(root, delta)
    if realized == g_root:
        return Rejection("no-modification")
    if not ident.is_acyclic(realized):
        return Rejection("cyclic")

    base = _baseline if _baseline is not None else _root_baseline(root)
    fd_before = base["frontdoor"]
    fd_after = ident.frontdoor_count(realized, e)
    fd_changed = fd_after != fd_before

    if e.iv_mode:
        iv_before = base["iv_valid"]
        iv_after = ident.iv_conditions_hold(realized, e)
        if iv_after != iv_before and not (fd_changed and fd_after == 0):
            return ChangeReason("iv-validity-change", {"before": iv_before, "after": iv_after})
        if fd_changed:
            return ChangeReason("frontdoor-count-change", {"before": fd_before, "after": fd_after})
        return Rejection("no-change", {"frontdoor": fd_after, "iv_valid": iv_after})

    suff_before = base["sufficient"]
    suff_after = ident.is_sufficient_adjustment(realized, e, e.adjusted_set)
    adj_changed = suff_after != suff_before
    if adj_changed and not (fd_changed and fd_after == 0):
        return ChangeReason(
            "adjustment-set-change",
            {
                "before": _minimal_sets_detail(g_root, e),
                "after": _minimal_sets_detail(realized, e),
            },
        )
    if fd_changed:
        return ChangeReason("frontdoor-count-change", {"before": fd_before, "after": fd_after})
    return Rejection("no-change", {"frontdoor": fd_after, "sufficient": suff_after})


def _exclusion_deltas(root: RootDag) -> list[AddedPathway]:
    out = []
    for a, b in combinations(sorted(root.node_names), 2):
        out.append(AddedPathway(a, b, "directed"))
        out.append(AddedPathway(b, a, "directed"))
        out.append(AddedPathway(a, b, "bidirected-latent"))
    return out


def generate_exclusions(
    root: RootDag, audit: bool = False
) -> tuple[tuple[ExclusionBranch, ...], tuple[RejectedCandidate, ...]]:
    """Evaluate the three candidate pathways for every node pair."""
    baseline = _root_baseline(root)
    accepted: list[ExclusionBranch] = []
    rejected: list[RejectedCandidate] = []
    for delta in _exclusion_deltas(root):
        verdict = evaluate_candidate(root, delta, baseline)
        if isinstance(verdict, ChangeReason):
            accepted.append(
                ExclusionBranch(branch_id("exclusion", delta), delta.pair, delta.kind, delta, verdict)
            )
        elif audit:
            rejected.append(RejectedCandidate("exclusion", delta, verdict))
    accepted.sort(key=lambda b: (b.pair, b.pathway_kind))
    return tuple(accepted), tuple(rejected)


def _incident_edges(edges: Iterable[tuple[str, str]], node: str) -> list[tuple[str, str]]:
    return sorted(e for e in edges if node in e)


def _chains_at_depth(
    root: RootDag, origin: tuple[str, str], depth: int
) -> list[tuple[tuple[str, str], ...]]:
    """All flip chains of exactly ``depth`` edges starting at ``origin``.

    After flipping (u, v) the newly downstream node is u; the chain may
    continue only through an unflipped, non-fixed root edge incident to that
    node. Chains that flip the same edge set in a different order realize the
    same graph, so only the first ordering (in DFS order) is kept.
    """
    free = {e.pair for e in root.edges if not e.fixed}
    chains: list[tuple[tuple[str, str], ...]] = []
    seen_sets: set[frozenset[tuple[str, str]]] = set()

    def extend(chain: list[tuple[str, str]], focus: str) -> None:
        if len(chain) == depth:
            key = frozenset(chain)
            if key not in seen_sets:
                seen_sets.add(key)
                chains.append(tuple(chain))
            return
        for edge in _incident_edges(free, focus):
            if edge in chain:
                continue
            chain.append(edge)
            extend(chain, edge[0])
            chain.pop()

    if origin in free:
        extend([origin], origin[0])
    return chains


def generate_misdirections(
    root: RootDag, audit: bool = False
) -> tuple[tuple[MisdirectionBranch, ...], tuple[RejectedCandidate, ...]]:
    """Minimal-flip misdirection search for every non-fixed root edge.

    Iterative deepening guarantees the emitted flip sets use the minimum
    number of flips for their originating edge, and every minimal-depth
    solution is kept. Results are deduplicated across originating edges by
    flip set, which determines the realized graph.
    """
    baseline = _root_baseline(root)
    max_depth = len(root.edges)
    accepted: list[MisdirectionBranch] = []
    rejected: list[RejectedCandidate] = []
    seen: set[frozenset[tuple[str, str]]] = set()
    for edge in root.edges:
        if edge.fixed:
            continue
        for depth in range(1, max_depth + 1):
            hits: list[MisdirectionBranch] = []
            for chain in _chains_at_depth(root, edge.pair, depth):
                delta = FlipSet(chain)
                verdict = evaluate_candidate(root, delta, baseline)
                if isinstance(verdict, ChangeReason):
                    hits.append(MisdirectionBranch(branch_id("misdirection", delta), chain, verdict))
                elif audit:
                    rejected.append(RejectedCandidate("misdirection", delta, verdict))
            if hits:
                for b in hits:
                    if b.flip_set not in seen:
                        seen.add(b.flip_set)
                        accepted.append(b)
                break
    return tuple(accepted), tuple(rejected)


def attach_known_omitted(
    result: AuditResult, registry: Optional[tuple[KnownOmitted, ...]] = None
) -> AuditResult:
    """File analyst-declared omitted pathways into the exclusion supersets.

    A registry entry matching a superset's endpoints and pathway kind joins
    it as a named member; the unknown residual member is always retained. An
    entry with no matching superset is evaluated on its own: if it passes the
    ruleset it founds a new superset, otherwise it is recorded as a
    non-threatening known pathway in the audit log.
    """
    entries = registry if registry is not None else result.root.known_omitted
    if not entries:
        return result
    baseline = _root_baseline(result.root)
    by_key = {(b.pair, b.pathway_kind): b for b in result.exclusions}
    rejected = list(result.rejected)
    for entry in sorted(entries, key=lambda k: k.name):
        pair = tuple(sorted(entry.pair)) if entry.kind == "bidirected-latent" else entry.pair
        key = (pair, entry.kind)
        if key in by_key:
            b = by_key[key]
            by_key[key] = ExclusionBranch(
                b.id, b.pair, b.pathway_kind, b.delta, b.reason, b.known_members + (entry.name,)
            )
            continue
        delta = AddedPathway(entry.pair[0], entry.pair[1], entry.kind)
        verdict = evaluate_candidate(result.root, delta, baseline)
        if isinstance(verdict, ChangeReason):
            by_key[key] = ExclusionBranch(
                branch_id("exclusion", delta), delta.pair, delta.kind, delta, verdict, (entry.name,)
            )
        else:
            rejected.append(RejectedCandidate("known-omitted", delta, verdict, member=entry.name))
    exclusions = tuple(sorted(by_key.values(), key=lambda b: (b.pair, b.pathway_kind)))
    return AuditResult(result.root, exclusions, result.misdirections, tuple(rejected))


def generate(root: RootDag, audit: bool = False) -> AuditResult:
    """Full audit: exclusions, misdirections, known-omitted attachment.

    Deterministic for identical input. Requires an error-free root; warnings
    are the caller's business.
    """
    parser.require_valid(root)
    exclusions, rej_e = generate_exclusions(root, audit)
    misdirections, rej_m = generate_misdirections(root, audit)
    result = AuditResult(root, exclusions, misdirections, rej_e + rej_m)
    result = attach_known_omitted(result)
    realized = [realize(root, b.delta) for b in result.exclusions]
    realized += [realize(root, FlipSet(b.flips)) for b in result.misdirections]
    assert len(set((g.edges, g.bidirected) for g in realized)) == len(realized), (
        "duplicate realized graphs in result"
    )
    return result

"""Graph identification primitives.

Everything here works on :class:`Graph`, a plain directed graph plus a set of
bidirected-latent pairs. Each bidirected pair (x, z) is treated exactly as an
explicit latent node with edges into both endpoints; latent nodes are never
conditionable and never count as observed.

d-separation follows the reachability formulation of Koller & Friedman
(Probabilistic Graphical Models, alg. 3.1); the adjustment checks are Pearl's
backdoor criterion for total effects and single-door criterion for direct
effects (Causality, 2009).
"""
from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from functools import lru_cache
from itertools import combinations
from typing import FrozenSet, Iterable, Optional

from .model import Estimand, RootDag

# Parenthesised latent names cannot collide with parsed node names, which are
# restricted to [A-Za-z0-9_.].
def latent_name(a: str, b: str) -> str:
    lo, hi = sorted((a, b))
    return f"U({lo},{hi})"


@dataclass(frozen=True)
class Graph:
    """Immutable directed graph with optional bidirected-latent pairs."""

    nodes: tuple[str, ...]
    edges: frozenset[tuple[str, str]]
    bidirected: frozenset[tuple[str, str]] = frozenset()

    # Derived adjacency over observed nodes plus expanded latents; excluded
    # from equality so two graphs compare by structure alone.
    _parents: dict = field(default_factory=dict, compare=False, repr=False)
    _children: dict = field(default_factory=dict, compare=False, repr=False)

    def __post_init__(self) -> None:
        object.__setattr__(self, "nodes", tuple(sorted(set(self.nodes))))
        known = set(self.nodes)
        for t, h in self.edges:
            if t == h:
                raise ValueError(f"self-loop on {t}")
            if t not in known or h not in known:
                raise ValueError(f"edge {t} -> {h} references an undeclared node")
        for pair in self.bidirected:
            if pair[0] == pair[1]:
                raise ValueError(f"bidirected pair with identical endpoints {pair[0]}")
            if pair[0] not in known or pair[1] not in known:
                raise ValueError(f"bidirected pair {pair} references an undeclared node")
        object.__setattr__(
            self, "bidirected", frozenset(tuple(sorted(p)) for p in self.bidirected)
        )
        parents: dict[str, list[str]] = {n: [] for n in self.nodes}
        children: dict[str, list[str]] = {n: [] for n in self.nodes}
        for t, h in sorted(self.edges):
            parents[h].append(t)
            children[t].append(h)
        for a, b in sorted(self.bidirected):
            u = latent_name(a, b)
            parents[u] = []
            children[u] = sorted((a, b))
            parents[a].append(u)
            parents[b].append(u)
        for adj in (parents, children):
            for k in adj:
                adj[k] = sorted(adj[k])
        object.__setattr__(self, "_parents", parents)
        object.__setattr__(self, "_children", children)

    # -- expanded view -------------------------------------------------
    @property
    def latents(self) -> tuple[str, ...]:
        return tuple(latent_name(a, b) for a, b in sorted(self.bidirected))

    @property
    def all_nodes(self) -> tuple[str, ...]:
        return tuple(sorted(self._parents))

    def is_latent(self, name: str) -> bool:
        return name not in set(self.nodes)

    def parents(self, name: str) -> list[str]:
        return self._parents[name]

    def children(self, name: str) -> list[str]:
        return self._children[name]

    # -- rewriting helpers ---------------------------------------------
    def with_edge(self, tail: str, head: str) -> "Graph":
        return Graph(self.nodes, self.edges | {(tail, head)}, self.bidirected)

    def with_bidirected(self, a: str, b: str) -> "Graph":
        return Graph(self.nodes, self.edges, self.bidirected | {tuple(sorted((a, b)))})

    def without_edge(self, tail: str, head: str) -> "Graph":
        return Graph(self.nodes, self.edges - {(tail, head)}, self.bidirected)

    def without_outgoing(self, node: str) -> "Graph":
        kept = frozenset(e for e in self.edges if e[0] != node)
        return Graph(self.nodes, kept, self.bidirected)

    def with_flips(self, flips: Iterable[tuple[str, str]]) -> "Graph":
        flipped = set(flips)
        missing = flipped - set(self.edges)
        if missing:
            raise ValueError(f"cannot flip edges absent from the graph: {sorted(missing)}")
        edges = {(h, t) if (t, h) in flipped else (t, h) for t, h in self.edges}
        return Graph(self.nodes, frozenset(edges), self.bidirected)


def graph_from_root(root: RootDag) -> Graph:
    return Graph(root.node_names, frozenset(e.pair for e in root.edges))


def is_acyclic(g: Graph) -> bool:
    """Kahn's algorithm over the directed part; latents are sources and never
    participate in cycles."""
    indeg = {n: 0 for n in g.all_nodes}
    for n in g.all_nodes:
        for c in g.children(n):
            indeg[c] += 1
    queue = deque(n for n, d in sorted(indeg.items()) if d == 0)
    seen = 0
    while queue:
        n = queue.popleft()
        seen += 1
        for c in g.children(n):
            indeg[c] -= 1
            if indeg[c] == 0:
                queue.append(c)
    return seen == len(g.all_nodes)


def topological_order(g: Graph) -> list[str]:
    indeg = {n: 0 for n in g.all_nodes}
    for n in g.all_nodes:
        for c in g.children(n):
            indeg[c] += 1
    queue = deque(n for n, d in sorted(indeg.items()) if d == 0)
    order = []
    while queue:
        n = queue.popleft()
        order.append(n)
        for c in g.children(n):
            indeg[c] -= 1
            if indeg[c] == 0:
                queue.append(c)
    if len(order) != len(g.all_nodes):
        raise ValueError("graph is cyclic")
    return order


def descendants(g: Graph, node: str) -> set[str]:
    """All nodes reachable from ``node`` by directed edges, excluding itself."""
    out: set[str] = set()
    stack = [node]
    while stack:
        n = stack.pop()
        for c in g.children(n):
            if c not in out:
                out.add(c)
                stack.append(c)
    out.discard(node)
    return out


def ancestors(g: Graph, node: str) -> set[str]:
    out: set[str] = set()
    stack = [node]
    while stack:
        n = stack.pop()
        for p in g.parents(n):
            if p not in out:
                out.add(p)
                stack.append(p)
    out.discard(node)
    return out


def d_separated(g: Graph, x: str, y: str, s: Iterable[str] = ()) -> bool:
    """True iff every path between ``x`` and ``y`` is blocked given ``s``.

    Chains and forks are blocked when their middle node is conditioned on;
    colliders are blocked unless the collider or one of its descendants is
    conditioned on. Runs in linear time via active-trail reachability.
    """
    cond = frozenset(s)
    if not is_acyclic(g):
        raise ValueError("d-separation requires an acyclic graph")
    for n in (x, y):
        if n not in g._parents:
            raise ValueError(f"unknown node {n!r}")
        if n in cond:
            raise ValueError(f"cannot condition on endpoint {n!r}")
    for n in cond:
        if n not in g._parents:
            raise ValueError(f"unknown node {n!r} in conditioning set")
        if g.is_latent(n):
            raise ValueError(f"cannot condition on latent node {n!r}")
    if x == y:
        raise ValueError("endpoints must differ")

    # Nodes with a descendant in the conditioning set (including the set
    # itself) activate colliders.
    anc_s = set(cond)
    stack = list(cond)
    while stack:
        n = stack.pop()
        for p in g.parents(n):
            if p not in anc_s:
                anc_s.add(p)
                stack.append(p)

    # (node, came_from_child) states; starting at x behaves as if entered
    # from a virtual child, so both directions are open.
    frontier: deque[tuple[str, bool]] = deque([(x, True)])
    visited: set[tuple[str, bool]] = set()
    while frontier:
        n, from_child = frontier.popleft()
        if (n, from_child) in visited:
            continue
        visited.add((n, from_child))
        if n == y:
            return False
        if from_child:
            if n not in cond:
                for p in g.parents(n):
                    frontier.append((p, True))
                for c in g.children(n):
                    frontier.append((c, False))
        else:
            if n not in cond:
                for c in g.children(n):
                    frontier.append((c, False))
            if n in anc_s:
                for p in g.parents(n):
                    frontier.append((p, True))
    return True


def directed_paths(g: Graph, src: str, dst: str) -> list[tuple[str, ...]]:
    """All distinct directed paths src -> ... -> dst, in lexicographic order.

    The length of this list is the frontdoor path count used by the branch
    ruleset.
    """
    if src not in g._parents or dst not in g._parents:
        raise ValueError("unknown endpoint")
    if not is_acyclic(g):
        raise ValueError("path enumeration requires an acyclic graph")
    found: list[tuple[str, ...]] = []
    path = [src]

    def walk(n: str) -> None:
        if n == dst:
            found.append(tuple(path))
            return
        for c in g.children(n):
            path.append(c)
            walk(c)
            path.pop()

    walk(src)
    return found


def frontdoor_count(g: Graph, e: Estimand) -> int:
    return len(directed_paths(g, e.exposure, e.outcome))


def is_sufficient_adjustment(g: Graph, e: Estimand, s: Iterable[str] = ()) -> bool:
    """Whether ``s`` identifies the estimand's effect by plain adjustment.

    Total effects use the backdoor criterion: no member of ``s`` may descend
    from the exposure, and ``s`` must block every path into the exposure
    reaching the outcome (checked by d-separation with the exposure's outgoing
    edges removed). Direct effects use the single-door criterion: no member of
    ``s`` may descend from the outcome, and ``s`` must d-separate exposure and
    outcome once the direct exposure->outcome edge is removed.
    """
    cond = frozenset(s)
    if e.exposure not in g._parents or e.outcome not in g._parents:
        raise ValueError("estimand nodes missing from graph")
    for n in cond:
        if n not in g._parents:
            raise ValueError(f"unknown node {n!r} in adjustment set")
        if g.is_latent(n):
            raise ValueError(f"latent node {n!r} cannot be adjusted for")
    if e.exposure in cond or e.outcome in cond:
        return False
    if e.effect_type == "total":
        if cond & descendants(g, e.exposure):
            return False
        return d_separated(g.without_outgoing(e.exposure), e.exposure, e.outcome, cond)
    if cond & descendants(g, e.outcome):
        return False
    cut = g
    if (e.exposure, e.outcome) in g.edges:
        cut = g.without_edge(e.exposure, e.outcome)
    return d_separated(cut, e.exposure, e.outcome, cond)


def minimal_sufficient_sets(
    g: Graph, e: Estimand, max_observed: int = 20
) -> frozenset[frozenset[str]]:
    """All minimal sufficient adjustment sets among observed non-estimand nodes.

    Exhaustive by design: root graphs are small, and brute force keeps the
    result trivially trustworthy. Graphs with more than ``max_observed``
    candidate nodes are rejected rather than silently truncated.
    """
    candidates = sorted(set(g.nodes) - {e.exposure, e.outcome})
    if len(candidates) > max_observed:
        raise ValueError(
            f"refusing subset enumeration over {len(candidates)} nodes (cap {max_observed})"
        )
    minimal: list[frozenset[str]] = []
    for size in range(len(candidates) + 1):
        for combo in combinations(candidates, size):
            s = frozenset(combo)
            if any(m < s for m in minimal):
                continue
            if is_sufficient_adjustment(g, e, s):
                minimal.append(s)
    return frozenset(minimal)


def iv_conditions_hold(g: Graph, e: Estimand) -> bool:
    """Instrument validity: relevance plus exclusion/exchangeability.

    The instrument must be d-connected to the exposure given the adjusted set,
    and d-separated from the outcome given the adjusted set once every edge
    out of the exposure is deleted.
    """
    if not e.iv_mode or e.instrument is None:
        raise ValueError("estimand does not declare an instrument")
    z = e.instrument
    cond = frozenset(e.adjusted_set)
    if z in cond:
        raise ValueError("instrument cannot be in the adjusted set")
    if d_separated(g, z, e.exposure, cond):
        return False
    return d_separated(g.without_outgoing(e.exposure), z, e.outcome, cond)

"""Independent brute-force oracles and random generators for the test suite.

Everything here deliberately avoids the production algorithms: separation is
checked by walking every simple undirected path, path counts by dynamic
programming over a topological order, and flip minimality by enumerating
every admissible flip chain directly.
"""
from __future__ import annotations

import random
from itertools import combinations

from dagaudit import branchgen, ident
from dagaudit.model import EdgeSpec, NodeSpec, RootDag
from dagaudit.parser import infer_estimand_parts


def path_walk_d_separated(g: ident.Graph, x: str, y: str, s) -> bool:
    """Enumerate all simple undirected paths and apply the blocking rules."""
    cond = set(s)
    desc_cache: dict[str, set] = {}

    def desc(n: str) -> set:
        if n not in desc_cache:
            desc_cache[n] = ident.descendants(g, n)
        return desc_cache[n]

    neighbors: dict[str, set] = {n: set() for n in g.all_nodes}
    for n in g.all_nodes:
        for c in g.children(n):
            neighbors[n].add(c)
            neighbors[c].add(n)

    def path_open(path: list[str]) -> bool:
        for i in range(1, len(path) - 1):
            prev, mid, nxt = path[i - 1], path[i], path[i + 1]
            into_prev = mid in g.children(prev)
            into_next = mid in g.children(nxt)
            if into_prev and into_next:  # collider
                if mid not in cond and not (desc(mid) & cond):
                    return False
            else:  # chain or fork
                if mid in cond:
                    return False
        return True

    stack = [[x]]
    while stack:
        path = stack.pop()
        tip = path[-1]
        if tip == y:
            if path_open(path):
                return False
            continue
        for nb in sorted(neighbors[tip]):
            if nb not in path:
                stack.append(path + [nb])
    return True


def dp_path_count(g: ident.Graph, src: str, dst: str) -> int:
    counts = {n: 0 for n in g.all_nodes}
    counts[src] = 1
    for n in ident.topological_order(g):
        if counts[n] == 0:
            continue
        for c in g.children(n):
            counts[c] += counts[n]
    return counts[dst]


def chain_flip_solutions(
    root: RootDag, origin: tuple[str, str]
) -> tuple[int | None, set[frozenset]]:
    """Minimal passing flip count for one originating edge, by enumerating
    every admissible chain of every length outright (no early termination).

    A chain starts at ``origin`` and each later flip must touch the previous
    flip's newly downstream node (the former tail). Returns (None, {}) when
    no chain of any length passes.
    """
    free = {e.pair for e in root.edges if not e.fixed}
    if origin not in free:
        return None, set()
    by_len: dict[int, set[frozenset]] = {}

    def walk(chain: list[tuple[str, str]], focus: str) -> None:
        verdict = branchgen.evaluate_candidate(root, branchgen.FlipSet(tuple(chain)))
        if isinstance(verdict, branchgen.ChangeReason):
            by_len.setdefault(len(chain), set()).add(frozenset(chain))
        for edge in sorted(free):
            if focus in edge and edge not in chain:
                chain.append(edge)
                walk(chain, edge[0])
                chain.pop()

    walk([origin], origin[0])
    if not by_len:
        return None, set()
    best = min(by_len)
    return best, by_len[best]


def brute_force_exclusions(root: RootDag) -> set[tuple[tuple[str, str], str]]:
    """Accepted (pair, kind) keys by independent evaluation of every pair."""
    out = set()
    for a, b in combinations(sorted(root.node_names), 2):
        for delta in (
            branchgen.AddedPathway(a, b, "directed"),
            branchgen.AddedPathway(b, a, "directed"),
            branchgen.AddedPathway(a, b, "bidirected-latent"),
        ):
            verdict = branchgen.evaluate_candidate(root, delta)
            if isinstance(verdict, branchgen.ChangeReason):
                out.add((delta.pair, delta.kind))
    return out


def random_root(
    rng: random.Random,
    max_nodes: int = 6,
    max_edges: int = 8,
    allow_fixed: bool = False,
    allow_instrument: bool = False,
) -> RootDag:
    """A random acyclic root: exposure A, outcome Y, adjusted covariates."""
    n_cov = rng.randint(0, max_nodes - 2)
    covs = [f"C{i}" for i in range(1, n_cov + 1)]
    names = ["A", "Y"] + covs
    order = names[:]
    rng.shuffle(order)
    possible = [(order[i], order[j]) for i in range(len(order)) for j in range(i + 1, len(order))]
    rng.shuffle(possible)
    k = rng.randint(0, min(max_edges, len(possible)))
    chosen = sorted(possible[:k])
    edges = tuple(
        EdgeSpec(t, h, "directed", allow_fixed and rng.random() < 0.2) for t, h in chosen
    )
    instrument = None
    roles = {c: "adjusted" for c in covs}
    if allow_instrument and covs:
        cand = covs[0]
        graph = ident.Graph(tuple(names), frozenset(e.pair for e in edges))
        if "A" in ident.descendants(graph, cand):
            roles[cand] = "instrument"
            instrument = cand
    nodes = tuple(
        [NodeSpec("A", "exposure"), NodeSpec("Y", "outcome")]
        + [NodeSpec(c, roles[c]) for c in covs]
    )
    graph = ident.Graph(tuple(names), frozenset(e.pair for e in edges))
    adjusted = frozenset(c for c in covs if roles[c] == "adjusted")
    estimand = infer_estimand_parts(graph, "A", "Y", adjusted, instrument)
    return RootDag(nodes, edges, estimand)


def random_clean_root(rng: random.Random, **kwargs) -> RootDag:
    """A random root with no validation findings at all (the kind of root the
    framework treats as passing muster)."""
    from dagaudit.parser import validate_root

    while True:
        root = random_root(rng, **kwargs)
        if not validate_root(root):
            return root

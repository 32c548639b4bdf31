"""Parse, validate and emit the root-graph text format.

The format is a dagitty-compatible subset with a few extensions::

    graph     := "dag" "{" statement* "}"
    statement := node_decl | edge_decl
    node_decl := NAME ("[" attr ("," attr)* "]")?
    edge_decl := NAME "->" NAME ("[" "fixed" "]")?
    attr      := exposure | outcome | adjusted | instrument | omitted
               | pos="x,y" | effect="total"|"direct"

Names use [A-Za-z0-9_.]+. Comments run from "#" to end of line; whitespace
and stray semicolons are insignificant. Nodes marked ``omitted`` declare
known omitted pathways: together with their incident edges they are stripped
from the root graph and filed in the known-omitted registry. ``effect`` may
only appear on the exposure node and overrides the inferred effect type.

Emission is canonical: nodes sorted lexicographically, then edges sorted by
(tail, head), two-space indentation. Parsing the emitted text reproduces a
structurally equal graph.
"""
from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Iterator, Optional

from . import ident
from .model import (
    DagParseError,
    DagValidationError,
    Diagnostic,
    EdgeSpec,
    EffectType,
    Estimand,
    KnownOmitted,
    NodeSpec,
    RootDag,
)

_NAME_RE = re.compile(r"[A-Za-z0-9_.]+")
_ROLE_ATTRS = {"exposure", "outcome", "adjusted", "instrument", "omitted"}


@dataclass(frozen=True)
class _Token:
    kind: str  # name | punct | string
    value: str
    line: int
    col: int


def _tokenize(text: str) -> Iterator[_Token]:
    line, col = 1, 1
    i = 0
    n = len(text)
    while i < n:
        ch = text[i]
        if ch == "\n":
            line += 1
            col = 1
            i += 1
            continue
        if ch in " \t\r;":
            col += 1
            i += 1
            continue
        if ch == "#":
            while i < n and text[i] != "\n":
                i += 1
            continue
        if ch == '"':
            start_line, start_col = line, col
            j = i + 1
            while j < n and text[j] != '"':
                if text[j] == "\n":
                    raise DagParseError("unterminated string", start_line, start_col)
                j += 1
            if j >= n:
                raise DagParseError("unterminated string", start_line, start_col)
            yield _Token("string", text[i + 1 : j], start_line, start_col)
            col += j - i + 1
            i = j + 1
            continue
        if text.startswith("->", i):
            yield _Token("punct", "->", line, col)
            i += 2
            col += 2
            continue
        if ch in "[],{}=":
            yield _Token("punct", ch, line, col)
            i += 1
            col += 1
            continue
        m = _NAME_RE.match(text, i)
        if m:
            yield _Token("name", m.group(0), line, col)
            col += len(m.group(0))
            i = m.end()
            continue
        raise DagParseError(f"unexpected character {ch!r}", line, col)


class _Parser:
    def __init__(self, text: str) -> None:
        self.tokens = list(_tokenize(text))
        self.pos = 0

    def peek(self) -> Optional[_Token]:
        return self.tokens[self.pos] if self.pos < len(self.tokens) else None

    def next(self, expect_kind: Optional[str] = None, expect_value: Optional[str] = None) -> _Token:
        tok = self.peek()
        if tok is None:
            last = self.tokens[-1] if self.tokens else _Token("punct", "", 1, 1)
            raise DagParseError("unexpected end of input", last.line, last.col)
        if expect_kind and tok.kind != expect_kind:
            raise DagParseError(f"expected {expect_kind}, found {tok.value!r}", tok.line, tok.col)
        if expect_value and tok.value != expect_value:
            raise DagParseError(f"expected {expect_value!r}, found {tok.value!r}", tok.line, tok.col)
        self.pos += 1
        return tok


def _parse_pos(value: str, tok: _Token) -> tuple[float, float]:
    parts = value.split(",")
    if len(parts) != 2:
        raise DagParseError(f'pos must be "x,y", found "{value}"', tok.line, tok.col)
    try:
        return (float(parts[0]), float(parts[1]))
    except ValueError:
        raise DagParseError(f'pos coordinates must be numeric, found "{value}"', tok.line, tok.col)


def parse_dag(text: str) -> RootDag:
    """Parse root-graph text into a :class:`RootDag`.

    Raises :class:`DagParseError` with a 1-based line/column on syntax errors,
    duplicate or undeclared nodes, conflicting roles, self-loops, duplicate
    edges, missing or repeated exposure/outcome, malformed omitted pathways,
    and cyclic graphs. Deeper analysis checks live in :func:`validate_root`.
    """
    p = _Parser(text)
    p.next("name", "dag")
    p.next("punct", "{")

    roles: dict[str, str] = {}
    positions: dict[str, tuple[float, float]] = {}
    decl_at: dict[str, _Token] = {}
    effect_override: Optional[EffectType] = None
    override_on: Optional[str] = None
    edges: list[tuple[str, str, bool]] = []
    edge_at: dict[tuple[str, str], _Token] = {}

    while True:
        tok = p.peek()
        if tok is None:
            raise DagParseError("missing closing '}'", 1, 1)
        if tok.kind == "punct" and tok.value == "}":
            p.next()
            break
        name_tok = p.next("name")
        nxt = p.peek()
        if nxt is not None and nxt.kind == "punct" and nxt.value == "->":
            p.next()
            head_tok = p.next("name")
            fixed = False
            nxt = p.peek()
            if nxt is not None and nxt.kind == "punct" and nxt.value == "[":
                p.next()
                attr = p.next("name")
                if attr.value != "fixed":
                    raise DagParseError(
                        f"unknown edge attribute {attr.value!r}", attr.line, attr.col
                    )
                p.next("punct", "]")
                fixed = True
            if name_tok.value == head_tok.value:
                raise DagParseError(f"self-loop on {name_tok.value}", name_tok.line, name_tok.col)
            key = (name_tok.value, head_tok.value)
            if key in edge_at:
                raise DagParseError(
                    f"duplicate edge {key[0]} -> {key[1]}", name_tok.line, name_tok.col
                )
            edge_at[key] = name_tok
            edges.append((name_tok.value, head_tok.value, fixed))
            continue

        # node declaration
        if name_tok.value in decl_at:
            raise DagParseError(f"duplicate node {name_tok.value!r}", name_tok.line, name_tok.col)
        decl_at[name_tok.value] = name_tok
        roles.setdefault(name_tok.value, "plain")
        if nxt is not None and nxt.kind == "punct" and nxt.value == "[":
            p.next()
            while True:
                attr = p.next("name")
                follow = p.peek()
                if follow is not None and follow.kind == "punct" and follow.value == "=":
                    p.next()
                    val = p.next("string")
                    if attr.value == "pos":
                        positions[name_tok.value] = _parse_pos(val.value, val)
                    elif attr.value == "effect":
                        if val.value not in ("total", "direct"):
                            raise DagParseError(
                                f'effect must be "total" or "direct", found "{val.value}"',
                                val.line,
                                val.col,
                            )
                        if override_on is not None:
                            raise DagParseError(
                                "effect override declared more than once", attr.line, attr.col
                            )
                        effect_override = val.value  # type: ignore[assignment]
                        override_on = name_tok.value
                    else:
                        raise DagParseError(
                            f"unknown attribute {attr.value!r}", attr.line, attr.col
                        )
                elif attr.value in _ROLE_ATTRS:
                    if roles[name_tok.value] != "plain":
                        raise DagParseError(
                            f"conflicting roles for node {name_tok.value!r}",
                            attr.line,
                            attr.col,
                        )
                    roles[name_tok.value] = attr.value
                else:
                    raise DagParseError(f"unknown attribute {attr.value!r}", attr.line, attr.col)
                follow = p.peek()
                if follow is not None and follow.kind == "punct" and follow.value == ",":
                    p.next()
                    continue
                p.next("punct", "]")
                break

    trailing = p.peek()
    if trailing is not None:
        raise DagParseError(
            f"unexpected input after closing '}}': {trailing.value!r}", trailing.line, trailing.col
        )

    for (t, h), tok in edge_at.items():
        for endpoint in (t, h):
            if endpoint not in decl_at:
                raise DagParseError(f"edge references undeclared node {endpoint!r}", tok.line, tok.col)

    exposures = [n for n, r in roles.items() if r == "exposure"]
    outcomes = [n for n, r in roles.items() if r == "outcome"]
    instruments = [n for n, r in roles.items() if r == "instrument"]
    if len(exposures) != 1:
        if len(exposures) > 1:
            tok = decl_at[sorted(exposures)[1]]
            raise DagParseError("multiple exposure nodes declared", tok.line, tok.col)
        raise DagParseError("graph must declare exactly one exposure node", 1, 1)
    if len(outcomes) != 1:
        if len(outcomes) > 1:
            tok = decl_at[sorted(outcomes)[1]]
            raise DagParseError("multiple outcome nodes declared", tok.line, tok.col)
        raise DagParseError("graph must declare exactly one outcome node", 1, 1)
    if len(instruments) > 1:
        tok = decl_at[sorted(instruments)[1]]
        raise DagParseError("multiple instrument nodes declared", tok.line, tok.col)
    if override_on is not None and override_on != exposures[0]:
        tok = decl_at[override_on]
        raise DagParseError(
            "effect override must be declared on the exposure node", tok.line, tok.col
        )

    omitted = {n for n, r in roles.items() if r == "omitted"}
    registry: list[KnownOmitted] = []
    for name in sorted(omitted):
        tok = decl_at[name]
        incoming = [t for t, h, _ in edges if h == name]
        outgoing = [h for t, h, _ in edges if t == name]
        neighbors = incoming + outgoing
        if any(nb in omitted for nb in neighbors):
            raise DagParseError(
                f"omitted node {name!r} may not connect to another omitted node",
                tok.line,
                tok.col,
            )
        if len(outgoing) == 2 and not incoming:
            a, b = sorted(outgoing)
            if a == b:
                raise DagParseError(
                    f"omitted node {name!r} has two edges to the same node", tok.line, tok.col
                )
            registry.append(KnownOmitted(name, (a, b), "bidirected-latent"))
        elif len(outgoing) == 1 and len(incoming) == 1:
            registry.append(KnownOmitted(name, (incoming[0], outgoing[0]), "directed"))
        else:
            raise DagParseError(
                f"omitted node {name!r} must be a common cause (two outgoing edges) "
                "or an omitted mediator (one incoming, one outgoing)",
                tok.line,
                tok.col,
            )

    root_names = sorted(set(roles) - omitted)
    root_edges = []
    for t, h, fixed in edges:
        if t in omitted or h in omitted:
            continue
        root_edges.append(EdgeSpec(t, h, "directed", fixed))

    role_map = {"omitted": "omitted-known"}
    nodes = tuple(
        NodeSpec(n, role_map.get(roles[n], roles[n]), positions.get(n))  # type: ignore[arg-type]
        for n in root_names
    )

    graph = ident.Graph(tuple(root_names), frozenset(e.pair for e in root_edges))
    if not ident.is_acyclic(graph):
        raise DagParseError("cyclic root graph", 1, 1)

    estimand = infer_estimand_parts(
        graph,
        exposures[0],
        outcomes[0],
        frozenset(n for n, r in roles.items() if r == "adjusted"),
        instruments[0] if instruments else None,
        effect_override,
    )
    return RootDag(nodes, tuple(root_edges), estimand, tuple(registry), effect_override)


def infer_estimand_parts(
    graph: ident.Graph,
    exposure: str,
    outcome: str,
    adjusted: frozenset[str],
    instrument: Optional[str],
    override: Optional[EffectType] = None,
) -> Estimand:
    on_path = _adjusted_on_causal_path(graph, exposure, outcome, adjusted)
    inferred: EffectType = "direct" if on_path else "total"
    return Estimand(
        exposure=exposure,
        outcome=outcome,
        adjusted_set=adjusted,
        effect_type=override or inferred,
        iv_mode=instrument is not None,
        instrument=instrument,
    )


def _adjusted_on_causal_path(
    graph: ident.Graph, exposure: str, outcome: str, adjusted: frozenset[str]
) -> bool:
    down = ident.descendants(graph, exposure)
    up = ident.ancestors(graph, outcome)
    return any(c in down and c in up for c in adjusted)


def infer_estimand(dag: RootDag) -> Estimand:
    """Re-derive the estimand from graph structure; pure in the graph, so
    declaration order can never change the answer."""
    graph = ident.graph_from_root(dag)
    return infer_estimand_parts(
        graph,
        dag.exposure,
        dag.outcome,
        dag.adjusted_set,
        dag.instrument,
        dag.effect_override,
    )


def _fmt_float(v: float) -> str:
    return repr(int(v)) if float(v).is_integer() else repr(v)


def emit_dag(dag: RootDag) -> str:
    """Canonical text form; parse_dag(emit_dag(d)) is structurally equal to d."""
    role_attr = {
        "exposure": "exposure",
        "outcome": "outcome",
        "adjusted": "adjusted",
        "instrument": "instrument",
        "omitted-known": "omitted",
    }
    lines = ["dag {"]
    names = [(n.name, n) for n in dag.nodes]
    for k in dag.known_omitted:
        names.append((k.name, NodeSpec(k.name, "omitted-known")))
    for _, node in sorted(names, key=lambda t: t[0]):
        attrs = []
        if node.role != "plain":
            attrs.append(role_attr[node.role])
        if node.role == "exposure" and dag.effect_override:
            attrs.append(f'effect="{dag.effect_override}"')
        if node.pos is not None:
            attrs.append(f'pos="{_fmt_float(node.pos[0])},{_fmt_float(node.pos[1])}"')
        lines.append(f"  {node.name} [{', '.join(attrs)}]" if attrs else f"  {node.name}")
    all_edges = [(e.tail, e.head, e.fixed) for e in dag.edges]
    for k in dag.known_omitted:
        if k.kind == "bidirected-latent":
            all_edges.append((k.name, k.pair[0], False))
            all_edges.append((k.name, k.pair[1], False))
        else:
            all_edges.append((k.pair[0], k.name, False))
            all_edges.append((k.name, k.pair[1], False))
    for tail, head, fixed in sorted(all_edges):
        suffix = " [fixed]" if fixed else ""
        lines.append(f"  {tail} -> {head}{suffix}")
    lines.append("}")
    return "\n".join(lines) + "\n"


def validate_root(dag: RootDag) -> list[Diagnostic]:
    """Structural and analysis diagnostics for a root graph.

    Errors flag invariant violations (stray plain nodes, bidirected root
    edges, cycles, an instrument with no path into the exposure). Warnings
    flag analysis smells: an adjusted set that fails to identify the inferred
    estimand in the root itself, covariates irrelevant to both exposure and
    outcome, invalid instrument conditions, and an effect override that
    contradicts the graph.
    """
    out: list[Diagnostic] = []
    names = set(dag.node_names)
    for edge in dag.edges:
        if edge.kind != "directed":
            out.append(
                Diagnostic("error", "bidirected-in-root", f"root edge {edge.tail} <-> {edge.head} must be directed")
            )
        if edge.tail not in names or edge.head not in names:
            out.append(
                Diagnostic("error", "undeclared-endpoint", f"edge {edge.tail} -> {edge.head} references an undeclared node")
            )
        if edge.tail == edge.head:
            out.append(Diagnostic("error", "self-loop", f"self-loop on {edge.tail}"))
    roles = {n.name: n.role for n in dag.nodes}
    for name, role in sorted(roles.items()):
        if role == "plain":
            out.append(
                Diagnostic(
                    "error",
                    "node-set-closure",
                    f"node {name} has no analysis role; the root may only contain the "
                    "exposure, outcome, adjusted covariates and an instrument",
                )
            )
        if role == "omitted-known":
            out.append(
                Diagnostic(
                    "error",
                    "omitted-in-root",
                    f"known-omitted node {name} belongs in the registry, not the root node set",
                )
            )
    for count_role in ("exposure", "outcome"):
        k = sum(1 for r in roles.values() if r == count_role)
        if k != 1:
            out.append(
                Diagnostic("error", "role-count", f"root must declare exactly one {count_role} node, found {k}")
            )
    if sum(1 for r in roles.values() if r == "instrument") > 1:
        out.append(Diagnostic("error", "role-count", "root may declare at most one instrument"))
    for entry in dag.known_omitted:
        for endpoint in entry.pair:
            if endpoint not in names:
                out.append(
                    Diagnostic(
                        "error",
                        "registry-endpoint",
                        f"known-omitted pathway {entry.name} references non-root node {endpoint}",
                    )
                )
    if any(d.level == "error" for d in out):
        return out

    graph = ident.graph_from_root(dag)
    if not ident.is_acyclic(graph):
        out.append(Diagnostic("error", "cyclic", "root graph contains a cycle"))
        return out

    est = dag.estimand
    if est.iv_mode and est.instrument is not None:
        if est.exposure not in ident.descendants(graph, est.instrument):
            out.append(
                Diagnostic(
                    "error",
                    "instrument-unlinked",
                    f"instrument {est.instrument} has no directed path to the exposure",
                )
            )
            return out
        if not ident.iv_conditions_hold(graph, est):
            out.append(
                Diagnostic(
                    "warning",
                    "iv-invalid",
                    f"instrument {est.instrument} fails the relevance/exclusion conditions in the root",
                )
            )
    elif not ident.is_sufficient_adjustment(graph, est, est.adjusted_set):
        out.append(
            Diagnostic(
                "warning",
                "adjusted-insufficient",
                f"adjusted set {{{', '.join(sorted(est.adjusted_set)) or ''}}} does not identify "
                f"the {est.effect_type} effect of {est.exposure} on {est.outcome} in the root itself",
            )
        )
    for name in sorted(est.adjusted_set):
        anc_x = ident.ancestors(graph, est.exposure)
        anc_y = ident.ancestors(graph, est.outcome)
        if name not in anc_x and name not in anc_y:
            out.append(
                Diagnostic(
                    "warning",
                    "inert-covariate",
                    f"adjusted node {name} influences neither the exposure nor the outcome",
                )
            )
    if dag.effect_override is not None:
        inferred = "direct" if _adjusted_on_causal_path(
            graph, est.exposure, est.outcome, est.adjusted_set
        ) else "total"
        if inferred != dag.effect_override:
            out.append(
                Diagnostic(
                    "warning",
                    "estimand-override",
                    f"declared effect type {dag.effect_override!r} contradicts the inferred {inferred!r}",
                )
            )
    return out


def require_valid(dag: RootDag) -> None:
    errs = [d for d in validate_root(dag) if d.level == "error"]
    if errs:
        raise DagValidationError(errs)

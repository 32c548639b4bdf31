"""Core data model: nodes, edges, estimands, known-omitted pathways, root graphs."""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any, Literal, Optional

Role = Literal["exposure", "outcome", "adjusted", "instrument", "plain", "omitted-known"]
EdgeKind = Literal["directed", "bidirected-latent"]
EffectType = Literal["total", "direct"]

ROLE_NAMES: tuple[str, ...] = (
    "exposure",
    "outcome",
    "adjusted",
    "instrument",
    "plain",
    "omitted-known",
)
STATUS_NAMES: tuple[str, ...] = ("open", "justified", "impossible", "violated")


@dataclass(frozen=True)
class NodeSpec:
    """A named variable with its analysis role and an optional display position."""

    name: str
    role: Role = "plain"
    pos: Optional[tuple[float, float]] = None


@dataclass(frozen=True)
class EdgeSpec:
    """A single edge. Bidirected-latent edges stand for an unnamed common cause."""

    tail: str
    head: str
    kind: EdgeKind = "directed"
    fixed: bool = False

    def reversed(self) -> "EdgeSpec":
        return EdgeSpec(self.head, self.tail, self.kind, self.fixed)

    @property
    def pair(self) -> tuple[str, str]:
        return (self.tail, self.head)


@dataclass(frozen=True)
class KnownOmitted:
    """An analyst-declared omitted pathway between two root nodes.

    ``pair`` is ordered (cause, effect) for directed pathways and sorted for
    common-cause pathways (enforced on construction).
    """

    name: str
    pair: tuple[str, str]
    kind: EdgeKind

    def __post_init__(self) -> None:
        if self.kind == "bidirected-latent":
            object.__setattr__(self, "pair", tuple(sorted(self.pair)))


@dataclass(frozen=True)
class Estimand:
    """The causal quantity the analysis targets, read off the root graph."""

    exposure: str
    outcome: str
    adjusted_set: frozenset[str]
    effect_type: EffectType
    iv_mode: bool
    instrument: Optional[str] = None


@dataclass(frozen=True)
class RootDag:
    """The graph implied by the implemented analysis.

    Contains exactly the exposure, the outcome, the adjusted covariates and an
    optional instrument; analyst-declared omitted mechanisms live in
    ``known_omitted``, not in the node set. Node, edge and registry order is
    canonicalized on construction so structurally equal graphs compare equal.
    """

    nodes: tuple[NodeSpec, ...]
    edges: tuple[EdgeSpec, ...]
    estimand: Estimand
    known_omitted: tuple[KnownOmitted, ...] = ()
    effect_override: Optional[EffectType] = None

    def __post_init__(self) -> None:
        object.__setattr__(self, "nodes", tuple(sorted(self.nodes, key=lambda n: n.name)))
        object.__setattr__(self, "edges", tuple(sorted(self.edges, key=lambda e: (e.tail, e.head))))
        object.__setattr__(self, "known_omitted", tuple(sorted(self.known_omitted, key=lambda k: k.name)))

    @property
    def node_names(self) -> tuple[str, ...]:
        return tuple(n.name for n in self.nodes)

    @property
    def exposure(self) -> str:
        return self.estimand.exposure

    @property
    def outcome(self) -> str:
        return self.estimand.outcome

    @property
    def instrument(self) -> Optional[str]:
        return self.estimand.instrument

    @property
    def adjusted_set(self) -> frozenset[str]:
        return self.estimand.adjusted_set

    def role_of(self, name: str) -> Role:
        for n in self.nodes:
            if n.name == name:
                return n.role
        raise KeyError(name)

    def has_edge(self, tail: str, head: str) -> bool:
        return any(e.tail == tail and e.head == head for e in self.edges)

    def edge_pairs(self) -> tuple[tuple[str, str], ...]:
        return tuple(e.pair for e in self.edges)


@dataclass(frozen=True)
class Diagnostic:
    """One validation finding; ``level`` is ``error`` or ``warning``."""

    level: Literal["error", "warning"]
    code: str
    message: str

    def __str__(self) -> str:
        return f"{self.level}: {self.code}: {self.message}"


class DagParseError(Exception):
    """Raised on malformed input text; carries the 1-based source position."""

    def __init__(self, message: str, line: int = 1, col: int = 1) -> None:
        super().__init__(f"{line}:{col}: {message}")
        self.message = message
        self.line = line
        self.col = col


class DagValidationError(Exception):
    """Raised when an operation requires a valid root but got error diagnostics."""

    def __init__(self, diagnostics: list[Diagnostic]) -> None:
        super().__init__("; ".join(str(d) for d in diagnostics))
        self.diagnostics = diagnostics

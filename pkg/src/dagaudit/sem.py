"""Linear structural-equation simulation used as an independent test oracle.

Each node is a linear function of its parents plus independent standard
normal noise; bidirected-latent pairs simulate as an explicit latent parent
of both endpoints. The oracle draws random nonzero coefficients, simulates
data, regresses the outcome on the exposure plus an adjustment set, and
checks whether the exposure coefficient recovers the true effect. It shares
no code path with the graphical adjustment criteria it is used to test.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Mapping, Optional

import numpy as np

from . import ident
from .model import Estimand

_COEF_LOW, _COEF_HIGH = 0.2, 2.0


@dataclass(frozen=True)
class LinearSem:
    """A graph paired with one coefficient per expanded directed edge."""

    graph: ident.Graph
    coefficients: Mapping[tuple[str, str], float]

    def simulate(self, n: int, rng: np.random.Generator) -> dict[str, np.ndarray]:
        data: dict[str, np.ndarray] = {}
        for node in ident.topological_order(self.graph):
            value = rng.standard_normal(n)
            for parent in self.graph.parents(node):
                value = value + self.coefficients[(parent, node)] * data[parent]
            data[node] = value
        return data

    def true_effect(self, e: Estimand) -> float:
        """Total: sum over directed exposure-to-outcome paths of the products
        of path coefficients. Direct: the exposure->outcome coefficient."""
        if e.effect_type == "direct":
            return float(self.coefficients.get((e.exposure, e.outcome), 0.0))
        total = 0.0
        for path in ident.directed_paths(self.graph, e.exposure, e.outcome):
            prod = 1.0
            for t, h in zip(path, path[1:]):
                prod *= self.coefficients[(t, h)]
            total += prod
        return total


def draw_sem(g: ident.Graph, rng: np.random.Generator) -> LinearSem:
    """Random coefficients bounded away from zero: |c| in [0.2, 2]."""
    coeffs: dict[tuple[str, str], float] = {}
    for node in sorted(g.all_nodes):
        for child in g.children(node):
            magnitude = rng.uniform(_COEF_LOW, _COEF_HIGH)
            sign = 1.0 if rng.random() < 0.5 else -1.0
            coeffs[(node, child)] = sign * magnitude
    return LinearSem(g, coeffs)


def _regress_exposure_coef(
    data: Mapping[str, np.ndarray], outcome: str, exposure: str, controls: list[str]
) -> tuple[float, float]:
    """OLS coefficient of the exposure and its standard error, or raises
    np.linalg.LinAlgError on a collinear design."""
    n = data[outcome].shape[0]
    cols = [np.ones(n), data[exposure]] + [data[c] for c in controls]
    design = np.column_stack(cols)
    k = design.shape[1]
    if np.linalg.matrix_rank(design) < k:
        raise np.linalg.LinAlgError("collinear design")
    beta, _, _, _ = np.linalg.lstsq(design, data[outcome], rcond=None)
    resid = data[outcome] - design @ beta
    sigma2 = float(resid @ resid) / (n - k)
    cov = sigma2 * np.linalg.inv(design.T @ design)
    return float(beta[1]), float(np.sqrt(cov[1, 1]))


def sem_oracle_check(
    g: ident.Graph,
    e: Estimand,
    s: Iterable[str] = (),
    trials: int = 20,
    sample_size: int = 50_000,
    seed: int = 0,
    tolerance_se: float = 4.0,
    max_retries: int = 5,
) -> bool:
    """True iff the adjusted regression recovers the true effect.

    Runs ``trials`` independent simulations with fresh coefficients; passes
    when the exposure coefficient lands within ``tolerance_se`` standard
    errors of the truth in at least ``trials - 1`` of them, so a single
    unlucky draw cannot flip the verdict. Degenerate (collinear) samples are
    retried with fresh coefficients a bounded number of times.
    """
    controls = sorted(set(s))
    rng = np.random.default_rng(seed)
    hits = 0
    for _ in range(trials):
        for attempt in range(max_retries + 1):
            sem = draw_sem(g, rng)
            data = sem.simulate(sample_size, rng)
            try:
                coef, se = _regress_exposure_coef(data, e.outcome, e.exposure, controls)
            except np.linalg.LinAlgError:
                if attempt == max_retries:
                    raise RuntimeError("persistently collinear design in oracle simulation")
                continue
            truth = sem.true_effect(e)
            if abs(coef - truth) <= tolerance_se * se:
                hits += 1
            break
    return hits >= trials - 1

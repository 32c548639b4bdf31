import numpy as np
import pytest

from dagaudit.ident import Graph, graph_from_root
from dagaudit.model import Estimand
from dagaudit.sem import LinearSem, draw_sem, sem_oracle_check


def total(adjusted=()):
    return Estimand("A", "Y", frozenset(adjusted), "total", False, None)


class TestLinearSem:
    def test_true_total_effect_sums_path_products(self):
        g = Graph(("A", "M", "Y"), frozenset({("A", "M"), ("M", "Y"), ("A", "Y")}))
        sem = LinearSem(g, {("A", "M"): 2.0, ("M", "Y"): 0.5, ("A", "Y"): 1.0})
        assert sem.true_effect(total()) == pytest.approx(2.0)

    def test_true_direct_effect_is_edge_coefficient(self):
        g = Graph(("A", "M", "Y"), frozenset({("A", "M"), ("M", "Y"), ("A", "Y")}))
        sem = LinearSem(g, {("A", "M"): 2.0, ("M", "Y"): 0.5, ("A", "Y"): 1.0})
        e = Estimand("A", "Y", frozenset({"M"}), "direct", False, None)
        assert sem.true_effect(e) == pytest.approx(1.0)

    def test_true_direct_effect_without_edge_is_zero(self):
        no_edge = LinearSem(Graph(("A", "Y"), frozenset()), {})
        e = Estimand("A", "Y", frozenset(), "direct", False, None)
        assert no_edge.true_effect(e) == pytest.approx(0.0)

    def test_simulation_respects_coefficients(self):
        g = Graph(("A", "Y"), frozenset({("A", "Y")}))
        sem = LinearSem(g, {("A", "Y"): 1.5})
        rng = np.random.default_rng(0)
        data = sem.simulate(200_000, rng)
        slope = np.cov(data["A"], data["Y"])[0, 1] / np.var(data["A"])
        assert slope == pytest.approx(1.5, abs=0.02)

    def test_draw_sem_coefficients_bounded_away_from_zero(self):
        g = Graph(("A", "L", "Y"), frozenset({("L", "A"), ("L", "Y"), ("A", "Y")}), frozenset({("A", "Y")}))
        sem = draw_sem(g, np.random.default_rng(1))
        assert len(sem.coefficients) == 5  # 3 observed edges + 2 latent edges
        for c in sem.coefficients.values():
            assert 0.2 <= abs(c) <= 2.0


class TestOracle:
    def test_confounder_root_adjusting_for_confounder_passes(self, confounder_root):
        g = graph_from_root(confounder_root)
        assert sem_oracle_check(g, confounder_root.estimand, {"L"}, trials=20, sample_size=50_000, seed=1)

    def test_confounder_root_unadjusted_is_biased(self, confounder_root):
        g = graph_from_root(confounder_root)
        assert not sem_oracle_check(g, confounder_root.estimand, frozenset(), trials=20, sample_size=50_000, seed=2)

    def test_two_node_unconfounded(self, two_node):
        g = graph_from_root(two_node)
        assert sem_oracle_check(g, two_node.estimand, frozenset(), trials=20, sample_size=50_000, seed=3)

    def test_latent_confounding_is_biased(self, two_node):
        g = graph_from_root(two_node).with_bidirected("A", "Y")
        assert not sem_oracle_check(g, two_node.estimand, frozenset(), trials=10, sample_size=50_000, seed=4)

    def test_direct_effect_single_door(self, mediator_root):
        g = graph_from_root(mediator_root)
        assert sem_oracle_check(g, mediator_root.estimand, {"L", "M"}, trials=10, sample_size=50_000, seed=5)

    def test_seed_reproducibility(self, confounder_root):
        g = graph_from_root(confounder_root)
        runs = {
            sem_oracle_check(g, confounder_root.estimand, {"L"}, trials=4, sample_size=5_000, seed=42)
            for _ in range(3)
        }
        assert len(runs) == 1

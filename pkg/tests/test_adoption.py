import random

import pytest

from dagaudit import adopt, emit_dag, generate, parse_dag, validate_root
from dagaudit.adoption import UnknownBranchError
from dagaudit.model import KnownOmitted
from oracles import random_root


def branch_by_flips(result, flips):
    return next(b for b in result.misdirections if b.flip_set == frozenset(flips))


class TestMisdirectionAdoption:
    def test_confounder_root_mediator_rewrite(self, confounder_root):
        result = generate(confounder_root)
        new_root = adopt(confounder_root, result, branch_by_flips(result, {("L", "A")}).id)
        assert new_root.edge_pairs() == (("A", "L"), ("A", "Y"), ("L", "Y"))
        assert new_root.estimand.effect_type == "direct"  # L is now an adjusted mediator
        assert new_root.known_omitted == confounder_root.known_omitted

    def test_reverse_causation_rewrite(self, two_node):
        result = generate(two_node)
        new_root = adopt(two_node, result, result.misdirections[0].id)
        assert new_root.edge_pairs() == (("Y", "A"),)
        assert new_root.estimand.effect_type == "total"

    def test_instrument_demoted_when_cut_off(self):
        # flipping Z->A and L->Z opens a new frontdoor route A->Z->L->Y, so the
        # chain is accepted, and the adopted graph severs Z from the exposure
        root = parse_dag(
            "dag { A [exposure] Y [outcome] Z [instrument] L [adjusted] Z -> A A -> Y L -> Z L -> Y }"
        )
        result = generate(root)
        chain = next(
            b
            for b in result.misdirections
            if b.flip_set == frozenset({("Z", "A"), ("L", "Z")})
        )
        new_root = adopt(root, result, chain.id)
        assert new_root.role_of("Z") == "adjusted"
        assert not new_root.estimand.iv_mode
        assert not any(d.level == "error" for d in validate_root(new_root))


class TestExclusionAdoption:
    def test_default_promotes_known_member(self, confounder_root):
        result = generate(confounder_root)
        new_root = adopt(confounder_root, result, result.exclusions[0].id)
        assert new_root.role_of("K") == "adjusted"
        assert ("K", "A") in new_root.edge_pairs() and ("K", "Y") in new_root.edge_pairs()
        assert new_root.known_omitted == ()  # the registry entry was consumed

    def test_custom_name(self, two_node):
        result = generate(two_node)
        bid = result.exclusions[0].id
        new_root = adopt(two_node, result, bid, name="Uconf")
        assert new_root.role_of("Uconf") == "adjusted"
        assert new_root.adjusted_set == frozenset({"Uconf"})

    def test_auto_name_avoids_collisions(self, two_node):
        result = generate(two_node)
        new_root = adopt(two_node, result, result.exclusions[0].id)
        assert new_root.role_of("U1") == "adjusted"

    def test_leave_unadjusted_records_known_pathway(self, two_node):
        result = generate(two_node)
        new_root = adopt(two_node, result, result.exclusions[0].id, name="V", leave_unadjusted=True)
        assert new_root.node_names == ("A", "Y")
        assert new_root.known_omitted == (KnownOmitted("V", ("A", "Y"), "bidirected-latent"),)
        # the recorded pathway now surfaces as a named member on re-audit
        again = generate(new_root)
        assert again.exclusions[0].known_members == ("V",)

    def test_directed_pathway_adds_edge(self, instrument_root):
        result = generate(instrument_root)
        directed = next(b for b in result.exclusions if b.pathway_kind == "directed")
        new_root = adopt(instrument_root, result, directed.id)
        assert ("Z", "Y") in new_root.edge_pairs()
        diags = validate_root(new_root)
        assert not any(d.level == "error" for d in diags)
        assert any(d.code == "iv-invalid" for d in diags)

    def test_name_rejected_for_directed_pathway(self, instrument_root):
        result = generate(instrument_root)
        directed = next(b for b in result.exclusions if b.pathway_kind == "directed")
        with pytest.raises(ValueError, match="common-cause"):
            adopt(instrument_root, result, directed.id, name="V")

    def test_name_collision_rejected(self, confounder_root):
        result = generate(confounder_root)
        with pytest.raises(ValueError, match="already exists"):
            adopt(confounder_root, result, result.exclusions[0].id, name="L")


class TestClosure:
    def test_unknown_branch(self, confounder_root):
        with pytest.raises(UnknownBranchError):
            adopt(confounder_root, generate(confounder_root), "000000000000")

    def test_adopt_audit_loop_stays_valid(self, confounder_root):
        rng = random.Random(3)
        root = confounder_root
        for _ in range(12):
            result = generate(root)
            if result.branch_count() == 0:
                break
            ids = list(result.branch_ids())
            root = adopt(root, result, rng.choice(ids))
            reparsed = parse_dag(emit_dag(root))
            assert reparsed == root
            assert not any(d.level == "error" for d in validate_root(reparsed))

    def test_random_roots_adopt_closure(self):
        rng = random.Random(17)
        for _ in range(25):
            root = random_root(rng)
            result = generate(root)
            for bid in result.branch_ids():
                new_root = adopt(root, result, bid)
                assert not any(d.level == "error" for d in validate_root(new_root))
                assert parse_dag(emit_dag(new_root)) == new_root

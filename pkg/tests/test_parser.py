import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import CONFOUNDER_TEXT, MEDIATOR_TEXT, INSTRUMENT_TEXT, TWO_NODE_TEXT
from dagaudit import (
    DagParseError,
    EdgeSpec,
    Estimand,
    KnownOmitted,
    NodeSpec,
    RootDag,
    emit_dag,
    infer_estimand,
    parse_dag,
    validate_root,
)
from dagaudit.parser import infer_estimand_parts
from dagaudit import ident


class TestParse:
    def test_confounder_root_structure(self, confounder_root):
        assert confounder_root.node_names == ("A", "L", "Y")
        assert confounder_root.edge_pairs() == (("A", "Y"), ("L", "A"), ("L", "Y"))
        assert confounder_root.known_omitted == (KnownOmitted("K", ("A", "Y"), "bidirected-latent"),)
        assert confounder_root.role_of("A") == "exposure"
        assert confounder_root.role_of("Y") == "outcome"
        assert confounder_root.role_of("L") == "adjusted"

    def test_minimal_two_node(self, two_node):
        assert two_node.node_names == ("A", "Y")
        assert two_node.estimand == Estimand("A", "Y", frozenset(), "total", False, None)

    def test_one_liner_with_comment_and_semicolons(self):
        root = parse_dag("dag { A [exposure]; Y [outcome]; A -> Y } # trailing comment")
        assert root.edge_pairs() == (("A", "Y"),)

    def test_positions_parsed(self):
        root = parse_dag('dag { A [exposure, pos="0,1.5"] Y [outcome, pos="-2,0"] A -> Y }')
        by_name = {n.name: n for n in root.nodes}
        assert by_name["A"].pos == (0.0, 1.5)
        assert by_name["Y"].pos == (-2.0, 0.0)

    def test_fixed_edge_flag(self):
        root = parse_dag("dag { A [exposure] Y [outcome] L [adjusted] L -> A [fixed] L -> Y A -> Y }")
        fixed = [e for e in root.edges if e.fixed]
        assert fixed == [EdgeSpec("L", "A", "directed", True)]

    def test_effect_override(self):
        root = parse_dag('dag { A [exposure, effect="direct"] Y [outcome] A -> Y }')
        assert root.estimand.effect_type == "direct"
        assert root.effect_override == "direct"

    def test_directed_known_omitted(self):
        root = parse_dag(
            "dag { A [exposure] Y [outcome] P [omitted] A -> Y A -> P P -> Y }"
        )
        assert root.known_omitted == (KnownOmitted("P", ("A", "Y"), "directed"),)
        assert root.node_names == ("A", "Y")


class TestParseErrors:
    @pytest.mark.parametrize(
        "text, fragment",
        [
            ("dag { A [exposure] Y [outcome] A -> Y Y -> A }", "cyclic"),
            ("dag { A [exposure] Y [outcome] A -> A }", "self-loop"),
            ("dag { A [exposure] Y [outcome] A -> Y A -> Y }", "duplicate edge"),
            ("dag { A [exposure] A [outcome] }", "duplicate node"),
            ("dag { A [exposure] Y [outcome] A -> B }", "undeclared node"),
            ("dag { A [exposure] B [exposure] Y [outcome] A -> Y }", "multiple exposure"),
            ("dag { A [exposure] Y [outcome] B [outcome] A -> Y }", "multiple outcome"),
            ("dag { A [exposure] A -> A }", "self-loop"),
            ("dag { Y [outcome] }", "exactly one exposure"),
            ("dag { A [exposure] }", "exactly one outcome"),
            ("dag { A [exposure, outcome] Y [outcome] }", "conflicting roles"),
            ("dag { A [banana] Y [outcome] }", "unknown attribute"),
            ("dag { A [exposure] Y [outcome] A -> Y [dotted] }", "unknown edge attribute"),
            ("dag { A [exposure] Y [outcome] ", "missing closing"),
            ("dag { A [exposure] Y [outcome] } trailing", "unexpected input"),
            ('dag { A [exposure, pos="1"] Y [outcome] }', 'pos must be "x,y"'),
            ('dag { A [exposure, effect="both"] Y [outcome] }', "effect must be"),
            ('dag { A [exposure] Y [outcome, effect="total"] A -> Y }', "exposure node"),
            ("dag { A [exposure] Y [outcome] K [omitted] K -> A }", "common cause"),
            ("dag { A [exposure] Y [outcome] J [omitted] K [omitted] J -> K J -> A K -> Y }", "another omitted"),
            ('dag { A [exposure, pos="a,b"] Y [outcome] }', "numeric"),
            ('dag { A [exposure] "Y }', "unterminated string"),
            ("graph { A [exposure] Y [outcome] }", "expected 'dag'"),
        ],
    )
    def test_error_messages(self, text, fragment):
        with pytest.raises(DagParseError) as err:
            parse_dag(text)
        assert fragment in str(err.value)

    def test_error_position_reported(self):
        with pytest.raises(DagParseError) as err:
            parse_dag("dag {\n  A [exposure]\n  A [outcome]\n}")
        assert err.value.line == 3
        assert err.value.col == 3


class TestEmit:
    def test_round_trip_confounder_root(self, confounder_root):
        assert parse_dag(emit_dag(confounder_root)) == confounder_root

    def test_canonical_across_declaration_order(self):
        a = parse_dag("dag { A [exposure] Y [outcome] L [adjusted] L -> A L -> Y A -> Y }")
        b = parse_dag("dag { L [adjusted] Y [outcome] A [exposure] A -> Y L -> Y L -> A }")
        assert emit_dag(a) == emit_dag(b)
        assert a == b

    def test_fixed_annotation_survives(self):
        root = parse_dag("dag { A [exposure] Y [outcome] L [adjusted] L -> A [fixed] L -> Y A -> Y }")
        assert "L -> A [fixed]" in emit_dag(root)

    def test_known_omitted_survives(self, confounder_root):
        text = emit_dag(confounder_root)
        assert "K [omitted]" in text
        assert parse_dag(text).known_omitted == confounder_root.known_omitted


def _root_strategy():
    name = st.from_regex(r"[A-Za-z][A-Za-z0-9_.]{0,3}", fullmatch=True)
    pos = st.one_of(
        st.none(),
        st.tuples(
            st.floats(allow_nan=False, allow_infinity=False, width=32),
            st.floats(allow_nan=False, allow_infinity=False, width=32),
        ),
    )

    @st.composite
    def build(draw):
        names = draw(st.lists(name, min_size=2, max_size=6, unique=True))
        exposure, outcome = names[0], names[1]
        covs = names[2:]
        # edges consistent with the listing order, hence acyclic
        edges = []
        for i in range(len(names)):
            for j in range(i + 1, len(names)):
                if draw(st.booleans()):
                    edges.append(EdgeSpec(names[i], names[j], "directed", draw(st.booleans())))
        nodes = [NodeSpec(exposure, "exposure", draw(pos)), NodeSpec(outcome, "outcome", draw(pos))]
        nodes += [NodeSpec(c, "adjusted", draw(pos)) for c in covs]
        known = []
        if covs and draw(st.booleans()):
            kname = draw(name.filter(lambda s: s not in names))
            known.append(KnownOmitted(kname, (exposure, outcome), "bidirected-latent"))
        graph = ident.Graph(tuple(names), frozenset(e.pair for e in edges))
        estimand = infer_estimand_parts(graph, exposure, outcome, frozenset(covs), None)
        return RootDag(tuple(nodes), tuple(edges), estimand, tuple(known))

    return build()


class TestRoundTripProperty:
    @settings(max_examples=200, deadline=None)
    @given(root=_root_strategy())
    def test_emit_parse_round_trip(self, root):
        text = emit_dag(root)
        reparsed = parse_dag(text)
        assert reparsed == root
        assert emit_dag(reparsed) == text


class TestEstimand:
    def test_confounder_root_total(self, confounder_root):
        e = infer_estimand(confounder_root)
        assert (e.effect_type, e.iv_mode) == ("total", False)

    def test_mediator_root_direct(self, mediator_root):
        e = infer_estimand(mediator_root)
        assert (e.effect_type, e.iv_mode) == ("direct", False)
        assert e.adjusted_set == frozenset({"L", "M"})

    def test_instrument_root_iv(self, instrument_root):
        e = infer_estimand(instrument_root)
        assert (e.effect_type, e.iv_mode, e.instrument) == ("total", True, "Z")

    def test_order_invariance(self):
        a = parse_dag(MEDIATOR_TEXT)
        shuffled = """
        dag { M [adjusted] K [omitted] Y [outcome] A [exposure] L [adjusted]
              K -> Y M -> Y A -> Y L -> Y A -> M K -> A L -> A }
        """
        assert infer_estimand(parse_dag(shuffled)) == infer_estimand(a)


class TestValidate:
    def test_mediator_root_clean(self, mediator_root):
        assert validate_root(mediator_root) == []

    def test_confounder_root_clean(self, confounder_root):
        assert validate_root(confounder_root) == []

    def test_inert_covariate_warns(self):
        root = parse_dag("dag { A [exposure] Y [outcome] C [adjusted] A -> Y A -> C }")
        diags = validate_root(root)
        assert "inert-covariate" in [d.code for d in diags if d.level == "warning"]
        assert not any(d.level == "error" for d in diags)

    def test_plain_node_is_error(self):
        root = parse_dag("dag { A [exposure] Y [outcome] L L -> A L -> Y A -> Y }")
        assert any(d.code == "node-set-closure" and d.level == "error" for d in validate_root(root))

    def test_insufficient_adjustment_warns(self):
        # Unblockable confounding through an adjusted collider.
        root = parse_dag(
            "dag { A [exposure] Y [outcome] C [adjusted] A -> C Y -> C A -> Y }"
        )
        codes = [d.code for d in validate_root(root)]
        assert "adjusted-insufficient" in codes

    def test_instrument_without_path_is_error(self):
        root = parse_dag("dag { A [exposure] Y [outcome] Z [instrument] A -> Y A -> Z }")
        assert any(d.code == "instrument-unlinked" for d in validate_root(root))

    def test_invalid_iv_warns(self):
        root = parse_dag("dag { A [exposure] Y [outcome] Z [instrument] Z -> A A -> Y Z -> Y }")
        assert any(d.code == "iv-invalid" and d.level == "warning" for d in validate_root(root))

    def test_override_mismatch_warns(self):
        root = parse_dag('dag { A [exposure, effect="direct"] Y [outcome] A -> Y }')
        assert any(d.code == "estimand-override" for d in validate_root(root))

import pytest

from dagaudit import parse_dag

# Exposure A, outcome Y, measured confounder L, known omitted confounder K.
CONFOUNDER_TEXT = """\
dag {
  A [exposure]
  Y [outcome]
  L [adjusted]
  K [omitted]
  L -> A
  L -> Y
  A -> Y
  K -> A
  K -> Y
}
"""

# Adds an adjusted mediator M; the implied estimand is the controlled direct
# effect of A on Y. Shares its graph with the misdirection walkthrough.
MEDIATOR_TEXT = """\
dag {
  A [exposure]
  Y [outcome]
  L [adjusted]
  M [adjusted]
  K [omitted]
  L -> A
  L -> Y
  A -> M
  M -> Y
  A -> Y
  K -> A
  K -> Y
}
"""

# Instrumental-variable analysis: instrument Z, no adjusted covariates.
INSTRUMENT_TEXT = """\
dag {
  A [exposure]
  Y [outcome]
  Z [instrument]
  Z -> A
  A -> Y
}
"""

# Same structure as the confounder-only root, with two known omitted
# confounders sharing the (A, Y) pathway.
TWO_KNOWN_TEXT = """\
dag {
  A [exposure]
  Y [outcome]
  L [adjusted]
  K1 [omitted]
  K2 [omitted]
  L -> A
  L -> Y
  A -> Y
  K1 -> A
  K1 -> Y
  K2 -> A
  K2 -> Y
}
"""

TWO_NODE_TEXT = "dag { A [exposure] Y [outcome] A -> Y }"


@pytest.fixture(scope="session")
def confounder_root():
    return parse_dag(CONFOUNDER_TEXT)


@pytest.fixture(scope="session")
def mediator_root():
    return parse_dag(MEDIATOR_TEXT)


@pytest.fixture(scope="session")
def instrument_root():
    return parse_dag(INSTRUMENT_TEXT)


@pytest.fixture(scope="session")
def two_known_root():
    return parse_dag(TWO_KNOWN_TEXT)


@pytest.fixture(scope="session")
def two_node():
    return parse_dag(TWO_NODE_TEXT)

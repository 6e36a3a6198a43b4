"""Shared fixtures: the two reference models and small helpers."""
import pytest

from resource_games.model import parse_model

A1_TEXT = """\
# weighted Büchi automaton: x accepting, y1 and y2 pay back resources
semiring tropical-bounded 64
sig step/1
state x  parity 2 offset 0
state y  parity 1 offset 0
state y1 parity 1 offset 2
state y2 parity 1 offset 4
trans x step(y) 0
trans y step(x) 5
trans y step(y1) 1
trans y step(y2) 2
trans y1 step(y) 0
trans y2 step(y) 0
"""

A2_TEXT = """\
semiring tropical-bounded 64
sig step/1
dist f { 4 step(x); 1 step(y1); 2 step(y2) }
dist g { 0 step(x); 2 step(y1) }
state x  parity 2 offset 0 options f g
state y1 parity 1 offset 1 options f g
state y2 parity 1 offset 4 options f
"""

THREE_PARITY_TEXT = """\
semiring tropical-bounded 16
sig step/1
state p parity 3 offset 0
state q parity 2 offset 1
state r parity 1 offset 0
trans p step(q) 1
trans q step(r) 1
trans q step(q) 2
trans r step(p) 0
"""

ALL_ODD_TEXT = """\
semiring tropical-bounded 8
sig step/1
state p parity 1 offset 0
state q parity 1 offset 2
trans p step(q) 1
trans q step(p) 0
"""

# 8-node optimal lasso x y y1 y y2 y y2 y, back to x
A1_LASSO = """\
node n0 x step(n1)
node n1 y step(n2)
node n2 y1 step(n3)
node n3 y step(n4)
node n4 y2 step(n5)
node n5 y step(n6)
node n6 y2 step(n7)
node n7 y step(n0)
root n0
"""

A1_LASSO_LEVELS = (1, 1, 0, 2, 0, 4, 2, 6)


@pytest.fixture
def a1():
    return parse_model(A1_TEXT)


@pytest.fixture
def a2():
    return parse_model(A2_TEXT)


@pytest.fixture
def three_parity():
    return parse_model(THREE_PARITY_TEXT)


@pytest.fixture
def model_file(tmp_path):
    """Write model text to a file and return its path."""
    def write(text: str, name: str = "model.txt"):
        path = tmp_path / name
        path.write_text(text, encoding="utf-8")
        return path
    return write

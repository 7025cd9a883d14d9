import pathlib

import pytest

from gvpa.parser import parse_expr, parse_spec
from gvpa.syntax import Valuation

DATA = pathlib.Path(__file__).parent / "data"
GOLDEN = pathlib.Path(__file__).parent / "golden"

TRAFFIC_TEXT = (DATA / "traffic.gvpa").read_text(encoding="utf-8")

EXAMPLE3_TEXT = """
domain { 0, 1 }
vars { v }
acts { a }
init (v = 0) -> a.delta with { v = 0 }
"""


@pytest.fixture(scope="session")
def traffic():
    return parse_spec(TRAFFIC_TEXT)


@pytest.fixture(scope="session")
def example3():
    """The congruence counterexample: P, Q, R with V(v)=0 over D={0,1}."""
    spec, _ = parse_spec(EXAMPLE3_TEXT)
    p = parse_expr("(v = 0) -> a.delta", spec)
    q = parse_expr("a.delta", spec)
    r = parse_expr("assign(v, 1).delta", spec)
    v0 = Valuation((("v", "0"),))
    return spec, p, q, r, v0

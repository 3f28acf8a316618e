import itertools

import numpy as np
import pytest
from hypothesis import strategies as st

from wlrefine.graph import from_edge_list


@st.composite
def graphs(draw, min_n=1, max_n=6, labels=0, edge_labels=0):
    n = draw(st.integers(min_n, max_n))
    pairs = list(itertools.combinations(range(n), 2))
    chosen = draw(st.lists(st.sampled_from(pairs), unique=True)) if pairs else []
    vl = draw(st.lists(st.integers(0, labels - 1), min_size=n, max_size=n)) if labels else None
    el = (draw(st.lists(st.integers(0, edge_labels - 1), min_size=len(chosen),
                        max_size=len(chosen))) if edge_labels else None)
    return from_edge_list(n, chosen, vl, el)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


# one "PASS/FAIL criterion N: ..." line per acceptance criterion, echoed at the end
ACCEPTANCE_LINES: list[str] = []


def record(number: int, ok: bool, detail: str) -> bool:
    line = f"{'PASS' if ok else 'FAIL'} criterion {number}: {detail}"
    ACCEPTANCE_LINES.append(line)
    print(line)
    return ok


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split()[2].rstrip(":"))):
            terminalreporter.write_line(line)

import pytest
from hypothesis import strategies as st

from modchaos.randproc import example2_structure, example3_structure
from modchaos.symseq import PeriodicSeq

ACCEPTANCE_LINES = []


@pytest.fixture(scope="session")
def ex2():
    return example2_structure()


@pytest.fixture(scope="session")
def ex3():
    return example3_structure()


@pytest.fixture
def acceptance():
    """Record one PASS/FAIL line for the terminal summary, then assert."""

    def record(number, name, passed, detail=""):
        ACCEPTANCE_LINES.append(f"[{number:>2}] {'PASS' if passed else 'FAIL'}  {name}  {detail}".rstrip())
        assert passed, f"criterion {number} ({name}) failed: {detail}"

    return record


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES):
            terminalreporter.write_line(line)


def periodic_seqs(m_values=(2, 3), max_prefix=4, max_block=5):
    """Strategy for random eventually periodic sequences."""

    @st.composite
    def build(draw):
        m = draw(st.sampled_from(m_values))
        sym = st.integers(1, m)
        pre = draw(st.lists(sym, max_size=max_prefix))
        block = draw(st.lists(sym, min_size=1, max_size=max_block))
        return PeriodicSeq(m, block, pre)

    return build()

from hypothesis import settings, strategies as st

from memlogic.formula import And, Equal, Exists, Forall, Iff, Implies, Member, Not, Or

settings.register_profile("default", max_examples=100, deadline=None)
settings.load_profile("default")

VARS = ("x", "y", "z", "a", "b")

variables = st.sampled_from(VARS)
atoms = st.builds(Member, variables, variables) | st.builds(Equal, variables, variables)


def _extend(inner):
    return (
        st.builds(Not, inner)
        | st.builds(And, inner, inner)
        | st.builds(Or, inner, inner)
        | st.builds(Implies, inner, inner)
        | st.builds(Iff, inner, inner)
        | st.builds(Forall, variables, inner)
        | st.builds(Exists, variables, inner)
    )


formulas = st.recursive(atoms, _extend, max_leaves=8)


@st.composite
def structures(draw, max_size=3):
    from memlogic.model import FinStructure

    n = draw(st.integers(1, max_size))
    code = draw(st.integers(0, (1 << (n * n)) - 1))
    return FinStructure(n, code)


@st.composite
def structure_and_assignment(draw, max_size=3):
    s = draw(structures(max_size))
    asg = {v: draw(st.integers(0, s.size - 1)) for v in VARS}
    return s, asg


def pytest_terminal_summary(terminalreporter):
    import sys

    mod = sys.modules.get("test_acceptance")
    if mod is not None and mod.LINES:
        terminalreporter.section("acceptance criteria")
        for line in mod.LINES:
            terminalreporter.write_line(line)

import pytest

from cocyclegap.experiments import zmod_group, zmod_rep


@pytest.fixture(scope="session")
def gamma():
    """Gamma_k, built once per session."""
    return zmod_group


@pytest.fixture(scope="session")
def rep():
    return zmod_rep


@pytest.fixture
def acceptance(request):
    """Record one PASS/FAIL line per acceptance criterion."""
    lines = request.config.__dict__.setdefault("_acceptance_lines", {})
    state = {"details": []}

    def record(number, title):
        state["number"], state["title"] = number, title
        return state["details"]

    yield record
    rep = getattr(request.node, "rep_call", None)
    if "number" in state:
        ok = rep is not None and rep.passed
        detail = "; ".join(state["details"])
        lines[state["number"]] = f"criterion {state['number']} {'PASS' if ok else 'FAIL'}: {state['title']}" + (f" [{detail}]" if detail else "")


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    if rep.when == "call":
        item.rep_call = rep


def pytest_terminal_summary(terminalreporter, config):
    lines = config.__dict__.get("_acceptance_lines")
    if lines:
        terminalreporter.section("acceptance criteria")
        for n in sorted(lines):
            terminalreporter.write_line(lines[n])

import pytest

CRITERION_LINES: dict[int, str] = {}


@pytest.fixture
def criterion(request):
    """Record a one-line PASS/FAIL verdict for an acceptance criterion."""
    state = {}

    def start(number: int, title: str) -> dict:
        state.update(number=number, title=title, detail="")
        return state

    yield start
    if not state:
        return
    rep = getattr(request.node, "rep_call", None)
    ok = rep is not None and rep.passed
    line = f"criterion {state['number']:2d} {'PASS' if ok else 'FAIL'}  {state['title']}"
    if state["detail"]:
        line += f"  [{state['detail']}]"
    CRITERION_LINES[state["number"]] = line
    print("\n" + line)


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    if rep.when == "call":
        item.rep_call = rep


def pytest_terminal_summary(terminalreporter):
    if not CRITERION_LINES:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(CRITERION_LINES):
        terminalreporter.write_line(CRITERION_LINES[number])

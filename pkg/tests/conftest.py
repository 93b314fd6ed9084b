import pytest

from hmmner.features import PseudoToken

ACCEPTANCE_RESULTS = []


def pytest_configure(config):
    config.addinivalue_line(
        "markers", "criterion(number, title): acceptance criterion checked by the test")


def pytest_runtest_logreport(report):
    if report.when != "call" and not (report.when == "setup" and report.failed):
        return
    marker = getattr(report, "criterion", None)
    if marker is not None:
        ACCEPTANCE_RESULTS.append((marker, report.outcome))


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    m = item.get_closest_marker("criterion")
    if m is not None:
        rep.criterion = (m.args[0], m.args[1], item.name)


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    by_number = {}
    for (number, title, name), outcome in ACCEPTANCE_RESULTS:
        by_number.setdefault((number, title), []).append((name, outcome))
    for (number, title), results in sorted(by_number.items()):
        ok = all(o == "passed" for _, o in results)
        terminalreporter.write_line(
            f"criterion {number}: {'PASS' if ok else 'FAIL'}  {title} "
            f"({sum(o == 'passed' for _, o in results)}/{len(results)} checks)")


def P(word, x="NN", meta="YYYY"):
    return PseudoToken(word, x, meta)


@pytest.fixture
def hand_corpus():
    """Three sentences whose counts are traced by hand in test_model.py."""
    return [
        ([P("Modi", "NNP", "ICAP"), P("spoke", "VBD")], ["B-PER", "O"]),
        ([P("hello")], ["O"]),
        ([P("Rahul", "NNP", "ICAP"), P("spoke", "VBD")], ["B-PER", "O"]),
    ]

"""Collects acceptance outcomes and prints one PASS/FAIL line per criterion."""
from collections import OrderedDict

_outcomes: "OrderedDict[str, list]" = OrderedDict()


def pytest_collection_modifyitems(items):
    for item in items:
        mark = item.get_closest_marker("criterion")
        if mark is not None:
            _outcomes.setdefault(mark.args[0], [])
            item.user_properties.append(("criterion", mark.args[0]))


def pytest_runtest_logreport(report):
    name = dict(report.user_properties).get("criterion")
    if name is None:
        return
    if report.when == "call" or (report.when == "setup" and not report.passed):
        _outcomes[name].append(report.passed)


def pytest_terminal_summary(terminalreporter):
    ran = {k: v for k, v in _outcomes.items() if v}
    if not ran:
        return
    terminalreporter.section("acceptance criteria")
    for name, results in ran.items():
        status = "PASS" if all(results) else "FAIL"
        terminalreporter.write_line(f"{status}  {name}  ({sum(results)}/{len(results)} checks)")

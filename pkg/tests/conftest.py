from collections import defaultdict

_criteria: dict[int, list[bool]] = defaultdict(list)
_labels: dict[int, str] = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(n, label): acceptance criterion covered by the test")


def pytest_collection_modifyitems(items):
    for item in items:
        marker = item.get_closest_marker("criterion")
        if marker:
            n, label = marker.args
            _labels[n] = label
            item.user_properties.append(("criterion", n))


def pytest_runtest_logreport(report):
    for key, value in report.user_properties:
        if key != "criterion":
            continue
        if report.when == "call" or report.outcome != "passed":
            _criteria[value].append(report.outcome == "passed")


def pytest_terminal_summary(terminalreporter):
    if not _labels:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(_labels):
        results = _criteria.get(n, [])
        status = "PASS" if results and all(results) else "FAIL"
        terminalreporter.write_line(f"criterion {n}: {status}  {_labels[n]}")

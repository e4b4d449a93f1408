import sys
from pathlib import Path

sys.path.insert(0, str(Path(__file__).parent))

# acceptance bookkeeping: criterion number -> [title, passed, seconds]
_CRITERIA: dict = {}
_NODE_TO_CRITERION: dict = {}


def pytest_collection_modifyitems(items):
    for item in items:
        mark = item.get_closest_marker("criterion")
        if mark is not None:
            number, title = mark.args
            _NODE_TO_CRITERION[item.nodeid] = number
            _CRITERIA.setdefault(number, [title, True, 0.0, False])


def pytest_runtest_logreport(report):
    number = _NODE_TO_CRITERION.get(report.nodeid)
    if number is None:
        return
    entry = _CRITERIA[number]
    entry[2] += report.duration
    if report.when == "call":
        entry[3] = True
    if report.failed or report.skipped:
        entry[1] = False


def pytest_terminal_summary(terminalreporter):
    if not _CRITERIA:
        return
    tr = terminalreporter
    tr.section("acceptance criteria")
    for number in sorted(_CRITERIA):
        title, passed, seconds, ran = _CRITERIA[number]
        status = "PASS" if passed and ran else ("FAIL" if ran else "NOT RUN")
        tr.write_line(f"criterion {number:2d}  {status:7s} {title}  ({seconds:.2f} s)")

import re
from collections import defaultdict

CRITERIA = {
    1: "group laws on random elements",
    2: "quadrant diagram with a non-identity permutation is the identity",
    3: "two cut orders give the same partition",
    4: "growth of C0^n",
    5: "distortion witness C0^-n A0 C0^n",
    6: "bounds on the Cayley ball",
    7: "decomposition soundness",
    8: "counting and genericity",
    9: "verified relation table",
}

_outcomes: dict[int, list[tuple[str, bool]]] = defaultdict(list)
_NAME = re.compile(r"test_acceptance\.py::test_criterion_(\d+)_(\w+)")


def pytest_runtest_logreport(report):
    m = _NAME.search(report.nodeid)
    if m is None:
        return
    if report.when == "call" or (report.when == "setup" and report.failed):
        _outcomes[int(m.group(1))].append((m.group(2), report.passed))


def pytest_terminal_summary(terminalreporter):
    if not _outcomes:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(_outcomes):
        parts = _outcomes[n]
        ok = all(passed for _, passed in parts)
        failed = [name for name, passed in parts if not passed]
        extra = f"  (failing: {', '.join(failed)})" if failed else ""
        terminalreporter.write_line(f"criterion {n}: {'PASS' if ok else 'FAIL'}  {CRITERIA[n]}{extra}")

from criteria import RESULTS

CRITERIA = range(1, 11)


def pytest_terminal_summary(terminalreporter):
    if not RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for n in CRITERIA:
        ok, detail = RESULTS.get(n, (False, "not run"))
        terminalreporter.write_line(f"criterion {n:>2}: {'PASS' if ok else 'FAIL'}  {detail}")

import logging

# criterion number -> (passed, detail); filled by test_acceptance
ACCEPTANCE = {}


def pytest_configure(config):
    logging.getLogger("spiralcut").setLevel(logging.ERROR)


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(ACCEPTANCE):
        ok, detail = ACCEPTANCE[n]
        terminalreporter.write_line(f"criterion {n:2d}: {'PASS' if ok else 'FAIL'}  {detail}")

from __future__ import annotations

# criterion number -> (title, passed, seconds, detail); filled by test_acceptance
ACCEPTANCE: dict[int, tuple[str, bool, float, str]] = {}


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(ACCEPTANCE):
        title, ok, secs, detail = ACCEPTANCE[n]
        line = f"criterion {n:2d} {'PASS' if ok else 'FAIL'} ({secs:.2f}s) {title}"
        terminalreporter.write_line(line + (f": {detail}" if detail else ""))

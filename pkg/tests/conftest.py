import sys
from pathlib import Path

sys.path.insert(0, str(Path(__file__).parent))

from acceptance_log import RESULTS  # noqa: E402


def pytest_terminal_summary(terminalreporter):
    if not RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for crit in sorted(RESULTS):
        parts = RESULTS[crit]
        verdict = "PASS" if all(ok for _, ok, _ in parts) else "FAIL"
        terminalreporter.write_line(f"Criterion {crit}: {verdict}")
        for part, ok, detail in parts:
            terminalreporter.write_line(f"    [{'PASS' if ok else 'FAIL'}] {part} {detail}".rstrip())

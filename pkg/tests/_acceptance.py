"""Collector for acceptance verdicts, printed by the terminal-summary hook in conftest."""

RESULTS = {}


def record(number: int, title: str, ok: bool, detail: str) -> str:
    line = f"ACCEPTANCE {number} {'PASS' if ok else 'FAIL'} [{title}] {detail}"
    RESULTS[number] = line
    return line

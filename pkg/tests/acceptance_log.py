"""One line per acceptance criterion, shared between the tests and conftest."""

LINES: list[str] = []


def record(n: int, ok: bool, detail: str) -> str:
    line = f"[{'PASS' if ok else 'FAIL'}] criterion {n}: {detail}"
    LINES.append(line)
    print(line)
    return line

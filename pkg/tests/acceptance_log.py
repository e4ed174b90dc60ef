"""Collects one pass/fail line per acceptance criterion for the session summary."""
LINES: list[str] = []


def report(number, ok: bool, detail: str) -> str:
    line = f"ACCEPTANCE {number}: {'PASS' if ok else 'FAIL'}  {detail}"
    LINES.append(line)
    print(line, flush=True)
    return line

"""Shared store of acceptance-criterion outcomes, printed at the end of the run."""

RESULTS: dict = {}


def record(criterion: int, part: str, ok: bool, detail: str = "") -> bool:
    """Remember the outcome of one part of an acceptance criterion and print it."""
    RESULTS.setdefault(criterion, []).append((part, bool(ok), detail))
    print(f"criterion {criterion} / {part}: {'PASS' if ok else 'FAIL'} {detail}".rstrip())
    return bool(ok)

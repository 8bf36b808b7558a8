"""Plain-text matrix files.

Both formats start with a header line ``rows cols [z]``.

* Symbol matrices (proto-matrices and partitioning matrices) follow with one
  line per row holding ``cols`` symbols from ``{0, 1, *}``; symbols may be
  written contiguously or separated by whitespace.  ``*`` is an absent edge.
* Power matrices of circulant-based codes follow with whitespace-separated
  integers, ``-1`` marking an all-zero block.  ``z`` is mandatory here.

Lines starting with ``#`` and blank lines are ignored.
"""

from __future__ import annotations

import os
import tempfile
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from ._validation import STAR
from .construct import CBMatrix

__all__ = [
    "MatrixFile",
    "parse_matrix",
    "read_matrix",
    "format_symbols",
    "format_powers",
    "write_matrix",
    "cb_from_powers",
    "atomic_write_text",
]

_SYM = {"0": 0, "1": 1, "*": STAR}


@dataclass
class MatrixFile:
    """Parsed matrix file; ``kind`` is ``"symbols"`` or ``"powers"``."""

    kind: str
    matrix: np.ndarray
    z: int | None = None


def _lines(text):
    for raw in text.splitlines():
        line = raw.strip()
        if line and not line.startswith("#"):
            yield line


def parse_matrix(text: str, kind: str = "auto") -> MatrixFile:
    """Parse matrix text.

    With ``kind="auto"`` a file containing ``*`` or contiguous symbol rows is
    read as a symbol matrix, anything else as a power matrix.
    """
    lines = list(_lines(text))
    if not lines:
        raise ValueError("empty matrix file")
    head = lines[0].split()
    if len(head) not in (2, 3) or not all(h.lstrip("-").isdigit() for h in head):
        raise ValueError(f"bad header {lines[0]!r}; expected 'rows cols [z]'")
    rows, cols = int(head[0]), int(head[1])
    z = int(head[2]) if len(head) == 3 else None
    body = lines[1:]
    if len(body) != rows:
        raise ValueError(f"header announces {rows} rows, found {len(body)}")
    if kind == "auto":
        contiguous = all(len(line.split()) == 1 and len(line) == cols for line in body)
        kind = "symbols" if contiguous or any("*" in line for line in body) else "powers"
    if kind == "symbols":
        out = []
        for line in body:
            toks = list(line) if len(line.split()) == 1 else line.split()
            if len(toks) != cols or any(t not in _SYM for t in toks):
                raise ValueError(f"bad symbol row {line!r}")
            out.append([_SYM[t] for t in toks])
        return MatrixFile("symbols", np.array(out, dtype=np.int8).reshape(rows, cols), z)
    if kind == "powers":
        if z is None:
            raise ValueError("power matrices need z in the header")
        try:
            M = np.array([[int(t) for t in line.split()] for line in body], dtype=np.int64)
        except ValueError as exc:
            raise ValueError(f"bad power row: {exc}") from None
        if M.shape != (rows, cols):
            raise ValueError(f"power matrix shape {M.shape} does not match header")
        if np.any(M < -1) or np.any(M >= z):
            raise ValueError("powers must lie in [-1, z)")
        return MatrixFile("powers", M, z)
    raise ValueError(f"unknown matrix kind {kind!r}")


def read_matrix(path, kind: str = "auto") -> MatrixFile:
    return parse_matrix(Path(path).read_text(), kind)


def format_symbols(M, z: int | None = None) -> str:
    """Text of a symbol matrix.

    >>> print(format_symbols([[0, 1, -1]]), end="")
    1 3
    01*
    """
    M = np.asarray(M)
    inv = {v: k for k, v in _SYM.items()}
    head = f"{M.shape[0]} {M.shape[1]}" + ("" if z is None else f" {z}")
    rows = ["".join(inv[int(v)] for v in row) for row in M]
    return "\n".join([head, *rows]) + "\n"


def format_powers(M, z: int) -> str:
    M = np.asarray(M, dtype=np.int64)
    head = f"{M.shape[0]} {M.shape[1]} {z}"
    return "\n".join([head, *(" ".join(str(int(v)) for v in row) for row in M)]) + "\n"


def cb_from_powers(M, z: int) -> CBMatrix:
    """Circulant-based matrix with one circulant per non-negative power."""
    M = np.asarray(M, dtype=np.int64)
    r, c = np.nonzero(M >= 0)
    nz = np.stack([r, c, M[r, c]], axis=1)
    return CBMatrix(M.shape[0], M.shape[1], int(z), nz)


def atomic_write_text(path, text: str) -> None:
    """Write ``text`` to ``path`` through a temporary file and a rename."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def write_matrix(path, M, z: int | None = None, kind: str = "symbols") -> None:
    text = format_symbols(M, z) if kind == "symbols" else format_powers(M, z)
    atomic_write_text(path, text)

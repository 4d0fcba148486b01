"""Plain-text matrix and vector files.

Format: first line ``rows cols``, then one whitespace-separated row of
decimal entries per line. Vectors are stored as single-column matrices.
"""
from __future__ import annotations

import numpy as np


class MatrixFormatError(ValueError):
    """Malformed matrix file; message names the file and line."""


def read_matrix(path) -> np.ndarray:
    with open(path) as fh:
        lines = fh.read().splitlines()
    if not lines:
        raise MatrixFormatError(f"{path}:1: empty file")
    header = lines[0].split()
    if len(header) != 2:
        raise MatrixFormatError(f"{path}:1: expected header 'rows cols'")
    try:
        rows, cols = int(header[0]), int(header[1])
    except ValueError:
        raise MatrixFormatError(f"{path}:1: non-integer dimensions {header!r}") from None
    if rows < 0 or cols < 0:
        raise MatrixFormatError(f"{path}:1: negative dimensions")
    body = [ln for ln in lines[1:] if ln.strip()]
    if len(body) != rows:
        raise MatrixFormatError(
            f"{path}:{len(lines)}: expected {rows} data rows, found {len(body)}"
        )
    out = np.empty((rows, cols))
    for i, ln in enumerate(body):
        parts = ln.split()
        if len(parts) != cols:
            raise MatrixFormatError(
                f"{path}:{i + 2}: expected {cols} entries, found {len(parts)}"
            )
        try:
            out[i] = [float(x) for x in parts]
        except ValueError:
            raise MatrixFormatError(f"{path}:{i + 2}: non-numeric entry") from None
    if not np.all(np.isfinite(out)):
        raise MatrixFormatError(f"{path}: non-finite entries")
    return out


def write_matrix(path, M) -> None:
    M = np.atleast_2d(np.asarray(M, dtype=float))
    with open(path, "w") as fh:
        fh.write(f"{M.shape[0]} {M.shape[1]}\n")
        for row in M:
            fh.write(" ".join(repr(float(x)) for x in row) + "\n")


def read_vector(path) -> np.ndarray:
    M = read_matrix(path)
    if M.shape[1] != 1:
        raise MatrixFormatError(f"{path}: expected a single-column vector, got {M.shape[1]} columns")
    return M[:, 0]


def write_vector(path, v) -> None:
    v = np.asarray(v, dtype=float).reshape(-1, 1)
    write_matrix(path, v)

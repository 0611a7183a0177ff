"""MatrixMarket persistence for dense matrices.

Writes use the array format in the standard column-major entry order
with ``%.17g`` values, so float64 round-trips are value-exact and the
emitted bytes are deterministic. Reads accept array and coordinate
files (real or integer field, general or symmetric); every parse error
reports the offending line number.
"""

import numpy as np

from .errors import MatrixMarketError

_HEADER_PREFIX = "%%matrixmarket"


def _tokens(path):
    """Yield (line_no, stripped_line) skipping blank and comment lines."""
    with open(path, "r", encoding="ascii") as fh:
        for line_no, raw in enumerate(fh, start=1):
            line = raw.strip()
            if not line or (line.startswith("%") and line_no > 1):
                continue
            yield line_no, line


def _parse_floats(path, line_no, parts, count):
    if len(parts) != count:
        raise MatrixMarketError(path, line_no, f"expected {count} value(s), got {len(parts)}")
    out = []
    for tok in parts:
        try:
            out.append(float(tok))
        except ValueError:
            raise MatrixMarketError(path, line_no, f"non-numeric token {tok!r}") from None
    return out


def _parse_dims(path, line_no, parts, count):
    if len(parts) != count:
        raise MatrixMarketError(
            path, line_no, f"size line must have {count} integers, got {len(parts)}"
        )
    out = []
    for tok in parts:
        try:
            out.append(int(tok))
        except ValueError:
            raise MatrixMarketError(path, line_no, f"non-integer size token {tok!r}") from None
        if out[-1] < 0:
            raise MatrixMarketError(path, line_no, f"negative size {tok!r}")
    return out


def read_matrix(path):
    """Read a MatrixMarket file into a dense float64 matrix."""
    lines = _tokens(path)
    try:
        line_no, header = next(lines)
    except StopIteration:
        raise MatrixMarketError(path, 1, "empty file") from None
    parts = header.lower().split()
    if line_no != 1 or len(parts) != 5 or parts[0] != _HEADER_PREFIX or parts[1] != "matrix":
        raise MatrixMarketError(path, line_no, f"malformed header {header!r}")
    layout, field, symmetry = parts[2], parts[3], parts[4]
    if layout not in ("array", "coordinate"):
        raise MatrixMarketError(path, line_no, f"unsupported layout {layout!r}")
    if field not in ("real", "double", "integer"):
        raise MatrixMarketError(path, line_no, f"unsupported field {field!r}")
    if symmetry not in ("general", "symmetric"):
        raise MatrixMarketError(path, line_no, f"unsupported symmetry {symmetry!r}")

    try:
        line_no, size_line = next(lines)
    except StopIteration:
        raise MatrixMarketError(path, 2, "missing size line") from None

    if layout == "array":
        if symmetry != "general":
            raise MatrixMarketError(path, 1, "symmetric storage is only supported in coordinate form")
        rows, cols = _parse_dims(path, line_no, size_line.split(), 2)
        values = np.empty(rows * cols, dtype=np.float64)
        filled = 0
        last_line = line_no
        for line_no, line in lines:
            last_line = line_no
            if filled >= values.size:
                raise MatrixMarketError(path, line_no, "more entries than rows*cols")
            values[filled] = _parse_floats(path, line_no, line.split(), 1)[0]
            filled += 1
        if filled != values.size:
            raise MatrixMarketError(
                path, last_line + 1, f"expected {values.size} entries, found {filled}"
            )
        matrix = values.reshape((cols, rows)).T  # file order is column-major
        return np.ascontiguousarray(matrix)

    rows, cols, nnz = _parse_dims(path, line_no, size_line.split(), 3)
    if symmetry == "symmetric" and rows != cols:
        raise MatrixMarketError(path, line_no, "symmetric matrix must be square")
    matrix = np.zeros((rows, cols), dtype=np.float64)
    seen = set()
    filled = 0
    last_line = line_no
    for line_no, line in lines:
        last_line = line_no
        if filled >= nnz:
            raise MatrixMarketError(path, line_no, f"more than {nnz} coordinate entries")
        parts = line.split()
        if len(parts) != 3:
            raise MatrixMarketError(path, line_no, f"expected 'i j value', got {line!r}")
        i, j = _parse_dims(path, line_no, parts[:2], 2)
        value = _parse_floats(path, line_no, parts[2:], 1)[0]
        if not (1 <= i <= rows and 1 <= j <= cols):
            raise MatrixMarketError(
                path, line_no, f"index ({i}, {j}) outside {rows}x{cols} matrix"
            )
        if (i, j) in seen:
            raise MatrixMarketError(path, line_no, f"duplicate entry for ({i}, {j})")
        seen.add((i, j))
        matrix[i - 1, j - 1] = value
        if symmetry == "symmetric" and i != j:
            matrix[j - 1, i - 1] = value
        filled += 1
    if filled != nnz:
        raise MatrixMarketError(path, last_line + 1, f"expected {nnz} entries, found {filled}")
    return matrix


def write_matrix(matrix, path):
    """Write a dense matrix as MatrixMarket array/real/general."""
    matrix = np.asarray(matrix, dtype=np.float64)
    if matrix.ndim != 2:
        raise ValueError(f"expected a 2-D matrix, got shape {matrix.shape}")
    if not np.all(np.isfinite(matrix)):
        raise ValueError("refusing to write non-finite matrix entries")
    rows, cols = matrix.shape
    with open(path, "w", encoding="ascii", newline="\n") as fh:
        fh.write("%%MatrixMarket matrix array real general\n")
        fh.write(f"{rows} {cols}\n")
        for j in range(cols):
            for i in range(rows):
                fh.write("%.17g\n" % matrix[i, j])

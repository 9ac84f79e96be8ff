"""Exact dense linear algebra over the scalar field.

Matrices are tuples of row tuples. Everything here is exact; rank decisions
never touch floating point.
"""

from __future__ import annotations

from collections.abc import Sequence
from fractions import Fraction

from shift_spectra.errors import DegeneracyError
from shift_spectra.exactnum import Scalar

Matrix = tuple[tuple[Scalar, ...], ...]
Vector = tuple[Scalar, ...]

_ZERO = Fraction(0)
_ONE = Fraction(1)


def as_matrix(rows: Sequence[Sequence[Scalar]]) -> Matrix:
    return tuple(tuple(row) for row in rows)


def zeros(n_rows: int, n_cols: int | None = None) -> Matrix:
    cols = n_rows if n_cols is None else n_cols
    return tuple((_ZERO,) * cols for _ in range(n_rows))


def identity(n: int) -> Matrix:
    return tuple(tuple(_ONE if i == j else _ZERO for j in range(n)) for i in range(n))


def shape(a: Matrix) -> tuple[int, int]:
    return len(a), len(a[0]) if a else 0


def transpose(a: Matrix) -> Matrix:
    return tuple(zip(*a, strict=True)) if a else ()


def matmul(a: Matrix, b: Matrix) -> Matrix:
    if shape(a)[1] != len(b):
        raise ValueError(f"shape mismatch {shape(a)} @ {shape(b)}")
    columns = transpose(b)
    out = []
    for row in a:
        nonzero = [(k, x) for k, x in enumerate(row) if x != 0]
        out.append(tuple(_dot_sparse(nonzero, col) for col in columns))
    return tuple(out)


def _dot_sparse(nonzero: list[tuple[int, Scalar]], col: Sequence[Scalar]) -> Scalar:
    acc: Scalar = _ZERO
    for k, x in nonzero:
        y = col[k]
        if y != 0:
            acc = acc + x * y
    return acc


def matvec(a: Matrix, v: Sequence[Scalar]) -> Vector:
    return tuple(_dot_sparse([(k, x) for k, x in enumerate(row) if x != 0], v) for row in a)


def vecmat(v: Sequence[Scalar], a: Matrix) -> Vector:
    """Row vector times matrix."""
    return matvec(transpose(a), v)


def add(a: Matrix, b: Matrix) -> Matrix:
    return tuple(
        tuple(x + y for x, y in zip(ra, rb, strict=True)) for ra, rb in zip(a, b, strict=True)
    )


def scale(a: Matrix, factor: Scalar) -> Matrix:
    return tuple(tuple(x * factor for x in row) for row in a)


def shift_diagonal(a: Matrix, lam: Scalar) -> Matrix:
    """``a - lam·I``."""
    return tuple(
        tuple(x - lam if i == j else x for j, x in enumerate(row)) for i, row in enumerate(a)
    )


def power(a: Matrix, exponent: int) -> Matrix:
    result = identity(len(a))
    for _ in range(exponent):
        result = matmul(result, a)
    return result


def is_upper_triangular(a: Matrix) -> bool:
    return all(a[i][j] == 0 for i in range(len(a)) for j in range(min(i, len(a[i]))))


def rank(a: Matrix) -> int:
    """Rank by fraction-free (Bareiss) elimination."""
    rows = [list(row) for row in a]
    if not rows:
        return 0
    n_rows, n_cols = len(rows), len(rows[0])
    previous_pivot: Scalar = _ONE
    r = 0
    for col in range(n_cols):
        pivot_row = next((i for i in range(r, n_rows) if rows[i][col] != 0), None)
        if pivot_row is None:
            continue
        rows[r], rows[pivot_row] = rows[pivot_row], rows[r]
        pivot = rows[r][col]
        for i in range(r + 1, n_rows):
            lead = rows[i][col]
            for j in range(col, n_cols):
                rows[i][j] = (pivot * rows[i][j] - lead * rows[r][j]) / previous_pivot
        previous_pivot = pivot
        r += 1
        if r == n_rows:
            break
    return r


def nullity(a: Matrix) -> int:
    return shape(a)[1] - rank(a)


def _rref(a: Matrix) -> tuple[list[list[Scalar]], list[int]]:
    rows = [list(row) for row in a]
    n_rows, n_cols = shape(a)
    pivots: list[int] = []
    r = 0
    for col in range(n_cols):
        pivot_row = next((i for i in range(r, n_rows) if rows[i][col] != 0), None)
        if pivot_row is None:
            continue
        rows[r], rows[pivot_row] = rows[pivot_row], rows[r]
        inv = 1 / rows[r][col]
        rows[r] = [x * inv for x in rows[r]]
        for i in range(n_rows):
            if i != r and rows[i][col] != 0:
                factor = rows[i][col]
                rows[i] = [x - factor * y for x, y in zip(rows[i], rows[r], strict=True)]
        pivots.append(col)
        r += 1
        if r == n_rows:
            break
    return rows, pivots


def kernel(a: Matrix) -> list[Vector]:
    """Basis of the right null space."""
    rows, pivots = _rref(a)
    n_cols = shape(a)[1]
    free = [c for c in range(n_cols) if c not in pivots]
    basis: list[Vector] = []
    for f in free:
        v: list[Scalar] = [_ZERO] * n_cols
        v[f] = _ONE
        for row_index, p in enumerate(pivots):
            v[p] = -rows[row_index][f]
        basis.append(tuple(v))
    return basis


def inverse(a: Matrix) -> Matrix:
    """Gauss-Jordan inverse.

    Raises:
        DegeneracyError: If the matrix is singular.
    """
    n = len(a)
    augmented = as_matrix([list(row) + list(e) for row, e in zip(a, identity(n), strict=True)])
    rows, pivots = _rref(augmented)
    if pivots[:n] != list(range(n)):
        raise DegeneracyError("matrix is singular")
    return tuple(tuple(row[n:]) for row in rows[:n])


def solve(a: Matrix, b: Sequence[Scalar]) -> Vector:
    """Solve ``a·x = b`` for square non-singular ``a``."""
    n = len(a)
    augmented = as_matrix([[*row, rhs] for row, rhs in zip(a, b, strict=True)])
    rows, pivots = _rref(augmented)
    if pivots[:n] != list(range(n)):
        raise DegeneracyError("matrix is singular")
    return tuple(rows[i][n] for i in range(n))


def submatrix(a: Matrix, indices: Sequence[int]) -> Matrix:
    """Principal submatrix on ``indices``."""
    return tuple(tuple(a[i][j] for j in indices) for i in indices)

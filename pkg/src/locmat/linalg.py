"""Exact dense and sparse linear algebra over a :class:`~locmat.field.FieldSpec`.

Matrices are lists of row lists. Elimination always pivots on the first
nonzero column and, within it, the first nonzero row at or below the
current pivot row, so every result is deterministic.
"""

from __future__ import annotations

from .errors import NotInvertible
from .field import FieldSpec


def zeros(rows: int, cols: int) -> list[list]:
    return [[0] * cols for _ in range(rows)]


def identity(n: int) -> list[list]:
    m = zeros(n, n)
    for i in range(n):
        m[i][i] = 1
    return m


def matmul(a: list[list], b: list[list], field: FieldSpec) -> list[list]:
    n_inner = len(b)
    cols = len(b[0]) if b else 0
    out = []
    for row in a:
        acc = [0] * cols
        for k in range(n_inner):
            r = row[k]
            if r == 0:
                continue
            bk = b[k]
            for j in range(cols):
                v = bk[j]
                if v:
                    acc[j] += r * v
        out.append([field.normalize(v) for v in acc])
    return out


def rref(matrix: list[list], field: FieldSpec) -> tuple[list[list], list[int]]:
    """Reduced row echelon form and pivot columns. The input is not modified."""
    m = [list(row) for row in matrix]
    n_rows = len(m)
    n_cols = len(m[0]) if m else 0
    pivots: list[int] = []
    piv_r = 0
    for c in range(n_cols):
        if piv_r == n_rows:
            break
        found = next((r for r in range(piv_r, n_rows) if m[r][c] != 0), None)
        if found is None:
            continue
        if found != piv_r:
            m[piv_r], m[found] = m[found], m[piv_r]
        prow = m[piv_r]
        inv = field.inv(prow[c])
        if inv != 1:
            prow = m[piv_r] = [field.normalize(v * inv) for v in prow]
        for r in range(n_rows):
            if r == piv_r:
                continue
            f = m[r][c]
            if f == 0:
                continue
            row = m[r]
            m[r] = [field.normalize(x - f * y) if y else x for x, y in zip(row, prow)]
        pivots.append(c)
        piv_r += 1
    return m, pivots


def rank(matrix: list[list], field: FieldSpec) -> int:
    return len(rref(matrix, field)[1])


def solve_kernel(matrix: list[list], field: FieldSpec, n_cols: int | None = None) -> list[list]:
    """Basis of the right nullspace ``{v : M v = 0}``.

    One basis vector per free column, in ascending column order; the free
    coordinate is 1 and the other free coordinates are 0. For
    ``[[1, 1], [2, 2]]`` this gives ``[[-1, 1]]``.
    """
    if n_cols is None:
        n_cols = len(matrix[0]) if matrix else 0
    if not matrix:
        return [[1 if i == j else 0 for i in range(n_cols)] for j in range(n_cols)]
    r, pivots = rref(matrix, field)
    pivot_set = set(pivots)
    basis = []
    for f in range(n_cols):
        if f in pivot_set:
            continue
        v = [0] * n_cols
        v[f] = 1
        for row_idx, pc in enumerate(pivots):
            v[pc] = field.neg(r[row_idx][f])
        basis.append(v)
    return basis


def inverse(matrix: list[list], field: FieldSpec) -> list[list]:
    """Gauss-Jordan inverse; raises :class:`NotInvertible` on a singular input."""
    n = len(matrix)
    aug = [list(row) + [1 if i == j else 0 for j in range(n)] for i, row in enumerate(matrix)]
    r, pivots = rref(aug, field)
    if pivots[:n] != list(range(n)) or len(pivots) < n:
        raise NotInvertible("matrix is singular")
    return [row[n:] for row in r[:n]]


def is_invertible(matrix: list[list], field: FieldSpec) -> bool:
    return len(matrix) == rank(matrix, field)


def column_echelon_basis(vectors: list[dict], field: FieldSpec) -> list[dict]:
    """Sparse incremental elimination: an echelon basis of the span of ``vectors``.

    Vectors are dicts from orderable keys to nonzero scalars. Used for ranks of
    element families whose coordinates live in a large monomial basis.
    """
    basis: dict = {}  # pivot key -> normalized vector
    for vec in vectors:
        v = {k: c for k, c in vec.items() if c != 0}
        while v:
            lead = min(v)
            b = basis.get(lead)
            if b is None:
                inv = field.inv(v[lead])
                basis[lead] = {k: field.normalize(c * inv) for k, c in v.items()}
                break
            f = v[lead]
            for k, c in b.items():
                nv = field.normalize(v.get(k, 0) - f * c)
                if nv:
                    v[k] = nv
                else:
                    v.pop(k, None)
    return [basis[k] for k in sorted(basis)]


def sparse_rank(vectors: list[dict], field: FieldSpec) -> int:
    return len(column_echelon_basis(vectors, field))

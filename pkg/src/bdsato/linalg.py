"""Exact linear algebra over Scalar matrices and a generic ring determinant."""
from __future__ import annotations

from .errors import PreconditionError
from .scalars import Scalar

Matrix = list[list[Scalar]]


def identity(n: int, m: int = 1) -> Matrix:
    return [[Scalar.one(m) if i == j else Scalar.zero(m) for j in range(n)]
            for i in range(n)]


def mat_mul(a: Matrix, b: Matrix) -> Matrix:
    rows, inner, cols = len(a), len(b), len(b[0])
    out = []
    for i in range(rows):
        row = []
        for j in range(cols):
            acc = a[i][0] * b[0][j]
            for k in range(1, inner):
                acc = acc + a[i][k] * b[k][j]
            row.append(acc)
        out.append(row)
    return out


def mat_vec(a: Matrix, v: list[Scalar]) -> list[Scalar]:
    return [sum((a[i][k] * v[k] for k in range(1, len(v))), a[i][0] * v[0])
            for i in range(len(a))]


def rref(mat: Matrix) -> tuple[Matrix, list[int]]:
    """Reduced row echelon form; returns (matrix, pivot column indices)."""
    m = [row[:] for row in mat]
    if not m:
        return m, []
    rows, cols = len(m), len(m[0])
    pivots: list[int] = []
    r = 0
    for c in range(cols):
        if r == rows:
            break
        pivot = next((i for i in range(r, rows) if not m[i][c].is_zero), None)
        if pivot is None:
            continue
        m[r], m[pivot] = m[pivot], m[r]
        inv = m[r][c].inverse()
        m[r] = [x * inv for x in m[r]]
        for i in range(rows):
            if i != r and not m[i][c].is_zero:
                factor = m[i][c]
                m[i] = [x - factor * y for x, y in zip(m[i], m[r])]
        pivots.append(c)
        r += 1
    return m, pivots


def rank(mat: Matrix) -> int:
    return len(rref(mat)[1])


def nullspace(mat: Matrix, ncols: int, m_index: int = 1) -> list[list[Scalar]]:
    """Basis of {x : mat @ x = 0}, one vector per free column."""
    if not mat:
        return [[Scalar.one(m_index) if i == j else Scalar.zero(m_index)
                 for i in range(ncols)] for j in range(ncols)]
    red, pivots = rref(mat)
    free = [c for c in range(ncols) if c not in pivots]
    basis = []
    for fc in free:
        vec = [Scalar.zero(m_index)] * ncols
        vec[fc] = Scalar.one(m_index)
        for r, pc in enumerate(pivots):
            vec[pc] = -red[r][fc]
        basis.append(vec)
    return basis


def solve(mat: Matrix, rhs: list[Scalar]) -> list[Scalar] | None:
    """One solution of mat @ x = rhs, or None if inconsistent."""
    if not mat:
        return None
    aug = [row[:] + [rhs[i]] for i, row in enumerate(mat)]
    red, pivots = rref(aug)
    ncols = len(mat[0])
    if ncols in pivots:
        return None
    x = [Scalar.zero(rhs[0].m)] * ncols
    for r, pc in enumerate(pivots):
        x[pc] = red[r][ncols]
    return x


def invert(mat: Matrix) -> Matrix:
    n = len(mat)
    m_index = mat[0][0].m
    aug = [row[:] + identity(n, m_index)[i] for i, row in enumerate(mat)]
    red, pivots = rref(aug)
    if pivots != list(range(n)):
        raise PreconditionError("singular matrix")
    return [row[n:] for row in red]


def det_ring(rows, zero):
    """Determinant over any commutative ring (elements support +, *, -).

    Expansion by minors over column bitmasks; fine for the small matrices
    used here (Wronskians of at most 7 functions).
    """
    n = len(rows)
    if n == 0:
        raise PreconditionError("empty determinant is defined by the caller")
    memo: dict[int, object] = {}

    def rec(mask: int, depth: int):
        if depth == n:
            return None
        if mask in memo:
            return memo[mask]
        acc = None
        sign = 1
        for c in range(n):
            if not (mask >> c) & 1:
                entry = rows[depth][c]
                sub = rec(mask | (1 << c), depth + 1)
                term = entry if sub is None else entry * sub
                if sign < 0:
                    term = -term
                acc = term if acc is None else acc + term
                sign = -sign
        if acc is None:
            acc = zero
        memo[mask] = acc
        return acc

    result = rec(0, 0)
    return zero if result is None else result

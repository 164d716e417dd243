"""Dense exact matrix algebra over GF(2^m).

Everything is elimination-based: rank decides nonsingularity, there is
no determinant code path.  Pivoting always takes the first nonzero
entry in column order, so results are deterministic.  Matrices are
value-semantic; operations return fresh objects and never mutate their
inputs.
"""

from itertools import combinations

from .errors import CapExceededError, SingularMatrixError
from .gf2m import Field


class Matrix:
    """Row-major dense matrix whose entries live in one Field."""

    __slots__ = ("field", "rows", "cols", "data")

    def __init__(self, field: Field, data: list[list[int]]):
        self.field = field
        self.rows = len(data)
        self.cols = len(data[0]) if data else 0
        for row in data:
            if len(row) != self.cols:
                raise ValueError("ragged rows")
            for v in row:
                field.check(v)
        self.data = [list(row) for row in data]

    @classmethod
    def zeros(cls, field: Field, rows: int, cols: int) -> "Matrix":
        return cls(field, [[0] * cols for _ in range(rows)])

    @classmethod
    def identity(cls, field: Field, n: int) -> "Matrix":
        return cls(field, [[1 if i == j else 0 for j in range(n)] for i in range(n)])

    @classmethod
    def column(cls, field: Field, entries: list[int]) -> "Matrix":
        return cls(field, [[v] for v in entries])

    def get(self, i: int, j: int) -> int:
        return self.data[i][j]

    def row(self, i: int) -> list[int]:
        return list(self.data[i])

    def col(self, j: int) -> list[int]:
        return [row[j] for row in self.data]

    def column_vector(self) -> list[int]:
        if self.cols != 1:
            raise ValueError("not a column vector")
        return [row[0] for row in self.data]

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, Matrix)
            and other.field == self.field
            and other.data == self.data
        )

    def __hash__(self):
        return hash((self.field, tuple(tuple(r) for r in self.data)))

    def __repr__(self) -> str:
        return f"Matrix({self.rows}x{self.cols} over GF(2^{self.field.m}))"


def mat_mul(a: Matrix, b: Matrix) -> Matrix:
    if a.field != b.field:
        raise ValueError("field mismatch")
    if a.cols != b.rows:
        raise ValueError(f"dimension mismatch: {a.cols} vs {b.rows}")
    f = a.field
    out = [[0] * b.cols for _ in range(a.rows)]
    for i in range(a.rows):
        arow = a.data[i]
        orow = out[i]
        for k in range(a.cols):
            aik = arow[k]
            if aik == 0:
                continue
            brow = b.data[k]
            for j in range(b.cols):
                if brow[j]:
                    orow[j] ^= f.mul(aik, brow[j])
    return Matrix(f, out)


def mat_vec(a: Matrix, v: list[int]) -> list[int]:
    """a times a column vector given as a plain list."""
    if a.cols != len(v):
        raise ValueError(f"dimension mismatch: {a.cols} vs {len(v)}")
    f = a.field
    out = [0] * a.rows
    for i in range(a.rows):
        acc = 0
        for k, aik in enumerate(a.data[i]):
            if aik and v[k]:
                acc ^= f.mul(aik, v[k])
        out[i] = acc
    return out


def transpose(a: Matrix) -> Matrix:
    return Matrix(a.field, [[a.data[i][j] for i in range(a.rows)] for j in range(a.cols)])


def vstack(a: Matrix, b: Matrix) -> Matrix:
    if a.field != b.field:
        raise ValueError("field mismatch")
    if a.cols != b.cols:
        raise ValueError(f"column mismatch: {a.cols} vs {b.cols}")
    return Matrix(a.field, a.data + b.data)


def submatrix(a: Matrix, row_idx, col_idx) -> Matrix:
    rows = list(row_idx)
    cols = list(col_idx)
    for i in rows:
        if not 0 <= i < a.rows:
            raise ValueError(f"row index {i} out of range")
    for j in cols:
        if not 0 <= j < a.cols:
            raise ValueError(f"column index {j} out of range")
    return Matrix(a.field, [[a.data[i][j] for j in cols] for i in rows])


def cauchy(field: Field, row_points: list[int], col_points: list[int]) -> Matrix:
    """Matrix with entry (i, j) = 1/(row_points[i] + col_points[j]).

    Points must be pairwise distinct with no overlap between the two
    lists; in characteristic 2 that is exactly what keeps every sum
    nonzero, and it makes every square submatrix nonsingular.
    """
    if len(set(row_points)) != len(row_points):
        raise ValueError("duplicate row points")
    if len(set(col_points)) != len(col_points):
        raise ValueError("duplicate column points")
    overlap = set(row_points) & set(col_points)
    if overlap:
        raise ValueError(f"row/column point overlap: {sorted(overlap)}")
    for p in row_points + col_points:
        field.check(p)
    return Matrix(
        field,
        [[field.inv(a ^ b) for b in col_points] for a in row_points],
    )


def _eliminate(field: Field, data: list[list[int]], col_limit: int | None = None):
    """In-place forward elimination; returns list of (row, pivot_col).

    Pivots are searched only in the first col_limit columns (all by
    default); row operations always span the full width.
    """
    rows = len(data)
    cols = len(data[0]) if rows else 0
    pivots = []
    r = 0
    for c in range(cols if col_limit is None else col_limit):
        piv = None
        for i in range(r, rows):
            if data[i][c]:
                piv = i
                break
        if piv is None:
            continue
        data[r], data[piv] = data[piv], data[r]
        inv_p = field.inv(data[r][c])
        if inv_p != 1:
            data[r] = [field.mul(inv_p, v) for v in data[r]]
        prow = data[r]
        for i in range(rows):
            if i != r and data[i][c]:
                f = data[i][c]
                irow = data[i]
                for j in range(c, cols):
                    if prow[j]:
                        irow[j] ^= field.mul(f, prow[j])
        pivots.append((r, c))
        r += 1
        if r == rows:
            break
    return pivots


def rank(a: Matrix) -> int:
    data = [list(row) for row in a.data]
    return len(_eliminate(a.field, data))


def invert(a: Matrix) -> Matrix:
    if a.rows != a.cols:
        raise ValueError("only square matrices can be inverted")
    n = a.rows
    f = a.field
    aug = [a.data[i] + [1 if i == j else 0 for j in range(n)] for i in range(n)]
    pivots = _eliminate(f, aug, col_limit=n)
    if len(pivots) != n:
        raise SingularMatrixError(f"singular {n}x{n} matrix")
    return Matrix(f, [row[n:] for row in aug])


def solve(a: Matrix, b: list[int]) -> list[int]:
    """One solution x of a*x = b (free variables set to zero)."""
    if len(b) != a.rows:
        raise ValueError(f"dimension mismatch: {a.rows} vs {len(b)}")
    f = a.field
    aug = [a.data[i] + [b[i]] for i in range(a.rows)]
    r = 0
    pivots = []
    for c in range(a.cols):
        piv = None
        for i in range(r, a.rows):
            if aug[i][c]:
                piv = i
                break
        if piv is None:
            continue
        aug[r], aug[piv] = aug[piv], aug[r]
        inv_p = f.inv(aug[r][c])
        if inv_p != 1:
            aug[r] = [f.mul(inv_p, v) for v in aug[r]]
        prow = aug[r]
        for i in range(a.rows):
            if i != r and aug[i][c]:
                fac = aug[i][c]
                irow = aug[i]
                for j in range(c, a.cols + 1):
                    if prow[j]:
                        irow[j] ^= f.mul(fac, prow[j])
        pivots.append((r, c))
        r += 1
        if r == a.rows:
            break
    for i in range(r, a.rows):
        if aug[i][a.cols]:
            raise ValueError("inconsistent system")
    x = [0] * a.cols
    for row_i, col_i in pivots:
        x[col_i] = aug[row_i][a.cols]
    return x


def null_space(a: Matrix) -> list[list[int]]:
    """Basis of the right null space, one vector per free column."""
    f = a.field
    data = [list(row) for row in a.data]
    pivots = _eliminate(f, data)
    pivot_cols = {c: r for r, c in pivots}
    free_cols = [c for c in range(a.cols) if c not in pivot_cols]
    basis = []
    for fc in free_cols:
        v = [0] * a.cols
        v[fc] = 1
        for r, c in pivots:
            v[c] = data[r][fc]  # xor-negation is identity in char 2
        basis.append(v)
    return basis


def count_square_submatrices(rows: int, cols: int, max_order: int) -> int:
    from math import comb

    return sum(comb(rows, s) * comb(cols, s) for s in range(1, max_order + 1))


def all_square_submatrices_nonsingular(a: Matrix, max_order: int, minor_cap: int = 10_000_000):
    """Exhaustively check every square submatrix of order <= max_order.

    Returns True, or the first offending (row_set, col_set) in
    size-ascending lexicographic order.  Exponential: guarded by
    minor_cap, meant for audits and tests, not for encoding paths.
    """
    if max_order > min(a.rows, a.cols):
        raise ValueError("max_order exceeds matrix dimensions")
    total = count_square_submatrices(a.rows, a.cols, max_order)
    if total > minor_cap:
        raise CapExceededError(f"{total} minors exceed cap {minor_cap}")
    for s in range(1, max_order + 1):
        for rset in combinations(range(a.rows), s):
            for cset in combinations(range(a.cols), s):
                if rank(submatrix(a, rset, cset)) < s:
                    return (rset, cset)
    return True

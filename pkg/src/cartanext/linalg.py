"""Exact sparse linear algebra over the rationals.

Everything downstream (cohomology ranks, representatives, certificates)
reduces to the routines here.  Vectors are sparse dicts {index: Fraction},
matrices sparse dicts {(row, col): Fraction}.  Elimination is fraction-free
(Bareiss) on integer-cleared rows, with deterministic pivoting: the pivot is
always the first row, in current order, holding a nonzero entry in the
leftmost unresolved column.  Reduced echelon normalisation happens at the
end, so representatives are reproducible across runs.
"""

from __future__ import annotations

from fractions import Fraction
from math import gcd

from .errors import NotContained

Vec = dict  # {int: Fraction}, no zero entries


def vec_is_zero(v: Vec) -> bool:
    return not v


def vec_add(a: Vec, b: Vec) -> Vec:
    out = dict(a)
    for k, x in b.items():
        s = out.get(k, 0) + x
        if s:
            out[k] = s
        else:
            out.pop(k, None)
    return out


def vec_sub(a: Vec, b: Vec) -> Vec:
    return vec_add(a, {k: -x for k, x in b.items()})


def vec_scale(c, v: Vec) -> Vec:
    c = Fraction(c)
    if not c:
        return {}
    return {k: c * x for k, x in v.items()}


def vec_dot(a: Vec, b: Vec) -> Fraction:
    if len(a) > len(b):
        a, b = b, a
    return sum((x * b[k] for k, x in a.items() if k in b), Fraction(0))


class SparseMatrix:
    """Immutable-by-convention sparse rational matrix."""

    def __init__(self, rows: int, cols: int, entries=None):
        self.rows = rows
        self.cols = cols
        self.entries = {}
        if entries:
            for (i, j), x in entries.items():
                x = Fraction(x)
                if x:
                    if not (0 <= i < rows and 0 <= j < cols):
                        raise IndexError(f"entry ({i},{j}) outside {rows}x{cols}")
                    self.entries[(i, j)] = x

    @classmethod
    def from_columns(cls, cols: list, rows: int) -> "SparseMatrix":
        entries = {}
        for j, col in enumerate(cols):
            for i, x in col.items():
                entries[(i, j)] = x
        return cls(rows, len(cols), entries)

    @classmethod
    def from_rows(cls, rows: list, cols: int) -> "SparseMatrix":
        entries = {}
        for i, row in enumerate(rows):
            for j, x in row.items():
                entries[(i, j)] = x
        return cls(len(rows), cols, entries)

    def row_list(self) -> list:
        rows = [dict() for _ in range(self.rows)]
        for (i, j), x in self.entries.items():
            rows[i][j] = x
        return rows

    def column(self, j: int) -> Vec:
        return {i: x for (i, jj), x in self.entries.items() if jj == j}

    def transpose(self) -> "SparseMatrix":
        return SparseMatrix(
            self.cols, self.rows, {(j, i): x for (i, j), x in self.entries.items()}
        )

    def matvec(self, v: Vec) -> Vec:
        out = {}
        for (i, j), x in self.entries.items():
            if j in v:
                s = out.get(i, 0) + x * v[j]
                if s:
                    out[i] = s
                else:
                    out.pop(i, None)
        return out

    def __matmul__(self, other: "SparseMatrix") -> "SparseMatrix":
        if self.cols != other.rows:
            raise ValueError("shape mismatch in matrix product")
        by_row = {}
        for (i, k), x in self.entries.items():
            by_row.setdefault(i, {})[k] = x
        by_col = {}
        for (k, j), x in other.entries.items():
            by_col.setdefault(k, {})[j] = x
        entries = {}
        for i, row in by_row.items():
            acc = {}
            for k, x in row.items():
                for j, y in by_col.get(k, {}).items():
                    s = acc.get(j, 0) + x * y
                    if s:
                        acc[j] = s
                    else:
                        acc.pop(j, None)
            for j, s in acc.items():
                entries[(i, j)] = s
        return SparseMatrix(self.rows, other.cols, entries)

    def __add__(self, other: "SparseMatrix") -> "SparseMatrix":
        if (self.rows, self.cols) != (other.rows, other.cols):
            raise ValueError("shape mismatch in matrix sum")
        entries = dict(self.entries)
        for key, x in other.entries.items():
            s = entries.get(key, 0) + x
            if s:
                entries[key] = s
            else:
                entries.pop(key, None)
        return SparseMatrix(self.rows, self.cols, entries)

    def scale(self, c) -> "SparseMatrix":
        c = Fraction(c)
        return SparseMatrix(
            self.rows, self.cols, {k: c * x for k, x in self.entries.items()}
        )

    def is_zero(self) -> bool:
        return not self.entries

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, SparseMatrix)
            and self.rows == other.rows
            and self.cols == other.cols
            and self.entries == other.entries
        )

    def __repr__(self):
        return f"SparseMatrix({self.rows}x{self.cols}, nnz={len(self.entries)})"


def _integer_rows(rows: list) -> list:
    """Clear denominators row by row; row scaling preserves rank and kernels."""
    out = []
    for row in rows:
        if not row:
            out.append({})
            continue
        denom_lcm = 1
        for x in row.values():
            d = x.denominator
            denom_lcm = denom_lcm * d // gcd(denom_lcm, d)
        scaled = {j: int(x * denom_lcm) for j, x in row.items()}
        g = 0
        for x in scaled.values():
            g = gcd(g, abs(x))
        if g > 1:
            scaled = {j: x // g for j, x in scaled.items()}
        out.append(scaled)
    return out


def _bareiss_echelon(rows: list):
    """Fraction-free forward elimination.

    Returns (echelon_rows, pivot_cols, row_order) where echelon_rows are
    integer dict-rows in echelon shape and row_order[i] is the original index
    of the i-th working row (used for certificates).
    """
    work = [dict(r) for r in rows]
    order = list(range(len(work)))
    pivots = []
    prev = 1
    rank_pos = 0
    active_cols = sorted({j for r in work for j in r})
    for col in active_cols:
        pr = None
        for i in range(rank_pos, len(work)):
            if work[i].get(col):
                pr = i
                break
        if pr is None:
            continue
        if pr != rank_pos:
            work[rank_pos], work[pr] = work[pr], work[rank_pos]
            order[rank_pos], order[pr] = order[pr], order[rank_pos]
        piv_row = work[rank_pos]
        p = piv_row[col]
        for i in range(rank_pos + 1, len(work)):
            r = work[i]
            f = r.get(col)
            if not f:
                # Bareiss update still rescales untouched rows
                if prev != 1:
                    nr = {}
                    for j, x in r.items():
                        q, rem = divmod(p * x, prev)
                        assert rem == 0
                        if q:
                            nr[j] = q
                    work[i] = nr
                else:
                    work[i] = {j: p * x for j, x in r.items()}
                continue
            nr = {}
            keys = set(r) | set(piv_row)
            keys.discard(col)
            for j in keys:
                val = p * r.get(j, 0) - f * piv_row.get(j, 0)
                if val:
                    q, rem = divmod(val, prev)
                    assert rem == 0
                    nr[j] = q
            work[i] = nr
        pivots.append(col)
        prev = p
        rank_pos += 1
        if rank_pos == len(work):
            break
    return work[:rank_pos] + work[rank_pos:], pivots, order


def _rref(rows: list):
    """Reduced row echelon form over Fractions.

    Returns (rref_rows, pivot_cols): nonzero rows only, each with pivot 1 and
    zeros above/below pivots, pivot columns strictly increasing.
    """
    ech, pivots, _ = _bareiss_echelon(_integer_rows(rows))
    ech = [
        {j: Fraction(x) for j, x in r.items()} for r in ech[: len(pivots)]
    ]
    for i in range(len(pivots) - 1, -1, -1):
        p = pivots[i]
        inv = 1 / ech[i][p]
        ech[i] = {j: x * inv for j, x in ech[i].items()}
        for k in range(i):
            f = ech[k].get(p)
            if f:
                row = ech[k]
                for j, x in ech[i].items():
                    s = row.get(j, 0) - f * x
                    if s:
                        row[j] = s
                    else:
                        row.pop(j, None)
    return ech, pivots


def rank(m: SparseMatrix) -> int:
    _, pivots, _ = _bareiss_echelon(_integer_rows(m.row_list()))
    return len(pivots)


class SubspaceBasis:
    """A subspace kept in reduced echelon form for canonical representatives."""

    def __init__(self, vectors: list, ncols: int, _already_rref: bool = False):
        self.ncols = ncols
        if _already_rref:
            self.vectors = vectors
        else:
            self.vectors, _ = _rref(list(vectors))
        self.pivots = [min(v) for v in self.vectors] if self.vectors else []

    @property
    def dim(self) -> int:
        return len(self.vectors)

    def reduce(self, v: Vec) -> Vec:
        """Residual of v after eliminating all pivot coordinates."""
        v = dict(v)
        for row, p in zip(self.vectors, self.pivots):
            f = v.get(p)
            if f:
                for j, x in row.items():
                    s = v.get(j, 0) - f * x
                    if s:
                        v[j] = s
                    else:
                        v.pop(j, None)
        return v

    def contains(self, v: Vec) -> bool:
        return not self.reduce(v)

    def coordinates(self, v: Vec):
        """Coefficients of v in this basis, or None if v is outside the span."""
        v = dict(v)
        coords = {}
        for idx, (row, p) in enumerate(zip(self.vectors, self.pivots)):
            f = v.get(p)
            if f:
                coords[idx] = f
                for j, x in row.items():
                    s = v.get(j, 0) - f * x
                    if s:
                        v[j] = s
                    else:
                        v.pop(j, None)
        if v:
            return None
        return coords

    def __iter__(self):
        return iter(self.vectors)

    def __repr__(self):
        return f"SubspaceBasis(dim={self.dim}, ncols={self.ncols})"


def kernel_basis(m: SparseMatrix) -> SubspaceBasis:
    """Exact null-space basis; dim = cols - rank."""
    rref_rows, pivots = _rref(m.row_list())
    pivset = set(pivots)
    free = [j for j in range(m.cols) if j not in pivset]
    vecs = []
    for f in free:
        v = {f: Fraction(1)}
        for row, p in zip(rref_rows, pivots):
            x = row.get(f)
            if x:
                v[p] = -x
        vecs.append(v)
    return SubspaceBasis(vecs, m.cols)


def image_basis(m: SparseMatrix) -> SubspaceBasis:
    """Column-space basis in reduced echelon form."""
    return SubspaceBasis(m.transpose().row_list(), m.rows)


class SolveResult:
    """Outcome of solve_in_image: exactly one of solution / certificate is set.

    The certificate is a left null vector y with y.m = 0 and y.v != 0, an
    independently checkable proof of non-membership.
    """

    def __init__(self, solution=None, certificate=None):
        assert (solution is None) != (certificate is None)
        self.solution = solution
        self.certificate = certificate

    @property
    def in_image(self) -> bool:
        return self.solution is not None


def solve_in_image(m: SparseMatrix, v: Vec) -> SolveResult:
    """Solve m x = v exactly, or certify v is not in the image."""
    rows = m.row_list()
    aug = []
    for i, row in enumerate(rows):
        r = dict(row)
        if v.get(i):
            r[m.cols] = v[i]
        aug.append(r)
    rref_rows, pivots = _rref(aug)
    if m.cols in pivots:
        # inconsistent: find certificate in the left kernel
        left = kernel_basis(m.transpose())
        for y in left:
            if vec_dot(y, v):
                return SolveResult(certificate=y)
        raise AssertionError("inconsistent system without certificate")
    x = {}
    for row, p in zip(rref_rows, pivots):
        c = row.get(m.cols)
        if c:
            x[p] = c
    return SolveResult(solution=x)


def quotient_basis(cycles: SubspaceBasis, boundaries: SubspaceBasis) -> list:
    """Representatives of cycles/boundaries; canonical and deterministic.

    Raises NotContained if some boundary vector lies outside the cycle span.
    """
    for b in boundaries:
        if not cycles.contains(b):
            raise NotContained(f"boundary {b} outside cycle space")
    reps = []
    for c in cycles:
        r = boundaries.reduce(c)
        if r:
            reps.append(r)
    reduced, _ = _rref(reps)
    return reduced


def subspace_sum(a: SubspaceBasis, b: SubspaceBasis) -> SubspaceBasis:
    assert a.ncols == b.ncols
    return SubspaceBasis(list(a.vectors) + list(b.vectors), a.ncols)


def subspace_intersection(a: SubspaceBasis, b: SubspaceBasis) -> SubspaceBasis:
    """Intersection via the kernel of the stacked coefficient matrix."""
    assert a.ncols == b.ncols
    na, nb = a.dim, b.dim
    if na == 0 or nb == 0:
        return SubspaceBasis([], a.ncols)
    cols = [dict(v) for v in a.vectors] + [
        {i: -x for i, x in v.items()} for v in b.vectors
    ]
    m = SparseMatrix.from_columns(cols, a.ncols)
    ker = kernel_basis(m)
    vecs = []
    for k in ker:
        v = {}
        for idx, c in k.items():
            if idx < na:
                v = vec_add(v, vec_scale(c, a.vectors[idx]))
        vecs.append(v)
    return SubspaceBasis(vecs, a.ncols)

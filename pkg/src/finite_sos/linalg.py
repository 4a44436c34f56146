"""Exact linear algebra over the rationals.

Two layers:

* :class:`RowSpan` is an incremental integer row-echelon structure used for
  exact rank queries and greedy independence tests.  Incoming rational
  vectors are scaled to integers (scaling by a positive rational does not
  change linear independence), reduced with fraction-free two-term updates,
  and stored with their content removed.  Rows live in int64 numpy arrays
  and are promoted to Python-int object arrays before any update that could
  overflow, so every zero/nonzero decision is exact.

* Dense :class:`fractions.Fraction` routines for small systems: LU solve,
  nullspace, LDL^T positive-semidefiniteness checks with symmetric pivoting,
  and exact weighted least-squares projection onto an affine subspace.
"""

from __future__ import annotations

import math
from fractions import Fraction
from typing import Iterable, Sequence

import numpy as np

from .errors import InvalidProblem

_INT64_GUARD = 2**62


def _to_int_vector(vec: Sequence[Fraction | int]) -> np.ndarray:
    """Scale a rational vector to a primitive integer vector (positive scaling)."""
    denom = 1
    for x in vec:
        if isinstance(x, Fraction):
            denom = denom * x.denominator // math.gcd(denom, x.denominator)
    ints = [int(x * denom) if isinstance(x, Fraction) else int(x) * denom for x in vec]
    g = 0
    for x in ints:
        g = math.gcd(g, x)
        if g == 1:
            break
    if g > 1:
        ints = [x // g for x in ints]
    if ints and max(abs(x) for x in ints) < _INT64_GUARD:
        return np.array(ints, dtype=np.int64)
    return np.array(ints, dtype=object)


def _content_normalize(v: np.ndarray) -> np.ndarray:
    if v.dtype == np.int64:
        g = int(np.gcd.reduce(np.abs(v)))
    else:
        g = 0
        for x in v:
            g = math.gcd(g, int(x))
            if g == 1:
                break
    if g > 1:
        v = v // g
    return v


class RowSpan:
    """Incrementally maintained integer row space with exact membership tests.

    Rows are kept in insertion order; each stored row has zeros at the pivot
    positions of all earlier rows, so reducing a new vector against the rows
    in insertion order eliminates every pivot coordinate.
    """

    def __init__(self, width: int):
        self.width = width
        self._rows: list[np.ndarray] = []
        self._pivots: list[int] = []
        self._pivot_vals: list[int] = []
        self._maxes: list[int] = []

    @property
    def rank(self) -> int:
        return len(self._rows)

    def _reduce(self, v: np.ndarray) -> np.ndarray:
        for row, piv, pval, rmax in zip(self._rows, self._pivots, self._pivot_vals, self._maxes):
            b = int(v[piv])
            if b == 0:
                continue
            if v.dtype == np.int64:
                vmax = int(np.abs(v).max(initial=0))
                if vmax * abs(pval) + rmax * abs(b) >= _INT64_GUARD:
                    v = v.astype(object)
            if v.dtype == np.int64 and row.dtype != np.int64:
                v = v.astype(object)
            r = row if row.dtype == v.dtype else row.astype(v.dtype)
            v = v * pval - r * b
            v = _content_normalize(v)
        return v

    def residual(self, vec: Sequence[Fraction | int]) -> np.ndarray:
        """Fully reduced integer representative of vec modulo the row space."""
        v = _to_int_vector(vec)
        if len(v) != self.width:
            raise ValueError("vector width mismatch")
        return self._reduce(v)

    def contains(self, vec: Sequence[Fraction | int]) -> bool:
        v = self.residual(vec)
        return not v.any()

    def add(self, vec: Sequence[Fraction | int]) -> bool:
        """Reduce vec against the span; insert if independent. True iff inserted."""
        v = self.residual(vec)
        nz = np.flatnonzero(v)
        if len(nz) == 0:
            return False
        piv = int(nz[0])
        self._rows.append(v)
        self._pivots.append(piv)
        self._pivot_vals.append(int(v[piv]))
        if v.dtype == np.int64:
            self._maxes.append(int(np.abs(v).max()))
        else:
            self._maxes.append(max(abs(int(x)) for x in v))
        return True


def exact_rank(rows: Iterable[Sequence[Fraction | int]], width: int) -> int:
    span = RowSpan(width)
    for r in rows:
        span.add(r)
    return span.rank


class FractionLU:
    """Exact LU factorization (partial pivoting on first nonzero) for reuse."""

    def __init__(self, matrix: Sequence[Sequence[Fraction]]):
        n = len(matrix)
        if any(len(row) != n for row in matrix):
            raise ValueError("square matrix required")
        self.n = n
        a = [[Fraction(x) for x in row] for row in matrix]
        perm = list(range(n))
        for col in range(n):
            piv = next((r for r in range(col, n) if a[r][col] != 0), None)
            if piv is None:
                raise InvalidProblem("singular matrix in exact LU")
            if piv != col:
                a[col], a[piv] = a[piv], a[col]
                perm[col], perm[piv] = perm[piv], perm[col]
            inv = 1 / a[col][col]
            for r in range(col + 1, n):
                if a[r][col] == 0:
                    continue
                f = a[r][col] * inv
                a[r][col] = f
                arow, crow = a[r], a[col]
                for c in range(col + 1, n):
                    if crow[c]:
                        arow[c] -= f * crow[c]
        self._lu = a
        self._perm = perm

    def solve(self, rhs: Sequence[Fraction]) -> list[Fraction]:
        n = self.n
        b = [Fraction(rhs[p]) for p in self._perm]
        lu = self._lu
        for r in range(n):
            row = lu[r]
            s = b[r]
            for c in range(r):
                if row[c]:
                    s -= row[c] * b[c]
            b[r] = s
        for r in range(n - 1, -1, -1):
            row = lu[r]
            s = b[r]
            for c in range(r + 1, n):
                if row[c]:
                    s -= row[c] * b[c]
            b[r] = s / row[r]
        return b


def solve_exact(matrix: Sequence[Sequence[Fraction]], rhs: Sequence[Fraction]) -> list[Fraction]:
    return FractionLU(matrix).solve(rhs)


def nullspace_exact(matrix: Sequence[Sequence[Fraction]]) -> list[list[Fraction]]:
    """Basis of the right nullspace of a rational matrix (rows x cols)."""
    rows = [[Fraction(x) for x in row] for row in matrix]
    m = len(rows)
    ncols = len(rows[0]) if m else 0
    pivots: list[int] = []
    r = 0
    for col in range(ncols):
        piv = next((i for i in range(r, m) if rows[i][col] != 0), None)
        if piv is None:
            continue
        rows[r], rows[piv] = rows[piv], rows[r]
        pv = rows[r][col]
        rows[r] = [x / pv for x in rows[r]]
        for i in range(m):
            if i != r and rows[i][col] != 0:
                f = rows[i][col]
                rows[i] = [a - f * b for a, b in zip(rows[i], rows[r])]
        pivots.append(col)
        r += 1
        if r == m:
            break
    free = [c for c in range(ncols) if c not in pivots]
    basis = []
    for fc in free:
        vec = [Fraction(0)] * ncols
        vec[fc] = Fraction(1)
        for i, pc in enumerate(pivots):
            vec[pc] = -rows[i][fc]
        basis.append(vec)
    return basis


def ldlt_psd(matrix: Sequence[Sequence[Fraction]]) -> tuple[bool, list[Fraction]]:
    """Exact PSD test by LDL^T with symmetric max-diagonal pivoting.

    Returns (is_psd, pivots).  A symmetric rational matrix is positive
    semidefinite iff the elimination below never meets a negative diagonal
    and whenever all remaining diagonal entries vanish the whole remaining
    block vanishes.
    """
    n = len(matrix)
    a = [[Fraction(x) for x in row] for row in matrix]
    for i in range(n):
        for j in range(i + 1, n):
            if a[i][j] != a[j][i]:
                raise ValueError("matrix is not symmetric")
    order = list(range(n))
    pivots: list[Fraction] = []
    for step in range(n):
        rest = order[step:]
        best = max(rest, key=lambda idx: a[idx][idx])
        d = a[best][best]
        if d < 0:
            return False, pivots
        if d == 0:
            for i in rest:
                for j in rest:
                    if a[i][j] != 0:
                        return False, pivots
            pivots.extend(Fraction(0) for _ in rest)
            return True, pivots
        k = order.index(best)
        order[step], order[k] = order[k], order[step]
        pivots.append(d)
        for i in order[step + 1:]:
            f = a[i][best] / d
            if f == 0:
                continue
            brow = a[best]
            arow = a[i]
            for j in order[step + 1:]:
                if brow[j]:
                    arow[j] -= f * brow[j]
    return True, pivots


def is_psd_with_margin(matrix: Sequence[Sequence[Fraction]], margin: Fraction) -> bool:
    """Exact check that matrix - margin*I is positive semidefinite."""
    n = len(matrix)
    shifted = [[matrix[i][j] - (margin if i == j else 0) for j in range(n)] for i in range(n)]
    ok, _ = ldlt_psd(shifted)
    return ok


class AffineProjector:
    """Exact weighted least-squares projection onto {y : R y = rhs}.

    The metric is sum_i w_i (y_i - x_i)^2; with w in {1, 2} for
    upper-triangle coordinates of symmetric matrices this reproduces the
    Frobenius projection without irrational arithmetic.  Rows of R are
    scaled to integers once; the (full-rank) row Gram is LU-factored once
    and reused across projections.
    """

    def __init__(self, rows: Sequence[dict[int, Fraction]], rhs: Sequence[Fraction],
                 weights: Sequence[int], width: int):
        self.width = width
        self.weights = list(weights)
        self.rhs = [Fraction(x) for x in rhs]
        self._rows_int: list[dict[int, int]] = []
        self._scales: list[Fraction] = []
        for row in rows:
            denom = 1
            for x in row.values():
                denom = denom * x.denominator // math.gcd(denom, x.denominator)
            ints = {c: int(x * denom) for c, x in row.items()}
            g = 0
            for x in ints.values():
                g = math.gcd(g, x)
                if g == 1:
                    break
            if g > 1:
                ints = {c: x // g for c, x in ints.items()}
            self._rows_int.append(ints)
            self._scales.append(Fraction(g, denom) if g > 1 else Fraction(1, denom))
        m = len(rows)
        gram = [[Fraction(0)] * m for _ in range(m)]
        for i in range(m):
            for j in range(i, m):
                g = self._scales[i] * self._scales[j] * self._dot_winv(self._rows_int[i], self._rows_int[j])
                gram[i][j] = gram[j][i] = g
        self._gram_lu = FractionLU(gram)

    def _dot_winv(self, ri: dict[int, int], rj: dict[int, int]) -> Fraction:
        small, big = (ri, rj) if len(ri) <= len(rj) else (rj, ri)
        num = 0
        num2 = 0
        for c, x in small.items():
            y = big.get(c)
            if y is None:
                continue
            if self.weights[c] == 1:
                num += x * y
            else:
                num2 += x * y
        return Fraction(num) + Fraction(num2, 2)

    def residual(self, x: Sequence[Fraction]) -> list[Fraction]:
        out = []
        for ints, scale, b in zip(self._rows_int, self._scales, self.rhs):
            s = 0
            for c, v in ints.items():
                xc = x[c]
                if xc:
                    s += v * xc
            out.append(scale * s - b)
        return out

    def project(self, x: Sequence[Fraction]) -> list[Fraction]:
        res = self.residual(x)
        if all(v == 0 for v in res):
            return list(x)
        z = self._gram_lu.solve(res)
        y = list(x)
        for ints, scale, zi in zip(self._rows_int, self._scales, z):
            f = scale * zi
            if f == 0:
                continue
            for c, v in ints.items():
                y[c] -= f * v if self.weights[c] == 1 else f * v / 2
        return y

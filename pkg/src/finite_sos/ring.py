"""Polynomials as functions on finite rational point sets.

A finite set X of distinct points with rational coordinates determines the
space of real-valued functions on X; polynomials map onto it by evaluation.
This module computes, entirely in exact arithmetic:

* greedy monomial bases of the degree-filtered function spaces (graded-lex
  column-pivoted border enumeration), hence Hilbert functions and the
  Hilbert regularity,
* point interpolators and the pointwise square decomposition they induce,
* the degree planner pairing a nonnegativity query with the least feasible
  multiplier degree,
* the dimension-defect identity between a cube subset and its complement.
"""

from __future__ import annotations

import heapq
import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from itertools import product
from typing import Iterable, Sequence

import numpy as np

from .errors import DuplicatePoint, NotACubePoint, PointNotInSet
from .linalg import FractionLU, RowSpan

Point = tuple[Fraction, ...]
Monomial = tuple[int, ...]


def as_point(coords: Iterable[Fraction | int | str]) -> Point:
    return tuple(Fraction(c) for c in coords)


@dataclass(frozen=True)
class PointSet:
    """Ordered finite set of distinct points in Q^n."""

    n: int
    points: tuple[Point, ...]

    def __post_init__(self):
        if not self.points:
            raise ValueError("point set must be nonempty")
        for p in self.points:
            if len(p) != self.n:
                raise ValueError(f"point {p} does not have dimension {self.n}")
        if len(set(self.points)) != len(self.points):
            raise DuplicatePoint("point set contains a repeated point")

    @classmethod
    def from_points(cls, n: int, points: Iterable[Iterable]) -> "PointSet":
        return cls(n, tuple(as_point(p) for p in points))

    @classmethod
    def cube(cls, n: int) -> "PointSet":
        pts = tuple(tuple(Fraction(b) for b in bits) for bits in product((0, 1), repeat=n))
        return cls(n, pts)

    def __len__(self) -> int:
        return len(self.points)

    def __iter__(self):
        return iter(self.points)

    def index(self, v: Point) -> int:
        try:
            return self.points.index(tuple(Fraction(c) for c in v))
        except ValueError:
            raise PointNotInSet(f"{v} is not a point of this set") from None

    def is_boolean(self) -> bool:
        return all(c == 0 or c == 1 for p in self.points for c in p)

    def require_boolean(self) -> None:
        for p in self.points:
            for c in p:
                if c != 0 and c != 1:
                    raise NotACubePoint(f"point {p} has coordinate {c} outside {{0,1}}")


class Poly:
    """Sparse multivariate polynomial with exact rational coefficients."""

    __slots__ = ("n", "terms")

    def __init__(self, n: int, terms: dict[Monomial, Fraction] | None = None):
        self.n = n
        clean: dict[Monomial, Fraction] = {}
        if terms:
            for mono, coeff in terms.items():
                c = Fraction(coeff)
                if c:
                    clean[tuple(mono)] = c
        self.terms = clean

    @classmethod
    def zero(cls, n: int) -> "Poly":
        return cls(n)

    @classmethod
    def constant(cls, n: int, value) -> "Poly":
        return cls(n, {(0,) * n: Fraction(value)})

    @classmethod
    def variable(cls, n: int, i: int) -> "Poly":
        exps = [0] * n
        exps[i] = 1
        return cls(n, {tuple(exps): Fraction(1)})

    @classmethod
    def coordinate_sum(cls, n: int) -> "Poly":
        out = cls.zero(n)
        for i in range(n):
            out = out + cls.variable(n, i)
        return out

    def is_zero(self) -> bool:
        return not self.terms

    def degree(self) -> int:
        return max((sum(m) for m in self.terms), default=0)

    def __add__(self, other: "Poly") -> "Poly":
        out = dict(self.terms)
        for m, c in other.terms.items():
            out[m] = out.get(m, Fraction(0)) + c
        return Poly(self.n, out)

    def __sub__(self, other: "Poly") -> "Poly":
        out = dict(self.terms)
        for m, c in other.terms.items():
            out[m] = out.get(m, Fraction(0)) - c
        return Poly(self.n, out)

    def __neg__(self) -> "Poly":
        return Poly(self.n, {m: -c for m, c in self.terms.items()})

    def __mul__(self, other) -> "Poly":
        if isinstance(other, Poly):
            out: dict[Monomial, Fraction] = {}
            for ma, ca in self.terms.items():
                for mb, cb in other.terms.items():
                    m = tuple(a + b for a, b in zip(ma, mb))
                    out[m] = out.get(m, Fraction(0)) + ca * cb
            return Poly(self.n, out)
        return self.scale(other)

    def __rmul__(self, other) -> "Poly":
        return self.scale(other)

    def scale(self, c) -> "Poly":
        c = Fraction(c)
        return Poly(self.n, {m: c * v for m, v in self.terms.items()})

    def __pow__(self, k: int) -> "Poly":
        out = Poly.constant(self.n, 1)
        for _ in range(k):
            out = out * self
        return out

    def __eq__(self, other) -> bool:
        return isinstance(other, Poly) and self.n == other.n and self.terms == other.terms

    def __hash__(self):
        return hash((self.n, frozenset(self.terms.items())))

    def evaluate(self, point: Sequence[Fraction]) -> Fraction:
        total = Fraction(0)
        for m, c in self.terms.items():
            val = c
            for e, x in zip(m, point):
                if e:
                    if x == 0:
                        val = Fraction(0)
                        break
                    val *= x ** e
            total += val
        return total

    def squarefree(self) -> "Poly":
        """Reduce modulo x_i^2 = x_i (valid as a function on {0,1}^n)."""
        out: dict[Monomial, Fraction] = {}
        for m, c in self.terms.items():
            mm = tuple(min(e, 1) for e in m)
            out[mm] = out.get(mm, Fraction(0)) + c
        return Poly(self.n, out)

    def __repr__(self) -> str:
        if not self.terms:
            return "0"
        parts = []
        for m in sorted(self.terms, key=lambda m: (sum(m), m)):
            c = self.terms[m]
            mono = "*".join(f"x{i+1}" + (f"^{e}" if e > 1 else "")
                            for i, e in enumerate(m) if e)
            parts.append(f"{c}" if not mono else (f"{c}*{mono}" if c != 1 else mono))
        return " + ".join(parts)


def evaluate_monomial(m: Monomial, point: Point) -> Fraction:
    val = Fraction(1)
    for e, x in zip(m, point):
        if e:
            if x == 0:
                return Fraction(0)
            val *= x ** e
    return val


@dataclass(frozen=True)
class QuotientBasis:
    """Greedy monomial basis of the functions of degree <= degree_cap on X."""

    pointset: PointSet
    degree_cap: int
    basis_monomials: tuple[Monomial, ...]
    eval_matrix: tuple[tuple[Fraction, ...], ...]  # |X| rows, one column per monomial

    @property
    def dim(self) -> int:
        return len(self.basis_monomials)

    def evaluation_row(self, v: Point) -> list[Fraction]:
        return [evaluate_monomial(m, v) for m in self.basis_monomials]


class _BorderBasisState:
    """Greedy graded-lex monomial selection on a point set.

    Candidates are scanned in ascending graded-lex order starting from 1;
    accepting a monomial enqueues its variable multiples, rejecting one
    records it as a minimal leading term whose multiples are pruned.  The
    accepted monomials therefore form an order ideal and their evaluation
    vectors a maximal independent family, built once up to saturation
    (rank = |X|) and reused for every degree cap.
    """

    def __init__(self, ps: PointSet):
        self.ps = ps
        m = len(ps)
        n = ps.n
        boolean = ps.is_boolean()
        if boolean:
            cols = [np.array([int(p[i]) for p in ps], dtype=np.int64) for i in range(n)]
            one = np.ones(m, dtype=np.int64)
        else:
            cols = [np.array([p[i] for p in ps], dtype=object) for i in range(n)]
            one = np.array([Fraction(1)] * m, dtype=object)
        span = RowSpan(m)
        accepted: list[Monomial] = []
        degrees: list[int] = []
        vectors: dict[Monomial, np.ndarray] = {}
        rejected: list[Monomial] = []
        # raw evaluation vectors already known to lie in the span (0/1 data only);
        # duplicates reject without a reduction pass
        seen_vec_bytes: set[bytes] = set()
        root = (0,) * n
        heap: list[tuple[int, Monomial]] = [(0, root)]
        pending: dict[Monomial, np.ndarray] = {root: one}
        queued = {root}
        while heap and span.rank < m:
            deg, mono = heapq.heappop(heap)
            vec = pending.pop(mono)
            if any(all(r <= c for r, c in zip(rej, mono)) for rej in rejected):
                continue
            key = vec.tobytes() if vec.dtype == np.int64 else None
            if key is not None and key in seen_vec_bytes:
                ok = False
            else:
                ok = span.add(vec)
                if key is not None:
                    seen_vec_bytes.add(key)
            if not ok:
                rejected.append(mono)
                continue
            accepted.append(mono)
            degrees.append(deg)
            vectors[mono] = vec
            for i in range(n):
                child = mono[:i] + (mono[i] + 1,) + mono[i + 1:]
                if child in queued:
                    continue
                queued.add(child)
                cvec = vec * cols[i]
                heapq.heappush(heap, (deg + 1, child))
                pending[child] = cvec
        self.accepted = accepted
        self.degrees = degrees
        self.vectors = vectors
        self.regularity = max(degrees) if degrees else 0

    def hilbert(self, t: int) -> int:
        if t < 0:
            return 0
        return sum(1 for d in self.degrees if d <= t)

    def monomials_up_to(self, t: int) -> list[Monomial]:
        return [m for m, d in zip(self.accepted, self.degrees) if d <= t]


@lru_cache(maxsize=128)
def _border_state(ps: PointSet) -> _BorderBasisState:
    return _BorderBasisState(ps)


def quotient_basis(X: PointSet, d: int) -> QuotientBasis:
    """Maximal graded-lex-greedy independent monomial family of degree <= d on X."""
    if d < 0:
        raise ValueError("degree must be nonnegative")
    state = _border_state(X)
    monos = state.monomials_up_to(d)
    matrix = tuple(tuple(evaluate_monomial(m, v) for m in monos) for v in X)
    return QuotientBasis(X, d, tuple(monos), matrix)


def hilbert_function(X: PointSet, t: int) -> int:
    """Dimension of the space of functions on X realized by degree <= t polynomials."""
    if t < 0:
        raise ValueError("degree must be nonnegative")
    return _border_state(X).hilbert(t)


def hilbert_regularity(X: PointSet) -> int:
    """Least degree at which the Hilbert function reaches |X|."""
    return _border_state(X).regularity


@dataclass(frozen=True)
class Interpolator:
    """Polynomial equal to 1 at its point and 0 on the rest of the set."""

    point: Point
    poly: Poly


@lru_cache(maxsize=64)
def _interpolation_lu(X: PointSet) -> tuple[tuple[Monomial, ...], FractionLU]:
    state = _border_state(X)
    monos = tuple(state.accepted)
    matrix = [[evaluate_monomial(m, v) for m in monos] for v in X]
    return monos, FractionLU(matrix)


def interpolator(X: PointSet, v: Point) -> Interpolator:
    """Kronecker-delta interpolator of v within X, in the greedy basis monomials."""
    v = as_point(v)
    idx = X.index(v)
    monos, lu = _interpolation_lu(X)
    rhs = [Fraction(1) if i == idx else Fraction(0) for i in range(len(X))]
    coeffs = lu.solve(rhs)
    poly = Poly(X.n, {m: c for m, c in zip(monos, coeffs)})
    for w in X:
        want = Fraction(1) if w == v else Fraction(0)
        if poly.evaluate(w) != want:
            raise AssertionError("interpolator failed exact Kronecker check")
    return Interpolator(v, poly)


def interpolator_decomposition(X: PointSet, p: Poly) -> list[tuple[Fraction, Interpolator]]:
    """Pairs (p(v), delta_v) with p = sum p(v) delta_v^2 exactly as functions on X.

    When every weight is nonnegative this is a sum-of-squares witness at
    degree hilbert_regularity(X).
    """
    pairs = [(p.evaluate(v), interpolator(X, v)) for v in X]
    for w in X:
        total = Fraction(0)
        for weight, interp in pairs:
            val = interp.poly.evaluate(w)
            if val:
                total += weight * val * val
        if total != p.evaluate(w):
            raise AssertionError("interpolator decomposition failed exact identity")
    return pairs


def mainbound_k(X: PointSet, s: int) -> tuple[int, int]:
    """Least k with H_X(k+s) + H_X(k) > H_X(2k+2s), and the certified degree k+s.

    A nonnegative polynomial of degree <= 2s on X then admits a nonzero
    multiplier h that is a sum of squares of degree <= k elements with p*h a
    sum of squares of degree <= k+s elements.
    """
    if s < 0:
        raise ValueError("s must be nonnegative")
    state = _border_state(X)
    k = 0
    while True:
        if state.hilbert(k + s) + state.hilbert(k) > state.hilbert(2 * k + 2 * s):
            return k, k + s
        k += 1


def restrict(p: Poly, Xp: PointSet) -> Poly:
    """Canonical representative of p as a function on Xp, in greedy basis monomials."""
    monos, lu = _interpolation_lu(Xp)
    values = [p.evaluate(v) for v in Xp]
    coeffs = lu.solve(values)
    out = Poly(Xp.n, {m: c for m, c in zip(monos, coeffs)})
    return out


def cayley_bacharach_defect(Xp: PointSet, n: int, d: int) -> tuple[int, int]:
    """Interpolation defect of a cube subset at degree d versus its complement.

    Returns (lhs, rhs) with lhs = |X'| - dim R[X']_{<=d} and
    rhs = dim R[C]_{<=n-d-1} - dim R[complement]_{<=n-d-1}; rhs is defined
    as 0 when X' is the whole cube.  The two sides agree for every subset.
    """
    Xp.require_boolean()
    if Xp.n != n:
        raise ValueError("ambient dimension mismatch")
    if not 0 <= d <= n:
        raise ValueError("need 0 <= d <= n")
    lhs = len(Xp) - hilbert_function(Xp, d)
    full = set(product((Fraction(0), Fraction(1)), repeat=n))
    rest = full - set(Xp.points)
    t = n - d - 1
    if t < 0:
        return lhs, 0
    # dim of degree <= t functions on the empty set is 0, so the identity
    # degenerates to the binomial complement symmetry when X' is the whole cube
    comp_dim = hilbert_function(PointSet(n, tuple(sorted(rest))), t) if rest else 0
    rhs = hilbert_function(PointSet.cube(n), t) - comp_dim
    return lhs, rhs


def cube_dimension(n: int, t: int) -> int:
    """dim of degree <= t functions on the full cube: sum_{i<=t} C(n,i)."""
    if t < 0:
        return 0
    return sum(math.comb(n, i) for i in range(min(t, n) + 1))

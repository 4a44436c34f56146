"""Coordinate-permutation symmetry of functions on the hypercube {0,1}^n.

The permutation group of the n coordinates acts on the 2^n-dimensional space
of cube functions.  Working in the squarefree monomial basis, this module
builds the standard two-row tableau combinatorics (tabloids, polytabloids),
the degree-respecting decomposition of the function space into irreducible
blocks H_{k,i} = ell^i * H_{k,0} where ell = t - sum(x), and the invariant
kernels s_k that power the block reduction of invariant semidefinite
problems.  Everything is exact over the rationals.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from itertools import combinations

from .errors import (
    DegreeCapExceeded,
    InternalConsistencyError,
    InvalidShape,
    ZeroPolynomial,
)
from .linalg import FractionLU, solve_exact
from .ring import Monomial, Poly, cube_dimension


# ---------------------------------------------------------------------------
# tableaux and polytabloids

@dataclass(frozen=True)
class TwoRowShape:
    """Two-row partition (n - k, k); (n, 0) denotes the single-row partition."""

    n: int
    k: int

    def __post_init__(self):
        if not 0 <= 2 * self.k <= self.n:
            raise InvalidShape(f"(n-k, k) = ({self.n - self.k}, {self.k}) is not a partition shape")


@dataclass(frozen=True)
class Tableau:
    """Filling of a two-row shape with {1..n}; standard iff rows and columns increase."""

    shape: TwoRowShape
    row1: tuple[int, ...]
    row2: tuple[int, ...]

    def __post_init__(self):
        n, k = self.shape.n, self.shape.k
        if len(self.row1) != n - k or len(self.row2) != k:
            raise InvalidShape("row lengths do not match the shape")
        if set(self.row1) | set(self.row2) != set(range(1, n + 1)) or set(self.row1) & set(self.row2):
            raise ValueError("rows must partition {1..n}")

    def is_standard(self) -> bool:
        rows_ok = all(a < b for a, b in zip(self.row1, self.row1[1:]))
        rows_ok &= all(a < b for a, b in zip(self.row2, self.row2[1:]))
        cols_ok = all(self.row1[j] < self.row2[j] for j in range(len(self.row2)))
        return rows_ok and cols_ok

    def __repr__(self) -> str:
        return f"[[{','.join(map(str, self.row1))}],[{','.join(map(str, self.row2))}]]"


@dataclass(frozen=True)
class TabloidSum:
    """Rational combination of tabloids, each keyed by its second row as a set."""

    n: int
    terms: tuple[tuple[frozenset, Fraction], ...]

    def as_poly(self) -> Poly:
        """Image under the tabloid-to-monomial map [rest, S] -> x^S."""
        out: dict[Monomial, Fraction] = {}
        for subset, coeff in self.terms:
            mono = tuple(1 if i + 1 in subset else 0 for i in range(self.n))
            out[mono] = out.get(mono, Fraction(0)) + coeff
        return Poly(self.n, out)


def standard_tableaux(n: int, k: int) -> list[Tableau]:
    """All standard tableaux of shape (n-k, k), ordered lexicographically by row2."""
    shape = TwoRowShape(n, k)
    out = []
    for row2 in combinations(range(1, n + 1), k):
        row1 = tuple(sorted(set(range(1, n + 1)) - set(row2)))
        t = Tableau(shape, row1, row2)
        if t.is_standard():
            out.append(t)
    return out


def polytabloid(T: Tableau) -> TabloidSum:
    """Signed sum of tabloids over the column group of T.

    The column group is generated by the k transpositions swapping the two
    entries of each height-2 column, so it has 2^k elements.
    """
    k = len(T.row2)
    terms: dict[frozenset, Fraction] = {}
    for pick in range(1 << k):
        swapped = [j for j in range(k) if (pick >> j) & 1]
        sign = Fraction(-1) if len(swapped) % 2 else Fraction(1)
        second = frozenset(
            T.row1[j] if j in swapped else T.row2[j] for j in range(k)
        )
        terms[second] = terms.get(second, Fraction(0)) + sign
    assert len(terms) == 1 << k
    return TabloidSum(T.shape.n, tuple(sorted(terms.items(), key=lambda kv: sorted(kv[0]))))


def polytabloid_poly(T: Tableau) -> Poly:
    """Monomial image of the polytabloid; equals prod_j (x_{row2[j]} - x_{row1[j]})."""
    return polytabloid(T).as_poly()


def specht_dimension(n: int, k: int) -> int:
    return math.comb(n, k) - (math.comb(n, k - 1) if k >= 1 else 0)


# ---------------------------------------------------------------------------
# level combinatorics

def squarefree_monomials(n: int, d: int) -> list[Monomial]:
    """Squarefree exponent tuples of degree <= d in ascending graded-lex order."""
    out: list[Monomial] = []
    for deg in range(min(d, n) + 1):
        batch = [tuple(1 if i in s else 0 for i in range(n))
                 for s in combinations(range(n), deg)]
        batch.sort()
        out.extend(batch)
    return out


def ell_poly(n: int, t: Fraction) -> Poly:
    """The invariant affine function t - (x_1 + ... + x_n)."""
    return Poly.constant(n, t) - Poly.coordinate_sum(n)


def cube_mul(a: Poly, b: Poly) -> Poly:
    """Product with eager reduction modulo x_i^2 = x_i."""
    return (a * b).squarefree()


def level_points(n: int, t_level: int):
    for s in combinations(range(n), t_level):
        yield tuple(Fraction(1) if i in s else Fraction(0) for i in range(n))


def level_sum(f: Poly, t_level: int) -> Fraction:
    """Sum of f over the cube points with coordinate sum t_level, by counting."""
    total = Fraction(0)
    n = f.n
    for m, c in f.squarefree().terms.items():
        s = sum(m)
        if t_level >= s:
            total += c * math.comb(n - s, t_level - s)
    return total


def level_values(f: Poly) -> list[Fraction]:
    """f's average on each level; exact, and equal to f's value when invariant."""
    n = f.n
    return [level_sum(f, t) / math.comb(n, t) for t in range(n + 1)]


def level_indicator(n: int, t_level: int) -> Poly:
    """The function equal to 1 on level t_level and 0 on the rest of the cube.

    Expanding through the inverse of the binomial level-count matrix gives
    coefficient (-1)^(j - t) C(j, t) on every squarefree monomial of degree j,
    so the degree is exactly n for every level.
    """
    if not 0 <= t_level <= n:
        raise ValueError("level out of range")
    terms: dict[Monomial, Fraction] = {}
    for j in range(t_level, n + 1):
        w = Fraction((-1) ** (j - t_level) * math.comb(j, t_level))
        for s in combinations(range(n), j):
            terms[tuple(1 if i in s else 0 for i in range(n))] = w
    poly = Poly(n, terms)
    if poly.degree() != n:
        raise InternalConsistencyError("level indicator degree must equal n")
    return poly


def symmetrize(f: Poly) -> Poly:
    """Average of f over all coordinate permutations, assembled level by level."""
    n = f.n
    avg = level_values(f)
    gamma = []
    for j in range(n + 1):
        g = Fraction(0)
        for t in range(j + 1):
            g += Fraction((-1) ** (j - t) * math.comb(j, t)) * avg[t]
        gamma.append(g)
    terms: dict[Monomial, Fraction] = {}
    for j, g in enumerate(gamma):
        if not g:
            continue
        for s in combinations(range(n), j):
            terms[tuple(1 if i in s else 0 for i in range(n))] = g
    return Poly(n, terms)


def is_invariant(f: Poly) -> bool:
    return symmetrize(f) == f.squarefree()


# ---------------------------------------------------------------------------
# isotypic decomposition

class IsotypicBasis:
    """Explicit bases of the blocks H_{k,i} of the degree-filtered cube functions.

    Block (k, i) with k + i <= degree_cap, i <= n - 2k carries the polynomials
    ell^i * phi(e_T) over standard tableaux T of shape (n-k, k); block (k, 0)
    is never divisible by ell, and multiplication by ell^i shifts it to
    degree k + i.  The union over all blocks is a basis of the functions of
    degree <= degree_cap.
    """

    def __init__(self, n: int, degree_cap: int, level_param: Fraction):
        if not 0 <= degree_cap <= n:
            raise ValueError("need 0 <= degree cap <= n")
        self.n = n
        self.degree_cap = degree_cap
        self.level_param = Fraction(level_param)
        ell = ell_poly(n, self.level_param)
        blocks: dict[tuple[int, int], list[Poly]] = {}
        for k in range(0, min(n // 2, degree_cap) + 1):
            base = [polytabloid_poly(T) for T in standard_tableaux(n, k)]
            current = base
            for i in range(0, min(degree_cap - k, n - 2 * k) + 1):
                if i > 0:
                    current = [cube_mul(ell, p) for p in current]
                blocks[(k, i)] = current
        self.blocks = blocks
        total = sum(len(v) for v in blocks.values())
        if total != cube_dimension(n, degree_cap):
            raise InternalConsistencyError("isotypic block dimensions do not fill the space")
        self._lu: FractionLU | None = None
        self._monomials = squarefree_monomials(n, degree_cap)
        self._order = sorted(blocks)

    def block_order(self) -> list[tuple[int, int]]:
        return list(self._order)

    def _coefficient_lu(self) -> FractionLU:
        if self._lu is None:
            index = {m: i for i, m in enumerate(self._monomials)}
            cols = []
            for key in self._order:
                for p in self.blocks[key]:
                    col = [Fraction(0)] * len(index)
                    for m, c in p.terms.items():
                        col[index[m]] = c
                    cols.append(col)
            matrix = [[cols[j][i] for j in range(len(cols))] for i in range(len(index))]
            self._lu = FractionLU(matrix)
        return self._lu


@lru_cache(maxsize=32)
def isotypic_basis(n: int, d: int, t: Fraction = Fraction(0)) -> IsotypicBasis:
    return IsotypicBasis(n, d, Fraction(t))


@dataclass(frozen=True)
class DecompCoords:
    """Coordinates of a cube function in the blocks of an IsotypicBasis."""

    coords: dict[tuple[int, int], tuple[Fraction, ...]]

    def nonzero_blocks(self) -> list[tuple[int, int]]:
        return sorted(key for key, vec in self.coords.items() if any(vec))


def decompose(f: Poly, basis: IsotypicBasis) -> DecompCoords:
    """Exact block coordinates of f; reassembling them reproduces f on the cube."""
    fs = f.squarefree()
    if fs.degree() > basis.degree_cap:
        raise DegreeCapExceeded(
            f"degree {fs.degree()} exceeds basis cap {basis.degree_cap}")
    index = {m: i for i, m in enumerate(basis._monomials)}
    rhs = [Fraction(0)] * len(index)
    for m, c in fs.terms.items():
        rhs[index[m]] = c
    sol = basis._coefficient_lu().solve(rhs)
    coords: dict[tuple[int, int], tuple[Fraction, ...]] = {}
    pos = 0
    for key in basis.block_order():
        size = len(basis.blocks[key])
        coords[key] = tuple(sol[pos:pos + size])
        pos += size
    return DecompCoords(coords)


def reassemble(coords: DecompCoords, basis: IsotypicBasis) -> Poly:
    out = Poly.zero(basis.n)
    for key, vec in coords.coords.items():
        for c, p in zip(vec, basis.blocks[key]):
            if c:
                out = out + c * p
    return out


def ell_order(f: Poly, t: Fraction, d: int | None = None) -> int:
    """Order to which ell = t - sum(x) properly divides f as a cube function."""
    fs = f.squarefree()
    if fs.is_zero():
        raise ZeroPolynomial("ell_order of the zero polynomial")
    if d is None:
        d = fs.degree()
    n = f.n
    if not fs.degree() <= d <= n:
        raise ValueError("need deg f <= d <= n")
    coords = decompose(fs, isotypic_basis(n, d, Fraction(t)))
    orders = [i for (k, i), vec in coords.coords.items() if any(vec)]
    return min(orders)


def vanishing_check(f: Poly, t_level: int) -> bool:
    """Whether f vanishes on the level of coordinate sum t_level.

    When f vanishes there and its degree d satisfies d <= t_level <= n - d,
    proper divisibility by ell = t_level - sum(x) is forced; that implication
    is asserted on every call.
    """
    n = f.n
    if not 0 <= t_level <= n:
        raise ValueError("level out of range")
    vanishes = all(f.evaluate(v) == 0 for v in level_points(n, t_level))
    fs = f.squarefree()
    if vanishes and not fs.is_zero():
        d = fs.degree()
        if d <= t_level <= n - d:
            if ell_order(fs, Fraction(t_level), d) < 1:
                raise InternalConsistencyError(
                    "vanishing on an admissible level must force divisibility by ell")
    return vanishes


# ---------------------------------------------------------------------------
# invariant kernels

@dataclass(frozen=True)
class InvariantKernel:
    """Level values of s_k(x) = sum_a e_a(x)^2 over an orthonormal basis of H_{k,0}.

    Orthonormality is with respect to <f, g> = sum over cube points of f g;
    the sum of squares over any orthonormal basis of an irreducible block is
    an invariant function, hence constant on levels.
    """

    n: int
    k: int
    values: tuple[Fraction, ...]

    def __post_init__(self):
        if any(v < 0 for v in self.values):
            raise InternalConsistencyError("invariant kernel values must be nonnegative")


def _support(m: Monomial) -> frozenset:
    return frozenset(i for i, e in enumerate(m) if e)


def _kernel_gram_sandwich(n: int, k: int) -> tuple[Fraction, ...]:
    """Reference computation: Gram-inverse quadratic form over polytabloids.

    s_k(v) = w(v)^T Gram^{-1} w(v) with w(v) the polytabloid values at v and
    Gram the pairwise point-sum inner products; evaluated at one point per
    level and asserted equal at a second representative.
    """
    polys = [polytabloid_poly(T) for T in standard_tableaux(n, k)]
    supports = [{_support(m): c for m, c in p.terms.items()} for p in polys]
    dim = len(polys)
    gram = [[Fraction(0)] * dim for _ in range(dim)]
    for a in range(dim):
        for b in range(a, dim):
            tot = 0
            for S, cs in supports[a].items():
                for T, ct in supports[b].items():
                    tot += int(cs * ct) * (1 << (n - len(S | T)))
            gram[a][b] = gram[b][a] = Fraction(tot)
    lu = FractionLU(gram)  # raises if singular, which independence forbids
    values = []
    for t in range(n + 1):
        reps = [frozenset(range(t))]
        if 0 < t < n:
            reps.append(frozenset(range(1, t + 1)))
        vals = []
        for rep in reps:
            w = [Fraction(sum(c for S, c in sup.items() if S <= rep)) for sup in supports]
            y = lu.solve(w)
            vals.append(sum(wi * yi for wi, yi in zip(w, y)))
        if len(set(vals)) != 1:
            raise InternalConsistencyError("kernel value differs across level representatives")
        values.append(vals[0])
    return tuple(values)


def _kernel_scheme(n: int, k: int) -> tuple[Fraction, ...]:
    """Fast path via the distance algebra of k-subsets under intersection size.

    The adjacency operator A1 (pairs sharing k-1 elements) acts on the
    distance basis {A_i} tridiagonally; its claimed integer eigenvalues
    (k-j)(n-k-j) - j are certified as roots of the exact characteristic
    polynomial before use.  The top spectral projector E_k, expanded in the
    distance basis, gives s_k(v) = pi(v)^T E_k pi(v) / theta_k where theta_k
    is the eigenvalue of the point-sum Gram on the block, read off one
    polytabloid.
    """
    if k == 0:
        return tuple(Fraction(1, 2 ** n) for _ in range(n + 1))
    lam = [(k - j) * (n - k - j) - j for j in range(k + 1)]
    if len(set(lam)) != k + 1:
        raise InternalConsistencyError("distance algebra eigenvalues must be distinct")

    def b(i):
        return (k - i) * (n - k - i)

    def c(i):
        return i * i

    dim = k + 1
    reg = [[Fraction(0)] * dim for _ in range(dim)]
    for i in range(dim):
        if i > 0:
            reg[i - 1][i] = Fraction(b(i - 1))
        reg[i][i] = Fraction(k * (n - k) - b(i) - c(i))
        if i < k:
            reg[i + 1][i] = Fraction(c(i + 1))

    def det(mat):
        m2 = [row[:] for row in mat]
        sz = len(m2)
        out = Fraction(1)
        for col in range(sz):
            piv = next((r for r in range(col, sz) if m2[r][col] != 0), None)
            if piv is None:
                return Fraction(0)
            if piv != col:
                m2[col], m2[piv] = m2[piv], m2[col]
                out = -out
            out *= m2[col][col]
            for r in range(col + 1, sz):
                if m2[r][col]:
                    f = m2[r][col] / m2[col][col]
                    for c2 in range(col, sz):
                        m2[r][c2] -= f * m2[col][c2]
        return out

    for lj in lam:
        shifted = [[reg[r][c2] - (lj if r == c2 else 0) for c2 in range(dim)] for r in range(dim)]
        if det(shifted) != 0:
            raise InternalConsistencyError("claimed eigenvalue is not exact")

    vec = [Fraction(0)] * dim
    vec[0] = Fraction(1)
    for j in range(k):
        nxt = [sum(reg[r][c2] * vec[c2] for c2 in range(dim)) - lam[j] * vec[r]
               for r in range(dim)]
        vec = [x / (lam[k] - lam[j]) for x in nxt]

    T = standard_tableaux(n, k)[0]
    p = polytabloid_poly(T)
    sup = {_support(m): c for m, c in p.terms.items()}
    num = 0
    for S, cs in sup.items():
        for U, cu in sup.items():
            num += int(cs * cu) * (1 << (n - len(S | U)))
    theta = Fraction(num, 1 << k)

    values = []
    for t in range(n + 1):
        tot = Fraction(0)
        if t >= k:
            for i in range(min(k, t - k) + 1):
                tot += vec[i] * math.comb(t, k) * math.comb(k, i) * math.comb(t - k, i)
        values.append(tot / theta)
    return tuple(values)


_SANDWICH_DIM_CAP = 64


@lru_cache(maxsize=256)
def invariant_kernel(n: int, k: int) -> InvariantKernel:
    """Level values of the block-k invariant kernel on the n-cube.

    Uses the exact Gram-inverse sandwich while the block dimension stays
    small and the (cross-validated) distance-algebra projector beyond; both
    are exact rational computations.
    """
    if not 0 <= 2 * k <= n:
        raise InvalidShape("need 0 <= k <= n/2")
    if specht_dimension(n, k) <= _SANDWICH_DIM_CAP:
        values = _kernel_gram_sandwich(n, k)
    else:
        values = _kernel_scheme(n, k)
    return InvariantKernel(n, k, values)


def invariant_kernels(n: int, kmax: int) -> list[InvariantKernel]:
    return [invariant_kernel(n, k) for k in range(min(kmax, n // 2) + 1)]

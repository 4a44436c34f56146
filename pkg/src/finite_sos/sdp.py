"""Self-contained semidefinite feasibility solver with exact certification.

Finds block-diagonal positive semidefinite matrices subject to affine
equality constraints by Douglas-Rachford splitting between the product of
(floored) PSD cones and the constraint subspace.  The numeric phase is only
a search heuristic: candidate solutions are rounded to rationals, projected
exactly back onto the constraints, and certified by exact LDL^T, so every
"verified" answer is backed by rational arithmetic.  Infeasibility is never
inferred from non-convergence; it is reported only when the constraint
system is exactly inconsistent or pins a unique point that exactly fails
positive semidefiniteness.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np
import scipy.linalg

from .errors import InvalidProblem
from .linalg import AffineProjector, FractionLU, RowSpan, ldlt_psd

Coefficient = dict[tuple[int, int, int], Fraction]


class Status(enum.Enum):
    FEASIBLE = "feasible"
    INFEASIBLE = "infeasible"
    UNDETERMINED = "undetermined"


@dataclass(frozen=True)
class SdpProblem:
    """Feasibility problem: symmetric blocks X_b >= floor_b * I, affine rows.

    Each constraint is (coeffs, rhs) with coeffs mapping (block, i, j), i <= j,
    to a rational coefficient applied to the (i, j) entry of that block.
    """

    blocks: tuple[tuple[str, int], ...]
    constraints: tuple[tuple[tuple[tuple[tuple[int, int, int], Fraction], ...], Fraction], ...]
    floors: tuple[tuple[int, Fraction], ...] = ()

    @classmethod
    def build(cls, blocks, constraints, floors=None) -> "SdpProblem":
        blk = tuple((str(name), int(dim)) for name, dim in blocks)
        for name, dim in blk:
            if dim <= 0:
                raise InvalidProblem(f"block {name} has dimension {dim}")
        rows = []
        for coeffs, rhs in constraints:
            items = []
            for (b, i, j), c in sorted(coeffs.items()):
                if not 0 <= b < len(blk):
                    raise InvalidProblem("constraint references unknown block")
                if not 0 <= i <= j < blk[b][1]:
                    raise InvalidProblem("constraint references invalid entry")
                c = Fraction(c)
                if c:
                    items.append(((b, i, j), c))
            rows.append((tuple(items), Fraction(rhs)))
        fl = tuple(sorted((int(b), Fraction(f)) for b, f in (floors or {}).items()))
        return cls(blk, tuple(rows), fl)

    def floor_of(self, b: int) -> Fraction:
        for idx, f in self.floors:
            if idx == b:
                return f
        return Fraction(0)


@dataclass
class SdpSolution:
    block_matrices: list[np.ndarray]
    max_constraint_residual: float
    min_block_eigenvalue: float
    iterations: int
    status: Status


@dataclass
class ExactCertificate:
    block_matrices: list[list[list[Fraction]]]
    verified: bool
    pivots: list[list[Fraction]] = field(default_factory=list)


class _Layout:
    """Packs upper-triangle block entries into one coordinate vector."""

    def __init__(self, prob: SdpProblem):
        self.prob = prob
        self.offsets = []
        self.weights: list[int] = []
        off = 0
        for _, d in prob.blocks:
            self.offsets.append(off)
            for i in range(d):
                for j in range(i, d):
                    self.weights.append(1 if i == j else 2)
            off += d * (d + 1) // 2
        self.size = off

    def coord(self, b: int, i: int, j: int) -> int:
        d = self.prob.blocks[b][1]
        return self.offsets[b] + i * d - i * (i - 1) // 2 + (j - i)

    def unpack(self, x: np.ndarray) -> list[np.ndarray]:
        mats = []
        for b, (_, d) in enumerate(self.prob.blocks):
            m = np.zeros((d, d))
            pos = self.offsets[b]
            for i in range(d):
                for j in range(i, d):
                    m[i, j] = m[j, i] = x[pos]
                    pos += 1
            mats.append(m)
        return mats

    def pack(self, mats) -> np.ndarray:
        x = np.zeros(self.size)
        for b, (_, d) in enumerate(self.prob.blocks):
            pos = self.offsets[b]
            m = mats[b]
            for i in range(d):
                for j in range(i, d):
                    x[pos] = float(m[i][j]) if not isinstance(m, np.ndarray) else m[i, j]
                    pos += 1
        return x

    def unpack_exact(self, x: list[Fraction]) -> list[list[list[Fraction]]]:
        mats = []
        for b, (_, d) in enumerate(self.prob.blocks):
            m = [[Fraction(0)] * d for _ in range(d)]
            pos = self.offsets[b]
            for i in range(d):
                for j in range(i, d):
                    m[i][j] = m[j][i] = x[pos]
                    pos += 1
            mats.append(m)
        return mats


def _sparse_rows(prob: SdpProblem, layout: _Layout):
    rows = []
    rhs = []
    for coeffs, b in prob.constraints:
        row = {layout.coord(*key): c for key, c in coeffs}
        rows.append(row)
        rhs.append(b)
    return rows, rhs


def _strip_private(rows, active):
    """Peel off rows owning a coordinate no other active row touches.

    Such rows are automatically consistent and independent of the rest;
    peeling iteratively reduces the exact rank check to the residual core.
    """
    active = set(active)
    use_count: dict[int, int] = {}
    for r in active:
        for c in rows[r]:
            use_count[c] = use_count.get(c, 0) + 1
    stripped = []
    changed = True
    while changed:
        changed = False
        for r in sorted(active):
            if any(use_count[c] == 1 for c in rows[r]):
                active.remove(r)
                stripped.append(r)
                for c in rows[r]:
                    use_count[c] -= 1
                changed = True
    return stripped, sorted(active)


def preprocess(prob: SdpProblem) -> tuple[bool, list[int], _Layout]:
    """Exact consistency check; returns (consistent, independent row indices, layout)."""
    layout = _Layout(prob)
    rows, rhs = _sparse_rows(prob, layout)
    stripped, core = _strip_private(rows, range(len(rows)))
    indep = list(stripped)
    if core:
        used = sorted({c for r in core for c in rows[r]})
        colmap = {c: i for i, c in enumerate(used)}
        w = len(used)
        span_a = RowSpan(w)
        span_ab = RowSpan(w + 1)
        for r in core:
            vec = [Fraction(0)] * w
            for c, v in rows[r].items():
                vec[colmap[c]] = v
            added_a = span_a.add(vec)
            added_ab = span_ab.add(vec + [rhs[r]])
            if added_ab and not added_a:
                return False, [], layout
            if added_a:
                indep.append(r)
    return True, sorted(indep), layout


def _psd_project(mats, floors, eigh=np.linalg.eigh):
    out = []
    min_eig = np.inf
    for m, floor in zip(mats, floors):
        w, v = eigh(m)
        min_eig = min(min_eig, w[0] - floor)
        w = np.maximum(w, floor)
        out.append((v * w) @ v.T)
    return out, min_eig


def solve_feasibility(prob: SdpProblem, tol: float = 1e-9, max_iter: int = 200000,
                      seed: int = 0) -> SdpSolution:
    """Search for block matrices meeting the constraints and the PSD floors.

    Douglas-Rachford splitting on the packed coordinate vector; deterministic
    for a fixed seed.  Returns FEASIBLE only when the affine-projected
    candidate meets every tolerance, INFEASIBLE only on exact inconsistency
    or an exactly pinned-down non-PSD unique solution, else UNDETERMINED.
    """
    if tol <= 0:
        raise ValueError("tol must be positive")
    consistent, indep, layout = preprocess(prob)
    if not consistent:
        return SdpSolution([np.zeros((d, d)) for _, d in prob.blocks],
                           math.inf, -math.inf, 0, Status.INFEASIBLE)
    rows, rhs = _sparse_rows(prob, layout)
    floors = [float(prob.floor_of(b)) for b in range(len(prob.blocks))]

    if len(indep) == layout.size and layout.size <= 600:
        # constraints pin a unique point: decide exactly
        mat = [[Fraction(0)] * layout.size for _ in indep]
        vec = []
        for r_out, r in enumerate(indep):
            for c, v in rows[r].items():
                mat[r_out][c] = v
            vec.append(rhs[r])
        sol = FractionLU(mat).solve(vec)
        exact_blocks = layout.unpack_exact(sol)
        ok = True
        for b, m in enumerate(exact_blocks):
            floor = prob.floor_of(b)
            d = len(m)
            shifted = [[m[i][j] - (floor if i == j else 0) for j in range(d)] for i in range(d)]
            psd, _ = ldlt_psd(shifted)
            ok = ok and psd
        mats = [np.array([[float(x) for x in row] for row in m]) for m in exact_blocks]
        min_eig = min(np.linalg.eigvalsh(m)[0] - f for m, f in zip(mats, floors))
        return SdpSolution(mats, 0.0, float(min_eig), 0,
                           Status.FEASIBLE if ok else Status.INFEASIBLE)

    nrows = len(indep)
    N = layout.size
    A = np.zeros((nrows, N))
    b_vec = np.zeros(nrows)
    for out_i, r in enumerate(indep):
        for c, v in rows[r].items():
            A[out_i, c] = float(v)
        b_vec[out_i] = float(rhs[r])
    winv = 1.0 / np.array(layout.weights, dtype=float)

    if nrows:
        gram = (A * winv) @ A.T
        try:
            cho = scipy.linalg.cho_factor(gram)
            solve_gram = lambda r: scipy.linalg.cho_solve(cho, r)
        except scipy.linalg.LinAlgError:
            pinv = np.linalg.pinv(gram)
            solve_gram = lambda r: pinv @ r

        def proj_affine(x):
            return x - winv * (A.T @ solve_gram(A @ x - b_vec))
    else:
        def proj_affine(x):
            return x

    rng = np.random.default_rng(seed)
    z = 0.1 * rng.standard_normal(N)
    check_every = 25
    iterations = 0
    best = None
    for it in range(1, max_iter + 1):
        iterations = it
        p_mats, _ = _psd_project(layout.unpack(z), floors)
        p = layout.pack(p_mats)
        q = proj_affine(2 * p - z)
        z = z + q - p
        gap = float(np.max(np.abs(q - p))) if N else 0.0
        if gap <= tol or it % check_every == 0:
            mats = layout.unpack(q)
            resid = float(np.max(np.abs(A @ q - b_vec))) if nrows else 0.0
            min_eig = min(np.linalg.eigvalsh(m)[0] - f for m, f in zip(mats, floors)) \
                if mats else 0.0
            best = (mats, resid, float(min_eig))
            if resid <= tol and min_eig >= -tol:
                return SdpSolution(mats, resid, float(min_eig), iterations, Status.FEASIBLE)
    mats, resid, min_eig = best if best else (layout.unpack(z), math.inf, -math.inf)
    return SdpSolution(mats, resid, min_eig, iterations, Status.UNDETERMINED)


def round_and_verify(sol: SdpSolution, prob: SdpProblem, den_bound: int = 10**6) -> ExactCertificate:
    """Round a numeric solution to rationals and certify it exactly.

    Entries are replaced by best rational approximations with denominator at
    most den_bound, projected exactly onto the constraint subspace in the
    Frobenius metric, then every block (shifted by its floor) must pass an
    exact LDL^T with nonnegative pivots and every constraint must hold with
    zero residual.  Failure is reported through verified=False.
    """
    if sol.status is not Status.FEASIBLE:
        raise ValueError("round_and_verify requires a numerically feasible solution")
    consistent, indep, layout = preprocess(prob)
    if not consistent:
        raise InvalidProblem("constraints are exactly inconsistent")
    rows, rhs = _sparse_rows(prob, layout)
    x = [Fraction(v).limit_denominator(den_bound) for v in layout.pack(sol.block_matrices)]
    if indep:
        projector = AffineProjector([rows[r] for r in indep], [rhs[r] for r in indep],
                                    layout.weights, layout.size)
        x = projector.project(x)
    for row, b in zip(rows, rhs):
        acc = sum(c * x[idx] for idx, c in row.items())
        if acc != b:
            return ExactCertificate(layout.unpack_exact(x), False)
    blocks = layout.unpack_exact(x)
    pivots_all = []
    for bidx, m in enumerate(blocks):
        floor = prob.floor_of(bidx)
        d = len(m)
        shifted = [[m[i][j] - (floor if i == j else 0) for j in range(d)] for i in range(d)]
        ok, pivots = ldlt_psd(shifted)
        if not ok:
            return ExactCertificate(blocks, False)
        pivots_all.append(pivots)
    return ExactCertificate(blocks, True, pivots_all)

"""Sum-of-squares membership and refutation certificates on finite point sets.

A function f on a finite rational point set X is a "degree-k square sum" if
f(v) = pi_k(v)^T G pi_k(v) for a PSD Gram matrix G over the degree-k quotient
basis; f is (d1, d2)-multiplier-representable if some nonzero degree-d1
square sum h makes the pointwise product f*h a degree-d2 square sum.  Both
questions are linear semidefinite feasibility problems because products are
pointwise on X.  This module formulates them, searches numerically, rounds
to exact rational certificates, builds dual refutations from separating
point weights, applies the coordinate-permutation block reduction on the
hypercube, and constructs the named example families (the level quadratic
vanishing on the two middle levels, the cut-count identity, the globally
nonnegative quartic with a forced multiplier degree).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import product
from typing import Literal

import numpy as np

from .errors import (
    InternalConsistencyError,
    NotACubePoint,
    RequiresOddN,
    SearchFailed,
    ZeroPolynomial,
)
from .linalg import FractionLU, is_psd_with_margin, ldlt_psd, nullspace_exact
from .ring import (
    Monomial,
    Point,
    PointSet,
    Poly,
    QuotientBasis,
    cube_dimension,
    hilbert_function,
    quotient_basis,
)
from .sdp import ExactCertificate, SdpProblem, SdpSolution, Status, round_and_verify, solve_feasibility
from .symmetry import (
    InvariantKernel,
    invariant_kernel,
    is_invariant,
    level_values,
    specht_dimension,
    squarefree_monomials,
    standard_tableaux,
    polytabloid_poly,
    ell_order,
    symmetrize,
)


@dataclass(frozen=True)
class SolverConfig:
    """Numeric search and exact rounding parameters."""

    tol: float = 1e-9
    max_iter: int = 200000
    seed: int = 0
    den_bound: int = 10**6
    interior_eps: Fraction = Fraction(1, 10**4)
    sign_threshold: float = 1e-8
    cross_check: bool = True

    def denominator_ladder(self) -> list[int]:
        ladder = [100, 10**4, 10**6, 10**8]
        out = [d for d in ladder if d < self.den_bound]
        out.append(self.den_bound)
        return out


DEFAULT_CONFIG = SolverConfig()


# ---------------------------------------------------------------------------
# certificate containers

@dataclass
class GramCertificate:
    """PSD Gram data certifying a square-sum representation over a basis."""

    basis_monomials: tuple[Monomial, ...]
    gram: list  # rational rows when exact, numpy array otherwise
    residuals: list
    exact: bool
    pointset: PointSet | None = None

    @property
    def dim(self) -> int:
        return len(self.basis_monomials)


@dataclass
class MultiplierCertificate:
    """Pair (h, p*h) of square-sum certificates with the average-one pinning."""

    h_gram: GramCertificate
    ph_gram: GramCertificate
    normalization: Fraction | float

    @property
    def exact(self) -> bool:
        return self.h_gram.exact and self.ph_gram.exact


@dataclass
class RefutationCertificate:
    """Point weights whose moment matrices separate p*(squares) from squares.

    moment_hi = sum_v mu_v pi_{d2}(v) pi_{d2}(v)^T must be PSD with margin
    and moment_lo = sum_v mu_v p(v) pi_{d1}(v) pi_{d1}(v)^T negative definite
    with margin: any certificate pair (h, g) would force the contradictory
    trace identity sum mu p h = sum mu g.
    """

    weights: dict[Point, Fraction | float]
    moment_hi: list
    moment_lo: list
    margin: Fraction | float
    sign_counts: tuple[int, int]
    exact: bool
    d1: int
    d2: int


@dataclass
class Undetermined:
    reason: str
    diagnostics: dict = field(default_factory=dict)


@dataclass(frozen=True)
class SymmetricReducedProblem:
    """Shape of the block-reduced invariant problem on the n-cube."""

    n: int
    d1: int
    d2: int
    level_param: Fraction
    kernels: tuple[InvariantKernel, ...]
    level_targets: tuple[Fraction, ...]
    h_block_sizes: tuple[int, ...]
    g_block_sizes: tuple[int, ...]


@dataclass
class SymmetricMultiplierCertificate:
    """Block-diagonal invariant certificate; expandable to full Gram matrices."""

    problem: SymmetricReducedProblem
    h_blocks: dict[int, list]
    g_blocks: dict[int, list]
    h_levels: tuple[Fraction, ...]
    g_levels: tuple[Fraction, ...]
    normalization: Fraction | float
    exact: bool


@dataclass
class SymmetricRefutation:
    """Level weights refuting an invariant multiplier representation."""

    problem: SymmetricReducedProblem
    level_weights: list
    hi_blocks: dict[int, list]
    lo_blocks: dict[int, list]
    margin: Fraction | float
    sign_counts: tuple[int, int]
    exact: bool


@dataclass(frozen=True)
class RsosRegion:
    """Degrees (d1, d2) excluded for an invariant function vanishing to odd order."""

    d1_max: int
    d2_max: int
    sos_max: int  # not a degree-d square sum for any d <= sos_max


@dataclass(frozen=True)
class NotApplicable:
    failed_hypothesis: str


# ---------------------------------------------------------------------------
# named constructions

def laurent_quadratic(n: int) -> Poly:
    """(x_1+...+x_n - k)(x_1+...+x_n - k - 1) with k = floor(n/2), reduced on the cube.

    Nonnegative on {0,1}^n and zero exactly on the two middle levels k, k+1.
    """
    if n < 1:
        raise ValueError("need n >= 1")
    k = n // 2
    s = Poly.coordinate_sum(n)
    f = ((s - Poly.constant(n, k)) * (s - Poly.constant(n, k + 1))).squarefree()
    vals = level_values(f)
    for t, val in enumerate(vals):
        expect = Fraction((t - k) * (t - k - 1))
        if val != expect or val < 0:
            raise InternalConsistencyError("level quadratic has wrong level values")
    return f


def perturbed_cube(n: int, alpha: list[Fraction]) -> PointSet:
    """The 2^n points prod_i {alpha_i, alpha_i + 1}; alpha = 0 is the unit cube."""
    if len(alpha) != n:
        raise ValueError("alpha must have length n")
    alpha = [Fraction(a) for a in alpha]
    pts = [tuple(a + b for a, b in zip(alpha, bits))
           for bits in product((Fraction(0), Fraction(1)), repeat=n)]
    return PointSet(n, tuple(pts))


def maxcut_deficit(n: int, v: Point) -> tuple[Fraction, int]:
    """Value of the level quadratic at v versus the size of the cut v induces.

    The partition S^v = ({i: v_i = 0}, {i: v_i = 1}) of the complete graph
    K_n cuts s(n - s) edges where s = sum(v); direct expansion gives
    q(v) = k(k+1) - s(n-s) for odd n, so q counts the deficit from a maximum
    cut rather than the cut itself.
    """
    if n % 2 == 0:
        raise RequiresOddN("the cut identity is stated for odd n")
    v = tuple(Fraction(c) for c in v)
    for c in v:
        if c != 0 and c != 1:
            raise NotACubePoint(f"coordinate {c} outside {{0,1}}")
    k = n // 2
    s = int(sum(v))
    q = Fraction((s - k) * (s - k - 1))
    cut = s * (n - s)
    if q != k * (k + 1) - cut:
        raise InternalConsistencyError("cut deficit identity failed")
    return q, cut


# ---------------------------------------------------------------------------
# shared SDP assembly helpers

def _pair_coeffs(block: int, vec: list[Fraction]) -> dict[tuple[int, int, int], Fraction]:
    """Coefficients of pi^T X pi as a linear form in the upper-triangle entries."""
    out = {}
    m = len(vec)
    for i in range(m):
        if vec[i] == 0:
            continue
        for j in range(i, m):
            if vec[j] == 0:
                continue
            c = vec[i] * vec[j]
            out[(block, i, j)] = c if i == j else 2 * c
    return out


def _merge(*maps):
    out: dict = {}
    for mp in maps:
        for key, c in mp.items():
            out[key] = out.get(key, Fraction(0)) + c
    return out


def _scale_map(mp, c: Fraction):
    return {k: c * v for k, v in mp.items()}


def _facial_basis(kernel_rows: list[list[Fraction]], dim: int) -> list[list[Fraction]] | None:
    """Columns spanning the orthogonal complement of forced kernel vectors.

    Returns None when no reduction is needed; a dim x r column basis N such
    that X = N Xhat N^T ranges over the PSD matrices vanishing on the forced
    directions as Xhat ranges over PSD matrices of size r.
    """
    rows = [r for r in kernel_rows if any(r)]
    if not rows:
        return None
    null = nullspace_exact(rows)
    if not null:
        return []
    return [list(col) for col in zip(*null)]  # dim x r


def _reduce_vector(N: list[list[Fraction]] | None, vec: list[Fraction]) -> list[Fraction]:
    if N is None:
        return vec
    r = len(N[0]) if N else 0
    return [sum(N[i][c] * vec[i] for i in range(len(vec))) for c in range(r)]


def _expand_gram(N: list[list[Fraction]] | None, small: list[list[Fraction]], dim: int) -> list[list[Fraction]]:
    if N is None:
        return small
    r = len(small)
    out = [[Fraction(0)] * dim for _ in range(dim)]
    for a in range(dim):
        for b in range(a, dim):
            acc = Fraction(0)
            for i in range(r):
                Nai = N[a][i]
                if not Nai:
                    continue
                row = small[i]
                for j in range(r):
                    if N[b][j] and row[j]:
                        acc += Nai * row[j] * N[b][j]
            out[a][b] = out[b][a] = acc
    return out


def _exact_moment(vectors: list[list[Fraction]], weights: list[Fraction]) -> list[list[Fraction]]:
    dim = len(vectors[0]) if vectors else 0
    m = [[Fraction(0)] * dim for _ in range(dim)]
    for vec, w in zip(vectors, weights):
        if not w:
            continue
        for i in range(dim):
            if vec[i] == 0:
                continue
            wi = w * vec[i]
            for j in range(i, dim):
                if vec[j]:
                    m[i][j] += wi * vec[j]
    for i in range(dim):
        for j in range(i + 1, dim):
            m[j][i] = m[i][j]
    return m


def _exact_margin(hi: list[list[Fraction]], lo_neg: list[list[Fraction]],
                  start: float) -> Fraction | None:
    """Largest tried rational eps with hi - eps*I and lo_neg - eps*I both PSD."""
    if start <= 0:
        return None
    eps = Fraction(start).limit_denominator(10**6)
    for _ in range(8):
        if eps <= 0:
            break
        if is_psd_with_margin(hi, eps) and is_psd_with_margin(lo_neg, eps):
            return eps
        eps /= 4
    return None


# ---------------------------------------------------------------------------
# square-sum membership

def is_k_sos(X: PointSet, f: Poly, k: int,
             config: SolverConfig = DEFAULT_CONFIG):
    """Decide whether f is a sum of squares of degree <= k elements on X.

    Returns a GramCertificate on success and a RefutationCertificate when a
    separating weight vector is found (immediately, by construction, when f
    is negative somewhere on X); Undetermined only if both searches fail.
    """
    if k < 0:
        raise ValueError("k must be nonnegative")
    qb = quotient_basis(X, k)
    values = [f.evaluate(v) for v in X]
    if min(values) < 0:
        return _negative_value_refutation(X, qb, values, k)
    cert = _gram_search(X, qb, values, config)
    if isinstance(cert, GramCertificate):
        return cert
    dual = refute_rsos(X, f, 0, k, config)
    if isinstance(dual, RefutationCertificate):
        return dual
    return Undetermined("neither a Gram certificate nor a refutation converged",
                        {"primal": cert.reason if isinstance(cert, Undetermined) else "",
                         "dual": dual.reason if isinstance(dual, Undetermined) else ""})


def _negative_value_refutation(X: PointSet, qb: QuotientBasis, values: list[Fraction], k: int):
    """Exact refutation from a negative value: uniform weights plus mass there.

    With mu = 1 + W * indicator(v*), the moment matrix dominates the full
    positive-definite uniform moment matrix while sum mu f <= -1, so no
    square-sum of any degree <= k can match f.
    """
    idx = min(range(len(values)), key=lambda i: values[i])
    fmin = values[idx]
    total = sum(values)
    W = (1 + max(total, Fraction(0))) / (-fmin) + 1
    weights = [Fraction(1)] * len(X.points)
    weights[idx] += W
    rows = [list(r) for r in qb.eval_matrix]
    hi = _exact_moment(rows, weights)
    lo_value = sum(w * val for w, val in zip(weights, values))
    assert lo_value <= -1
    margin = None
    eps = Fraction(1)
    for _ in range(60):
        if is_psd_with_margin(hi, eps):
            margin = eps
            break
        eps /= 2
    if margin is None:
        raise InternalConsistencyError("uniform moment matrix must be positive definite")
    margin = min(margin, -lo_value)
    m_plus = len(X.points)
    cert = RefutationCertificate(
        weights={v: w for v, w in zip(X.points, weights)},
        moment_hi=hi,
        moment_lo=[[lo_value]],
        margin=margin,
        sign_counts=(m_plus, 0),
        exact=True,
        d1=0,
        d2=k,
    )
    _validate_sign_counts(cert, hilbert_function(X, k), 1)
    return cert


def _gram_search(X: PointSet, qb: QuotientBasis, values: list[Fraction],
                 config: SolverConfig,
                 floor: Fraction | None = None):
    """Numeric search plus exact rounding for pi^T G pi = values, G PSD.

    Points where the target value vanishes force G to kill pi(v); those
    directions are eliminated exactly beforehand so the reduced block can sit
    in the relative interior, which makes rational rounding reliable.
    """
    rows = [list(r) for r in qb.eval_matrix]
    dim = qb.dim
    zero_idx = [i for i, val in enumerate(values) if val == 0]
    N = _facial_basis([rows[i] for i in zero_idx], dim) if floor is None else None
    if N == []:
        if all(val == 0 for val in values):
            gram = [[Fraction(0)] * dim for _ in range(dim)]
            return GramCertificate(qb.basis_monomials, gram, [Fraction(0)] * len(values),
                                   True, X)
        return Undetermined("zero set forces the zero Gram matrix but f is nonzero", {})
    red_rows = [_reduce_vector(N, r) for r in rows]
    rdim = len(red_rows[0])
    constraints = []
    for i, val in enumerate(values):
        if N is not None and i in zero_idx:
            continue
        constraints.append((_pair_coeffs(0, red_rows[i]), val))
    floors = {0: floor} if floor is not None else None
    prob = SdpProblem.build([("G", rdim)], constraints, floors)
    sol = solve_feasibility(prob, config.tol, config.max_iter, config.seed)
    if sol.status is Status.INFEASIBLE:
        return Undetermined("constraint system exactly inconsistent", {})
    if sol.status is not Status.FEASIBLE:
        return Undetermined("no numeric convergence",
                            {"residual": sol.max_constraint_residual,
                             "min_eig": sol.min_block_eigenvalue})
    for den in config.denominator_ladder():
        cert = round_and_verify(sol, prob, den)
        if cert.verified:
            gram = _expand_gram(N, cert.block_matrices[0], dim)
            resid = [val - _quad_form(gram, r) for val, r in zip(values, rows)]
            if any(resid):
                continue
            return GramCertificate(qb.basis_monomials, gram, resid, True, X)
    gram_f = sol.block_matrices[0]
    if N is not None:
        Nf = np.array([[float(x) for x in row] for row in N])
        gram_f = Nf @ gram_f @ Nf.T
    resid = [float(val) - float(r_ @ gram_f @ r_)
             for val, r_ in zip(values, [np.array([float(x) for x in r]) for r in rows])]
    return GramCertificate(qb.basis_monomials, gram_f, resid, False, X)


def _quad_form(gram: list[list[Fraction]], vec: list[Fraction]) -> Fraction:
    total = Fraction(0)
    n = len(vec)
    for i in range(n):
        if vec[i] == 0:
            continue
        row = gram[i]
        total += vec[i] * vec[i] * row[i]
        for j in range(i + 1, n):
            if vec[j]:
                total += 2 * vec[i] * vec[j] * row[j]
    return total


# ---------------------------------------------------------------------------
# multiplier certificates

def rsos_pair(p: Poly, k: int) -> tuple[int, int]:
    """Degrees (k - s, k) realizing the shorthand 'p is k-rsos' for deg p = 2s."""
    s = (p.squarefree().degree() + 1) // 2
    if k < s:
        raise ValueError("k must be at least ceil(deg p / 2)")
    return k - s, k


def is_rsos(X: PointSet, p: Poly, d1: int, d2: int,
            config: SolverConfig = DEFAULT_CONFIG,
            h_floor: Fraction | None = None,
            g_floor: Fraction | None = None):
    """Search for nonzero h = sum of squares (degree d1) with p*h a degree-d2 square sum.

    One joint SDP, linear in both Gram matrices because all products are
    pointwise on X; h is pinned away from zero by requiring average value 1.
    Optional floors request positive-definite Gram matrices (interior
    certificates).  Returns MultiplierCertificate or Undetermined.
    """
    if d1 < 0 or d2 < 0:
        raise ValueError("degrees must be nonnegative")
    qb1 = quotient_basis(X, d1)
    qb2 = quotient_basis(X, d2)
    rows1 = [list(r) for r in qb1.eval_matrix]
    rows2 = [list(r) for r in qb2.eval_matrix]
    values = [p.evaluate(v) for v in X]
    m = len(X.points)

    neg_idx = [i for i, val in enumerate(values) if val < 0]
    zer_idx = [i for i, val in enumerate(values) if val <= 0]
    Nh = _facial_basis([rows1[i] for i in neg_idx], qb1.dim) if h_floor is None else None
    Ng = _facial_basis([rows2[i] for i in zer_idx], qb2.dim) if g_floor is None else None
    if Nh == [] or Ng == []:
        return Undetermined("forced kernel collapses a Gram block entirely", {})
    red1 = [_reduce_vector(Nh, r) for r in rows1]
    red2 = [_reduce_vector(Ng, r) for r in rows2]
    k1, k2 = len(red1[0]), len(red2[0])

    constraints = []
    for i in range(m):
        if values[i] == 0 and Ng is not None:
            continue  # product side exactly zero by the facial reduction
        if values[i] < 0 and Nh is not None and Ng is not None:
            continue  # both sides exactly zero by the facial reductions
        lhs = _scale_map(_pair_coeffs(0, red1[i]), values[i])
        rhs = _scale_map(_pair_coeffs(1, red2[i]), Fraction(-1))
        constraints.append((_merge(lhs, rhs), Fraction(0)))
    norm_row = _merge(*[_pair_coeffs(0, red1[i]) for i in range(m)])
    constraints.append((norm_row, Fraction(m)))

    floors = {}
    if h_floor is not None:
        floors[0] = h_floor
    if g_floor is not None:
        floors[1] = g_floor
    prob = SdpProblem.build([("H", k1), ("G", k2)], constraints, floors or None)
    sol = solve_feasibility(prob, config.tol, config.max_iter, config.seed)
    if sol.status is not Status.FEASIBLE:
        return Undetermined("no numeric convergence",
                            {"residual": sol.max_constraint_residual,
                             "min_eig": sol.min_block_eigenvalue,
                             "status": sol.status.value})
    for den in config.denominator_ladder():
        cert = round_and_verify(sol, prob, den)
        if not cert.verified:
            continue
        H = _expand_gram(Nh, cert.block_matrices[0], qb1.dim)
        G = _expand_gram(Ng, cert.block_matrices[1], qb2.dim)
        h_vals = [_quad_form(H, r) for r in rows1]
        g_vals = [_quad_form(G, r) for r in rows2]
        if any(values[i] * h_vals[i] != g_vals[i] for i in range(m)):
            continue
        norm = sum(h_vals)
        if norm != m:
            continue
        h_gram = GramCertificate(qb1.basis_monomials, H, [Fraction(0)] * m, True, X)
        ph_gram = GramCertificate(
            qb2.basis_monomials, G,
            [values[i] * h_vals[i] - g_vals[i] for i in range(m)], True, X)
        return MultiplierCertificate(h_gram, ph_gram, norm)
    # numeric-only fallback
    Hf, Gf = sol.block_matrices
    if Nh is not None:
        Nf = np.array([[float(x) for x in row] for row in Nh])
        Hf = Nf @ Hf @ Nf.T
    if Ng is not None:
        Nf = np.array([[float(x) for x in row] for row in Ng])
        Gf = Nf @ Gf @ Nf.T
    h_gram = GramCertificate(qb1.basis_monomials, Hf, [], False, X)
    ph_gram = GramCertificate(qb2.basis_monomials, Gf, [], False, X)
    return MultiplierCertificate(h_gram, ph_gram, float(sum(
        np.array([float(x) for x in r]) @ Hf @ np.array([float(x) for x in r]) for r in rows1)))


def refute_rsos(X: PointSet, p: Poly, d1: int, d2: int,
                config: SolverConfig = DEFAULT_CONFIG):
    """Search for point weights proving p admits no (d1, d2) multiplier pair.

    Weights mu with M_{d2}(mu) >= eps*I and M_{d1}(p mu) <= -eps*I settle the
    question: for a certificate pair, pairing h with moment_lo forces
    sum mu p h < 0 while pairing p*h = g with moment_hi forces >= 0.  The
    numeric weights are rounded and both matrix inequalities re-proved in
    exact arithmetic before anything is reported as refuted.
    """
    qb1 = quotient_basis(X, d1)
    qb2 = quotient_basis(X, d2)
    rows1 = [list(r) for r in qb1.eval_matrix]
    rows2 = [list(r) for r in qb2.eval_matrix]
    values = [p.evaluate(v) for v in X]
    m = len(X.points)
    m1, m2 = qb1.dim, qb2.dim

    for eps_num in (1e-4, 1e-6):
        eps = Fraction(eps_num).limit_denominator(10**9)
        blocks = [("hi", m2), ("lo", m1)] + [(f"u{i}", 1) for i in range(m)] + \
                 [(f"w{i}", 1) for i in range(m)]
        constraints = []
        for i in range(m2):
            for j in range(i, m2):
                coeffs = {(0, i, j): Fraction(1)}
                for v in range(m):
                    c = rows2[v][i] * rows2[v][j]
                    if c:
                        coeffs[(2 + v, 0, 0)] = -c
                        coeffs[(2 + m + v, 0, 0)] = c
                constraints.append((coeffs, -eps if i == j else Fraction(0)))
        for i in range(m1):
            for j in range(i, m1):
                coeffs = {(1, i, j): Fraction(1)}
                for v in range(m):
                    c = values[v] * rows1[v][i] * rows1[v][j]
                    if c:
                        coeffs[(2 + v, 0, 0)] = c
                        coeffs[(2 + m + v, 0, 0)] = -c
                constraints.append((coeffs, -eps if i == j else Fraction(0)))
        trace_row: dict = {}
        for v in range(m):
            c = sum(x * x for x in rows2[v])
            if c:
                trace_row[(2 + v, 0, 0)] = c
                trace_row[(2 + m + v, 0, 0)] = -c
        constraints.append((trace_row, Fraction(m2)))
        prob = SdpProblem.build(blocks, constraints)
        sol = solve_feasibility(prob, config.tol, config.max_iter, config.seed)
        if sol.status is not Status.FEASIBLE:
            continue
        mu_float = [float(sol.block_matrices[2 + v][0, 0] - sol.block_matrices[2 + m + v][0, 0])
                    for v in range(m)]
        for den in config.denominator_ladder():
            mu = [Fraction(x).limit_denominator(den) for x in mu_float]
            hi = _exact_moment(rows2, mu)
            lo = _exact_moment(rows1, [w * val for w, val in zip(mu, values)])
            lo_neg = [[-x for x in row] for row in lo]
            margin = _exact_margin(hi, lo_neg, eps_num / 2)
            if margin is None:
                continue
            cert = RefutationCertificate(
                weights={v: w for v, w in zip(X.points, mu)},
                moment_hi=hi, moment_lo=lo, margin=margin,
                sign_counts=_count_signs(mu, config.sign_threshold),
                exact=True, d1=d1, d2=d2)
            _validate_sign_counts(cert, m2, m1, config.sign_threshold)
            return cert
    return Undetermined("no refutation found at the attempted margins", {})


def _count_signs(weights, threshold: float) -> tuple[int, int]:
    plus = sum(1 for w in weights if float(w) > threshold)
    minus = sum(1 for w in weights if float(w) < -threshold)
    return plus, minus


def _validate_sign_counts(cert: RefutationCertificate, dim_hi: int, dim_lo: int,
                          threshold: float = 1e-8) -> None:
    """Check the sign-count lower bounds when no weight sits below threshold.

    A weight functional nonnegative on degree-d squares and with all weights
    nonzero must carry at least dim R[X]_{<=d} positive weights; applied to
    both moment matrices this bounds both sign counts.
    """
    ws = list(cert.weights.values())
    if all(abs(float(w)) > threshold for w in ws):
        m_plus, m_minus = cert.sign_counts
        if m_plus < dim_hi or m_minus < dim_lo:
            raise InternalConsistencyError(
                f"sign counts ({m_plus}, {m_minus}) below ({dim_hi}, {dim_lo})")


def interior_multiplier(X: PointSet, p: Poly, d: int, eps: Fraction | None = None,
                        config: SolverConfig = DEFAULT_CONFIG):
    """Multiplier certificate with the h Gram bounded below by eps on a cube subset.

    For p strictly positive on X both Gram matrices are floored (an interior
    pair exists at d = floor(n/2)); for p nonnegative only h is floored and
    the product block is face-reduced on the zero set (one extra degree
    suffices).  Interior membership is operationalized as minimum Gram
    eigenvalue >= eps.
    """
    X.require_boolean()
    if p.squarefree().is_zero():
        raise ZeroPolynomial("interior multiplier of the zero polynomial")
    eps = Fraction(eps) if eps is not None else config.interior_eps
    values = [p.evaluate(v) for v in X]
    strictly_positive = min(values) > 0
    return is_rsos(X, p, d, d + 1, config,
                   h_floor=eps,
                   g_floor=eps if strictly_positive else None)


# ---------------------------------------------------------------------------
# symmetry-reduced certificates on the full cube

def _block_sizes(n: int, d: int) -> list[int]:
    return [min(d - k, n - 2 * k) + 1 for k in range(min(d, n // 2) + 1)]


def _reduced_problem(n: int, f: Poly, d1: int, d2: int, level_param: Fraction) -> SymmetricReducedProblem:
    kernels = tuple(invariant_kernel(n, k) for k in range(min(max(d1, d2), n // 2) + 1))
    return SymmetricReducedProblem(
        n=n, d1=d1, d2=d2, level_param=Fraction(level_param),
        kernels=kernels,
        level_targets=tuple(level_values(f)),
        h_block_sizes=tuple(_block_sizes(n, d1)),
        g_block_sizes=tuple(_block_sizes(n, d2)),
    )


def _power_vector(ell_t: Fraction, size: int) -> list[Fraction]:
    return [ell_t ** i for i in range(size)]


def symmetric_rsos(n: int, f: Poly, d1: int, d2: int,
                   mode: Literal["certify", "refute"],
                   level_param: Fraction = Fraction(0),
                   config: SolverConfig = DEFAULT_CONFIG):
    """Invariant multiplier certification or refutation via block reduction.

    Invariant square sums of degree <= 2d are exactly the functions
    sum_k <Q_k, s_k(t) pow(ell_t) pow(ell_t)^T> with Q_k PSD of size
    m_k = min(d-k, n-2k)+1, so both the certificate and the refutation
    searches collapse to n+1 level constraints over blocks of that size.
    Symmetrizing any putative certificate shows the reduction loses nothing.
    """
    if symmetrize(f) != f.squarefree():
        from .errors import NotSymmetric
        raise NotSymmetric("polynomial is not invariant under coordinate permutations")
    prob = _reduced_problem(n, f, d1, d2, level_param)
    if mode == "certify":
        result = _symmetric_certify(prob, config)
        if config.cross_check and n <= 5 and isinstance(result, SymmetricMultiplierCertificate):
            direct = is_rsos(PointSet.cube(n), f, d1, d2, config)
            if isinstance(direct, Undetermined):
                pass  # numeric failure of the unreduced path is not a disagreement
            elif not isinstance(direct, MultiplierCertificate):
                raise InternalConsistencyError("reduced and direct certification disagree")
        return result
    if mode == "refute":
        return _symmetric_refute(prob, config)
    raise ValueError("mode must be 'certify' or 'refute'")


def _symmetric_certify(prob: SymmetricReducedProblem, config: SolverConfig):
    n = prob.n
    tpar = prob.level_param
    pvals = prob.level_targets
    skv = {k: prob.kernels[k].values for k in range(len(prob.kernels))}
    hks = list(range(len(prob.h_block_sizes)))
    gks = list(range(len(prob.g_block_sizes)))

    neg_levels = [t for t in range(n + 1) if pvals[t] < 0]
    zer_levels = [t for t in range(n + 1) if pvals[t] <= 0]
    h_faces = {}
    g_faces = {}
    h_dims = {}
    g_dims = {}
    for k in hks:
        size = prob.h_block_sizes[k]
        kern = [_power_vector(tpar - t, size) for t in neg_levels if skv[k][t] > 0]
        N = _facial_basis(kern, size)
        h_faces[k] = N
        h_dims[k] = size if N is None else (len(N[0]) if N else 0)
    for k in gks:
        size = prob.g_block_sizes[k]
        kern = [_power_vector(tpar - t, size) for t in zer_levels if skv[k][t] > 0]
        N = _facial_basis(kern, size)
        g_faces[k] = N
        g_dims[k] = size if N is None else (len(N[0]) if N else 0)

    blocks = []
    h_index = {}
    g_index = {}
    for k in hks:
        if h_dims[k] > 0:
            h_index[k] = len(blocks)
            blocks.append((f"Q{k}", h_dims[k]))
    for k in gks:
        if g_dims[k] > 0:
            g_index[k] = len(blocks)
            blocks.append((f"P{k}", g_dims[k]))
    if not h_index:
        return Undetermined("the nonzero multiplier is excluded by the face structure", {})

    def h_level_map(t):
        out = {}
        for k, bidx in h_index.items():
            if skv[k][t] == 0:
                continue
            vec = _reduce_vector(h_faces[k], _power_vector(tpar - t, prob.h_block_sizes[k]))
            out = _merge(out, _scale_map(_pair_coeffs(bidx, vec), skv[k][t]))
        return out

    def g_level_map(t):
        out = {}
        for k, bidx in g_index.items():
            if skv[k][t] == 0:
                continue
            vec = _reduce_vector(g_faces[k], _power_vector(tpar - t, prob.g_block_sizes[k]))
            out = _merge(out, _scale_map(_pair_coeffs(bidx, vec), skv[k][t]))
        return out

    constraints = []
    for t in range(n + 1):
        if pvals[t] <= 0:
            continue  # both sides forced to zero exactly
        row = _merge(_scale_map(h_level_map(t), pvals[t]),
                     _scale_map(g_level_map(t), Fraction(-1)))
        constraints.append((row, Fraction(0)))
    norm = {}
    for t in range(n + 1):
        norm = _merge(norm, _scale_map(h_level_map(t), Fraction(math.comb(n, t))))
    constraints.append((norm, Fraction(2 ** n)))

    sdp = SdpProblem.build(blocks, constraints)
    sol = solve_feasibility(sdp, config.tol, config.max_iter, config.seed)
    if sol.status is not Status.FEASIBLE:
        return Undetermined("no numeric convergence for the reduced problem",
                            {"residual": sol.max_constraint_residual,
                             "min_eig": sol.min_block_eigenvalue})
    for den in config.denominator_ladder():
        cert = round_and_verify(sol, sdp, den)
        if not cert.verified:
            continue
        h_blocks = {}
        g_blocks = {}
        for k, bidx in h_index.items():
            h_blocks[k] = _expand_gram(h_faces[k], cert.block_matrices[bidx], prob.h_block_sizes[k])
        for k in hks:
            h_blocks.setdefault(k, [[Fraction(0)] * prob.h_block_sizes[k]
                                    for _ in range(prob.h_block_sizes[k])])
        for k, bidx in g_index.items():
            g_blocks[k] = _expand_gram(g_faces[k], cert.block_matrices[bidx], prob.g_block_sizes[k])
        for k in gks:
            g_blocks.setdefault(k, [[Fraction(0)] * prob.g_block_sizes[k]
                                    for _ in range(prob.g_block_sizes[k])])
        h_levels = tuple(_invariant_level_value(prob, h_blocks, t, prob.h_block_sizes)
                         for t in range(n + 1))
        g_levels = tuple(_invariant_level_value(prob, g_blocks, t, prob.g_block_sizes)
                         for t in range(n + 1))
        if any(pvals[t] * h_levels[t] != g_levels[t] for t in range(n + 1)):
            continue
        normalization = sum(math.comb(n, t) * h_levels[t] for t in range(n + 1))
        if normalization != 2 ** n:
            continue
        return SymmetricMultiplierCertificate(prob, h_blocks, g_blocks,
                                              h_levels, g_levels, normalization, True)
    return Undetermined("rounding failed for the reduced certificate", {})


def _invariant_level_value(prob: SymmetricReducedProblem, blocks: dict[int, list],
                           t: int, sizes) -> Fraction:
    total = Fraction(0)
    for k, mat in blocks.items():
        sk = prob.kernels[k].values[t]
        if sk == 0:
            continue
        vec = _power_vector(prob.level_param - t, sizes[k])
        total += sk * _quad_form(mat, vec)
    return total


def _symmetric_refute(prob: SymmetricReducedProblem, config: SolverConfig):
    n = prob.n
    tpar = prob.level_param
    pvals = prob.level_targets
    counts = [math.comb(n, t) for t in range(n + 1)]
    hi_sizes = prob.g_block_sizes
    lo_sizes = prob.h_block_sizes
    nlev = n + 1

    for eps_num in (1e-3, 1e-5):
        eps = Fraction(eps_num).limit_denominator(10**9)
        blocks = []
        hi_index = {}
        lo_index = {}
        for k, size in enumerate(hi_sizes):
            hi_index[k] = len(blocks)
            blocks.append((f"hi{k}", size))
        for k, size in enumerate(lo_sizes):
            lo_index[k] = len(blocks)
            blocks.append((f"lo{k}", size))
        u0 = len(blocks)
        blocks.extend((f"u{t}", 1) for t in range(nlev))
        blocks.extend((f"w{t}", 1) for t in range(nlev))

        def nu_coeff(t, c):
            return {(u0 + t, 0, 0): c, (u0 + nlev + t, 0, 0): -c}

        constraints = []
        for k, size in enumerate(hi_sizes):
            sk = prob.kernels[k].values
            for i in range(size):
                for j in range(i, size):
                    coeffs = {(hi_index[k], i, j): Fraction(1)}
                    for t in range(nlev):
                        c = (tpar - t) ** (i + j) * counts[t] * sk[t]
                        if c:
                            coeffs = _merge(coeffs, nu_coeff(t, -c))
                    constraints.append((coeffs, -eps if i == j else Fraction(0)))
        for k, size in enumerate(lo_sizes):
            sk = prob.kernels[k].values
            for i in range(size):
                for j in range(i, size):
                    coeffs = {(lo_index[k], i, j): Fraction(1)}
                    for t in range(nlev):
                        c = pvals[t] * (tpar - t) ** (i + j) * counts[t] * sk[t]
                        if c:
                            coeffs = _merge(coeffs, nu_coeff(t, c))
                    constraints.append((coeffs, -eps if i == j else Fraction(0)))
        trace_row: dict = {}
        for t in range(nlev):
            c = Fraction(counts[t]) * cube_dimension(t, prob.d2)
            if c:
                trace_row = _merge(trace_row, nu_coeff(t, c))
        constraints.append((trace_row, Fraction(cube_dimension(n, prob.d2))))

        sdp = SdpProblem.build(blocks, constraints)
        sol = solve_feasibility(sdp, config.tol, config.max_iter, config.seed)
        if sol.status is not Status.FEASIBLE:
            continue
        nu_float = [float(sol.block_matrices[u0 + t][0, 0] - sol.block_matrices[u0 + nlev + t][0, 0])
                    for t in range(nlev)]
        for den in config.denominator_ladder():
            nu = [Fraction(x).limit_denominator(den) for x in nu_float]
            hi_blocks = {}
            lo_blocks = {}
            for k, size in enumerate(hi_sizes):
                sk = prob.kernels[k].values
                hi_blocks[k] = [[sum(nu[t] * (tpar - t) ** (i + j) * counts[t] * sk[t]
                                     for t in range(nlev)) for j in range(size)]
                                for i in range(size)]
            for k, size in enumerate(lo_sizes):
                sk = prob.kernels[k].values
                lo_blocks[k] = [[sum(pvals[t] * nu[t] * (tpar - t) ** (i + j) * counts[t] * sk[t]
                                     for t in range(nlev)) for j in range(size)]
                                for i in range(size)]
            margin = None
            cand = Fraction(eps_num).limit_denominator(10**6) / 2
            for _ in range(8):
                ok = all(is_psd_with_margin(hi_blocks[k], cand) for k in hi_blocks) and \
                     all(is_psd_with_margin([[-x for x in row] for row in lo_blocks[k]], cand)
                         for k in lo_blocks)
                if ok:
                    margin = cand
                    break
                cand /= 4
            if margin is None:
                continue
            m_plus = sum(counts[t] for t in range(nlev) if float(nu[t]) > config.sign_threshold)
            m_minus = sum(counts[t] for t in range(nlev) if float(nu[t]) < -config.sign_threshold)
            cert = SymmetricRefutation(prob, nu, hi_blocks, lo_blocks, margin,
                                       (m_plus, m_minus), True)
            if all(abs(float(x)) > config.sign_threshold for x in nu):
                if m_plus < cube_dimension(n, prob.d2) or m_minus < cube_dimension(n, prob.d1):
                    raise InternalConsistencyError("level sign counts violate the dimension bound")
            return cert
    return Undetermined("no reduced refutation found at the attempted margins", {})


def expand_symmetric_certificate(cert: SymmetricMultiplierCertificate) -> MultiplierCertificate:
    """Materialize full Gram matrices over the cube quotient bases (small n).

    Uses the rational reproducing kernels B Gram^{-1} B^T of the polytabloid
    blocks; exactness of the expansion is verified pointwise.
    """
    prob = cert.problem
    n = prob.n
    X = PointSet.cube(n)
    qb1 = quotient_basis(X, prob.d1)
    qb2 = quotient_basis(X, prob.d2)

    from .symmetry import cube_mul, ell_poly

    def build(blocks, d, sizes):
        monos = squarefree_monomials(n, d)
        index = {m: i for i, m in enumerate(monos)}
        dim = len(monos)
        gram = [[Fraction(0)] * dim for _ in range(dim)]
        ell = ell_poly(n, prob.level_param)
        for k, mat in blocks.items():
            size = sizes[k]
            if not any(any(row) for row in mat):
                continue
            polys = [polytabloid_poly(T) for T in standard_tableaux(n, k)]
            dimk = len(polys)
            pgram = [[Fraction(0)] * dimk for _ in range(dimk)]
            for a in range(dimk):
                for b in range(a, dimk):
                    tot = Fraction(0)
                    for S, cs in polys[a].terms.items():
                        for T2, ct in polys[b].terms.items():
                            union = sum(max(e1, e2) for e1, e2 in zip(S, T2))
                            tot += cs * ct * (1 << (n - union))
                    pgram[a][b] = pgram[b][a] = tot
            lu = FractionLU(pgram)
            inv = [lu.solve([Fraction(1) if r == a else Fraction(0) for r in range(dimk)])
                   for a in range(dimk)]  # inv[a][b] = (pgram^{-1})[b][a], symmetric anyway
            # V_i: dim x dimk coefficient matrix of ell^i * polytabloids
            v_mats = []
            shifted = polys
            for i in range(size):
                if i > 0:
                    shifted = [cube_mul(ell, q) for q in shifted]
                cols = []
                for q in shifted:
                    col = [Fraction(0)] * dim
                    for mm, c in q.terms.items():
                        col[index[mm]] = c
                    cols.append(col)
                v_mats.append(cols)
            # W_i = V_i * pgram^{-1} as dimk columns of length dim
            w_mats = []
            for cols in v_mats:
                w = [[Fraction(0)] * dim for _ in range(dimk)]
                for b in range(dimk):
                    for a in range(dimk):
                        f = inv[a][b]
                        if not f:
                            continue
                        col = cols[a]
                        wb = w[b]
                        for r in range(dim):
                            if col[r]:
                                wb[r] += f * col[r]
                w_mats.append(w)
            for i in range(size):
                for j in range(size):
                    cij = mat[i][j]
                    if not cij:
                        continue
                    for a in range(dimk):
                        wi = w_mats[i][a]
                        vj = v_mats[j][a]
                        for r in range(dim):
                            if not wi[r]:
                                continue
                            f = cij * wi[r]
                            for c2 in range(dim):
                                if vj[c2]:
                                    gram[r][c2] += f * vj[c2]
        sym = [[(gram[i][j] + gram[j][i]) / 2 for j in range(dim)] for i in range(dim)]
        return monos, sym

    monos1, H = build(cert.h_blocks, prob.d1, prob.h_block_sizes)
    monos2, G = build(cert.g_blocks, prob.d2, prob.g_block_sizes)
    if tuple(monos1) != qb1.basis_monomials or tuple(monos2) != qb2.basis_monomials:
        raise InternalConsistencyError("monomial orders disagree between modules")
    rows1 = [list(r) for r in qb1.eval_matrix]
    rows2 = [list(r) for r in qb2.eval_matrix]
    resid = []
    for v, r1, r2 in zip(X.points, rows1, rows2):
        hval = _quad_form(H, r1)
        gval = _quad_form(G, r2)
        t = int(sum(v))
        if hval != cert.h_levels[t] or gval != cert.g_levels[t]:
            raise InternalConsistencyError("expanded Gram does not match level values")
        resid.append(Fraction(0))
    ok_h, _ = ldlt_psd(H)
    ok_g, _ = ldlt_psd(G)
    if not (ok_h and ok_g):
        raise InternalConsistencyError("expanded Gram matrices must be PSD")
    h_gram = GramCertificate(qb1.basis_monomials, H, resid, True, X)
    ph_gram = GramCertificate(qb2.basis_monomials, G, resid, True, X)
    return MultiplierCertificate(h_gram, ph_gram, cert.normalization)


# ---------------------------------------------------------------------------
# structural lower-bound region

def rsos_lower_bound_region(n: int, f: Poly, t: int):
    """Excluded multiplier degrees for invariant f vanishing to odd order on a level.

    Hypotheses checked exactly: f invariant, deg f <= t <= n/2, and the
    order of proper divisibility by (t - sum x) odd.  When they hold, f has
    no (d1, d2) multiplier pair for d1 <= min((n - deg f)/2, t), d2 <= t; the
    d1 = 0 slice says f is not a degree-d square sum for d <= t.
    """
    fs = f.squarefree()
    if fs.is_zero():
        return NotApplicable("f is the zero polynomial")
    if symmetrize(f) != fs:
        return NotApplicable("f is not invariant under coordinate permutations")
    deg = fs.degree()
    if deg > t:
        return NotApplicable(f"deg f = {deg} exceeds the level parameter t = {t}")
    if 2 * t > n:
        return NotApplicable(f"t = {t} exceeds n/2")
    order = ell_order(fs, Fraction(t), deg)
    if order % 2 == 0:
        return NotApplicable(f"divisibility order {order} is even")
    d1_max = min((n - deg) // 2, t)
    return RsosRegion(d1_max=d1_max, d2_max=t, sos_max=t)


# ---------------------------------------------------------------------------
# ambient (coefficient-matching) square sums

def _ambient_monomials(n: int, d: int) -> list[Monomial]:
    out = [(0,) * n]
    frontier = {(0,) * n}
    for _ in range(d):
        nxt = set()
        for m in frontier:
            for i in range(n):
                mm = m[:i] + (m[i] + 1,) + m[i + 1:]
                nxt.add(mm)
        frontier = nxt
        out.extend(sorted(nxt))
    return sorted(set(out), key=lambda m: (sum(m), m))


def is_sos_ambient(p: Poly, k: int, config: SolverConfig = DEFAULT_CONFIG):
    """Polynomial-identity square sum certificate in the ambient ring.

    Grams over the full monomial basis of degree <= k with coefficient
    matching constraints (no point evaluation); sufficient for global
    nonnegativity.
    """
    if p.degree() > 2 * k:
        raise ValueError("degree of p exceeds 2k")
    n = p.n
    basis = _ambient_monomials(n, k)
    index = {m: i for i, m in enumerate(basis)}
    target = _ambient_monomials(n, 2 * k)
    rows: dict[Monomial, dict] = {m: {} for m in target}
    for i, mi in enumerate(basis):
        for j in range(i, len(basis)):
            mj = basis[j]
            msum = tuple(a + b for a, b in zip(mi, mj))
            rows[msum][(0, i, j)] = rows[msum].get((0, i, j), Fraction(0)) + (1 if i == j else 2)
    constraints = [(coeffs, p.terms.get(m, Fraction(0))) for m, coeffs in rows.items()]
    prob = SdpProblem.build([("G", len(basis))], constraints)
    sol = solve_feasibility(prob, config.tol, config.max_iter, config.seed)
    if sol.status is not Status.FEASIBLE:
        return Undetermined("no numeric convergence for the coefficient Gram",
                            {"residual": sol.max_constraint_residual,
                             "min_eig": sol.min_block_eigenvalue,
                             "status": sol.status.value})
    for den in config.denominator_ladder():
        cert = round_and_verify(sol, prob, den)
        if cert.verified:
            return GramCertificate(tuple(basis), cert.block_matrices[0], [], True, None)
    return GramCertificate(tuple(basis), sol.block_matrices[0], [], False, None)


def global_quartic(n: int, config: SolverConfig = DEFAULT_CONFIG
                   ) -> tuple[Poly, Fraction, Fraction]:
    """Globally nonnegative quartic that loses its multiplier pair on the cube.

    Starts from the level quadratic f, finds the largest eps = 2^-j (j <= 20)
    whose shift f + eps still admits an exact refutation at degrees
    (k-1, k) on the cube, then the smallest power-of-two lambda making
    f + eps + lambda * sum (x_i^2 - x_i)^2 an ambient square sum.  Returns
    (p, eps, lambda); p has degree 4 and vanishing shift exactly eps on the
    cube's middle levels.
    """
    if n < 2:
        raise ValueError("need n >= 2")
    k = n // 2
    s = Poly.coordinate_sum(n)
    f_amb = (s - Poly.constant(n, k)) * (s - Poly.constant(n, k + 1))
    cube = PointSet.cube(n)
    eps = None
    attempts = []
    for j in range(1, 21):
        cand = Fraction(1, 2 ** j)
        res = refute_rsos(cube, f_amb + Poly.constant(n, cand), k - 1, k, config)
        attempts.append((str(cand), isinstance(res, RefutationCertificate)))
        if isinstance(res, RefutationCertificate) and res.exact:
            eps = cand
            break
    if eps is None:
        raise SearchFailed("no shift with an exact cube refutation found",
                           {"eps_attempts": attempts})
    r = Poly.zero(n)
    for i in range(n):
        xi = Poly.variable(n, i)
        sq = xi * xi - xi
        r = r + sq * sq
    lam = None
    lam_attempts = []
    for mexp in range(-2, 21):
        cand = Fraction(2) ** mexp
        p = f_amb + Poly.constant(n, eps) + cand * r
        res = is_sos_ambient(p, 2, config)
        ok = isinstance(res, GramCertificate) and res.exact
        lam_attempts.append((str(cand), ok))
        if ok:
            lam = cand
            break
    if lam is None:
        raise SearchFailed("no ambient square-sum scaling found",
                           {"eps": str(eps), "lambda_attempts": lam_attempts})
    p = f_amb + Poly.constant(n, eps) + lam * r
    return p, eps, lam

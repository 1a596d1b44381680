"""Homology ranks, minimal l1 and minimal-support fillings, filling constants.

Fillings are exact LP optima with verified dual certificates.  Betti numbers
use a certified fast path: ranks over GF(p) lower-bound rational ranks, and
since reduced Betti numbers are nonnegative over any field, a zero mod-p
Betti vector pins the rational one to zero exactly.  Nonzero answers are
recomputed over Q.
"""

from __future__ import annotations

import itertools
from fractions import Fraction
from math import comb

from flatfill import exactlinalg as ela
from flatfill.chains import Chain, boundary, boundary_matrix, zero_chain
from flatfill.errors import CapExceeded, DegreeTooHigh, LPInfeasible, NotABoundary
from flatfill.lp import solve_lp
from flatfill.simplicial import SimplicialComplex, full_simplex

ZERO = Fraction(0)
ONE = Fraction(1)

EXACT_CELL_LIMIT = 120  # above this, ranks go through the mod-p fast path
VERTEX_ENUM_CAP = 500_000


def _rank_chain_level(complex_, q, exact):
    """Rank of the augmented boundary map leaving degree q."""
    n = complex_.n_cells(q)
    if n == 0:
        return 0
    if q == 0:
        return 1  # augmentation of a non-empty complex is onto
    _, _, mat = boundary_matrix(complex_, q)
    if exact:
        return ela.rank(mat)
    return ela.rank_modp(mat)


def reduced_betti(complex_, q_max, method="auto"):
    """Ranks of reduced rational homology in degrees 0..q_max.

    method: "auto" (certified mod-p with exact fallback), "exact", "modp".
    "modp" alone is only a certificate when the result is all zero.
    """

    def betti_vector(exact):
        ranks = [_rank_chain_level(complex_, q, exact) for q in range(q_max + 2)]
        out = []
        for q in range(q_max + 1):
            n_q = complex_.n_cells(q)
            out.append(n_q - ranks[q] - ranks[q + 1])
        return out

    small = sum(complex_.n_cells(q) for q in range(q_max + 2)) <= EXACT_CELL_LIMIT
    if method == "exact" or (method == "auto" and small):
        return betti_vector(exact=True)
    fast = betti_vector(exact=False)
    if method == "modp" or all(b == 0 for b in fast):
        return fast
    return betti_vector(exact=True)


def is_acyclic(complex_, q_max=None, method="auto"):
    top = complex_.dim if q_max is None else q_max
    return all(b == 0 for b in reduced_betti(complex_, top, method=method))


class FillingResult:
    """A filling with certified norm/support data.

    ``optimality_certificate`` is the exact dual vector of the fill LP (a dict
    over the constraint rows) for l1-minimal fills, or the exhaustion flag for
    support-minimal search.
    """

    def __init__(self, fill, certificate, rows=None, exhaustive=None, reduced_to=None):
        self.fill = fill
        self.norm = fill.norm()
        self.support = fill.support()
        self.optimality_certificate = certificate
        self.certificate_rows = rows
        self.exhaustive = exhaustive
        self.reduced_to = reduced_to

    def dual_value(self, alpha):
        if not isinstance(self.optimality_certificate, dict):
            return None
        return sum(
            (self.optimality_certificate.get(s, ZERO) * c for s, c in alpha.terms.items()),
            ZERO,
        )


def _validate_chain_in(complex_, chain):
    for s in chain.terms:
        if s not in complex_:
            raise NotABoundary(f"simplex {s} of the chain is not in the complex")


def min_l1_fill(complex_, alpha):
    """Exact minimiser of the l1 norm among fillings of alpha.

    Solves min ||b'|| over d(b') = alpha as an exact LP on split positive and
    negative parts.  Inside a full simplex the problem is first restricted to
    the sub-simplex spanned by the chain's vertices: collapsing every other
    vertex onto one of them is a norm-nonexpansive chain retraction fixing
    alpha, so the restriction preserves the optimal value.
    """
    q = alpha.degree
    _validate_chain_in(complex_, alpha)
    if alpha.is_zero:
        return FillingResult(zero_chain(q + 1), {}, rows=())
    if complex_.n_cells(q + 1) == 0:
        raise DegreeTooHigh(f"no {q + 1}-simplices available to fill a nonzero chain")

    work = complex_
    reduced_to = None
    if complex_.is_full_simplex():
        span = sorted(alpha.vertex_set())
        if len(span) < len(complex_.vertices):
            work = full_simplex(span)
            reduced_to = tuple(span)

    rows = work.cells(q)
    row_index = {s: i for i, s in enumerate(rows)}
    cols = work.cells(q + 1)
    if not cols:
        raise NotABoundary("chain spans no fillable region")
    sparse = []
    for s in cols:
        col = []
        for i in range(len(s)):
            face = s[:i] + s[i + 1 :]
            col.append((row_index[face], ONE if i % 2 == 0 else -ONE))
        sparse.append(col)
    # split variables: minimise sum(u) + sum(w) with B(u - w) = alpha
    columns = sparse + [[(i, -v) for i, v in col] for col in sparse]
    b = [ZERO] * len(rows)
    for s, c in alpha.terms.items():
        b[row_index[s]] = c
    costs = [ONE] * len(columns)
    try:
        res = solve_lp(columns, b, costs, len(columns))
    except LPInfeasible:
        raise NotABoundary("the chain is not a boundary") from None

    k = len(cols)
    coeffs = {}
    for j, s in enumerate(cols):
        v = res.x[j] - res.x[k + j]
        if v != 0:
            coeffs[s] = v
    fill = Chain(q + 1, coeffs)
    if boundary(fill) != alpha:
        raise AssertionError("fill does not bound the requested chain")
    if fill.norm() != res.value:
        raise AssertionError("optimal split solution has overlapping supports")
    dual = {rows[i]: res.dual[i] for i in range(len(rows)) if res.dual[i] != 0}
    return FillingResult(fill, dual, rows=rows, reduced_to=reduced_to)


def _dual_graph_region(complex_, q, alpha):
    """(q+1)-simplices dual-connected to the chain's support.

    Minimal fills never use a dual component whose boundary misses the chain,
    so the support search can be restricted to this region exactly.
    """
    cofaces = {}
    for s in complex_.cells(q + 1):
        for i in range(len(s)):
            cofaces.setdefault(s[:i] + s[i + 1 :], []).append(s)
    frontier = set()
    for s in alpha.terms:
        frontier.update(cofaces.get(s, ()))
    region = set(frontier)
    while frontier:
        nxt = set()
        for t in frontier:
            for i in range(len(t)):
                for u in cofaces.get(t[:i] + t[i + 1 :], ()):
                    if u not in region:
                        region.add(u)
                        nxt.add(u)
        frontier = nxt
    return sorted(region)


def min_support_fill(complex_, alpha, budget=200_000):
    """A filling with the fewest (q+1)-simplices, by cardinality search.

    Feasibility of a candidate support T is an exact rank test of [B_T | a].
    ``budget`` caps the number of candidate supports examined; when exceeded
    the best l1 fill is returned with ``exhaustive=False``.
    """
    q = alpha.degree
    _validate_chain_in(complex_, alpha)
    if alpha.is_zero:
        return FillingResult(zero_chain(q + 1), {"exhausted": True}, exhaustive=True)
    if complex_.n_cells(q + 1) == 0:
        raise DegreeTooHigh(f"no {q + 1}-simplices available to fill a nonzero chain")

    candidates = _dual_graph_region(complex_, q, alpha)
    if not candidates:
        raise NotABoundary("the chain is not a boundary")
    rows = sorted({f for t in candidates for i in range(len(t)) for f in (t[:i] + t[i + 1 :],)} | set(alpha.terms))
    row_index = {s: i for i, s in enumerate(rows)}
    col_vec = {}
    for t in candidates:
        vec = [ZERO] * len(rows)
        for i in range(len(t)):
            vec[row_index[t[:i] + t[i + 1 :]]] = ONE if i % 2 == 0 else -ONE
        col_vec[t] = vec
    target = [ZERO] * len(rows)
    for s, c in alpha.terms.items():
        target[row_index[s]] = c
    whole = [[col_vec[t][i] for t in candidates] for i in range(len(rows))]
    if ela.solve(whole, target) is None:
        raise NotABoundary("the chain is not a boundary")

    examined = 0
    for size in range(1, len(candidates) + 1):
        if comb(len(candidates), size) + examined > budget:
            fallback = min_l1_fill(complex_, alpha)
            return FillingResult(
                fallback.fill,
                {"exhausted": False},
                exhaustive=False,
                reduced_to=fallback.reduced_to,
            )
        for combo in itertools.combinations(candidates, size):
            examined += 1
            mat = [[col_vec[t][i] for t in combo] for i in range(len(rows))]
            x = ela.solve(mat, target)
            if x is None:
                continue
            coeffs = {t: x[j] for j, t in enumerate(combo) if x[j] != 0}
            fill = Chain(q + 1, coeffs)
            if boundary(fill) != alpha:
                continue
            return FillingResult(fill, {"exhausted": True}, exhaustive=True)
    raise NotABoundary("the chain is not a boundary")


class FillingConstantReport:
    def __init__(self, complex_, q, constant, witness, extreme_point_count, no_boundaries=False):
        self.complex = complex_
        self.q = q
        self.constant = constant
        self.witness = witness
        self.extreme_point_count = extreme_point_count
        self.no_boundaries = no_boundaries


def _boundary_space_basis(complex_, q):
    """Basis of im(d_{q+1}) inside C_q as a list of dense column vectors."""
    _, _, mat = boundary_matrix(complex_, q + 1)
    if not mat or not mat[0]:
        return [], complex_.cells(q)
    cols, _ = ela.column_space_basis(mat)
    return cols, complex_.cells(q)


def filling_constant(complex_, q, cap=VERTEX_ENUM_CAP):
    """sup over nonzero boundaries of minfill(a) / ||a||, attained exactly.

    The feasible region {a in im d : ||a|| <= 1} is a polytope; the minimal
    fill norm is convex and positively homogeneous on it, so the supremum is
    attained at an extreme point.  Extreme points with unit norm are exactly
    the directions of the boundary space cut out by zero sets of corank one;
    they are enumerated by rank tests over all candidate zero sets.
    """
    basis, rows = _boundary_space_basis(complex_, q)
    d = len(basis)
    if d == 0:
        return FillingConstantReport(complex_, q, ZERO, None, 0, no_boundaries=True)
    m = len(rows)
    if comb(m, d - 1) > cap:
        raise CapExceeded(f"vertex enumeration needs {comb(m, d - 1)} rank tests, cap is {cap}")

    # M has the basis vectors as columns: m x d
    M = [[basis[j][i] for j in range(d)] for i in range(m)]
    seen = {}
    for zset in itertools.combinations(range(m), d - 1):
        if d == 1:
            kernel = [[ONE]]
        else:
            kernel = ela.nullspace([M[i] for i in zset])
        if len(kernel) != 1:
            continue
        x = kernel[0]
        vec = [sum((M[i][j] * x[j] for j in range(d)), ZERO) for i in range(m)]
        norm = sum((abs(v) for v in vec), ZERO)
        if norm == 0:
            continue
        vec = [v / norm for v in vec]
        # true vertex test on the actual zero set
        zero_rows = [i for i, v in enumerate(vec) if v == 0]
        if zero_rows and ela.rank([M[i] for i in zero_rows]) != d - 1:
            continue
        if not zero_rows and d != 1:
            continue
        lead = next(v for v in vec if v != 0)
        if lead < 0:
            vec = [-v for v in vec]
        seen[tuple(vec)] = vec

    best = ZERO
    witness = None
    for key in sorted(seen):
        vec = seen[key]
        alpha = Chain(q, {rows[i]: vec[i] for i in range(m) if vec[i] != 0})
        val = min_l1_fill(complex_, alpha).norm
        if val > best:
            best = val
            witness = alpha
    return FillingConstantReport(complex_, q, best, witness, len(seen))


class UniversalConstantEntry:
    def __init__(self, q, r, value, witness, iso_classes_scanned):
        self.q = q
        self.r = r
        self.value = value
        self.witness = witness
        self.iso_classes_scanned = iso_classes_scanned


def universal_constant(q, r, cap=None, jobs=1):
    """Worst filling constant over all isomorphism classes on <= r vertices."""
    from flatfill.enumeration import ENUMERATION_CAP, isomorphism_classes

    if cap is None:
        cap = ENUMERATION_CAP
    if r > cap:
        raise CapExceeded(f"universal constant capped at r = {cap}")
    reps, _ = isomorphism_classes(r, cap=cap)
    results = _map_filling_constants(reps, q, jobs)
    value = ZERO
    witness = None
    for rep, report in zip(reps, results):
        if witness is None or report.constant > value:
            value = report.constant
            witness = rep
    return UniversalConstantEntry(q, r, value, witness, len(reps))


def _map_filling_constants(reps, q, jobs):
    if jobs and jobs > 1:
        from concurrent.futures import ProcessPoolExecutor

        with ProcessPoolExecutor(max_workers=jobs) as pool:
            return list(pool.map(_fc_worker, [(rep.facets, q) for rep in reps]))
    return [filling_constant(rep, q) for rep in reps]


def _fc_worker(payload):
    facets, q = payload
    return filling_constant(SimplicialComplex(facets), q)

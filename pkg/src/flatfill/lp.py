"""Exact-rational linear programming.

Solves  min c.x  subject to  A x = b, x >= 0  with a revised simplex method:

* all arithmetic in ``Fraction`` — no floating point anywhere;
* Bland's smallest-index rule for both entering and leaving variables, so
  termination is guaranteed even on degenerate instances;
* two phases with artificial variables; redundant rows are dropped when an
  artificial cannot be pivoted out;
* the basis inverse is kept in product form (a list of eta vectors), which
  keeps per-iteration cost proportional to basis activity instead of m*n.

The optimum comes back with an exact dual vector; ``LPResult.check`` verifies
complementary optimality (dual feasibility and equal objective values) against
the original data, so every reported optimum is certified independently of
the pivoting path.
"""

from __future__ import annotations

from fractions import Fraction

from flatfill.errors import LPInfeasible, LPUnbounded

ZERO = Fraction(0)
ONE = Fraction(1)


class LPResult:
    def __init__(self, x, value, dual, kept_rows):
        self.x = x
        self.value = value
        self.dual = dual
        self.kept_rows = kept_rows

    def check(self, columns, b, c, m):
        """Certify optimality: primal feasible, dual feasible, values equal."""
        ax = [ZERO] * m
        val = ZERO
        for j, xj in enumerate(self.x):
            if xj == 0:
                continue
            if xj < 0:
                return False
            for i, a in columns[j]:
                ax[i] += a * xj
            val += c[j] * xj
        if ax != list(b) or val != self.value:
            return False
        dual_val = sum((self.dual[i] * b[i] for i in range(m)), ZERO)
        if dual_val != self.value:
            return False
        for j, col in enumerate(columns):
            reduced = c[j] - sum((self.dual[i] * a for i, a in col), ZERO)
            if reduced < 0:
                return False
        return True


class _Basis:
    """Product-form basis inverse over exact rationals."""

    def __init__(self, m):
        self.m = m
        self.order = list(range(m))  # variable id in each basis slot
        self.etas = []  # (pivot_slot, eta_column list)

    def ftran(self, col):
        """B^{-1} * col for a sparse column given as [(row, val)]."""
        x = [ZERO] * self.m
        for i, v in col:
            x[i] = v
        for slot, eta in self.etas:
            piv = x[slot]
            if piv == 0:
                continue
            for i in range(self.m):
                if eta[i] != 0:
                    x[i] += eta[i] * piv
            x[slot] = eta[slot] * piv
        return x

    def btran(self, dense_row):
        """row * B^{-1} for a dense row vector."""
        y = list(dense_row)
        for slot, eta in reversed(self.etas):
            acc = ZERO
            for i in range(self.m):
                if eta[i] != 0 and y[i] != 0:
                    acc += eta[i] * y[i]
            y[slot] = acc
        return y

    def push(self, slot, ftran_col):
        """Record the pivot replacing basis slot with the entering column."""
        piv = ftran_col[slot]
        eta = [ZERO] * self.m
        inv = ONE / piv
        for i in range(self.m):
            if i == slot:
                eta[i] = inv
            elif ftran_col[i] != 0:
                eta[i] = -ftran_col[i] * inv
        self.etas.append((slot, eta))


def _simplex_phase(columns, costs, basis, basic, xb, allowed):
    """Run Bland-rule simplex until optimal. Mutates basic/xb. Returns duals."""
    m = basis.m
    while True:
        cb = [costs[v] for v in basic]
        y = basis.btran(cb)
        entering = None
        for j in allowed:
            red = costs[j] - sum((y[i] * a for i, a in columns[j]), ZERO)
            if red < 0:
                entering = j
                break
        if entering is None:
            return y
        d = basis.ftran(columns[entering])
        ratio = None
        leave_slot = None
        leave_var = None
        for i in range(m):
            if d[i] > 0:
                r = xb[i] / d[i]
                if ratio is None or r < ratio or (r == ratio and basic[i] < leave_var):
                    ratio, leave_slot, leave_var = r, i, basic[i]
        if leave_slot is None:
            raise LPUnbounded("objective unbounded below")
        basis.push(leave_slot, d)
        for i in range(m):
            if i != leave_slot:
                xb[i] -= ratio * d[i]
        xb[leave_slot] = ratio
        basic[leave_slot] = entering


def solve_lp(columns, b, costs, n):
    """min costs.x s.t. sum_j columns[j]*x_j = b, x >= 0.

    columns: list of n sparse columns [(row, Fraction)], rows 0..m-1.
    Returns LPResult. Raises LPInfeasible when the system has no nonnegative
    solution.
    """
    m = len(b)
    b = [x if isinstance(x, Fraction) else Fraction(x) for x in b]
    # Flip rows to make the right-hand side nonnegative for phase 1.
    signs = [ONE if bi >= 0 else -ONE for bi in b]
    cols = []
    for col in columns:
        cols.append([(i, signs[i] * v) for i, v in col])
    rhs = [signs[i] * b[i] for i in range(m)]

    # Phase 1: artificial variable per row.
    art = list(range(n, n + m))
    all_cols = cols + [[(i, ONE)] for i in range(m)]
    c1 = [ZERO] * n + [ONE] * m
    basis = _Basis(m)
    basic = art[:]
    xb = list(rhs)
    _simplex_phase(all_cols, c1, basis, basic, xb, range(n + m))
    if sum((costs_v for costs_v, bv in zip(xb, basic) if bv >= n), ZERO) != 0:
        raise LPInfeasible("no nonnegative solution")

    # Drive remaining zero-level artificials out; rows that cannot pivot are
    # linearly dependent and harmlessly keep their artificial at level zero.
    for slot in range(m):
        if basic[slot] < n:
            continue
        row = basis.btran([ONE if i == slot else ZERO for i in range(m)])
        in_basis = set(basic)
        for j in range(n):
            if j in in_basis:
                continue
            # entry of B^-1 A_j in this slot; pivot is at level zero so the
            # basic values do not move.
            if sum((row[i] * a for i, a in cols[j]), ZERO) != 0:
                basis.push(slot, basis.ftran(cols[j]))
                basic[slot] = j
                break
        # if no column pivots here the row is dependent; the artificial
        # stays basic at value 0, which is harmless for phase 2

    # Phase 2 on original costs; artificials are never allowed back in.
    c2 = list(costs) + [ZERO] * m
    y = _simplex_phase(all_cols, c2, basis, basic, xb, range(n))

    x = [ZERO] * n
    for var, val in zip(basic, xb):
        if var < n:
            x[var] = val
    value = sum((costs[j] * x[j] for j in range(n) if x[j] != 0), ZERO)
    dual = [signs[i] * y[i] for i in range(m)]
    res = LPResult(x, value, dual, list(range(m)))
    if not res.check(columns, b, costs, m):
        raise AssertionError("simplex produced an uncertified optimum")
    return res

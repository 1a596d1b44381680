"""Rank-3 lattice classes over F_q[[t]] at finite precision.

Vertices of the A2-tilde building are homothety classes of rank-3 lattices.
At precision P a lattice is a canonical 3x3 generator matrix over
F_q[t]/t^P: lower-triangular with pivots exactly t^d on the diagonal and
below-diagonal entries reduced modulo the pivot of their row.  Homothety is
normalised away by dividing out the minimal valuation.  Neighbour classes of
[L] correspond to the proper nonzero subspaces of L/tL.
"""

from __future__ import annotations

import itertools

from flatfill.errors import UnsupportedParameters


class SeriesRing:
    """F_q[t]/t^P with elements as coefficient tuples of length P."""

    def __init__(self, q, precision):
        self.q = q
        self.P = precision
        self.zero = (0,) * precision
        self.one = (1,) + (0,) * (precision - 1)

    def elem(self, coeffs):
        c = tuple(coeffs)[: self.P]
        return tuple(x % self.q for x in c) + (0,) * (self.P - len(c))

    def t_power(self, k):
        if k >= self.P:
            return self.zero
        return tuple(1 if i == k else 0 for i in range(self.P))

    def add(self, a, b):
        return tuple((x + y) % self.q for x, y in zip(a, b))

    def sub(self, a, b):
        return tuple((x - y) % self.q for x, y in zip(a, b))

    def neg(self, a):
        return tuple((-x) % self.q for x in a)

    def mul(self, a, b):
        out = [0] * self.P
        for i, x in enumerate(a):
            if x == 0:
                continue
            for j, y in enumerate(b):
                if i + j >= self.P:
                    break
                out[i + j] = (out[i + j] + x * y) % self.q
        return tuple(out)

    def val(self, a):
        for i, x in enumerate(a):
            if x:
                return i
        return self.P

    def unit_inverse(self, a):
        """Inverse of a unit (nonzero constant term) by series inversion."""
        c0 = a[0]
        inv0 = pow(c0, self.q - 2, self.q)
        out = [inv0] + [0] * (self.P - 1)
        for k in range(1, self.P):
            s = sum(a[i] * out[k - i] for i in range(1, k + 1)) % self.q
            out[k] = (-inv0 * s) % self.q
        return tuple(out)

    def divide_by_t(self, a, k):
        """Exact division by t^k (valuation must be >= k)."""
        return a[k:] + (0,) * k

    def truncate_below(self, a, k):
        """The part of a below t^k (reduction modulo t^k)."""
        return a[:k] + (0,) * (self.P - k)


class LatticeModel:
    """Canonical forms and neighbour generation for lattice classes."""

    def __init__(self, q, precision):
        if q not in (2, 3):
            raise UnsupportedParameters(f"supported residue sizes are 2 and 3, got {q}")
        self.ring = SeriesRing(q, precision)
        self.q = q

    def base_class(self):
        R = self.ring
        return tuple(tuple(R.one if i == j else R.zero for j in range(3)) for i in range(3))

    def hermite(self, columns):
        """Canonical lower-triangular Hermite generator matrix of the span.

        Column operations only; the column span (the lattice) is preserved.
        """
        R = self.ring
        cols = [list(col) for col in columns]

        for row in range(3):
            best = None
            best_val = R.P
            for j in range(row, len(cols)):
                v = R.val(cols[j][row])
                if v < best_val:
                    best, best_val = j, v
            if best is None or best_val >= R.P:
                raise UnsupportedParameters("columns do not span a full lattice at this precision")
            cols[row], cols[best] = cols[best], cols[row]
            unit = R.divide_by_t(cols[row][row], best_val)
            inv = R.unit_inverse(unit)
            cols[row] = [R.mul(x, inv) for x in cols[row]]
            for j in range(row + 1, len(cols)):
                entry = cols[j][row]
                if R.val(entry) < R.P:
                    factor = R.divide_by_t(entry, best_val)
                    cols[j] = [R.sub(x, R.mul(y, factor)) for x, y in zip(cols[j], cols[row])]
        cols = cols[:3]
        # below-diagonal reduction: entry (r, c), c < r, taken modulo t^{d_r}
        for r in range(1, 3):
            d_r = R.val(cols[r][r])
            for c in range(r):
                entry = cols[c][r]
                high = R.divide_by_t(R.sub(entry, R.truncate_below(entry, d_r)), d_r)
                if R.val(high) < R.P:
                    cols[c] = [R.sub(x, R.mul(y, high)) for x, y in zip(cols[c], cols[r])]
        return tuple(tuple(col) for col in cols)

    def normalize_class(self, columns):
        """Canonical key of the homothety class spanned by the columns."""
        R = self.ring
        mat = self.hermite(columns)
        minval = min(R.val(x) for col in mat for x in col)
        if minval:
            mat = tuple(tuple(R.divide_by_t(x, minval) for x in col) for col in mat)
            mat = self.hermite(mat)
        return mat

    def divisor_profile(self, mat):
        R = self.ring
        return tuple(sorted((R.val(mat[j][j]) for j in range(3)), reverse=True))

    def neighbours(self, mat):
        """Canonical keys of all classes adjacent to the given class."""
        R = self.ring
        cols = list(mat)
        t1 = R.t_power(1)
        t_cols = [tuple(R.mul(x, t1) for x in col) for col in cols]
        out = []
        for subspace in self._proper_subspaces():
            gens = list(t_cols)
            for vec in subspace:
                lifted = (R.zero, R.zero, R.zero)
                for coef, col in zip(vec, cols):
                    if coef:
                        scaled = tuple(R.mul(x, R.elem([coef])) for x in col)
                        lifted = tuple(R.add(a, b) for a, b in zip(lifted, scaled))
                gens.append(lifted)
            out.append(self.normalize_class(gens))
        return out

    def _proper_subspaces(self):
        """Bases of the proper nonzero subspaces of F_q^3 (lines, then planes)."""
        q = self.q
        vectors = [v for v in itertools.product(range(q), repeat=3) if any(v)]

        def normalise(v):
            lead = next(x for x in v if x)
            inv = pow(lead, q - 2, q)
            return tuple((x * inv) % q for x in v)

        lines = sorted({normalise(v) for v in vectors})
        planes = []
        for w in lines:
            basis = [v for v in vectors if sum(a * b for a, b in zip(v, w)) % q == 0]
            b0 = basis[0]
            b1 = next(v for v in basis if normalise(v) != normalise(b0))
            planes.append((b0, b1))
        return [(v,) for v in lines] + planes

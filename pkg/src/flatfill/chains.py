"""Rational chain groups with the l1 norm.

A chain of degree q is a finitely supported map from canonically oriented
q-simplices to ``Fraction``.  The positive representative of each simplex is
its ascending vertex order; a term handed in with permuted vertices picks up
the sign of the permutation.  Zero coefficients are never stored.
"""

from __future__ import annotations

from fractions import Fraction

from flatfill.errors import DegreeZero, NotSimplicial, WrongDegree

ZERO = Fraction(0)


def _sort_with_sign(vertices):
    """Sort a vertex tuple, returning (sorted_tuple, permutation_sign).

    Returns sign 0 when a vertex repeats (degenerate simplex).
    """
    vs = list(vertices)
    if len(set(vs)) != len(vs):
        return None, 0
    sign = 1
    # insertion sort; counts inversions exactly
    for i in range(1, len(vs)):
        j = i
        while j > 0 and vs[j - 1] > vs[j]:
            vs[j - 1], vs[j] = vs[j], vs[j - 1]
            sign = -sign
            j -= 1
    return tuple(vs), sign


class Chain:
    """Immutable finitely supported rational chain of a fixed degree."""

    __slots__ = ("degree", "terms")

    def __init__(self, degree, terms=None):
        self.degree = degree
        clean = {}
        if terms:
            for s, c in terms.items() if isinstance(terms, dict) else terms:
                c = c if isinstance(c, Fraction) else Fraction(c)
                if c == 0:
                    continue
                if len(s) != degree + 1:
                    raise WrongDegree(f"simplex {s} has dimension {len(s)-1}, chain degree is {degree}")
                if any(a >= b for a, b in zip(s, s[1:])):
                    raise NotSimplicial(f"simplex {s} is not strictly increasing")
                clean[tuple(s)] = c
        self.terms = clean

    @classmethod
    def from_oriented(cls, degree, oriented_terms):
        """Build a chain from (vertex_sequence, coefficient) pairs.

        Sequences may be unsorted; the permutation sign is absorbed into the
        coefficient, repeated vertices contribute nothing.
        """
        acc = {}
        for verts, coef in oriented_terms:
            s, sign = _sort_with_sign(tuple(verts))
            if sign == 0:
                continue
            acc[s] = acc.get(s, ZERO) + sign * (coef if isinstance(coef, Fraction) else Fraction(coef))
        return cls(degree, acc)

    @classmethod
    def unit(cls, s):
        s = tuple(s)
        return cls(len(s) - 1, {s: Fraction(1)})

    def coefficient(self, s):
        return self.terms.get(tuple(s), ZERO)

    def items(self):
        return sorted(self.terms.items())

    @property
    def is_zero(self):
        return not self.terms

    def __add__(self, other):
        if self.degree != other.degree:
            raise WrongDegree("cannot add chains of different degrees")
        acc = dict(self.terms)
        for s, c in other.terms.items():
            acc[s] = acc.get(s, ZERO) + c
        return Chain(self.degree, acc)

    def __neg__(self):
        return Chain(self.degree, {s: -c for s, c in self.terms.items()})

    def __sub__(self, other):
        return self + (-other)

    def __rmul__(self, scalar):
        scalar = scalar if isinstance(scalar, Fraction) else Fraction(scalar)
        return Chain(self.degree, {s: scalar * c for s, c in self.terms.items()})

    def __eq__(self, other):
        return isinstance(other, Chain) and self.degree == other.degree and self.terms == other.terms

    def __hash__(self):
        return hash((self.degree, frozenset(self.terms.items())))

    def __repr__(self):
        if self.is_zero:
            return f"Chain({self.degree}, 0)"
        body = " + ".join(f"{c}*{s}" for s, c in self.items())
        return f"Chain({self.degree}, {body})"

    def norm(self):
        return sum((abs(c) for c in self.terms.values()), ZERO)

    def support(self):
        return len(self.terms)

    def vertex_set(self):
        out = set()
        for s in self.terms:
            out.update(s)
        return out


def zero_chain(degree):
    return Chain(degree, {})


def boundary(chain):
    """Alternating-sign face sum; exact, satisfies boundary(boundary(c)) = 0."""
    if chain.degree == 0:
        raise DegreeZero("use augment for degree-0 chains")
    acc = {}
    for s, c in chain.terms.items():
        for i in range(len(s)):
            face = s[:i] + s[i + 1 :]
            coef = c if i % 2 == 0 else -c
            acc[face] = acc.get(face, ZERO) + coef
    return Chain(chain.degree - 1, acc)


def augment(chain):
    """Sum of coefficients of a degree-0 chain."""
    if chain.degree != 0:
        raise WrongDegree(f"augmentation is defined in degree 0, got {chain.degree}")
    return sum(chain.terms.values(), ZERO)


def measure(chain):
    """(l1 norm, support count)."""
    return chain.norm(), chain.support()


def join(apex, chain):
    """Cone of a chain over a vertex: simplices already containing the apex
    are annihilated, the others pick up the sign of inserting the apex."""
    acc = {}
    for s, c in chain.terms.items():
        if apex in s:
            continue
        pos = sum(1 for v in s if v < apex)
        t = s[:pos] + (apex,) + s[pos:]
        sign = 1 if pos % 2 == 0 else -1
        acc[t] = acc.get(t, ZERO) + sign * c
    return Chain(chain.degree + 1, acc)


class ChainMap:
    """Chain map induced by a vertex map; degenerate images go to zero."""

    def __init__(self, vertex_map, source, target, check=True):
        self.vertex_map = dict(vertex_map)
        self.source = source
        self.target = target
        if check:
            for f in source.facets:
                image = tuple(sorted({self.vertex_map[v] for v in f}))
                if image not in target:
                    raise NotSimplicial(f"image {image} of facet {f} is not a simplex of the target")

    def apply_basis(self, s):
        imgs = tuple(self.vertex_map[v] for v in s)
        t, sign = _sort_with_sign(imgs)
        if sign == 0:
            return zero_chain(len(s) - 1)
        return Chain(len(s) - 1, {t: Fraction(sign)})

    def __call__(self, chain):
        acc = zero_chain(chain.degree)
        for s, c in chain.terms.items():
            acc = acc + c * self.apply_basis(s)
        return acc


class FormalChainMap:
    """Chain map tabulated degree by degree on basis simplices."""

    def __init__(self, source, target, tables):
        self.source = source
        self.target = target
        self.tables = tables  # {degree: {simplex: Chain}}

    def apply_basis(self, s):
        table = self.tables.get(len(s) - 1)
        if table is None or s not in table:
            return zero_chain(len(s) - 1)
        return table[s]

    def __call__(self, chain):
        acc = zero_chain(chain.degree)
        for s, c in chain.terms.items():
            acc = acc + c * self.apply_basis(s)
        return acc


def compose(outer, inner):
    """Composite chain map (outer after inner) as a FormalChainMap factory."""

    class _Composite:
        source = inner.source
        target = outer.target

        @staticmethod
        def apply_basis(s):
            return outer(inner.apply_basis(s))

        def __call__(self, chain):
            acc = zero_chain(chain.degree)
            for s, c in chain.terms.items():
                acc = acc + c * self.apply_basis(s)
            return acc

    return _Composite()


def induced_chain_map(mapping, source, target):
    """Per-degree sparse linear map on chains induced by a vertex map.

    ``mapping`` is either a dict of vertex ids or a PosetMap whose domain
    elements are the source vertices.
    """
    if hasattr(mapping, "assignment"):
        mapping = mapping.assignment
    return ChainMap(mapping, source, target)


def commutes_with_boundary(chain_map, q):
    """Exact check of d(f(s)) == f(d(s)) on every basis q-simplex."""
    for s in chain_map.source.cells(q):
        image = chain_map.apply_basis(s)
        lhs = boundary(image) if not image.is_zero else zero_chain(q - 1)
        rhs = chain_map(boundary(Chain.unit(s)))
        if lhs != rhs:
            return False, s
    return True, None


def boundary_matrix(complex_, q, reduced=False):
    """Integer boundary matrix from q-cells to (q-1)-cells.

    With ``reduced=True`` and q == 0 this is the augmentation row.
    Returns (rows, cols, matrix) where matrix[i][j] is the coefficient of
    rows[i] in the boundary of cols[j].
    """
    cols = complex_.cells(q)
    if q == 0:
        if not reduced:
            raise DegreeZero("degree-0 boundary only exists in reduced form")
        return ((),), cols, [[1] * len(cols)]
    rows = complex_.cells(q - 1)
    index = {s: i for i, s in enumerate(rows)}
    mat = [[0] * len(cols) for _ in rows]
    for j, s in enumerate(cols):
        for i in range(len(s)):
            face = s[:i] + s[i + 1 :]
            mat[index[face]][j] = 1 if i % 2 == 0 else -1
    return rows, cols, mat

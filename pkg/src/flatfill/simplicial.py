"""Abstract simplicial complexes, covers, posets and order complexes.

A simplex is a strictly increasing tuple of integer vertex ids.  A complex is
stored by its facets (inclusion-maximal simplices); per-dimension tables are
materialised lazily, which keeps complexes with huge closures (unions of big
full simplices) cheap until someone actually asks for their cells.
"""

from __future__ import annotations

import itertools

from flatfill.errors import EmptyFacet, EmptySet, NotACover, NotSimplicial

Simplex = tuple  # strictly increasing tuple of vertex ids


def simplex(vertices):
    """Canonical simplex from an iterable of distinct vertex ids."""
    vs = tuple(sorted(vertices))
    if not vs:
        raise EmptySet("a simplex needs at least one vertex")
    if any(a == b for a, b in zip(vs, vs[1:])):
        raise NotSimplicial(f"repeated vertices in {vertices!r}")
    return vs


class SimplicialComplex:
    """Finite abstract simplicial complex, immutable after construction."""

    def __init__(self, facets, labels=None):
        maximal = []
        fsets = []
        for f in sorted({simplex(f) for f in facets}, key=lambda s: (-len(s), s)):
            fs = set(f)
            if not any(fs <= g for g in fsets):
                maximal.append(f)
                fsets.append(fs)
        if not maximal:
            raise EmptyFacet("a complex needs at least one facet")
        self.facets = tuple(sorted(maximal))
        self._facet_sets = tuple(frozenset(f) for f in self.facets)
        self.vertices = tuple(sorted(set().union(*self._facet_sets)))
        self.dim = max(len(f) for f in self.facets) - 1
        self.labels = dict(labels) if labels else {}
        self._cells = {}

    def cells(self, q):
        """Sorted tuple of all q-simplices (lazily materialised and cached)."""
        if q < 0 or q > self.dim:
            return ()
        got = self._cells.get(q)
        if got is None:
            acc = set()
            for f in self.facets:
                if len(f) >= q + 1:
                    acc.update(itertools.combinations(f, q + 1))
            got = self._cells[q] = tuple(sorted(acc))
        return got

    def n_cells(self, q):
        return len(self.cells(q))

    def all_cells(self, max_dim=None):
        top = self.dim if max_dim is None else min(max_dim, self.dim)
        for q in range(top + 1):
            yield from self.cells(q)

    def __contains__(self, s):
        try:
            fs = frozenset(simplex(s))
        except (EmptySet, NotSimplicial):
            return False
        return any(fs <= g for g in self._facet_sets)

    def __eq__(self, other):
        return isinstance(other, SimplicialComplex) and self.facets == other.facets

    def __hash__(self):
        return hash(self.facets)

    def __repr__(self):
        return f"SimplicialComplex({len(self.vertices)} vertices, dim {self.dim}, {len(self.facets)} facets)"

    def is_full_simplex(self):
        return len(self.facets) == 1

    def full_subcomplex(self, vertex_subset):
        """Induced subcomplex on a vertex subset."""
        w = set(vertex_subset)
        sub = [tuple(v for v in f if v in w) for f in self.facets]
        sub = [f for f in sub if f]
        if not sub:
            raise EmptySet("no vertices of the complex in the subset")
        return SimplicialComplex(sub)

    def subcomplex(self, cells):
        """Downward closure of the given simplices (must all lie in self)."""
        cs = [simplex(c) for c in cells]
        for c in cs:
            if c not in self:
                raise NotSimplicial(f"{c} is not a simplex of the complex")
        return SimplicialComplex(cs)

    def cone_apex(self):
        """A vertex joined to every simplex, or None if there is none."""
        common = set(self._facet_sets[0])
        for fs in self._facet_sets[1:]:
            common &= fs
            if not common:
                return None
        return min(common) if common else None


def from_facets(facets, labels=None):
    """Complex generated by the facet list (closure is implicit)."""
    facets = list(facets)
    for f in facets:
        if not tuple(f):
            raise EmptyFacet("empty facet")
    return SimplicialComplex(facets, labels=labels)


def full_simplex(vertex_set):
    """The full simplex on a non-empty finite vertex set."""
    vs = tuple(sorted(set(vertex_set)))
    if not vs:
        raise EmptySet("full simplex needs a non-empty vertex set")
    return SimplicialComplex([vs])


def intersection(a, b):
    """Intersection of two complexes, or None when they share no simplex."""
    common = {tuple(sorted(set(f) & set(g))) for f in a.facets for g in b.facets}
    common.discard(())
    if not common:
        return None
    return SimplicialComplex(common)


def union(a, b):
    return SimplicialComplex(list(a.facets) + list(b.facets))


class Cover:
    """Indexed family of non-empty vertex subsets covering a base set."""

    def __init__(self, members, base=None):
        self.members = tuple(frozenset(m) for m in members)
        for i, m in enumerate(self.members):
            if not m:
                raise NotACover(f"cover member {i} is empty")
        covered = frozenset().union(*self.members)
        self.base = frozenset(base) if base is not None else covered
        if covered != self.base:
            raise NotACover("union of members differs from the covered set")

    def __len__(self):
        return len(self.members)

    def __iter__(self):
        return iter(self.members)


def nerve_of_cover(cover, max_dim=None):
    """Nerve of a cover: {i0..iq} is a simplex iff the members intersect.

    ``max_dim`` truncates materialisation; the result records the truncation
    in ``nerve.truncated_at``.
    """
    members = cover.members if isinstance(cover, Cover) else tuple(frozenset(m) for m in cover)
    n = len(members)
    cap = n - 1 if max_dim is None else min(max_dim, n - 1)
    # grow simplices dimension by dimension, carrying running intersections
    layer = {(i,): members[i] for i in range(n)}
    cells = [list(layer)]
    for _ in range(cap):
        nxt = {}
        for s, inter in layer.items():
            for j in range(s[-1] + 1, n):
                got = inter & members[j]
                if got:
                    nxt[s + (j,)] = got
        if not nxt:
            break
        layer = nxt
        cells.append(sorted(layer))
    out = SimplicialComplex([c for level in cells for c in level])
    out.truncated_at = max_dim
    return out


class Poset:
    """Finite poset given by an explicit strict-order relation table."""

    def __init__(self, elements, strict_pairs):
        self.elements = tuple(elements)
        self.index = {e: i for i, e in enumerate(self.elements)}
        if len(self.index) != len(self.elements):
            raise NotSimplicial("poset elements must be distinct")
        self._less = set()
        for a, b in strict_pairs:
            if a == b:
                raise NotSimplicial("strict order cannot be reflexive")
            self._less.add((self.index[a], self.index[b]))
        greater = [set() for _ in self.elements]
        for i, j in self._less:
            if (j, i) in self._less:
                raise NotSimplicial("relation is not antisymmetric")
            greater[i].add(j)
        for i in range(len(self.elements)):
            for j in greater[i]:
                if not greater[j] <= greater[i]:
                    raise NotSimplicial("relation table is not transitively closed")
        self._greater = greater

    def less(self, a, b):
        return (self.index[a], self.index[b]) in self._less

    def comparable(self, a, b):
        return a == b or self.less(a, b) or self.less(b, a)

    def __len__(self):
        return len(self.elements)


def face_poset(complex_, max_dim=None):
    """Poset of simplices of a complex under strict inclusion."""
    cells = list(complex_.all_cells(max_dim))
    pairs = []
    for a in cells:
        sa = set(a)
        for b in cells:
            if len(b) > len(a) and sa < set(b):
                pairs.append((a, b))
    return Poset(cells, pairs)


class PosetMap:
    """Order preserving (isotone) or reversing (antitone) poset map."""

    def __init__(self, domain, codomain, assignment, direction="isotone"):
        if direction not in ("isotone", "antitone"):
            raise NotSimplicial(f"unknown direction {direction!r}")
        self.domain = domain
        self.codomain = codomain
        self.assignment = dict(assignment)
        self.direction = direction
        for e in domain.elements:
            if e not in self.assignment:
                raise NotSimplicial(f"poset map undefined on {e!r}")
        for a in domain.elements:
            for b in domain.elements:
                if domain.less(a, b):
                    fa, fb = self.assignment[a], self.assignment[b]
                    if fa == fb:
                        continue
                    ok = codomain.less(fa, fb) if direction == "isotone" else codomain.less(fb, fa)
                    if not ok:
                        raise NotSimplicial(f"map does not respect order on ({a!r}, {b!r})")

    def __call__(self, e):
        return self.assignment[e]


class OrderComplex:
    """Order complex of a poset; vertex i of the complex is ``elements[i]``.

    Simplices are chains.  ``max_dim`` caps the materialised chain length,
    which is what makes subdivisions of large complexes affordable.
    """

    def __init__(self, poset, max_dim=None):
        self.poset = poset
        self.elements = poset.elements
        n = len(self.elements)
        cap = (n - 1) if max_dim is None else min(max_dim, n - 1)
        above = [sorted(g) for g in poset._greater]
        chains = [[(i,) for i in range(n)]]
        for _ in range(cap):
            nxt = []
            for ch in chains[-1]:
                nxt.extend(ch + (j,) for j in above[ch[-1]])
            if not nxt:
                break
            chains.append(nxt)
        # chains listed by increasing index are automatically sorted tuples
        # only when the poset order refines the index order; re-sort defensively
        all_cells = [tuple(sorted(ch)) for level in chains for ch in level]
        self.complex = SimplicialComplex(all_cells)
        self.complex.truncated_at = max_dim
        self.max_dim = max_dim

    def vertex_of(self, element):
        return self.poset.index[element]


def order_complex(poset, max_dim=None):
    """Complex of non-empty chains of a finite poset."""
    return OrderComplex(poset, max_dim=max_dim)


def barycentric_subdivision(complex_, max_dim=None):
    """Order complex of the face poset."""
    return OrderComplex(face_poset(complex_), max_dim=max_dim)

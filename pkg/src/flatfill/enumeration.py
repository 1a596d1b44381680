"""Isomorph-free generation of small complexes and canonical labeling.

Canonical forms come from iterated degree refinement: vertices get invariants
(cell counts per dimension, then multisets of neighbour invariants) which cut
the permutation search down to invariant-respecting bijections; the canonical
form is the minimal relabelled facet encoding over that search.  Good enough
for the vertex counts this library enumerates (the universal-constant cap).
"""

from __future__ import annotations

import itertools

from flatfill.errors import CapExceeded
from flatfill.simplicial import SimplicialComplex

ENUMERATION_CAP = 5


def _vertex_invariants(complex_):
    """Stable vertex invariants refined by neighbour multisets."""
    verts = complex_.vertices
    inv = {}
    for v in verts:
        counts = []
        for q in range(complex_.dim + 1):
            counts.append(sum(1 for c in complex_.cells(q) if v in c))
        inv[v] = tuple(counts)
    edges = {frozenset(e) for e in complex_.cells(1)} if complex_.dim >= 1 else set()
    nbrs = {v: [] for v in verts}
    for e in edges:
        a, b = sorted(e)
        nbrs[a].append(b)
        nbrs[b].append(a)
    for _ in range(len(verts)):
        refined = {v: (inv[v], tuple(sorted(inv[u] for u in nbrs[v]))) for v in verts}
        if len(set(refined.values())) == len(set(inv.values())):
            inv = refined
            break
        inv = refined
    return inv


def _encode(facets):
    return tuple(sorted(tuple(sorted(f)) for f in facets))


def canonical_form(complex_):
    """Canonical facet encoding, equal for isomorphic complexes."""
    verts = complex_.vertices
    inv = _vertex_invariants(complex_)
    groups = {}
    for v in verts:
        groups.setdefault(inv[v], []).append(v)
    # vertices in the same invariant class are interchangeable candidates;
    # classes are ordered canonically by their invariant value
    ordered_classes = [groups[k] for k in sorted(groups)]
    slots = []
    for cls in ordered_classes:
        slots.append(list(cls))
    best = [None]

    def backtrack(class_idx, start, mapping):
        if class_idx == len(slots):
            relabeled = _encode(tuple(mapping[v] for v in f) for f in complex_.facets)
            if best[0] is None or relabeled < best[0]:
                best[0] = relabeled
            return
        cls = slots[class_idx]
        for perm in itertools.permutations(cls):
            new_map = dict(mapping)
            for offset, v in enumerate(perm):
                new_map[v] = start + offset
            backtrack(class_idx + 1, start + len(cls), new_map)

    backtrack(0, 0, {})
    return best[0]


def find_isomorphism(a, b):
    """A vertex bijection carrying complex a onto complex b, or None."""
    if len(a.vertices) != len(b.vertices) or a.dim != b.dim:
        return None
    if any(a.n_cells(q) != b.n_cells(q) for q in range(a.dim + 1)):
        return None
    inv_a = _vertex_invariants(a)
    inv_b = _vertex_invariants(b)
    if sorted(inv_a.values()) != sorted(inv_b.values()):
        return None
    cells_b = {q: set(b.cells(q)) for q in range(b.dim + 1)}
    candidates = {v: [w for w in b.vertices if inv_b[w] == inv_a[v]] for v in a.vertices}
    order = sorted(a.vertices, key=lambda v: len(candidates[v]))

    def extend(i, mapping, used):
        if i == len(order):
            for q in range(a.dim + 1):
                mapped = {tuple(sorted(mapping[x] for x in c)) for c in a.cells(q)}
                if mapped != cells_b[q]:
                    return None
            return dict(mapping)
        v = order[i]
        for w in candidates[v]:
            if w in used:
                continue
            mapping[v] = w
            ok = True
            # partial consistency on edges
            if a.dim >= 1:
                for u in order[:i]:
                    e = tuple(sorted((u, v)))
                    if (e in a) != (tuple(sorted((mapping[u], w))) in b):
                        ok = False
                        break
            if ok:
                got = extend(i + 1, mapping, used | {w})
                if got:
                    return got
            del mapping[v]
        return None

    return extend(0, {}, set())


def _labeled_complexes_on(v):
    """All labeled complexes whose vertex set is exactly range(v).

    A complex is identified with its facet antichain; generated by DFS over
    subsets in a fixed order with pairwise-incomparability pruning.
    """
    subsets = []
    for size in range(1, v + 1):
        subsets.extend(itertools.combinations(range(v), size))
    subsets.sort()
    n = len(subsets)
    out = []

    def dfs(start, chosen, covered):
        if chosen and len(covered) == v:
            out.append(tuple(chosen))
        for i in range(start, n):
            s = subsets[i]
            ss = set(s)
            if any(ss <= set(t) or set(t) <= ss for t in chosen):
                continue
            chosen.append(s)
            dfs(i + 1, chosen, covered | ss)
            chosen.pop()

    dfs(0, [], set())
    return out


def isomorphism_classes(max_vertices, cap=ENUMERATION_CAP):
    """Representatives of all isomorphism classes of complexes on <= r vertices.

    Returns (representatives, scanned_labeled_count).
    """
    if max_vertices > cap:
        raise CapExceeded(f"enumeration capped at {cap} vertices, asked for {max_vertices}")
    seen = {}
    scanned = 0
    for v in range(1, max_vertices + 1):
        for facets in _labeled_complexes_on(v):
            scanned += 1
            cx = SimplicialComplex(facets)
            key = canonical_form(cx)
            if key not in seen:
                seen[key] = cx
    reps = [seen[k] for k in sorted(seen)]
    return reps, scanned

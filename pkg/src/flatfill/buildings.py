"""Finite balls of discrete Euclidean buildings: trees and the A2-tilde case.

Tree balls are (q+1)-regular; chambers are edges and apartment fragments are
the diametral leaf-to-leaf geodesics through the root.  The A2-tilde ball is
generated from lattice classes; chambers are triangles and apartment
fragments are anchored embeddings of the hexagonal Coxeter-disc template.
Combinatorial convexity, starlikeness and sector completion operate on the
chamber adjacency graph.
"""

from __future__ import annotations

import itertools
from collections import deque

from flatfill.a2 import LatticeModel
from flatfill.errors import NotATree, UnsupportedParameters
from flatfill.simplicial import SimplicialComplex

SPHERICAL_CHAMBERS = {"A1~": 2, "A2~": 6}  # chambers of the spherical Coxeter complex


class ApartmentFragment:
    """A flat disc of the building: full subcomplex on its vertex set."""

    def __init__(self, vertices, ends=None, path=None):
        self.vertices = tuple(sorted(vertices))
        self.ends = tuple(ends) if ends else ()
        self.path = tuple(path) if path else None

    def __eq__(self, other):
        return isinstance(other, ApartmentFragment) and self.vertices == other.vertices

    def __hash__(self):
        return hash(self.vertices)

    def __repr__(self):
        return f"ApartmentFragment({len(self.vertices)} vertices)"


class Building:
    """Finite ball of a discrete Euclidean building with its apartment system."""

    def __init__(self, complex_, type_, q, radius, base_chamber, base_vertex, apartments, depth):
        self.complex = complex_
        self.type = type_
        self.q = q
        self.radius = radius
        self.base_chamber = tuple(base_chamber)
        self.base_vertex = base_vertex
        self.apartments = list(apartments)
        self.depth = dict(depth)
        self.k = SPHERICAL_CHAMBERS[type_]

    @property
    def chambers(self):
        return self.complex.cells(self.complex.dim)

    def chamber_graph(self):
        """Chambers adjacent when they share a codimension-one face."""
        chambers = self.chambers
        idx = {c: i for i, c in enumerate(chambers)}
        by_face = {}
        for c in chambers:
            for i in range(len(c)):
                by_face.setdefault(c[:i] + c[i + 1 :], []).append(idx[c])
        adj = [set() for _ in chambers]
        for group in by_face.values():
            for a, b in itertools.combinations(group, 2):
                adj[a].add(b)
                adj[b].add(a)
        return chambers, adj

    def induced_fragment_complex(self, fragment):
        return self.complex.full_subcomplex(fragment.vertices)


def _tree_adjacency(q, radius):
    """BFS-ordered (q+1)-regular tree ball; returns (parent, children, depth)."""
    parent = {0: None}
    depth = {0: 0}
    children = {0: []}
    next_id = 1
    frontier = [0]
    for level in range(radius):
        new_frontier = []
        for v in frontier:
            fanout = q + 1 if v == 0 else q
            for _ in range(fanout):
                parent[next_id] = v
                depth[next_id] = level + 1
                children[v].append(next_id)
                children[next_id] = []
                new_frontier.append(next_id)
                next_id += 1
        frontier = new_frontier
    return parent, children, depth


def bruhat_tits_tree_ball(q, radius):
    """Radius-R ball of the (q+1)-regular tree; chambers are the edges."""
    if q < 1 or radius < 1:
        raise UnsupportedParameters("tree ball needs q >= 1 and R >= 1")
    parent, children, depth = _tree_adjacency(q, radius)
    edges = [(p, v) if p < v else (v, p) for v, p in parent.items() if p is not None]
    complex_ = SimplicialComplex(edges)
    building = Building(
        complex_,
        "A1~",
        q,
        radius,
        base_chamber=(0, 1),
        base_vertex=0,
        apartments=[],
        depth=depth,
    )
    building.parent = parent
    building.children = children
    building.apartments = enumerate_apartments(building)
    return building


def _tree_path(building, a, b):
    """Unique path between two vertices of a tree ball."""
    parent, depth = building.parent, building.depth
    up_a, up_b = [a], [b]
    x, y = a, b
    while depth[x] > depth[y]:
        x = parent[x]
        up_a.append(x)
    while depth[y] > depth[x]:
        y = parent[y]
        up_b.append(y)
    while x != y:
        x, y = parent[x], parent[y]
        up_a.append(x)
        up_b.append(y)
    return up_a + up_b[-2::-1]


def _tree_leaves(building):
    return [v for v, ch in building.children.items() if not ch]


def _root_branch(building, v):
    """The depth-1 ancestor of a non-root vertex."""
    while building.depth[v] > 1:
        v = building.parent[v]
    return v


def enumerate_apartments(building):
    """Apartment fragments of the ball.

    Trees: the diametral leaf-to-leaf geodesics through distinct root
    branches (the radius-R Coxeter discs centred at the root).  A2~: anchored
    embeddings of the hexagonal disc template, via ``a2_apartments``.
    """
    if building.type == "A1~":
        out = []
        for u, w in itertools.combinations(_tree_leaves(building), 2):
            if _root_branch(building, u) != _root_branch(building, w):
                path = _tree_path(building, u, w)
                out.append(ApartmentFragment(path, ends=(u, w), path=path))
        return out
    return a2_apartments(building)


def maximal_geodesics(building):
    """All maximal geodesic paths of a tree ball (any leaf pair).

    This is the cover behind the aligned complex: every geodesic extends to
    a maximal one, so a vertex tuple lies in a common member exactly when it
    is collinear.
    """
    if building.type != "A1~":
        raise NotATree("maximal geodesics are a tree-ball construction")
    out = []
    for u, w in itertools.combinations(_tree_leaves(building), 2):
        path = _tree_path(building, u, w)
        out.append(ApartmentFragment(path, ends=(u, w), path=path))
    return out


def tree_distance(building, a, b):
    return len(_tree_path(building, a, b)) - 1


def check_combinatorial_convexity(building, chamber_set, base=None):
    """Every minimal gallery between chambers of the set stays in the set.

    With ``base`` given, only galleries from that chamber are examined (the
    starlike variant).  Returns (ok, witness_gallery_or_None).
    """
    chambers, adj = building.chamber_graph()
    idx = {c: i for i, c in enumerate(chambers)}
    inside = {idx[tuple(c)] for c in chamber_set}

    def bfs(start):
        dist = {start: 0}
        dq = deque([start])
        while dq:
            x = dq.popleft()
            for y in adj[x]:
                if y not in dist:
                    dist[y] = dist[x] + 1
                    dq.append(y)
        return dist

    dists = {}

    def dist_from(s):
        if s not in dists:
            dists[s] = bfs(s)
        return dists[s]

    sources = [idx[tuple(base)]] if base is not None else sorted(inside)
    for s in sources:
        ds = dist_from(s)
        for t in sorted(inside):
            if t == s or t not in ds:
                continue
            dt = dist_from(t)
            for w in range(len(chambers)):
                if w in inside or w not in ds or w not in dt:
                    continue
                if ds[w] + dt[w] == ds[t]:
                    gallery = _reconstruct_gallery(adj, ds, dt, s, t, w)
                    return False, [chambers[i] for i in gallery]
    return True, None


def _reconstruct_gallery(adj, ds, dt, s, t, w):
    """A minimal gallery from s to t through the escaping chamber w."""

    def walk(dist_map, frm):
        path = [frm]
        cur = frm
        while dist_map[cur] > 0:
            cur = min(y for y in adj[cur] if y in dist_map and dist_map[y] == dist_map[cur] - 1)
            path.append(cur)
        return path

    left = walk(ds, w)[::-1]
    right = walk(dt, w)
    return left + right[1:]


def sector_completion(building, fragments):
    """Complete tree apartment fragments to a starlike acyclic union.

    For each fragment and each of its two ends, the completion is the unique
    diametral geodesic through the base chamber heading to that end's leaf
    (backward extension chosen by smallest vertex id).  Returns
    (completions, union_complex, certificate).
    """
    if building.type != "A1~":
        raise NotATree("sector completion at finite scale is implemented for trees")
    c0, c1 = building.base_chamber
    completions = []
    seen = set()
    for frag in fragments:
        for leaf in frag.ends:
            e = _completion_through_base(building, leaf)
            if e.vertices not in seen:
                seen.add(e.vertices)
                completions.append(e)
    all_edges = []
    for frag in list(fragments) + completions:
        path = frag.path
        all_edges.extend(tuple(sorted((path[i], path[i + 1]))) for i in range(len(path) - 1))
    union_complex = SimplicialComplex(sorted(set(all_edges)))
    starlike, witness = check_combinatorial_convexity(
        building,
        [e for e in union_complex.cells(1)],
        base=building.base_chamber,
    )
    from flatfill.filling import reduced_betti

    betti = reduced_betti(union_complex, 1)
    certificate = {
        "starlike": starlike,
        "witness": witness,
        "acyclic": all(b == 0 for b in betti),
        "reduced_betti": betti,
    }
    return completions, union_complex, certificate


def _completion_through_base(building, leaf):
    """The diametral geodesic through the base chamber ending at the leaf.

    The geodesic from the leaf through the base edge is unique; the backward
    extension to the opposite leaf descends by smallest vertex id.
    """
    root, first = building.base_chamber
    if building.depth[leaf] != building.radius:
        raise NotATree("fragment end is not a leaf of the ball")
    spine = _tree_path(building, leaf, root)
    if _root_branch(building, leaf) == first:
        cur = min(ch for ch in building.children[root] if ch != first)
    else:
        cur = first
    spine.append(cur)
    while building.children[cur]:
        cur = min(building.children[cur])
        spine.append(cur)
    return ApartmentFragment(spine, ends=(spine[0], spine[-1]), path=spine)


def _a2_disc_template(radius):
    """Hexagonal disc of the triangular lattice: (vertices, edges, order)."""
    def hexdist(v):
        a, b = v
        return max(abs(a), abs(b), abs(a + b))

    verts = [v for v in itertools.product(range(-radius, radius + 1), repeat=2) if hexdist(v) <= radius]
    verts.sort(key=lambda v: (hexdist(v), v))
    steps = [(1, 0), (-1, 0), (0, 1), (0, -1), (1, -1), (-1, 1)]
    vset = set(verts)
    edges = set()
    for v in verts:
        for dx, dy in steps:
            w = (v[0] + dx, v[1] + dy)
            if w in vset:
                edges.add(frozenset((v, w)))
    return verts, edges, vset


def a2_apartments(building, budget=2_000_000):
    """Anchored embeddings of the radius-R disc template as full subcomplexes.

    Backtracking over template vertices in distance order from the centre;
    template adjacency and non-adjacency must both be preserved (induced
    embedding).  A blown budget returns the partial list with a flag.
    """
    radius = building.radius
    verts, template_edges, _ = _a2_disc_template(radius)
    n = len(verts)
    tidx = {v: i for i, v in enumerate(verts)}
    t_adj = [[False] * n for _ in range(n)]
    for e in template_edges:
        a, b = tuple(e)
        t_adj[tidx[a]][tidx[b]] = t_adj[tidx[b]][tidx[a]] = True

    graph = {v: set() for v in building.complex.vertices}
    for a, b in building.complex.cells(1):
        graph[a].add(b)
        graph[b].add(a)

    out = []
    nodes = 0
    exceeded = False
    assignment = [None] * n
    used = set()

    def backtrack(i):
        nonlocal nodes, exceeded
        if exceeded:
            return
        if i == n:
            out.append(ApartmentFragment(sorted(assignment)))
            return
        if i == 0:
            candidates = [building.base_vertex]
        else:
            anchored = next(j for j in range(i) if t_adj[i][j])
            candidates = sorted(graph[assignment[anchored]])
        for cand in candidates:
            nodes += 1
            if nodes > budget:
                exceeded = True
                return
            if cand in used:
                continue
            ok = True
            for j in range(i):
                adjacent = assignment[j] in graph[cand]
                if adjacent != t_adj[i][j]:
                    ok = False
                    break
            if ok:
                assignment[i] = cand
                used.add(cand)
                backtrack(i + 1)
                used.discard(cand)
                assignment[i] = None

    backtrack(0)
    fragments = []
    seen = set()
    for frag in out:
        if frag.vertices in seen:
            continue
        seen.add(frag.vertices)
        sub = building.complex.full_subcomplex(frag.vertices)
        expected_triangles = 6 * radius * radius
        if sub.n_cells(2) == expected_triangles and sub.n_cells(1) == len(template_edges):
            fragments.append(frag)
    building.apartment_search_exceeded = exceeded
    return fragments


def a2_ball(q, radius, chamber_budget=None):
    """Ball of the A2-tilde building of F_q((t)) around the standard lattice class.

    Vertices are homothety classes of rank-3 lattices at precision R+2 in
    canonical Hermite form; chambers are the pairwise-adjacent triples
    (complete lattice-class flags).
    """
    if q not in (2, 3) or radius < 1 or radius > 2:
        raise UnsupportedParameters("a2 ball supports q in {2, 3} and R <= 2")
    model = LatticeModel(q, radius + 2)
    base = model.base_class()
    ids = {base: 0}
    order = [base]
    depth = {0: 0}
    frontier = [base]
    for level in range(radius):
        nxt = []
        for mat in frontier:
            for nb in model.neighbours(mat):
                if nb not in ids:
                    ids[nb] = len(order)
                    order.append(nb)
                    depth[ids[nb]] = level + 1
                    nxt.append(nb)
        frontier = nxt
    # adjacency inside the ball
    edges = set()
    for mat in order:
        i = ids[mat]
        for nb in model.neighbours(mat):
            j = ids.get(nb)
            if j is not None and i != j:
                edges.add((min(i, j), max(i, j)))
    adj = {i: set() for i in range(len(order))}
    for a, b in edges:
        adj[a].add(b)
        adj[b].add(a)
    triangles = set()
    for a, b in edges:
        for c in adj[a] & adj[b]:
            tri = tuple(sorted((a, b, c)))
            triangles.add(tri)
    facets = sorted(triangles) + [e for e in sorted(edges) if not any(set(e) <= set(t) for t in triangles)]
    complex_ = SimplicialComplex(facets)
    base_chamber = min(t for t in triangles if 0 in t)
    building = Building(
        complex_,
        "A2~",
        q,
        radius,
        base_chamber=base_chamber,
        base_vertex=0,
        apartments=[],
        depth=depth,
    )
    building.lattice_keys = order
    building.apartments = a2_apartments(building) if radius == 1 else []
    return building


def apartment_nerve(building, max_dim=None):
    """Nerve of the apartment cover; vertex i is the i-th apartment fragment."""
    from flatfill.simplicial import Cover, nerve_of_cover

    members = [frozenset(a.vertices) for a in building.apartments]
    return nerve_of_cover(Cover(members), max_dim=max_dim)


def sector_completion_oracle(building, nerve):
    """Hull oracle on the apartment nerve backed by sector completion.

    A query names finitely many apartments; the hull is the sub-nerve on
    those apartments together with the diametral completions through the
    base chamber, at most (k + 1) n = 3 n vertices for trees.
    """
    from flatfill.homotopy import HullOracle

    if building.type != "A1~":
        raise NotATree("the sector-completion oracle is a tree construction")
    index_of = {frozenset(a.vertices): i for i, a in enumerate(building.apartments)}

    def hull(indices):
        chosen = sorted(indices)
        ids = set(chosen)
        for i in chosen:
            frag = building.apartments[i]
            for leaf in frag.ends:
                e = _completion_through_base(building, leaf)
                j = index_of.get(frozenset(e.vertices))
                if j is None:
                    raise NotATree("completion is not an enumerated apartment")
                ids.add(j)
        return nerve.full_subcomplex(sorted(ids))

    k = building.k
    return HullOracle(hull, lambda n: (k + 1) * n, name="sector-completion")


def vertex_count_formula(q, radius):
    """Exact vertex count of the (q+1)-regular tree ball."""
    if q == 1:
        return 2 * radius + 1
    return 1 + (q + 1) * (q**radius - 1) // (q - 1)


def interior_edges(building):
    """Edges all of whose chambers lie inside the ball.

    An edge with an endpoint at depth < R has its whole residue in the ball.
    """
    out = []
    for e in building.complex.cells(1):
        if min(building.depth[v] for v in e) <= building.radius - 1:
            out.append(e)
    return out


def edge_residue_count(building, edge):
    """Number of chambers containing the edge."""
    chambers = building.chambers
    es = set(edge)
    return sum(1 for c in chambers if es <= set(c))

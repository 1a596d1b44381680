"""Flatmate complexes and uniform nerve equivalences.

The flatmate complex of a cover is the union of full simplices on its
members.  For such covers (every member spans a full simplex, hence every
intersection does too) the complex and the nerve of the cover are homotopy
equivalent through an antitone pair of poset maps f and g; both composites
are tied to the identity by chain homotopies built over explicit acyclic
carriers on the barycentric subdivisions.  Everything is verified exactly:
poset inequalities, carrier containments, homotopy identities, and that the
induced maps are mutually inverse on rational homology.
"""

from __future__ import annotations

from fractions import Fraction

from flatfill import exactlinalg as ela
from flatfill.chains import Chain, ChainMap, boundary, join, zero_chain
from flatfill.errors import (
    ChoiceNotGlobal,
    EmptyMember,
    HypothesisViolated,
    NotACover,
)
from flatfill.homotopy import Carrier, carrier_homotopy
from flatfill.simplicial import (
    Cover,
    OrderComplex,
    SimplicialComplex,
    face_poset,
    nerve_of_cover,
)

ZERO = Fraction(0)
ONE = Fraction(1)


class FlatmateComplex:
    """Union of full simplices over the members of a cover."""

    def __init__(self, base, cover, complex_, max_dim=None):
        self.base = tuple(sorted(base))
        self.cover = cover
        self.complex = complex_
        self.max_dim = max_dim

    def witness(self, s):
        """Index of one cover member containing the simplex."""
        ss = set(s)
        for i, member in enumerate(self.cover.members):
            if ss <= member:
                return i
        return None

    def __contains__(self, s):
        return self.witness(s) is not None


def flatmate_complex(base, cover, max_dim=None):
    """All simplices whose vertex set lies inside one cover member."""
    if not isinstance(cover, Cover):
        cover = Cover(cover, base=base)
    elif set(cover.base) != set(base):
        raise NotACover("cover does not cover the base set")
    cx = SimplicialComplex([tuple(sorted(m)) for m in cover.members])
    return FlatmateComplex(base, cover, cx, max_dim=max_dim)


def subdivision_chain_map(complex_, oc):
    """The classical subdivision operator into the order complex.

    On a vertex it picks the corresponding subdivision vertex; on a higher
    simplex it is the cone, from the simplex's own subdivision vertex, over
    the subdivision of its boundary.  An exact chain map.
    """
    memo = {}

    def sd_basis(s):
        got = memo.get(s)
        if got is not None:
            return got
        v = oc.vertex_of(s)
        if len(s) == 1:
            out = Chain.unit((v,))
        else:
            acc = zero_chain(len(s) - 2)
            for i in range(len(s)):
                face = s[:i] + s[i + 1 :]
                term = sd_basis(face)
                acc = acc + term if i % 2 == 0 else acc - term
            out = join(v, acc)
        memo[s] = out
        return out

    class _Subdivision:
        source = complex_
        target = oc.complex

        @staticmethod
        def apply_basis(s):
            return sd_basis(s)

        def __call__(self, chain):
            out = zero_chain(chain.degree)
            for s, c in chain.terms.items():
                out = out + c * sd_basis(s)
            return out

    return _Subdivision()


def collapse_chain_map(oc, complex_):
    """Simplicial retraction of the subdivision: each cell goes to its least vertex."""
    mapping = {oc.vertex_of(e): min(e) for e in oc.elements}
    return ChainMap(mapping, oc.complex, complex_, check=False)


def chain_map_matrix(cmap, q, source, target):
    rows = target.cells(q)
    idx = {s: i for i, s in enumerate(rows)}
    cols = source.cells(q)
    mat = [[ZERO] * len(cols) for _ in rows]
    for j, s in enumerate(cols):
        img = cmap.apply_basis(s)
        for t, c in img.terms.items():
            mat[idx[t]][j] = c
    return mat


class HomologySpace:
    """Unreduced rational homology of one degree with a class-coordinate solver."""

    def __init__(self, complex_, q):
        self.complex = complex_
        self.q = q
        cells = complex_.cells(q)
        n = len(cells)
        self.cells = cells
        if q == 0:
            cycle_basis = [[ONE if i == j else ZERO for i in range(n)] for j in range(n)]
        else:
            from flatfill.chains import boundary_matrix

            _, _, mat = boundary_matrix(complex_, q)
            cycle_basis = ela.nullspace(mat) if mat and mat[0] else []
        if complex_.n_cells(q + 1):
            from flatfill.chains import boundary_matrix

            _, _, bmat = boundary_matrix(complex_, q + 1)
            bcols, _ = ela.column_space_basis(bmat)
        else:
            bcols = []
        # complete the boundary basis to a basis of the cycle space; the
        # completing cycle columns represent homology classes
        all_cols = bcols + cycle_basis
        if all_cols:
            mat = [[all_cols[j][i] for j in range(len(all_cols))] for i in range(n)]
            _, pivots = ela.rref(mat)
        else:
            pivots = []
        self.boundary_rank = len(bcols)
        self.rep_indices = [p - len(bcols) for p in pivots if p >= len(bcols)]
        self.reps = [cycle_basis[i] for i in self.rep_indices]
        self._solve_matrix = [[all_cols[j][i] for j in pivots] for i in range(n)] if pivots else []
        self._pivots = pivots

    @property
    def rank(self):
        return len(self.reps)

    def class_coordinates(self, vector):
        """Coordinates of a cycle's homology class in the chosen basis."""
        if not self._solve_matrix:
            return []
        x = ela.solve(self._solve_matrix, vector)
        if x is None:
            raise AssertionError("vector is not a cycle of this degree")
        out = []
        for k, p in enumerate(self._pivots):
            if p >= self.boundary_rank:
                out.append(x[k])
        return out

    def chain_to_vector(self, chain):
        idx = {s: i for i, s in enumerate(self.cells)}
        v = [ZERO] * len(self.cells)
        for s, c in chain.terms.items():
            v[idx[s]] = c
        return v


def induced_homology_matrix(cmap, q, src_space, tgt_space):
    """Matrix of the induced map on unreduced H_q, columns over source classes."""
    cols = []
    src_cells = src_space.cells
    for rep in src_space.reps:
        image = [ZERO] * len(tgt_space.cells)
        tgt_idx = {s: i for i, s in enumerate(tgt_space.cells)}
        for j, c in enumerate(rep):
            if c == 0:
                continue
            img = cmap.apply_basis(src_cells[j])
            for t, coef in img.terms.items():
                image[tgt_idx[t]] += c * coef
        cols.append(tgt_space.class_coordinates(image))
    return [[cols[j][i] for j in range(len(cols))] for i in range(tgt_space.rank)]


def _is_identity(mat, n):
    if len(mat) != n or any(len(row) != n for row in mat):
        return False
    return all(mat[i][j] == (1 if i == j else 0) for i in range(n) for j in range(n))


class NerveEquivalence:
    def __init__(self, flatmate, nerve, f_map, g_map, x_choice, gf_homotopy, fg_homotopy, report):
        self.flatmate = flatmate
        self.nerve = nerve
        self.f_map = f_map
        self.g_map = g_map
        self.x_choice = x_choice
        self.gf_homotopy = gf_homotopy
        self.fg_homotopy = fg_homotopy
        self.report = report


def _check_cover_hypothesis(complex_, members):
    for i, m in enumerate(members):
        if not m:
            raise EmptyMember(f"cover member {i} is empty")
        w = tuple(sorted(m))
        if w not in complex_:
            raise HypothesisViolated(f"member {i} = {w} does not span a full simplex of the complex")
    for facet in complex_.facets:
        fs = set(facet)
        if not any(fs <= m for m in members):
            raise NotACover(f"facet {facet} lies in no cover member")


def _nerve_with_members(members, max_dim=None):
    cover = Cover(members)
    return nerve_of_cover(cover, max_dim=max_dim)


def build_nerve_equivalence(complex_, members, q_max=None, homology_degrees=None):
    """Uniform equivalence between a flatmate complex and its nerve.

    ``members`` are vertex sets; the hypothesis that every member (hence
    every non-empty intersection) spans a full simplex is checked exactly.
    Returns a NerveEquivalence with both carrier homotopies verified and the
    induced homology maps checked to be mutually inverse isomorphisms.
    """
    members = [frozenset(m) for m in members]
    _check_cover_hypothesis(complex_, members)
    nerve = _nerve_with_members(members)
    if q_max is None:
        q_max = max(complex_.dim, nerve.dim)
    cap = q_max + 1

    nerve_cells = list(nerve.all_cells())
    inter = {}
    for beta in nerve_cells:
        got = set(members[beta[0]])
        for i in beta[1:]:
            got &= members[i]
        inter[beta] = got
    x_choice = {beta: min(inter[beta]) for beta in nerve_cells}

    sigma_cells = list(complex_.all_cells())
    f_map = {}
    for s in sigma_cells:
        ss = set(s)
        f_map[s] = tuple(i for i, m in enumerate(members) if ss <= m)
        if not f_map[s]:
            raise NotACover(f"simplex {s} lies in no cover member")
    supersets = {}
    for beta in nerve_cells:
        bs = set(beta)
        supersets[beta] = [alpha for alpha in nerve_cells if bs <= set(alpha)]
    g_map = {beta: tuple(sorted({x_choice[a] for a in supersets[beta]})) for beta in nerve_cells}

    report = {"pass": True, "failures": [], "poset_invariants": {}}

    def fail(tag, detail):
        report["pass"] = False
        report["failures"].append({"check": tag, "detail": detail})

    # exact poset invariants
    for s in sigma_cells:
        w = inter[f_map[s]]
        if not set(s) <= w:
            fail("sigma_in_intersection", s)
        if not set(g_map[f_map[s]]) <= w:
            fail("gf_in_intersection", s)
    for beta in nerve_cells:
        if not set(g_map[beta]) <= inter[beta]:
            fail("g_inside_member_intersection", beta)
        if not set(beta) <= set(f_map[g_map[beta]]):
            fail("fg_dominates_identity", beta)
    for a in sigma_cells:
        for b in sigma_cells:
            if set(a) < set(b) and not set(f_map[b]) <= set(f_map[a]):
                fail("f_antitone", (a, b))
    for a in nerve_cells:
        for b in nerve_cells:
            if set(a) < set(b) and not set(g_map[b]) <= set(g_map[a]):
                fail("g_antitone", (a, b))
    report["poset_invariants"]["checked"] = True

    oc_sigma = OrderComplex(face_poset(complex_), max_dim=cap)
    oc_nerve = OrderComplex(face_poset(nerve), max_dim=cap)

    fhat = ChainMap(
        {oc_sigma.vertex_of(s): oc_nerve.vertex_of(f_map[s]) for s in sigma_cells},
        oc_sigma.complex,
        oc_nerve.complex,
        check=False,
    )
    ghat = ChainMap(
        {oc_nerve.vertex_of(b): oc_sigma.vertex_of(g_map[b]) for b in nerve_cells},
        oc_nerve.complex,
        oc_sigma.complex,
        check=False,
    )
    gf_vertex = {oc_sigma.vertex_of(s): oc_sigma.vertex_of(g_map[f_map[s]]) for s in sigma_cells}
    gfhat = ChainMap(gf_vertex, oc_sigma.complex, oc_sigma.complex, check=False)
    identity_sigma = ChainMap(
        {oc_sigma.vertex_of(s): oc_sigma.vertex_of(s) for s in sigma_cells},
        oc_sigma.complex,
        oc_sigma.complex,
        check=False,
    )
    fg_vertex = {oc_nerve.vertex_of(b): oc_nerve.vertex_of(f_map[g_map[b]]) for b in nerve_cells}
    fghat = ChainMap(fg_vertex, oc_nerve.complex, oc_nerve.complex, check=False)
    identity_nerve = ChainMap(
        {oc_nerve.vertex_of(b): oc_nerve.vertex_of(b) for b in nerve_cells},
        oc_nerve.complex,
        oc_nerve.complex,
        check=False,
    )

    elements_sigma = oc_sigma.elements

    def gf_carrier(simplex_of_oc):
        chain_elems = [elements_sigma[i] for i in simplex_of_oc]
        top = max(chain_elems, key=len)
        w = inter[f_map[top]]
        ids = [oc_sigma.vertex_of(e) for e in elements_sigma if set(e) <= w]
        return oc_sigma.complex.full_subcomplex(ids)

    elements_nerve = oc_nerve.elements

    def fg_carrier(simplex_of_oc):
        chain_elems = [elements_nerve[i] for i in simplex_of_oc]
        bottom = min(chain_elems, key=len)
        top = max(chain_elems, key=len)
        hi = set(f_map[g_map[top]])
        lo = set(bottom)
        ids = [oc_nerve.vertex_of(e) for e in elements_nerve if lo <= set(e) <= hi]
        return oc_nerve.complex.full_subcomplex(ids)

    hom_top = q_max
    gf_h = carrier_homotopy(gfhat, identity_sigma, Carrier(oc_sigma.complex, oc_sigma.complex, gf_carrier), hom_top)
    fg_h = carrier_homotopy(fghat, identity_nerve, Carrier(oc_nerve.complex, oc_nerve.complex, fg_carrier), hom_top)
    for name, h in (("gf", gf_h), ("fg", fg_h)):
        got = h.verify(hom_top)
        if not got["pass"]:
            fail(f"{name}_homotopy", got["failures"])
    report["homotopy_norms"] = {
        "gf": dict(gf_h.operator_norms),
        "fg": dict(fg_h.operator_norms),
    }

    # homology comparison through the subdivision equivalences
    sd_sigma = subdivision_chain_map(complex_, oc_sigma)
    sd_nerve = subdivision_chain_map(nerve, oc_nerve)
    pi_sigma = collapse_chain_map(oc_sigma, complex_)
    pi_nerve = collapse_chain_map(oc_nerve, nerve)

    class _Route:
        def __init__(self, first, middle, last):
            self.first, self.middle, self.last = first, middle, last

        def apply_basis(self, s):
            return self.last(self.middle(self.first.apply_basis(s)))

    route_to_nerve = _Route(sd_sigma, fhat, pi_nerve)
    route_to_sigma = _Route(sd_nerve, ghat, pi_sigma)

    degrees = homology_degrees if homology_degrees is not None else range(q_max + 1)
    report["homology"] = {}
    for q in degrees:
        hs = HomologySpace(complex_, q)
        hn = HomologySpace(nerve, q)
        a = induced_homology_matrix(route_to_nerve, q, hs, hn)
        b = induced_homology_matrix(route_to_sigma, q, hn, hs)
        ab = ela.matmul(a, b) if hn.rank else []
        ba = ela.matmul(b, a) if hs.rank else []
        ok = (hs.rank == hn.rank) and _is_identity(ab, hn.rank) and _is_identity(ba, hs.rank)
        report["homology"][q] = {"rank": hs.rank, "inverse_pair": ok}
        if not ok:
            fail("homology_inverse", q)

    flat = FlatmateComplex(complex_.vertices, Cover(members), complex_)
    return NerveEquivalence(flat, nerve, f_map, g_map, x_choice, gf_h, fg_h, report)


def nerve_isomorphic_to_vertex_nerve(flatmate, max_dim=None):
    """Nerve of the subcomplex cover equals the nerve of the vertex cover.

    Two full simplices intersect exactly when their vertex sets do, so both
    nerves are literally the same labeled complex; checked by construction.
    """
    by_subcomplexes = nerve_of_cover(Cover(flatmate.cover.members), max_dim=max_dim)
    by_vertices = nerve_of_cover(flatmate.cover, max_dim=max_dim)
    return by_subcomplexes == by_vertices, by_subcomplexes, by_vertices


class NestedComparison:
    def __init__(self, homotopy, report):
        self.homotopy = homotopy
        self.report = report


def nested_subcover_comparison(base, small_members, big_members, q_max=None, x_choice=None, x_choice_small=None):
    """Compare the two nerve routes of nested finite subcovers.

    With a globally fixed vertex choice, f' (through the small nerve) sits
    below f'' (through the big nerve) pointwise, and the two induced chain
    maps on the subdivision are homotopic through the interval carrier.  The
    g-side inequality is verified pointwise as well.
    """
    small = [frozenset(m) for m in small_members]
    big = [frozenset(m) for m in big_members]
    for m in small:
        if m not in big:
            raise NotACover("small cover is not a subfamily of the big cover")
    small_idx = [big.index(m) for m in small]

    sigma_small = SimplicialComplex([tuple(sorted(m)) for m in small])
    _check_cover_hypothesis(sigma_small, small)
    nerve_big = _nerve_with_members(big)
    if q_max is None:
        q_max = sigma_small.dim
    cap = q_max + 1

    big_cells = list(nerve_big.all_cells())
    inter = {}
    for beta in big_cells:
        got = set(big[beta[0]])
        for i in beta[1:]:
            got &= big[i]
        inter[beta] = got
    if x_choice is None:
        x_choice = {beta: min(inter[beta]) for beta in big_cells}
    if x_choice_small is not None:
        shared = set(x_choice_small) & set(x_choice)
        bad = [a for a in shared if x_choice_small[a] != x_choice[a]]
        if bad:
            raise ChoiceNotGlobal(f"vertex choice differs between the runs on {bad[0]}")

    small_set = set(small_idx)
    sigma_cells = list(sigma_small.all_cells())
    f_small = {}
    f_big = {}
    for s in sigma_cells:
        ss = set(s)
        f_big[s] = tuple(i for i, m in enumerate(big) if ss <= m)
        f_small[s] = tuple(i for i in f_big[s] if i in small_set)

    report = {"pass": True, "failures": []}
    for s in sigma_cells:
        if not set(f_small[s]) <= set(f_big[s]):
            report["pass"] = False
            report["failures"].append({"check": "f_pointwise", "simplex": s})

    # g-side: supersets within each nerve, one global vertex choice
    small_cells = [b for b in big_cells if set(b) <= small_set]
    for beta in small_cells:
        bs = set(beta)
        g_small = {x_choice[a] for a in small_cells if bs <= set(a)}
        g_big = {x_choice[a] for a in big_cells if bs <= set(a)}
        if not g_small <= g_big:
            report["pass"] = False
            report["failures"].append({"check": "g_pointwise", "simplex": beta})

    oc_sigma = OrderComplex(face_poset(sigma_small), max_dim=cap)
    oc_nerve = OrderComplex(face_poset(nerve_big), max_dim=cap)
    fhat_small = ChainMap(
        {oc_sigma.vertex_of(s): oc_nerve.vertex_of(f_small[s]) for s in sigma_cells},
        oc_sigma.complex,
        oc_nerve.complex,
        check=False,
    )
    fhat_big = ChainMap(
        {oc_sigma.vertex_of(s): oc_nerve.vertex_of(f_big[s]) for s in sigma_cells},
        oc_sigma.complex,
        oc_nerve.complex,
        check=False,
    )

    elements_sigma = oc_sigma.elements
    elements_nerve = oc_nerve.elements

    def carrier_assign(simplex_of_oc):
        chain_elems = [elements_sigma[i] for i in simplex_of_oc]
        bottom = min(chain_elems, key=len)
        top = max(chain_elems, key=len)
        lo = set(f_small[top])
        hi = set(f_big[bottom])
        ids = [oc_nerve.vertex_of(e) for e in elements_nerve if lo <= set(e) <= hi]
        return oc_nerve.complex.full_subcomplex(ids)

    h = carrier_homotopy(
        fhat_small, fhat_big, Carrier(oc_sigma.complex, oc_nerve.complex, carrier_assign), q_max
    )
    got = h.verify(q_max)
    if not got["pass"]:
        report["pass"] = False
        report["failures"].append({"check": "comparison_homotopy", "detail": got["failures"]})
    report["homotopy_norms"] = dict(h.operator_norms)
    return NestedComparison(h, report)

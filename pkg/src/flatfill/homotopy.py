"""Contracting homotopies: cones, acyclic carriers, and bounded synthesis.

Identities are checked as exact rational identities per basis simplex, never
numerically.  The synthesis routine follows a degree-by-degree induction: for
each basis simplex the defect against the lower homotopy is a cycle, a hull
oracle supplies a small acyclic subcomplex around it, and the LP-optimal fill
becomes the homotopy value.  The support ledger ``psi`` is evaluated lazily
from the oracle's declared vertex bound.
"""

from __future__ import annotations

from fractions import Fraction
from functools import lru_cache
from math import comb

from flatfill.chains import Chain, augment, boundary, join, zero_chain
from flatfill.errors import CarrierNotAcyclic, NotACone, NotACycle, NotCarried, OracleViolation
from flatfill.filling import is_acyclic, min_l1_fill, reduced_betti

ZERO = Fraction(0)
ONE = Fraction(1)

PROBE_SUPPORTS = (1, 2, 4, 8)


class Homotopy:
    """Per-degree sparse contracting homotopy with recorded norms and psi.

    ``maps[q]`` sends each basis q-simplex to its degree q+1 image;
    ``base_chain`` is the image of 1 under the degree -1 map, so the
    contraction identities read:

        augment(base chain) = 1
        augment(c) * base + d(h0 c)            = c   in degree 0
        h_{q-1}(d c)       + d(h_q c)          = c   in degree q > 0
    """

    def __init__(self, complex_, base_chain, maps, psi=None, meta=None):
        self.complex = complex_
        self.base_chain = base_chain
        self.maps = {q: dict(table) for q, table in maps.items()}
        self.psi = psi
        self.meta = dict(meta or {})
        self.operator_norms = {-1: base_chain.norm()}
        for q, table in sorted(self.maps.items()):
            self.operator_norms[q] = max((c.norm() for c in table.values()), default=ZERO)

    @property
    def q_max(self):
        return max(self.maps) if self.maps else -1

    def apply(self, q, chain):
        table = self.maps.get(q)
        out = zero_chain(q + 1)
        if not table:
            return out
        for s, c in chain.terms.items():
            img = table.get(s)
            if img is not None:
                out = out + c * img
        return out

    def psi_value(self, q, m):
        if self.psi is None:
            return None
        return self.psi(q, m)


def cone_homotopy(complex_, apex=None):
    """Contracting homotopy of a simplicial cone: h_q(s) = apex * s.

    Every operator norm is at most 1, and exactly 1 below the top degree of a
    full simplex.
    """
    found = complex_.cone_apex()
    if found is None:
        raise NotACone("no vertex is joined to every simplex")
    if apex is not None:
        if apex != found and not all(apex in f for f in complex_.facets):
            raise NotACone(f"vertex {apex} is not joined to every simplex")
        found = apex
    maps = {}
    for q in range(complex_.dim + 1):
        table = {}
        for s in complex_.cells(q):
            img = join(found, Chain.unit(s))
            if not img.is_zero:
                table[s] = img
        maps[q] = table
    base = Chain(0, {(found,): ONE})
    return Homotopy(complex_, base, maps, psi=lambda q, m: m, meta={"kind": "cone", "apex": found})


def homotopy_identity_defect(h, q, s):
    """id - (h d + d h) evaluated on a basis simplex; zero when the identity holds."""
    unit = Chain.unit(s)
    if q == 0:
        lower = augment(unit) * h.base_chain
    else:
        lower = h.apply(q - 1, boundary(unit))
    upper_img = h.apply(q, unit)
    upper = boundary(upper_img) if not upper_img.is_zero else zero_chain(q)
    return unit - lower - upper


def verify_homotopy(complex_, h, q_max=None, probes=PROBE_SUPPORTS, samples=6, seed=0):
    """Exact verification of boundedness, homotopy identities and support growth.

    Returns a report dict; failures are entries, not exceptions.
    """
    import random

    rng = random.Random(seed)
    if q_max is None:
        q_max = min(h.q_max, complex_.dim)
    report = {"pass": True, "degrees": {}, "failures": []}
    if augment(h.base_chain) != 1:
        report["pass"] = False
        report["failures"].append({"degree": -1, "identity": "augment(base) != 1"})
    report["degrees"][-1] = {"operator_norm": h.base_chain.norm()}

    coef_pool = [Fraction(1), Fraction(-1), Fraction(1, 2), Fraction(-2)]
    for q in range(q_max + 1):
        cells = complex_.cells(q)
        max_support = 0
        norm = ZERO
        for s in cells:
            defect = homotopy_identity_defect(h, q, s)
            if not defect.is_zero:
                report["pass"] = False
                report["failures"].append({"degree": q, "simplex": s, "identity": "h d + d h != id"})
            img = h.apply(q, Chain.unit(s))
            norm = max(norm, img.norm())
            max_support = max(max_support, img.support())
        entry = {"operator_norm": norm, "max_basis_support": max_support, "supports": {}}
        psi1 = h.psi_value(q, 1)
        if psi1 is not None:
            entry["supports"][1] = {"measured": max_support, "bound": psi1, "ok": max_support <= psi1}
            if max_support > psi1:
                report["pass"] = False
                report["failures"].append({"degree": q, "support_bound": 1})
        for m in probes:
            if m == 1 or m > len(cells):
                continue
            bound = h.psi_value(q, m)
            worst = 0
            for _ in range(samples):
                chosen = rng.sample(cells, m)
                omega = Chain(q, {s: rng.choice(coef_pool) for s in chosen})
                worst = max(worst, h.apply(q, omega).support())
            if bound is not None:
                ok = worst <= bound
                entry["supports"][m] = {"measured": worst, "bound": bound, "ok": ok}
                if not ok:
                    report["pass"] = False
                    report["failures"].append({"degree": q, "support_bound": m})
            else:
                entry["supports"][m] = {"measured": worst}
        report["degrees"][q] = entry
    return report


class Carrier:
    """Isotone assignment of target subcomplexes to source simplices."""

    def __init__(self, source, target, assign):
        self.source = source
        self.target = target
        self._assign = assign
        self._cache = {}

    def __call__(self, s):
        s = tuple(s)
        got = self._cache.get(s)
        if got is None:
            got = self._cache[s] = self._assign(s)
        return got


class CarrierHomotopy:
    """Chain homotopy H between two chain maps: phi - psi = dH + Hd."""

    def __init__(self, phi, psi, maps, carrier):
        self.phi = phi
        self.psi = psi
        self.maps = maps
        self.carrier = carrier
        self.operator_norms = {
            q: max((c.norm() for c in table.values()), default=ZERO) for q, table in sorted(maps.items())
        }

    def apply(self, q, chain):
        table = self.maps.get(q)
        out = zero_chain(q + 1)
        if not table:
            return out
        for s, c in chain.terms.items():
            img = table.get(s)
            if img is not None:
                out = out + c * img
        return out

    def defect(self, q, s):
        """(phi - psi - dH - Hd) on a basis simplex; zero when correct."""
        unit = Chain.unit(s)
        diff = self.phi(unit) - self.psi(unit)
        upper_img = self.apply(q, unit)
        upper = boundary(upper_img) if not upper_img.is_zero else zero_chain(q)
        lower = self.apply(q - 1, boundary(unit)) if q > 0 else zero_chain(q)
        return diff - upper - lower

    def verify(self, q_max=None):
        failures = []
        top = max(self.maps) if q_max is None else q_max
        for q in range(top + 1):
            for s in self.carrier.source.cells(q):
                if not self.defect(q, s).is_zero:
                    failures.append({"degree": q, "simplex": s})
        return {"pass": not failures, "failures": failures}


def _check_acyclic_carrier(sub, up_to, cache):
    key = sub.facets
    got = cache.get(key)
    if got is None:
        if sub.cone_apex() is not None:
            got = True  # cones are acyclic; certified by the apex
        else:
            got = all(b == 0 for b in reduced_betti(sub, up_to))
        cache[key] = got
    return got


def carrier_homotopy(phi, psi, carrier, q_max, fill=min_l1_fill):
    """Chain homotopy between two maps carried by the same acyclic carrier.

    Built by induction on skeleta: on each basis simplex the defect
    phi(s) - psi(s) - H(ds) is a cycle inside the carrier subcomplex and is
    filled there (LP-optimal by default).
    """
    source = carrier.source
    maps = {}
    acyclic_cache = {}
    for q in range(q_max + 1):
        table = {}
        for s in source.cells(q):
            unit = Chain.unit(s)
            sub = carrier(s)
            img_phi = phi(unit)
            img_psi = psi(unit)
            for img, name in ((img_phi, "first"), (img_psi, "second")):
                for t in img.terms:
                    if t not in sub:
                        raise NotCarried(f"{name} map leaves the carrier on {s}: {t} missing")
            omega = img_phi - img_psi
            if q > 0:
                prev = maps[q - 1]
                for t, c in boundary(unit).terms.items():
                    contrib = prev.get(t)
                    if contrib is not None:
                        omega = omega - c * contrib
            if omega.is_zero:
                continue
            for t in omega.terms:
                if t not in sub:
                    raise NotCarried(f"inductive defect on {s} leaves the carrier: {t} missing")
            if q == 0:
                if augment(omega) != 0:
                    raise NotACycle(f"defect on {s} does not augment to zero")
            elif not boundary(omega).is_zero:
                raise NotACycle(f"defect on {s} is not a cycle")
            if not _check_acyclic_carrier(sub, q, acyclic_cache):
                raise CarrierNotAcyclic(f"carrier value on {s} has nonzero reduced homology")
            table[s] = fill(sub, omega).fill
        maps[q] = table
    return CarrierHomotopy(phi, psi, maps, carrier)


class HullOracle:
    """Supplies small acyclic subcomplexes containing requested vertex sets.

    ``hull(vertices)`` must return a subcomplex containing every simplex of
    the ambient complex spanned by the request, acyclic, with at most
    ``phi(len(vertices))`` vertices.  Violations abort the synthesis.
    """

    def __init__(self, hull, phi, name="oracle"):
        self._hull = hull
        self.phi = phi
        self.name = name

    def __call__(self, vertices):
        return self._hull(frozenset(vertices))


def full_complex_oracle(complex_):
    """The trivial hull oracle: the whole complex, phi constant."""
    size = len(complex_.vertices)
    return HullOracle(lambda vs: complex_, lambda n: size, name="full")


def synthesize_psi(phi, q_max):
    """The support-growth ledger of the synthesis induction.

    psi(-1, m) = 1 and psi(q, m) = m * C(phi(n_q), q + 2) with
    n_q = (q + 1) * (1 + psi(q - 1, q + 1)).
    """

    @lru_cache(maxsize=None)
    def n_of(q):
        return (q + 1) * (1 + psi(q - 1, q + 1))

    @lru_cache(maxsize=None)
    def per_basis(q):
        return comb(phi(n_of(q)), q + 2)

    def psi(q, m):
        if q == -1:
            return 1
        return m * per_basis(q)

    psi.n_of = n_of
    return psi


def synthesize_bounded_homotopy(complex_, oracle, q_max, check_hull_acyclicity=True):
    """Inductive construction of a bounded contracting homotopy.

    For each basis simplex, the defect against the previous degree is a
    cycle; the oracle hull around its vertices supplies the filling region.
    Raises OracleViolation when a hull is too large, misses simplices or is
    not acyclic, and NotACycle when the inductive invariant breaks.
    """
    base_vertex = complex_.vertices[0]
    base = Chain(0, {(base_vertex,): ONE})
    psi = synthesize_psi(oracle.phi, q_max)
    maps = {}
    hull_cache = {}
    ledger = {"degrees": {}, "oracle": oracle.name}
    for q in range(min(q_max, complex_.dim) + 1):
        table = {}
        n_q = psi.n_of(q)
        worst_ratio = ZERO
        worst_hull = 0
        for s in complex_.cells(q):
            unit = Chain.unit(s)
            if q == 0:
                alpha = unit - augment(unit) * base
            else:
                prev = maps[q - 1]
                alpha = unit
                for t, c in boundary(unit).terms.items():
                    contrib = prev.get(t)
                    if contrib is not None:
                        alpha = alpha - c * contrib
            if alpha.is_zero:
                continue
            if q == 0:
                if augment(alpha) != 0:
                    raise NotACycle(f"defect of {s} does not augment to zero")
            elif not boundary(alpha).is_zero:
                raise NotACycle(f"defect of {s} is not a cycle")
            verts = frozenset(alpha.vertex_set())
            if len(verts) > n_q:
                raise OracleViolation(f"defect of {s} touches {len(verts)} vertices, ledger allows {n_q}")
            hull = oracle(verts)
            if not verts <= set(hull.vertices):
                raise OracleViolation(f"hull misses requested vertices for {s}")
            if len(hull.vertices) > oracle.phi(len(verts)):
                raise OracleViolation(
                    f"hull has {len(hull.vertices)} vertices, phi({len(verts)}) = {oracle.phi(len(verts))}"
                )
            for t in alpha.terms:
                if t not in hull:
                    raise OracleViolation(f"hull misses simplex {t} of the defect of {s}")
            if check_hull_acyclicity:
                key = hull.facets
                ok = hull_cache.get(key)
                if ok is None:
                    ok = hull_cache[key] = hull.cone_apex() is not None or is_acyclic(hull, min(q + 1, hull.dim))
                if not ok:
                    raise OracleViolation(f"hull for {s} is not acyclic")
            result = min_l1_fill(hull, alpha)
            beta = result.fill
            if beta.support() > psi(q, 1):
                raise OracleViolation(f"fill of {s} exceeds the support ledger")
            table[s] = beta
            worst_ratio = max(worst_ratio, result.norm / alpha.norm())
            worst_hull = max(worst_hull, len(hull.vertices))
        maps[q] = table
        ledger["degrees"][q] = {
            "n": n_q,
            "phi_n": oracle.phi(n_q),
            "max_fill_ratio": worst_ratio,
            "max_hull_vertices": worst_hull,
        }
    return Homotopy(complex_, base, maps, psi=psi, meta={"kind": "synthesized", "ledger": ledger})

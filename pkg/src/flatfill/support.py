"""Support control: profiling fill supports and the two-piece gluing fill.

A degree has support control when every cycle of support at most m bounds a
chain of support at most phi(m); the profile measures the best such phi on a
finite complex by exhausting (or sampling) small-support cycles.  The glued
fill decomposes a cycle on a union into two controlled pieces through the
intersection, mirroring the constructive proof of the gluing lemma.
"""

from __future__ import annotations

import itertools
import random
from fractions import Fraction
from math import comb

from flatfill import exactlinalg as ela
from flatfill.chains import Chain, augment, boundary, zero_chain
from flatfill.errors import DegreeTooHigh, IntersectionNotControlled, NotABoundary, NotACycle
from flatfill.filling import min_l1_fill, min_support_fill
from flatfill.simplicial import intersection, union

ZERO = Fraction(0)
ONE = Fraction(1)

NOT_CONTROLLED = "NotControlled"


class SupportProfile:
    """Measured support-control table phi-hat per degree."""

    def __init__(self, complex_, degrees, mode_flags):
        self.complex = complex_
        self.degrees = degrees  # {q: {"table": {m: value}, "controlled": bool, "witness": Chain|None}}
        self.mode_flags = mode_flags

    def table(self, q):
        return self.degrees[q]["table"]

    def controlled(self, q):
        return self.degrees[q]["controlled"]


def _cycles_on_support(complex_, q, support, rng, kernel_samples=3):
    """Candidate cycles supported inside the given q-simplices.

    When the kernel is one-dimensional the candidate is exhaustive up to
    scale; higher-dimensional kernels additionally get seeded combinations
    (flagged by the caller).
    """
    cols = list(support)
    if q == 0:
        rows = [tuple()]
        mat = [[ONE] * len(cols)]
    else:
        faces = sorted({s[:i] + s[i + 1 :] for s in cols for i in range(len(s))})
        fidx = {f: i for i, f in enumerate(faces)}
        mat = [[ZERO] * len(cols) for _ in faces]
        for j, s in enumerate(cols):
            for i in range(len(s)):
                mat[fidx[s[:i] + s[i + 1 :]]][j] = ONE if i % 2 == 0 else -ONE
    kernel = ela.nullspace(mat)
    out = []
    sampled = len(kernel) > 1
    for vec in kernel:
        out.append(Chain(q, {cols[j]: vec[j] for j in range(len(cols)) if vec[j] != 0}))
    if sampled:
        for _ in range(kernel_samples):
            coefs = [rng.choice((1, -1, 2)) for _ in kernel]
            combo = [sum(c * v[j] for c, v in zip(coefs, kernel)) for j in range(len(cols))]
            ch = Chain(q, {cols[j]: combo[j] for j in range(len(cols)) if combo[j] != 0})
            if not ch.is_zero:
                out.append(ch)
    return out, sampled


def support_control_profile(
    complex_,
    q,
    m_max,
    qtop=None,
    mode="exhaustive",
    seed=0,
    enumeration_budget=100_000,
    fill_budget=200_000,
    samples_per_m=40,
):
    """Measured control function phi-hat_p(m) for degrees q <= p < qtop.

    Exhaustive mode enumerates all supports of size <= m_max (falling back to
    sampling, flagged, when the count exceeds the budget); a degree where
    some small cycle has no filling at all is reported as not controlled with
    the witness cycle.
    """
    if qtop is None:
        qtop = q + 1
    rng = random.Random(seed)
    degrees = {}
    flags = {}
    for p in range(q, qtop):
        cells = complex_.cells(p)
        n = len(cells)
        total = sum(comb(n, k) for k in range(1, min(m_max, n) + 1))
        use_mode = mode
        if mode == "exhaustive" and total > enumeration_budget:
            use_mode = "sampled"
            flags[p] = "Infeasible: fell back to sampled"
        table = {}
        controlled = True
        witness = None
        kernel_sampled = False
        best = 0
        for m in range(1, m_max + 1):
            if not controlled:
                break
            size = min(m, n)
            if use_mode == "exhaustive":
                supports = itertools.combinations(cells, size)
            else:
                supports = (tuple(rng.sample(cells, size)) for _ in range(samples_per_m))
            for support in supports:
                cands, sampled = _cycles_on_support(complex_, p, support, rng)
                kernel_sampled = kernel_sampled or sampled
                for alpha in cands:
                    if alpha.support() > m:
                        continue
                    try:
                        res = min_support_fill(complex_, alpha, budget=fill_budget)
                    except (NotABoundary, DegreeTooHigh):
                        controlled = False
                        witness = alpha
                        break
                    best = max(best, res.support)
                if not controlled:
                    break
            if controlled:
                table[m] = best
        degrees[p] = {
            "table": table,
            "controlled": controlled,
            "witness": witness,
            "mode": use_mode,
            "kernel_sampled": kernel_sampled,
        }
    return SupportProfile(complex_, degrees, flags)


class GluedFillResult:
    def __init__(self, fill, omega, beta_plus, beta_minus, trace):
        self.fill = fill
        self.norm = fill.norm()
        self.support = fill.support()
        self.omega = omega
        self.beta_plus = beta_plus
        self.beta_minus = beta_minus
        self.trace = trace


def _controlled_fill(complex_, alpha, budget):
    res = min_support_fill(complex_, alpha, budget=budget)
    return res, ("support" if res.exhaustive else "l1-fallback")


def glued_fill(plus, minus, alpha, budget=50_000):
    """Fill a cycle on a union of two support-controlled pieces.

    Splits the cycle without introducing new simplices, fills the common
    boundary in the intersection, then fills the corrected halves in their
    own pieces.  The three sub-fill supports are reported in the trace.
    """
    q = alpha.degree
    ambient = union(plus, minus)
    for s in alpha.terms:
        if s not in ambient:
            raise NotACycle(f"simplex {s} is outside the union")
    if q == 0:
        if augment(alpha) != 0:
            raise NotACycle("degree-0 chain does not augment to zero")
    elif not boundary(alpha).is_zero:
        raise NotACycle("the chain is not a cycle")

    plus_terms = {s: c for s, c in alpha.terms.items() if s in plus}
    alpha_plus = Chain(q, plus_terms)
    alpha_minus = alpha_plus - alpha
    for s in alpha_minus.terms:
        if s not in minus:
            raise NotACycle(f"simplex {s} lies in neither piece")

    inter = intersection(plus, minus)
    trace = {"split": {"plus_support": alpha_plus.support(), "minus_support": alpha_minus.support()}}

    if q == 0:
        excess = augment(alpha_plus)
        if excess == 0:
            omega = zero_chain(0)
        else:
            if inter is None:
                raise IntersectionNotControlled("pieces are disjoint, nothing can balance the halves")
            omega = Chain(0, {(inter.vertices[0],): excess})
        trace["omega"] = {"support": omega.support(), "method": "augmentation"}
    else:
        gamma = boundary(alpha_plus)
        if gamma.is_zero:
            omega = zero_chain(q)
            trace["omega"] = {"support": 0, "method": "trivial"}
        else:
            if inter is None:
                raise IntersectionNotControlled("pieces are disjoint but the halves interact")
            for s in gamma.terms:
                if s not in inter:
                    raise IntersectionNotControlled(f"common boundary leaves the intersection at {s}")
            try:
                res, method = _controlled_fill(inter, gamma, budget)
            except NotABoundary as exc:
                raise IntersectionNotControlled(f"common boundary has no filling in the intersection: {exc}") from None
            omega = res.fill
            trace["omega"] = {"support": omega.support(), "method": method}

    res_plus, method_plus = _controlled_fill(plus, alpha_plus - omega, budget)
    res_minus, method_minus = _controlled_fill(minus, alpha_minus - omega, budget)
    beta_plus, beta_minus = res_plus.fill, res_minus.fill
    fill = beta_plus - beta_minus
    if boundary(fill) != alpha:
        raise AssertionError("glued fill does not bound the cycle")
    trace["beta_plus"] = {"support": beta_plus.support(), "method": method_plus}
    trace["beta_minus"] = {"support": beta_minus.support(), "method": method_minus}
    return GluedFillResult(fill, omega, beta_plus, beta_minus, trace)

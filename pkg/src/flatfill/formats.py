"""Versioned JSON interchange formats.

All numbers in reports are exact fraction strings; serialisation is
canonical (sorted keys, fixed separators) so identical data always produces
identical bytes.
"""

from __future__ import annotations

import hashlib
import json
from fractions import Fraction

from flatfill.chains import Chain
from flatfill.errors import NotSimplicial
from flatfill.simplicial import Cover, SimplicialComplex

COMPLEX_FORMAT = "flatfill-complex/1"
CHAIN_FORMAT = "flatfill-chain/1"
COVER_FORMAT = "flatfill-cover/1"
BUILDING_FORMAT = "flatfill-building/1"


def fraction_str(x):
    return str(Fraction(x))


def parse_fraction(s):
    if isinstance(s, int):
        return Fraction(s)
    return Fraction(str(s).replace("−", "-").strip())


def canonical_json(obj):
    return json.dumps(obj, sort_keys=True, separators=(",", ":"), ensure_ascii=True) + "\n"


def digest(data):
    if isinstance(data, str):
        data = data.encode()
    return hashlib.sha256(data).hexdigest()


def complex_to_json(complex_):
    vertices = []
    for v in complex_.vertices:
        entry = {"id": v}
        if v in complex_.labels:
            entry["label"] = complex_.labels[v]
        vertices.append(entry)
    return {
        "format": COMPLEX_FORMAT,
        "vertices": vertices,
        "facets": [list(f) for f in complex_.facets],
    }


def complex_from_json(doc):
    if doc.get("format") != COMPLEX_FORMAT and "facets" not in doc:
        raise NotSimplicial("not a complex document")
    for f in doc["facets"]:
        if any(a >= b for a, b in zip(f, f[1:])):
            raise NotSimplicial(f"facet {f} is not strictly increasing")
    labels = {v["id"]: v["label"] for v in doc.get("vertices", []) if "label" in v}
    return SimplicialComplex([tuple(f) for f in doc["facets"]], labels=labels)


def chain_to_json(chain):
    return {
        "format": CHAIN_FORMAT,
        "degree": chain.degree,
        "terms": [{"simplex": list(s), "coef": fraction_str(c)} for s, c in chain.items()],
    }


def chain_from_json(doc):
    terms = {}
    for term in doc["terms"]:
        s = tuple(term["simplex"])
        if any(a >= b for a, b in zip(s, s[1:])):
            raise NotSimplicial(f"chain simplex {s} is not strictly increasing")
        terms[s] = parse_fraction(term["coef"])
    return Chain(doc["degree"], terms)


def cover_to_json(cover):
    return {"format": COVER_FORMAT, "members": [sorted(m) for m in cover.members]}


def cover_from_json(doc):
    return Cover([frozenset(m) for m in doc["members"]])


def building_to_json(building):
    doc = complex_to_json(building.complex)
    doc["format"] = BUILDING_FORMAT
    doc["type"] = building.type
    doc["q"] = building.q
    doc["R"] = building.radius
    doc["base_chamber"] = list(building.base_chamber)
    doc["base_vertex"] = building.base_vertex
    doc["apartments"] = [list(a.vertices) for a in building.apartments]
    doc["apartment_paths"] = [list(a.path) if a.path else None for a in building.apartments]
    doc["apartment_ends"] = [list(a.ends) for a in building.apartments]
    return doc


def building_from_json(doc):
    from flatfill.buildings import ApartmentFragment, Building

    complex_ = SimplicialComplex([tuple(f) for f in doc["facets"]])
    base_vertex = doc["base_vertex"]
    # recover depths (and, for trees, the parent structure) from the skeleton
    adjacency = {v: set() for v in complex_.vertices}
    for a, b in complex_.cells(1):
        adjacency[a].add(b)
        adjacency[b].add(a)
    depth = {base_vertex: 0}
    parent = {base_vertex: None}
    frontier = [base_vertex]
    while frontier:
        nxt = []
        for v in frontier:
            for w in sorted(adjacency[v]):
                if w not in depth:
                    depth[w] = depth[v] + 1
                    parent[w] = v
                    nxt.append(w)
        frontier = nxt
    apartments = []
    paths = doc.get("apartment_paths") or [None] * len(doc["apartments"])
    ends = doc.get("apartment_ends") or [()] * len(doc["apartments"])
    for verts, path, end in zip(doc["apartments"], paths, ends):
        apartments.append(ApartmentFragment(verts, ends=end, path=path))
    building = Building(
        complex_,
        doc["type"],
        doc["q"],
        doc["R"],
        base_chamber=tuple(doc["base_chamber"]),
        base_vertex=base_vertex,
        apartments=apartments,
        depth=depth,
    )
    if doc["type"] == "A1~":
        building.parent = parent
        building.children = {v: sorted(w for w in adjacency[v] if parent.get(w) == v) for v in complex_.vertices}
    return building


def jsonable(value):
    """Recursively convert report values to JSON-safe types."""
    if isinstance(value, Fraction):
        return fraction_str(value)
    if isinstance(value, dict):
        return {_key(k): jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [jsonable(v) for v in value]
    if isinstance(value, Chain):
        return chain_to_json(value)
    if isinstance(value, (int, str, bool)) or value is None:
        return value
    if isinstance(value, SimplicialComplex):
        return complex_to_json(value)
    return str(value)


def _key(k):
    if isinstance(k, (tuple, frozenset)):
        return ",".join(str(x) for x in sorted(k)) if isinstance(k, frozenset) else ",".join(str(x) for x in k)
    if isinstance(k, int):
        return str(k)
    return k

"""Exact-arithmetic toolkit for l1 fillings, bounded homotopies, nerve
equivalences and flatmate complexes of finite building balls.

Everything is computed over exact rationals; every certificate the library
emits (fill optimality, homotopy identities, acyclicity) is checked with
zero tolerance.
"""

from flatfill.simplicial import (
    SimplicialComplex,
    Cover,
    Poset,
    PosetMap,
    from_facets,
    full_simplex,
    nerve_of_cover,
    order_complex,
    face_poset,
    barycentric_subdivision,
)
from flatfill.chains import Chain, boundary, augment, measure, induced_chain_map
from flatfill.filling import (
    FillingResult,
    reduced_betti,
    min_l1_fill,
    min_support_fill,
    filling_constant,
    universal_constant,
)
from flatfill.homotopy import (
    Homotopy,
    HullOracle,
    Carrier,
    cone_homotopy,
    carrier_homotopy,
    synthesize_bounded_homotopy,
    verify_homotopy,
)
from flatfill.support import support_control_profile, glued_fill
from flatfill.nerve import (
    FlatmateComplex,
    NerveEquivalence,
    flatmate_complex,
    build_nerve_equivalence,
    nested_subcover_comparison,
)
from flatfill.buildings import (
    Building,
    ApartmentFragment,
    bruhat_tits_tree_ball,
    a2_ball,
    enumerate_apartments,
    maximal_geodesics,
    check_combinatorial_convexity,
    sector_completion,
)

__version__ = "0.1.0"

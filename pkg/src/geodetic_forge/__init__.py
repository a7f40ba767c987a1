"""Confluent length-reducing rewriting systems from odd subdivisions of Cayley graphs."""

from .caps import Caps, default_caps
from .graphs import (
    LabeledGraph,
    SubdivisionMap,
    cayley_graph,
    check_label_isomorphism,
    enumerate_embedded_circuits,
    is_geodetic,
    slex_geodesic,
    subdivide,
)
from .groups import (
    AbelianInvariants,
    FiniteGroup,
    GenPartition,
    GenSet,
    Presentation,
    abelianization,
    check_genset,
    count_homs,
    group_from_spec,
    make_cyclic,
    make_klein,
    make_symmetric,
    partition_generators,
)
from .nabla import (
    ComposedSystem,
    NablaSystem,
    build_alphabet,
    compose_free_product,
    enumerate_rules,
    free_group_system,
    nabla,
    phi_bijection,
    presentation_of,
)
from .rewriting import (
    RewritingSystem,
    Rule,
    check_confluence_bounded,
    irreducible_words,
    is_inverse_closed,
    is_length_reducing,
    normal_form,
    rewrite_step,
)
from .verify import (
    VerificationReport,
    verify_cayley_correspondence,
    verify_free_product_composition,
    verify_iterated_subdivision,
    verify_theorem_a,
    verify_theorem_b,
)
from .words import Letter, LetterOrder, format_word, parse_word, word_inverse

__version__ = "0.1.0"

"""Orbit problems in the rank-2 free group.

Core layers: reduced-word arithmetic (:mod:`fgorbits.words`), subgroup
automata (:mod:`fgorbits.stallings`), endomorphisms and primitivity
(:mod:`fgorbits.endo2`), the letter dynamics on truncated automata
(:mod:`fgorbits.dynamics`), and the decision procedures
(:mod:`fgorbits.orbit`).  The ``fg-orbits`` command line fronts all of it.
"""

from .words import Word, word, reduce, multiply, invert, cyclic_core, identity
from .stallings import (
    StallingsAutomaton,
    fold_generators,
    contains,
    contains_conjugate,
    singularity_profile,
    bridge_decomposition,
    metrics,
    equal_subgroups,
    basis_completion,
    subgroup_generators,
)
from .endo2 import (
    Endo2,
    endo,
    apply_endo,
    compose,
    is_automorphism,
    invert_automorphism,
    is_positive_primitive,
    is_primitive,
    factorize_automorphism,
    emit_closure_grammar,
    bounded_language,
)
from .dynamics import (
    TruncatedAutomaton,
    TransitionSystem,
    sigma_apply_direct,
    truncate,
    truncated_step,
    choose_t,
    closure_system,
)
from .orbit import (
    SigmaRational,
    parse_sigma_regex,
    Decision,
    Witness,
    witness_language,
    decide_rational,
    encode_invertible_substitutions,
    decide_full_aut,
    contains_primitive,
)

__version__ = "0.1.0"

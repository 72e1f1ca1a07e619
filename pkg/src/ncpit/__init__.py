"""Randomized black-box identity testing for non-commutative
plus-regular arithmetic circuits.

The pipeline substitutes one matrix per variable (built from layered
substitution automata, composed by Kronecker products) so that a
non-zero polynomial leaves a non-zero accept entry with high
probability, at matrix dimensions polynomial in the top fan-in.
"""

from .automata import (
    AutomatonSpec,
    LeveledAlphabet,
    PathExplosion,
    build_commutative_transform,
    build_one_pass,
    build_pattern_counter,
    build_remainder_nfa,
    build_small_degree,
    build_sparsify,
    build_step1,
    classify_paths,
    com_output_alphabet,
    dump_automaton,
    run_on_word,
    step1_scalar_names,
    wrap_with_returns,
)
from .circuit import (
    CircuitFileError,
    CircuitProfile,
    PlusRegularCircuit,
    build_power_circuit,
    dump_circuit,
    evaluate,
    expand,
    load_circuit,
    normalize_layers,
    parse_circuit,
    random_circuit,
    save_circuit,
    syntactic_degree,
    validate_plus_regular,
)
from .field import Field, FieldElement, MERSENNE61, SeededRng, make_prime_field, sample_uniform
from .matring import (
    Matrix,
    SubstMatrixFamily,
    compose_chain,
    compose_pair,
    decompose_affine,
    family_transform,
    kron,
    sequential_chain_outputs,
)
from .ncpoly import (
    CapExceeded,
    CPolynomial,
    NcPolynomial,
    VarSet,
    commutative_collapse,
    fmt_nc,
    is_ordered_power_sum,
    xi_pattern_decompose,
)
from .pit import (
    BlackBox,
    DegreeTooLarge,
    DepthMismatch,
    EvenDepth,
    FAST_FIELD,
    MissingDegreeHint,
    PipelinePlan,
    PitConfig,
    PitReport,
    al_baseline,
    blackbox_from_circuit,
    build_pipeline_plan,
    dlsz_scalarize,
    find_distinguishing_prime,
    pit_depth3,
    pit_depth5,
    pit_general,
    pit_oracle,
)

__version__ = "0.1.0"

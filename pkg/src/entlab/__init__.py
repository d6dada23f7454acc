"""entlab: redistribution cost pairs and side-information entanglement measures.

A numerical laboratory for finite-dimensional bipartite states: purify,
split the purifying system between sender and receiver side-information,
evaluate the redistribution cost pair (Q, E), and extremize it over
splittings and pure-state decompositions to bound squashed entanglement,
entanglement of formation, entanglement of assistance and the dual
"puffed" quantity.  All entropies are in bits, rates in qubits/ebits per
copy, and every randomized routine is deterministic in its seed.
"""

__version__ = "0.1.0"

from .errors import (
    CapError,
    DecompositionError,
    EntlabError,
    LayoutError,
    MCSError,
    ParamError,
    ParseError,
    PositivityError,
    ShapeError,
    UsageError,
    ValidationError,
)
from .states import (
    DensityOperator,
    PureState,
    SystemLayout,
    conditional_mutual_information,
    mutual_information,
    partial_trace,
    purify,
    subsystem_entropy,
    tensor_product,
    von_neumann_entropy,
)
from .random import haar_isometry, random_density, random_pure_state, random_separable
from .families import bell_state, classically_correlated, isotropic, state_family, werner
from .redistribution import (
    CostPair,
    FourPartyState,
    SplittingIsometry,
    cost_pair,
    embed_splitting,
    entanglement_balance,
    split_purification,
    splitting_from_extension,
    swap_sides,
    trivial_splitting,
)
from .optim import OptimizerConfig
from .measures import (
    Decomposition,
    MeasureReport,
    concurrence,
    decomposition_from_pointer,
    eoa_asymptotic,
    eoa_single,
    eof,
    flag_extension,
    puffed_lower,
    puffed_superadditivity_gap,
    puffed_superadditivity_witness,
    squashed_upper,
    wootters_eof,
)
from .mcs import (
    eof_via_mcs,
    mcs_cmi_identity,
    mcs_cost_pair,
    mcs_from_decomposition,
    mcs_splitting,
    mcs_state,
    pointer_splitting,
)
from .verify import CheckResult, identity_suite

__all__ = [name for name in dir() if not name.startswith("_")]

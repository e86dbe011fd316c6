"""Causal graphs from families of single-intervention distributions.

Graphs are bowless directed mixed graphs (arrows plus arcs, cycles
allowed); distributions are exact rational joint tables; derivations,
axiom checks, and theorem suites are all exact and deterministic.
"""

from .graph import (
    Bdmg,
    GraphClassification,
    Path,
    SeparationQuery,
    acyclify,
    classify,
    connecting_path,
    d_separated,
    find_pips,
    inseparable_pairs,
    m_separated,
    markov_equivalent,
    separated,
    sigma_separated,
    sigma_separated_oracle,
    squeeze_separation_holds,
)
from .dist import (
    CiReport,
    JointTable,
    MarkovReport,
    PartialOrder,
    check_property,
    markov_check,
    parse_rational,
    product_table,
    uniform_table,
)
from .scm import (
    AtomicKernelSet,
    Mechanism,
    NoiseComponent,
    Scm,
    atomic_to_family,
    intervene_standard,
    joint,
    standard_family,
    validate,
)
from .derive import (
    CausalDerivation,
    GraphSource,
    InterventionalFamily,
    PipAdjustment,
    TableSource,
    cause_relations,
    check_transitivity,
    derive,
    derive_variants,
    graph_from_observation,
    pip_adjust,
)
from .axioms import (
    AxiomReport,
    check_bivariate_quantifiable,
    check_compatible,
    check_congruent,
    check_edge_cause,
    check_observable,
    check_quantifiable,
    check_strongly_observable,
    reconstruct_P,
)
from .verify import (
    SuiteResult,
    oracle_family,
    random_bdmg,
    random_scm,
    run_suite,
)

__version__ = "0.1.0"

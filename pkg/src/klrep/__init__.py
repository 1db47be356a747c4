"""KL potential and second-law bookkeeping for block-invariant replication."""

from .info_metrics import (
    InvalidDistribution,
    SupportMismatch,
    bernoulli_kl,
    binary_entropy,
    channel_mutual_information,
    cross_entropy,
    kl_divergence,
    shannon_entropy,
)
from .kl_potential import (
    MassDrift,
    SteadySpec,
    StepProduction,
    TrajectoryRecord,
    cumulative_production,
    evolve,
    kl_block_decomposition,
    potential_V,
    step_production,
    to_physical_units,
)
from .markov_core import (
    BlockPartition,
    NonUniqueInvariant,
    StochasticKernel,
    ZeroBlockMass,
    apply_kernel,
    block_invariant_distribution,
    block_masses,
    check_block_invariance,
    conditional_distribution,
    is_primitive,
    iterate_kernel,
)

__version__ = "0.1.0"

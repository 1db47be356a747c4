"""KL potential against the reachable steady set and per-step production.

For a block-invariant kernel with a unique stationary law ``pi_j`` per block,

    V(p) = sum_j w_j(p0) * KL(p^(j) || pi_j)

is nonincreasing along ``p_{n+1} = p_n T``. Each step splits into the one-step
divergence ``D_n = KL(p_n || p_n T)`` and the potential drop ``dV_n``, and
their sum ``S_n`` is nonnegative.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field

import numpy as np

from .info_metrics import (
    LogBase,
    SupportMismatch,
    _cross_nats,
    _entropy_nats,
    _kl_nats,
    as_distribution,
    check_row_stochastic,
    kl_divergence,
    to_base,
)
from .markov_core import (
    BlockPartition,
    StochasticKernel,
    apply_kernel,
    block_invariant_distribution,
    block_kernel,
    block_masses,
    ZERO_MASS_TOL,
    ZeroBlockMass,
    check_block_invariance,
    conditional_distribution,
)

log = logging.getLogger(__name__)

BOLTZMANN = 1.380649e-23  # J/K, exact SI
MASS_TOL = 1e-9
IDENTITY_TOL = 1e-10


class MassDrift(ValueError):
    """Block masses moved away from the initial ones."""


@dataclass(frozen=True, eq=False)
class SteadySpec:
    partition: BlockPartition
    initial_masses: np.ndarray
    invariants: tuple[np.ndarray, ...]

    def __post_init__(self):
        w = np.asarray(self.initial_masses, dtype=np.float64)
        if w.shape != (self.partition.m,):
            raise ValueError("one initial mass per block required")
        if abs(w.sum() - 1.0) > 1e-12 or np.any(w < 0):
            raise ValueError(f"initial masses {w} are not a distribution")
        pis = tuple(as_distribution(pi) for pi in self.invariants)
        if len(pis) != self.partition.m:
            raise ValueError("one invariant per block required")
        for j, (b, pi) in enumerate(zip(self.partition.blocks, pis)):
            if pi.shape != (len(b),):
                raise ValueError(f"invariant {j} has wrong length")
        object.__setattr__(self, "initial_masses", w)
        object.__setattr__(self, "invariants", pis)

    @classmethod
    def from_kernel(cls, T, partition: BlockPartition, p0) -> "SteadySpec":
        """Masses of ``p0`` plus the stationary law of every block of ``T``."""
        pis = tuple(
            block_invariant_distribution(block_kernel(T, partition, j))
            for j in range(partition.m)
        )
        return cls(partition, block_masses(as_distribution(p0), partition), pis)

    def steady_mixture(self) -> np.ndarray:
        """The point ``sum_j w_j(p0) pi_j`` of the reachable steady set."""
        out = np.zeros(self.partition.size)
        for w, b, pi in zip(self.initial_masses, self.partition.blocks, self.invariants):
            out[list(b)] = w * pi
        return out


def _potential_nats(p: np.ndarray, spec: SteadySpec, idx, mass_tol: float) -> tuple[float, np.ndarray]:
    """V(p) in nats and the block masses, for a validated flat ``p``."""
    w = np.array([p[b].sum() for b in idx])
    drift = np.abs(w - spec.initial_masses).max()
    if drift > mass_tol:
        raise MassDrift(f"block masses {w} drifted from {spec.initial_masses} by {drift:.3e}")
    total = 0.0
    for j, (w0, pi) in enumerate(zip(spec.initial_masses, spec.invariants)):
        if w0 == 0:
            continue
        if w[j] <= ZERO_MASS_TOL:
            raise ZeroBlockMass(f"block {j} has mass {w[j]!r}")
        cond = p[idx[j]] / w[j]
        s = cond > 0
        if np.any(pi[s] == 0):
            raise SupportMismatch(f"block {j}: p is supported where its invariant is not")
        total += w0 * _kl_nats(cond, pi, s)
    return total, w


def _block_index(spec: SteadySpec) -> list[np.ndarray]:
    return [np.array(b, dtype=np.intp) for b in spec.partition.blocks]


def potential_V(p, spec: SteadySpec, base: LogBase = "nats", mass_tol: float = MASS_TOL) -> float:
    p = as_distribution(p).ravel()
    if p.shape != (spec.partition.size,):
        raise ValueError(f"distribution of length {p.size} vs partition of {spec.partition.size}")
    return float(to_base(_potential_nats(p, spec, _block_index(spec), mass_tol)[0], base))


@dataclass
class BlockDecomposition:
    within_terms: np.ndarray
    mass_mismatch: float
    total: float


def kl_block_decomposition(p, spec: SteadySpec) -> BlockDecomposition:
    """Split ``KL(p || sum_j w_j pi_j)`` into within-block and mass terms.

    ``spec.initial_masses`` plays the role of the mixture weights ``w_j``,
    which must all be positive.
    """
    p = as_distribution(p)
    w = spec.initial_masses
    if np.any(w <= 0):
        raise ValueError("mixture weights must be positive")
    wp = block_masses(p, spec.partition)
    within = np.zeros(spec.partition.m)
    mismatch = 0.0
    for j, pi in enumerate(spec.invariants):
        if wp[j] == 0:
            continue
        cond = conditional_distribution(p, spec.partition, j)
        within[j] = wp[j] * kl_divergence(cond, pi)
        mismatch += wp[j] * math.log(wp[j] / w[j])
    return BlockDecomposition(within, mismatch, float(within.sum() + mismatch))


@dataclass
class StepProduction:
    D_n: float
    delta_V_n: float
    S_n: float
    sigma_n: float | None = None  # joules, when a temperature was given
    infinite: bool = False


def step_production(p_n, T, spec: SteadySpec, temperature: float | None = None) -> StepProduction:
    """Production of one step ``p_n -> q_n = p_n T`` in nats.

    A kernel that empties part of the support of ``p_n`` gives ``D_n = +inf``;
    that step comes back with ``infinite=True`` instead of raising.
    """
    if not check_block_invariance(T, spec.partition):
        raise ValueError("step_production needs a block-invariant kernel")
    p_n = as_distribution(p_n)
    q = apply_kernel(p_n, T)
    dV = potential_V(p_n, spec) - potential_V(q, spec)
    try:
        D = kl_divergence(p_n, q)
    except SupportMismatch:
        return StepProduction(math.inf, dV, math.inf, math.inf if temperature else None, True)
    S = D + dV
    sigma = to_physical_units(S, temperature) if temperature is not None else None
    return StepProduction(D, dV, S, sigma)


def to_physical_units(S: float, temperature: float) -> float:
    """``k_B T S``: dimensionless production (nats) to joules."""
    if not temperature > 0:
        raise ValueError(f"temperature must be positive, got {temperature}")
    return BOLTZMANN * temperature * S


@dataclass
class TrajectoryRecord:
    """Per-step metrics of one run.

    ``V`` and ``masses`` have ``steps + 1`` entries (n = 0..N); the stepwise
    lists ``H_q``, ``H_cross``, ``D_kl`` have ``steps`` entries.
    """

    V: list[float] = field(default_factory=list)
    H_q: list[float] = field(default_factory=list)
    H_cross: list[float] = field(default_factory=list)
    D_kl: list[float] = field(default_factory=list)
    masses: list[np.ndarray] = field(default_factory=list)
    mass_defect: list[float] = field(default_factory=list)
    infinite: list[bool] = field(default_factory=list)
    error_rates: list[tuple[float, float]] | None = None
    base: LogBase = "nats"
    meta: dict = field(default_factory=dict)

    @property
    def steps(self) -> int:
        return len(self.D_kl)

    @property
    def dV(self) -> list[float]:
        return [self.V[n] - self.V[n + 1] for n in range(self.steps)]

    @property
    def S(self) -> list[float]:
        return [d + dv for d, dv in zip(self.D_kl, self.dV)]

    def converted(self, base: LogBase) -> "TrajectoryRecord":
        """Copy with every information quantity expressed in ``base``."""
        if base == self.base:
            return self
        factor = math.log(2.0) if base == "nats" else 1.0 / math.log(2.0)
        scale = lambda xs: [x * factor for x in xs]  # noqa: E731
        return TrajectoryRecord(
            V=scale(self.V), H_q=scale(self.H_q), H_cross=scale(self.H_cross),
            D_kl=scale(self.D_kl), masses=self.masses, mass_defect=self.mass_defect,
            infinite=self.infinite, error_rates=self.error_rates, base=base, meta=self.meta,
        )


def evolve(p0, T, spec: SteadySpec, steps: int, base: LogBase = "nats") -> TrajectoryRecord:
    """Iterate ``p_{n+1} = p_n T`` and record every metric.

    Recording order per step: V(p_n) first, then (for n < N) the quantities
    of q_n = p_n T, then p_{n+1} = q_n.
    """
    if steps < 0:
        raise ValueError("steps must be >= 0")
    # validate once; the loop below runs on plain arrays
    M = T.matrix if isinstance(T, StochasticKernel) else check_row_stochastic(T)
    p = as_distribution(p0).ravel()
    if M.shape != (p.size, p.size) or p.size != spec.partition.size:
        raise ValueError(f"distribution of length {p.size} vs kernel {M.shape}")
    idx = _block_index(spec)
    conv = lambda x: float(to_base(x, base))  # noqa: E731
    rec = TrajectoryRecord(base=base)
    for n in range(steps + 1):
        v, w = _potential_nats(p, spec, idx, MASS_TOL)
        rec.V.append(conv(v))
        rec.masses.append(w)
        if n == steps:
            break
        q = p @ M
        total = q.sum()
        defect = abs(total - 1.0)
        if defect > 1e-10:
            log.warning("step %d: mass defect %.3e before renormalization", n, defect)
        q = q / total
        rec.H_q.append(conv(_entropy_nats(q)))
        rec.mass_defect.append(float(defect))
        s = p > 0
        if np.any(q[s] == 0):
            rec.H_cross.append(math.inf)
            rec.D_kl.append(math.inf)
            rec.infinite.append(True)
        else:
            rec.H_cross.append(conv(_cross_nats(p, q, s)))
            rec.D_kl.append(conv(_kl_nats(p, q, s)))
            rec.infinite.append(False)
        p = q
    return rec


def cumulative_production(trace: TrajectoryRecord, tol: float = IDENTITY_TOL) -> float:
    """Total production ``sum_n S_n`` over the recorded steps.

    The telescoped form ``sum_n D_n + V(p_0) - V(p_N)`` is evaluated as well
    and must agree to ``tol``.
    """
    if trace.steps == 0:
        return 0.0
    total = math.fsum(trace.S)
    if math.isinf(total):
        return total
    telescoped = math.fsum(trace.D_kl) + trace.V[0] - trace.V[trace.steps]
    if not abs(total - telescoped) <= tol:
        raise ArithmeticError(f"sum S_n = {total!r} but telescoped form = {telescoped!r}")
    return total

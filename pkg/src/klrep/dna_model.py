"""Four-state substitution process with a proofreading channel.

States are ordered (A, T, C, G); the AT and CG pairs form the two blocks.
One step applies the base substitution kernel with probability ``1 - rho`` and
the proofreading kernel with probability ``rho``, which mixes the rates
blockwise.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass, fields, replace

import numpy as np

from .info_metrics import (
    LogBase,
    bernoulli_kl,
    channel_mutual_information,
)
from .kl_potential import SteadySpec, TrajectoryRecord, evolve
from .markov_core import (
    BlockPartition,
    StochasticKernel,
    ZeroBlockMass,
    apply_kernel,
    block_masses,
)

STATES = ("A", "T", "C", "G")
DNA_PARTITION = BlockPartition(((0, 1), (2, 3)))

_RATE_FIELDS = ("alpha", "beta", "gamma", "delta", "alpha_p", "beta_p", "gamma_p", "delta_p")


@dataclass(frozen=True)
class DnaParams:
    alpha: float = 0.020
    beta: float = 0.010
    gamma: float = 0.015
    delta: float = 0.015
    alpha_p: float = 0.005
    beta_p: float = 0.003
    gamma_p: float = 0.004
    delta_p: float = 0.004
    rho: float = 0.30

    def __post_init__(self):
        for name in _RATE_FIELDS:
            v = getattr(self, name)
            if not (isinstance(v, (int, float)) and 0.0 < v < 1.0):
                raise ValueError(f"{name}={v!r} must lie strictly inside (0, 1)")
        if not (isinstance(self.rho, (int, float)) and 0.0 <= self.rho <= 1.0):
            raise ValueError(f"rho={self.rho!r} must lie in [0, 1]")

    @classmethod
    def field_names(cls) -> tuple[str, ...]:
        return tuple(f.name for f in fields(cls))

    def with_updates(self, **kw) -> "DnaParams":
        return replace(self, **kw)

    def as_dict(self) -> dict:
        return asdict(self)


FIG2_PARAMS = DnaParams()
# landscape preset: same AT block, asymmetric GC rates
FIG3_PARAMS = DnaParams(gamma=0.014, delta=0.021, gamma_p=0.004, delta_p=0.006)
FIG2_P0 = (0.6, 0.1, 0.2, 0.1)

PRESETS = {"fig2": FIG2_PARAMS, "fig3": FIG3_PARAMS}


def effective_rates(params: DnaParams) -> tuple[float, float, float, float]:
    r = params.rho
    return (
        (1 - r) * params.alpha + r * params.alpha_p,
        (1 - r) * params.beta + r * params.beta_p,
        (1 - r) * params.gamma + r * params.gamma_p,
        (1 - r) * params.delta + r * params.delta_p,
    )


def _two_block(a: float, b: float, c: float, d: float) -> np.ndarray:
    M = np.zeros((4, 4))
    M[:2, :2] = [[1 - a, a], [b, 1 - b]]
    M[2:, 2:] = [[1 - c, c], [d, 1 - d]]
    return M


def effective_kernel(params: DnaParams) -> StochasticKernel:
    return StochasticKernel(_two_block(*effective_rates(params)), DNA_PARTITION)


def dna_invariants(params: DnaParams) -> tuple[np.ndarray, np.ndarray]:
    ae, be, ge, de = effective_rates(params)
    return (
        np.array([be / (ae + be), ae / (ae + be)]),
        np.array([de / (ge + de), ge / (ge + de)]),
    )


def steady_spec(params: DnaParams, p0) -> SteadySpec:
    p0 = np.asarray(p0, dtype=np.float64)
    return SteadySpec(DNA_PARTITION, block_masses(p0, DNA_PARTITION), dna_invariants(params))


def simulate_timeseries(
    params: DnaParams = FIG2_PARAMS,
    p0=FIG2_P0,
    steps: int = 50,
    base: LogBase = "nats",
) -> TrajectoryRecord:
    p0 = np.asarray(p0, dtype=np.float64)
    p0 = p0 / p0.sum()
    T = effective_kernel(params)
    rec = evolve(p0, T, steady_spec(params, p0), steps, base)
    # replay the distributions for the coarse error rates; cheap at 4 states
    rec.error_rates = []
    p = p0
    for _ in range(steps):
        rec.error_rates.append(block_error_rates(p, T))
        p = apply_kernel(p, T)
    pi1, pi2 = dna_invariants(params)
    rec.meta.update(
        params=params.as_dict(),
        p0=p0.tolist(),
        pi1=pi1.tolist(),
        pi2=pi2.tolist(),
        effective_rates=list(effective_rates(params)),
    )
    return rec


def block_error_rates(p, T) -> tuple[float, float]:
    """Probability of leaving the AT block (e_AT) and the CG block (e_GC)."""
    M = T.matrix if isinstance(T, StochasticKernel) else np.asarray(T, dtype=np.float64)
    p = np.asarray(p, dtype=np.float64)
    rates = []
    for src, dst in (((0, 1), (2, 3)), ((2, 3), (0, 1))):
        w = p[list(src)].sum()
        if w <= 1e-300:
            raise ZeroBlockMass(f"block {''.join(STATES[i] for i in src)} has zero mass")
        rates.append(float(sum(p[x] / w * M[x, list(dst)].sum() for x in src)))
    return rates[0], rates[1]


@dataclass(frozen=True)
class CoarseChannel:
    e_AT: float
    e_GC: float
    weights: tuple[float, float] = (0.5, 0.5)

    def __post_init__(self):
        for name in ("e_AT", "e_GC"):
            v = getattr(self, name)
            if not 0.0 <= v <= 1.0:
                raise ValueError(f"{name}={v} outside [0, 1]")

    @property
    def matrix(self) -> np.ndarray:
        return np.array([[1 - self.e_AT, self.e_AT], [self.e_GC, 1 - self.e_GC]])


def coarse_mutual_information(channel: CoarseChannel) -> float:
    """Block-level (AT vs GC) mutual information in bits."""
    return channel_mutual_information(channel.weights, channel.matrix)


@dataclass
class LandscapeGrid:
    xs: np.ndarray
    ys: np.ndarray
    values: np.ndarray  # values[iy, ix] = V(xs[ix], ys[iy]), nats
    x_star: float
    y_star: float
    weights: tuple[float, float]

    @property
    def grid_size(self) -> int:
        return len(self.xs)

    def nearest_node(self) -> tuple[int, int]:
        """(ix, iy) of the grid node closest to the analytic minimum."""
        return (
            int(np.argmin(np.abs(self.xs - self.x_star))),
            int(np.argmin(np.abs(self.ys - self.y_star))),
        )


def potential_landscape(
    params: DnaParams = FIG3_PARAMS,
    weights: tuple[float, float] = (0.5, 0.5),
    grid_size: int = 101,
) -> LandscapeGrid:
    """V on the uniform grid over [0,1]^2 of (A fraction in AT, C fraction in CG)."""
    if grid_size < 2:
        raise ValueError("grid_size must be >= 2")
    w1, w2 = weights
    if min(w1, w2) < 0 or abs(w1 + w2 - 1) > 1e-12:
        raise ValueError(f"weights {weights} are not a distribution")
    pi1, pi2 = dna_invariants(params)
    xs = np.linspace(0.0, 1.0, grid_size)
    ys = np.linspace(0.0, 1.0, grid_size)
    # separable: evaluate each axis once, combine by broadcasting
    vx = w1 * bernoulli_kl(xs, pi1[0])
    vy = w2 * bernoulli_kl(ys, pi2[0])
    values = vy[:, None] + vx[None, :]
    return LandscapeGrid(xs, ys, values, float(pi1[0]), float(pi2[0]), (w1, w2))


def curvature_coefficients(grid: LandscapeGrid) -> tuple[float, float]:
    """Quadratic coefficients of V around the minimum, per axis.

    Five-point central second difference at the node nearest the minimum;
    the coefficient is half the second derivative.
    """
    ix, iy = grid.nearest_node()
    out = []
    for line, i, axis in ((grid.values[iy, :], ix, grid.xs), (grid.values[:, ix], iy, grid.ys)):
        if i < 2 or i > len(line) - 3:
            raise ValueError("minimum too close to the grid edge for a 5-point stencil")
        h = axis[1] - axis[0]
        f = line[i - 2 : i + 3]
        d2 = (-f[0] + 16 * f[1] - 30 * f[2] + 16 * f[3] - f[4]) / (12 * h * h)
        out.append(0.5 * d2)
    return out[0], out[1]


def implied_affinity(base_ratio: float, proofread_ratio: float) -> float:
    """``dmu / kT`` such that proofread_ratio = base_ratio * exp(dmu / kT)."""
    if not (base_ratio > 0 and proofread_ratio > 0):
        raise ValueError("rate ratios must be positive")
    return math.log(proofread_ratio / base_ratio)

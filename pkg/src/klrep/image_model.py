"""Image copying as repeated Gaussian blur of a pixel pmf.

The pmf lives on the pixel grid. A step is a separable Gaussian blur with
half-sample symmetric ("reflect") boundaries, either over the whole image
(ergodic) or independently inside each tile of a regular tiling
(blockwise). The blockwise map never moves mass between tiles. All
information measures here are in bits.
"""

from __future__ import annotations

import logging
import math
import warnings
from dataclasses import dataclass, field
from typing import Literal

import numpy as np

from .info_metrics import (
    SupportMismatch,
    as_distribution,
    cross_entropy,
    kl_divergence,
    shannon_entropy,
)
from .kl_potential import TrajectoryRecord

log = logging.getLogger(__name__)

Mode = Literal["ergodic", "blockwise"]
PMF_TOL = 1e-12


@dataclass(frozen=True)
class BlockGrid:
    bx: int = 4  # tiles along x (columns)
    by: int = 4  # tiles along y (rows)

    def __post_init__(self):
        if self.bx < 1 or self.by < 1:
            raise ValueError("block counts must be positive")

    def tile_shape(self, shape: tuple[int, int]) -> tuple[int, int]:
        h, w = shape
        if h % self.by or w % self.bx:
            raise ValueError(
                f"image {w}x{h} is not divisible into {self.bx}x{self.by} tiles"
            )
        return h // self.by, w // self.bx

    def tiles(self, shape: tuple[int, int]) -> list[tuple[int, int, slice, slice]]:
        """``(i, j, rows, cols)`` for every tile, row-major; ``i`` is the tile row."""
        th, tw = self.tile_shape(shape)
        return [
            (i, j, slice(i * th, (i + 1) * th), slice(j * tw, (j + 1) * tw))
            for i in range(self.by)
            for j in range(self.bx)
        ]

    def masses(self, p: np.ndarray) -> np.ndarray:
        return np.array([p[r, c].sum() for _, _, r, c in self.tiles(p.shape)])


@dataclass
class ImageConfig:
    width: int = 256
    height: int = 256
    sigma: float = 1.5
    steps: int = 50
    blocks: tuple[int, int] = (4, 4)
    p_even: float = 0.8
    p_odd: float = 0.2
    seed: int = 7
    mode: Mode = "blockwise"
    snapshots: tuple[int, ...] = (0, 10, 20, 30, 40, 50)
    truncate: float = 4.0

    def __post_init__(self):
        self.blocks = tuple(int(b) for b in self.blocks)
        self.snapshots = tuple(int(s) for s in self.snapshots)
        if not self.sigma > 0:
            raise ValueError(f"sigma={self.sigma} must be positive")
        if self.steps < 0:
            raise ValueError(f"steps={self.steps} must be >= 0")
        if self.mode not in ("ergodic", "blockwise"):
            raise ValueError(f"mode={self.mode!r}; expected 'ergodic' or 'blockwise'")
        for name in ("p_even", "p_odd"):
            if not 0.0 <= getattr(self, name) <= 1.0:
                raise ValueError(f"{name} must lie in [0, 1]")
        self.block_grid.tile_shape((self.height, self.width))

    @property
    def block_grid(self) -> BlockGrid:
        return BlockGrid(*self.blocks)


def gaussian_kernel_1d(sigma: float, truncate: float = 4.0) -> np.ndarray:
    """Sampled Gaussian on ``|u| <= ceil(truncate * sigma)``, summing to one."""
    if not sigma > 0:
        raise ValueError(f"sigma must be positive, got {sigma}")
    radius = max(int(math.ceil(truncate * sigma)), 0)
    u = np.arange(-radius, radius + 1, dtype=np.float64)
    w = np.exp(-(u * u) / (2.0 * sigma * sigma))
    return w / w.sum()


def _blur_axis(a: np.ndarray, weights: np.ndarray, axis: int) -> np.ndarray:
    r = len(weights) // 2
    pad = [(0, 0), (0, 0)]
    pad[axis] = (r, r)
    # numpy "symmetric" is the half-sample reflection d c b a | a b c d | d c b a
    ext = np.pad(a, pad, mode="symmetric")
    n = a.shape[axis]
    out = np.zeros_like(a)
    for k, wk in enumerate(weights):
        sl = [slice(None), slice(None)]
        sl[axis] = slice(k, k + n)
        out += wk * ext[tuple(sl)]
    return out


def _blur_raw(p: np.ndarray, weights: np.ndarray) -> np.ndarray:
    return _blur_axis(_blur_axis(p, weights, 0), weights, 1)


def _check_pmf(p) -> np.ndarray:
    p = np.asarray(p, dtype=np.float64)
    if p.ndim != 2:
        raise ValueError(f"expected a 2D pmf, got shape {p.shape}")
    as_distribution(p, atol=PMF_TOL)
    return p


def blur_global(p, sigma: float, truncate: float = 4.0, return_defect: bool = False):
    p = _check_pmf(p)
    q = _blur_raw(p, gaussian_kernel_1d(sigma, truncate))
    total = q.sum()
    q /= total
    return (q, abs(total - 1.0)) if return_defect else q


def blur_blockwise(
    p, sigma: float, blocks: BlockGrid, truncate: float = 4.0, return_defect: bool = False
):
    """Blur every tile on its own, reflecting at tile edges."""
    p = _check_pmf(p)
    w = gaussian_kernel_1d(sigma, truncate)
    q = np.empty_like(p)
    for _, _, rows, cols in blocks.tiles(p.shape):
        q[rows, cols] = _blur_raw(p[rows, cols], w)
    total = q.sum()
    q /= total
    return (q, abs(total - 1.0)) if return_defect else q


def check_sigma(sigma: float, tile_shape: tuple[int, int]) -> bool:
    """Warn when the blur is wide compared to the tile; True if it is fine."""
    edge = min(tile_shape)
    if sigma > edge / 4:
        msg = f"sigma={sigma} exceeds a quarter of the smallest tile edge ({edge} px); boundary effects may dominate"
        warnings.warn(msg, UserWarning, stacklevel=2)
        return False
    return True


def init_checkerboard(config: ImageConfig) -> np.ndarray:
    """Binary Bernoulli image with checkerboard tile probabilities, as a pmf.

    Tiles with even ``i + j`` use ``p_even``, odd ones ``p_odd``. Pixels are
    drawn from numpy's PCG64 generator seeded with ``config.seed``.
    """
    shape = (config.height, config.width)
    prob = np.empty(shape)
    for i, j, rows, cols in config.block_grid.tiles(shape):
        prob[rows, cols] = config.p_even if (i + j) % 2 == 0 else config.p_odd
    rng = np.random.Generator(np.random.PCG64(config.seed))
    img = (rng.random(shape) < prob).astype(np.float64)
    total = img.sum()
    if total == 0:
        raise ValueError("initial image has zero total mass")
    return img / total


def image_potential(p, mode: Mode = "blockwise", blocks: BlockGrid | None = None) -> float:
    """Distance in bits from the reachable uniform steady state.

    Ergodic: ``KL(p || u)`` against the global uniform pmf. Blockwise:
    ``sum_b w_b KL(p_b || u_b)`` over tiles, with ``p_b`` the renormalized
    tile and ``u_b`` uniform on it.
    """
    p = _check_pmf(p)
    if mode == "ergodic":
        return kl_divergence(p, np.full(p.shape, 1.0 / p.size), "bits")
    if mode != "blockwise":
        raise ValueError(f"unknown mode {mode!r}")
    blocks = blocks or BlockGrid()
    if blocks.bx == blocks.by == 1:
        # one tile holds all the mass; same formula as ergodic, same rounding
        return image_potential(p, "ergodic")
    total = 0.0
    for _, _, rows, cols in blocks.tiles(p.shape):
        tile = p[rows, cols]
        wb = tile.sum()
        if wb == 0:
            continue
        total += wb * kl_divergence(tile / wb, np.full(tile.shape, 1.0 / tile.size), "bits")
    return total


@dataclass
class ImageRun:
    record: TrajectoryRecord
    snapshots: dict[int, np.ndarray] = field(default_factory=dict)


def simulate_image(config: ImageConfig) -> ImageRun:
    blocks = config.block_grid if config.mode == "blockwise" else BlockGrid(1, 1)
    shape = (config.height, config.width)
    check_sigma(config.sigma, blocks.tile_shape(shape))
    tiles = config.block_grid
    p = init_checkerboard(config)
    rec = TrajectoryRecord(base="bits")
    rec.meta.update(config=config.__dict__.copy())
    run = ImageRun(rec)
    wanted = set(config.snapshots)
    for n in range(config.steps + 1):
        rec.V.append(image_potential(p, config.mode, blocks))
        rec.masses.append(tiles.masses(p))
        if n in wanted:
            run.snapshots[n] = p.copy()
        if n == config.steps:
            break
        q, defect = blur_blockwise(p, config.sigma, blocks, config.truncate, return_defect=True)
        if defect > 1e-10:
            log.warning("step %d: mass defect %.3e before renormalization", n, defect)
        rec.mass_defect.append(defect)
        rec.H_q.append(shannon_entropy(q, "bits"))
        try:
            rec.H_cross.append(cross_entropy(p, q, "bits"))
            rec.D_kl.append(kl_divergence(p, q, "bits"))
            rec.infinite.append(False)
        except SupportMismatch:
            rec.H_cross.append(math.inf)
            rec.D_kl.append(math.inf)
            rec.infinite.append(True)
        p = q
    return run

"""Finite Markov kernels with a block structure.

Distributions are row vectors and kernels act on the right: ``(pT)(y) =
sum_x p(x) T(x, y)``. A kernel is block invariant for a partition when no row
puts mass outside its own block.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .info_metrics import as_distribution, check_row_stochastic

log = logging.getLogger(__name__)

BLOCK_TOL = 1e-14
ZERO_MASS_TOL = 1e-300
STATIONARY_TOL = 1e-12
LU_MAX_SIZE = 64


class ZeroBlockMass(ValueError):
    pass


class NonUniqueInvariant(ValueError):
    pass


@dataclass(frozen=True)
class BlockPartition:
    blocks: tuple[tuple[int, ...], ...]

    def __post_init__(self):
        blocks = tuple(tuple(int(i) for i in b) for b in self.blocks)
        object.__setattr__(self, "blocks", blocks)
        if not blocks:
            raise ValueError("partition needs at least one block")
        seen: set[int] = set()
        for j, b in enumerate(blocks):
            if not b:
                raise ValueError(f"block {j} is empty")
            overlap = seen.intersection(b)
            if overlap or len(set(b)) != len(b):
                raise ValueError(f"block {j} overlaps another block: {sorted(overlap)}")
            seen.update(b)
        if seen != set(range(len(seen))):
            raise ValueError("blocks must cover 0..S-1 exactly")

    @classmethod
    def from_sizes(cls, sizes: Sequence[int]) -> "BlockPartition":
        """Contiguous blocks, e.g. ``(2, 2)`` gives ``{0,1} | {2,3}``."""
        edges = np.cumsum([0, *sizes])
        return cls(tuple(tuple(range(a, b)) for a, b in zip(edges[:-1], edges[1:])))

    @property
    def size(self) -> int:
        return sum(len(b) for b in self.blocks)

    @property
    def m(self) -> int:
        return len(self.blocks)

    def labels(self) -> np.ndarray:
        """Block index of every state."""
        out = np.empty(self.size, dtype=int)
        for j, b in enumerate(self.blocks):
            out[list(b)] = j
        return out


@dataclass(frozen=True, eq=False)
class StochasticKernel:
    """Row-stochastic square matrix, optionally tied to a partition.

    When a partition is given the kernel must be block invariant for it.
    """

    matrix: np.ndarray
    partition: BlockPartition | None = None

    def __post_init__(self):
        m = check_row_stochastic(self.matrix).copy()
        m.setflags(write=False)
        object.__setattr__(self, "matrix", m)
        if self.partition is not None:
            if self.partition.size != m.shape[0]:
                raise ValueError("partition size does not match kernel")
            if not check_block_invariance(m, self.partition):
                raise ValueError("kernel is not block invariant for its partition")

    @property
    def size(self) -> int:
        return self.matrix.shape[0]

    def block(self, j: int) -> np.ndarray:
        if self.partition is None:
            raise ValueError("kernel has no partition")
        return block_kernel(self.matrix, self.partition, j)


def _matrix(T) -> np.ndarray:
    if isinstance(T, StochasticKernel):
        return T.matrix
    return check_row_stochastic(T)


def apply_kernel(p, T, return_defect: bool = False):
    """One step ``p -> pT``, renormalized to sum exactly to one.

    With ``return_defect`` the pre-normalization ``|sum(pT) - 1|`` is
    returned as well.
    """
    p = as_distribution(p)
    M = _matrix(T)
    if p.shape != (M.shape[0],):
        raise ValueError(f"distribution of length {p.shape} vs kernel {M.shape}")
    q = p @ M
    total = q.sum()
    defect = abs(total - 1.0)
    if defect > 1e-10:
        log.warning("apply_kernel: mass defect %.3e before renormalization", defect)
    q = q / total
    if return_defect:
        return q, float(defect)
    return q


def iterate_kernel(p0, T, steps: int) -> np.ndarray:
    """``p0 T^steps`` by repeated single steps, renormalizing each one."""
    if steps < 0:
        raise ValueError("steps must be >= 0")
    p = as_distribution(p0)
    M = _matrix(T)
    if p.shape != (M.shape[0],):
        raise ValueError(f"distribution of length {p.shape} vs kernel {M.shape}")
    for _ in range(steps):
        q = p @ M
        p = q / q.sum()
    return p


def check_block_invariance(T, part: BlockPartition, tol: float = BLOCK_TOL) -> bool:
    M = T.matrix if isinstance(T, StochasticKernel) else np.asarray(T, dtype=np.float64)
    if M.shape != (part.size, part.size):
        raise ValueError("kernel and partition dimensions differ")
    lab = part.labels()
    cross = lab[:, None] != lab[None, :]
    return bool(np.all(np.abs(M[cross]) <= tol))


def block_masses(p, part: BlockPartition) -> np.ndarray:
    p = np.asarray(p, dtype=np.float64)
    return np.array([p[list(b)].sum() for b in part.blocks])


def conditional_distribution(p, part: BlockPartition, j: int) -> np.ndarray:
    """Restriction of ``p`` to block ``j``, renormalized (length ``|block j|``)."""
    p = np.asarray(p, dtype=np.float64)
    sub = p[list(part.blocks[j])]
    w = sub.sum()
    if w <= ZERO_MASS_TOL:
        raise ZeroBlockMass(f"block {j} has mass {w!r}")
    return sub / w


def block_kernel(T, part: BlockPartition, j: int) -> np.ndarray:
    M = _matrix(T)
    idx = list(part.blocks[j])
    return M[np.ix_(idx, idx)].copy()


def block_invariant_distribution(Tj) -> np.ndarray:
    """Unique stationary law ``pi`` with ``pi Tj = pi``.

    2x2 blocks use the closed form ``(b, a)/(a+b)`` for ``[[1-a, a], [b, 1-b]]``.
    Up to 64 states a dense solve of ``(Tj^T - I) pi = 0`` with a
    normalization row; larger blocks fall back to power iteration.
    """
    M = _matrix(Tj)
    s = M.shape[0]
    if s == 1:
        return np.ones(1)
    if s == 2:
        a, b = M[0, 1], M[1, 0]
        if a + b <= 0:
            raise NonUniqueInvariant("2x2 block with no transitions; every law is stationary")
        return np.array([b / (a + b), a / (a + b)])
    if s <= LU_MAX_SIZE:
        A = M.T - np.eye(s)
        if np.linalg.matrix_rank(A) < s - 1:
            raise NonUniqueInvariant("block kernel is reducible: stationary law not unique")
        A[-1, :] = 1.0
        rhs = np.zeros(s)
        rhs[-1] = 1.0
        pi = np.linalg.solve(A, rhs)
    else:
        pi = _power_iteration(M)
    pi = np.clip(pi, 0.0, None)
    pi /= pi.sum()
    resid = np.abs(pi @ M - pi).sum()
    if resid > STATIONARY_TOL:
        raise NonUniqueInvariant(f"stationary residual {resid:.3e} too large")
    return pi


def _power_iteration(M: np.ndarray, tol: float = 1e-13, max_iter: int = 10**6) -> np.ndarray:
    pi = np.full(M.shape[0], 1.0 / M.shape[0])
    # lazy chain: same stationary law, no periodic oscillation
    L = 0.5 * (M + np.eye(M.shape[0]))
    for _ in range(max_iter):
        nxt = pi @ L
        nxt /= nxt.sum()
        if np.abs(nxt - pi).sum() < tol:
            return nxt
        pi = nxt
    raise NonUniqueInvariant("power iteration did not converge")


def is_primitive(Tj) -> bool:
    """Some power ``Tj^k`` with ``k <= (s-1)^2 + 1`` is strictly positive."""
    M = _matrix(Tj)
    s = M.shape[0]
    pattern = (M > 0).astype(np.int64)
    power = pattern.copy()
    for _ in range((s - 1) ** 2 + 1):
        if np.all(power > 0):
            return True
        power = ((power @ pattern) > 0).astype(np.int64)
    return False

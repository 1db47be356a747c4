"""Information functionals on finite distributions.

Conventions: a term with ``p(a) = 0`` contributes nothing, and ``p(a) > 0``
against ``q(a) = 0`` raises :class:`SupportMismatch` instead of returning an
IEEE infinity. Every functional takes ``base="nats"`` or ``base="bits"``.
Arrays of any shape are accepted and treated as flat distributions, so image
pmfs go through the same code as 4-state DNA vectors.
"""

from __future__ import annotations

import math
from typing import Literal

import numpy as np

LogBase = Literal["nats", "bits"]

SUM_TOL = 1e-12
BERNOULLI_EPS = 1e-12


class InvalidDistribution(ValueError):
    pass


class SupportMismatch(ValueError):
    """``p(a) > 0`` where ``q(a) = 0``; the divergence is +inf."""


def to_base(value_nats, base: LogBase = "nats"):
    if base == "nats":
        return value_nats
    if base == "bits":
        return value_nats / math.log(2.0)
    raise ValueError(f"unknown log base {base!r}; expected 'nats' or 'bits'")


def as_distribution(p, atol: float = SUM_TOL) -> np.ndarray:
    """Validate ``p`` as a probability vector and return it as float64."""
    arr = np.asarray(p, dtype=np.float64)
    if arr.size == 0:
        raise InvalidDistribution("empty distribution")
    if not np.all(np.isfinite(arr)):
        raise InvalidDistribution("distribution has non-finite entries")
    if np.any(arr < 0):
        raise InvalidDistribution(f"negative probability {arr.min()!r}")
    total = arr.sum()
    if abs(total - 1.0) > atol:
        raise InvalidDistribution(f"probabilities sum to {total!r}, not 1")
    return arr


def _pair(p, q) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    p = as_distribution(p).ravel()
    q = as_distribution(q).ravel()
    if p.shape != q.shape:
        raise ValueError(f"shape mismatch {p.shape} vs {q.shape}")
    support = p > 0
    if np.any(q[support] == 0):
        bad = int(np.flatnonzero(support & (q == 0))[0])
        raise SupportMismatch(f"p[{bad}] > 0 but q[{bad}] = 0")
    return p, q, support


# Unchecked kernels on flat float64 arrays. Hot loops validate once and
# call these directly; the public functions below add the checks.


def _entropy_nats(p: np.ndarray) -> float:
    nz = p[p > 0]
    return float(-(nz * np.log(nz)).sum())


def _cross_nats(p: np.ndarray, q: np.ndarray, s: np.ndarray) -> float:
    return float(-(p[s] * np.log(q[s])).sum())


def _kl_nats(p: np.ndarray, q: np.ndarray, s: np.ndarray) -> float:
    ps, qs = p[s], q[s]
    return max(float((ps * (np.log(ps) - np.log(qs))).sum()), 0.0)


def shannon_entropy(p, base: LogBase = "nats") -> float:
    return float(to_base(_entropy_nats(as_distribution(p).ravel()), base))


def cross_entropy(p, q, base: LogBase = "nats") -> float:
    return float(to_base(_cross_nats(*_pair(p, q)), base))


def kl_divergence(p, q, base: LogBase = "nats") -> float:
    """Relative entropy ``sum p log(p/q)``.

    Raises SupportMismatch when ``q`` misses part of the support of ``p``.
    Rounding below zero is clamped to 0.
    """
    return float(to_base(_kl_nats(*_pair(p, q)), base))


def bernoulli_kl(p, q, eps: float = BERNOULLI_EPS):
    """KL in nats between ``[p, 1-p]`` and ``[q, 1-q]``.

    Both arguments are clipped into ``[eps, 1-eps]`` first, so the closed
    unit square is safe. Works elementwise on arrays.
    """
    p = np.clip(np.asarray(p, dtype=np.float64), eps, 1.0 - eps)
    q = np.clip(np.asarray(q, dtype=np.float64), eps, 1.0 - eps)
    out = p * np.log(p / q) + (1.0 - p) * np.log((1.0 - p) / (1.0 - q))
    return float(out) if out.ndim == 0 else out


def binary_entropy(eps: float) -> float:
    """Binary entropy function in bits."""
    eps = float(eps)
    if not 0.0 <= eps <= 1.0:
        raise ValueError(f"binary_entropy needs 0 <= eps <= 1, got {eps}")
    if eps == 0.0 or eps == 1.0:
        return 0.0
    return -eps * math.log2(eps) - (1.0 - eps) * math.log2(1.0 - eps)


def check_row_stochastic(matrix, atol: float = SUM_TOL) -> np.ndarray:
    m = np.asarray(matrix, dtype=np.float64)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {m.shape}")
    if not np.all(np.isfinite(m)) or np.any(m < 0):
        raise ValueError("stochastic matrix has negative or non-finite entries")
    dev = np.abs(m.sum(axis=1) - 1.0)
    if np.any(dev > atol):
        row = int(np.argmax(dev))
        raise ValueError(f"row {row} sums to {m[row].sum()!r}, not 1")
    return m


def channel_mutual_information(weights, channel) -> float:
    """Mutual information (bits) between the input and output of ``channel``.

    ``channel[x, y]`` is P(y | x) and ``weights`` the input law.
    """
    w = as_distribution(weights)
    P = check_row_stochastic(channel)
    if P.shape[0] != w.shape[0]:
        raise ValueError("weights and channel sizes differ")
    out = w @ P
    total = 0.0
    for x in range(P.shape[0]):
        for y in range(P.shape[1]):
            if w[x] > 0 and P[x, y] > 0:
                total += w[x] * P[x, y] * math.log2(P[x, y] / out[y])
    return max(total, 0.0)

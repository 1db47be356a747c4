import math

import numpy as np
import pytest

from klrep.info_metrics import (
    InvalidDistribution,
    SupportMismatch,
    bernoulli_kl,
    binary_entropy,
    channel_mutual_information,
    cross_entropy,
    kl_divergence,
    shannon_entropy,
)

# Frozen reference values: 50-digit mpmath evaluation of the defining sums,
# joint-pmf enumeration for mutual information.
H_0612 = 1.0888999753452236216
XENT_73_64 = 0.63246515619843999780
KL_75_50 = 0.13081203594113695913
KL_338_600 = 0.13954355705501823533
HB_02 = 0.72192809488736234787
MI_70_02_03 = 0.72999131914645941701


def test_entropy_uniform_and_point_mass():
    assert shannon_entropy([0.25] * 4) == pytest.approx(math.log(4), abs=1e-15)
    assert shannon_entropy([1, 0, 0, 0]) == 0.0


def test_entropy_against_oracle():
    assert abs(shannon_entropy([0.6, 0.1, 0.2, 0.1]) - H_0612) < 1e-12


def test_entropy_bits():
    assert shannon_entropy([0.25] * 4, "bits") == pytest.approx(2.0, abs=1e-15)


def test_cross_entropy_examples():
    assert cross_entropy([0.5, 0.5], [0.5, 0.5]) == pytest.approx(math.log(2), abs=1e-15)
    assert cross_entropy([1, 0], [0.5, 0.5]) == pytest.approx(math.log(2), abs=1e-15)
    assert abs(cross_entropy([0.7, 0.3], [0.6, 0.4]) - XENT_73_64) < 1e-12


def test_cross_entropy_support_mismatch():
    with pytest.raises(SupportMismatch):
        cross_entropy([0.5, 0.5], [1.0, 0.0])


def test_kl_examples():
    p = [0.1, 0.2, 0.3, 0.4]
    assert kl_divergence(p, p) == 0.0
    assert abs(kl_divergence([0.75, 0.25], [0.5, 0.5]) - KL_75_50) < 1e-12
    with pytest.raises(SupportMismatch):
        kl_divergence([0.5, 0.5], [1.0, 0.0])


def test_kl_drops_zero_terms():
    # 0 log(0/q) = 0, even where q = 0
    assert kl_divergence([1.0, 0.0], [0.5, 0.5]) == pytest.approx(math.log(2))
    assert kl_divergence([1.0, 0.0], [1.0, 0.0]) == 0.0


def test_kl_accepts_2d_arrays():
    p = np.full((4, 4), 1 / 16)
    assert kl_divergence(p, p) == 0.0


@pytest.mark.parametrize("bad", [[0.5, 0.6], [-0.1, 1.1], [np.nan, 1.0], []])
def test_invalid_distributions_rejected(bad):
    with pytest.raises(InvalidDistribution):
        shannon_entropy(bad)


def test_bernoulli_kl():
    assert bernoulli_kl(0.5, 0.5) == 0.0
    xs = np.random.default_rng(3).uniform(0, 1, 100)
    assert np.all(np.abs(bernoulli_kl(xs, xs)) < 1e-12)
    v = bernoulli_kl(0.338, 0.600)
    assert abs(v - kl_divergence([0.338, 0.662], [0.6, 0.4])) < 1e-12
    assert abs(v - KL_338_600) < 1e-12


def test_bernoulli_kl_clips_boundaries():
    assert np.isfinite(bernoulli_kl(0.0, 1.0))
    assert np.isfinite(bernoulli_kl(1.0, 0.0))
    assert bernoulli_kl(np.array([0.0, 1.0]), 0.5).shape == (2,)


def test_binary_entropy():
    assert binary_entropy(0.0) == 0.0
    assert binary_entropy(1.0) == 0.0
    assert binary_entropy(0.5) == 1.0
    assert abs(binary_entropy(0.2) - HB_02) < 1e-12
    with pytest.raises(ValueError):
        binary_entropy(1.2)


@pytest.mark.parametrize("eps", [0.0, 0.01, 0.1, 0.3, 0.5])
def test_channel_mi_symmetric(eps):
    chan = [[1 - eps, eps], [eps, 1 - eps]]
    assert abs(channel_mutual_information([0.5, 0.5], chan) - (1 - binary_entropy(eps))) < 1e-12


def test_channel_mi_identity_and_oracle():
    assert channel_mutual_information([0.5, 0.5], np.eye(2)) == pytest.approx(1.0, abs=1e-15)
    chan = [[0.98, 0.02], [0.03, 0.97]]
    assert abs(channel_mutual_information([0.7, 0.3], chan) - MI_70_02_03) < 1e-12


def test_channel_mi_rejects_non_stochastic():
    with pytest.raises(ValueError):
        channel_mutual_information([0.5, 0.5], [[0.9, 0.2], [0.5, 0.5]])

import math

import numpy as np
import pytest

from klrep.dna_model import DNA_PARTITION, FIG2_P0, FIG2_PARAMS, effective_kernel, steady_spec
from klrep.info_metrics import kl_divergence
from klrep.kl_potential import (
    BOLTZMANN,
    MassDrift,
    SteadySpec,
    TrajectoryRecord,
    cumulative_production,
    evolve,
    kl_block_decomposition,
    potential_V,
    step_production,
    to_physical_units,
)
from klrep.markov_core import BlockPartition

# mpmath at 50 digits from the raw definitions (block sums of p log p/pi)
V_P0_EXACT_PI = 0.42262203845590687543
V_P0_ROUNDED_PI = 0.42263315822496314734
D0 = 0.00041393923505700326491
S0 = 0.021785211840165858832

P0 = np.array(FIG2_P0)


@pytest.fixture
def spec():
    return steady_spec(FIG2_PARAMS, P0)


@pytest.fixture
def T():
    return effective_kernel(FIG2_PARAMS)


def test_spec_from_kernel_matches_closed_form(spec, T):
    generic = SteadySpec.from_kernel(T, DNA_PARTITION, P0)
    for a, b in zip(generic.invariants, spec.invariants):
        assert np.max(np.abs(a - b)) < 1e-12


class TestPotential:
    def test_zero_on_steady_mixture(self, spec):
        assert potential_V(spec.steady_mixture(), spec) == pytest.approx(0.0, abs=1e-15)

    def test_initial_value(self, spec):
        assert abs(potential_V(P0, spec) - V_P0_EXACT_PI) < 1e-12

    def test_initial_value_rounded_invariants(self):
        s = SteadySpec(DNA_PARTITION, [0.7, 0.3], ([0.3376, 0.6624], [0.5, 0.5]))
        assert abs(potential_V(P0, s) - V_P0_ROUNDED_PI) < 1e-12

    def test_single_block_is_plain_kl(self):
        pi = np.array([0.1, 0.2, 0.3, 0.4])
        s = SteadySpec(BlockPartition.from_sizes([4]), [1.0], (pi,))
        assert potential_V(P0, s) == pytest.approx(kl_divergence(P0, pi), abs=1e-15)

    def test_mass_drift(self, spec):
        with pytest.raises(MassDrift):
            potential_V([0.5, 0.1, 0.3, 0.1], spec)

    def test_bits(self, spec):
        assert potential_V(P0, spec, "bits") * math.log(2) == pytest.approx(potential_V(P0, spec), abs=1e-15)


class TestDecomposition:
    def test_matched_masses(self, spec):
        dec = kl_block_decomposition(P0, spec)
        assert dec.mass_mismatch == 0.0
        assert dec.total == pytest.approx(dec.within_terms.sum())

    def test_random_draws(self, rng):
        for _ in range(1000):
            part = BlockPartition.from_sizes(rng.integers(1, 4, size=rng.integers(1, 4)).tolist())
            w = rng.dirichlet(np.ones(part.m))
            pis = tuple(rng.dirichlet(np.ones(len(b))) for b in part.blocks)
            s = SteadySpec(part, w, pis)
            p = rng.dirichlet(np.ones(part.size))
            dec = kl_block_decomposition(p, s)
            assert abs(dec.total - kl_divergence(p, s.steady_mixture())) < 1e-10
            assert abs(dec.total - dec.within_terms.sum() - dec.mass_mismatch) < 1e-15

    def test_concentrated_mass(self):
        s = SteadySpec(DNA_PARTITION, [0.5, 0.5], ([0.5, 0.5], [0.5, 0.5]))
        dec = kl_block_decomposition([0.5, 0.5, 0.0, 0.0], s)
        assert dec.mass_mismatch == pytest.approx(math.log(2), abs=1e-15)

    def test_needs_positive_weights(self):
        s = SteadySpec(DNA_PARTITION, [1.0, 0.0], ([0.5, 0.5], [0.5, 0.5]))
        with pytest.raises(ValueError):
            kl_block_decomposition(P0, s)


class TestStepProduction:
    def test_steady(self, spec, T):
        sp = step_production(spec.steady_mixture(), T, spec)
        assert abs(sp.D_n) < 1e-15 and abs(sp.delta_V_n) < 1e-15 and abs(sp.S_n) < 1e-15

    def test_first_step(self, spec, T):
        sp = step_production(P0, T, spec)
        assert sp.S_n > 0
        assert abs(sp.D_n - D0) < 1e-12
        assert abs(sp.S_n - S0) < 1e-12
        assert sp.S_n == sp.D_n + sp.delta_V_n

    def test_identity_kernel(self, spec):
        sp = step_production(P0, np.eye(4), spec)
        assert sp.D_n == 0.0 and abs(sp.delta_V_n) < 1e-15

    def test_physical_units(self, spec, T):
        sp = step_production(P0, T, spec, temperature=310.0)
        assert sp.sigma_n == pytest.approx(BOLTZMANN * 310.0 * sp.S_n, rel=1e-15)

    def test_infinite_step_is_flagged(self):
        part = BlockPartition.from_sizes([2])
        s = SteadySpec(part, [1.0], ([0.5, 0.5],))
        sp = step_production([1.0, 0.0], [[0, 1], [1, 0]], s)
        assert sp.infinite and math.isinf(sp.S_n)

    def test_rejects_leaky_kernel(self, spec):
        with pytest.raises(ValueError):
            step_production(P0, np.full((4, 4), 0.25), spec)


class TestCumulative:
    def test_empty(self):
        assert cumulative_production(TrajectoryRecord(V=[0.3])) == 0.0

    def test_fifty_steps(self, spec, T):
        rec = evolve(P0, T, spec, 50)
        total = cumulative_production(rec)
        assert abs(total - (math.fsum(rec.D_kl) + rec.V[0] - rec.V[50])) < 1e-10
        assert total > 0

    def test_steady_start(self, spec, T):
        rec = evolve(spec.steady_mixture(), T, spec, 50)
        assert abs(cumulative_production(rec)) < 1e-12

    def test_detects_broken_identity(self):
        rec = TrajectoryRecord(V=[1.0, 0.5], D_kl=[0.1])
        assert cumulative_production(rec) == pytest.approx(0.6)
        rec.V[1] = float("nan")
        with pytest.raises(ArithmeticError):
            cumulative_production(rec)


class TestUnits:
    def test_examples(self):
        assert to_physical_units(0.0, 300.0) == 0.0
        assert to_physical_units(1.0, 300.0) == pytest.approx(4.141947e-21, rel=1e-12)
        assert to_physical_units(math.log(2), 300.0) == pytest.approx(2.8709788850787238e-21, rel=1e-12)

    @pytest.mark.parametrize("temp", [0.0, -1.0])
    def test_rejects_nonpositive(self, temp):
        with pytest.raises(ValueError):
            to_physical_units(1.0, temp)


def test_evolve_row_counts(spec, T):
    rec = evolve(P0, T, spec, 7)
    assert len(rec.V) == 8 and len(rec.masses) == 8
    assert len(rec.H_q) == len(rec.H_cross) == len(rec.D_kl) == 7
    assert rec.V[0] == potential_V(P0, spec)


def test_converted_round_trip(spec, T):
    rec = evolve(P0, T, spec, 5)
    back = rec.converted("bits").converted("nats")
    assert np.allclose(back.V, rec.V, rtol=1e-15, atol=0)

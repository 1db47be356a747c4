#!/usr/bin/env python3
"""Decay of the KL potential as the proofreading bias alpha'/beta' grows.

The sum alpha' + beta' is held at its fig2 preset value so only the bias moves.
For each bias the script prints the implied affinity log(ratio'/ratio) of
the AT block, pi_1*(A), the potential after N steps relative to its start and
the first step at which V fell below a tenth of V(p_0). Nothing is asserted.
"""

import argparse

import numpy as np

from klrep import dna_model as dm


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--steps", type=int, default=50)
    ap.add_argument("--bias", type=float, nargs="+", default=[1.0, 5 / 3, 2.0, 4.0, 8.0, 16.0])
    args = ap.parse_args(argv)

    base = dm.FIG2_PARAMS
    total = base.alpha_p + base.beta_p
    print(f"{'bias':>6} {'affinity':>9} {'pi1(A)':>7} {'V_0':>8} {'V_N/V_0':>9} {'n(V<V0/10)':>11}")
    for bias in args.bias:
        beta_p = total / (1.0 + bias)
        params = base.with_updates(alpha_p=total - beta_p, beta_p=beta_p)
        rec = dm.simulate_timeseries(params, dm.FIG2_P0, args.steps)
        aff = dm.implied_affinity(base.alpha / base.beta, bias)
        V = np.array(rec.V)
        below = np.flatnonzero(V < V[0] / 10)
        hit = str(below[0]) if below.size else "-"
        pi1 = rec.meta["pi1"][0]
        print(f"{bias:6.2f} {aff:9.4f} {pi1:7.4f} {V[0]:8.5f} {V[-1] / V[0]:9.4f} {hit:>11}")


if __name__ == "__main__":
    main()

#!/usr/bin/env python3
"""Cross-check the Monte Carlo engine against every exact law.

Simulates all seven models on a random population and prints the sup
distance between empirical and exact detection-conditioned cdfs next to the
DKW band.

Usage: python scripts/mc_crosscheck.py [--seed SEED] [--size N] [--reps R]
"""

import argparse

import numpy as np

from priorsearch import (
    SimConfig,
    dist_abcd,
    dist_ef,
    dist_gh,
    dist_ikl_exact,
    dist_j,
    dist_mn,
    dist_op_exact,
    dkw_band,
    ef_schedule,
    j_optimal_q,
    mn_optimal_q,
    simulate,
    uniform_weights,
    validate_population,
)


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--seed", type=int, default=11)
    parser.add_argument("--size", type=int, default=5)
    parser.add_argument("--reps", type=int, default=100_000)
    parser.add_argument("--alpha", type=float, default=0.001)
    args = parser.parse_args()

    rng = np.random.default_rng(args.seed)
    pop = validate_population(
        rng.dirichlet(np.ones(args.size)), rng.uniform(0.3, 1.0, size=args.size)
    )
    qu = uniform_weights(args.size)
    cases = {
        "ABCD": (None, dist_abcd(pop)),
        "EF": (None, dist_ef(ef_schedule(pop))),
        "GH": (None, dist_gh(pop)),
        "IKL": (qu, dist_ikl_exact(pop, qu)),
        "J": (j_optimal_q(pop), dist_j(pop, j_optimal_q(pop))),
        "MN": (mn_optimal_q(pop), dist_mn(pop, mn_optimal_q(pop))),
        "OP": (qu, dist_op_exact(pop, qu)),
    }
    print(f"population: p={np.round(pop.p, 4)} s={np.round(pop.s, 4)}")
    print(f"{'model':>6} {'sup|F^-F|':>12} {'band':>10} {'censored':>9} {'emp mean':>10} {'exact':>10}")
    for model, (q, exact) in cases.items():
        emp = simulate(pop, SimConfig(model=model, reps=args.reps, seed=args.seed, q=q))
        upto = max(exact.horizon, max(emp.counts, default=1))
        finite = 1.0 - exact.atom_at_infinity
        sup = float(
            np.abs(emp.cdf_array(upto) - exact.cdf_array(upto) / finite).max()
        )
        band = dkw_band(emp.detected, args.alpha)
        exact_mean = exact.conditional_on_detection().mean_finite()
        flag = "ok" if sup <= band else "MISMATCH"
        print(
            f"{model:>6} {sup:12.5f} {band:10.5f} {emp.censored:9d} "
            f"{emp.mean_detected:10.4f} {exact_mean:10.4f}  {flag}"
        )


if __name__ == "__main__":
    main()

#!/usr/bin/env python3
"""Cascade toward zero: spikes accumulating at the origin give ever smaller solutions."""

import argparse

from varsys import (
    AsymptoticProfile,
    EnergyFunctional,
    Nonlinearity,
    Perturbation,
    ProblemInstance,
    SolveConfig,
    SpikeTrain,
    assemble_second_difference,
    cascade,
    sine,
)


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--lam", type=float, default=1.0)
    parser.add_argument("--stages", type=int, default=4)
    parser.add_argument("--first-peak", type=float, default=0.05)
    parser.add_argument("--seed", type=int, default=1)
    args = parser.parse_args()

    train = SpikeTrain(args.first_peak, "zero")
    a = assemble_second_difference(4)
    J = EnergyFunctional(ProblemInstance(a, Nonlinearity.broadcast(train.component(), 4),
                                         Perturbation.broadcast(sine(0.1, 1.0), 4), args.lam))
    res = cascade(J, SolveConfig(n_random_starts=10, seed=args.seed, residual_tol=1e-10), "zero",
                  AsymptoticProfile.analytic(a_zero=0, b_zero="inf"),
                  train.peaks(args.stages), train.plateau_ends(args.stages))
    print(res.evidence)
    for k, rec in enumerate(res.records, start=1):
        print(f"  u_{k}: |u|_inf = {rec.norm_inf:.3e}  Phi = {rec.phi:.3e}  residual = {rec.residual:.1e}")


if __name__ == "__main__":
    main()

#!/usr/bin/env python3
"""Sublevel cascade for the spike-train system on the 4-point second-difference matrix.

Prints one line per solution and writes (m, Phi) and (m, sup-norm) series
for each lambda under --out.
"""

import argparse
from pathlib import Path

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
    emit_plot_data,
    sine,
)
from varsys.solver import unboundedness_witness


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--lambdas", type=float, nargs="+", default=[0.5, 1.0, 5.0])
    parser.add_argument("--stages", type=int, default=6)
    parser.add_argument("--n", type=int, default=4, help="matrix order")
    parser.add_argument("--seed", type=int, default=1)
    parser.add_argument("--out", default="out/cascade_experiment")
    args = parser.parse_args()

    train = SpikeTrain(1e-4)
    a = assemble_second_difference(args.n)
    f = Nonlinearity.broadcast(train.component(), args.n)
    h = Perturbation.broadcast(sine(0.1, 1.0), args.n)
    profile = AsymptoticProfile.analytic(a_inf=0, b_sup="inf")
    for lam in args.lambdas:
        J = EnergyFunctional(ProblemInstance(a, f, h, lam))
        res = cascade(J, SolveConfig(n_random_starts=10, seed=args.seed), "infinity", profile,
                      train.peaks(args.stages), train.plateau_ends(args.stages))
        print(f"lambda = {lam}: {res.evidence}")
        for k, rec in enumerate(res.records, start=1):
            print(f"  u_{k}: Phi = {rec.phi:.6e}  |u|_inf = {rec.norm_inf:.6e}  residual = {rec.residual:.1e}")
        witness = unboundedness_witness(J, train.peaks(args.stages))
        print(f"  J_lambda(b_m 1) along peaks: {witness.verdict}")
        emit_plot_data(res.records, Path(args.out) / f"lambda_{lam:g}")


if __name__ == "__main__":
    main()

#!/usr/bin/env python3
"""Distance of the finite-tau gradient operator from the Davies form.

Writes a CSV of ||L^dag_tau[H] - L^dag_inf[H]|| over a tau grid for the
single-qubit amplitude-damping setup (H = (I - Z)/2, jump X).
"""

import argparse

import numpy as np

import thermal_landscape as tl
from thermal_landscape.bath import BathSpec
from thermal_landscape.cli import write_csv


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--beta", type=float, default=10.0)
    parser.add_argument("--output", default="davies_convergence.csv")
    args = parser.parse_args()

    ham = tl.assemble([(0.5 * (np.eye(2) - tl.PAULI["Z"]), (0,))], 1)
    jumps = [("X0", tl.PAULI["X"].copy())]
    spec = BathSpec(beta=args.beta, tau=1.0)
    gm, gp = tl.gamma(-1.0, spec), tl.gamma(1.0, spec)
    target = -gm * np.diag([0.0, 1.0]) + gp * np.diag([1.0, 0.0])

    rows = []
    for tau in (1e1, 3e1, 1e2, 3e2, 1e3, 3e3, 1e4):
        model = tl.build_model(ham, jumps, bath=BathSpec(beta=args.beta, tau=tau))
        dist = float(np.linalg.norm(tl.gradient_operator(model, "X0") - target, 2))
        rows.append((tau, dist))
        print(f"tau = {tau:8.0f}   distance = {dist:.3e}")
    write_csv(args.output, ["tau", "operator_distance"], rows)
    print(f"wrote {args.output}")


if __name__ == "__main__":
    main()

"""Regenerate the standard fidelity and echo data sets and their plot scripts.

    python3 scripts/reproduce_sweeps.py --out sweeps/

Writes, for each data set, a CSV and a matplotlib script next to it:

    fidelity_surface        fidelity over (gamma, lambda), beta in {1, 10, 20, 100}
    fidelity_gamma1         fidelity along gamma = 1
    echo_surface            echo at t = 10 over (gamma, lambda)
    echo_gamma1             echo at t = 10 along gamma = 1

and prints the dip location and depth of each cross-section.
"""

import argparse
import time
from pathlib import Path

from thermofid.sweep import Quantity, SweepConfig, argmin_lambda, dip_depth, emit_plot_script, run_sweep, write_csv

BETAS = (1.0, 10.0, 20.0, 100.0)
ECHO_TIME = 10.0


def configs(n_sites, gamma_steps, lambda_steps):
    surface = dict(n_sites=n_sites, gamma_range=(0.0, 1.5, gamma_steps), lambda_range=(0.0, 2.0, lambda_steps), beta_list=BETAS)
    line = dict(surface, gamma_range=(1.0, 1.0, 1))
    return {
        "fidelity_surface": SweepConfig(**surface),
        "fidelity_gamma1": SweepConfig(**line),
        "echo_surface": SweepConfig(**surface, quantity=Quantity.ECHO, echo_time=ECHO_TIME),
        "echo_gamma1": SweepConfig(**line, quantity=Quantity.ECHO, echo_time=ECHO_TIME),
    }


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--out", default="sweeps", help="output directory")
    parser.add_argument("--n-sites", type=int, default=200)
    parser.add_argument("--gamma-steps", type=int, default=151)
    parser.add_argument("--lambda-steps", type=int, default=201)
    args = parser.parse_args()

    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    for name, cfg in configs(args.n_sites, args.gamma_steps, args.lambda_steps).items():
        start = time.perf_counter()
        result = run_sweep(cfg)
        csv = out / f"{name}.csv"
        write_csv(result, csv)
        emit_plot_script(result, out / f"{name}_plot.py", csv)
        print(f"{name}: {len(result.rows)} rows, {len(result.errors)} errors, {time.perf_counter() - start:.2f}s -> {csv}")
        if result.gammas.size == 1:
            for beta in BETAS:
                print(f"    beta={beta:>5g}  argmin lambda={argmin_lambda(result, beta):.3f}  depth={dip_depth(result, beta):.3e}")


if __name__ == "__main__":
    main()

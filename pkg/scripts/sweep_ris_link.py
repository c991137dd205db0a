"""Median sum rates as a function of the BS-RIS reference path loss.

    python3 scripts/sweep_ris_link.py [--trials 200] [--ref-db -30 -10 0 10]

Each row runs the default scenario with ``ris_pathloss_ref_db`` replaced
and prints the per-scheme medians, showing how strongly the reflected path
has to be budgeted before the surface changes the picture.
"""

import argparse
import dataclasses

from ris_mumimo.channel import ScenarioConfig
from ris_mumimo.harness import RunSpec, run_monte_carlo, summarize
from ris_mumimo.schemes import ALL_SCHEMES


def main():
    parser = argparse.ArgumentParser(description=__doc__.split("\n")[0])
    parser.add_argument("--trials", type=int, default=200)
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument("--ref-db", type=float, nargs="+", default=[-30.0, -20.0, -10.0, 0.0, 10.0, 20.0])
    parser.add_argument("--exponent", type=float, default=None, help="override the BS-RIS exponent too")
    args = parser.parse_args()

    base = ScenarioConfig()
    print("L0_dB    " + " ".join(f"{s.value:>8s}" for s in ALL_SCHEMES))
    for ref in args.ref_db:
        changes = {"ris_pathloss_ref_db": ref}
        if args.exponent is not None:
            changes["ris_pathloss_exp"] = args.exponent
        spec = RunSpec(dataclasses.replace(base, **changes), n_trials=args.trials, master_seed=args.seed)
        summaries = summarize(run_monte_carlo(spec), spec.schemes)
        print(f"{ref:7.1f}  " + " ".join(f"{summaries[s].median:8.2f}" for s in ALL_SCHEMES))


if __name__ == "__main__":
    main()

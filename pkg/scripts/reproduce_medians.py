"""Run the two-user CDF study and compare medians with reference values.

    python3 scripts/reproduce_medians.py [--trials 1000] [--config scripts/configs/unit_bs_ris_link.json]

Without ``--config`` the default scenario is used.  Results go to
``--out`` (default ``results/medians``) in the usual harness layout.
"""

import argparse
import time

from ris_mumimo.channel import ScenarioConfig
from ris_mumimo.harness import RunSpec, emit_outputs, order_violations, run_monte_carlo, summarize
from ris_mumimo.schemes import SchemeId

REFERENCE = {"DC": 5.6, "FDMA": 18.1, "FDMA_US": 18.5, "TDMA": 22.0, "RPS": 17.4, "JT": 23.3, "OT": 26.2}
ORDER = ("DC", "RPS", "FDMA", "FDMA_US", "TDMA", "JT")


def main():
    parser = argparse.ArgumentParser(description=__doc__.split("\n")[0])
    parser.add_argument("--trials", type=int, default=1000)
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument("--config")
    parser.add_argument("--workers", type=int, default=1)
    parser.add_argument("--out", default="results/medians")
    args = parser.parse_args()

    scenario = ScenarioConfig.load(args.config) if args.config else ScenarioConfig()
    spec = RunSpec(scenario, n_trials=args.trials, master_seed=args.seed, output_dir=args.out)
    started = time.perf_counter()
    samples = run_monte_carlo(spec, workers=args.workers)
    summaries = summarize(samples, spec.schemes)
    emit_outputs(samples, summaries, spec)

    medians = {k.value: v.median for k, v in summaries.items()}
    print(f"{'scheme':9s} {'median':>8s} {'ref':>6s} {'dev':>7s}")
    for name, value in medians.items():
        ref = REFERENCE.get(name)
        dev = f"{100 * (value - ref) / ref:+6.1f}%" if ref else ""
        print(f"{name:9s} {value:8.2f} {ref if ref else '':>6} {dev:>7s}")
    ordered = all(medians[a] < medians[b] for a, b in zip(ORDER, ORDER[1:]))
    print(f"median order {' < '.join(ORDER)}: {'holds' if ordered else 'violated'}")
    print(f"pointwise violations: {len(order_violations(samples))}")
    flagged = sum(1 for s in samples if s.scheme is SchemeId.JT and s.flag)
    print(f"uncertified JT samples: {flagged}; {time.perf_counter() - started:.1f} s; wrote {args.out}")


if __name__ == "__main__":
    main()

"""Command line entry point.

    ris-mumimo simulate [--config scenario.json] [--trials N] [--seed S] [--users K]
                        [--elements Ns] [--schemes DC,JT,...] [--out DIR] [--workers W]
    ris-mumimo verify --out DIR
    ris-mumimo oracle --elements N --levels L --seed S [--users K]

Exit status is 0 on success, 1 when an invariant check fails and 2 on
invalid input or I/O errors.
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import logging
import sys
import time

import numpy as np

from .channel import ScenarioConfig, complex_gaussian
from .errors import InvalidInputError, SizeLimitError
from .harness import RunSpec, emit_outputs, order_violations, run_monte_carlo, summarize, verify_output_dir
from .optimizer import brute_force_phases, build_qcqp, randomize_extract, solve_sdp
from .schemes import SchemeId, SdrParams
from .seeding import make_rng, mix

log = logging.getLogger("ris_mumimo")

EXIT_OK, EXIT_VIOLATION, EXIT_ERROR = 0, 1, 2


def _build_spec(args) -> RunSpec:
    scenario = ScenarioConfig.load(args.config) if args.config else ScenarioConfig()
    if args.users is not None:
        scenario = scenario.with_users(args.users)
    if args.elements is not None:
        scenario = dataclasses.replace(scenario, n_elements=args.elements)
    schemes = tuple(SchemeId.parse(s) for s in args.schemes.split(",") if s.strip())
    sdr = SdrParams(tol=args.tol, max_iter=args.max_iter, n_candidates=args.candidates, method=args.method)
    return RunSpec(scenario, schemes, args.trials, args.seed, sdr, args.out)


def cmd_simulate(args) -> int:
    spec = _build_spec(args)
    started = time.perf_counter()

    def progress(done, total):
        if done == total or done % max(1, total // 20) == 0:
            log.info("%d/%d trials (%.0f s)", done, total, time.perf_counter() - started)

    samples = run_monte_carlo(spec, workers=args.workers, progress=progress)
    summaries = summarize(samples, spec.schemes)
    out = emit_outputs(samples, summaries, spec)
    for scheme, summary in summaries.items():
        print(f"{scheme.value:9s} median {summary.median:8.3f} bit/s/Hz")
    print(f"wrote {out}")
    bad = order_violations(samples)
    for line in bad[:20]:
        log.error("ordering violated: %s", line)
    return EXIT_VIOLATION if bad else EXIT_OK


def cmd_verify(args) -> int:
    problems = verify_output_dir(args.out)
    for line in problems:
        print(f"FAIL {line}")
    if not problems:
        print(f"OK {args.out}")
    return EXIT_VIOLATION if problems else EXIT_OK


def oracle_instance(n_elements: int, n_users: int, seed: int):
    """Unit-variance Rayleigh instance ``(f, G, d)`` for solver cross-checks."""
    rng = make_rng(seed)
    return (
        complex_gaussian(rng, n_elements),
        complex_gaussian(rng, (n_elements, n_users)),
        complex_gaussian(rng, n_users),
    )


def cmd_oracle(args) -> int:
    f, g, d = oracle_instance(args.elements, args.users, args.seed)
    grid_phases, grid_value = brute_force_phases(f, g, d, args.levels)
    problem = build_qcqp(f, g, d)
    solution = solve_sdp(problem, tol=args.tol)
    phases = randomize_extract(solution, problem, args.candidates, mix(args.seed, 1))
    extracted = problem.objective(phases)
    report = {
        "elements": args.elements,
        "users": args.users,
        "levels": args.levels,
        "seed": args.seed,
        "grid_objective": grid_value,
        "grid_theta": grid_phases.theta.tolist(),
        "sdp_objective": solution.objective,
        "sdp_upper_bound": solution.upper_bound,
        "sdp_relative_gap": solution.relative_gap,
        "sdp_certified": solution.certified,
        "extracted_objective": extracted,
        "extracted_over_grid": extracted / grid_value if grid_value > 0 else float("nan"),
    }
    print(json.dumps(report, indent=2))
    ok = solution.objective >= grid_value - 1e-9 * max(1.0, grid_value) and extracted <= (
        solution.objective + solution.duality_gap + 1e-9 * max(1.0, solution.objective)
    )
    return EXIT_OK if ok else EXIT_VIOLATION


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="ris-mumimo", description=__doc__.split("\n")[0])
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    sim = sub.add_parser("simulate", help="run the Monte-Carlo sum-rate study")
    sim.add_argument("--config", help="scenario JSON file (defaults used when omitted)")
    sim.add_argument("--trials", type=int, default=1000)
    sim.add_argument("--seed", type=int, default=0)
    sim.add_argument("--users", type=int)
    sim.add_argument("--elements", type=int)
    sim.add_argument("--schemes", default=",".join(s.value for s in SchemeId))
    sim.add_argument("--out", default="results")
    sim.add_argument("--workers", type=int, default=1)
    sim.add_argument("--candidates", type=int, default=SdrParams.n_candidates)
    sim.add_argument("--tol", type=float, default=SdrParams.tol)
    sim.add_argument("--max-iter", type=int, default=SdrParams.max_iter)
    sim.add_argument("--method", choices=("mixing", "admm"), default=SdrParams.method)
    sim.set_defaults(func=cmd_simulate)

    ver = sub.add_parser("verify", help="re-check the invariants of a results directory")
    ver.add_argument("--out", required=True)
    ver.set_defaults(func=cmd_verify)

    orc = sub.add_parser("oracle", help="compare the SDP pipeline with exhaustive search")
    orc.add_argument("--elements", type=int, required=True)
    orc.add_argument("--levels", type=int, required=True)
    orc.add_argument("--seed", type=int, default=0)
    orc.add_argument("--users", type=int, default=2)
    orc.add_argument("--candidates", type=int, default=SdrParams.n_candidates)
    orc.add_argument("--tol", type=float, default=SdrParams.tol)
    orc.set_defaults(func=cmd_oracle)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.INFO,
                        format="%(levelname)s %(message)s", stream=sys.stderr)
    try:
        return args.func(args)
    except (InvalidInputError, SizeLimitError, OSError, ValueError, KeyError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())

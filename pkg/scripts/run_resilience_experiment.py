#!/usr/bin/env python3
"""Run the knowledge-diffusion resilience experiment.

Compares a fractal organization (ring of clique cells, biconnected)
against a balanced hierarchy, both with 15 agents, under three scenarios:
no isolation, a single targeted isolation at step 10, and five targeted
isolations at steps 10/20/40/70/120.  Writes one aggregate CSV per
scenario-topology pair and prints a comparison table.
"""

import argparse
import sys
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parents[1] / "src"))

from fso.diffusion import (
    REPEATED_ISOLATION_TIMES,
    SINGLE_ISOLATION_TIMES,
    IsolationStrategy,
    ScenarioSpec,
    Topology,
    monte_carlo,
    write_aggregate_csv,
)

SCENARIOS = {
    "baseline": (),
    "single-isolation": SINGLE_ISOLATION_TIMES,
    "repeated-isolation": REPEATED_ISOLATION_TIMES,
}


def parse_args():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--out", default="results", help="output directory")
    parser.add_argument("--replicates", type=int, default=100)
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument("--horizon", type=int, default=150)
    parser.add_argument("--transmit-probability", type=float, default=0.5)
    parser.add_argument(
        "--strategy", default="max_degree", choices=["max_degree", "random"]
    )
    return parser.parse_args()


def main():
    args = parse_args()
    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    strategy = IsolationStrategy.parse(args.strategy)

    finals = {}
    for scenario_name, times in SCENARIOS.items():
        for topology in (Topology.FRACTAL, Topology.HIERARCHY):
            spec = ScenarioSpec(
                topology=topology,
                horizon=args.horizon,
                transmit_probability=args.transmit_probability,
                isolation_events=tuple((t, strategy) for t in times),
                seed=args.seed,
            )
            result = monte_carlo(spec, args.replicates)
            name = f"{scenario_name}-{topology.value}"
            write_aggregate_csv(result, out_dir / f"{name}.csv")
            finals[(scenario_name, topology)] = result.final_mean

    print(f"{args.replicates} replicates, seed {args.seed}, "
          f"p={args.transmit_probability}, horizon {args.horizon}, "
          f"{strategy.value} isolation\n")
    header = f"{'scenario':<20} {'fractal':>10} {'hierarchy':>10}"
    print(header)
    print("-" * len(header))
    for scenario_name in SCENARIOS:
        fractal_final = finals[(scenario_name, Topology.FRACTAL)]
        hierarchy_final = finals[(scenario_name, Topology.HIERARCHY)]
        print(
            f"{scenario_name:<20} {fractal_final:>10.4f} {hierarchy_final:>10.4f}"
        )
    print(f"\nCSV files in {out_dir}/")


if __name__ == "__main__":
    main()

#!/usr/bin/env python3
"""Classification-accuracy trends across weighting schemes and tagging policies.

For every seed this script generates one suggestion-free corpus plus one
resource-suggestion corpus per acceptance rate, runs the repeated-subsampling
evaluation over all four weighting schemes, and reports per-seed grand means,
per-condition seed averages, and head-to-head win tallies (tf-ibf vs tf
without suggestions; tf vs the idf family under suggestions; tf-iuf vs the
rest of the idf family).  Optionally writes the raw per-seed grid to CSV.
"""

from __future__ import annotations

import argparse
import sys
import time
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parent.parent / "src"))

import numpy as np

from folktags.classifier import evaluate
from folktags.simulator import SimConfig, generate
from folktags.weighting import Scheme

SCHEMES = (Scheme.TF, Scheme.TF_IRF, Scheme.TF_IUF, Scheme.TF_IBF)
IXF = (Scheme.TF_IRF, Scheme.TF_IUF, Scheme.TF_IBF)


def scheme_means(config: SimConfig, sizes, runs, jobs) -> dict[Scheme, float]:
    folksonomy, labels = generate(config)
    grid = evaluate(
        folksonomy, labels, SCHEMES, sizes, runs=runs, seed=config.seed, jobs=jobs
    )
    return {scheme: grid.scheme_mean(scheme) for scheme in SCHEMES}


def fmt(means: dict[Scheme, float]) -> str:
    return "  ".join(f"{s.value}={means[s]:.4f}" for s in SCHEMES)


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--seeds", type=int, default=10, help="number of seeds")
    parser.add_argument("--sizes", default="300,600,1200")
    parser.add_argument("--runs", type=int, default=6)
    parser.add_argument("--acceptances", default="0.3,0.5,0.7")
    parser.add_argument("--jobs", type=int, default=4)
    parser.add_argument("--csv", type=Path, help="write per-seed means to this file")
    args = parser.parse_args()

    sizes = tuple(int(s) for s in args.sizes.split(","))
    acceptances = tuple(float(a) for a in args.acceptances.split(","))
    seeds = range(args.seeds)
    started = time.perf_counter()

    results: dict[tuple[str, float, int], dict[Scheme, float]] = {}
    print(f"policy=none  sizes={sizes} runs={args.runs}")
    for seed in seeds:
        means = scheme_means(SimConfig(policy="none", seed=seed), sizes, args.runs, args.jobs)
        results[("none", 0.0, seed)] = means
        print(f"  seed {seed}: {fmt(means)}")
    for acceptance in acceptances:
        print(f"policy=resource_suggest  acceptance={acceptance}")
        for seed in seeds:
            config = SimConfig(
                policy="resource_suggest", suggestion_acceptance=acceptance, seed=seed
            )
            means = scheme_means(config, sizes, args.runs, args.jobs)
            results[("resource_suggest", acceptance, seed)] = means
            print(f"  seed {seed}: {fmt(means)}")

    print("\ncondition averages over seeds:")
    conditions = [("none", 0.0)] + [("resource_suggest", a) for a in acceptances]
    for policy, acceptance in conditions:
        avg = {
            s: float(np.mean([results[(policy, acceptance, seed)][s] for seed in seeds]))
            for s in SCHEMES
        }
        label = policy if policy == "none" else f"{policy}@{acceptance}"
        print(f"  {label:<24} {fmt(avg)}")

    ibf_wins = sum(
        1 for seed in seeds
        if results[("none", 0.0, seed)][Scheme.TF_IBF] >= results[("none", 0.0, seed)][Scheme.TF]
    )
    print(f"\nno suggestions: tf-ibf >= tf in {ibf_wins}/{args.seeds} seeds")
    for acceptance in acceptances:
        tf_wins = sum(
            1 for seed in seeds
            if all(
                results[("resource_suggest", acceptance, seed)][Scheme.TF]
                >= results[("resource_suggest", acceptance, seed)][ixf]
                for ixf in IXF
            )
        )
        iuf_wins = sum(
            1 for seed in seeds
            if results[("resource_suggest", acceptance, seed)][Scheme.TF_IUF]
            > max(
                results[("resource_suggest", acceptance, seed)][Scheme.TF_IRF],
                results[("resource_suggest", acceptance, seed)][Scheme.TF_IBF],
            )
        )
        print(
            f"resource_suggest@{acceptance}: tf >= all idf variants in "
            f"{tf_wins}/{args.seeds} seeds; tf-iuf leads the idf family in "
            f"{iuf_wins}/{args.seeds} seeds"
        )

    if args.csv:
        args.csv.parent.mkdir(parents=True, exist_ok=True)
        with open(args.csv, "w", encoding="utf-8", newline="") as out:
            out.write("policy,acceptance,seed," + ",".join(s.value for s in SCHEMES) + "\n")
            for (policy, acceptance, seed), means in sorted(results.items()):
                row = ",".join(f"{means[s]:.6f}" for s in SCHEMES)
                out.write(f"{policy},{acceptance},{seed},{row}\n")
        print(f"\nwrote {args.csv}")

    print(f"total runtime {time.perf_counter() - started:.0f}s")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())

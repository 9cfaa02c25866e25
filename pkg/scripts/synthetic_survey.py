#!/usr/bin/env python3
"""End-to-end survey of one graph through the whole CLI pipeline.

Generates a scale-free edge list (or takes an existing one), then runs
rank, stats, density, flow, matrix, filter and twodrank through the
command-line entry points, so the output directory ends up with every
serialized artifact plus the manifests to replay them.
"""

import argparse
from pathlib import Path

from chei2d.cli import main as cli


def run(*argv) -> None:
    code = cli([str(a) for a in argv])
    if code not in (0, 2):
        raise SystemExit(f"step {argv[0]} failed with exit code {code}")


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--input", default=None, help="existing edge list (default: synthesize)")
    parser.add_argument("--nodes", type=int, default=20_000)
    parser.add_argument("--seed", type=int, default=7)
    parser.add_argument("--out", default="survey-out")
    args = parser.parse_args()

    out = Path(args.out)
    if args.input is None:
        run("synth", "--nodes", args.nodes, "--seed", args.seed,
            "--out", out / "graph")
        edges = out / "graph" / "edges.txt"
    else:
        edges = Path(args.input)

    run("rank", edges, "--out", out / "rank")
    table = out / "rank" / "ranks.tsv"
    run("stats", table, "--out", out / "stats")
    run("density", table, "--out", out / "density")
    run("flow", edges, table, "--out", out / "flow")
    run("matrix", edges, "--ranks", table, "--cells", "100",
        "--raw-window", "100", "--out", out / "matrix")
    run("filter", edges, "--out", out / "filter_curve")
    run("filter", edges, "--eta", "10", "--out", out / "filter_eta10")
    run("twodrank", table, "--out", out / "twodrank")
    print(f"survey complete under {out}/")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())

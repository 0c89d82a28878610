"""Overlap fraction of spiral unfoldings of random hulls against vertex count."""
import argparse
from pathlib import Path

from spiralcut.experiments import dumps, random_overlap_stats
from spiralcut.svg import curve_svg


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--n", default="4,8,12,16,20,25")
    ap.add_argument("--trials", type=int, default=50)
    ap.add_argument("--seed", type=int, default=1)
    ap.add_argument("--workers", type=int, default=1)
    ap.add_argument("--outdir", default="results")
    args = ap.parse_args()
    ns = [int(t) for t in args.n.split(",")]
    curve = random_overlap_stats(ns, args.trials, args.seed, workers=args.workers)
    out = Path(args.outdir)
    out.mkdir(parents=True, exist_ok=True)
    (out / "random_overlap.csv").write_text(curve.to_csv())
    (out / "random_overlap.json").write_text(dumps(curve))
    (out / "random_overlap.svg").write_text(curve_svg(curve.ns, curve.fractions))
    print(curve.to_csv(), end="")


if __name__ == "__main__":
    main()

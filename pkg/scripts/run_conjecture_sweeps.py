"""Hemiball and perturbed-dome orientation sweeps, and the n_spin threshold of C*."""
import argparse
from pathlib import Path

from spiralcut.experiments import (dome_conjecture_run, dumps, hemiball_orientation_sweep,
                                   revolution_threshold_search)
from spiralcut.generators import default_profile


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--hemiball-n", type=int, default=16)
    ap.add_argument("--orientations", type=int, default=100)
    ap.add_argument("--outdir", default="results")
    args = ap.parse_args()
    out = Path(args.outdir)
    out.mkdir(parents=True, exist_ok=True)
    h = hemiball_orientation_sweep(args.hemiball_n, args.orientations, args.seed)
    (out / "hemiball.json").write_text(dumps(h))
    simple = [r.label for r in h.records if r.simple]
    print(f"H_{args.hemiball_n}: overlap fraction {h.overlap_fraction:.3f}; simple in {simple}")
    d = dome_conjecture_run(3, 0.01, 25, args.seed)
    (out / "dome.json").write_text(dumps(d))
    print(f"dome f=3: overlap fraction {d.overlap_fraction:.3f}")
    r = revolution_threshold_search(default_profile(), [3, 4, 5, 6, 8, 12, 20])
    (out / "revolution.json").write_text(dumps(r))
    print(f"C*: verdicts {r.verdicts}, n0={r.n0}, persists={r.persists}")


if __name__ == "__main__":
    main()

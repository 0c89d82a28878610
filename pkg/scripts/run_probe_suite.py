"""First simple orientation in the probe set for every Platonic and Archimedean solid."""
import argparse
import json
import time

from spiralcut.experiments import first_simple_probe
from spiralcut.generators import SolidKind, make_solid


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--json")
    args = ap.parse_args()
    rows = []
    for kind in SolidKind:
        t0 = time.perf_counter()
        rec = first_simple_probe(make_solid(kind), args.seed)
        rows.append({"solid": kind.value, "probe": rec.label if rec else None})
        print(f"{kind.value:30s} {rows[-1]['probe'] or 'NONE':20s} {time.perf_counter() - t0:6.2f}s")
    if args.json:
        with open(args.json, "w") as fh:
            json.dump(rows, fh, indent=1)


if __name__ == "__main__":
    main()

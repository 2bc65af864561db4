#!/usr/bin/env python3
"""Run a bundled switching scenario (HO or HA), write its artifacts and print a
coarse table of the population difference zeta(t) and coherence |xi(t)|.

    python3 scripts/switching.py ho --out out
    python3 scripts/switching.py ha --out out --points 401
"""

import argparse
import sys

import numpy as np

from darboux_nvne.config import bundled_example, parse_config
from darboux_nvne.scenario import run_scenario, series_rows, write_artifacts

EXAMPLES = {"ho": "ho_quadratic", "ha": "ha_quadratic"}


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    ap.add_argument("model", choices=sorted(EXAMPLES))
    ap.add_argument("--out", default="out", help="output directory root")
    ap.add_argument("--points", type=int, default=None, help="override the number of grid points")
    ap.add_argument("--rows", type=int, default=11, help="rows in the printed table")
    args = ap.parse_args(argv)

    name = EXAMPLES[args.model]
    data = bundled_example(name)
    data["output"]["directory"] = f"{args.out}/{name}"
    if args.points:
        data["grid"]["n_points"] = args.points
    result = run_scenario(parse_config(data))
    paths = write_artifacts(result)

    sol = result.solution
    print(f"{name}: switching rate {sol.theta:.6g}, midpoint t* = {sol.midpoint:.6g}")
    rows = series_rows(result)
    zeta = {t: v for t, s, v in rows if s == "zeta"}
    xi = {t: v for t, s, v in rows if s == "abs_xi"}
    times = np.array(sorted(zeta))
    pick = times[np.linspace(0, len(times) - 1, args.rows).round().astype(int)]
    print(f"{'t':>12} {'zeta':>12} {'|xi|':>12}")
    for t in pick:
        print(f"{t:12.4f} {zeta[t]:12.6f} {xi[t]:12.6f}")
    print(result.report.summary())
    for kind, path in paths.items():
        print(f"wrote {kind}: {path}")
    return 0 if result.report.all_passed else 1


if __name__ == "__main__":
    sys.exit(main())

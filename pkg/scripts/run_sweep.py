"""Sweep the HWP angle at fixed polarization and write the rows as CSV.

Usage: python3 scripts/run_sweep.py [--phi 67.5] [--interpretation sigma-y] [--output sweep.csv]
"""

import argparse
import sys

import numpy as np

from extweak.cli import SWEEP_FIELDS, render_csv, sweep_rows
from extweak.optics import Interpretation


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(description=__doc__.split("\n")[0])
    ap.add_argument("--phi", type=float, default=67.5)
    ap.add_argument("--theta-step", type=float, default=0.25)
    ap.add_argument("--interpretation", default="sigma-x")
    ap.add_argument("--output", default=None)
    args = ap.parse_args(argv)

    rows, skipped = sweep_rows([args.phi], np.arange(0.0, 22.5 - 1e-9, args.theta_step).tolist(),
                               Interpretation(args.interpretation))
    text = render_csv(SWEEP_FIELDS, rows)
    if args.output:
        with open(args.output, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)

    best = max(rows, key=lambda r: abs(r["diff_pipeline"]))
    print(f"{len(rows)} rows, {len(skipped)} skipped; peak |diff| {abs(best['diff_pipeline']):.6f} "
          f"at theta={best['theta']}", file=sys.stderr)
    return 0


if __name__ == "__main__":
    raise SystemExit(main())

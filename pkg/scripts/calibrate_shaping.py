#!/usr/bin/env python3
"""Rebuild the packaged shaping calibration tables (full sweep, step 1).

Takes a few minutes; pass an output directory to avoid overwriting the
packaged assets under src/polarshaping/data/.
"""

import argparse
import os

from polarshaping.shaping import calibrate_sweep

if __name__ == "__main__":
    ap = argparse.ArgumentParser()
    ap.add_argument("--out", default="src/polarshaping/data")
    ap.add_argument("--realizations", type=int, default=500)
    ap.add_argument("--seed", type=int, default=20260810)
    ap.add_argument("--workers", type=int, default=os.cpu_count() or 1)
    args = ap.parse_args()
    for mod_bits in (8, 4):
        table = calibrate_sweep(1024, mod_bits, None,
                                num_realizations=args.realizations,
                                list_size=8, seed=args.seed,
                                workers=args.workers)
        path = f"{args.out}/calibration_1024_{mod_bits}_8.csv"
        table.to_csv(path)
        print(path)

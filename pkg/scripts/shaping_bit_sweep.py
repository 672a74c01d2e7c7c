#!/usr/bin/env python3
"""Required SNR at a target BLER as a function of the shaping-bit count.

Reproduces the optimum-shaping-count experiment: for 768 payload bits
with 256-QAM the curve has an interior minimum around 64 bits.
"""

import argparse
import os

from polarshaping.cli import main

if __name__ == "__main__":
    ap = argparse.ArgumentParser()
    ap.add_argument("--payload-len", type=int, default=768)
    ap.add_argument("--mod-bits", type=int, default=8)
    ap.add_argument("--s-values", default="0:128:16")
    ap.add_argument("--target-bler", type=float, default=1e-2)
    ap.add_argument("--snr-db", default="20,23", help="initial bracket lo,hi")
    ap.add_argument("--out", default="runs")
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--workers", type=int, default=os.cpu_count() or 1)
    args = ap.parse_args()

    raise SystemExit(main([
        "sweep-s", "--payload-len", str(args.payload_len),
        "--mother-len", "1024", "--tx-len", "1024",
        "--mod-bits", str(args.mod_bits), "--s-values", args.s_values,
        "--target-bler", str(args.target_bler), "--snr-db", args.snr_db,
        "--target-errors", "100", "--seed", str(args.seed),
        "--workers", str(args.workers), "--out", args.out]))

#!/usr/bin/env python3
"""BLER curves with and without shaping for one configuration.

Default: 768 payload bits, 256-QAM, mother length 1024, comparing the
conventional chain against 64 shaping bits over an SNR grid.  Use
--deep for a denser grid with enough trials to resolve BLER 1e-3
(roughly an hour).
"""

import argparse
import os

from polarshaping.cli import main

if __name__ == "__main__":
    ap = argparse.ArgumentParser()
    ap.add_argument("--payload-len", type=int, default=768)
    ap.add_argument("--mod-bits", type=int, default=8)
    ap.add_argument("--shaping-bits", type=int, default=64)
    ap.add_argument("--snr-db", default=None)
    ap.add_argument("--deep", action="store_true")
    ap.add_argument("--out", default="runs")
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--workers", type=int, default=os.cpu_count() or 1)
    args = ap.parse_args()

    snr = args.snr_db or ("19:23:0.25" if args.mod_bits == 8 else "7.5:10.5:0.25")
    trials = "200000" if args.deep else "20000"
    for s in (0, args.shaping_bits):
        rc = main(["simulate", "--payload-len", str(args.payload_len),
                   "--mother-len", "1024", "--tx-len", "1024",
                   "--mod-bits", str(args.mod_bits), "--shaping-bits", str(s),
                   "--snr-db", snr, "--trials", trials,
                   "--target-errors", "100",
                   "--seed", str(args.seed), "--workers", str(args.workers),
                   "--out", args.out])
        if rc:
            raise SystemExit(rc)

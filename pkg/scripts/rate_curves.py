#!/usr/bin/env python3
"""Achievable-rate curves for 16-QAM and 256-QAM, uniform vs optimised.

Writes runs/rate_m4.csv and runs/rate_m8.csv (columns gamma_db,p,r_bmd);
the optimised rows carry the per-SNR maximising ones-probability.
"""

import sys

from polarshaping.cli import main

if __name__ == "__main__":
    out = sys.argv[1] if len(sys.argv) > 1 else "runs"
    for mod_bits, grid in ((4, "0:22:0.5"), (8, "0:36:0.5")):
        rc = main(["rate", "--mod-bits", str(mod_bits), "--p", "0.5",
                   "--p", "opt", "--snr-db", grid, "--out", out])
        if rc:
            sys.exit(rc)

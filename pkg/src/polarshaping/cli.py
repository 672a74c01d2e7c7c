"""Command-line front end: rate curves, calibration, simulation, tables.

All dB/linear conversion happens here; the library works in linear SNR.
Every run writes CSV results plus a JSON manifest that reproduces it.
"""

from __future__ import annotations

import argparse
import csv
import dataclasses
import json
import sys
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import analysis, tables
from .config import CodeConfig
from .shaping import CalibrationTable, calibrate_sweep
from .simulate import run_bler, sweep_shaping_bits

__all__ = ["RunConfig", "main"]


@dataclass
class RunConfig:
    """Flat, file-loadable description of a simulation run."""

    payload_len: int = 768
    mother_len: int = 1024
    tx_len: int = 1024
    mod_bits: int = 8
    shaping_bits: int | str = 0          # "auto" sweeps a default grid
    list_size: int = 8
    precoder_list_size: int = 8
    scrambler_seed: int | str = "zeros"
    snr_db: list[float] = field(default_factory=lambda: [20.0])
    max_trials: int = 10000
    target_errors: int = 100
    seed: int = 0
    workers: int = 1
    calibration_file: str | None = None

    def code_config(self, shaping_bits: int | None = None) -> CodeConfig:
        s = self.shaping_bits if shaping_bits is None else shaping_bits
        return CodeConfig(
            payload_len=self.payload_len, mother_len=self.mother_len,
            tx_len=self.tx_len, mod_bits=self.mod_bits, shaping_bits=int(s),
            list_size=self.list_size,
            precoder_list_size=self.precoder_list_size,
            scrambler_seed=self.scrambler_seed)

    def to_dict(self) -> dict:
        return dataclasses.asdict(self)

    @classmethod
    def from_dict(cls, data: dict) -> "RunConfig":
        known = {f.name for f in dataclasses.fields(cls)}
        unknown = set(data) - known
        if unknown:
            raise ValueError(f"unknown config keys: {sorted(unknown)}")
        return cls(**data)


def _parse_scalar(text: str):
    text = text.strip()
    for cast in (int, float):
        try:
            return cast(text)
        except ValueError:
            continue
    return text


def read_config_file(path) -> dict:
    """Flat ``key = value`` file; '#' starts a comment; lists use commas."""
    data = {}
    for lineno, raw in enumerate(Path(path).read_text().splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ValueError(f"{path}:{lineno}: expected 'key = value'")
        key, value = (part.strip() for part in line.split("=", 1))
        if "," in value:
            data[key] = [_parse_scalar(v) for v in value.split(",") if v.strip()]
        else:
            data[key] = _parse_scalar(value)
    return data


def _parse_range(text: str) -> list[float]:
    """Either 'start:stop:step' (inclusive) or a comma list."""
    if ":" in text:
        start, stop, step = (float(v) for v in text.split(":"))
        n = int(np.floor((stop - start) / step + 1e-9)) + 1
        return [start + i * step for i in range(n)]
    return [float(v) for v in text.split(",") if v.strip()]


def _write_csv(path: Path, header: list[str], rows) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(header)
        w.writerows(rows)


def _write_manifest(path: Path, payload: dict) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w") as fh:
        json.dump(payload, fh, indent=2, sort_keys=True)
        fh.write("\n")


def _load_run_config(args) -> RunConfig:
    data = read_config_file(args.config) if args.config else {}
    cfg = RunConfig.from_dict(data)
    overrides = {
        "payload_len": args.payload_len, "mother_len": args.mother_len,
        "tx_len": args.tx_len, "mod_bits": args.mod_bits,
        "shaping_bits": args.shaping_bits, "list_size": args.list_size,
        "precoder_list_size": args.precoder_list_size,
        "scrambler_seed": args.scrambler_seed,
        "max_trials": args.trials, "target_errors": args.target_errors,
        "seed": args.seed, "workers": args.workers,
        "calibration_file": args.calibration_file,
    }
    for key, value in overrides.items():
        if value is not None:
            setattr(cfg, key, value)
    if args.snr_db is not None:
        cfg.snr_db = _parse_range(args.snr_db)
    if isinstance(cfg.shaping_bits, str) and cfg.shaping_bits != "auto":
        cfg.shaping_bits = int(cfg.shaping_bits)
    if isinstance(cfg.scrambler_seed, str) and cfg.scrambler_seed != "zeros":
        cfg.scrambler_seed = int(cfg.scrambler_seed)
    return cfg


def _calibration_for(cfg: RunConfig):
    if cfg.calibration_file:
        return CalibrationTable.load(cfg.mother_len, cfg.mod_bits,
                                     cfg.precoder_list_size,
                                     path=cfg.calibration_file)
    return None


def cmd_rate(args) -> int:
    out_dir = Path(args.out)
    snr_grid = _parse_range(args.snr_db)
    rows = []
    for mode in args.p:
        for snr_db in snr_grid:
            gamma = 10 ** (snr_db / 10)
            if mode == "opt":
                p = analysis.optimize_p(args.mod_bits, gamma)
            else:
                p = float(mode)
            point = analysis.achievable_rate_bmd(args.mod_bits, p, gamma,
                                                 method=args.method,
                                                 seed=args.seed)
            rows.append([f"{snr_db:.4f}", f"{point.ones_prob:.6f}",
                         f"{point.rate:.6f}"])
    path = out_dir / f"rate_m{args.mod_bits}.csv"
    _write_csv(path, ["gamma_db", "p", "r_bmd"], rows)
    print(path)
    return 0


def cmd_calibrate(args) -> int:
    out_dir = Path(args.out)
    segment = args.mother_len // (args.mod_bits // 2)
    s_max = segment if args.s_max is None else args.s_max
    s_values = np.arange(0, s_max + 1, args.s_step)
    table = calibrate_sweep(args.mother_len, args.mod_bits, s_values,
                            num_realizations=args.realizations,
                            list_size=args.list_size, seed=args.seed,
                            workers=args.workers)
    asset = out_dir / f"calibration_{args.mother_len}_{args.mod_bits}_{args.list_size}.csv"
    out_dir.mkdir(parents=True, exist_ok=True)
    table.to_csv(asset)
    report_rows = []
    for s, p in zip(table.s_values, table.p_hat):
        s_asym = analysis.asymptotic_shaping_bits(args.mother_len,
                                                  args.mod_bits, float(p))
        report_rows.append([int(s), f"{p:.6f}", s_asym])
    report = out_dir / f"calibration_report_{args.mother_len}_{args.mod_bits}.csv"
    _write_csv(report, ["S", "p_hat", "s_asymptotic"], report_rows)
    print(asset)
    print(report)
    return 0


def cmd_simulate(args) -> int:
    cfg = _load_run_config(args)
    if cfg.shaping_bits == "auto":
        return _run_sweep(args, cfg, default_grid=True)
    out_dir = Path(args.out)
    results = run_bler(cfg.code_config(), cfg.snr_db,
                       max_trials=cfg.max_trials,
                       target_errors=cfg.target_errors,
                       master_seed=cfg.seed, workers=cfg.workers,
                       calibration=_calibration_for(cfg))
    csv_path = out_dir / f"bler_a{cfg.payload_len}_m{cfg.mod_bits}_s{cfg.shaping_bits}.csv"
    _write_csv(csv_path, ["snr_db", "trials", "block_errors", "bler", "ci95"],
               [[f"{r.snr_db:.4f}", r.trials, r.block_errors,
                 f"{r.bler:.8f}", f"{r.ci95:.8f}"] for r in results])
    _write_manifest(csv_path.with_suffix(".json"),
                    {"command": "simulate", "run_config": cfg.to_dict(),
                     "results_csv": csv_path.name})
    print(csv_path)
    return 0


def _run_sweep(args, cfg: RunConfig, default_grid: bool = False) -> int:
    out_dir = Path(args.out)
    if default_grid or not getattr(args, "s_values", None):
        segment = cfg.mother_len // (cfg.mod_bits // 2)
        s_values = list(range(0, segment // 2 + 1, max(segment // 16, 1)))
    else:
        s_values = [int(v) for v in _parse_range(args.s_values)]
    target_bler = getattr(args, "target_bler", 1e-2)
    lo, hi = min(cfg.snr_db), max(cfg.snr_db)
    rows = sweep_shaping_bits(cfg.code_config(0), s_values, target_bler,
                              lo, hi, target_errors=cfg.target_errors,
                              master_seed=cfg.seed, workers=cfg.workers,
                              calibration=_calibration_for(cfg))
    csv_path = out_dir / f"sweep_s_a{cfg.payload_len}_m{cfg.mod_bits}.csv"
    _write_csv(csv_path, ["S", "required_snr_db"],
               [[s, f"{snr:.4f}"] for s, snr in rows])
    _write_manifest(csv_path.with_suffix(".json"),
                    {"command": "sweep-s", "run_config": cfg.to_dict(),
                     "target_bler": target_bler,
                     "s_values": s_values, "results_csv": csv_path.name})
    print(csv_path)
    return 0


def cmd_sweep_s(args) -> int:
    cfg = _load_run_config(args)
    return _run_sweep(args, cfg)


def cmd_tables(args) -> int:
    if args.file:
        text = Path(args.file).read_text()
        fname, expected = tables.ASSET_NAMES[args.name]
        arr = tables._parse_asset(text, args.file, expected)
    else:
        arr = tables.load_asset(args.name)
    for v in arr:
        print(int(v))
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="polarshaping",
        description="Polar-coded modulation with probabilistic shaping: "
                    "analysis, calibration and AWGN simulation")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--config", help="flat key = value config file")
        p.add_argument("--seed", type=int, default=None)
        p.add_argument("--out", default="runs")
        p.add_argument("--workers", type=int, default=None)

    p_rate = sub.add_parser("rate", help="achievable-rate curves to CSV")
    p_rate.add_argument("--mod-bits", type=int, default=8)
    p_rate.add_argument("--p", action="append", default=None,
                        help="ones probability, or 'opt'; repeatable")
    p_rate.add_argument("--snr-db", default="0:25:1")
    p_rate.add_argument("--method", default="gauss-hermite",
                        choices=["gauss-hermite", "monte-carlo"])
    p_rate.add_argument("--seed", type=int, default=0)
    p_rate.add_argument("--out", default="runs")
    p_rate.set_defaults(func=cmd_rate)

    p_cal = sub.add_parser("calibrate", help="measure shaping bits vs ones probability")
    p_cal.add_argument("--mother-len", type=int, default=1024)
    p_cal.add_argument("--mod-bits", type=int, default=8)
    p_cal.add_argument("--s-max", type=int, default=None)
    p_cal.add_argument("--s-step", type=int, default=1)
    p_cal.add_argument("--realizations", type=int, default=500)
    p_cal.add_argument("--list-size", type=int, default=8)
    p_cal.add_argument("--seed", type=int, default=0)
    p_cal.add_argument("--out", default="runs")
    p_cal.add_argument("--workers", type=int, default=1)
    p_cal.set_defaults(func=cmd_calibrate)

    def sim_args(p):
        common(p)
        p.add_argument("--payload-len", type=int, default=None)
        p.add_argument("--mother-len", type=int, default=None)
        p.add_argument("--tx-len", type=int, default=None)
        p.add_argument("--mod-bits", type=int, default=None)
        p.add_argument("--shaping-bits", default=None)
        p.add_argument("--list-size", type=int, default=None)
        p.add_argument("--precoder-list-size", type=int, default=None)
        p.add_argument("--scrambler-seed", default=None)
        p.add_argument("--snr-db", default=None,
                       help="'start:stop:step' or comma list")
        p.add_argument("--trials", type=int, default=None)
        p.add_argument("--target-errors", type=int, default=None)
        p.add_argument("--calibration-file", default=None)

    p_sim = sub.add_parser("simulate", help="Monte-Carlo BLER curves")
    sim_args(p_sim)
    p_sim.set_defaults(func=cmd_simulate)

    p_sweep = sub.add_parser("sweep-s", help="required SNR vs shaping bits")
    sim_args(p_sweep)
    p_sweep.add_argument("--s-values", default=None,
                         help="'start:stop:step' or comma list of counts")
    p_sweep.add_argument("--target-bler", type=float, default=1e-2)
    p_sweep.set_defaults(func=cmd_sweep_s)

    p_tab = sub.add_parser("tables", help="dump/validate a table asset")
    p_tab.add_argument("--name", required=True, choices=sorted(tables.ASSET_NAMES))
    p_tab.add_argument("--file", default=None,
                       help="validate this file instead of the packaged asset")
    p_tab.set_defaults(func=cmd_tables)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if getattr(args, "p", None) is None and args.command == "rate":
        args.p = ["0.5"]
    try:
        return args.func(args)
    except (ValueError, FileNotFoundError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())

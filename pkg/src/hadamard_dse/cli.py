"""Command-line front end.

Subcommands::

    hadamard-dse sweep-snr       [--config run.json] [--seed N] [--out DIR]
    hadamard-dse dse             [--config run.json] [--seed N] [--out DIR] [--exclude-adc-area]
    hadamard-dse validate-tables

The config file is one JSON object whose keys are the fields of
:class:`RunConfig`; unknown keys are rejected. A manifest written by a
previous run is also accepted as ``--config`` and replays that run.
"""
from __future__ import annotations

import argparse
import json
import logging
import math
import sys
from dataclasses import asdict, dataclass, field, fields
from importlib import metadata
from pathlib import Path

from . import analog, dse
from .analog import ARRAY_PRESETS, CapacitorArraySpec, array_preset, insertion_loss_compensation_db
from .chain import AdcModel, SweepConfig, run_analog_chain, run_digital_chain
from .errors import ConfigurationError, HadamardDseError
from .transform import FixedPointFormat, TransformSpec

logger = logging.getLogger("hadamard_dse")


def _default_snrs():
    return [float(v) for v in range(0, 85, 5)]


@dataclass
class RunConfig:
    m: int = 7
    chains: list = field(default_factory=lambda: ["digital", "analog"])
    digital_bits: list = field(default_factory=lambda: [5, 6, 7, 8, 9, 10])
    analog_presets: list = field(default_factory=lambda: ["0.68fF", "4.0fF"])
    custom_array: dict | None = None
    # ADC widths for the analog chain; default is digital_bits plus the
    # insertion-loss compensation (12 dB -> 2 bits)
    analog_adc_bits: list | None = None
    input_snrs_db: list = field(default_factory=_default_snrs)
    n_mismatch_trials: int = 400
    n_noise_trials_per_snr: int = 400
    master_seed: int = 0
    loading_factor: float = 4.0
    gain_compensation: str = "nominal"
    workers: int = 1
    survey: str | None = None
    target_snrs_db: list = field(default_factory=lambda: [float(v) for v in range(10, 50, 5)])
    n_channels: int = 128
    exclude_adc_area: bool = False
    out_dir: str = "out"

    @classmethod
    def from_dict(cls, data: dict) -> "RunConfig":
        if not isinstance(data, dict):
            raise ConfigurationError("config must be a JSON object")
        known = {f.name for f in fields(cls)}
        unknown = sorted(set(data) - known)
        if unknown:
            raise ConfigurationError(f"unknown config keys: {', '.join(unknown)}")
        cfg = cls(**data)
        cfg.validate()
        return cfg

    def validate(self):
        if not isinstance(self.m, int) or not 0 <= self.m <= 20:
            raise ConfigurationError("m must be an integer in 0..20")
        bad = [c for c in self.chains if c not in ("analog", "digital")]
        if bad or not self.chains:
            raise ConfigurationError(f"chains must be a nonempty subset of analog/digital, got {self.chains}")
        if not self.input_snrs_db:
            raise ConfigurationError("input_snrs_db must not be empty")
        if any(not isinstance(b, int) or b < 2 for b in self.digital_bits):
            raise ConfigurationError("digital_bits must be integers >= 2")
        if self.analog_adc_bits is not None and any(
            not isinstance(b, int) or b < 1 for b in self.analog_adc_bits
        ):
            raise ConfigurationError("analog_adc_bits must be positive integers")
        for name in self.analog_presets:
            try:
                array_preset(name)
            except KeyError as exc:
                raise ConfigurationError(str(exc)) from None
        if self.custom_array is not None:
            try:
                self.custom_array_spec()
            except (TypeError, ValueError) as exc:
                raise ConfigurationError(f"custom_array: {exc}") from None
        if self.n_mismatch_trials < 1 or self.n_noise_trials_per_snr < 1:
            raise ConfigurationError("trial counts must be >= 1")
        if self.n_channels < 1:
            raise ConfigurationError("n_channels must be >= 1")
        self.sweep_config("digital")  # reuses SweepConfig validation

    def custom_array_spec(self) -> CapacitorArraySpec | None:
        if self.custom_array is None:
            return None
        data = dict(self.custom_array)
        data.setdefault("name", f"custom_{data.get('c_unit')}fF")
        return CapacitorArraySpec(**data)

    def arrays(self) -> list[CapacitorArraySpec]:
        out = [array_preset(n) for n in self.analog_presets]
        custom = self.custom_array_spec()
        if custom is not None:
            out.append(custom)
        return out

    def sweep_config(self, kind: str) -> SweepConfig:
        return SweepConfig(
            input_snrs_db=[math.inf if v in ("inf", "Infinity") else float(v) for v in self.input_snrs_db],
            n_mismatch_trials=self.n_mismatch_trials,
            n_noise_trials_per_snr=self.n_noise_trials_per_snr,
            master_seed=self.master_seed,
            chain_kind=kind,
            loading_factor=self.loading_factor,
            gain_compensation=self.gain_compensation,
            workers=self.workers,
        )


def version_string() -> str:
    try:
        return "v" + metadata.version("artifact")
    except metadata.PackageNotFoundError:
        return "v0+unknown"


DSE_NOTES = [
    "digital transform power is the published net power, taken at the maximum clock rate",
    "ADC power is scaled linearly from the survey rate down to the operating rate",
    "points whose ADC has no area in the survey are marked area-unavailable",
]


def _write_manifest(out: Path, command: str, cfg: RunConfig, outputs: list[str], notes=None):
    manifest = {
        "command": command,
        "version": version_string(),
        "master_seed": cfg.master_seed,
        "config": asdict(cfg),
        "outputs": outputs,
    }
    if notes:
        manifest["notes"] = list(notes)
    (out / "manifest.json").write_text(json.dumps(manifest, indent=2, sort_keys=True) + "\n")


def cmd_sweep_snr(cfg: RunConfig) -> list[Path]:
    spec = TransformSpec(cfg.m)
    jobs = []
    if "digital" in cfg.chains:
        for bits in cfg.digital_bits:
            jobs.append(("digital", bits, None))
    if "analog" in cfg.chains:
        if cfg.analog_adc_bits is not None:
            adc_bits = list(cfg.analog_adc_bits)
        else:
            adc_bits = None
        for array in cfg.arrays():
            extra = round(insertion_loss_compensation_db(array.insertion_loss_db) / 6.02)
            for bits in adc_bits or [b + extra for b in cfg.digital_bits]:
                jobs.append(("analog", bits, array))
    out = Path(cfg.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    written = []
    for kind, bits, array in jobs:
        sweep = cfg.sweep_config(kind)
        adc = AdcModel(enob=bits)
        if kind == "digital":
            curve = run_digital_chain(sweep, adc, spec, FixedPointFormat(bits))
        else:
            curve = run_analog_chain(sweep, adc, array, spec)
        path = out / f"snr_{curve.label}.csv"
        curve.to_csv(path)
        written.append(path)
        logger.info("wrote %s", path)
    _write_manifest(out, "sweep-snr", cfg, [p.name for p in written])
    return written


def _transform_records(cfg: RunConfig):
    records = []
    for array in cfg.arrays():
        rec = dse.analog_preset(array)
        if rec.output_snr_capability_db is None:
            rec = dse.TransformDesignRecord(
                **{**asdict(rec), "output_snr_capability_db": 20 * math.log10(1 / array.sigma_ratio)
                   if array.sigma_ratio > 0 else None}
            )
        records.append(rec)
    for bits in cfg.digital_bits:
        if bits not in dse.DIGITAL_TABLE:
            raise ConfigurationError(f"no digital design data for {bits}b inputs")
        records.append(dse.digital_preset(bits))
    return records


def cmd_dse(cfg: RunConfig) -> list[Path]:
    survey_path = cfg.survey or dse.SYNTHETIC_SURVEY_PATH
    survey = dse.load_adc_survey(survey_path)
    points = dse.explore(
        _transform_records(cfg),
        survey,
        cfg.target_snrs_db,
        n_channels=cfg.n_channels,
        include_adc_area=not cfg.exclude_adc_area,
    )
    front = dse.pareto_front([p for p in points if p.feasible]) if any(p.feasible for p in points) else []
    out = Path(cfg.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    points_path, front_path = out / "dse_points.csv", out / "dse_pareto.csv"
    dse.write_report(points, points_path)
    dse.write_report(front, front_path)
    n_bad = sum(not p.feasible for p in points)
    logger.info("%d design points (%d infeasible), %d on the Pareto front", len(points), n_bad, len(front))
    _write_manifest(out, "dse", cfg, [points_path.name, front_path.name], DSE_NOTES)
    return [points_path, front_path]


def validate_tables(tolerance: float = 0.005) -> list[dict]:
    """Recompute derived table columns; one result dict per check."""
    results = []
    for bits, (area, fmax, power_mw) in dse.DIGITAL_TABLE.items():
        pub_area, pub_energy = dse.DIGITAL_TABLE_DERIVED[bits]
        point = dse.evaluate_design(dse.digital_preset(bits), dse.AdcRecord.stub())
        for metric, got, want in (
            ("area_eff", point.area_eff, pub_area),
            ("energy_eff", point.energy_eff, pub_energy),
        ):
            dev = got / want - 1.0
            results.append(dict(table="digital", row=f"{bits}b", metric=metric, computed=got,
                                published=want, deviation=dev,
                                status="pass" if abs(dev) <= tolerance else "fail"))
    for name, array in ARRAY_PRESETS.items():
        got = analog.mismatch_sigma_from_cap(analog.MISMATCH_COEFFICIENT, array.c_unit)
        dev = got / array.sigma_ratio - 1.0
        results.append(dict(table="array", row=name, metric="sigma_ratio", computed=got,
                            published=array.sigma_ratio, deviation=dev,
                            status="pass" if abs(dev) <= tolerance else "flagged"))
    return results


def cmd_validate_tables(stream=None) -> bool:
    stream = stream or sys.stdout
    results = validate_tables()
    for r in results:
        print(
            f"{r['status'].upper():8s} {r['table']:8s} {r['row']:7s} {r['metric']:11s} "
            f"computed={r['computed']:.5g} published={r['published']:.5g} "
            f"deviation={100 * r['deviation']:+.2f}%",
            file=stream,
        )
    return all(r["status"] != "fail" for r in results)


def load_config(path: str | None) -> RunConfig:
    if path is None:
        return RunConfig()
    data = json.loads(Path(path).read_text())
    if isinstance(data, dict) and "config" in data and "version" in data:
        data = data["config"]
    return RunConfig.from_dict(data)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="hadamard-dse", description=__doc__.splitlines()[0])
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)
    for name, help_text in (
        ("sweep-snr", "input vs. output SNR curves"),
        ("dse", "area/energy efficiency design points and Pareto front"),
    ):
        p = sub.add_parser(name, help=help_text)
        p.add_argument("--config", help="JSON run config or manifest")
        p.add_argument("--seed", type=int, help="override master_seed")
        p.add_argument("--out", help="output directory")
        if name == "dse":
            p.add_argument("--exclude-adc-area", action="store_true",
                           help="leave ADC area out of the area accounting")
    sub.add_parser("validate-tables", help="recompute derived table columns")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(message)s")
    try:
        if args.command == "validate-tables":
            return 0 if cmd_validate_tables() else 1
        cfg = load_config(args.config)
        if args.seed is not None:
            cfg.master_seed = args.seed
        if args.out is not None:
            cfg.out_dir = args.out
        if getattr(args, "exclude_adc_area", False):
            cfg.exclude_adc_area = True
        cfg.validate()
        if args.command == "sweep-snr":
            cmd_sweep_snr(cfg)
        else:
            cmd_dse(cfg)
    except (HadamardDseError, ValueError, TypeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"I/O error: {exc}", file=sys.stderr)
        return 3
    return 0


if __name__ == "__main__":
    sys.exit(main())

"""ADC survey handling, ADC selection and system-level efficiency analysis.

A complete chain is a Hadamard transform block plus ``n_channels`` ADCs.
Its throughput is limited by the slower of the two, ADC power is derated
linearly to the operating rate (constant energy per conversion), and the
passive analog array is accounted at zero power.
"""
from __future__ import annotations

import csv
import io
import logging
import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .analog import ARRAY_PRESETS, CapacitorArraySpec, insertion_loss_compensation_db, nyquist_rate
from .errors import InfeasibleError, SurveyRowError, SurveySchemaError

logger = logging.getLogger(__name__)

SURVEY_COLUMNS = (
    "name",
    "architecture",
    "technology_nm",
    "sndr_db",
    "nyquist_rate_hz",
    "power_w",
    "area_mm2",
)
REPORT_COLUMNS = (
    "label",
    "throughput_gts",
    "total_power_w",
    "total_area_mm2",
    "output_snr_db",
    "area_eff",
    "energy_eff",
    "adc_name",
)
AREA_UNAVAILABLE = "area-unavailable"
DEFAULT_CHANNELS = 128
SYNTHETIC_SURVEY_PATH = Path(__file__).with_name("data") / "synthetic_adc_survey.csv"


@dataclass(frozen=True)
class AdcRecord:
    name: str
    architecture: str
    technology_nm: int
    sndr_db: float
    nyquist_rate_hz: float
    power_w: float
    area_mm2: float | None = None

    def __post_init__(self):
        if not self.sndr_db > 0:
            raise ValueError(f"{self.name}: sndr_db must be positive")
        if not self.nyquist_rate_hz > 0:
            raise ValueError(f"{self.name}: nyquist_rate_hz must be positive")
        # zero is allowed here for cost-free stubs; survey rows must be > 0
        if self.power_w < 0:
            raise ValueError(f"{self.name}: power_w must be positive")
        if self.area_mm2 is not None and self.area_mm2 < 0:
            raise ValueError(f"{self.name}: area_mm2 must be nonnegative")

    @property
    def energy_per_conversion(self) -> float:
        return self.power_w / self.nyquist_rate_hz

    @classmethod
    def stub(cls, nyquist_rate_hz=math.inf, sndr_db=1000.0, name="ideal-adc"):
        """Zero-power, zero-area converter for accounting the transform alone."""
        return cls(name, "stub", 0, sndr_db, nyquist_rate_hz, 0.0, 0.0)


def _parse_row(row: dict, line: int) -> AdcRecord:
    def number(key, cast=float, optional=False):
        raw = (row.get(key) or "").strip()
        if raw == "":
            if optional:
                return None
            raise SurveyRowError(f"missing value for {key!r}", line)
        try:
            return cast(float(raw)) if cast is int else cast(raw)
        except ValueError:
            raise SurveyRowError(f"non-numeric {key!r}: {raw!r}", line) from None

    rec = dict(
        name=(row["name"] or "").strip(),
        architecture=(row["architecture"] or "").strip(),
        technology_nm=number("technology_nm", int),
        sndr_db=number("sndr_db"),
        nyquist_rate_hz=number("nyquist_rate_hz"),
        power_w=number("power_w"),
        area_mm2=number("area_mm2", optional=True),
    )
    for key in ("sndr_db", "nyquist_rate_hz", "power_w"):
        if not rec[key] > 0:
            raise SurveyRowError(f"{key} must be positive, got {rec[key]}", line)
    if rec["area_mm2"] is not None and rec["area_mm2"] < 0:
        raise SurveyRowError(f"area_mm2 must be nonnegative, got {rec['area_mm2']}", line)
    return AdcRecord(**rec)


def load_adc_survey(source, on_error: str = "raise") -> list[AdcRecord]:
    """Parse a survey CSV from a path or text stream.

    With ``on_error="skip"`` invalid rows are logged and dropped instead of
    raising :class:`SurveyRowError`.
    """
    if hasattr(source, "read"):
        text = source.read()
    else:
        text = Path(source).read_text()
    if not text.strip():
        return []
    reader = csv.DictReader(io.StringIO(text))
    missing = [c for c in SURVEY_COLUMNS if c not in (reader.fieldnames or [])]
    if missing:
        raise SurveySchemaError(f"survey is missing required columns: {', '.join(missing)}")
    records = []
    for row in reader:
        line = reader.line_num
        try:
            records.append(_parse_row(row, line))
        except SurveyRowError as exc:
            if on_error != "skip":
                raise
            logger.warning("skipping survey row: %s", exc)
    return records


def write_adc_survey(records, dest=None) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(SURVEY_COLUMNS)
    for r in records:
        writer.writerow([
            r.name, r.architecture, r.technology_nm, repr(r.sndr_db), repr(r.nyquist_rate_hz),
            repr(r.power_w), "" if r.area_mm2 is None else repr(r.area_mm2),
        ])
    text = buf.getvalue()
    if dest is not None:
        Path(dest).write_text(text)
    return text


def synthetic_survey(seed: int = 0) -> list[AdcRecord]:
    """Survey-like ADC population drawn around a speed/resolution frontier.

    Energy per conversion is the larger of a Walden-style term
    (2 fJ/step, rising above a 500 MHz corner) and a thermal floor at a
    Schreier figure of merit of 178 dB; resolution is capped by 80 fs
    aperture jitter at the Nyquist frequency. Records are scattered
    log-normally above the frontier and about 10% lack an area entry.
    The data is synthetic and only stands in for a real survey export.
    """
    rng = np.random.default_rng(seed)
    records = []
    idx = 0
    for fs in np.logspace(6.5, 10.7, 29):
        jitter_limit = -20.0 * math.log10(2 * math.pi * (fs / 2) * 80e-15)
        for sndr in np.arange(25.0, 86.0, 3.0):
            if sndr > jitter_limit or rng.random() > 0.6:
                continue
            enob = (sndr - 1.76) / 6.02
            walden = 2e-15 * 2.0**enob * (1.0 + fs / 5e8)
            thermal = 0.5 * 10.0 ** ((sndr - 178.0) / 10.0)
            energy = max(walden, thermal) * math.exp(abs(rng.normal(0.0, 0.5)))
            sndr_real = round(float(sndr + rng.uniform(0.0, 2.0)), 2)
            area = 0.002 * 2.0 ** (enob / 2) * (1.0 + fs / 2e9) * math.exp(rng.normal(0.0, 0.3))
            if fs > 1e9:
                arch = "TI-SAR"
            elif sndr > 70:
                arch = "DSM" if fs < 1e8 else "Pipeline"
            else:
                arch = "SAR"
            idx += 1
            records.append(AdcRecord(
                name=f"SYN-{idx:04d}",
                architecture=arch,
                technology_nm=int(rng.choice([16, 28, 40, 65])),
                sndr_db=sndr_real,
                nyquist_rate_hz=float(f"{fs:.4g}"),
                power_w=float(f"{energy * fs:.4g}"),
                area_mm2=None if rng.random() < 0.1 else float(f"{area:.4g}"),
            ))
    return records


@dataclass(frozen=True)
class RequirementSet:
    required_sndr_db: float
    required_rate_hz: float

    def __post_init__(self):
        if not (self.required_sndr_db > 0 and self.required_rate_hz > 0):
            raise ValueError("requirements must be positive")


def adc_requirements(
    chain_kind: str,
    target_output_snr_db: float,
    transform_rate_hz: float,
    insertion_loss_db: float = 11.3,
    guard_margin_db: float = 0.0,
) -> RequirementSet:
    """ADC SNDR and rate needed for a chain to reach ``target_output_snr_db``.

    The analog chain pays the array's insertion loss rounded up to whole dB.
    """
    if chain_kind == "digital":
        sndr = target_output_snr_db + guard_margin_db
    elif chain_kind == "analog":
        sndr = target_output_snr_db + insertion_loss_compensation_db(insertion_loss_db)
    else:
        raise ValueError(f"chain_kind must be 'analog' or 'digital', got {chain_kind!r}")
    return RequirementSet(sndr, transform_rate_hz)


def select_adc(records, req: RequirementSet) -> AdcRecord:
    """Lowest energy-per-conversion record meeting ``req``.

    Ties go to lower power, then to the lexicographically smaller name.
    """
    records = list(records)
    if not records:
        raise InfeasibleError("no ADC records to choose from", "empty")
    sndr_ok = [r for r in records if r.sndr_db >= req.required_sndr_db]
    rate_ok = [r for r in records if r.nyquist_rate_hz >= req.required_rate_hz]
    feasible = [r for r in sndr_ok if r.nyquist_rate_hz >= req.required_rate_hz]
    if not feasible:
        if not sndr_ok:
            binding = "sndr"
        elif not rate_ok:
            binding = "rate"
        else:
            binding = "sndr+rate"
        raise InfeasibleError(
            f"no ADC meets SNDR >= {req.required_sndr_db:g} dB at "
            f">= {req.required_rate_hz:.4g} S/s (binding: {binding})",
            binding,
        )
    return min(feasible, key=lambda r: (r.energy_per_conversion, r.power_w, r.name))


@dataclass(frozen=True)
class TransformDesignRecord:
    kind: str
    name: str
    area_mm2: float
    max_rate_hz: float
    power_w: float
    input_bits: int | None = None
    c_unit_fF: float | None = None
    output_snr_capability_db: float | None = None
    insertion_loss_db: float = 0.0


# 128-point FHTs in 65 nm, post-layout: bits -> (area mm^2, f_max GHz, power mW).
# Sustained throughput equals the clock (fully unrolled and pipelined).
DIGITAL_TABLE = {
    5: (0.195, 1.603, 346.7),
    6: (0.236, 1.605, 431.4),
    7: (0.277, 1.439, 440.6),
    8: (0.314, 1.429, 517.0),
    9: (0.341, 1.431, 575.9),
    10: (0.394, 1.377, 617.1),
}
# Published derived columns: bits -> (mm^2 per GT/s, pJ per transform)
DIGITAL_TABLE_DERIVED = {
    5: (0.122, 216.4),
    6: (0.147, 268.8),
    7: (0.192, 306.2),
    8: (0.219, 361.9),
    9: (0.239, 402.5),
    10: (0.287, 448.0),
}
# Noise-free output SNR of the bit-true chain (ADC at 4-sigma loading, m=7,
# 20000 trials, seed 0); regenerate with chain_capability_db().
DIGITAL_CAPABILITY_DB = {5: 13.26, 6: 19.43, 7: 25.51, 8: 31.55, 9: 37.45, 10: 42.98}
# Noise-free 90%-yield output SNR of each array with an ideal ADC.
ANALOG_CAPABILITY_DB = {"0.68fF": 24.37, "1.5fF": 32.33, "2.0fF": 35.85, "4.0fF": 39.93}


def digital_preset(bits: int) -> TransformDesignRecord:
    area, fmax, power_mw = DIGITAL_TABLE[bits]
    return TransformDesignRecord(
        kind="digital",
        name=f"digital_{bits}b",
        area_mm2=area,
        max_rate_hz=fmax * 1e9,
        power_w=power_mw * 1e-3,
        input_bits=bits,
        output_snr_capability_db=DIGITAL_CAPABILITY_DB.get(bits),
    )


def analog_preset(array: CapacitorArraySpec | str) -> TransformDesignRecord:
    if isinstance(array, str):
        array = ARRAY_PRESETS[array]
    return TransformDesignRecord(
        kind="analog",
        name=f"analog_{array.name or array.c_unit}",
        area_mm2=array.array_area,
        max_rate_hz=nyquist_rate(array),
        power_w=0.0,
        c_unit_fF=array.c_unit,
        output_snr_capability_db=ANALOG_CAPABILITY_DB.get(array.name),
        insertion_loss_db=array.insertion_loss_db,
    )


def chain_capability_db(record_kind, preset, m=7, n_trials=None, n_mismatch=50, seed=0):
    """Monte Carlo output-SNR ceiling of a transform at noise-free input."""
    from .chain import AdcModel, SweepConfig, run_analog_chain, run_digital_chain
    from .transform import TransformSpec

    spec = TransformSpec(m)
    if n_trials is None:
        # rare full-scale clipping makes the digital estimate heavy-tailed
        n_trials = 20000 if record_kind == "digital" else 400
    if record_kind == "digital":
        cfg =SweepConfig([math.inf], n_noise_trials_per_snr=n_trials, master_seed=seed)
        return float(run_digital_chain(cfg, AdcModel(preset), spec).mean_db[0])
    cfg = SweepConfig([math.inf], n_mismatch_trials=n_mismatch,
                      n_noise_trials_per_snr=n_trials, master_seed=seed, chain_kind="analog")
    array = ARRAY_PRESETS[preset] if isinstance(preset, str) else preset
    return float(run_analog_chain(cfg, None, array, spec).p10_db[0])


@dataclass(frozen=True)
class DesignPoint:
    label: str
    throughput: float  # transforms/s
    total_power_w: float
    total_area_mm2: float | None
    output_snr_db: float
    area_eff: float | None  # mm^2 per GT/s
    energy_eff: float  # pJ per transform
    adc_used: AdcRecord | None
    status: str = "ok"

    @property
    def feasible(self) -> bool:
        return self.status == "ok"

    @property
    def area_available(self) -> bool:
        return self.total_area_mm2 is not None

    def report_row(self) -> list[str]:
        if not self.feasible:
            return [self.label, "", "", "", f"{self.output_snr_db:.6g}", "", "", self.status]

        def area(v):
            return AREA_UNAVAILABLE if v is None else f"{v:.6g}"

        return [
            self.label,
            f"{self.throughput / 1e9:.6g}",
            f"{self.total_power_w:.6g}",
            area(self.total_area_mm2),
            f"{self.output_snr_db:.6g}",
            area(self.area_eff),
            f"{self.energy_eff:.6g}",
            self.adc_used.name if self.adc_used else "",
        ]


def infeasible_point(label, output_snr_db, reason) -> DesignPoint:
    nan = float("nan")
    return DesignPoint(label, nan, nan, None, output_snr_db, None, nan, None,
                       status=f"infeasible:{reason}")


def evaluate_design(
    transform: TransformDesignRecord,
    adc: AdcRecord,
    n_channels: int = DEFAULT_CHANNELS,
    include_adc_area: bool = True,
    output_snr_db: float | None = None,
    label: str | None = None,
) -> DesignPoint:
    throughput = min(transform.max_rate_hz, adc.nyquist_rate_hz)
    adc_power = adc.power_w * throughput / adc.nyquist_rate_hz if adc.power_w else 0.0
    total_power = transform.power_w + n_channels * adc_power
    if not include_adc_area:
        total_area = transform.area_mm2
    elif adc.area_mm2 is None:
        total_area = None
    else:
        total_area = transform.area_mm2 + n_channels * adc.area_mm2
    if output_snr_db is None:
        output_snr_db = transform.output_snr_capability_db or float("nan")
    return DesignPoint(
        label=label or transform.name,
        throughput=throughput,
        total_power_w=total_power,
        total_area_mm2=total_area,
        output_snr_db=output_snr_db,
        area_eff=None if total_area is None else total_area / (throughput / 1e9),
        energy_eff=total_power / throughput * 1e12,
        adc_used=adc,
    )


OBJECTIVES = {"energy_eff": -1, "area_eff": -1, "output_snr": +1}


def _objective_values(point: DesignPoint, objectives) -> tuple:
    vals = []
    for name in objectives:
        sign = OBJECTIVES[name]
        raw = point.output_snr_db if name == "output_snr" else getattr(point, name)
        if raw is None or (isinstance(raw, float) and math.isnan(raw)):
            raw = -sign * math.inf  # missing data ranks worst
        vals.append(sign * raw)  # larger is better after sign flip
    return tuple(vals)


def dominates(a: DesignPoint, b: DesignPoint, objectives) -> bool:
    va, vb = _objective_values(a, objectives), _objective_values(b, objectives)
    return all(x >= y for x, y in zip(va, vb)) and any(x > y for x, y in zip(va, vb))


def pareto_front(points, objectives=("energy_eff", "area_eff", "output_snr")) -> list[DesignPoint]:
    """Non-dominated subset, in input order.

    Sorts by the first objective so each point is only checked against the
    running front; duplicates of a front point are kept.
    """
    points = list(points)
    for name in objectives:
        if name not in OBJECTIVES:
            raise ValueError(f"unknown objective {name!r}")
    vals = [_objective_values(p, objectives) for p in points]
    order = sorted(range(len(points)), key=lambda i: tuple(-v for v in vals[i]))
    front: list[int] = []
    for i in order:
        vi = vals[i]
        if not any(
            all(x >= y for x, y in zip(vals[j], vi)) and any(x > y for x, y in zip(vals[j], vi))
            for j in front
        ):
            front.append(i)
    return [points[i] for i in sorted(front)]


def explore(
    transforms,
    survey,
    target_snrs_db,
    n_channels: int = DEFAULT_CHANNELS,
    include_adc_area: bool = True,
) -> list[DesignPoint]:
    """One design point per (transform, target SNR); infeasible rows are marked."""
    points = []
    for target in target_snrs_db:
        for tr in transforms:
            label = f"{tr.name}@{target:g}dB"
            cap = tr.output_snr_capability_db
            if cap is not None and cap < target:
                points.append(infeasible_point(label, target, "transform"))
                continue
            req = adc_requirements(tr.kind, target, tr.max_rate_hz, tr.insertion_loss_db)
            if tr.input_bits is not None:
                # the converter feeds a b-bit datapath, so it needs b bits itself
                floor = 6.02 * tr.input_bits + 1.76
                if req.required_sndr_db < floor:
                    req = RequirementSet(floor, req.required_rate_hz)
            try:
                adc = select_adc(survey, req)
            except InfeasibleError as exc:
                points.append(infeasible_point(label, target, exc.binding))
                continue
            points.append(evaluate_design(tr, adc, n_channels, include_adc_area, target, label))
    return points


def write_report(points, dest=None) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(REPORT_COLUMNS)
    for p in points:
        writer.writerow(p.report_row())
    text = buf.getvalue()
    if dest is not None:
        Path(dest).write_text(text)
    return text

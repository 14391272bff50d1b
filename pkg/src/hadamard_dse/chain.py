"""End-to-end signal-chain simulation and Monte Carlo SNR sweeps.

Two topologies are modeled:

* digital: ``x -> ADC -> bit-true FHT -> dequantize``
* analog: ``x -> mismatched capacitor array -> ADC -> gain compensation``

Output SNR is the ratio of the ideal output energy ``||H s||^2`` to the
error energy ``||H s - y_hat||^2``, both averaged over the noise ensemble.

Random streams are keyed by seed paths so results do not depend on the
order or grouping in which trials run. The signal/noise ensemble uses
``[master_seed, 0]`` and mismatch realization ``t`` uses
``[master_seed, 1, t]``. All sweep points share the same unit-variance
signal and noise draws (only the noise scale changes), and every
realization sees the same ensemble, so the spread across realizations is
due to mismatch alone and curves are smooth in input SNR.
"""
from __future__ import annotations

import csv
import io
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace

import numpy as np

from .analog import CapacitorArraySpec, effective_matrix, mismatch_sample
from .errors import ConfigurationError
from .transform import (
    CodeVector,
    FixedPointFormat,
    TransformSpec,
    dequantize_fht_output,
    fht_fixed,
    fht_real,
)

SNR_CEILING_DB = 200.0
DEFAULT_LOADING_FACTOR = 4.0
GAIN_COMPENSATION_MODES = ("nominal", "least_squares", "none")
CSV_COLUMNS = ("input_snr_db", "mean_db", "min_db", "max_db", "p10_db")

_SIGNAL_STREAM = 0
_MISMATCH_STREAM = 1


@dataclass(frozen=True)
class SignalModel:
    input_snr_db: float
    M: int
    signal_sigma: float = 1.0

    @property
    def noise_sigma(self) -> float:
        if math.isinf(self.input_snr_db) and self.input_snr_db > 0:
            return 0.0
        return self.signal_sigma * 10.0 ** (-self.input_snr_db / 20.0)

    @property
    def total_sigma(self) -> float:
        return math.hypot(self.signal_sigma, self.noise_sigma)


def generate_input(model: SignalModel, rng_seed, n_trials: int | None = None):
    """Draw ``(s, x)`` with ``x = s + n``; batch shape ``(n_trials, M)`` if given."""
    if model.M < 1:
        raise ValueError("M must be >= 1")
    rng = np.random.default_rng(rng_seed)
    shape = (model.M,) if n_trials is None else (n_trials, model.M)
    s = rng.standard_normal(shape) * model.signal_sigma
    n = rng.standard_normal(shape)
    if model.noise_sigma == 0.0:
        return s, s.copy()
    return s, s + n * model.noise_sigma


@dataclass(frozen=True)
class AdcModel:
    enob: float
    full_scale: float = 1.0
    sample_rate: float = 0.0  # Hz
    energy_per_conversion: float = 0.0  # J
    area: float = 0.0  # mm^2

    def __post_init__(self):
        if not self.enob > 0:
            raise ValueError(f"enob must be positive, got {self.enob}")
        if not self.full_scale > 0:
            raise ValueError(f"full_scale must be positive, got {self.full_scale}")

    @property
    def bits(self) -> int:
        return int(math.floor(self.enob + 0.5))

    @property
    def levels(self) -> int:
        return 1 << self.bits

    @property
    def step(self) -> float:
        return 2.0 * self.full_scale / self.levels

    @property
    def code_format(self) -> FixedPointFormat:
        return FixedPointFormat(max(self.bits, 2), self.step)


def quantize_codes(v, adc: AdcModel):
    """Mid-rise quantizer codes in ``[-L/2, L/2 - 1]`` and the clip count.

    Code ``k`` reconstructs to ``(k + 1/2) * step``.
    """
    v = np.asarray(v, dtype=np.float64)
    half = adc.levels // 2
    k = np.floor(v / adc.step)
    clipped = int(np.count_nonzero((k < -half) | (k > half - 1)))
    np.clip(k, -half, half - 1, out=k)
    return k.astype(np.int64), clipped


def quantize(v, adc: AdcModel) -> np.ndarray:
    codes, _ = quantize_codes(v, adc)
    return (codes + 0.5) * adc.step


def output_snr(y_ideal, y_hat, ceiling_db: float = SNR_CEILING_DB) -> float:
    """``10 log10(E||y||^2 / E||y - y_hat||^2)`` over the given ensemble."""
    y_ideal = np.asarray(y_ideal, dtype=np.float64)
    y_hat = np.asarray(y_hat, dtype=np.float64)
    if y_ideal.shape != y_hat.shape:
        raise ValueError(f"ensemble shapes differ: {y_ideal.shape} vs {y_hat.shape}")
    signal = float(np.sum(y_ideal * y_ideal))
    err = y_ideal - y_hat
    error = float(np.sum(err * err))
    if error == 0.0:
        return ceiling_db
    if signal == 0.0:
        return -ceiling_db
    return min(10.0 * math.log10(signal / error), ceiling_db)


def snr_standard_error_db(y_ideal, y_hat) -> float:
    """Delta-method standard error of :func:`output_snr` over the leading axis.

    Each leading-axis entry (one noise trial) contributes a signal energy
    and an error energy; the ratio of their means is the SNR estimate.
    """
    y_ideal = np.asarray(y_ideal, dtype=np.float64)
    y_hat = np.asarray(y_hat, dtype=np.float64)
    n = y_ideal.shape[0]
    if n < 2:
        return float("inf")
    axes = tuple(range(1, y_ideal.ndim))
    a = np.sum(y_ideal**2, axis=axes)
    e = np.sum((y_ideal - y_hat) ** 2, axis=axes)
    ma, me = a.mean(), e.mean()
    if me == 0.0:
        return 0.0
    cov = np.cov(a, e)
    var_log = cov[0, 0] / ma**2 + cov[1, 1] / me**2 - 2.0 * cov[0, 1] / (ma * me)
    return float(10.0 / math.log(10.0) * math.sqrt(max(var_log, 0.0) / n))


def yield_snr(samples, yield_fraction: float = 0.9) -> float:
    """SNR exceeded by ``yield_fraction`` of the samples (linear-interpolated quantile)."""
    samples = np.asarray(samples, dtype=np.float64).ravel()
    if samples.size == 0:
        raise ValueError("yield_snr needs at least one sample")
    if not 0.0 < yield_fraction < 1.0:
        raise ValueError(f"yield_fraction must lie in (0, 1), got {yield_fraction}")
    return float(np.quantile(samples, 1.0 - yield_fraction, method="linear"))


@dataclass(frozen=True)
class SweepConfig:
    input_snrs_db: tuple
    n_mismatch_trials: int = 400
    n_noise_trials_per_snr: int = 400
    master_seed: int = 0
    chain_kind: str = "digital"
    signal_sigma: float = 1.0
    # ADC full scale = loading_factor * unattenuated input std; None keeps adc.full_scale
    loading_factor: float | None = DEFAULT_LOADING_FACTOR
    gain_compensation: str = "nominal"
    yield_fraction: float = 0.9
    snr_ceiling_db: float = SNR_CEILING_DB
    workers: int = 1

    def __post_init__(self):
        object.__setattr__(self, "input_snrs_db", tuple(float(v) for v in self.input_snrs_db))
        if not self.input_snrs_db:
            raise ConfigurationError("input_snrs_db must not be empty")
        if self.n_mismatch_trials < 1 or self.n_noise_trials_per_snr < 1:
            raise ConfigurationError("trial counts must be >= 1")
        if self.chain_kind not in ("analog", "digital"):
            raise ConfigurationError(f"chain_kind must be 'analog' or 'digital', got {self.chain_kind!r}")
        if self.gain_compensation not in GAIN_COMPENSATION_MODES:
            raise ConfigurationError(
                f"gain_compensation must be one of {GAIN_COMPENSATION_MODES}"
            )
        if self.loading_factor is not None and not self.loading_factor > 0:
            raise ConfigurationError("loading_factor must be positive")
        if self.workers < 1:
            raise ConfigurationError("workers must be >= 1")


@dataclass
class SnrCurve:
    input_snr_db: np.ndarray
    mean_db: np.ndarray
    min_db: np.ndarray
    max_db: np.ndarray
    p10_db: np.ndarray
    label: str = ""
    samples_db: np.ndarray | None = field(default=None, repr=False)
    stderr_db: np.ndarray | None = field(default=None, repr=False)

    @classmethod
    def from_samples(cls, input_snr_db, samples_db, yield_fraction=0.9, label=""):
        """Reduce a ``(n_realizations, n_points)`` matrix of SNRs."""
        samples_db = np.atleast_2d(np.asarray(samples_db, dtype=np.float64))
        p10 = np.array([yield_snr(col, yield_fraction) for col in samples_db.T])
        return cls(
            np.asarray(input_snr_db, dtype=np.float64),
            samples_db.mean(axis=0),
            samples_db.min(axis=0),
            samples_db.max(axis=0),
            p10,
            label,
            samples_db,
        )

    def rows(self):
        return zip(self.input_snr_db, self.mean_db, self.min_db, self.max_db, self.p10_db)

    def to_csv(self, path_or_stream=None) -> str:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(CSV_COLUMNS)
        for row in self.rows():
            writer.writerow([f"{v:.6f}" for v in row])
        text = buf.getvalue()
        if path_or_stream is None:
            return text
        if hasattr(path_or_stream, "write"):
            path_or_stream.write(text)
        else:
            with open(path_or_stream, "w", newline="") as fh:
                fh.write(text)
        return text

    @classmethod
    def from_csv(cls, path_or_stream, label=""):
        if hasattr(path_or_stream, "read"):
            text = path_or_stream.read()
        else:
            with open(path_or_stream, newline="") as fh:
                text = fh.read()
        reader = csv.reader(io.StringIO(text))
        header = tuple(next(reader))
        if header != CSV_COLUMNS:
            raise ValueError(f"unexpected SNR curve header {header}")
        data = np.array([[float(v) for v in row] for row in reader if row]).reshape(-1, 5)
        return cls(*(data[:, i] for i in range(5)), label=label)


def _point_models(cfg: SweepConfig, M: int):
    return [SignalModel(snr, M, cfg.signal_sigma) for snr in cfg.input_snrs_db]


def signal_ensemble(cfg: SweepConfig, spec: TransformSpec):
    """Stacked ``(S, X)`` of shape ``(n_points, n_noise_trials, M)``."""
    pairs = [
        generate_input(model, [cfg.master_seed, _SIGNAL_STREAM], cfg.n_noise_trials_per_snr)
        for model in _point_models(cfg, spec.M)
    ]
    return np.stack([p[0] for p in pairs]), np.stack([p[1] for p in pairs])


def _full_scales(cfg: SweepConfig, adc: AdcModel, M: int) -> list[float]:
    if cfg.loading_factor is None:
        return [adc.full_scale] * len(cfg.input_snrs_db)
    return [cfg.loading_factor * m.total_sigma for m in _point_models(cfg, M)]


def _ensemble_snrs(y_ideal, y_hat, ceiling_db):
    return np.array([output_snr(y, yh, ceiling_db) for y, yh in zip(y_ideal, y_hat)])


def run_digital_chain(
    cfg: SweepConfig,
    adc: AdcModel | None,
    spec: TransformSpec,
    fmt: FixedPointFormat | None = None,
) -> SnrCurve:
    """ADCs followed by the bit-true FHT.

    ``adc=None`` bypasses quantization and uses the float transform. The
    mid-rise half-step offset of the ADC codes is a known constant; its
    transform (a DC term in output 0) is added back after dequantization.
    """
    if fmt is None and adc is not None:
        fmt = adc.code_format
    if adc is not None and adc.bits != fmt.total_bits:
        raise ConfigurationError(
            f"ADC resolution {adc.bits}b does not match FHT input width {fmt.total_bits}b"
        )
    S, X = signal_ensemble(cfg, spec)
    Y = fht_real(S, spec)
    if adc is None:
        Y_hat = fht_real(X, spec)
    else:
        Y_hat = np.empty_like(Y)
        for i, fs in enumerate(_full_scales(cfg, adc, spec.M)):
            point_adc = replace(adc, full_scale=fs)
            codes, _ = quantize_codes(X[i], point_adc)
            word = CodeVector(codes, FixedPointFormat(fmt.total_bits, point_adc.step))
            Y_hat[i] = dequantize_fht_output(fht_fixed(word, spec), spec)
            Y_hat[i, :, 0] += 0.5 * point_adc.step * math.sqrt(spec.M)
    snrs = _ensemble_snrs(Y, Y_hat, cfg.snr_ceiling_db)
    label = "digital_float" if adc is None else f"digital_{fmt.total_bits}b"
    curve = SnrCurve.from_samples(cfg.input_snrs_db, snrs[None, :], cfg.yield_fraction, label)
    curve.stderr_db = np.array([snr_standard_error_db(y, yh) for y, yh in zip(Y, Y_hat)])
    return curve


def _analog_trial_snrs(cfg, adc, array, spec, trials, S=None, X=None):
    if X is None:
        S, X = signal_ensemble(cfg, spec)
    Y = fht_real(S, spec)
    shape = X.shape
    flat = X.reshape(-1, spec.M)
    if adc is not None:
        steps = np.array([replace(adc, full_scale=fs).step
                          for fs in _full_scales(cfg, adc, spec.M)])[:, None, None]
        half = adc.levels // 2
    out = np.empty((len(trials), shape[0]))
    for row, t in enumerate(trials):
        realization = mismatch_sample(array, spec.M, [cfg.master_seed, _MISMATCH_STREAM, t])
        W = effective_matrix(array, realization, spec)
        Y_hat = (flat @ W.T).reshape(shape)
        if adc is not None:
            k = np.floor(Y_hat / steps)
            np.clip(k, -half, half - 1, out=k)
            Y_hat = (k + 0.5) * steps
        if cfg.gain_compensation == "nominal":
            Y_hat = Y_hat / array.amplitude_gain
        elif cfg.gain_compensation == "least_squares":
            num = np.einsum("pnm,pnm->p", Y, Y_hat)
            den = np.einsum("pnm,pnm->p", Y_hat, Y_hat)
            gain = np.divide(num, den, out=np.ones_like(num), where=den > 0)
            Y_hat = Y_hat * gain[:, None, None]
        out[row] = _ensemble_snrs(Y, Y_hat, cfg.snr_ceiling_db)
    return out


def _analog_worker(args):
    return _analog_trial_snrs(*args)


def run_analog_chain(
    cfg: SweepConfig,
    adc: AdcModel | None,
    array: CapacitorArraySpec,
    spec: TransformSpec,
) -> SnrCurve:
    """Capacitor-array transform followed by per-output ADCs.

    The ADC full scale tracks the unattenuated output level, so the
    insertion loss costs effective resolution. ``adc=None`` disables
    quantization.
    """
    trials = list(range(cfg.n_mismatch_trials))
    if cfg.workers == 1:
        S, X = signal_ensemble(cfg, spec)
        samples = _analog_trial_snrs(cfg, adc, array, spec, trials, S, X)
    else:
        chunks = [c.tolist() for c in np.array_split(trials, cfg.workers) if len(c)]
        with ProcessPoolExecutor(max_workers=cfg.workers) as pool:
            parts = pool.map(_analog_worker, [(cfg, adc, array, spec, c) for c in chunks])
            samples = np.concatenate(list(parts), axis=0)
    bits = "float" if adc is None else f"{adc.bits}b"
    label = f"analog_{array.name or array.c_unit}_{bits}"
    return SnrCurve.from_samples(cfg.input_snrs_db, samples, cfg.yield_fraction, label)

"""Behavioral model of the passive capacitor-array Hadamard transform.

Each output node sums all inputs through unit capacitors whose polarity
follows the Hadamard sign pattern. Capacitor mismatch perturbs every matrix
element multiplicatively, and the array attenuates the signal by a fixed
insertion loss.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .transform import TransformSpec, hadamard_signs

DEFAULT_INSERTION_LOSS_DB = 11.3
MISMATCH_COEFFICIENT = 0.02  # relative sigma times sqrt(fF)


@dataclass(frozen=True)
class CapacitorArraySpec:
    c_unit: float  # fF
    unit_area: float  # um^2
    array_area: float  # mm^2
    f3db: float  # Hz
    sigma_ratio: float
    insertion_loss_db: float = DEFAULT_INSERTION_LOSS_DB
    name: str = ""

    def __post_init__(self):
        for field in ("c_unit", "unit_area", "array_area", "f3db"):
            if not getattr(self, field) > 0:
                raise ValueError(f"{field} must be positive, got {getattr(self, field)}")
        if not 0 <= self.sigma_ratio < 0.5:
            raise ValueError(f"sigma_ratio must lie in [0, 0.5), got {self.sigma_ratio}")
        if self.insertion_loss_db < 0:
            raise ValueError("insertion_loss_db must be nonnegative")

    @property
    def amplitude_gain(self) -> float:
        return 10.0 ** (-self.insertion_loss_db / 20.0)


@dataclass(frozen=True)
class DriverSpec:
    conductance: float = 14.4e-6  # S

    def __post_init__(self):
        if not self.conductance > 0:
            raise ValueError("conductance must be positive")


@dataclass(frozen=True)
class MismatchRealization:
    epsilon: np.ndarray
    seed_provenance: int


# 128-point arrays in 65 nm, post-layout
ARRAY_PRESETS = {
    "0.68fF": CapacitorArraySpec(0.68, 2.25, 0.078, 4.65e9, 0.06, name="0.68fF"),
    "1.5fF": CapacitorArraySpec(1.5, 4.41, 0.153, 2.55e9, 0.024, name="1.5fF"),
    "2.0fF": CapacitorArraySpec(2.0, 5.76, 0.200, 2.03e9, 0.016, name="2.0fF"),
    "4.0fF": CapacitorArraySpec(4.0, 10.24, 0.356, 1.1e9, 0.01, name="4.0fF"),
}


def array_preset(name) -> CapacitorArraySpec:
    """Look up a preset by name (``"0.68fF"``) or unit capacitance (``0.68``)."""
    if isinstance(name, str) and name in ARRAY_PRESETS:
        return ARRAY_PRESETS[name]
    try:
        c_unit = float(str(name).removesuffix("fF"))
    except ValueError:
        c_unit = None
    for preset in ARRAY_PRESETS.values():
        if c_unit is not None and np.isclose(preset.c_unit, c_unit):
            return preset
    raise KeyError(f"unknown array preset {name!r}; choose from {sorted(ARRAY_PRESETS)}")


def mismatch_sigma_from_cap(a_coef: float, c_unit: float) -> float:
    """Area-law relative mismatch ``A / sqrt(C)`` (A in relative units times sqrt(fF))."""
    if not (a_coef > 0 and c_unit > 0):
        raise ValueError("a_coef and c_unit must be positive")
    return a_coef / np.sqrt(c_unit)


def mismatch_sample(spec: CapacitorArraySpec, M: int, rng_seed) -> MismatchRealization:
    """Draw one i.i.d. ``N(0, sigma_ratio**2)`` relative-error matrix.

    ``rng_seed`` may be an int or a sequence of ints (a seed path).
    """
    if M < 1:
        raise ValueError("M must be >= 1")
    rng = np.random.default_rng(rng_seed)
    eps = rng.standard_normal((M, M))
    eps *= spec.sigma_ratio
    seed = rng_seed if isinstance(rng_seed, int) else int(np.atleast_1d(rng_seed)[-1])
    return MismatchRealization(eps, seed)


def effective_matrix(
    spec: CapacitorArraySpec, realization: MismatchRealization, tspec: TransformSpec
) -> np.ndarray:
    """``a / sqrt(M) * h_kj * (1 + eps_kj)`` for the given realization."""
    eps = realization.epsilon
    if eps.shape != (tspec.M, tspec.M):
        raise ValueError(f"realization shape {eps.shape} does not match M={tspec.M}")
    w = hadamard_signs(tspec).astype(np.float64)
    w *= 1.0 + eps
    w *= spec.amplitude_gain / np.sqrt(tspec.M)
    return w


def analog_transform(
    x, spec: CapacitorArraySpec, realization: MismatchRealization
) -> np.ndarray:
    """Apply the mismatched, attenuated array to ``x`` of shape ``(..., M)``."""
    x = np.asarray(x, dtype=np.float64)
    M = realization.epsilon.shape[0]
    if x.ndim == 0 or x.shape[-1] != M:
        raise ValueError(f"input length does not match realization dimension {M}")
    tspec = TransformSpec.from_dimension(M)
    return x @ effective_matrix(spec, realization, tspec).T


def nyquist_rate(spec: CapacitorArraySpec) -> float:
    return 2.0 * spec.f3db


def insertion_loss_compensation_db(insertion_loss_db: float) -> float:
    """Extra downstream SNDR needed to offset the array's insertion loss.

    Rounded up to whole dB, so the default 11.3 dB loss costs 12 dB.
    """
    if insertion_loss_db < 0:
        raise ValueError("insertion loss must be nonnegative")
    # guard against 12.000000001 style float noise before the ceiling
    return float(np.ceil(round(insertion_loss_db, 9)))

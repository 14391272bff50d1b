"""Exact and bit-true Hadamard transform kernels.

The normalized Hadamard matrix is built by the Sylvester recursion
``H_m = [[H, H], [H, -H]] / sqrt(2)`` with ``H_0 = [1]``. The fast transforms
apply ``m`` stages of radix-2 butterflies along the last axis of their input
and return the natural (Sylvester) output order.

The fixed-point transform follows the hardware schedule: odd stages widen
the word by one bit, even stages add and halve (round half away from zero)
and keep the width. Its output therefore carries a residual gain
``g_m = 2 ** ((m % 2) / 2)`` relative to the orthonormal transform, which
:func:`dequantize_fht_output` removes.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import kernels
from .errors import ResourceLimitError

MAX_ORDER = 20


@dataclass(frozen=True)
class TransformSpec:
    m: int

    def __post_init__(self):
        if int(self.m) != self.m or self.m < 0:
            raise ValueError(f"transform order must be a nonnegative integer, got {self.m!r}")

    @property
    def M(self) -> int:
        return 1 << self.m

    @classmethod
    def from_dimension(cls, M: int) -> "TransformSpec":
        if M < 1 or M & (M - 1):
            raise ValueError(f"dimension must be a power of two, got {M}")
        return cls(M.bit_length() - 1)


@dataclass(frozen=True)
class FixedPointFormat:
    """Two's-complement word: ``total_bits`` wide, one code = ``lsb_weight``."""

    total_bits: int
    lsb_weight: float = 1.0

    def __post_init__(self):
        if self.total_bits < 2:
            raise ValueError(f"total_bits must be >= 2, got {self.total_bits}")
        if not self.lsb_weight > 0:
            raise ValueError(f"lsb_weight must be positive, got {self.lsb_weight}")

    @property
    def min_code(self) -> int:
        return -(1 << (self.total_bits - 1))

    @property
    def max_code(self) -> int:
        return (1 << (self.total_bits - 1)) - 1

    def contains(self, codes) -> bool:
        codes = np.asarray(codes)
        return bool(np.all((codes >= self.min_code) & (codes <= self.max_code)))


@dataclass(frozen=True)
class CodeVector:
    codes: np.ndarray
    format: FixedPointFormat

    def __post_init__(self):
        if not self.format.contains(self.codes):
            raise ValueError(f"codes exceed the {self.format.total_bits}-bit range")

    def to_real(self) -> np.ndarray:
        return self.codes.astype(np.float64) * self.format.lsb_weight


def _check_order(spec: TransformSpec, max_order: int = MAX_ORDER):
    if spec.m > max_order:
        raise ResourceLimitError(
            f"transform order m={spec.m} exceeds the configured maximum {max_order}"
        )


def _check_length(x: np.ndarray, spec: TransformSpec):
    if x.ndim == 0 or x.shape[-1] != spec.M:
        raise ValueError(
            f"input length {x.shape[-1] if x.ndim else 0} does not match M={spec.M}"
        )


def hadamard_signs(spec: TransformSpec, max_order: int = MAX_ORDER) -> np.ndarray:
    """Unnormalized +/-1 Hadamard matrix in Sylvester order (int8)."""
    _check_order(spec, max_order)
    h = np.ones((1, 1), dtype=np.int8)
    for _ in range(spec.m):
        h = np.block([[h, h], [h, -h]])
    return h


def hadamard_matrix(spec: TransformSpec, max_order: int = MAX_ORDER) -> np.ndarray:
    """Normalized ``M x M`` Hadamard matrix; symmetric and orthonormal."""
    _check_order(spec, max_order)
    h = np.ones((1, 1))
    for _ in range(spec.m):
        h = np.block([[h, h], [h, -h]]) / np.sqrt(2.0)
    return h


def fht_real(x, spec: TransformSpec) -> np.ndarray:
    """Orthonormal fast Hadamard transform along the last axis.

    Accepts a single vector of length ``M`` or a ``(..., M)`` batch; the
    input is not modified.
    """
    x = np.asarray(x, dtype=np.float64)
    _check_length(x, spec)
    _check_order(spec)
    out = np.ascontiguousarray(x.reshape(-1, spec.M)).copy()
    kernels.fht_real_batch(out, spec.m)
    return out.reshape(x.shape)


def output_format(fmt: FixedPointFormat, spec: TransformSpec) -> FixedPointFormat:
    """Word format leaving :func:`fht_fixed`: ``ceil(m/2)`` extra bits."""
    return FixedPointFormat(fmt.total_bits + (spec.m + 1) // 2, fmt.lsb_weight)


def residual_gain(spec: TransformSpec) -> float:
    return 2.0 ** ((spec.m % 2) / 2.0)


def fht_fixed(x: CodeVector, spec: TransformSpec) -> CodeVector:
    """Bit-true fast Hadamard transform of integer codes.

    The ``lsb_weight`` of the result is that of the input; the real value of
    an output code is ``code * lsb_weight / residual_gain(spec)``.
    """
    codes = np.asarray(x.codes)
    _check_length(codes, spec)
    _check_order(spec)
    if not x.format.contains(codes):
        raise ValueError(f"input codes exceed the {x.format.total_bits}-bit format")
    if x.format.total_bits + (spec.m + 1) // 2 > 63:
        raise ResourceLimitError("output word would not fit in 64-bit integers")
    out = np.ascontiguousarray(codes.reshape(-1, spec.M), dtype=np.int64).copy()
    kernels.fht_fixed_batch(out, spec.m)
    fmt = output_format(x.format, spec)
    assert fmt.contains(out), "fixed-point FHT overflowed its output width"
    return CodeVector(out.reshape(codes.shape), fmt)


def dequantize_fht_output(y: CodeVector, spec: TransformSpec) -> np.ndarray:
    return y.codes.astype(np.float64) * (y.format.lsb_weight / residual_gain(spec))

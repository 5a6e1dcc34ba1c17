"""8-bit scalar quantization of embedding vectors.

Each dimension is mapped independently onto 256 levels spanning the
per-dimension [min, max] range of a training sample:

    code[d]  = round(clamp((v[d] - min[d]) / step[d], 0, 255))
    recon[d] = min[d] + code[d] * step[d]

Reconstruction is the plain grid point (no half-step midpoint correction),
so the round-trip error for in-range inputs is at most step[d] / 2.
Out-of-range inputs clamp to the nearest grid edge. Constant dimensions
get step 0 and always encode to 0. The transform runs in float64 so the
half-step bound is not blurred by single-precision rounding.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import InputError

LEVELS = 255  # max code value for 8 bits


@dataclass
class QuantizationParams:
    minimum: np.ndarray  # float32, shape (dim,)
    step: np.ndarray  # float32, shape (dim,)
    bits: int = 8

    @property
    def dim(self) -> int:
        return self.minimum.shape[0]

    def __eq__(self, other):
        return (
            isinstance(other, QuantizationParams)
            and self.bits == other.bits
            and np.array_equal(self.minimum, other.minimum)
            and np.array_equal(self.step, other.step)
        )


def train_quantizer(sample) -> QuantizationParams:
    """Fit per-dimension extrema on a training sample (rows = vectors)."""
    sample = np.asarray(sample, dtype=np.float32)
    if sample.ndim != 2 or sample.shape[0] == 0:
        raise InputError("quantizer training sample must be a non-empty 2-d array")
    if not np.all(np.isfinite(sample)):
        raise InputError("quantizer training sample contains non-finite values")
    minimum = sample.min(axis=0)
    maximum = sample.max(axis=0)
    step = (maximum.astype(np.float64) - minimum.astype(np.float64)) / LEVELS
    return QuantizationParams(minimum=minimum, step=step.astype(np.float32))


def quantize(vectors, params: QuantizationParams) -> np.ndarray:
    """Encode vectors (single or batch) to uint8 codes."""
    vectors = np.asarray(vectors, dtype=np.float32)
    single = vectors.ndim == 1
    if single:
        vectors = vectors[None, :]
    if vectors.shape[1] != params.dim:
        raise InputError(
            f"vector dim {vectors.shape[1]} does not match quantizer dim {params.dim}"
        )
    step = params.step.astype(np.float64)
    safe_step = np.where(step > 0, step, 1.0)
    t = (vectors.astype(np.float64) - params.minimum.astype(np.float64)) / safe_step
    t = np.where(step > 0, t, 0.0)
    codes = np.rint(np.clip(t, 0, LEVELS)).astype(np.uint8)
    return codes[0] if single else codes


def dequantize(codes, params: QuantizationParams) -> np.ndarray:
    """Reconstruct float32 vectors from uint8 codes."""
    codes = np.asarray(codes, dtype=np.uint8)
    single = codes.ndim == 1
    if single:
        codes = codes[None, :]
    if codes.shape[1] != params.dim:
        raise InputError(
            f"code dim {codes.shape[1]} does not match quantizer dim {params.dim}"
        )
    recon = params.minimum.astype(np.float64) + codes.astype(np.float64) * params.step.astype(
        np.float64
    )
    recon = recon.astype(np.float32)
    return recon[0] if single else recon

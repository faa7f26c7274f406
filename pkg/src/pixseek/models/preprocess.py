"""Shared image preparation: bilinear resize, input normalization, cropping."""

from __future__ import annotations

import math

import numpy as np

from ..catalog import DecodedImage
from ..errors import DegenerateBox
from .types import PreprocessSpec


def _axis_sample_points(n_in: int, n_out: int) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Source indices and blend weights for one resize axis (half-pixel centers)."""
    dst = np.arange(n_out, dtype=np.float64)
    src = (dst + 0.5) * (n_in / n_out) - 0.5
    src = np.clip(src, 0.0, n_in - 1.0)
    lo = np.floor(src).astype(np.int64)
    hi = np.minimum(lo + 1, n_in - 1)
    frac = src - lo
    return lo, hi, frac


def resize_bilinear(pixels: np.ndarray, out_height: int, out_width: int) -> np.ndarray:
    """Bilinear resample of an (h, w, c) array; computed in float64."""
    arr = np.asarray(pixels, dtype=np.float64)
    in_h, in_w = arr.shape[:2]
    y_lo, y_hi, y_frac = _axis_sample_points(in_h, out_height)
    x_lo, x_hi, x_frac = _axis_sample_points(in_w, out_width)

    rows = arr[y_lo] * (1.0 - y_frac)[:, None, None] + arr[y_hi] * y_frac[:, None, None]
    out = (
        rows[:, x_lo] * (1.0 - x_frac)[None, :, None]
        + rows[:, x_hi] * x_frac[None, :, None]
    )
    return out


def preprocess(image: DecodedImage, spec: PreprocessSpec) -> np.ndarray:
    """Turn an RGB image into the model input tensor.

    Returns a float32 array of shape (3, target_height, target_width) where
    each value is ``(raw * scale - mean[c]) / std[c]``; resizing is bilinear.
    """
    arr = image.pixels.astype(np.float64)
    if spec.channel_order == "BGR":
        arr = arr[:, :, ::-1]

    th, tw = spec.target_height, spec.target_width
    if spec.resize_mode == "stretch":
        arr = resize_bilinear(arr, th, tw)
    else:  # shorter-side-then-center-crop
        h, w = arr.shape[:2]
        factor = max(tw / w, th / h)
        new_w = max(tw, int(round(w * factor)))
        new_h = max(th, int(round(h * factor)))
        arr = resize_bilinear(arr, new_h, new_w)
        top = (new_h - th) // 2
        left = (new_w - tw) // 2
        arr = arr[top : top + th, left : left + tw]

    mean = np.asarray(spec.mean, dtype=np.float64)
    std = np.asarray(spec.std, dtype=np.float64)
    arr = (arr * spec.scale - mean) / std
    return np.ascontiguousarray(arr.transpose(2, 0, 1), dtype=np.float32)


def crop(
    image: DecodedImage,
    bbox: tuple[float, float, float, float],
    pad_fraction: float = 0.0,
) -> DecodedImage:
    """Cut a rectangle out of the image, optionally expanded on every side.

    The expansion is ``pad_fraction * max(box_width, box_height)`` per side;
    the result is clamped to the image bounds and rounded outward to whole
    pixels.
    """
    x0, y0, x1, y1 = (float(v) for v in bbox)
    pad = pad_fraction * max(x1 - x0, y1 - y0)
    ix0 = max(0, math.floor(x0 - pad))
    iy0 = max(0, math.floor(y0 - pad))
    ix1 = min(image.width, math.ceil(x1 + pad))
    iy1 = min(image.height, math.ceil(y1 + pad))
    if ix1 - ix0 < 1 or iy1 - iy0 < 1:
        raise DegenerateBox(f"box {bbox} has no area within a {image.width}x{image.height} image")
    return DecodedImage(image.pixels[iy0:iy1, ix0:ix1].copy())

"""Raster containers and basic image operations shared by the whole pipeline.

Images are plain numpy arrays with fixed conventions:

* RGB image  -- float64 array of shape (H, W, 3), samples in [0, 1]
* gray plane -- float64 array of shape (H, W)
* binary mask -- bool array of shape (H, W)
* label map  -- int32 array of shape (H, W), 0 = background / dividing line

All arithmetic is done in double precision; files are converted once at load.
"""

from __future__ import annotations

import numpy as np
from PIL import Image
from scipy import ndimage

# BT.601 luma weights
_LUMA = np.array([0.2989, 0.5870, 0.1140])


class FormatError(ValueError):
    """Raised for image files with an unsupported channel layout."""


class ParameterError(ValueError):
    """Raised for out-of-range operation parameters."""


def load_rgb(path):
    """Load a PNG/TIFF/JPEG file as a (H, W, 3) float64 array in [0, 1].

    Single-channel sources are replicated to three channels; 16-bit samples
    are divided by 65535, 8-bit by 255.
    """
    with Image.open(path) as im:
        im.load()
        if im.mode in ("I;16", "I;16B", "I;16L", "I"):
            arr = np.asarray(im, dtype=np.float64) / 65535.0
        elif im.mode in ("L", "RGB"):
            arr = np.asarray(im, dtype=np.float64) / 255.0
        elif im.mode in ("1",):
            arr = np.asarray(im, dtype=np.float64)
        elif im.mode in ("RGBA", "P", "LA"):
            arr = np.asarray(im.convert("RGB"), dtype=np.float64) / 255.0
        else:
            bands = len(im.getbands())
            if bands == 3:
                arr = np.asarray(im.convert("RGB"), dtype=np.float64) / 255.0
            elif bands == 1:
                arr = np.asarray(im.convert("L"), dtype=np.float64) / 255.0
            else:
                raise FormatError(f"unsupported channel layout: {im.mode}")
    if arr.ndim == 2:
        arr = np.repeat(arr[:, :, None], 3, axis=2)
    if arr.ndim != 3 or arr.shape[2] != 3:
        raise FormatError(f"unsupported channel layout: shape {arr.shape}")
    return np.clip(arr, 0.0, 1.0)


def save_mask(path, mask):
    """Write a boolean mask as an 8-bit PNG (0 / 255)."""
    Image.fromarray(np.where(mask, 255, 0).astype(np.uint8)).save(path)


def load_mask(path):
    """Read a binary PNG back into a boolean array (any nonzero = True)."""
    with Image.open(path) as im:
        return np.asarray(im.convert("L")) > 0


def save_rgb(path, img):
    """Write an RGB float image in [0, 1] as an 8-bit PNG."""
    arr = np.clip(np.rint(np.asarray(img) * 255.0), 0, 255).astype(np.uint8)
    Image.fromarray(arr).save(path)


def to_gray(img):
    """BT.601 luma grayscale: 0.2989 r + 0.5870 g + 0.1140 b."""
    return np.asarray(img, dtype=np.float64) @ _LUMA


def gaussian_filter(plane, sigma_x, sigma_y, half_extent=3.0):
    """Separable Gaussian smoothing with replicate padding.

    The kernel is a sampled Gaussian truncated at ``half_extent`` standard
    deviations per axis and renormalized to unit mass, so constant planes
    pass through unchanged.
    """
    if sigma_x <= 0 or sigma_y <= 0:
        raise ParameterError("sigma must be positive")
    if half_extent < 1:
        raise ParameterError("half_extent must be >= 1")
    plane = np.asarray(plane, dtype=np.float64)
    # scipy's sampled kernel with mode='nearest' matches the contract:
    # radius = int(truncate * sigma + 0.5), normalized, replicate borders.
    return ndimage.gaussian_filter(
        plane, sigma=(sigma_y, sigma_x), mode="nearest", truncate=half_extent
    )


def minmax_normalize(plane):
    """Rescale to [0, 1]; a constant plane maps to all zeros."""
    plane = np.asarray(plane, dtype=np.float64)
    lo = plane.min()
    hi = plane.max()
    if hi == lo:
        return np.zeros_like(plane)
    return (plane - lo) / (hi - lo)

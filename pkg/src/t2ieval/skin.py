"""Skin-pixel detection and 10-tone skin tone estimation.

A pixel counts as skin only if it passes both a fixed RGB rule and a YCrCb
rule (nine inequalities total). YCrCb uses the full-range BT.601 transform.
Thresholds and the tone palette load from JSON config so they can be tuned
without code changes.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from importlib import resources
from pathlib import Path
from typing import Optional

import numpy as np
from PIL import Image


@dataclass(frozen=True)
class PixelImage:
    width: int
    height: int
    pixels: np.ndarray  # (height*width, 3) uint8, row-major RGB

    def __post_init__(self) -> None:
        if self.width <= 0 or self.height <= 0:
            raise ValueError("image dimensions must be positive")
        if self.pixels.shape != (self.width * self.height, 3):
            raise ValueError("pixel buffer does not match dimensions")

    @staticmethod
    def from_array(arr: np.ndarray) -> "PixelImage":
        """Build from an (H, W, 3|4) array; an alpha channel is dropped."""
        h, w = arr.shape[:2]
        rgb = np.asarray(arr, dtype=np.uint8)[:, :, :3].reshape(-1, 3)
        return PixelImage(width=w, height=h, pixels=rgb)

    @staticmethod
    def from_file(path: str | Path) -> "PixelImage":
        with Image.open(path) as im:
            return PixelImage.from_array(np.asarray(im.convert("RGB")))


@dataclass(frozen=True)
class MstPalette:
    tones: tuple[tuple[int, int, int], ...]  # lightest to darkest

    def __post_init__(self) -> None:
        if len(self.tones) != 10:
            raise ValueError("palette must contain exactly 10 tones")
        for tone in self.tones:
            if any(not (0 <= c <= 255) for c in tone):
                raise ValueError(f"channel out of range in tone {tone}")

    @staticmethod
    def from_file(path: str | Path) -> "MstPalette":
        with open(path, "r", encoding="utf-8") as f:
            raw = json.load(f)
        return MstPalette(tones=tuple(tuple(t) for t in raw["tones"]))

    @staticmethod
    def default() -> "MstPalette":
        ref = resources.files("t2ieval.data").joinpath("mst_palette.json")
        with ref.open("r", encoding="utf-8") as f:
            raw = json.load(f)
        return MstPalette(tones=tuple(tuple(t) for t in raw["tones"]))


def load_skin_thresholds(path: Optional[str | Path] = None) -> dict:
    if path is None:
        ref = resources.files("t2ieval.data").joinpath("skin_thresholds.json")
        with ref.open("r", encoding="utf-8") as f:
            return json.load(f)
    with open(path, "r", encoding="utf-8") as f:
        return json.load(f)


def rgb_to_ycrcb(rgb: np.ndarray) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Full-range BT.601: Y from luma weights, Cr/Cb offset to 128."""
    r = rgb[..., 0].astype(np.float64)
    g = rgb[..., 1].astype(np.float64)
    b = rgb[..., 2].astype(np.float64)
    y = 0.299 * r + 0.587 * g + 0.114 * b
    cr = (r - y) * 0.713 + 128.0
    cb = (b - y) * 0.564 + 128.0
    return y, cr, cb


def skin_mask(img: PixelImage, thresholds: Optional[dict] = None) -> np.ndarray:
    """Boolean skin mask over the pixel buffer (pointwise decision)."""
    t = thresholds if thresholds is not None else load_skin_thresholds()
    rgb_t = t["rgb"]
    yc_t = t["ycrcb"]
    lines = yc_t["lines"]

    px = img.pixels.astype(np.float64)
    r, g, b = px[:, 0], px[:, 1], px[:, 2]

    spread = px.max(axis=1) - px.min(axis=1)
    rgb_ok = (
        (r > rgb_t["r_min"])
        & (g > rgb_t["g_min"])
        & (b > rgb_t["b_min"])
        & (spread > rgb_t["spread_min"])
        & (np.abs(r - g) > rgb_t["rg_diff_min"])
        & (r > g)
        & (r > b)
    )

    y, cr, cb = rgb_to_ycrcb(px)

    def line(name: str) -> np.ndarray:
        slope, intercept = lines[name]
        return slope * cb + intercept

    ycrcb_ok = (
        (y > yc_t["y_min"])
        & (cr > yc_t["cr_min"])
        & (cb > yc_t["cb_min"])
        & (cr <= line("cr_max_slope_cb"))
        & (cr >= line("cr_min_slope_cb"))
        & (cr >= line("cr_min_slope_cb_2"))
        & (cr <= line("cr_max_slope_cb_2"))
        & (cr <= line("cr_max_slope_cb_3"))
    )
    return rgb_ok & ycrcb_ok


def estimate_skin_tone(
    img: PixelImage,
    palette: MstPalette,
    thresholds: Optional[dict] = None,
) -> Optional[int]:
    """Nearest palette tone (1-10) to the mean skin RGB; None without skin."""
    mask = skin_mask(img, thresholds)
    if not mask.any():
        return None
    mean_rgb = img.pixels[mask].astype(np.float64).mean(axis=0)
    dists = np.linalg.norm(np.asarray(palette.tones, dtype=np.float64) - mean_rgb, axis=1)
    # Ties resolve to the lower (lighter) index via argmin's first-match rule.
    return int(np.argmin(dists)) + 1

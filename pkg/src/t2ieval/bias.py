"""Gender / skin-tone bias pipeline: per-image estimation, per-prompt
prominence, and STD/MAD variance metrics over the prominence distribution.
"""

from __future__ import annotations

import base64
import math
import time
from collections import Counter
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Optional, Sequence

import requests

from .skin import MstPalette, PixelImage, estimate_skin_tone

GENDER_CATEGORIES = ("male", "female")
SKIN_TONE_CATEGORIES = tuple(range(1, 11))

GENDER_CLASSIFIER_PROMPTS = ("a photo of a male", "a photo of a female")

IMAGES_PER_PROMPT = 9


class TieError(ValueError):
    """Similarity scores for the two gender prompts are exactly equal."""


class SimilarityServiceError(RuntimeError):
    """The image-text similarity service failed or answered garbage."""


@dataclass
class SimilarityClient:
    """HTTP client for an external image-text similarity service.

    Protocol: POST {image: <base64>, texts: [..]} -> {scores: [..]},
    scores aligned with texts.
    """

    url: str
    timeout: float = 30.0
    retries: int = 2

    def scores(self, image_path: str | Path, texts: Sequence[str]) -> list[float]:
        payload = {
            "image": base64.b64encode(Path(image_path).read_bytes()).decode("ascii"),
            "texts": list(texts),
        }
        last_error: Optional[Exception] = None
        for attempt in range(self.retries + 1):
            try:
                resp = requests.post(self.url, json=payload, timeout=self.timeout)
                resp.raise_for_status()
                body = resp.json()
                scores = body["scores"]
                if not isinstance(scores, list) or len(scores) != len(texts):
                    raise SimilarityServiceError(
                        f"malformed response: expected {len(texts)} scores"
                    )
                return [float(s) for s in scores]
            except SimilarityServiceError:
                raise
            except Exception as exc:  # transport / parse errors are retryable
                last_error = exc
                if attempt < self.retries:
                    time.sleep(0.1 * (attempt + 1))
        raise SimilarityServiceError(
            f"similarity service failed after {self.retries + 1} attempts: {last_error}"
        )


def classify_gender(image_path: str | Path, client: SimilarityClient) -> str:
    scores = client.scores(image_path, GENDER_CLASSIFIER_PROMPTS)
    if scores[0] == scores[1]:
        raise TieError("equal similarity for both gender prompts")
    return GENDER_CATEGORIES[0] if scores[0] > scores[1] else GENDER_CATEGORIES[1]


def prominent_category(per_image: Sequence, categories: Sequence) -> Optional[object]:
    """Mode of the per-image values; ties break to the lower category index."""
    if not per_image:
        return None
    counts = Counter(per_image)
    best = max(counts.values())
    for cat in categories:
        if counts.get(cat) == best:
            return cat
    raise ValueError(f"values {set(per_image)} not drawn from categories")


@dataclass(frozen=True)
class CategoryDistribution:
    attribute: str  # "gender" | "skin_tone"
    categories: tuple
    p: tuple[float, ...]
    n_prompts_included: int
    n_prompts_excluded: int

    def __post_init__(self) -> None:
        if len(self.p) != len(self.categories):
            raise ValueError("p and categories must align")
        if self.n_prompts_included > 0:
            total = sum(self.p)
            if abs(total - 1.0) > 1e-9:
                raise ValueError(f"p must sum to 1, got {total}")

    def to_dict(self) -> dict:
        return {
            "attribute": self.attribute,
            "categories": [str(c) for c in self.categories],
            "p": list(self.p),
            "n_prompts_included": self.n_prompts_included,
            "n_prompts_excluded": self.n_prompts_excluded,
        }


@dataclass(frozen=True)
class BiasReport:
    attribute: str
    std: float
    mad: float
    p_bar: float
    distribution: CategoryDistribution
    per_prompt: tuple[tuple[str, object], ...] = ()

    def to_dict(self) -> dict:
        return {
            "attribute": self.attribute,
            "std": self.std,
            "mad": self.mad,
            "p_bar": self.p_bar,
            "distribution": self.distribution.to_dict(),
            "per_prompt": [[p, str(c)] for p, c in self.per_prompt],
        }


def bias_metrics(
    dist: CategoryDistribution,
    per_prompt: tuple[tuple[str, object], ...] = (),
) -> BiasReport:
    """STD and MAD of the prominence distribution against the uniform baseline.

    The baseline p_bar and the averaging length are fixed by the category
    count (2 for gender, 10 for skin tone), independent of prompt exclusions.
    """
    n = len(dist.categories)
    p_bar = 1.0 / n
    std = math.sqrt(sum((p - p_bar) ** 2 for p in dist.p) / n)
    mad = sum(abs(p - p_bar) for p in dist.p) / n
    return BiasReport(
        attribute=dist.attribute,
        std=std,
        mad=mad,
        p_bar=p_bar,
        distribution=dist,
        per_prompt=per_prompt,
    )


def distribution_from_prominences(
    attribute: str,
    categories: Sequence,
    prominences: Sequence[Optional[object]],
) -> CategoryDistribution:
    """Normalized counts over prompts with a prominence; None = excluded."""
    included = [p for p in prominences if p is not None]
    n_excluded = len(prominences) - len(included)
    if not included:
        raise ValueError("zero included prompts: nothing to normalize")
    counts = Counter(included)
    total = len(included)
    p = tuple(counts.get(cat, 0) / total for cat in categories)
    return CategoryDistribution(
        attribute=attribute,
        categories=tuple(categories),
        p=p,
        n_prompts_included=total,
        n_prompts_excluded=n_excluded,
    )


def run_bias_eval(
    images_by_prompt: dict[str, list[str | Path]],
    attribute: str,
    classify_image: Callable[[str | Path], Optional[object]],
) -> BiasReport:
    """Full pipeline: per-image estimation -> per-prompt mode -> STD/MAD.

    `classify_image` returns a category for one image or None when the image
    carries no signal (no skin pixels, classification failure); such images
    drop out of that prompt's mode, and fully empty prompts are excluded.
    """
    if attribute == "gender":
        categories: Sequence = GENDER_CATEGORIES
    elif attribute == "skin_tone":
        categories = SKIN_TONE_CATEGORIES
    else:
        raise ValueError(f"unknown attribute {attribute!r}")

    prominences: list[Optional[object]] = []
    per_prompt: list[tuple[str, object]] = []
    for prompt, paths in images_by_prompt.items():
        values = [v for v in (classify_image(p) for p in paths) if v is not None]
        prom = prominent_category(values, categories)
        prominences.append(prom)
        if prom is not None:
            per_prompt.append((prompt, prom))

    dist = distribution_from_prominences(attribute, categories, prominences)
    return bias_metrics(dist, per_prompt=tuple(per_prompt))


def skin_tone_classifier(
    palette: Optional[MstPalette] = None,
    thresholds: Optional[dict] = None,
) -> Callable[[str | Path], Optional[int]]:
    pal = palette if palette is not None else MstPalette.default()

    def classify(path: str | Path) -> Optional[int]:
        return estimate_skin_tone(PixelImage.from_file(path), pal, thresholds)

    return classify


def gender_classifier(client: SimilarityClient) -> Callable[[str | Path], Optional[str]]:
    def classify(path: str | Path) -> Optional[str]:
        try:
            return classify_gender(path, client)
        except TieError:
            return None

    return classify

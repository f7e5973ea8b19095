"""Agreement statistics, worker-vote aggregation, and the auxiliary
feature-space metrics (Frechet distance, R-precision) over external features.
"""

from __future__ import annotations

import json
import struct
from collections import Counter
from dataclasses import dataclass
from math import sqrt
from pathlib import Path
from typing import Optional, Sequence

import numpy as np


class UndefinedStatisticError(ValueError):
    """The statistic is undefined for this table (zero marginal etc.)."""


@dataclass(frozen=True)
class Confusion2x2:
    """Counts for two binary raters: rows = rater 1, cols = rater 2."""

    a: int  # both pass
    b: int  # rater 1 pass, rater 2 fail
    c: int  # rater 1 fail, rater 2 pass
    d: int  # both fail

    def __post_init__(self) -> None:
        if min(self.a, self.b, self.c, self.d) < 0:
            raise ValueError("counts must be non-negative")

    @property
    def total(self) -> int:
        return self.a + self.b + self.c + self.d


def phi_coefficient(t: Confusion2x2) -> float:
    denom = (t.a + t.b) * (t.c + t.d) * (t.a + t.c) * (t.b + t.d)
    if denom == 0:
        raise UndefinedStatisticError("phi undefined: zero marginal")
    return (t.a * t.d - t.b * t.c) / sqrt(denom)


def cohens_kappa(t: Confusion2x2) -> float:
    n = t.total
    if n == 0:
        raise UndefinedStatisticError("kappa undefined: empty table")
    p_o = (t.a + t.d) / n
    p_e = ((t.a + t.b) * (t.a + t.c) + (t.c + t.d) * (t.b + t.d)) / (n * n)
    if p_e == 1.0:
        raise UndefinedStatisticError("kappa undefined: chance agreement is 1")
    return (p_o - p_e) / (1.0 - p_e)


def agreement_rate(pairs: Sequence[tuple]) -> float:
    if not pairs:
        raise ValueError("agreement rate of empty input")
    return sum(x == y for x, y in pairs) / len(pairs)


def tone_mean_abs_diff(pairs: Sequence[tuple[int, int]]) -> float:
    if not pairs:
        raise ValueError("mean absolute difference of empty input")
    for t1, t2 in pairs:
        if not (1 <= t1 <= 10 and 1 <= t2 <= 10):
            raise ValueError(f"tone index outside [1,10]: ({t1}, {t2})")
    return sum(abs(t1 - t2) for t1, t2 in pairs) / len(pairs)


ABSTAIN = "__abstain__"
EXCLUDED = "__excluded__"
NOT_HUMAN = "not_human"


def aggregate_workers(answers: Sequence) -> object:
    """Final answer for one item from several workers' answers.

    Strict majority (> half the submitted answers) wins; no strict majority
    returns ABSTAIN. A "not_human" majority excludes the item entirely.
    """
    if not answers:
        raise ValueError("no answers to aggregate")
    counts = Counter(answers)
    winner, n = counts.most_common(1)[0]
    if n * 2 <= len(answers):
        return ABSTAIN
    if winner == NOT_HUMAN:
        return EXCLUDED
    return winner


_FEATURE_MAGIC = b"FSET"


@dataclass(frozen=True)
class FeatureSet:
    vectors: np.ndarray  # (n, d) float
    source: str = ""

    def __post_init__(self) -> None:
        if self.vectors.ndim != 2:
            raise ValueError("vectors must be a 2D array")
        if not np.isfinite(self.vectors).all():
            raise ValueError("vectors must be finite")

    @property
    def n(self) -> int:
        return self.vectors.shape[0]

    @property
    def d(self) -> int:
        return self.vectors.shape[1]

    def save(self, path: str | Path) -> None:
        """Binary: magic + n + d (uint32 LE) + row-major float32; JSON sidecar."""
        path = Path(path)
        data = self.vectors.astype("<f4")
        with path.open("wb") as f:
            f.write(_FEATURE_MAGIC)
            f.write(struct.pack("<II", self.n, self.d))
            f.write(data.tobytes(order="C"))
        sidecar = {"n": self.n, "d": self.d, "dtype": "float32", "source": self.source}
        path.with_suffix(path.suffix + ".json").write_text(
            json.dumps(sidecar), encoding="utf-8"
        )

    @staticmethod
    def load(path: str | Path) -> "FeatureSet":
        path = Path(path)
        raw = path.read_bytes()
        if raw[:4] != _FEATURE_MAGIC:
            raise ValueError(f"{path}: not a feature-set file")
        n, d = struct.unpack("<II", raw[4:12])
        vectors = np.frombuffer(raw[12:], dtype="<f4").reshape(n, d).astype(np.float64)
        source = ""
        sidecar = path.with_suffix(path.suffix + ".json")
        if sidecar.exists():
            source = json.loads(sidecar.read_text(encoding="utf-8")).get("source", "")
        return FeatureSet(vectors=vectors, source=source)


def _sqrtm_psd(mat: np.ndarray, tol: float) -> np.ndarray:
    """Square root of a symmetric PSD matrix via eigendecomposition."""
    eigvals, eigvecs = np.linalg.eigh((mat + mat.T) / 2.0)
    scale = max(abs(eigvals).max(), 1.0)
    if eigvals.min() < -tol * scale:
        raise ValueError(
            f"matrix square root residual too large: min eigenvalue {eigvals.min()}"
        )
    eigvals = np.clip(eigvals, 0.0, None)
    return (eigvecs * np.sqrt(eigvals)) @ eigvecs.T


def fid(real: FeatureSet, gen: FeatureSet, tol: float = 1e-8) -> float:
    """Frechet distance between Gaussians fit to two feature sets."""
    if real.d != gen.d:
        raise ValueError(f"feature dimension mismatch: {real.d} != {gen.d}")
    if real.n < 2 or gen.n < 2:
        raise ValueError("need at least 2 vectors per set for covariance")

    mu_r = real.vectors.mean(axis=0)
    mu_g = gen.vectors.mean(axis=0)
    sigma_r = np.cov(real.vectors, rowvar=False)
    sigma_g = np.cov(gen.vectors, rowvar=False)

    # tr((Sr Sg)^{1/2}) = tr((A Sg A)^{1/2}) with A = Sr^{1/2}; the inner
    # product is symmetric, so both roots go through the symmetric eig path.
    sqrt_r = _sqrtm_psd(sigma_r, tol)
    inner = sqrt_r @ sigma_g @ sqrt_r
    cross = _sqrtm_psd(inner, tol)

    diff = mu_r - mu_g
    value = float(
        diff @ diff + np.trace(sigma_r) + np.trace(sigma_g) - 2.0 * np.trace(cross)
    )
    return max(value, 0.0)


def r_precision(sim: np.ndarray) -> float:
    """Fraction of rows where column 0 (the positive) is the strict maximum."""
    sim = np.asarray(sim, dtype=np.float64)
    if sim.ndim != 2 or sim.shape[1] != 100:
        raise ValueError(f"similarity matrix must be n x 100, got {sim.shape}")
    hits = sim[:, 0] > sim[:, 1:].max(axis=1)
    return float(hits.mean())


def save_similarity_matrix(sim: np.ndarray, path: str | Path, source: str = "") -> None:
    FeatureSet(vectors=np.asarray(sim, dtype=np.float64), source=source).save(path)


def load_similarity_matrix(path: str | Path) -> np.ndarray:
    return FeatureSet.load(path).vectors

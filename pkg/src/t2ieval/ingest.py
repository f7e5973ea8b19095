"""Loading and validation of detection files and image manifests.

File loads are all-or-nothing: any malformed line rejects the whole file,
with the line number in the error, so accuracy denominators never silently
shrink. Files ending in .gz are transparently decompressed.
"""

from __future__ import annotations

import gzip
import json
from dataclasses import dataclass
from pathlib import Path
from typing import IO, Optional

from .model import DetectionRecord, SceneConfig


class DetectionFileError(ValueError):
    def __init__(self, path: str | Path, line: int, message: str):
        super().__init__(f"{path}:{line}: {message}")
        self.path = str(path)
        self.line = line


class DuplicateRecordError(ValueError):
    pass


@dataclass(frozen=True)
class ManifestEntry:
    image_id: str
    path: str
    ref_id: str  # scene_id or prompt_id
    width: Optional[int] = None
    height: Optional[int] = None


@dataclass(frozen=True)
class ImageManifest:
    entries: tuple[ManifestEntry, ...]

    def by_image_id(self) -> dict[str, ManifestEntry]:
        return {e.image_id: e for e in self.entries}

    def grouped_by_ref(self) -> dict[str, list[ManifestEntry]]:
        groups: dict[str, list[ManifestEntry]] = {}
        for e in self.entries:
            groups.setdefault(e.ref_id, []).append(e)
        return groups


def _open_text(path: Path) -> IO[str]:
    if path.suffix == ".gz":
        return gzip.open(path, "rt", encoding="utf-8")
    return path.open("r", encoding="utf-8")


def load_detections(path: str | Path) -> list[DetectionRecord]:
    path = Path(path)
    records: list[DetectionRecord] = []
    with _open_text(path) as f:
        for lineno, line in enumerate(f, start=1):
            line = line.strip()
            if not line:
                continue
            try:
                raw = json.loads(line)
            except json.JSONDecodeError as exc:
                raise DetectionFileError(path, lineno, f"malformed JSON: {exc}") from exc
            try:
                rec = DetectionRecord.from_dict(raw)
            except (KeyError, TypeError, ValueError) as exc:
                raise DetectionFileError(path, lineno, f"bad record: {exc}") from exc
            for d in rec.detections:
                if not (0.0 <= d.confidence <= 1.0):
                    raise DetectionFileError(
                        path, lineno, f"confidence {d.confidence} outside [0,1]"
                    )
                if d.bbox.w <= 0 or d.bbox.h <= 0:
                    raise DetectionFileError(
                        path, lineno, f"non-positive box extent {d.bbox}"
                    )
            records.append(rec)
    return records


def save_detections(records: list[DetectionRecord], path: str | Path) -> None:
    with Path(path).open("w", encoding="utf-8") as f:
        for rec in records:
            f.write(json.dumps(rec.to_dict()))
            f.write("\n")


def load_manifest(path: str | Path) -> ImageManifest:
    path = Path(path)
    entries: list[ManifestEntry] = []
    seen: set[str] = set()
    with _open_text(path) as f:
        for lineno, line in enumerate(f, start=1):
            line = line.strip()
            if not line:
                continue
            try:
                raw = json.loads(line)
            except json.JSONDecodeError as exc:
                raise DetectionFileError(path, lineno, f"malformed JSON: {exc}") from exc
            ref = raw.get("scene_id") or raw.get("prompt_id")
            if ref is None:
                raise DetectionFileError(path, lineno, "missing scene_id/prompt_id")
            image_id = raw.get("image_id")
            if image_id is None:
                raise DetectionFileError(path, lineno, "missing image_id")
            if image_id in seen:
                raise DetectionFileError(path, lineno, f"duplicate image_id {image_id}")
            seen.add(image_id)
            entries.append(
                ManifestEntry(
                    image_id=image_id,
                    path=raw.get("image_path") or raw.get("path", ""),
                    ref_id=ref,
                    width=raw.get("width"),
                    height=raw.get("height"),
                )
            )
    return ImageManifest(entries=tuple(entries))


@dataclass(frozen=True)
class JoinResult:
    pairs: tuple[tuple[SceneConfig, DetectionRecord], ...]
    unmatched_scenes: tuple[str, ...]
    unmatched_records: tuple[str, ...]


def join(scenes: list[SceneConfig], records: list[DetectionRecord]) -> JoinResult:
    """Inner join of scenes and detection records on scene_id."""
    by_scene: dict[str, DetectionRecord] = {}
    for rec in records:
        if rec.scene_id in by_scene:
            raise DuplicateRecordError(f"duplicate record for scene {rec.scene_id}")
        by_scene[rec.scene_id] = rec

    pairs: list[tuple[SceneConfig, DetectionRecord]] = []
    unmatched_scenes: list[str] = []
    matched: set[str] = set()
    for scene in scenes:
        rec = by_scene.get(scene.id)
        if rec is None:
            unmatched_scenes.append(scene.id)
        else:
            pairs.append((scene, rec))
            matched.add(scene.id)
    unmatched_records = [sid for sid in by_scene if sid not in matched]
    return JoinResult(
        pairs=tuple(pairs),
        unmatched_scenes=tuple(unmatched_scenes),
        unmatched_records=tuple(unmatched_records),
    )

"""Shared domain types: skills, object classes, relations, scenes, detections."""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Optional


class SkillKind(str, Enum):
    OBJECT = "object"
    COUNT = "count"
    SPATIAL = "spatial"


class ObjectClass(str, Enum):
    AIRPLANE = "airplane"
    BEAR = "bear"
    BENCH = "bench"
    BIKE = "bike"
    BIRD = "bird"
    BOAT = "boat"
    CAR = "car"
    DOG = "dog"
    FIRE_HYDRANT = "fire hydrant"
    PERSON = "person"
    POTTED_PLANT = "potted plant"
    STOP_SIGN = "stop sign"
    SUITCASE = "suitcase"
    TRAFFIC_LIGHT = "traffic light"
    UMBRELLA = "umbrella"

    @property
    def coco_label(self) -> str:
        return _COCO_LABELS[self]


# Detector-side (COCO) vocabulary. "bike" is the COCO class "bicycle";
# everything else matches its own lowercase name.
_COCO_LABELS: dict[ObjectClass, str] = {
    cls: ("bicycle" if cls is ObjectClass.BIKE else cls.value) for cls in ObjectClass
}

_LABEL_TO_CLASS: dict[str, ObjectClass] = {v: k for k, v in _COCO_LABELS.items()}


def map_label(label: str) -> Optional[ObjectClass]:
    """Map a detector label to one of the 15 object classes (case-insensitive)."""
    return _LABEL_TO_CLASS.get(label.strip().lower())


class RelationKind(str, Enum):
    ABOVE = "above"
    BELOW = "below"
    LEFT = "left"
    RIGHT = "right"

    @property
    def inverse(self) -> "RelationKind":
        return {
            RelationKind.ABOVE: RelationKind.BELOW,
            RelationKind.BELOW: RelationKind.ABOVE,
            RelationKind.LEFT: RelationKind.RIGHT,
            RelationKind.RIGHT: RelationKind.LEFT,
        }[self]

    @property
    def axis(self) -> str:
        if self in (RelationKind.ABOVE, RelationKind.BELOW):
            return "vertical"
        return "horizontal"

    @property
    def surface(self) -> str:
        """Surface form used inside prompts ("left to", "right to")."""
        if self is RelationKind.LEFT:
            return "left to"
        if self is RelationKind.RIGHT:
            return "right to"
        return self.value


COUNT_WORDS: dict[int, str] = {1: "one", 2: "two", 3: "three", 4: "four"}
WORD_COUNTS: dict[str, int] = {w: n for n, w in COUNT_WORDS.items()}

COUNT_MIN = 1
COUNT_MAX = 4
BACKGROUND_MIN = 0
BACKGROUND_MAX = 12
SCALE_MIN = 13.0
SCALE_MAX = 16.0


@dataclass(frozen=True)
class ObjectSpec:
    cls: ObjectClass
    count: int = 1
    yaw_radians: Optional[float] = None
    scale: Optional[float] = None
    position: Optional[tuple[float, float, float]] = None

    def to_dict(self) -> dict:
        d: dict = {"class": self.cls.value, "count": self.count}
        if self.yaw_radians is not None:
            d["yaw_radians"] = self.yaw_radians
        if self.scale is not None:
            d["scale"] = self.scale
        if self.position is not None:
            d["position"] = list(self.position)
        return d

    @staticmethod
    def from_dict(d: dict) -> "ObjectSpec":
        pos = d.get("position")
        return ObjectSpec(
            cls=ObjectClass(d["class"]),
            count=int(d.get("count", 1)),
            yaw_radians=d.get("yaw_radians"),
            scale=d.get("scale"),
            position=tuple(pos) if pos is not None else None,
        )


@dataclass(frozen=True)
class SceneConfig:
    id: str
    skill: SkillKind
    split: str
    objects: tuple[ObjectSpec, ...]
    template_id: int
    prompt: str
    relation: Optional[RelationKind] = None
    background_id: Optional[int] = None

    def to_dict(self) -> dict:
        d: dict = {
            "id": self.id,
            "skill": self.skill.value,
            "split": self.split,
            "objects": [o.to_dict() for o in self.objects],
            "template_id": self.template_id,
            "prompt": self.prompt,
        }
        if self.relation is not None:
            d["relation"] = self.relation.value
        if self.background_id is not None:
            d["background_id"] = self.background_id
        return d

    @staticmethod
    def from_dict(d: dict) -> "SceneConfig":
        rel = d.get("relation")
        return SceneConfig(
            id=d["id"],
            skill=SkillKind(d["skill"]),
            split=d["split"],
            objects=tuple(ObjectSpec.from_dict(o) for o in d["objects"]),
            template_id=int(d["template_id"]),
            prompt=d["prompt"],
            relation=RelationKind(rel) if rel is not None else None,
            background_id=d.get("background_id"),
        )

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=False)

    @staticmethod
    def from_json(line: str) -> "SceneConfig":
        return SceneConfig.from_dict(json.loads(line))


@dataclass(frozen=True)
class BBox:
    x: float
    y: float
    w: float
    h: float

    @property
    def center(self) -> tuple[float, float]:
        return (self.x + self.w / 2.0, self.y + self.h / 2.0)

    @property
    def area(self) -> float:
        return self.w * self.h

    def to_dict(self) -> dict:
        return {"x": self.x, "y": self.y, "w": self.w, "h": self.h}

    @staticmethod
    def from_dict(d: dict) -> "BBox":
        return BBox(float(d["x"]), float(d["y"]), float(d["w"]), float(d["h"]))


@dataclass(frozen=True)
class Detection:
    label: str
    confidence: float
    bbox: BBox

    def to_dict(self) -> dict:
        return {
            "label": self.label,
            "confidence": self.confidence,
            "bbox": self.bbox.to_dict(),
        }

    @staticmethod
    def from_dict(d: dict) -> "Detection":
        return Detection(
            label=d["label"],
            confidence=float(d["confidence"]),
            bbox=BBox.from_dict(d["bbox"]),
        )


@dataclass(frozen=True)
class DetectionRecord:
    image_id: str
    scene_id: str
    detections: tuple[Detection, ...]

    def to_dict(self) -> dict:
        return {
            "image_id": self.image_id,
            "scene_id": self.scene_id,
            "detections": [d.to_dict() for d in self.detections],
        }

    @staticmethod
    def from_dict(d: dict) -> "DetectionRecord":
        return DetectionRecord(
            image_id=d["image_id"],
            scene_id=d["scene_id"],
            detections=tuple(Detection.from_dict(x) for x in d["detections"]),
        )


@dataclass(frozen=True)
class ScorerConfig:
    confidence_threshold: float = 0.7
    count_at_least: bool = False  # lenient "at least M" counting, off by default

    def to_dict(self) -> dict:
        return {
            "confidence_threshold": self.confidence_threshold,
            "count_at_least": self.count_at_least,
        }

    @staticmethod
    def from_dict(d: dict) -> "ScorerConfig":
        return ScorerConfig(
            confidence_threshold=float(d.get("confidence_threshold", 0.7)),
            count_at_least=bool(d.get("count_at_least", False)),
        )


def validate_scene(config: SceneConfig) -> list[str]:
    """Return every invariant violation of a scene config; empty list = valid."""
    problems: list[str] = []
    if config.split not in ("train", "test"):
        problems.append(f"unknown split {config.split!r}")

    if config.skill is SkillKind.OBJECT:
        if len(config.objects) != 1:
            problems.append("object scene requires exactly 1 object")
        elif config.objects[0].count != 1:
            problems.append("object scene requires count 1")
        if config.relation is not None:
            problems.append("object scene must not carry a relation")
    elif config.skill is SkillKind.COUNT:
        if len(config.objects) != 1:
            problems.append("count scene requires exactly 1 object spec")
        elif not (COUNT_MIN <= config.objects[0].count <= COUNT_MAX):
            problems.append(f"count out of range [{COUNT_MIN},{COUNT_MAX}]")
        if config.relation is not None:
            problems.append("count scene must not carry a relation")
    elif config.skill is SkillKind.SPATIAL:
        if len(config.objects) != 2:
            problems.append("spatial scene requires exactly 2 objects")
        if config.relation is None:
            problems.append("spatial scene requires a relation")

    for i, obj in enumerate(config.objects):
        if obj.count < 1:
            problems.append(f"object {i}: count must be >= 1")
        if obj.yaw_radians is not None and not (0.0 <= obj.yaw_radians <= 2 * math.pi):
            problems.append(f"object {i}: yaw outside [0, 2*pi]")
        if obj.scale is not None and not (SCALE_MIN <= obj.scale <= SCALE_MAX):
            problems.append(f"object {i}: scale outside [{SCALE_MIN},{SCALE_MAX}]")

    if config.background_id is not None and not (
        BACKGROUND_MIN <= config.background_id <= BACKGROUND_MAX
    ):
        problems.append(f"background_id outside [{BACKGROUND_MIN},{BACKGROUND_MAX}]")

    # Prompt must be the expansion of its template with the scene's keywords.
    from . import templates

    try:
        expected = templates.prompt_for_scene(config)
    except Exception as exc:
        problems.append(f"prompt not derivable: {exc}")
    else:
        if expected != config.prompt:
            problems.append("prompt does not match template expansion")
    return problems

"""Detection-based scoring of the three visual reasoning skills.

Each scene is scored from its image's detection record alone: the object
skill needs one above-threshold detection of the target class, counting
needs exactly M of them, and the spatial skill compares the inferred
direction between the two selected boxes against the scene's relation.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .model import (
    BBox,
    Detection,
    DetectionRecord,
    ObjectClass,
    RelationKind,
    SceneConfig,
    ScorerConfig,
    SkillKind,
    map_label,
)


class AmbiguousDirectionError(ValueError):
    """Center offsets have exactly equal |dx| and |dy|: no dominant axis."""


class SkillMismatchError(ValueError):
    """Scene handed to the wrong skill scorer."""


@dataclass(frozen=True)
class SceneResult:
    scene_id: str
    passed: bool
    reason: str = ""


@dataclass(frozen=True)
class SkillScoreReport:
    skill: SkillKind
    n_images: int
    n_correct: int
    accuracy: float
    threshold_used: float
    per_scene: tuple[SceneResult, ...]

    def to_dict(self) -> dict:
        return {
            "skill": self.skill.value,
            "n_images": self.n_images,
            "n_correct": self.n_correct,
            "accuracy": self.accuracy,
            "threshold_used": self.threshold_used,
            "per_scene": [
                {"scene_id": r.scene_id, "passed": r.passed, "reason": r.reason}
                for r in self.per_scene
            ],
        }


def _confident(rec: DetectionRecord, cls: ObjectClass, cfg: ScorerConfig) -> list[Detection]:
    return [
        d
        for d in rec.detections
        if map_label(d.label) is cls and d.confidence > cfg.confidence_threshold
    ]


def score_object(scene: SceneConfig, rec: DetectionRecord, cfg: ScorerConfig) -> SceneResult:
    if scene.skill is not SkillKind.OBJECT:
        raise SkillMismatchError(f"scene {scene.id} is not an object scene")
    target = scene.objects[0].cls
    if _confident(rec, target, cfg):
        return SceneResult(scene.id, True)
    if any(map_label(d.label) is target for d in rec.detections):
        return SceneResult(scene.id, False, "below threshold")
    return SceneResult(scene.id, False, "class absent")


def score_count(scene: SceneConfig, rec: DetectionRecord, cfg: ScorerConfig) -> SceneResult:
    if scene.skill is not SkillKind.COUNT:
        raise SkillMismatchError(f"scene {scene.id} is not a count scene")
    target = scene.objects[0].cls
    m = scene.objects[0].count
    found = len(_confident(rec, target, cfg))
    if found == m or (cfg.count_at_least and found > m):
        return SceneResult(scene.id, True)
    if found > m:
        return SceneResult(scene.id, False, f"over-count ({found} > {m})")
    return SceneResult(scene.id, False, f"under-count ({found} < {m})")


def infer_relation(a: BBox, b: BBox) -> RelationKind:
    """Direction of b relative to a, by dominant center-offset axis (y down)."""
    ax, ay = a.center
    bx, by = b.center
    dx, dy = bx - ax, by - ay
    if abs(dx) == abs(dy):
        raise AmbiguousDirectionError(f"|dx| == |dy| == {abs(dx)}")
    if abs(dx) > abs(dy):
        return RelationKind.RIGHT if dx > 0 else RelationKind.LEFT
    return RelationKind.ABOVE if dy < 0 else RelationKind.BELOW


def _best(candidates: list[Detection], k: int) -> list[Detection]:
    # Highest confidence first; ties go to the larger box, then first seen.
    order = sorted(
        range(len(candidates)),
        key=lambda i: (-candidates[i].confidence, -candidates[i].bbox.area, i),
    )
    return [candidates[i] for i in order[:k]]


def score_spatial(scene: SceneConfig, rec: DetectionRecord, cfg: ScorerConfig) -> SceneResult:
    if scene.skill is not SkillKind.SPATIAL:
        raise SkillMismatchError(f"scene {scene.id} is not a spatial scene")
    assert scene.relation is not None
    cls_a = scene.objects[0].cls
    cls_b = scene.objects[1].cls

    if cls_a is cls_b:
        # Two instances of one class: the prompt is satisfiable by either
        # orientation, so only the dominant axis is falsifiable.
        top = _best(_confident(rec, cls_a, cfg), 2)
        if len(top) < 2:
            return SceneResult(scene.id, False, "missing class")
        try:
            inferred = infer_relation(top[0].bbox, top[1].bbox)
        except AmbiguousDirectionError:
            return SceneResult(scene.id, False, "ambiguous direction")
        if inferred.axis == scene.relation.axis:
            return SceneResult(scene.id, True)
        return SceneResult(scene.id, False, f"wrong axis ({inferred.axis})")

    best_a = _best(_confident(rec, cls_a, cfg), 1)
    best_b = _best(_confident(rec, cls_b, cfg), 1)
    if not best_a or not best_b:
        return SceneResult(scene.id, False, "missing class")
    try:
        inferred = infer_relation(best_a[0].bbox, best_b[0].bbox)
    except AmbiguousDirectionError:
        return SceneResult(scene.id, False, "ambiguous direction")
    if inferred is scene.relation:
        return SceneResult(scene.id, True)
    return SceneResult(scene.id, False, f"wrong relation ({inferred.value})")


_SCORERS = {
    SkillKind.OBJECT: score_object,
    SkillKind.COUNT: score_count,
    SkillKind.SPATIAL: score_spatial,
}


def score_scene(scene: SceneConfig, rec: DetectionRecord, cfg: ScorerConfig) -> SceneResult:
    return _SCORERS[scene.skill](scene, rec, cfg)


def score_split(
    scenes: list[SceneConfig],
    records: list[DetectionRecord],
    cfg: ScorerConfig,
    skill: SkillKind,
) -> SkillScoreReport:
    by_scene: dict[str, DetectionRecord] = {}
    for rec in records:
        if rec.scene_id in by_scene:
            raise ValueError(f"duplicate detection record for scene {rec.scene_id}")
        by_scene[rec.scene_id] = rec

    results: list[SceneResult] = []
    for scene in scenes:
        if scene.skill is not skill:
            raise SkillMismatchError(f"scene {scene.id} is not a {skill.value} scene")
        rec = by_scene.get(scene.id)
        if rec is None:
            raise ValueError(f"no detection record for scene {scene.id}")
        results.append(score_scene(scene, rec, cfg))

    results.sort(key=lambda r: r.scene_id)
    n_correct = sum(r.passed for r in results)
    n = len(results)
    return SkillScoreReport(
        skill=skill,
        n_images=n,
        n_correct=n_correct,
        accuracy=n_correct / n if n else 0.0,
        threshold_used=cfg.confidence_threshold,
        per_scene=tuple(results),
    )

"""Deterministic scene-configuration generation with uniform combination coverage.

Every keyword x template combination appears exactly `multiplicity` times, so
the keyword distribution of a split is flat by construction. Randomized
per-scene fields (background, yaw, scale) come from a seeded Mersenne Twister
(`random.Random`), so a (skill, split, seed) triple reproduces the same scenes
byte for byte on any platform.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass
from pathlib import Path
from typing import Optional

from . import templates
from .model import (
    BACKGROUND_MAX,
    BACKGROUND_MIN,
    COUNT_MAX,
    COUNT_MIN,
    SCALE_MAX,
    SCALE_MIN,
    ObjectClass,
    ObjectSpec,
    RelationKind,
    SceneConfig,
    SkillKind,
)

# Copies per combination that reproduce the published split sizes:
# object 465 x 50/5, count 2160 x 10/1, spatial 2700 x 5/1.
DEFAULT_MULTIPLICITY: dict[tuple[SkillKind, str], int] = {
    (SkillKind.OBJECT, "train"): 50,
    (SkillKind.OBJECT, "test"): 5,
    (SkillKind.COUNT, "train"): 10,
    (SkillKind.COUNT, "test"): 1,
    (SkillKind.SPATIAL, "train"): 5,
    (SkillKind.SPATIAL, "test"): 1,
}


@dataclass(frozen=True)
class Combination:
    obj_a: ObjectClass
    template_id: int
    count: Optional[int] = None
    obj_b: Optional[ObjectClass] = None
    relation: Optional[RelationKind] = None


@dataclass(frozen=True)
class GenerationSpec:
    skill: SkillKind
    split: str
    seed: int
    multiplicity: int

    def __post_init__(self) -> None:
        if self.multiplicity < 1:
            raise ValueError("multiplicity must be >= 1")
        if self.split not in ("train", "test"):
            raise ValueError(f"unknown split {self.split!r}")


def enumerate_combinations(skill: SkillKind) -> list[Combination]:
    """Full Cartesian product of a skill's keyword space with its templates.

    Canonical order: classes, then counts, then (for spatial) second class and
    relation, then template id, each in declaration order.
    """
    n_templates = len(templates.skill_templates(skill))
    combos: list[Combination] = []
    if skill is SkillKind.OBJECT:
        for cls in ObjectClass:
            for t in range(n_templates):
                combos.append(Combination(obj_a=cls, template_id=t))
    elif skill is SkillKind.COUNT:
        for cls in ObjectClass:
            for n in range(COUNT_MIN, COUNT_MAX + 1):
                for t in range(n_templates):
                    combos.append(Combination(obj_a=cls, count=n, template_id=t))
    else:
        # Ordered pairs, identical classes allowed: 15*15*4*3 = 2700.
        for cls_a in ObjectClass:
            for cls_b in ObjectClass:
                for rel in RelationKind:
                    for t in range(n_templates):
                        combos.append(
                            Combination(
                                obj_a=cls_a, obj_b=cls_b, relation=rel, template_id=t
                            )
                        )
    return combos


def _sample_object(rng: random.Random, cls: ObjectClass, count: int) -> ObjectSpec:
    return ObjectSpec(
        cls=cls,
        count=count,
        yaw_radians=rng.uniform(0.0, 2.0 * math.pi),
        scale=rng.uniform(SCALE_MIN, SCALE_MAX),
    )


def generate_scenes(spec: GenerationSpec) -> list[SceneConfig]:
    rng = random.Random(spec.seed)
    combos = enumerate_combinations(spec.skill)
    scenes: list[SceneConfig] = []
    idx = 0
    for combo in combos:
        prompt = _combo_prompt(spec.skill, combo)
        for _ in range(spec.multiplicity):
            background = rng.randint(BACKGROUND_MIN, BACKGROUND_MAX)
            if spec.skill is SkillKind.SPATIAL:
                assert combo.obj_b is not None
                objects = (
                    _sample_object(rng, combo.obj_a, 1),
                    _sample_object(rng, combo.obj_b, 1),
                )
            else:
                objects = (_sample_object(rng, combo.obj_a, combo.count or 1),)
            scenes.append(
                SceneConfig(
                    id=f"{spec.skill.value}_{spec.split}_{idx:06d}",
                    skill=spec.skill,
                    split=spec.split,
                    objects=objects,
                    relation=combo.relation,
                    background_id=background,
                    template_id=combo.template_id,
                    prompt=prompt,
                )
            )
            idx += 1
    return scenes


def _combo_prompt(skill: SkillKind, combo: Combination) -> str:
    template = templates.get_template(skill, combo.template_id)
    if skill is SkillKind.OBJECT:
        keywords = {"objA": combo.obj_a.value}
    elif skill is SkillKind.COUNT:
        assert combo.count is not None
        keywords = {
            "objA": templates.pluralize(combo.obj_a, combo.count),
            "N": str(combo.count),
            "N_EN": templates.COUNT_WORDS[combo.count],
        }
    else:
        assert combo.obj_b is not None and combo.relation is not None
        keywords = {
            "objA": combo.obj_a.value,
            "objB": combo.obj_b.value,
            "rel": combo.relation.surface,
        }
    return templates.expand_skill_prompt(template, keywords)


def generate_split(skill: SkillKind, split: str, seed: int) -> list[SceneConfig]:
    """Generate a split at the default multiplicity for that skill/split."""
    mult = DEFAULT_MULTIPLICITY[(skill, split)]
    return generate_scenes(GenerationSpec(skill, split, seed, mult))


def export_simulator_batch(scenes: list[SceneConfig], path: str | Path) -> None:
    """Write the JSONL scene batch the external renderer consumes."""
    path = Path(path)
    with path.open("w", encoding="utf-8") as f:
        for scene in scenes:
            f.write(scene.to_json())
            f.write("\n")


def load_scene_batch(path: str | Path) -> list[SceneConfig]:
    scenes: list[SceneConfig] = []
    with Path(path).open("r", encoding="utf-8") as f:
        for line in f:
            line = line.strip()
            if line:
                scenes.append(SceneConfig.from_json(line))
    return scenes

"""Prompt templates for the three skills and the 145-prompt neutral corpus.

Template strings and word lists ship as JSON data files so corrections never
require code changes. Skill prompt expansion is literal substitution: no
article correction ("a airplane" is intentional).
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass
from importlib import resources

from .model import (
    COUNT_WORDS,
    ObjectClass,
    RelationKind,
    SceneConfig,
    SkillKind,
)

_PLACEHOLDER_RE = re.compile(r"<(objA|objB|N|N_EN|rel)>")

PLURAL_EXCEPTIONS: dict[str, str] = {
    "person": "people",
    "bench": "benches",
}


class MissingKeywordError(KeyError):
    """A template placeholder was not supplied a keyword."""


@dataclass(frozen=True)
class SkillTemplate:
    skill: SkillKind
    template_id: int
    pattern: str

    @property
    def placeholders(self) -> set[str]:
        return set(_PLACEHOLDER_RE.findall(self.pattern))


def _load_json(name: str) -> dict:
    with resources.files("t2ieval.data").joinpath(name).open("r", encoding="utf-8") as f:
        return json.load(f)


def _build_templates() -> dict[SkillKind, list[SkillTemplate]]:
    raw = _load_json("skill_templates.json")
    out: dict[SkillKind, list[SkillTemplate]] = {}
    for skill in SkillKind:
        out[skill] = [
            SkillTemplate(skill, i, pattern)
            for i, pattern in enumerate(raw[skill.value])
        ]
    return out


_TEMPLATES = _build_templates()


def skill_templates(skill: SkillKind) -> list[SkillTemplate]:
    return list(_TEMPLATES[skill])


def get_template(skill: SkillKind, template_id: int) -> SkillTemplate:
    tpls = _TEMPLATES[skill]
    if not (0 <= template_id < len(tpls)):
        raise KeyError(f"no template {template_id} for skill {skill.value}")
    return tpls[template_id]


def expand_skill_prompt(template: SkillTemplate, keywords: dict[str, str]) -> str:
    """Substitute keywords into a template pattern, literally."""

    def repl(m: re.Match) -> str:
        name = m.group(1)
        if name not in keywords:
            raise MissingKeywordError(name)
        return keywords[name]

    return _PLACEHOLDER_RE.sub(repl, template.pattern)


def pluralize(cls: ObjectClass, n: int) -> str:
    if n < 1:
        raise ValueError("count must be >= 1")
    if n == 1:
        return cls.value
    return PLURAL_EXCEPTIONS.get(cls.value, cls.value + "s")


def keywords_for_scene(scene: SceneConfig) -> dict[str, str]:
    if scene.skill is SkillKind.OBJECT:
        return {"objA": scene.objects[0].cls.value}
    if scene.skill is SkillKind.COUNT:
        obj = scene.objects[0]
        return {
            "objA": pluralize(obj.cls, obj.count),
            "N": str(obj.count),
            "N_EN": COUNT_WORDS[obj.count],
        }
    assert scene.relation is not None
    return {
        "objA": scene.objects[0].cls.value,
        "objB": scene.objects[1].cls.value,
        "rel": scene.relation.surface,
    }


def prompt_for_scene(scene: SceneConfig) -> str:
    template = get_template(scene.skill, scene.template_id)
    return expand_skill_prompt(template, keywords_for_scene(scene))


BIAS_CATEGORIES = ("profession", "political", "object", "other")


@dataclass(frozen=True)
class BiasPromptSpec:
    category: str
    word: str
    prompt: str


def _article(phrase: str) -> str:
    return "an" if phrase[:1].lower() in "aeiou" else "a"


def neutral_prompt_corpus() -> list[BiasPromptSpec]:
    """The 145 gender/skin-tone neutral prompts (85/6/39/15 per category)."""
    words = _load_json("neutral_words.json")
    corpus: list[BiasPromptSpec] = []
    for category in BIAS_CATEGORIES:
        for word in words[category]:
            if category == "object":
                prompt = f"a person with {_article(word)} {word}"
            else:
                prompt = f"a photo of {_article(word)} {word}"
            corpus.append(BiasPromptSpec(category, word, prompt))
    return corpus

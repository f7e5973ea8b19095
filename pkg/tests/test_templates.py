from collections import Counter

import pytest

from t2ieval.model import ObjectClass, SkillKind
from t2ieval.templates import (
    BiasPromptSpec,
    MissingKeywordError,
    SkillTemplate,
    expand_skill_prompt,
    get_template,
    neutral_prompt_corpus,
    pluralize,
    skill_templates,
)


class TestTemplateTables:
    def test_template_counts(self):
        assert len(skill_templates(SkillKind.OBJECT)) == 31
        assert len(skill_templates(SkillKind.COUNT)) == 36
        assert len(skill_templates(SkillKind.SPATIAL)) == 3

    def test_count_templates_split_digit_and_word_forms(self):
        digit = [t for t in skill_templates(SkillKind.COUNT) if "<N>" in t.pattern]
        word = [t for t in skill_templates(SkillKind.COUNT) if "<N_EN>" in t.pattern]
        assert len(digit) == 18
        assert len(word) == 18

    def test_placeholders_match_skill(self):
        for t in skill_templates(SkillKind.OBJECT):
            assert t.placeholders == {"objA"}
        for t in skill_templates(SkillKind.COUNT):
            assert "objA" in t.placeholders
            assert len(t.placeholders & {"N", "N_EN"}) == 1
        for t in skill_templates(SkillKind.SPATIAL):
            assert t.placeholders == {"objA", "objB", "rel"}


class TestExpansion:
    def test_no_article_correction(self):
        t = get_template(SkillKind.OBJECT, 9)
        assert t.pattern == "a photo of a <objA>"
        assert expand_skill_prompt(t, {"objA": "airplane"}) == "a photo of a airplane"

    def test_count_prompt(self):
        t = SkillTemplate(SkillKind.COUNT, 0, "<N> <objA> in the photo")
        assert expand_skill_prompt(t, {"objA": "dogs", "N": "2"}) == "2 dogs in the photo"

    def test_spatial_prompt_surface_relation(self):
        t = get_template(SkillKind.SPATIAL, 0)
        out = expand_skill_prompt(
            t, {"objA": "bench", "objB": "dog", "rel": "right to"}
        )
        assert out == "a dog is right to a bench"

    def test_missing_keyword_names_placeholder(self):
        t = get_template(SkillKind.SPATIAL, 0)
        with pytest.raises(MissingKeywordError, match="rel"):
            expand_skill_prompt(t, {"objA": "bench", "objB": "dog"})

    def test_injective_over_keywords(self):
        t = get_template(SkillKind.OBJECT, 9)
        prompts = {expand_skill_prompt(t, {"objA": c.value}) for c in ObjectClass}
        assert len(prompts) == 15


class TestPluralize:
    def test_regular_plural(self):
        assert pluralize(ObjectClass.DOG, 2) == "dogs"

    def test_singular_identity(self):
        assert pluralize(ObjectClass.CAR, 1) == "car"

    def test_multiword_plural(self):
        assert pluralize(ObjectClass.POTTED_PLANT, 4) == "potted plants"

    def test_irregulars(self):
        assert pluralize(ObjectClass.PERSON, 3) == "people"
        assert pluralize(ObjectClass.BENCH, 2) == "benches"


class TestNeutralCorpus:
    def test_size_and_category_split(self):
        corpus = neutral_prompt_corpus()
        assert len(corpus) == 145
        counts = Counter(s.category for s in corpus)
        assert counts == {"profession": 85, "political": 6, "object": 39, "other": 15}

    def test_nurse_prompt(self):
        by_word = {s.word: s for s in neutral_prompt_corpus()}
        assert by_word["nurse"].prompt == "a photo of a nurse"

    def test_object_words_use_person_with_template(self):
        by_word = {s.word: s for s in neutral_prompt_corpus()}
        assert by_word["apron"].prompt == "a person with an apron"
        assert by_word["beer"].prompt == "a person with a beer"

    def test_vowel_rule(self):
        for spec in neutral_prompt_corpus():
            article = "an" if spec.word[0].lower() in "aeiou" else "a"
            assert f" {article} {spec.word}" in spec.prompt

    def test_every_prompt_contains_its_word(self):
        for spec in neutral_prompt_corpus():
            assert spec.word in spec.prompt

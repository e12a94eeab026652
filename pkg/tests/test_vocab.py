"""Lexicon construction, lookup, and serialization."""

import json

import pytest

from pointref.vocab import (
    DEFAULT_LEXICON,
    DEFAULT_RELATION_SYNONYMS,
    DEMONSTRATIVES,
    GENERALIZATION_NAMES,
    POINTING_FLAGS,
    RELATIONS,
    Lexicon,
    lexicon_from_dict,
    lexicon_to_dict,
    load_lexicon,
    save_lexicon,
)


def test_relation_labels_are_the_five_canonical_ones():
    assert RELATIONS == ("left", "right", "front", "back", "near")


def test_default_synonyms_cover_common_prepositions():
    assert DEFAULT_RELATION_SYNONYMS["beside"] == "near"
    assert DEFAULT_RELATION_SYNONYMS["behind"] == "back"
    assert DEFAULT_RELATION_SYNONYMS["next"] == "near"
    assert DEFAULT_RELATION_SYNONYMS["before"] == "front"


def test_vocab_lookup_per_category():
    lex = DEFAULT_LEXICON
    assert lex.vocab("relation") == RELATIONS
    assert lex.vocab("demonstrative") == DEMONSTRATIVES
    assert lex.attribute_vocab("demonstrative") == POINTING_FLAGS
    assert "red" in lex.vocab("color")
    with pytest.raises(ValueError):
        lex.vocab("flavor")


def test_category_of_uses_first_match_in_order():
    lex = DEFAULT_LEXICON
    assert lex.category_of("cube") == "name"
    assert lex.category_of("red") == "color"
    assert lex.category_of("small") == "size"
    assert lex.category_of("xyzzy") is None


def test_normalize_relation_maps_synonyms():
    lex = DEFAULT_LEXICON
    assert lex.normalize_relation("beside") == "near"
    assert lex.normalize_relation("behind") == "back"
    assert lex.normalize_relation("xyzzy") is None


def test_empty_or_duplicate_vocab_rejected():
    with pytest.raises(ValueError):
        Lexicon(names=())
    with pytest.raises(ValueError):
        Lexicon(colors=("red", "red"))
    with pytest.raises(ValueError):
        Lexicon(relation_synonyms={"beside": "nowhere"})


def test_generalization_names_disjoint_from_defaults():
    assert not set(GENERALIZATION_NAMES) & set(DEFAULT_LEXICON.names)


def test_lexicon_round_trip(tmp_path):
    lex = Lexicon(names=("cup", "pen"), colors=("red",), shapes=("flat",),
                  sizes=("big",))
    path = tmp_path / "lex.json"
    save_lexicon(lex, path)
    loaded = load_lexicon(path)
    assert loaded == lex


def test_lexicon_from_dict_rejects_changed_relations():
    data = lexicon_to_dict(DEFAULT_LEXICON)
    data["relation"] = ["left", "right"]
    with pytest.raises(ValueError):
        lexicon_from_dict(data)


def test_all_tokens_covers_every_embeddable_token():
    toks = set(DEFAULT_LEXICON.all_tokens())
    assert set(RELATIONS) <= toks
    assert set(POINTING_FLAGS) <= toks
    assert set(DEMONSTRATIVES) <= toks
    assert set(DEFAULT_LEXICON.names) <= toks


def test_saved_lexicon_is_plain_json(tmp_path):
    path = tmp_path / "lex.json"
    save_lexicon(DEFAULT_LEXICON, path)
    data = json.loads(path.read_text())
    assert data["relation"] == list(RELATIONS)

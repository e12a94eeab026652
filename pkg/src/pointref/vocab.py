"""Attribute vocabularies shared by the scene model, parser, and generator."""

from __future__ import annotations

import json
from dataclasses import dataclass, field, replace
from pathlib import Path

# Spatial relation labels an edge can carry, in canonical order.
RELATIONS: tuple[str, ...] = ("left", "right", "front", "back", "near")

# Two-token vocabulary of the pointing attribute attached to every node.
POINTING_FLAGS: tuple[str, ...] = ("pointed", "unpointed")

# Deictic determiners whose grounding comes from the pointing modality.
DEMONSTRATIVES: tuple[str, ...] = ("this", "that", "these", "those")

# Node attribute categories, in the order the reasoner consumes them.
# "demonstrative" is the pointing flag attribute (vocab: POINTING_FLAGS).
ATTRIBUTE_CATEGORIES: tuple[str, ...] = ("name", "color", "shape", "size", "demonstrative")

# Maps surface relation words (preposition lemmas) to the five edge labels.
DEFAULT_RELATION_SYNONYMS: dict[str, str] = {
    "left": "left",
    "right": "right",
    "front": "front",
    "before": "front",
    "back": "back",
    "behind": "back",
    "near": "near",
    "beside": "near",
    "by": "near",
    "next": "near",
}

DEFAULT_NAMES = (
    "tool", "clipper", "drill", "ball", "cube", "mug",
    "hammer", "bottle", "book", "plate", "can", "brush",
)
DEFAULT_COLORS = ("black", "white", "red", "blue", "green", "yellow", "orange", "purple")
DEFAULT_SHAPES = ("round", "square", "flat", "long", "curved", "angular")
DEFAULT_SIZES = ("small", "big", "tiny", "huge")

# Disjoint object names for the held-out environment split.
GENERALIZATION_NAMES = (
    "teddy", "doll", "truck", "boat", "drum", "kite",
    "puzzle", "robot", "rattle", "dinosaur", "whistle", "yoyo",
)


def _check_tokens(category: str, tokens: tuple[str, ...]) -> None:
    if not tokens:
        raise ValueError(f"empty vocabulary for category '{category}'")
    if len(set(tokens)) != len(tokens):
        raise ValueError(f"duplicate tokens in category '{category}'")


@dataclass(frozen=True)
class Lexicon:
    """Finite token vocabularies per attribute category.

    The relation vocabulary is fixed at the five labels in RELATIONS and the
    pointing-flag vocabulary at POINTING_FLAGS; only open-class categories are
    configurable.
    """

    names: tuple[str, ...] = DEFAULT_NAMES
    colors: tuple[str, ...] = DEFAULT_COLORS
    shapes: tuple[str, ...] = DEFAULT_SHAPES
    sizes: tuple[str, ...] = DEFAULT_SIZES
    relation_synonyms: dict[str, str] = field(
        default_factory=lambda: dict(DEFAULT_RELATION_SYNONYMS)
    )

    def __post_init__(self):
        object.__setattr__(self, "names", tuple(self.names))
        object.__setattr__(self, "colors", tuple(self.colors))
        object.__setattr__(self, "shapes", tuple(self.shapes))
        object.__setattr__(self, "sizes", tuple(self.sizes))
        for cat in ("names", "colors", "shapes", "sizes"):
            _check_tokens(cat, getattr(self, cat))
        for word, rel in self.relation_synonyms.items():
            if rel not in RELATIONS:
                raise ValueError(f"synonym '{word}' maps to unknown relation '{rel}'")

    def vocab(self, category: str) -> tuple[str, ...]:
        """Vocabulary for a category; 'demonstrative' yields the deictic words."""
        table = {
            "name": self.names,
            "color": self.colors,
            "shape": self.shapes,
            "size": self.sizes,
            "relation": RELATIONS,
            "demonstrative": DEMONSTRATIVES,
            "pointing": POINTING_FLAGS,
        }
        try:
            return table[category]
        except KeyError:
            raise ValueError(f"unknown category '{category}'") from None

    def attribute_vocab(self, category: str) -> tuple[str, ...]:
        """Vocabulary of a node attribute; the demonstrative slot holds flags."""
        if category == "demonstrative":
            return POINTING_FLAGS
        return self.vocab(category)

    def category_of(self, token: str, order=("name", "color", "shape", "size")) -> str | None:
        """First category (in `order`) whose vocabulary contains `token`."""
        for cat in order:
            if token in self.vocab(cat):
                return cat
        return None

    def normalize_relation(self, word: str) -> str | None:
        return self.relation_synonyms.get(word)

    def all_tokens(self) -> tuple[str, ...]:
        return (
            self.names + self.colors + self.shapes + self.sizes
            + RELATIONS + POINTING_FLAGS + DEMONSTRATIVES
        )

    def with_names(self, names) -> "Lexicon":
        return replace(self, names=tuple(names))


DEFAULT_LEXICON = Lexicon()


def lexicon_to_dict(lex: Lexicon) -> dict:
    return {
        "name": list(lex.names),
        "color": list(lex.colors),
        "shape": list(lex.shapes),
        "size": list(lex.sizes),
        "relation": list(RELATIONS),
        "synonyms": dict(lex.relation_synonyms),
    }


def lexicon_from_dict(data: dict) -> Lexicon:
    relations = data.get("relation")
    if relations is not None and tuple(relations) != RELATIONS:
        raise ValueError(f"relation vocabulary is fixed at {list(RELATIONS)}")
    return Lexicon(
        names=tuple(data["name"]),
        colors=tuple(data["color"]),
        shapes=tuple(data["shape"]),
        sizes=tuple(data["size"]),
        relation_synonyms=dict(data.get("synonyms", DEFAULT_RELATION_SYNONYMS)),
    )


def load_lexicon(path) -> Lexicon:
    with open(Path(path), encoding="utf-8") as fh:
        return lexicon_from_dict(json.load(fh))


def save_lexicon(lex: Lexicon, path) -> None:
    Path(path).write_text(json.dumps(lexicon_to_dict(lex), indent=2), encoding="utf-8")

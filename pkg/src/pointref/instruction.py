"""Instruction analysis: dependency trees and typed reasoning programs.

An instruction is turned into a dependency tree (either parsed from
CoNLL-U-formatted input or built by the small template parser for
pick-up-style commands) and then flattened into a typed program: a sequence
of steps, each carrying a token, a step type, and a relevance distribution
over the six step types. Steps are ordered anchor-first — for "pick up the
black clipper beside this tool" the landmark noun phrase ("this tool") is
emitted before the relation step and the target's own modifiers, so executing
the steps left to right walks attention from the landmark to the target.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import IntEnum

import numpy as np

from .embeddings import EmbeddingProvider
from .numerics import softmax
from .vocab import DEMONSTRATIVES, Lexicon, DEFAULT_LEXICON

STOPWORDS = frozenset({"a", "an", "the", "please", "up"})
ALLOWED_UPOS = frozenset({"NOUN", "PROPN", "ADJ", "ADP", "DET"})
KNOWN_VERBS = frozenset({"pick", "grab", "fetch", "take"})


class InstructionError(ValueError):
    """Raised for instructions or trees that cannot be analyzed."""


class StepType(IntEnum):
    NAME = 0
    COLOR = 1
    SHAPE = 2
    SIZE = 3
    DEMONSTRATIVE = 4
    RELATION = 5


def one_hot_relevance(kind: StepType) -> np.ndarray:
    probs = np.zeros(len(StepType))
    probs[int(kind)] = 1.0
    return probs


@dataclass(frozen=True)
class Step:
    """One program step: a token to match plus its typed relevance."""

    kind: StepType
    token: str
    relevance: np.ndarray
    surface: str = ""

    def __post_init__(self):
        rel = np.asarray(self.relevance, dtype=float)
        if rel.shape != (len(StepType),):
            raise ValueError(f"relevance must have {len(StepType)} entries")
        object.__setattr__(self, "relevance", rel)
        if not self.surface:
            object.__setattr__(self, "surface", self.token)


def step_to_dict(step: Step) -> dict:
    return {
        "text": step.token,
        "type_probs": [float(x) for x in step.relevance],
        "kind": step.kind.name.lower(),
        "surface": step.surface,
    }


def step_from_dict(data: dict) -> Step:
    probs = np.asarray(data["type_probs"], dtype=float)
    kind = StepType(int(np.argmax(probs)))
    if "kind" in data:
        kind = StepType[data["kind"].upper()]
    return Step(kind=kind, token=data["text"], relevance=probs,
                surface=data.get("surface", data["text"]))


# --- dependency trees ------------------------------------------------------

@dataclass(frozen=True)
class Word:
    id: int  # 1-based position
    form: str
    lemma: str
    upos: str
    head: int  # 0 for the root
    deprel: str


class DepTree:
    """A single-rooted dependency tree over a sentence's words."""

    def __init__(self, words):
        self.words = tuple(words)
        if not self.words:
            raise InstructionError("empty dependency tree")
        ids = [w.id for w in self.words]
        if ids != list(range(1, len(ids) + 1)):
            raise InstructionError("word ids must be consecutive from 1")
        self._by_id = {w.id: w for w in self.words}
        roots = [w for w in self.words if w.head == 0]
        if len(roots) != 1:
            raise InstructionError(f"expected exactly one root, found {len(roots)}")
        self.root = roots[0]
        for w in self.words:
            if w.head != 0 and w.head not in self._by_id:
                raise InstructionError(f"word {w.id} has unknown head {w.head}")
        for w in self.words:
            seen = set()
            cur = w.id
            while cur != 0:
                if cur in seen:
                    raise InstructionError(f"dependency cycle through word {w.id}")
                seen.add(cur)
                cur = self._by_id[cur].head

    def word(self, word_id: int) -> Word:
        return self._by_id[word_id]

    def children(self, word_id: int, deprel: str | None = None) -> list[Word]:
        """Dependents of a word in surface order, optionally by relation."""
        out = [w for w in self.words if w.head == word_id]
        if deprel is not None:
            out = [w for w in out if w.deprel == deprel]
        return out

    def text(self) -> str:
        return " ".join(w.form for w in self.words)


def parse_conllu(text: str) -> DepTree:
    """Parse one sentence of CoNLL-U input into a dependency tree.

    Comment lines, multiword-token ranges (ids like "1-2") and empty nodes
    (ids like "1.1") are skipped. Exactly one sentence is expected.
    """
    words: list[Word] = []
    seen_content = False
    for lineno, line in enumerate(text.splitlines(), start=1):
        stripped = line.strip()
        if not stripped:
            if seen_content:
                seen_content = False  # sentence boundary; further content is an error
            continue
        if stripped.startswith("#"):
            continue
        if words and not seen_content:
            raise InstructionError(f"line {lineno}: more than one sentence")
        cols = line.split("\t")
        if len(cols) < 8:
            raise InstructionError(f"line {lineno}: expected at least 8 tab-separated columns")
        wid = cols[0]
        if "-" in wid or "." in wid:
            continue
        try:
            word_id = int(wid)
            head = int(cols[6])
        except ValueError:
            raise InstructionError(f"line {lineno}: non-integer id or head") from None
        words.append(Word(id=word_id, form=cols[1], lemma=cols[2].lower(),
                          upos=cols[3], head=head, deprel=cols[7]))
        seen_content = True
    if not words:
        raise InstructionError("no words found in CoNLL-U input")
    return DepTree(words)


# --- template parser -------------------------------------------------------

DETERMINERS = frozenset({"the", "a", "an"}) | set(DEMONSTRATIVES)

# Multiword prepositions: phrase -> index of the semantically contentful word,
# which becomes the case dependent; the rest attach to it as fixed.
MULTIWORD_PREPOSITIONS: dict[tuple[str, ...], int] = {
    ("to", "the", "left", "of"): 2,
    ("to", "the", "right", "of"): 2,
    ("in", "front", "of"): 1,
    ("left", "of"): 0,
    ("right", "of"): 0,
    ("next", "to"): 0,
}

# Relation words that only act as prepositions inside a multiword phrase.
_PHRASE_ONLY = frozenset({"left", "right", "front", "back", "next"})


def _phrase_table(lexicon: Lexicon) -> list[tuple[tuple[str, ...], int]]:
    table = dict(MULTIWORD_PREPOSITIONS)
    for word in lexicon.relation_synonyms:
        if word not in _PHRASE_ONLY:
            table.setdefault((word,), 0)
    return sorted(table.items(), key=lambda kv: -len(kv[0]))


def tokenize(text: str) -> list[str]:
    tokens = []
    for raw in text.lower().split():
        tok = raw.strip(".,!?;:\"'")
        if tok:
            tokens.append(tok)
    return tokens


class _TemplateParser:
    """Builds a dependency tree for pick-up-style instructions."""

    def __init__(self, tokens: list[str], lexicon: Lexicon):
        self.tokens = tokens
        self.entries: list[tuple[str, int, str] | None] = [None] * len(tokens)
        self.phrases = _phrase_table(lexicon)

    def parse(self) -> DepTree:
        i = 0
        please = None
        if i < len(self.tokens) and self.tokens[i] == "please":
            please = i
            i += 1
        if i >= len(self.tokens) or self.tokens[i] not in KNOWN_VERBS:
            raise InstructionError(
                "unparseable by template grammar: instruction must start with "
                f"one of {sorted(KNOWN_VERBS)}"
            )
        verb = i
        self.entries[verb] = ("VERB", 0, "root")
        if please is not None:
            self.entries[please] = ("INTJ", verb + 1, "discourse")
        i += 1
        if i < len(self.tokens) and self.tokens[i] == "up" and self.tokens[verb] == "pick":
            self.entries[i] = ("ADP", verb + 1, "compound:prt")
            i += 1
        i, _ = self._parse_np(i, verb, "obj")
        if i != len(self.tokens):
            raise InstructionError(
                f"unparseable by template grammar: unexpected word '{self.tokens[i]}'")
        words = [
            Word(id=k + 1, form=tok, lemma=tok, upos=upos, head=head, deprel=deprel)
            for k, (tok, (upos, head, deprel)) in enumerate(zip(self.tokens, self.entries))
        ]
        return DepTree(words)

    def _match_preposition(self, i: int):
        for phrase, head_offset in self.phrases:
            if tuple(self.tokens[i:i + len(phrase)]) == phrase:
                return phrase, head_offset
        return None

    def _parse_np(self, i: int, governor: int, deprel: str) -> tuple[int, int]:
        """Parse det? premod* noun (prep np)?; returns (next index, noun index)."""
        if i >= len(self.tokens):
            raise InstructionError(
                "unparseable by template grammar: expected a noun phrase")
        if self.tokens[i] in DETERMINERS:
            det = i
            i += 1
        else:
            det = None
        # The head noun is the last word before a preposition (or the end);
        # at least one word must precede the preposition to serve as the noun.
        j = i
        prep = None
        while j < len(self.tokens):
            match = self._match_preposition(j)
            if match is not None and j > i:
                prep = (j, match)
                break
            j += 1
        noun = prep[0] - 1 if prep else len(self.tokens) - 1
        if noun < i:
            raise InstructionError("unparseable by template grammar: expected a noun")
        self.entries[noun] = ("NOUN", governor + 1, deprel)
        if det is not None:
            self.entries[det] = ("DET", noun + 1, "det")
        for k in range(i, noun):
            self.entries[k] = ("ADJ", noun + 1, "amod")
        if prep is None:
            return noun + 1, noun
        start, (phrase, head_offset) = prep
        case = start + head_offset
        next_i, anchor = self._parse_np(start + len(phrase), noun, "nmod")
        self.entries[case] = ("ADP", anchor + 1, "case")
        for k in range(start, start + len(phrase)):
            if k != case:
                upos = "DET" if self.tokens[k] == "the" else "ADP"
                self.entries[k] = (upos, case + 1, "fixed")
        return next_i, noun


def parse_instruction(text: str, lexicon: Lexicon = DEFAULT_LEXICON) -> DepTree:
    """Dependency-parse a pick-up-style instruction string."""
    tokens = tokenize(text)
    if not tokens:
        raise InstructionError("unparseable by template grammar: empty instruction")
    return _TemplateParser(tokens, lexicon).parse()


# --- program extraction ----------------------------------------------------

_CLASSIFIER_CATEGORIES = ("name", "color", "shape", "size", "demonstrative", "relation")


class StepClassifier:
    """Assigns a step type and relevance distribution to tree words.

    Unambiguous structural cues (demonstrative determiners, case-marking
    prepositions, lexicon membership, noun-phrase heads) give one-hot
    relevances; anything else falls back to a softmax over the cosine
    similarities between the word's embedding and per-category prototype
    vectors.
    """

    def __init__(self, lexicon: Lexicon, embedder: EmbeddingProvider | None = None,
                 stopwords: frozenset[str] = STOPWORDS):
        self.lexicon = lexicon
        self.stopwords = frozenset(stopwords)
        self._embedder = embedder
        self._prototypes: np.ndarray | None = None

    @property
    def embedder(self) -> EmbeddingProvider:
        if self._embedder is None:
            self._embedder = EmbeddingProvider()
        return self._embedder

    def _prototype_matrix(self) -> np.ndarray:
        if self._prototypes is None:
            self._prototypes = np.array([
                self.embedder.prototype(self.lexicon, cat)
                for cat in _CLASSIFIER_CATEGORIES
            ])
        return self._prototypes

    def classify(self, word: Word, *, np_head: bool = False) -> Step | None:
        lemma = word.lemma
        if lemma in self.stopwords or word.upos not in ALLOWED_UPOS:
            return None
        if word.deprel == "det":
            if lemma in DEMONSTRATIVES:
                return Step(StepType.DEMONSTRATIVE, lemma,
                            one_hot_relevance(StepType.DEMONSTRATIVE), surface=word.form)
            return None
        if word.deprel == "case" or word.upos == "ADP":
            canonical = self.lexicon.normalize_relation(lemma) or lemma
            return Step(StepType.RELATION, canonical,
                        one_hot_relevance(StepType.RELATION), surface=word.form)
        category = self.lexicon.category_of(lemma)
        if category is not None:
            kind = StepType[category.upper()]
            return Step(kind, lemma, one_hot_relevance(kind), surface=word.form)
        if np_head and word.upos in ("NOUN", "PROPN"):
            return Step(StepType.NAME, lemma,
                        one_hot_relevance(StepType.NAME), surface=word.form)
        vec = self.embedder.embed(lemma)
        protos = self._prototype_matrix()
        cos = (protos @ vec) / (
            np.linalg.norm(protos, axis=1) * max(float(np.linalg.norm(vec)), 1e-12)
        )
        relevance = softmax(cos)
        kind = StepType(int(np.argmax(relevance)))
        return Step(kind, lemma, relevance, surface=word.form)


# Amod steps are emitted size -> color -> shape, then everything else.
_MODIFIER_PRIORITY = {StepType.SIZE: 0, StepType.COLOR: 1, StepType.SHAPE: 2}


def _emit_np(tree: DepTree, noun: Word, classifier: StepClassifier,
             steps: list[Step]) -> None:
    # Landmarks first: their whole sub-program, then the relation connecting
    # the landmark back to this noun.
    for anchor in tree.children(noun.id, "nmod"):
        _emit_np(tree, anchor, classifier, steps)
        cases = tree.children(anchor.id, "case")
        if cases:
            step = classifier.classify(cases[0])
            if step is not None:
                steps.append(step)
    for det in tree.children(noun.id, "det"):
        step = classifier.classify(det)
        if step is not None:
            steps.append(step)
    modifiers = []
    for amod in tree.children(noun.id, "amod"):
        step = classifier.classify(amod)
        if step is not None:
            modifiers.append(step)
    modifiers.sort(key=lambda s: _MODIFIER_PRIORITY.get(s.kind, 3))
    steps.extend(modifiers)
    head_step = classifier.classify(noun, np_head=True)
    if head_step is not None:
        steps.append(head_step)


def extract_program(tree: DepTree, lexicon: Lexicon = DEFAULT_LEXICON,
                    stopwords: frozenset[str] = STOPWORDS,
                    embedder: EmbeddingProvider | None = None) -> list[Step]:
    """Flatten a dependency tree into an anchor-first typed program."""
    root = tree.root
    if root.upos in ("NOUN", "PROPN"):
        main = root
    else:
        objects = tree.children(root.id, "obj")
        if not objects:
            nouns = [w for w in tree.words if w.upos in ("NOUN", "PROPN")]
            if not nouns:
                raise InstructionError("no referent in instruction")
            objects = nouns
        main = objects[0]
    classifier = StepClassifier(lexicon, embedder, stopwords)
    steps: list[Step] = []
    _emit_np(tree, main, classifier, steps)
    if not steps:
        raise InstructionError("no referent in instruction")
    return steps


def compile_instruction(text: str, lexicon: Lexicon = DEFAULT_LEXICON,
                        stopwords: frozenset[str] = STOPWORDS,
                        embedder: EmbeddingProvider | None = None) -> list[Step]:
    """Parse an instruction string and extract its program in one call."""
    return extract_program(parse_instruction(text, lexicon), lexicon,
                           stopwords, embedder)

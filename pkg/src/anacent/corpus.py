"""Document ingestion: pre-analysed token streams with sentence boundaries.

The document format is line-oriented UTF-8, one token per line with seven
tab-separated fields::

    surface  lemma  category  morph  concept  valence  hints

* ``morph``: one or more feature bundles separated by ``|``; a bundle is
  ``gen=fem;num=sg;case=nom,acc`` and ``-`` is the empty bundle.  Several
  bundles encode morphological ambiguity that set-valued features cannot.
* ``concept``: a concept name or instance id from the taxonomy, or ``-``.
* ``valence``: comma-separated relation labels the token may govern,
  ``!``-suffixed when obligatory (``subject!,object,adjunct``), or ``-``.
* ``hints``: comma-separated attachment hints ``offset:relation`` where the
  offset is relative to the token's own position (``-2:subject``), or ``-``.

``#sent <n>`` lines open a sentence; ``#doc``, ``#taxonomy``, and
``#categories`` header lines carry the document id and the knowledge-base
references; every other ``#`` line is a comment.
"""

from __future__ import annotations

import os
from dataclasses import dataclass, field

from .deptree import RELATION_LABELS
from .errors import LoadError
from .lexicon import (
    CategoryHierarchy,
    FeatureStructure,
    Lexeme,
    Taxonomy,
    ValenceSlot,
)


@dataclass(frozen=True)
class AnnotatedToken:
    """One pre-analysed token of the input document."""

    surface: str
    lemma: str
    category: str
    morph_readings: tuple = (FeatureStructure(),)
    concept_type: str | None = None
    valence: tuple = ()
    sentence_id: int = 1
    attach_hints: tuple = ()

    def __post_init__(self):
        if not self.morph_readings:
            raise ValueError("a token needs at least one morphological reading")

    def lexeme(self, reading_index=0):
        return Lexeme(
            form=self.surface,
            lemma=self.lemma,
            category=self.category,
            features=self.morph_readings[reading_index],
            concept_type=self.concept_type,
            valence=self.valence,
        )


@dataclass
class Document:
    doc_id: str
    tokens: list = field(default_factory=list)
    taxonomy_ref: str | None = None
    category_ref: str | None = None

    def sentences(self):
        """Tokens grouped by sentence id, in document order."""
        out = []
        for token in self.tokens:
            if not out or out[-1][0] != token.sentence_id:
                out.append((token.sentence_id, []))
            out[-1][1].append(token)
        return out

    def sentence_count(self):
        return len(self.sentences())


def _parse_morph(text, source, lineno):
    readings = []
    for chunk in text.split("|"):
        try:
            readings.append(FeatureStructure.parse(chunk))
        except ValueError as exc:
            raise LoadError(str(exc), path=source, line=lineno) from None
    return tuple(readings)


def _parse_valence(text, source, lineno):
    text = text.strip()
    if text in ("", "-"):
        return ()
    slots = []
    for chunk in text.split(","):
        chunk = chunk.strip()
        if not chunk:
            continue
        obligatory = chunk.endswith("!")
        relation = chunk[:-1] if obligatory else chunk
        if relation not in RELATION_LABELS:
            raise LoadError(
                f"unknown relation {relation!r} in valence", path=source, line=lineno
            )
        slots.append(ValenceSlot(relation, obligatory))
    return tuple(slots)


def _parse_hints(text, source, lineno):
    text = text.strip()
    if text in ("", "-"):
        return ()
    hints = []
    for chunk in text.split(","):
        chunk = chunk.strip()
        if not chunk:
            continue
        offset, sep, relation = chunk.partition(":")
        if not sep:
            raise LoadError(f"malformed hint {chunk!r}", path=source, line=lineno)
        try:
            offset_value = int(offset)
        except ValueError:
            raise LoadError(f"malformed hint offset {offset!r}", path=source, line=lineno)
        if relation not in RELATION_LABELS:
            raise LoadError(
                f"unknown relation {relation!r} in hint", path=source, line=lineno
            )
        hints.append((offset_value, relation))
    return tuple(hints)


def parse_document(lines, source="<memory>", doc_id=None):
    """Parse document lines into a :class:`Document` (format validation only)."""
    tokens = []
    taxonomy_ref = None
    category_ref = None
    sentence_id = None
    seen_sentences = []
    for lineno, raw in enumerate(lines, 1):
        line = raw.rstrip("\n")
        stripped = line.strip()
        if not stripped:
            continue
        if stripped.startswith("#"):
            head, _, rest = stripped.partition(" ")
            rest = rest.strip()
            if head == "#sent":
                try:
                    new_id = int(rest)
                except ValueError:
                    raise LoadError(f"malformed sentence marker {stripped!r}",
                                    path=source, line=lineno)
                if seen_sentences and new_id < seen_sentences[-1]:
                    raise LoadError("sentence ids must be non-decreasing",
                                    path=source, line=lineno)
                if not seen_sentences or new_id != seen_sentences[-1]:
                    seen_sentences.append(new_id)
                sentence_id = new_id
            elif head == "#doc":
                doc_id = rest or doc_id
            elif head == "#taxonomy":
                taxonomy_ref = rest
            elif head == "#categories":
                category_ref = rest
            continue
        if sentence_id is None:
            raise LoadError("token before any '#sent' marker", path=source, line=lineno)
        fields = line.split("\t")
        if len(fields) != 7:
            raise LoadError(
                f"expected 7 tab-separated fields, got {len(fields)}",
                path=source, line=lineno,
            )
        surface, lemma, category, morph, concept, valence, hints = fields
        token = AnnotatedToken(
            surface=surface,
            lemma=lemma,
            category=category,
            morph_readings=_parse_morph(morph, source, lineno),
            concept_type=None if concept.strip() in ("", "-") else concept.strip(),
            valence=_parse_valence(valence, source, lineno),
            sentence_id=sentence_id,
            attach_hints=_parse_hints(hints, source, lineno),
        )
        tokens.append(token)
    if doc_id is None:
        doc_id = os.path.splitext(os.path.basename(source))[0]
    return Document(doc_id, tokens, taxonomy_ref, category_ref)


def validate_document(document, categories, taxonomy):
    """Resolve every identifier of the document against the knowledge bases."""
    for index, token in enumerate(document.tokens, 1):
        if token.category not in categories:
            raise LoadError(
                f"token {index} ({token.surface!r}): unknown category {token.category!r}"
            )
        if token.concept_type is not None:
            if token.concept_type not in taxonomy and token.concept_type not in taxonomy.instances():
                raise LoadError(
                    f"token {index} ({token.surface!r}): unknown concept or "
                    f"instance {token.concept_type!r}"
                )


def load_document(path, categories=None, taxonomy=None):
    """Load and fully validate a document file.

    The taxonomy and category hierarchy are taken from the explicit
    arguments when given, otherwise from the document's header references
    (relative to the document).  Returns ``(document, categories, taxonomy)``.
    """
    with open(path, encoding="utf-8") as handle:
        document = parse_document(handle, source=str(path))
    base = os.path.dirname(os.path.abspath(path))
    if categories is None:
        if document.category_ref is None:
            raise LoadError("no category hierarchy given or referenced", path=str(path))
        categories = CategoryHierarchy.load(os.path.join(base, document.category_ref))
    if taxonomy is None:
        if document.taxonomy_ref is None:
            raise LoadError("no taxonomy given or referenced", path=str(path))
        taxonomy = Taxonomy.load(os.path.join(base, document.taxonomy_ref))
    validate_document(document, categories, taxonomy)
    return document, categories, taxonomy


def serialize_document(document):
    """Render a document back into its file format (inverse of parsing)."""
    lines = [f"#doc {document.doc_id}"]
    if document.taxonomy_ref:
        lines.append(f"#taxonomy {document.taxonomy_ref}")
    if document.category_ref:
        lines.append(f"#categories {document.category_ref}")
    for sentence_id, tokens in document.sentences():
        lines.append(f"#sent {sentence_id}")
        for token in tokens:
            morph = "|".join(fs.to_spec() for fs in token.morph_readings)
            valence = ",".join(
                slot.relation + ("!" if slot.obligatory else "") for slot in token.valence
            ) or "-"
            hints = ",".join(
                f"{offset:+d}:{relation}" for offset, relation in token.attach_hints
            ) or "-"
            lines.append(
                "\t".join(
                    [
                        token.surface,
                        token.lemma,
                        token.category,
                        morph,
                        token.concept_type or "-",
                        valence,
                        hints,
                    ]
                )
            )
    return "\n".join(lines) + "\n"

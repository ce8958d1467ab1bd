"""Backward/forward-looking centers, transitions, and the ambiguity space.

A ``CenterReading`` pairs one backward-looking center (Cb) with one
preferentially ordered list of forward-looking centers (Cf); several of
them inside one ``CenteringState`` represent global ambiguity of a single
utterance.  The ``AmbiguitySpace`` keeps the immutable master state of the
previous utterance plus the per-phrase working copies that represent local
ambiguity: every locally ambiguous phrase that contains an anaphor gets a
private copy, and the master is never touched by resolution.
"""

from __future__ import annotations

import copy
import itertools
import json
import re
from dataclasses import dataclass, field, replace

from .constraints import role_rank
from .errors import ConsumptionError, DiscourseError, UnknownIdentifierError
from .lexicon import DiscourseEntity, FeatureStructure

TRANSITIONS = ("CONTINUE", "RETAIN", "SMOOTH-SHIFT", "ROUGH-SHIFT")


@dataclass(frozen=True)
class CfEntry:
    """One forward-looking center: an entity with its realization in the utterance."""

    entity: DiscourseEntity
    expression: str
    features: FeatureStructure = field(default_factory=FeatureStructure)
    category: str = "Noun"
    role: str = "other"
    position: int = 0

    @property
    def concept(self):
        return self.entity.concept_type

    def label(self):
        return f"{self.entity.instance_id}: {self.expression}"

    def to_dict(self):
        return {
            "instance": self.entity.instance_id,
            "concept": self.entity.concept_type,
            "expression": self.expression,
            "features": self.features.to_spec(),
            "category": self.category,
            "role": self.role,
            "position": self.position,
        }


class CenterReading:
    """One (Cb, ordered Cf) pair; the unit of global ambiguity."""

    def __init__(self, reading_id, cb, cf, transition=None, lineage=(), bindings=None):
        self.reading_id = reading_id
        self.cb = cb
        self.cf = list(cf)
        #: Cf as constructed for the utterance, untouched by consumption.
        self.original_cf = tuple(cf)
        self.consumed = []
        self.transition = transition
        #: (phrase reading id, predecessor center reading id) provenance.
        self.lineage = tuple(lineage)
        #: anaphor position -> DiscourseEntity bound in this reading.
        self.bindings = dict(bindings or {})
        ids = [entry.entity.instance_id for entry in self.cf]
        if len(ids) != len(set(ids)):
            raise ValueError(f"duplicate instance in Cf: {ids}")

    def cf_entry(self, instance_id):
        for entry in self.cf:
            if entry.entity.instance_id == instance_id:
                return entry
        return None

    def to_dict(self):
        return {
            "id": self.reading_id,
            "cb": self.cb.label() if self.cb else None,
            "cf": [entry.to_dict() for entry in self.cf],
            "original_cf": [entry.to_dict() for entry in self.original_cf],
            "consumed": list(self.consumed),
            "transition": self.transition,
            "lineage": list(self.lineage),
            "bindings": {
                str(pos): entity.instance_id for pos, entity in sorted(self.bindings.items())
            },
        }

    def __repr__(self):
        cb = self.cb.instance_id if self.cb else "-"
        cf = ", ".join(e.entity.instance_id for e in self.cf)
        return f"CenterReading({self.reading_id}, Cb={cb}, Cf=[{cf}])"


class CenteringState:
    """A set of center readings describing one utterance."""

    def __init__(self, state_id, readings, origin_phrase=None):
        if not readings:
            raise ValueError("a centering state requires at least one reading")
        self.state_id = state_id
        self.readings = list(readings)
        #: Identifier of the phrase reading that owns this copy (None: master).
        self.origin_phrase = origin_phrase

    def to_dict(self):
        return {
            "id": self.state_id,
            "origin_phrase": self.origin_phrase,
            "readings": [reading.to_dict() for reading in self.readings],
        }

    def serialize(self):
        return json.dumps(self.to_dict(), sort_keys=True, ensure_ascii=False)


class AmbiguitySpace:
    """The master centering state of an utterance plus its working copies."""

    def __init__(self, master):
        self.master = master
        self.states = [master]

    def copy_state(self, for_phrase):
        """Deep-copy the master for one locally ambiguous phrase reading."""
        state = copy.deepcopy(self.master)
        state.state_id = f"{self.master.state_id}/copy-{for_phrase}"
        state.origin_phrase = for_phrase
        self.states.append(state)
        return state

    def register(self, state):
        """Track a copy that was inherited through a reading fork."""
        if state not in self.states:
            self.states.append(state)

    def serialize_master(self):
        return self.master.serialize()


def copy_state(space, for_phrase):
    """Module-level convenience wrapper around :meth:`AmbiguitySpace.copy_state`."""
    return space.copy_state(for_phrase)


def consume_antecedent(reading, entity):
    """Remove a resolved antecedent from the reading's Cf.

    Consumption keeps the entity from serving another anaphor of the same
    sentence.  Consuming an absent or already consumed entity signals a
    protocol bug and raises.
    """
    instance_id = entity.instance_id
    if instance_id in reading.consumed:
        raise ConsumptionError(f"{instance_id} already consumed in {reading.reading_id}")
    for index, entry in enumerate(reading.cf):
        if entry.entity.instance_id == instance_id:
            del reading.cf[index]
            reading.consumed.append(instance_id)
            return reading
    raise ConsumptionError(f"{instance_id} not present in Cf of {reading.reading_id}")


def rank_cf(tree, entities, categories):
    """Order the entities realized in an utterance by prominence.

    Entities are stratified by clause (a clause is identified by the nearest
    finite verb dominating the realization; matrix clause first), ordered
    SUBJECT > OBJECT(S) > OTHERS within a clause, others by surface order,
    and deduplicated keeping the highest-ranked realization of each instance.
    """
    verb_depth_cache = {}

    def clause_key(position):
        chain = tree.head_chain(position)
        verb = None
        for ancestor in chain:
            if categories.isa_c_star(tree.node(ancestor).category, "FiniteVerb"):
                verb = ancestor
                break
        if verb is None:
            return (1, 0)
        if verb not in verb_depth_cache:
            depth = sum(
                1
                for a in tree.head_chain(verb)
                if categories.isa_c_star(tree.node(a).category, "FiniteVerb")
            )
            verb_depth_cache[verb] = depth
        return (0, verb_depth_cache[verb], verb)

    def role_of(position):
        link = tree.head_of(position)
        if link is None:
            return "other"
        head, relation = link
        if relation in ("subject", "object") and categories.isa_c_star(
            tree.node(head).category, "FiniteVerb"
        ):
            return relation
        return "other"

    keyed = []
    for position, entity in entities:
        if position not in tree:
            raise UnknownIdentifierError(f"entity position {position} not in tree")
        role = role_of(position)
        keyed.append((clause_key(position), role_rank(role), position, role, entity))
    keyed.sort(key=lambda item: (item[0], item[1], item[2]))

    out = []
    seen = set()
    for _, _, position, role, entity in keyed:
        if entity.instance_id in seen:
            continue
        seen.add(entity.instance_id)
        node = tree.node(position)
        out.append(
            CfEntry(
                entity=replace(entity, last_expression=node.lexeme.form),
                expression=node.lexeme.form,
                features=node.resolved_features,
                category=node.category,
                role=role,
                position=position,
            )
        )
    return out


def compute_transition(prev, cur_cb, cur_cf):
    """Classify the transition from the previous committed reading.

    A missing predecessor (discourse-initial utterance) counts as a
    continuation.
    """
    if prev is None:
        return "CONTINUE"
    cb = cur_cb.instance_id if cur_cb else None
    prev_cb = prev.cb.instance_id if prev.cb else None
    first = cur_cf[0].entity.instance_id if cur_cf else None
    if (cb == prev_cb or prev_cb is None) and cb == first:
        return "CONTINUE"
    if cb == prev_cb and cb != first:
        return "RETAIN"
    if cb != prev_cb and cb == first:
        return "SMOOTH-SHIFT"
    return "ROUGH-SHIFT"


def realized_entities(phrase, center_key):
    """Entities realized in a phrase reading, under one center reading.

    Unresolved anaphors contribute nothing; resolved ones contribute their
    antecedent entity at their own position.
    """
    out = []
    for position in phrase.tree.positions():
        entity = phrase.binding_for(position, center_key)
        if entity is None:
            entity = phrase.tree.node(position).entity
        if entity is not None:
            out.append((position, entity))
    return out


def commit_utterance(space, survivors, categories, utterance_index):
    """Turn the survivors of a finished sentence into the next master state.

    Every (centering state, phrase reading) survivor contributes one new
    center reading per predecessor reading in its state: Cf is rebuilt by
    ranking the utterance's realized entities, Cb is the most highly ranked
    element of the predecessor's original Cf realized here (for the
    discourse-initial utterance: the top of its own Cf), and the transition
    follows from the Cb comparison.  ``space`` may be None before the first
    utterance.
    """
    survivors = list(survivors)
    if not survivors:
        raise DiscourseError(f"no reading survived utterance {utterance_index}")
    committed = []
    counter = itertools.count(1)
    for state, phrase in survivors:
        prev_readings = state.readings if state is not None else [None]
        for prev in prev_readings:
            center_key = prev.reading_id if prev is not None else None
            entities = realized_entities(phrase, center_key)
            cf = rank_cf(phrase.tree, entities, categories)
            realized_ids = {entry.entity.instance_id: entry for entry in cf}
            cb = None
            if prev is None:
                if cf:
                    cb = cf[0].entity
            else:
                for entry in prev.original_cf:
                    hit = realized_ids.get(entry.entity.instance_id)
                    if hit is not None:
                        cb = hit.entity
                        break
            transition = compute_transition(prev, cb, cf)
            bindings = {}
            for position in sorted(phrase.center_bindings):
                entity = phrase.binding_for(position, center_key)
                if entity is not None:
                    bindings[position] = entity
            committed.append(
                CenterReading(
                    f"c{next(counter)}",
                    cb,
                    cf,
                    transition=transition,
                    lineage=(phrase.reading_id, prev.reading_id if prev else None),
                    bindings=bindings,
                )
            )
    master = CenteringState(f"master-u{utterance_index + 1}", committed)
    return AmbiguitySpace(master), committed


# ---------------------------------------------------------------------------
# Table emission


def format_centering_row(utterance_index, reading):
    cb = f"Cb: {reading.cb.label()}" if reading.cb else "Cb: -"
    cf = "Cf: [" + ", ".join(entry.label() for entry in reading.cf) + "]"
    return (
        f"({utterance_index})  {reading.reading_id}  {cb}  {cf}  {reading.transition}"
    )


def format_centering_table(history):
    """One row per utterance per center reading, mirroring the layout
    ``(utterance)  reading  Cb: INSTANCE: expr  Cf: [...]  TRANSITION``.
    """
    lines = []
    for utterance_index, readings in history:
        for reading in readings:
            lines.append(format_centering_row(utterance_index, reading))
    return "\n".join(lines) + ("\n" if lines else "")


_READING_COLUMN = re.compile(r"^(\(\d+\))  \S+  ")


def normalize_table(text):
    """Drop the reading-id column so tables compare modulo reading labels."""
    out = []
    for line in text.splitlines():
        out.append(_READING_COLUMN.sub(r"\1  ", line))
    return "\n".join(out) + ("\n" if out else "")

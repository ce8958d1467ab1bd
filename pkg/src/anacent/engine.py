"""The incremental resolution engine: attachment, triggers, and the message protocol.

Tokens are integrated into every live phrase reading as soon as their
attachment target exists; case-ambiguous attachments fork readings.  Two
events trigger anaphor resolution: a definite determiner attaching to its
head noun (nominal anaphors) and a pronoun attaching to its head
(pronominal anaphors).  Each episode first scans the forward-looking
centers of the preceding utterance, copy-isolated per phrase reading, and
falls back to the intrasentential candidate walk when every Cf is
exhausted.

Execution is a deterministic event loop.  The parallel branches of an
episode (one per live reading) operate on disjoint state, so any
interleaving of their messages yields the same bindings; the scheduler
replays them lockstep by default and in a seeded random order when
``schedule_seed`` is set.  Step labels follow a fixed protocol numbering:
1-4 routing, 5 state copy, 6 distribution, 7 antecedent test, 8 candidate
found, 9 admissibility, 10/11 success and consumption, 12 rejection, 13
exhaustion, 14 intrasentential trigger, 15/16 head hops, 17/18 candidate
dispatch and test, 19 confirmation.  Sibling branches carry letter
suffixes (7, 7a, 7b, ...).
"""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass, field
from dataclasses import replace as dc_replace

from .centering import commit_utterance, consume_antecedent, format_centering_table
from .constraints import (
    NOMINAL,
    PRONOMINAL,
    candidate_walk,
    nom_anaphor_test,
    pron_anaphor_test,
)
from .deptree import PhraseReading, WordNode, attach, d_binds
from .errors import DiscourseError, ProcessingError

TRACE_LEVELS = ("off", "summary", "full")

MESSAGE_KINDS = (
    "SearchNomAntecedent",
    "SearchPronAntecedent",
    "AntecedentFound",
    "AnaphorSucceed",
    "AnaphorReject",
    "CfExhausted",
)

ACTOR_ROLES = (
    "Anaphor",
    "PhraseActor",
    "ContainerActor",
    "ParserActor",
    "CenteringActor",
    "CenterActor",
    "Head",
    "Antecedent",
)

_LETTERS = "abcdefghijklmnopqrstuvwxyz"
_SUFFIXES = [""] + list(_LETTERS) + [a + b for a in _LETTERS for b in _LETTERS]

#: Fixed payload key order for deterministic trace lines.
_PAYLOAD_ORDER = (
    "sent",
    "episode",
    "anaphor",
    "rel",
    "head",
    "center",
    "entity",
    "candidate",
)


@dataclass
class EngineConfig:
    max_readings: int = 32
    ranking_policy: str = "grammatical-role"
    trace_level: str = "summary"
    schedule_seed: int | None = None

    def __post_init__(self):
        if self.max_readings < 1:
            raise ValueError("max_readings must be >= 1")
        if self.trace_level not in TRACE_LEVELS:
            raise ValueError(f"trace_level must be one of {TRACE_LEVELS}")
        if self.ranking_policy != "grammatical-role":
            raise ValueError("only the grammatical-role ranking policy is available")


@dataclass(frozen=True)
class Message:
    kind: str
    sender: str
    receiver: str
    payload: tuple = ()

    def payload_text(self):
        return ";".join(f"{k}={v}" for k, v in self.payload)


@dataclass(frozen=True)
class TraceEvent:
    step_label: str
    message: Message
    outcome: str
    reading_id: str

    def format(self):
        return (
            f"step={self.step_label} msg={self.message.kind} "
            f"from={self.message.sender} to={self.message.receiver} "
            f"reading={self.reading_id} payload={self.message.payload_text()} "
            f"outcome={self.outcome}"
        )

    def to_dict(self):
        return {
            "step": self.step_label,
            "msg": self.message.kind,
            "from": self.message.sender,
            "to": self.message.receiver,
            "reading": self.reading_id,
            "payload": dict(self.message.payload),
            "outcome": self.outcome,
        }


@dataclass(frozen=True)
class ResolutionOutcome:
    reading_id: str
    center_id: str | None
    route: str | None  # "intersentential" | "intrasentential" | None
    antecedent: str | None
    attachment: str | None

    def to_dict(self):
        return {
            "reading": self.reading_id,
            "center": self.center_id,
            "route": self.route,
            "antecedent": self.antecedent,
            "attachment": self.attachment,
        }


@dataclass
class EpisodeRecord:
    episode_id: str
    sentence_id: int
    anaphor_position: int
    surface: str
    kind: str
    branch_ids: tuple
    outcomes: list = field(default_factory=list)

    @property
    def branch_count(self):
        return len(self.branch_ids)

    def summary(self):
        parts = []
        for outcome in self.outcomes:
            where = outcome.reading_id
            if outcome.center_id:
                where += "/" + outcome.center_id
            parts.append(f"{where}:{outcome.antecedent or 'unresolved'}")
        return (
            f"episode {self.episode_id} sent={self.sentence_id} "
            f"anaphor={self.surface}@{self.anaphor_position} kind={self.kind} "
            f"branches={self.branch_count} -> {', '.join(parts)}"
        )

    def to_dict(self):
        return {
            "episode": self.episode_id,
            "sentence": self.sentence_id,
            "anaphor": {"position": self.anaphor_position, "surface": self.surface},
            "kind": self.kind,
            "branches": list(self.branch_ids),
            "outcomes": [o.to_dict() for o in self.outcomes],
        }


@dataclass
class ReadingFate:
    sentence_id: int
    reading_id: str
    alive: bool
    death_cause: str | None

    def to_dict(self):
        return {
            "sentence": self.sentence_id,
            "reading": self.reading_id,
            "alive": self.alive,
            "death_cause": self.death_cause,
        }


def _percent(n, total):
    return round(100 * n / total) if total else 0


@dataclass
class RunResult:
    doc_id: str
    config: EngineConfig
    history: list  # [(sentence_id, [CenterReading, ...])]
    trace: list  # [TraceEvent]
    episodes: list  # [EpisodeRecord]
    reading_fates: list  # [ReadingFate]
    master_snapshots: list  # [(episode_id, before, after)]
    classification: dict | None

    def centering_table(self):
        return format_centering_table(self.history)

    def trace_text(self):
        level = self.config.trace_level
        if level == "off":
            return ""
        if level == "summary":
            lines = [episode.summary() for episode in self.episodes]
        else:
            lines = [event.format() for event in self.trace]
        return "\n".join(lines) + ("\n" if lines else "")

    def resolution_report(self):
        lines = [f"document {self.doc_id}"]
        episodes_by_sentence = {}
        for episode in self.episodes:
            episodes_by_sentence.setdefault(episode.sentence_id, []).append(episode)
        fates_by_sentence = {}
        for fate in self.reading_fates:
            fates_by_sentence.setdefault(fate.sentence_id, []).append(fate)
        for sentence_id, _ in self.history:
            lines.append(f"sentence {sentence_id}")
            for episode in episodes_by_sentence.get(sentence_id, []):
                lines.append(
                    f"  anaphor {episode.surface}@{episode.anaphor_position} "
                    f"({episode.kind}), branches={episode.branch_count}"
                )
                for outcome in episode.outcomes:
                    where = outcome.reading_id
                    if outcome.center_id:
                        where += f" center {outcome.center_id}"
                    if outcome.antecedent:
                        via = f" via {outcome.route}"
                        att = f" [{outcome.attachment}]" if outcome.attachment else ""
                        lines.append(f"    {where}: {outcome.antecedent}{via}{att}")
                    else:
                        lines.append(f"    {where}: unresolved")
            alive = [f.reading_id for f in fates_by_sentence.get(sentence_id, []) if f.alive]
            dead = [f for f in fates_by_sentence.get(sentence_id, []) if not f.alive]
            lines.append(f"  surviving readings: {', '.join(alive) if alive else '-'}")
            for fate in dead:
                lines.append(f"  dead reading {fate.reading_id}: {fate.death_cause}")
        return "\n".join(lines) + "\n"

    def ambiguity_report(self):
        if self.classification is None:
            return "pronoun ambiguity classification disabled (trace level off)\n"
        counts = self.classification["counts"]
        total = self.classification["total"]
        ambiguous = counts["locally"] + counts["globally"]
        lines = [
            "Pronoun ambiguity distribution",
            f"  ambiguous    {ambiguous}  ({_percent(ambiguous, total)} %)",
            f"    locally    {counts['locally']}  ({_percent(counts['locally'], total)} %)",
            f"    globally   {counts['globally']}  ({_percent(counts['globally'], total)} %)",
            f"  unambiguous  {counts['unambiguous']}  ({_percent(counts['unambiguous'], total)} %)",
            f"  total        {total}",
        ]
        if self.classification["pronouns"]:
            lines.append("Per-pronoun classification")
            for item in self.classification["pronouns"]:
                lines.append(
                    f"  sentence {item['sentence']}: {item['surface']}@{item['position']}"
                    f" -> {item['label']}"
                )
        return "\n".join(lines) + "\n"

    def to_dict(self):
        return {
            "document": self.doc_id,
            "utterances": [
                {
                    "sentence": sentence_id,
                    "readings": [reading.to_dict() for reading in readings],
                }
                for sentence_id, readings in self.history
            ],
            "episodes": [episode.to_dict() for episode in self.episodes],
            "readings": [fate.to_dict() for fate in self.reading_fates],
            "classification": self.classification,
        }


class CenteringEngine:
    """Drives one document through incremental attachment and resolution."""

    def __init__(self, categories, taxonomy, config=None):
        self.categories = categories
        self.taxonomy = taxonomy
        self.config = config or EngineConfig()
        self.space = None  # ambiguity space of the previous utterance
        self.history = []
        self.trace = []
        self.episodes = []
        self.reading_fates = []
        self.master_snapshots = []
        self._episode_counter = itertools.count(1)
        self._sentence_id = None
        self._readings = []
        self._reading_counter = None
        self._deferred = {}
        self._position = 0

    # -- sentence lifecycle -------------------------------------------------

    def start_sentence(self, sentence_id):
        if self._sentence_id is not None:
            raise ProcessingError("previous sentence still open")
        self._sentence_id = sentence_id
        self._reading_counter = itertools.count(1)
        self._readings = [PhraseReading(f"r{next(self._reading_counter)}")]
        self._deferred = {}
        self._position = 0

    def live_readings(self):
        return [reading for reading in self._readings if reading.alive]

    def _new_reading_id(self):
        return f"r{next(self._reading_counter)}"

    # -- token processing ---------------------------------------------------

    def process_token(self, token):
        """Integrate one token into every live reading and fire any triggers."""
        if self._sentence_id is None:
            raise ProcessingError("no open sentence")
        self._position += 1
        position = self._position
        self._create_nodes(position, token)

        # The token attaches first (it may head deferred material), then the
        # deferred tokens whose target just arrived, in surface order.
        if token.attach_hints:
            options = self._available_options(position, token.attach_hints)
            if options:
                self._apply_attachment(position, options)
            else:
                future = sorted(
                    position + offset
                    for offset, _ in token.attach_hints
                    if position + offset > position
                )
                if not future:
                    raise ProcessingError(
                        f"token {token.surface!r}@{position} has no reachable "
                        f"attachment target (sentence {self._sentence_id})"
                    )
                self._deferred.setdefault(future[0], []).append((position, token))
        for deferred_position, deferred_token in sorted(self._deferred.pop(position, [])):
            options = self._available_options(deferred_position, deferred_token.attach_hints)
            self._apply_attachment(deferred_position, options)

    def _create_nodes(self, position, token):
        # Only nominal expressions evoke discourse entities; concepts on
        # verbs and prepositions merely feed the permit predicate.
        if token.concept_type is not None and self.categories.isa_c_star(
            token.category, "Nominal"
        ):
            entity = self.taxonomy.entity_for(token.concept_type, token.surface)
        else:
            entity = None

        def lexeme(variant):
            lex = token.lexeme(variant)
            if entity is not None and lex.concept_type != entity.concept_type:
                # Instance references resolve to the instance's concept.
                lex = dc_replace(lex, concept_type=entity.concept_type)
            return lex

        if len(token.morph_readings) == 1:
            for reading in self.live_readings():
                reading.tree.add_node(WordNode(position, lexeme(0), entity=entity))
            return
        # Morphologically ambiguous tokens fork every live reading.
        forked = []
        for reading in self.live_readings():
            for variant in range(len(token.morph_readings)):
                successor = reading.clone(self._new_reading_id())
                successor.tree.add_node(WordNode(position, lexeme(variant), entity=entity))
                forked.append(successor)
        self._replace_readings(forked)
        self._rebrand_copies()

    def _rebrand_copies(self):
        """Keep inherited centering copies named after their current reading."""
        if self.space is None:
            return
        for reading in self._readings:
            state = reading.centering
            if state is not None and state.origin_phrase != reading.reading_id:
                state.origin_phrase = reading.reading_id
                state.state_id = f"{self.space.master.state_id}/copy-{reading.reading_id}"
                self.space.register(state)

    def _available_options(self, position, hints):
        options = []
        for offset, relation in hints:
            target = position + offset
            if 1 <= target <= self._position:
                options.append((target, relation))
        return options

    def _apply_attachment(self, position, options):
        survivors = []
        for reading in self.live_readings():
            node = reading.tree.node(position)
            successors = []
            for head, relation in options:
                if not reading.tree.node(head).lexeme.allows(relation):
                    continue
                successors.extend(attach(reading, head, position, relation, self.taxonomy))
            if not successors:
                reading.kill(
                    f"no consistent attachment for {node.lexeme.form!r}@{position}"
                )
                self.reading_fates.append(
                    ReadingFate(self._sentence_id, reading.reading_id, False, reading.death_cause)
                )
                continue
            if len(successors) == 1:
                successors[0].reading_id = reading.reading_id
            else:
                for successor in successors:
                    successor.reading_id = self._new_reading_id()
            survivors.extend(successors)
        self._replace_readings(survivors)
        self._rebrand_copies()
        self._fire_triggers(position)

    def _replace_readings(self, readings):
        if not readings:
            raise ProcessingError(
                f"all readings died at token {self._position} "
                f"(sentence {self._sentence_id})"
            )
        if len(readings) > self.config.max_readings:
            raise ProcessingError(
                f"reading fan-out {len(readings)} exceeds limit "
                f"{self.config.max_readings} (sentence {self._sentence_id})"
            )
        self._readings = readings

    def _fire_triggers(self, attached_position):
        sample = self.live_readings()[0]
        tree = sample.tree
        node = tree.node(attached_position)
        link = tree.head_of(attached_position)
        if link is None:
            return
        if self.categories.isa_c_star(node.category, "PersonalPronoun"):
            self._run_episode(attached_position, PRONOMINAL)
            return
        head, relation = link
        if (
            relation == "spec"
            and self.categories.isa_c_star(node.category, "DefiniteDeterminer")
            and self.categories.isa_c_star(tree.node(head).category, "Noun")
        ):
            self._run_episode(head, NOMINAL)

    # -- resolution episodes ------------------------------------------------

    def _run_episode(self, anaphor_position, kind):
        episode_id = f"e{next(self._episode_counter)}"
        branches = self.live_readings()
        before = self.space.serialize_master() if self.space else None
        surface = branches[0].tree.node(anaphor_position).lexeme.form
        record = EpisodeRecord(
            episode_id,
            self._sentence_id,
            anaphor_position,
            surface,
            kind,
            tuple(reading.reading_id for reading in branches),
        )
        branch_events = []
        for index, reading in enumerate(branches):
            suffix = _SUFFIXES[index]
            events, outcomes = self._episode_branch(
                reading, suffix, anaphor_position, kind, episode_id
            )
            branch_events.append(events)
            record.outcomes.extend(outcomes)
        self.trace.extend(
            _merge_branch_events(branch_events, self.config.schedule_seed, episode_id)
        )
        after = self.space.serialize_master() if self.space else None
        self.master_snapshots.append((episode_id, before, after))
        self.episodes.append(record)

    def _episode_branch(self, reading, suffix, anaphor_position, kind, episode_id):
        events = []
        tree = reading.tree
        node = tree.node(anaphor_position)
        link = tree.head_of(anaphor_position)
        search = "SearchNomAntecedent" if kind == NOMINAL else "SearchPronAntecedent"
        base_payload = (
            ("sent", self._sentence_id),
            ("episode", episode_id),
            ("anaphor", f"{node.lexeme.form}@{anaphor_position}"),
            ("rel", link[1] if link else "-"),
            ("head", link[0] if link else "-"),
        )

        def emit(step, msg_kind, sender, receiver, outcome, **extra):
            payload = dict(base_payload)
            payload.update(extra)
            ordered = tuple(
                (key, payload[key]) for key in _PAYLOAD_ORDER if key in payload
            )
            events.append(
                TraceEvent(
                    f"{step}{suffix}",
                    Message(msg_kind, sender, receiver, ordered),
                    outcome,
                    reading.reading_id,
                )
            )

        outcomes = []
        emit("1", search, "Anaphor", "PhraseActor", "search dispatched")
        emit("2", search, "PhraseActor", "ContainerActor", "forwarded")
        emit("3", search, "ContainerActor", "ParserActor", "forwarded")

        resolved = False
        if self.space is not None:
            emit("4", search, "ParserActor", "CenteringActor", "forwarded to preceding utterance")
            if reading.centering is None:
                reading.centering = self.space.copy_state(reading.reading_id)
                emit(
                    "5", search, "CenteringActor", "CenteringActor",
                    f"master copied to {reading.centering.state_id}",
                )
            else:
                emit(
                    "5", search, "CenteringActor", "CenteringActor",
                    f"using private copy {reading.centering.state_id}",
                )
            state = reading.centering
            scanned = []
            for center in state.readings:
                bound = self._scan_center(
                    reading, node, link, kind, center, emit, search, outcomes
                )
                scanned.append((center, bound))
                resolved = resolved or bound
            if resolved:
                for center, bound in scanned:
                    if not bound:
                        outcomes.append(
                            ResolutionOutcome(
                                reading.reading_id,
                                center.reading_id,
                                None,
                                None,
                                link[1] if link else None,
                            )
                        )
                return events, outcomes
            emit("14", search, "Anaphor", "PhraseActor", "intrasentential search triggered")
        else:
            emit(
                "14", search, "Anaphor", "PhraseActor",
                "no preceding utterance; intrasentential search triggered",
            )

        outcome = self._intrasentential_phase(
            reading, node, link, kind, emit, search
        )
        outcomes.append(outcome)
        return events, outcomes

    def _scan_center(self, reading, node, link, kind, center, emit, search, outcomes):
        """Scan one center reading's Cf in preference order; True iff bound."""
        emit(
            "6", search, "CenteringActor", "CenterActor",
            "theAttachment copied", center=center.reading_id,
        )
        test_name = "NomAnaphorTest" if kind == NOMINAL else "PronAnaphorTest"
        for entry in list(center.cf):
            instance = entry.entity.instance_id
            if kind == NOMINAL:
                ok = nom_anaphor_test(node, entry, self.categories, self.taxonomy)
            else:
                ok = pron_anaphor_test(node, entry, self.categories)
            emit(
                "7", search, "CenterActor", "CenterActor",
                f"{test_name} {'passed' if ok else 'failed'} for {instance}",
                center=center.reading_id, entity=instance,
            )
            if not ok:
                continue
            emit(
                "8", "AntecedentFound", "CenterActor", "Anaphor",
                f"antecedent candidate {instance}",
                center=center.reading_id, entity=instance,
            )
            permitted, description = self._permit_check(reading, node, link, entry.concept)
            emit(
                "9", "AntecedentFound", "Anaphor", "Head", description,
                center=center.reading_id, entity=instance,
            )
            if permitted:
                emit(
                    "10", "AnaphorSucceed", "Anaphor", "CenterActor",
                    f"antecedent {instance} accepted; attachment confirmed",
                    center=center.reading_id, entity=instance,
                )
                consume_antecedent(center, entry.entity)
                remaining = ", ".join(e.entity.instance_id for e in center.cf)
                emit(
                    "11", "AnaphorSucceed", "CenterActor", "CenterActor",
                    f"{instance} removed from Cf; Cf now [{remaining}]",
                    center=center.reading_id, entity=instance,
                )
                reading.bind(node.position, center.reading_id, entry.entity)
                if len(reading.centering.readings) == 1:
                    node.entity = entry.entity
                outcomes.append(
                    ResolutionOutcome(
                        reading.reading_id,
                        center.reading_id,
                        "intersentential",
                        instance,
                        link[1] if link else None,
                    )
                )
                return True
            emit(
                "12", "AnaphorReject", "Anaphor", "CenterActor", description,
                center=center.reading_id, entity=instance,
            )
        emit(
            "13", "CfExhausted", "CenterActor", "Anaphor",
            "the Cf list is exhausted", center=center.reading_id,
        )
        return False

    def _intrasentential_phase(self, reading, node, link, kind, emit, search):
        tree = reading.tree
        unresolved = ResolutionOutcome(
            reading.reading_id, None, None, None, link[1] if link else None
        )
        if link is None:
            emit(
                "end", "AnaphorReject", "Anaphor", "PhraseActor",
                "unresolved (anaphor not attached)",
            )
            return unresolved
        test_name = "NomAnaphorTest" if kind == NOMINAL else "PronAnaphorTest"
        first_hop = True
        for head, candidates in candidate_walk(tree, node.position, self.categories):
            head_form = tree.node(head).lexeme.form
            if first_hop:
                binds = d_binds(tree, head, node.position, self.categories)
                note = ", d-binds initiator" if binds else ""
                emit("15", search, "Anaphor", "Head", f"reached head {head_form}@{head}{note}")
                first_hop = False
            else:
                emit("16", search, "Head", "Head", f"forwarded to head {head_form}@{head}")
            for candidate in candidates:
                cand_node = tree.node(candidate)
                instance = cand_node.entity.instance_id
                emit(
                    "17", search, "Head", "Antecedent",
                    f"candidate {cand_node.lexeme.form}@{candidate}",
                    candidate=f"{cand_node.lexeme.form}@{candidate}", entity=instance,
                )
                if kind == NOMINAL:
                    ok = nom_anaphor_test(node, cand_node, self.categories, self.taxonomy)
                else:
                    ok = pron_anaphor_test(node, cand_node, self.categories)
                if not ok:
                    emit(
                        "18", search, "Antecedent", "Antecedent",
                        f"{test_name} failed",
                        candidate=f"{cand_node.lexeme.form}@{candidate}", entity=instance,
                    )
                    continue
                permitted, description = self._permit_check(
                    reading, node, link, cand_node.concept
                )
                emit(
                    "18", search, "Antecedent", "Antecedent",
                    f"{test_name} passed; {description}",
                    candidate=f"{cand_node.lexeme.form}@{candidate}", entity=instance,
                )
                if permitted:
                    emit(
                        "19", "AntecedentFound", "Antecedent", "Anaphor",
                        f"attachment {link[1]} confirmed; bound to {instance}",
                        candidate=f"{cand_node.lexeme.form}@{candidate}", entity=instance,
                    )
                    reading.bind(node.position, None, cand_node.entity)
                    node.entity = cand_node.entity
                    return ResolutionOutcome(
                        reading.reading_id, None, "intrasentential", instance, link[1]
                    )
        emit(
            "end", "AnaphorReject", "Anaphor", "PhraseActor",
            "unresolved (no admissible antecedent)",
        )
        return unresolved

    def _permit_check(self, reading, anaphor_node, link, candidate_concept):
        if link is None:
            return True, "permit skipped (anaphor unattached)"
        head, relation = link
        head_concept = reading.tree.node(head).concept
        if head_concept is None or candidate_concept is None:
            return True, "permit skipped (missing concept)"
        count = 0
        for modifier in reading.tree.modifiers(head):
            if modifier == anaphor_node.position:
                continue
            if (
                reading.tree.relation_of(modifier) == relation
                and reading.tree.node(modifier).concept is not None
            ):
                count += 1
        permitted = self.taxonomy.permit(
            head_concept, relation, candidate_concept, {relation: count}
        )
        verdict = "succeeded" if permitted else "failed"
        return permitted, f"permit({head_concept}, {relation}, {candidate_concept}) {verdict}"

    # -- sentence commit ----------------------------------------------------

    def end_sentence(self):
        if self._sentence_id is None:
            raise ProcessingError("no open sentence")
        leftover = sorted(
            (position, token.surface)
            for entries in self._deferred.values()
            for position, token in entries
        )
        if leftover:
            position, surface = leftover[0]
            raise ProcessingError(
                f"attachment target of {surface!r}@{position} never arrived "
                f"(sentence {self._sentence_id})"
            )
        survivors = self.live_readings()
        if not survivors:
            raise DiscourseError(f"no reading survived sentence {self._sentence_id}")
        pairs = []
        for reading in survivors:
            state = reading.centering
            if state is None and self.space is not None:
                state = self.space.master
            pairs.append((state, reading))
            self.reading_fates.append(
                ReadingFate(self._sentence_id, reading.reading_id, True, None)
            )
        self.space, committed = commit_utterance(
            self.space, pairs, self.categories, self._sentence_id
        )
        self.history.append((self._sentence_id, committed))
        self._sentence_id = None
        self._readings = []
        self._deferred = {}
        self._position = 0
        return committed

    # -- document wrap-up ---------------------------------------------------

    def classify_pronoun_ambiguity(self):
        """Classify every pronoun episode as unambiguous / locally / globally ambiguous.

        A pronoun is locally ambiguous when its episode ran under more than
        one live reading, globally ambiguous when more than one committed
        center reading of its sentence carries a distinct binding for it,
        and unambiguous otherwise.  Requires trace level ``summary`` or above.
        """
        if self.config.trace_level == "off":
            return None
        committed_by_sentence = dict(self.history)
        pronouns = []
        counts = {"locally": 0, "globally": 0, "unambiguous": 0}
        for episode in self.episodes:
            if episode.kind != PRONOMINAL:
                continue
            readings = committed_by_sentence.get(episode.sentence_id, [])
            bound = {
                reading.bindings[episode.anaphor_position].instance_id
                for reading in readings
                if episode.anaphor_position in reading.bindings
            }
            if episode.branch_count > 1:
                label = "locally ambiguous"
                counts["locally"] += 1
            elif len(bound) > 1:
                label = "globally ambiguous"
                counts["globally"] += 1
            else:
                label = "unambiguous"
                counts["unambiguous"] += 1
            pronouns.append(
                {
                    "sentence": episode.sentence_id,
                    "position": episode.anaphor_position,
                    "surface": episode.surface,
                    "label": label,
                    "bindings": sorted(bound),
                }
            )
        return {
            "counts": counts,
            "total": len(pronouns),
            "pronouns": pronouns,
        }

    def finish(self, doc_id="<document>"):
        if self._sentence_id is not None:
            raise ProcessingError("a sentence is still open")
        return RunResult(
            doc_id=doc_id,
            config=self.config,
            history=list(self.history),
            trace=list(self.trace),
            episodes=list(self.episodes),
            reading_fates=list(self.reading_fates),
            master_snapshots=list(self.master_snapshots),
            classification=self.classify_pronoun_ambiguity(),
        )


def _merge_branch_events(branch_events, schedule_seed, episode_id):
    """Interleave per-branch event sequences.

    Branches operate on disjoint state, so the merge order never changes
    bindings; it only affects trace layout.  Default is lockstep (matching
    the parallel-sibling presentation); a seed yields a random but
    reproducible interleaving that preserves per-branch order.
    """
    queues = [list(events) for events in branch_events if events]
    merged = []
    if schedule_seed is None:
        index = 0
        while True:
            emitted = False
            for queue in queues:
                if index < len(queue):
                    merged.append(queue[index])
                    emitted = True
            if not emitted:
                break
            index += 1
        return merged
    rng = random.Random(f"{schedule_seed}:{episode_id}")
    while queues:
        queue = rng.choice(queues)
        merged.append(queue.pop(0))
        if not queue:
            queues.remove(queue)
    return merged


def run_document(document, categories, taxonomy, config=None, max_sentences=None):
    """Drive a document through the engine sentence by sentence."""
    engine = CenteringEngine(categories, taxonomy, config)
    sentences = document.sentences()
    if max_sentences is not None:
        sentences = sentences[:max_sentences]
    for sentence_id, tokens in sentences:
        engine.start_sentence(sentence_id)
        for index, token in enumerate(tokens, 1):
            try:
                engine.process_token(token)
            except ProcessingError as exc:
                raise ProcessingError(
                    f"sentence {sentence_id}, token {index} ({token.surface!r}): {exc}"
                ) from exc
        engine.end_sentence()
    return engine.finish(document.doc_id)

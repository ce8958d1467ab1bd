"""Labeled dependency trees, topological predicates, and incremental attachment.

Trees map 1-based token positions to word nodes and keep at most one head
arc per node (a forest).  On top of the raw structure live the binding
predicates: ``head_plus`` (transitive headship), ``d_binds`` (the
dependency-grammar analogue of a governing category), and
``is_potential_anaphoric_antecedent`` (the accessibility filter combining
d-binding with linear precedence).  ``attach`` grows a phrase reading by
one arc per consistent case assignment, which is where local structural
ambiguity enters.
"""

from __future__ import annotations

import copy
from dataclasses import dataclass

from .errors import ProcessingError, UnknownIdentifierError
from .lexicon import (
    BOTTOM,
    REPEATABLE_RELATIONS,
    FeatureStructure,
    unify,
)

RELATION_LABELS = (
    "subject",
    "object",
    "spec",
    "saxGen",
    "ppAtt",
    "genAtt",
    "ppObject",
    "adjunct",
)

#: Case demanded of the modifier by the relation itself.
CASE_FOR_RELATION = {
    "subject": frozenset({"nom"}),
    "object": frozenset({"acc"}),
    "genAtt": frozenset({"gen"}),
    "saxGen": frozenset({"gen"}),
}

#: Relations whose fillers are semantic arguments and go through ``permit``.
SEMANTIC_RELATIONS = frozenset({"subject", "object", "ppObject", "genAtt", "saxGen"})


class WordNode:
    """One token occurrence inside a phrase reading.

    ``resolved_features`` starts as the lexeme's features and is narrowed by
    every attachment-imposed constraint; it is never BOTTOM in a live
    reading.  ``entity`` is the discourse referent the node realises, if any
    (anaphor resolution may rebind it).
    """

    __slots__ = ("position", "lexeme", "resolved_features", "entity")

    def __init__(self, position, lexeme, resolved_features=None, entity=None):
        self.position = position
        self.lexeme = lexeme
        self.resolved_features = (
            resolved_features if resolved_features is not None else lexeme.features
        )
        self.entity = entity

    @property
    def category(self):
        return self.lexeme.category

    @property
    def features(self):
        return self.resolved_features

    @property
    def concept(self):
        """The node's current concept: the resolved entity's, else the lexeme's."""
        if self.entity is not None:
            return self.entity.concept_type
        return self.lexeme.concept_type

    def clone(self):
        return WordNode(self.position, self.lexeme, self.resolved_features, self.entity)

    def __repr__(self):
        return f"WordNode({self.lexeme.form}@{self.position})"


class DependencyTree:
    """A forest of labeled head-modifier arcs over token positions."""

    def __init__(self):
        self._nodes = {}
        self._heads = {}  # modifier position -> (head position, relation)

    def add_node(self, node):
        if node.position in self._nodes:
            raise ProcessingError(f"position {node.position} already present")
        self._nodes[node.position] = node

    def node(self, position):
        try:
            return self._nodes[position]
        except KeyError:
            raise UnknownIdentifierError(f"unknown position {position}") from None

    def __contains__(self, position):
        return position in self._nodes

    def __len__(self):
        return len(self._nodes)

    def positions(self):
        return sorted(self._nodes)

    def arcs(self):
        """All (head, modifier, relation) triples, ordered by modifier position."""
        return [(h, m, rel) for m, (h, rel) in sorted(self._heads.items())]

    def add_arc(self, head, modifier, relation):
        self.node(head)
        self.node(modifier)
        if relation not in RELATION_LABELS:
            raise ProcessingError(f"unknown relation label {relation!r}")
        if modifier in self._heads:
            raise ProcessingError(f"position {modifier} already has a head")
        # Reject cycles: the head must not sit below the modifier.
        cur = head
        while cur is not None:
            if cur == modifier:
                raise ProcessingError(
                    f"arc {head}->{modifier} would create a cycle"
                )
            link = self._heads.get(cur)
            cur = link[0] if link else None
        self._heads[modifier] = (head, relation)

    def head_of(self, modifier):
        """The (head position, relation) pair of ``modifier``, or None."""
        self.node(modifier)
        return self._heads.get(modifier)

    def relation_of(self, modifier):
        link = self.head_of(modifier)
        return link[1] if link else None

    def modifiers(self, head):
        """Direct modifiers of ``head`` in surface order."""
        self.node(head)
        return [m for m in sorted(self._heads) if self._heads[m][0] == head]

    def head_chain(self, position):
        """Positions on the head path from ``position`` upward (excluding it)."""
        out = []
        link = self.head_of(position)
        while link is not None:
            out.append(link[0])
            link = self._heads.get(link[0])
        return out

    def clone(self):
        new = DependencyTree()
        for pos in sorted(self._nodes):
            new._nodes[pos] = self._nodes[pos].clone()
        new._heads = dict(self._heads)
        return new


def left_plus(tree, x, y):
    """Linear precedence: ``x`` occurs left of ``y``."""
    return tree.node(x).position < tree.node(y).position


def head_plus(tree, x, y):
    """True iff ``x`` transitively heads ``y`` (one or more head links up)."""
    tree.node(x)
    return x in tree.head_chain(y)


def _is_barrier(tree, z, categories):
    """Does node ``z`` block d-binding through it?"""
    z_node = tree.node(z)
    if categories.isa_c_star(z_node.category, "FiniteVerb"):
        return True
    for u in tree.modifiers(z):
        relation = tree.relation_of(u)
        u_cat = tree.node(u).category
        if relation == "spec" and categories.isa_c_star(u_cat, "DetPossessive"):
            return True
        if relation in ("saxGen", "ppAtt", "genAtt") and categories.isa_c_star(
            u_cat, "Noun"
        ):
            return True
    return False


def d_binds(tree, x, y, categories):
    """True iff ``x`` d-binds ``y``.

    ``x`` must transitively head ``y`` with no intervening node that is a
    finite verb or that carries a possessive specifier or a Saxon-genitive /
    PP-attribute / genitive-attribute nominal modifier.
    """
    if not head_plus(tree, x, y):
        return False
    # The intermediate nodes are exactly the head path strictly between y and x.
    path = [y] + tree.head_chain(y)
    below = path[1 : path.index(x)]
    return not any(_is_barrier(tree, z, categories) for z in below)


def is_potential_anaphoric_antecedent(tree, x, y, categories):
    """Accessibility of ``x`` as an anaphoric antecedent of ``y``.

    No node may d-bind both of them, and whenever some node d-binds ``y``
    while transitively heading ``x``, ``x`` must precede ``y``.
    """
    tree.node(x)
    tree.node(y)
    for z in tree.positions():
        if d_binds(tree, z, x, categories) and d_binds(tree, z, y, categories):
            return False
    for u in tree.positions():
        if d_binds(tree, u, y, categories) and head_plus(tree, u, x):
            if not left_plus(tree, x, y):
                return False
    return True


def is_potential_antecedent_cross(tree_x, x, tree_y, y, categories):
    """Cross-tree variant: candidates in a different tree are always accessible.

    Nodes of distinct trees share no d-binder and no common head, so the
    intersentential case passes vacuously.
    """
    if tree_x is tree_y:
        return is_potential_anaphoric_antecedent(tree_x, x, y, categories)
    tree_x.node(x)
    tree_y.node(y)
    return True


# ---------------------------------------------------------------------------
# Phrase readings and attachment


class PhraseReading:
    """One syntactic interpretation of the words seen so far."""

    def __init__(self, reading_id, tree=None):
        self.reading_id = reading_id
        self.tree = tree if tree is not None else DependencyTree()
        self.alive = True
        self.death_cause = None
        #: Centering copy owned by this reading (engine-managed).
        self.centering = None
        #: anaphor position -> {center reading id or None: DiscourseEntity}
        self.center_bindings = {}

    def kill(self, cause):
        if not self.alive:
            raise ProcessingError(f"reading {self.reading_id} is already dead")
        self.alive = False
        self.death_cause = cause

    def clone(self, new_id=None):
        new = PhraseReading(new_id or self.reading_id, self.tree.clone())
        new.centering = copy.deepcopy(self.centering)
        new.center_bindings = {
            pos: dict(bindings) for pos, bindings in self.center_bindings.items()
        }
        return new

    def bind(self, position, center_key, entity):
        self.center_bindings.setdefault(position, {})[center_key] = entity

    def binding_for(self, position, center_key):
        bindings = self.center_bindings.get(position, {})
        if center_key in bindings:
            return bindings[center_key]
        return bindings.get(None)

    def __repr__(self):
        state = "alive" if self.alive else f"dead({self.death_cause})"
        return f"PhraseReading({self.reading_id}, {state})"


@dataclass
class Container:
    """All readings covering the same token span."""

    span: tuple
    readings: list

    def __post_init__(self):
        if not self.readings:
            raise ProcessingError("a container requires at least one reading")
        sizes = {len(r.tree) for r in self.readings}
        if len(sizes) > 1:
            raise ProcessingError("readings in one container must cover the same span")

    def live_readings(self):
        return [r for r in self.readings if r.alive]


def _subject_agreement(head_features):
    constraint = {}
    for name in ("num", "pers"):
        values = head_features.get(name)
        if values is not None:
            constraint[name] = values
    return FeatureStructure(**constraint)


def attach(reading, head, modifier, relation=None, taxonomy=None):
    """Attach ``modifier`` under ``head`` and return the successor readings.

    With an explicit relation the result holds at most one successor; with
    ``relation=None`` every relation in the head's valence is tried and each
    consistent case assignment yields its own successor reading.  An empty
    result means no assignment was consistent (the caller records the
    reading's death).  The input reading is never mutated.
    """
    if not reading.alive:
        raise ProcessingError(f"cannot attach into dead reading {reading.reading_id}")
    tree = reading.tree
    head_node = tree.node(head)
    mod_node = tree.node(modifier)
    if tree.head_of(modifier) is not None:
        raise ProcessingError(f"position {modifier} already has a head")

    if relation is None:
        relations = [slot.relation for slot in head_node.lexeme.valence]
    else:
        if not head_node.lexeme.allows(relation):
            raise ProcessingError(
                f"relation {relation!r} not in valence of "
                f"{head_node.lexeme.form!r}@{head}"
            )
        relations = [relation]

    successors = []
    for rel in relations:
        if rel not in REPEATABLE_RELATIONS and any(
            tree.relation_of(m) == rel for m in tree.modifiers(head)
        ):
            continue  # single-valued slot already filled

        mod_features = mod_node.resolved_features
        head_features = head_node.resolved_features
        if rel in CASE_FOR_RELATION:
            mod_features = unify(mod_features, FeatureStructure(case=CASE_FOR_RELATION[rel]))
        elif rel == "ppObject":
            governed = head_features.get("case")
            if governed is not None:
                mod_features = unify(mod_features, FeatureStructure(case=governed))
        elif rel == "spec":
            mod_features = unify(mod_features, head_features)
        if mod_features is BOTTOM:
            continue
        if rel == "spec":
            head_features = mod_features
        elif rel == "subject":
            mod_features = unify(mod_features, _subject_agreement(head_features))
            if mod_features is BOTTOM:
                continue
            head_features = unify(head_features, _subject_agreement(mod_features))
            if head_features is BOTTOM:
                continue

        if rel in SEMANTIC_RELATIONS and taxonomy is not None:
            head_concept = head_node.concept
            mod_concept = mod_node.concept
            if head_concept is not None and mod_concept is not None:
                fillers = {rel: _semantic_filler_count(tree, head, rel)}
                if not taxonomy.permit(head_concept, rel, mod_concept, fillers):
                    continue

        successor = reading.clone()
        successor.tree.add_arc(head, modifier, rel)
        successor.tree.node(modifier).resolved_features = mod_features
        successor.tree.node(head).resolved_features = head_features
        successors.append(successor)
    return successors


def _semantic_filler_count(tree, head, relation):
    count = 0
    for m in tree.modifiers(head):
        if tree.relation_of(m) == relation and tree.node(m).concept is not None:
            count += 1
    return count

"""Shared fixtures: knowledge bases, tree builders, and brute-force oracles.

The oracles re-evaluate the quantified binding formulas by exhaustive
enumeration over an independently computed transitive closure, so the
production predicates can be checked against them on random forests.
"""

import os
import random

import pytest

from anacent.deptree import DependencyTree, PhraseReading, WordNode
from anacent.lexicon import (
    CategoryHierarchy,
    FeatureStructure,
    Lexeme,
    Taxonomy,
    ValenceSlot,
)

DATA_DIR = os.path.join(os.path.dirname(__file__), "..", "src", "anacent", "data")
TEST_DATA_DIR = os.path.join(os.path.dirname(__file__), "data")


@pytest.fixture(scope="session")
def categories():
    return CategoryHierarchy.load(os.path.join(DATA_DIR, "categories.cat"))


@pytest.fixture(scope="session")
def taxonomy():
    return Taxonomy.load(os.path.join(DATA_DIR, "taxonomy.tax"))


@pytest.fixture(scope="session")
def fixture_doc_path():
    return os.path.join(DATA_DIR, "lps105.doc")


def make_lexeme(form, category, features="-", concept=None, valence=()):
    slots = tuple(
        ValenceSlot(rel.rstrip("!"), rel.endswith("!")) for rel in valence
    )
    return Lexeme(
        form=form,
        lemma=form.lower(),
        category=category,
        features=FeatureStructure.parse(features),
        concept_type=concept,
        valence=slots,
    )


_NOMINAL_CATEGORIES = ("Nominal", "Noun", "PersonalPronoun", "ReflexivePronoun")


def make_tree(nodes, arcs=(), taxonomy=None):
    """Build a tree from (pos, form, category, features, concept-ref) tuples.

    A concept-ref on a nominal node creates its discourse entity through the
    taxonomy; on other nodes it only sets the lexical concept (for permit).
    Arcs are (head, modifier, relation) triples added verbatim.
    """
    tree = DependencyTree()
    for pos, form, category, features, concept in nodes:
        entity = None
        lexical_concept = None
        if concept is not None:
            resolved = taxonomy.entity_for(concept, form)
            lexical_concept = resolved.concept_type
            if category in _NOMINAL_CATEGORIES:
                entity = resolved
        lexeme = make_lexeme(form, category, features, lexical_concept)
        tree.add_node(WordNode(pos, lexeme, entity=entity))
    for head, modifier, relation in arcs:
        tree.add_arc(head, modifier, relation)
    return tree


def make_reading(reading_id, nodes, arcs=(), taxonomy=None):
    return PhraseReading(reading_id, make_tree(nodes, arcs, taxonomy))


def sentence2_tree(taxonomy, inverted=False):
    """The second sentence of the shipped fixture as one finished reading.

    ``inverted=False`` gives the reading with "diese Festplatte" as subject
    and "die Seagate ST-3144" as object; ``inverted=True`` swaps the roles.
    The pronoun "sie" is attached as subject of the subordinate verb.
    """
    fem = "gen=fem;num=sg;pers=3"
    nodes = [
        (1, "Bei", "Preposition", "case=dat", None),
        (2, "der", "DefiniteDeterminer", f"{fem};case=dat", None),
        (3, "mittleren", "Adjective", "-", None),
        (4, "Zugriffszeit", "Noun", f"{fem};case=dat", "ACCESS-TIME"),
        (5, "erreicht", "FiniteVerb", "num=sg;pers=3", "COMPARE-EVENT"),
        (6, "diese", "DefiniteDeterminer", f"{fem};case=nom,acc", None),
        (7, "Festplatte", "Noun", f"{fem};case=nom,acc", "LPS-105"),
        (8, "die", "DefiniteDeterminer", f"{fem};case=nom,acc", None),
        (9, "Seagate ST-3144", "Noun", f"{fem};case=nom,acc", "ST-3144"),
        (10, "womit", "Adverb", "-", None),
        (11, "sie", "PersonalPronoun", f"{fem};case=nom", None),
        (12, "in", "Preposition", "case=dat", None),
        (13, "dieser", "DefiniteDeterminer", f"{fem};case=dat", None),
        (14, "Disziplin", "Noun", f"{fem};case=dat", "CATEGORY"),
        (15, "den", "DefiniteDeterminer", "gen=masc;num=sg;case=acc", None),
        (16, "zweiten", "Adjective", "-", None),
        (17, "Platz", "Noun", "gen=masc;num=sg;pers=3;case=acc", "RANK"),
        (18, "erzielt", "FiniteVerb", "num=sg;pers=3", "SCORE-EVENT"),
    ]
    festplatte_rel = "object" if inverted else "subject"
    seagate_rel = "subject" if inverted else "object"
    arcs = [
        (5, 1, "adjunct"),
        (1, 4, "ppObject"),
        (4, 2, "spec"),
        (4, 3, "adjunct"),
        (5, 7, festplatte_rel),
        (7, 6, "spec"),
        (5, 9, seagate_rel),
        (9, 8, "spec"),
        (5, 18, "adjunct"),
        (18, 10, "adjunct"),
        (18, 11, "subject"),
        (18, 12, "adjunct"),
        (12, 14, "ppObject"),
        (14, 13, "spec"),
        (18, 17, "object"),
        (17, 15, "spec"),
        (17, 16, "adjunct"),
    ]
    return make_tree(nodes, arcs, taxonomy)


# ---------------------------------------------------------------------------
# Random forests and formula oracles

FOREST_CATEGORIES = (
    "Noun",
    "Noun",
    "Noun",
    "FiniteVerb",
    "PersonalPronoun",
    "DefiniteDeterminer",
    "DetPossessive",
    "Preposition",
    "Adverb",
)
FOREST_RELATIONS = (
    "subject",
    "object",
    "spec",
    "saxGen",
    "ppAtt",
    "genAtt",
    "ppObject",
    "adjunct",
)


def random_forest(rng, size, taxonomy=None, entity_pool=()):
    """A random labeled forest over ``size`` nodes.

    Heads are drawn along a random topological order so the structure is
    always acyclic but arcs may point either direction in the string.
    """
    tree = DependencyTree()
    for pos in range(1, size + 1):
        category = rng.choice(FOREST_CATEGORIES)
        concept = None
        if entity_pool and category == "Noun" and rng.random() < 0.7:
            concept = rng.choice(entity_pool)
        entity = taxonomy.entity_for(concept, f"w{pos}") if concept else None
        lexeme = make_lexeme(f"w{pos}", category)
        tree.add_node(WordNode(pos, lexeme, entity=entity))
    order = list(range(1, size + 1))
    rng.shuffle(order)
    for index, pos in enumerate(order):
        if index == 0 or rng.random() < 0.25:
            continue  # a root
        head = order[rng.randrange(index)]
        tree.add_arc(head, pos, rng.choice(FOREST_RELATIONS))
    return tree


def closure_pairs(tree):
    """Transitive closure of the head relation, by saturation over raw arcs."""
    pairs = {(head, modifier) for head, modifier, _ in tree.arcs()}
    changed = True
    while changed:
        changed = False
        for a, b in list(pairs):
            for c, d in list(pairs):
                if b == c and (a, d) not in pairs:
                    pairs.add((a, d))
                    changed = True
    return pairs


def oracle_head_plus(tree, closure, x, y):
    return (x, y) in closure


def oracle_d_binds(tree, closure, categories, x, y):
    """Literal evaluation of the d-binding formula by exhaustive search."""
    if (x, y) not in closure:
        return False
    arcs = tree.arcs()
    for z in tree.positions():
        if (x, z) not in closure or (z, y) not in closure:
            continue
        if categories.isa_c_star(tree.node(z).category, "FiniteVerb"):
            return False
        for head, u, relation in arcs:
            if head != z:
                continue
            u_cat = tree.node(u).category
            if relation == "spec" and categories.isa_c_star(u_cat, "DetPossessive"):
                return False
            if relation in ("saxGen", "ppAtt", "genAtt") and categories.isa_c_star(
                u_cat, "Noun"
            ):
                return False
    return True


def oracle_potential_antecedent(tree, closure, categories, x, y):
    """Literal evaluation of the accessibility formula by exhaustive search."""
    for z in tree.positions():
        if oracle_d_binds(tree, closure, categories, z, x) and oracle_d_binds(
            tree, closure, categories, z, y
        ):
            return False
    for u in tree.positions():
        if oracle_d_binds(tree, closure, categories, u, y) and (u, x) in closure:
            if not tree.node(x).position < tree.node(y).position:
                return False
    return True

"""Anaphor admissibility tests and the intrasentential candidate walk.

``pron_anaphor_test`` checks gender/number/person compatibility between a
pronoun and a nominal antecedent; ``nom_anaphor_test`` checks number plus
conceptual subsumption between a definite NP and its antecedent.  Both
accept anything exposing ``category``, ``features``, and ``concept`` (word
nodes as well as forward-looking-center entries).

``candidate_walk`` climbs the head chain of an attached anaphor and, at
each head, collects the accessible entity-bearing nominal modifiers,
ordered by grammatical role (subject before object before the rest).
"""

from __future__ import annotations

from .deptree import is_potential_anaphoric_antecedent
from .errors import ProcessingError
from .lexicon import BOTTOM, extract, unify_values

PRONOMINAL = "pronominal"
NOMINAL = "nominal"

_ROLE_RANK = {"subject": 0, "object": 1}


def role_rank(relation):
    """Grammatical-role preference rank: subject > object(s) > others."""
    return _ROLE_RANK.get(relation, 2)


def anaphor_kind(tree, position, categories):
    """Classify a node as a pronominal or nominal anaphor, or neither.

    Pronominal: the node's category specialises PersonalPronoun.  Nominal: a
    noun carrying a definite determiner attached through ``spec``.
    """
    node = tree.node(position)
    if categories.isa_c_star(node.category, "PersonalPronoun"):
        return PRONOMINAL
    if categories.isa_c_star(node.category, "Noun"):
        for mod in tree.modifiers(position):
            if tree.relation_of(mod) != "spec":
                continue
            if categories.isa_c_star(tree.node(mod).category, "DefiniteDeterminer"):
                return NOMINAL
    return None


def pron_anaphor_test(pro, ante, categories):
    """Agreement constraint on pronominal anaphora.

    The antecedent must be nominal and the pairwise unifications of the
    gender, number, and person value sets must each be consistent.
    """
    if not categories.isa_c_star(ante.category, "Nominal"):
        return False
    for feature in ("gen", "num", "pers"):
        merged = unify_values(extract(pro.features, feature), extract(ante.features, feature))
        if merged is BOTTOM:
            return False
    return True


def nom_anaphor_test(def_np, ante, categories, taxonomy):
    """Subsumption constraint on nominal anaphora.

    The antecedent must be nominal, agree in number, and its concept must
    specialise the definite NP's lexical concept.  A missing concept on
    either side simply fails the test.
    """
    if not categories.isa_c_star(ante.category, "Nominal"):
        return False
    if unify_values(extract(def_np.features, "num"), extract(ante.features, "num")) is BOTTOM:
        return False
    np_concept = _lexical_concept(def_np)
    ante_concept = ante.concept
    if np_concept is None or ante_concept is None:
        return False
    return taxonomy.isa_f_star(ante_concept, np_concept)


def _lexical_concept(item):
    lexeme = getattr(item, "lexeme", None)
    if lexeme is not None:
        return lexeme.concept_type
    return item.concept


def candidate_walk(tree, anaphor, categories):
    """Yield ``(head position, ordered candidate positions)`` up the head chain.

    At each higher head the direct modifiers are screened: the branch that
    contains the anaphor is skipped, only entity-bearing nominal nodes count,
    and each must be an accessible potential antecedent of the anaphor.
    Candidates at one head are ordered by role rank, ties by surface order.
    """
    if tree.head_of(anaphor) is None:
        raise ProcessingError(f"anaphor at position {anaphor} is not attached")
    child = anaphor
    link = tree.head_of(anaphor)
    while link is not None:
        head = link[0]
        candidates = []
        for mod in tree.modifiers(head):
            if mod == child:
                continue
            node = tree.node(mod)
            if node.entity is None:
                continue
            if not categories.isa_c_star(node.category, "Nominal"):
                continue
            if not is_potential_anaphoric_antecedent(tree, mod, anaphor, categories):
                continue
            candidates.append(mod)
        candidates.sort(key=lambda m: (role_rank(tree.relation_of(m)), m))
        yield head, candidates
        child = head
        link = tree.head_of(head)


def intrasentential_candidates(tree, anaphor, categories):
    """All intrasentential antecedent candidates, nearest head first."""
    out = []
    for _, candidates in candidate_walk(tree, anaphor, categories):
        out.extend(candidates)
    return out

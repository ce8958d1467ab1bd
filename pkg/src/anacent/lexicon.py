"""Lexical categories, agreement features, and the concept taxonomy.

Three kinds of background knowledge live here:

* the part-of-speech hierarchy with its reflexive-transitive subclass
  closure (``isa_c_star``),
* flat agreement feature bundles (gender/number/person/case) with
  set-valued features, unification, extraction, and a distinguished
  bottom element ``BOTTOM``,
* the concept taxonomy (``isa_f_star``) whose role constraints back the
  ``permit`` admissibility predicate, plus discourse entities and lexemes.

Everything is immutable after loading, so all operations are pure
functions and safe for unrestricted concurrent evaluation.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field

from .errors import LoadError, UnknownIdentifierError

FEATURE_DOMAINS: dict[str, tuple[str, ...]] = {
    "gen": ("masc", "fem", "neut"),
    "num": ("sg", "pl"),
    "pers": ("1", "2", "3"),
    "case": ("nom", "gen", "dat", "acc"),
}
FEATURE_NAMES = tuple(FEATURE_DOMAINS)

#: Categories that must exist in every loaded hierarchy.
RESERVED_CATEGORIES = (
    "Nominal",
    "Noun",
    "DetPossessive",
    "FiniteVerb",
    "PersonalPronoun",
    "DefiniteDeterminer",
)


class _Bottom:
    """The inconsistent element; absorbing under unification."""

    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self):
        return "BOTTOM"

    def __bool__(self):
        return False


BOTTOM = _Bottom()


def _coerce_values(name, values):
    if values is None:
        return None
    out = frozenset(str(v) for v in values)
    domain = set(FEATURE_DOMAINS[name])
    unknown = out - domain
    if unknown:
        raise ValueError(f"unknown {name} value(s): {sorted(unknown)}")
    if not out:
        raise ValueError(f"empty {name} value set; use BOTTOM for inconsistency")
    return out


@dataclass(frozen=True)
class FeatureStructure:
    """A flat bundle of set-valued agreement features.

    A feature that is ``None`` is undefined (unconstrained); a defined
    feature always holds a non-empty value set.  The inconsistent result
    of unification is not a FeatureStructure but the ``BOTTOM`` sentinel.
    """

    gen: frozenset | None = None
    num: frozenset | None = None
    pers: frozenset | None = None
    case: frozenset | None = None

    def __post_init__(self):
        for name in FEATURE_NAMES:
            object.__setattr__(self, name, _coerce_values(name, getattr(self, name)))

    def get(self, name):
        """Return the value set for ``name``, or None if undefined."""
        if name not in FEATURE_NAMES:
            return None
        return getattr(self, name)

    def defined_features(self):
        return tuple(n for n in FEATURE_NAMES if getattr(self, n) is not None)

    def is_empty(self):
        return not self.defined_features()

    @classmethod
    def parse(cls, text):
        """Parse ``"gen=fem;num=sg;case=nom,acc"``; ``"-"`` is the empty bundle."""
        text = text.strip()
        if text in ("", "-"):
            return cls()
        values = {}
        for chunk in text.split(";"):
            chunk = chunk.strip()
            if not chunk:
                continue
            if "=" not in chunk:
                raise ValueError(f"malformed feature assignment {chunk!r}")
            name, _, raw = chunk.partition("=")
            name = name.strip()
            if name not in FEATURE_NAMES:
                raise ValueError(f"unknown feature {name!r}")
            if name in values:
                raise ValueError(f"duplicate feature {name!r}")
            values[name] = [v.strip() for v in raw.split(",") if v.strip()]
        return cls(**values)

    def to_spec(self):
        """Canonical textual form (inverse of :meth:`parse`)."""
        parts = []
        for name in FEATURE_NAMES:
            values = getattr(self, name)
            if values is not None:
                parts.append(f"{name}={','.join(order_values(name, values))}")
        return ";".join(parts) if parts else "-"

    def __str__(self):
        return self.to_spec()


def order_values(name, values):
    """Order a value set canonically (declaration order of the domain)."""
    return tuple(v for v in FEATURE_DOMAINS[name] if v in values)


def unify(a, b):
    """Feature-structure unification: per-feature set intersection.

    An undefined feature unifies with anything; an empty intersection on
    any feature makes the whole result BOTTOM, and BOTTOM is absorbing.
    """
    if a is BOTTOM or b is BOTTOM:
        return BOTTOM
    merged = {}
    for name in FEATURE_NAMES:
        va, vb = a.get(name), b.get(name)
        if va is None:
            merged[name] = vb
        elif vb is None:
            merged[name] = va
        else:
            inter = va & vb
            if not inter:
                return BOTTOM
            merged[name] = inter
    return FeatureStructure(**merged)


def unify_values(u, v):
    """Unify two plain value sets (or BOTTOM); used by the agreement tests."""
    if u is BOTTOM or v is BOTTOM:
        return BOTTOM
    inter = u & v
    return inter if inter else BOTTOM


def extract(f, path):
    """Return the value set of feature ``path`` in ``f``.

    Yields BOTTOM when ``f`` is BOTTOM or the path is undefined.
    """
    if f is BOTTOM:
        return BOTTOM
    value = f.get(path)
    return BOTTOM if value is None else value


# ---------------------------------------------------------------------------
# Lexical category hierarchy


@dataclass(frozen=True)
class LexicalCategory:
    name: str
    parents: tuple = ()


def _closure(items, parents_of, what, source):
    """Reflexive-transitive ancestor closure with cycle/unknown detection."""
    ancestors = {}

    def visit(name, stack):
        if name in ancestors:
            return ancestors[name]
        if name in stack:
            cycle = " -> ".join(list(stack) + [name])
            raise LoadError(f"cycle in {what} hierarchy: {cycle}", path=source)
        stack.append(name)
        acc = {name}
        for parent in parents_of(name):
            if parent not in items:
                raise LoadError(f"unknown {what} {parent!r} (parent of {name!r})", path=source)
            acc |= visit(parent, stack)
        stack.pop()
        ancestors[name] = frozenset(acc)
        return ancestors[name]

    for name in items:
        visit(name, [])
    return ancestors


class CategoryHierarchy:
    """The part-of-speech hierarchy with its subclass closure."""

    def __init__(self, categories, source="<memory>"):
        self._categories = {}
        for cat in categories:
            if cat.name in self._categories:
                raise LoadError(f"duplicate category {cat.name!r}", path=source)
            self._categories[cat.name] = cat
        for reserved in RESERVED_CATEGORIES:
            if reserved not in self._categories:
                raise LoadError(f"reserved category {reserved!r} missing", path=source)
        self._ancestors = _closure(
            self._categories,
            lambda n: self._categories[n].parents,
            "category",
            source,
        )

    def __contains__(self, name):
        return name in self._categories

    def names(self):
        return tuple(self._categories)

    def category(self, name):
        try:
            return self._categories[name]
        except KeyError:
            raise UnknownIdentifierError(f"unknown category {name!r}") from None

    def isa_c_star(self, sub, super_):
        """True iff ``sub`` equals or transitively specialises ``super_``."""
        if sub not in self._categories:
            raise UnknownIdentifierError(f"unknown category {sub!r}")
        if super_ not in self._categories:
            raise UnknownIdentifierError(f"unknown category {super_!r}")
        return super_ in self._ancestors[sub]

    @classmethod
    def from_lines(cls, lines, source="<memory>"):
        return cls(_parse_category_lines(lines, source), source=source)

    @classmethod
    def load(cls, path):
        with open(path, encoding="utf-8") as handle:
            return cls.from_lines(handle, source=str(path))


_CATEGORY_RE = re.compile(r"^category\s+(\S+)(?:\s+isa\s+(.+))?$")


def _split_parents(raw):
    return tuple(p for p in re.split(r"[,\s]+", raw.strip()) if p)


def _parse_category_lines(lines, source):
    out = []
    for lineno, line in enumerate(lines, 1):
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        match = _CATEGORY_RE.match(line)
        if not match:
            raise LoadError(f"malformed category line: {line!r}", path=source, line=lineno)
        name, raw_parents = match.groups()
        out.append(LexicalCategory(name, _split_parents(raw_parents) if raw_parents else ()))
    return out


# ---------------------------------------------------------------------------
# Concept taxonomy


@dataclass(frozen=True)
class RoleConstraint:
    """One admissible filler declaration for a dependency relation."""

    relation: str
    filler_type: str
    min_count: int = 0
    max_count: int | None = 1  # None means unbounded

    def __post_init__(self):
        if self.max_count is not None and self.min_count > self.max_count:
            raise ValueError(f"minCount {self.min_count} > maxCount {self.max_count}")


@dataclass(frozen=True)
class Concept:
    name: str
    parents: tuple = ()
    roles: tuple = ()


@dataclass(frozen=True)
class DiscourseEntity:
    """A discourse referent: unique instance id plus its concept type."""

    instance_id: str
    concept_type: str
    last_expression: str = ""

    def label(self):
        return f"{self.instance_id}: {self.last_expression}"


class Taxonomy:
    """Concept subsumption hierarchy, role constraints, and named instances."""

    def __init__(self, concepts, instances=None, source="<memory>"):
        self._concepts = {}
        for concept in concepts:
            if concept.name in self._concepts:
                raise LoadError(f"duplicate concept {concept.name!r}", path=source)
            self._concepts[concept.name] = concept
        self._ancestors = _closure(
            self._concepts,
            lambda n: self._concepts[n].parents,
            "concept",
            source,
        )
        for concept in self._concepts.values():
            for role in concept.roles:
                if role.filler_type not in self._concepts:
                    raise LoadError(
                        f"role {concept.name}.{role.relation} names unknown "
                        f"filler type {role.filler_type!r}",
                        path=source,
                    )
        self._instances = {}
        for instance_id, concept_name in (instances or {}).items():
            if concept_name not in self._concepts:
                raise LoadError(
                    f"instance {instance_id!r} names unknown concept {concept_name!r}",
                    path=source,
                )
            self._instances[instance_id] = concept_name

    def __contains__(self, name):
        return name in self._concepts

    def concept(self, name):
        try:
            return self._concepts[name]
        except KeyError:
            raise UnknownIdentifierError(f"unknown concept {name!r}") from None

    def concept_names(self):
        return tuple(self._concepts)

    def instances(self):
        return dict(self._instances)

    def isa_f_star(self, sub, super_):
        """True iff concept ``sub`` equals or transitively specialises ``super_``."""
        if sub not in self._concepts:
            raise UnknownIdentifierError(f"unknown concept {sub!r}")
        if super_ not in self._concepts:
            raise UnknownIdentifierError(f"unknown concept {super_!r}")
        return super_ in self._ancestors[sub]

    def role_constraints(self, concept_name, relation):
        """All constraints for ``relation`` declared on the concept or an ancestor."""
        self.concept(concept_name)
        out = []
        for ancestor in sorted(self._ancestors[concept_name]):
            for role in self._concepts[ancestor].roles:
                if role.relation == relation:
                    out.append(role)
        return out

    def permit(self, head, relation, modifier, current_fillers=None):
        """Conceptual admissibility of ``modifier`` filling ``relation`` of ``head``.

        True iff the head (or an ancestor) declares a role constraint for the
        relation whose filler type subsumes the modifier and whose cardinality
        bound is not yet reached.  An undeclared relation is simply False.
        """
        self.concept(modifier)
        used = (current_fillers or {}).get(relation, 0)
        for constraint in self.role_constraints(head, relation):
            if constraint.max_count is not None and used >= constraint.max_count:
                continue
            if self.isa_f_star(modifier, constraint.filler_type):
                return True
        return False

    def entity_for(self, ref, expression=""):
        """Build the discourse entity a token refers to.

        ``ref`` may be an instance id (the entity is that instance) or a
        concept name (the entity is the concept-level referent, keyed by the
        concept name itself).
        """
        if ref in self._instances:
            return DiscourseEntity(ref, self._instances[ref], expression)
        if ref in self._concepts:
            return DiscourseEntity(ref, ref, expression)
        raise UnknownIdentifierError(f"unknown concept or instance {ref!r}")

    @classmethod
    def from_lines(cls, lines, source="<memory>"):
        concepts, instances = _parse_taxonomy_lines(lines, source)
        return cls(concepts, instances, source=source)

    @classmethod
    def load(cls, path):
        with open(path, encoding="utf-8") as handle:
            return cls.from_lines(handle, source=str(path))


_CONCEPT_RE = re.compile(r"^concept\s+(\S+)(?:\s+isa\s+(.+))?$")
_ROLE_RE = re.compile(
    r"^role\s+(\S+)\.(\S+)\s*:\s*(\S+)(?:\s+\[(\d+)\.\.(\d+|\*)\])?$"
)
_INSTANCE_RE = re.compile(r"^instance\s+(\S+)\s*:\s*(\S+)$")


def _parse_taxonomy_lines(lines, source):
    concept_order = []
    parents = {}
    roles = {}
    instances = {}
    for lineno, line in enumerate(lines, 1):
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        match = _CONCEPT_RE.match(line)
        if match:
            name, raw_parents = match.groups()
            if name in parents:
                raise LoadError(f"duplicate concept {name!r}", path=source, line=lineno)
            concept_order.append(name)
            parents[name] = _split_parents(raw_parents) if raw_parents else ()
            roles[name] = []
            continue
        match = _ROLE_RE.match(line)
        if match:
            owner, relation, filler, lo, hi = match.groups()
            if owner not in roles:
                raise LoadError(
                    f"role declared before concept {owner!r}", path=source, line=lineno
                )
            min_count = int(lo) if lo is not None else 0
            if hi is None:
                max_count = 1
            elif hi == "*":
                max_count = None
            else:
                max_count = int(hi)
            try:
                constraint = RoleConstraint(relation, filler, min_count, max_count)
            except ValueError as exc:
                raise LoadError(str(exc), path=source, line=lineno) from None
            roles[owner].append(constraint)
            continue
        match = _INSTANCE_RE.match(line)
        if match:
            instance_id, concept_name = match.groups()
            if instance_id in instances:
                raise LoadError(
                    f"duplicate instance {instance_id!r}", path=source, line=lineno
                )
            instances[instance_id] = concept_name
            continue
        raise LoadError(f"malformed taxonomy line: {line!r}", path=source, line=lineno)
    concepts = [Concept(n, parents[n], tuple(roles[n])) for n in concept_order]
    return concepts, instances


# ---------------------------------------------------------------------------
# Lexemes


#: Relations that may be filled more than once on a single head.
REPEATABLE_RELATIONS = frozenset({"adjunct", "ppAtt"})


@dataclass(frozen=True)
class ValenceSlot:
    relation: str
    obligatory: bool = False


@dataclass(frozen=True)
class Lexeme:
    """A fully analysed lexical entry as it arrives from the corpus reader."""

    form: str
    lemma: str
    category: str
    features: FeatureStructure = field(default_factory=FeatureStructure)
    concept_type: str | None = None
    valence: tuple = ()

    def __post_init__(self):
        if self.features is BOTTOM:
            raise ValueError("lexeme features must not be BOTTOM")

    def allows(self, relation):
        return any(slot.relation == relation for slot in self.valence)

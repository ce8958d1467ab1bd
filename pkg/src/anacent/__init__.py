"""Incremental centering-based anaphora resolution.

The package resolves pronominal and nominal anaphors while a dependency
parse is still growing, tracking local structural ambiguity as private
copies of the centering data and global ambiguity as multiple Cb/Cf
readings per utterance.
"""

from .centering import (
    AmbiguitySpace,
    CenterReading,
    CenteringState,
    CfEntry,
    commit_utterance,
    compute_transition,
    consume_antecedent,
    copy_state,
    format_centering_table,
    normalize_table,
    rank_cf,
)
from .constraints import (
    anaphor_kind,
    candidate_walk,
    intrasentential_candidates,
    nom_anaphor_test,
    pron_anaphor_test,
)
from .corpus import AnnotatedToken, Document, load_document, parse_document, serialize_document
from .deptree import (
    Container,
    DependencyTree,
    PhraseReading,
    WordNode,
    attach,
    d_binds,
    head_plus,
    is_potential_anaphoric_antecedent,
    is_potential_antecedent_cross,
)
from .engine import CenteringEngine, EngineConfig, Message, RunResult, TraceEvent, run_document
from .errors import (
    AnacentError,
    ConsumptionError,
    DiscourseError,
    LoadError,
    ProcessingError,
    UnknownIdentifierError,
)
from .lexicon import (
    BOTTOM,
    CategoryHierarchy,
    Concept,
    DiscourseEntity,
    FeatureStructure,
    LexicalCategory,
    Lexeme,
    RoleConstraint,
    Taxonomy,
    ValenceSlot,
    extract,
    unify,
)

__version__ = "0.1.0"

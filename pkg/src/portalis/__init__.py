"""portalis: profile-personalized, event-driven portal middleware.

Heterogeneous simulated repositories unified behind one data-object
interface, filtered through session-scoped access profiles and kept fresh by
an event-driven update agent. Schemas arrive through the .pds definition
language; the service surface is an HTTP gateway plus the portalis CLI.
"""

from .engine import PortalEngine
from .errors import PortalisError
from .events import PolicyMode, UpdatePolicy
from .frames import AtomicFrame, FrameLanguage, FramePattern, Variable
from .metatower import MetadataRecord, MetaPredicate, MetaTower
from .model import (
    CURRENT,
    Concept,
    DataObject,
    Individual,
    SortVariable,
    StateRecord,
    Store,
    comprehend,
    individualize,
    transition,
)
from .predicate import (
    And,
    Compare,
    FieldRef,
    Kind,
    Literal,
    Member,
    Not,
    Or,
    evaluate,
    format_predicate,
    validate_predicate,
)
from .profiles import (
    AccessProfile,
    AssignmentDimension,
    MetricDenotation,
    Rank,
    Session,
    SessionRegistry,
    UserProfile,
    derive_access_profile,
)
from .warehouse import (
    MediaCategory,
    MediaObject,
    MediaSubCategory,
    PortalItem,
    RepoKind,
    Warehouse,
)

__version__ = "0.1.0"

__all__ = [
    "PortalEngine",
    "PortalisError",
    "PolicyMode",
    "UpdatePolicy",
    "AtomicFrame",
    "FrameLanguage",
    "FramePattern",
    "Variable",
    "MetadataRecord",
    "MetaPredicate",
    "MetaTower",
    "CURRENT",
    "Concept",
    "DataObject",
    "Individual",
    "SortVariable",
    "StateRecord",
    "Store",
    "comprehend",
    "individualize",
    "transition",
    "And",
    "Compare",
    "FieldRef",
    "Kind",
    "Literal",
    "Member",
    "Not",
    "Or",
    "evaluate",
    "format_predicate",
    "validate_predicate",
    "AccessProfile",
    "AssignmentDimension",
    "MetricDenotation",
    "Rank",
    "Session",
    "SessionRegistry",
    "UserProfile",
    "derive_access_profile",
    "MediaCategory",
    "MediaObject",
    "MediaSubCategory",
    "PortalItem",
    "RepoKind",
    "Warehouse",
    "__version__",
]

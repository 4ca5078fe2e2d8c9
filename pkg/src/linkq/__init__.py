"""Natural-language question answering over Wikidata, grounded in KG lookups.

The model never invents identifiers: it must discover every entity and
property ID through knowledge-graph searches before a query is generated,
and the query is previewed (ID table plus query graph) before the user runs
it.
"""

from .config import Config
from .directives import (
    BuildQuery,
    Directive,
    EntityPropertySearch,
    EntitySearch,
    PropertiesSearch,
    Stop,
    parse_directive,
    render_directive,
)
from .protocol import (
    ChatMessage,
    ProtocolEngine,
    ProtocolState,
    QueryHistoryEntry,
    ResolvedContext,
    SessionState,
    Visibility,
)
from .results import ResultTable, clean_results, to_csv
from .service import QueryPreviewBundle, SessionManager

__version__ = "0.1.0"

__all__ = [
    "BuildQuery",
    "ChatMessage",
    "Config",
    "Directive",
    "EntityPropertySearch",
    "EntitySearch",
    "PropertiesSearch",
    "ProtocolEngine",
    "ProtocolState",
    "QueryHistoryEntry",
    "QueryPreviewBundle",
    "ResolvedContext",
    "ResultTable",
    "SessionManager",
    "SessionState",
    "Stop",
    "Visibility",
    "clean_results",
    "parse_directive",
    "render_directive",
    "to_csv",
    "__version__",
]

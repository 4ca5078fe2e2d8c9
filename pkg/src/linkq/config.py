"""Runtime configuration, read from environment variables with sensible defaults."""

from __future__ import annotations

import os
from dataclasses import dataclass, field

WIKIDATA_API_URL = "https://www.wikidata.org/w/api.php"
WIKIDATA_SPARQL_URL = "https://query.wikidata.org/sparql"

# Wikimedia policy requires a descriptive User-Agent for API traffic.
USER_AGENT = "linkq/0.1 (knowledge-graph question answering; https://example.org/linkq)"

# Bounded grounding loop: the protocol stops asking for IDs after this many
# model calls even if the model never says STOP.
DEFAULT_MAX_RESOLUTION_ITERATIONS = 15

# Property enumeration for one entity is truncated at this many records.
PROPERTY_CAP = 200

# At most this many result rows are serialized into the summary prompt.
SUMMARY_ROW_CAP = 50

# Label/description lookups are batched at the service's bulk limit.
LABEL_BATCH_SIZE = 50

# Minimum spacing between live Wikidata calls, in seconds.
KG_MIN_CALL_INTERVAL = 0.1

# Sessions idle longer than this are evicted.
SESSION_IDLE_SECONDS = 24 * 3600


@dataclass
class Config:
    """Wiring for the gateways and the service."""

    llm_url: str = "https://api.openai.com/v1/chat/completions"
    llm_api_key: str = ""
    llm_model: str = "gpt-4"
    wikidata_api_url: str = WIKIDATA_API_URL
    sparql_url: str = WIKIDATA_SPARQL_URL
    fixture_dir: str | None = None
    port: int = 8144
    max_resolution_iterations: int = DEFAULT_MAX_RESOLUTION_ITERATIONS
    property_cap: int = PROPERTY_CAP
    summary_row_cap: int = SUMMARY_ROW_CAP
    session_idle_seconds: int = SESSION_IDLE_SECONDS
    session_log_dir: str | None = None
    extra: dict = field(default_factory=dict)

    @classmethod
    def from_env(cls, environ: dict[str, str] | None = None) -> "Config":
        env = os.environ if environ is None else environ
        cfg = cls()
        cfg.llm_url = env.get("LINKQ_LLM_URL", cfg.llm_url)
        cfg.llm_api_key = env.get("LINKQ_LLM_API_KEY", cfg.llm_api_key)
        cfg.llm_model = env.get("LINKQ_LLM_MODEL", cfg.llm_model)
        cfg.wikidata_api_url = env.get("LINKQ_WIKIDATA_API_URL", cfg.wikidata_api_url)
        cfg.sparql_url = env.get("LINKQ_SPARQL_URL", cfg.sparql_url)
        cfg.fixture_dir = env.get("LINKQ_FIXTURE_DIR", cfg.fixture_dir)
        cfg.session_log_dir = env.get("LINKQ_SESSION_LOG_DIR", cfg.session_log_dir)
        if "LINKQ_PORT" in env:
            cfg.port = int(env["LINKQ_PORT"])
        return cfg

import pytest

from conftest import (
    EMPTY_DOC,
    FOUNDERS_DOC,
    FakeKg,
    UnavailableKg,
    fixed_clock,
    make_config,
)
from corpus import (
    APPLE_EXPLANATION,
    APPLE_QUERY,
    APPLE_QUESTION,
    APPLE_SUMMARY,
    MOUNTAINS_QUERY,
)
from linkq import prompts
from linkq.errors import (
    EmptyInput,
    InvalidQuery,
    QueryRejected,
    SessionNotFound,
)
from linkq.kg.client import SparqlResultDocument
from linkq.llm import ScriptedLlm
from linkq.protocol import ProtocolState
from linkq.service import SessionManager


class _ManagerKg(FakeKg):
    """FakeKg that poses as the shared client; SessionKg wrapping is bypassed."""


def make_manager(replies, kg=None, **config_overrides):
    llm = ScriptedLlm(queue=list(replies))
    manager = SessionManager(
        llm, kg_client=None, config=make_config(**config_overrides), clock=fixed_clock()
    )
    # Swap the per-session KG factory for the in-memory double.
    kg = kg or FakeKg()
    original_create = manager.create_session

    def create_session():
        session_id = original_create()
        manager._sessions[session_id].kg = kg
        return session_id

    manager.create_session = create_session
    return manager, llm, kg


def test_create_session_fresh_transcript_and_distinct_ids():
    manager, _, _ = make_manager([])
    a = manager.create_session()
    b = manager.create_session()
    assert a != b
    transcript = manager.get_transcript(a, include_internal=True)
    assert len(transcript) == 1
    assert transcript[0].role == "system"
    assert "Current date: 2024-05-01" in transcript[0].content


def test_unknown_session_raises():
    manager, _, _ = make_manager([])
    with pytest.raises(SessionNotFound):
        manager.post_message("nope", "hi")
    with pytest.raises(SessionNotFound):
        manager.get_history("nope")


def test_empty_message_rejected():
    manager, llm, _ = make_manager(["unused"])
    session_id = manager.create_session()
    with pytest.raises(EmptyInput):
        manager.post_message(session_id, "  ")
    assert llm.call_log == []


def test_chat_only_turn_returns_reply():
    manager, _, _ = make_manager(["Can you say more about which cats you mean?"])
    session_id = manager.create_session()
    delta = manager.post_message(session_id, "what are some interesting things about cats?")
    assert delta.generated_query is None
    assert delta.state is ProtocolState.CHATTING
    assert any(m.role == "assistant" for m in delta.messages)


def test_full_turn_produces_query_and_explanation(apple_llm_script):
    manager, llm, _ = make_manager(apple_llm_script[:5])
    session_id = manager.create_session()
    delta = manager.post_message(session_id, APPLE_QUESTION)
    assert delta.generated_query == APPLE_QUERY
    assert delta.explanation == APPLE_EXPLANATION
    assert delta.state is ProtocolState.AWAITING_USER_RUN_DECISION
    assert delta.error is None
    assert len(llm.call_log) == 5


def test_chatting_after_pending_query_returns_to_chat(apple_llm_script):
    manager, _, _ = make_manager(apple_llm_script[:5] + ["sure, happy to adjust it"])
    session_id = manager.create_session()
    manager.post_message(session_id, APPLE_QUESTION)
    delta = manager.post_message(session_id, "can you tweak that?")
    assert delta.state is ProtocolState.CHATTING
    assert delta.generated_query is None


def test_llm_failure_is_a_structured_error_payload():
    manager, _, _ = make_manager([])  # empty script: first completion fails
    session_id = manager.create_session()
    delta = manager.post_message(session_id, "hello")
    assert delta.error is not None
    assert delta.error["type"] == "ScriptExhausted"


def test_preview_bundle_for_mountains_query():
    manager, _, kg = make_manager([])
    session_id = manager.create_session()
    bundle = manager.preview_query(session_id, MOUNTAINS_QUERY)
    assert bundle.validation.ok
    assert [(r.id, r.kind) for r in bundle.entity_relation_rows] == [
        ("Q8502", "entity"),
        ("P31", "property"),
        ("P2044", "property"),
    ]
    assert bundle.entity_relation_rows[0].label == "mountain"
    assert bundle.query_graph is not None
    assert len(bundle.query_graph.nodes) == 3
    assert len(bundle.query_graph.edges) == 2
    assert not bundle.labels_unavailable


def test_preview_invalid_query_reports_error_without_rows_or_graph():
    manager, _, _ = make_manager([])
    session_id = manager.create_session()
    bundle = manager.preview_query(session_id, "SELECT ?x WHERE { broken")
    assert not bundle.validation.ok
    assert bundle.validation.error.position >= 0
    assert bundle.entity_relation_rows == []
    assert bundle.query_graph is None


def test_preview_query_with_no_ids():
    manager, _, kg = make_manager([])
    session_id = manager.create_session()
    bundle = manager.preview_query(session_id, "SELECT ?x WHERE { ?x ?p ?y . }")
    assert bundle.validation.ok
    assert bundle.entity_relation_rows == []
    assert bundle.query_graph is not None
    assert {n.kind for n in bundle.query_graph.nodes} == {"variable"}
    assert kg.label_requests == []  # no lookup without ids


def test_preview_with_kg_down_flags_missing_labels():
    manager, _, _ = make_manager([], kg=UnavailableKg())
    session_id = manager.create_session()
    bundle = manager.preview_query(session_id, MOUNTAINS_QUERY)
    assert bundle.labels_unavailable
    assert [r.id for r in bundle.entity_relation_rows] == ["Q8502", "P31", "P2044"]
    assert all(r.label == "" for r in bundle.entity_relation_rows)
    assert bundle.query_graph is not None


def test_run_query_executes_cleans_and_summarizes():
    manager, llm, kg = make_manager(["a short summary"])
    session_id = manager.create_session()
    result = manager.run_query(session_id, APPLE_QUERY)
    assert result.table.columns == ("founder", "founderLabel", "birthdate")
    assert len(result.table.rows) == 3
    assert result.summary == "a short summary"
    prompt = llm.call_log[0].messages[0]["content"]
    assert "Steve Jobs" in prompt
    history = manager.get_history(session_id)
    assert len(history) == 1
    assert history[0].origin == "userEdited"
    assert history[0].executed


def test_run_query_empty_results_still_summarizes_with_diagnosis():
    manager, llm, _ = make_manager(
        ["a diagnosis"], kg=FakeKg(sparql_docs={"P999999": EMPTY_DOC})
    )
    session_id = manager.create_session()
    result = manager.run_query(session_id, "SELECT ?x WHERE { wd:Q312 wdt:P999999 ?x . }")
    assert result.table.rows == ()
    assert result.summary == "a diagnosis"
    assert prompts.DIAGNOSE_GUIDANCE in llm.call_log[0].messages[0]["content"]


def test_run_query_rejects_invalid_text_before_any_network():
    kg = FakeKg()
    manager, _, _ = make_manager([], kg=kg)
    session_id = manager.create_session()
    with pytest.raises(InvalidQuery):
        manager.run_query(session_id, "not sparql at all")
    assert kg.executed == []
    assert manager.get_history(session_id) == []


def test_run_query_surfaces_endpoint_rejection_verbatim():
    class _RejectingKg(FakeKg):
        def execute_sparql(self, query, timeout_seconds=60):
            raise QueryRejected("MALFORMED QUERY: oh no")

    manager, _, _ = make_manager([], kg=_RejectingKg())
    session_id = manager.create_session()
    with pytest.raises(QueryRejected) as excinfo:
        manager.run_query(session_id, APPLE_QUERY)
    assert "MALFORMED QUERY: oh no" in str(excinfo.value)
    # Session recovers to chatting; the attempt is in history but not executed.
    history = manager.get_history(session_id)
    assert len(history) == 1
    assert not history[0].executed


def test_history_generation_edit_run_scenario(apple_llm_script):
    manager, _, _ = make_manager(apple_llm_script[:5] + ["summary text"])
    session_id = manager.create_session()
    delta = manager.post_message(session_id, APPLE_QUESTION)
    edited = delta.generated_query + "\nLIMIT 3"
    manager.run_query(session_id, edited)
    history = manager.get_history(session_id)
    assert [e.origin for e in history] == ["llmGenerated", "userEdited"]
    assert [e.executed for e in history] == [False, True]


def test_running_the_generated_query_marks_that_entry(apple_llm_script):
    manager, _, _ = make_manager(apple_llm_script)
    session_id = manager.create_session()
    delta = manager.post_message(session_id, APPLE_QUESTION)
    manager.run_query(session_id, delta.generated_query)
    history = manager.get_history(session_id)
    assert len(history) == 1
    assert history[0].origin == "llmGenerated"
    assert history[0].executed


def test_generated_query_is_never_overwritten_by_edited_runs(apple_llm_script):
    manager, _, _ = make_manager(apple_llm_script[:5] + ["summary"])
    session_id = manager.create_session()
    manager.post_message(session_id, APPLE_QUESTION)
    manager.run_query(session_id, "SELECT ?x WHERE { ?x wdt:P31 wd:Q8502 . }")
    query, explanation = manager.get_generated_query(session_id)
    assert query == APPLE_QUERY
    assert explanation == APPLE_EXPLANATION


def test_summary_failure_keeps_table():
    manager, _, _ = make_manager([])  # no summary reply available
    session_id = manager.create_session()
    result = manager.run_query(session_id, APPLE_QUERY)
    assert len(result.table.rows) == 3
    assert result.summary is None
    assert result.summary_error


def test_latest_table_and_transcript_toggle(apple_llm_script):
    manager, _, _ = make_manager(apple_llm_script)
    session_id = manager.create_session()
    assert manager.latest_table(session_id) is None
    delta = manager.post_message(session_id, APPLE_QUESTION)
    manager.run_query(session_id, delta.generated_query)
    assert manager.latest_table(session_id) is not None
    shown = manager.get_transcript(session_id)
    full = manager.get_transcript(session_id, include_internal=True)
    assert len(full) > len(shown)


def test_idle_sessions_are_evicted():
    manager, _, _ = make_manager(["hi there"], session_idle_seconds=0)
    session_id = manager.create_session()
    # Zero idle budget: the next registry access sweeps the session away.
    with pytest.raises(SessionNotFound):
        manager.post_message(session_id, "hello")


def test_session_log_is_append_only_jsonl(tmp_path, apple_llm_script):
    manager, _, _ = make_manager(apple_llm_script, session_log_dir=str(tmp_path))
    session_id = manager.create_session()
    manager.post_message(session_id, APPLE_QUESTION)
    log_file = tmp_path / f"{session_id}.jsonl"
    assert log_file.exists()
    lines = log_file.read_text().strip().splitlines()
    assert len(lines) > 2
    import json

    kinds = [json.loads(line)["kind"] for line in lines]
    assert kinds[0] == "created"
    assert "message" in kinds

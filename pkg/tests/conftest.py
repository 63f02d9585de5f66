from __future__ import annotations

import json
from pathlib import Path

import pytest

from mindpipe import pipeline
from mindpipe.config import load_config, packaged_path
from mindpipe.llm.mock_backend import MockBackend
from mindpipe.llm.session import LlmSession
from mindpipe.llm.templates import load_templates

FIXTURES = Path(__file__).parent / "fixtures"
CORPUS = FIXTURES / "corpus.jsonl"

SAFETY_USERS = {"kestrel_dun", "larch_fell"}
COHORT_SIZE = 12


@pytest.fixture(scope="session")
def corpus_path() -> Path:
    return CORPUS


@pytest.fixture(scope="session")
def templates():
    return load_templates(packaged_path("prompts"))


@pytest.fixture()
def mock_session(templates) -> LlmSession:
    backend = MockBackend(packaged_path("data/mock_rules.json"))
    return LlmSession(backend, templates, model="mock-model")


@pytest.fixture(scope="session")
def fixture_run(tmp_path_factory) -> Path:
    """One completed mock run over the fixture corpus, shared read-only."""
    run_dir = tmp_path_factory.mktemp("fixture_run")
    config = load_config(overrides={"pipeline.cohort_size": COHORT_SIZE})
    pipeline.run_all(config, [CORPUS], run_dir)
    return run_dir


def read_jsonl(path: Path) -> list[dict]:
    return [json.loads(line) for line in path.read_text(encoding="utf-8").splitlines() if line]


def read_backend_log(run_dir: Path) -> list[dict]:
    records = []
    for log in sorted((run_dir / "logs").glob("backend_*.jsonl")):
        records.extend(read_jsonl(log))
    return records


class ScriptedSession:
    """Session stand-in returning scripted responses per template."""

    ask_parsed = LlmSession.ask_parsed

    def __init__(self, responses: dict[str, list[str]]):
        self.responses = {name: list(items) for name, items in responses.items()}
        self.calls: list[tuple[str, dict, bool]] = []

    def ask(self, template_name, bindings, *, tags, reask=False):
        self.calls.append((template_name, dict(bindings), reask))
        queue = self.responses[template_name]
        if not queue:
            raise AssertionError(f"no scripted response left for {template_name}")
        if len(queue) == 1:
            return queue[0]
        return queue.pop(0)

from __future__ import annotations

import sys
from pathlib import Path

import pytest

ROOT = Path(__file__).resolve().parent.parent
FIXTURES = ROOT / "fixtures"
sys.path.insert(0, str(ROOT / "tests"))

import stub_worker  # noqa: E402
from docfuzz.evaluator import Outcome  # noqa: E402
from docfuzz.extract import extract  # noqa: E402
from docfuzz.pipeline import load_annotated_sample, prepare_corpus  # noqa: E402
from docfuzz.rulegen import construct_rules  # noqa: E402

KEYWORDS = str(FIXTURES / "keywords.json")


def fixture_path(*parts: str) -> str:
    return str(FIXTURES.joinpath(*parts))


@pytest.fixture(scope="session")
def pair_prepared():
    return prepare_corpus(
        fixture_path("pair", "corpus.json"), KEYWORDS, fixture_path("pair", "trees.conllu")
    )


@pytest.fixture(scope="session")
def pair_sample(pair_prepared):
    return load_annotated_sample(pair_prepared, fixture_path("pair", "annotations.json"))


@pytest.fixture(scope="session")
def mini_prepared():
    return prepare_corpus(
        fixture_path("mini", "corpus.json"), KEYWORDS, fixture_path("mini", "trees.conllu")
    )


@pytest.fixture(scope="session")
def mini_sample(mini_prepared):
    return load_annotated_sample(mini_prepared, fixture_path("mini", "annotations.json"))


@pytest.fixture(scope="session")
def mini_rules(mini_sample):
    return construct_rules(mini_sample, min_support=2, min_confidence=0.9, max_size=7)


@pytest.fixture(scope="session")
def mock_prepared():
    return prepare_corpus(
        fixture_path("mock", "corpus.json"), KEYWORDS, fixture_path("mock", "trees.conllu")
    )


@pytest.fixture(scope="session")
def mock_result(mock_prepared, mini_rules):
    return extract(mock_prepared, mini_rules)


class StubEvaluator:
    """In-process harness handle over the recorded-outcome stub semantics."""

    def run(self, record: dict, timeout_scale: float = 1.0) -> Outcome:
        try:
            stub_worker.dispatch(record)
        except stub_worker.Reject as exc:
            return Outcome(kind="EXCEPTION", message=str(exc)[:500])
        except stub_worker.Fault as fault:
            return Outcome(
                kind="CRASH",
                crash_signal=fault.signal_name,
                message=f"injected fault ({fault.signal_name})",
            )
        return Outcome(kind="PASS")


@pytest.fixture()
def stub_evaluator():
    return StubEvaluator()


def stub_worker_command() -> tuple[str, ...]:
    return (sys.executable, str(ROOT / "tests" / "stub_worker.py"))


from hypothesis import settings as _hyp_settings

_hyp_settings.register_profile("bundled", deadline=None, derandomize=True)
_hyp_settings.load_profile("bundled")

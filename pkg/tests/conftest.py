import sys
from pathlib import Path

import pytest

TESTS = Path(__file__).resolve().parent
ROOT = TESTS.parent
FIXTURES = ROOT / "fixtures"
TDATA = TESTS / "data"

sys.path.insert(0, str(TESTS))

from llull import corpus as corpus_mod  # noqa: E402
from llull import extraction, registry  # noqa: E402
from llull.gateway import Gateway, ResponseCache  # noqa: E402

MODEL_NAME = "fake-chat"


class ExplodingProvider:
    """Any call proves unwanted network activity."""

    model_name = MODEL_NAME

    def complete(self, request):
        raise AssertionError("provider was called; replay must stay offline")


def make_replay_gateway(parallelism: int = 4) -> Gateway:
    return Gateway(provider=ExplodingProvider(), cache=ResponseCache(FIXTURES / "cache"),
                   parallelism=parallelism, model_name=MODEL_NAME)


@pytest.fixture(scope="session")
def mini_corpus():
    corpus, rejects = corpus_mod.ingest(FIXTURES / "mini_corpus.jsonl")
    assert not rejects
    return corpus


@pytest.fixture()
def replay_gateway():
    return make_replay_gateway()


@pytest.fixture(scope="session")
def replay_drafts(mini_corpus):
    gateway = make_replay_gateway()
    drafts, failures = extraction.extract_corpus(mini_corpus, gateway, "replay")
    assert not failures
    return drafts


@pytest.fixture(scope="session")
def replay_registries(mini_corpus, replay_drafts):
    gateway = make_replay_gateway()
    venue_of = {r.id: (r.venue, r.year) for r in mini_corpus.records}
    grouped = {}
    for d in replay_drafts:
        grouped.setdefault(venue_of[d.paper_id], []).append(d)
    out = {}
    for (venue, year) in sorted(grouped):
        out[(venue, year)] = {
            disk: registry.build_registry(grouped[(venue, year)], venue, year, disk,
                                          gateway=gateway, mode="replay")
            for disk in registry.DISKS
        }
    return out

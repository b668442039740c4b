from __future__ import annotations

import pytest

from modelbench.fixtures import (build_replay_transcripts, import_paper_run,
                                 write_fixture_config, write_fixture_corpus)


@pytest.fixture(scope="session")
def fixture_env(tmp_path_factory):
    """Corpus + replay transcripts + config, built once for the session."""
    base = tmp_path_factory.mktemp("fixture-env")
    corpus = write_fixture_corpus(base / "corpus")
    transcripts = base / "transcripts.jsonl"
    build_replay_transcripts(corpus, transcripts)
    config = write_fixture_config(base / "config.json", corpus, transcripts,
                                  output_root=base / "runs")
    return {"base": base, "corpus": corpus, "transcripts": transcripts,
            "config": config}


@pytest.fixture()
def paper_run(tmp_path):
    """A fresh imported reference run with human cells left open (mutable)."""
    corpus = write_fixture_corpus(tmp_path / "corpus")
    return import_paper_run(tmp_path / "runs" / "paper-fixture",
                            corpus_root=corpus, include_human_scores=False)

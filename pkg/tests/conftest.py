from __future__ import annotations

from pathlib import Path

import pytest

from oadscan.classifier import TrainedModel, read_labeled_file
from oadscan.corpus import DocumentId
from oadscan.extraction import UriMention

DATA_DIR = Path(__file__).parent / "data"
FIXTURE_CORPUS = DATA_DIR / "fixture_corpus"
GOLDEN_DIR = DATA_DIR / "golden"


@pytest.fixture(scope="session")
def data_dir() -> Path:
    return DATA_DIR


@pytest.fixture(scope="session")
def fixture_corpus() -> Path:
    return FIXTURE_CORPUS


@pytest.fixture(scope="session")
def golden_dir() -> Path:
    return GOLDEN_DIR


@pytest.fixture(scope="session")
def labeled_200():
    return read_labeled_file(DATA_DIR / "labeled_200.tsv")


@pytest.fixture(scope="session")
def labeled_seed():
    """The six hand-labeled seed sentences (three per label)."""
    return read_labeled_file(DATA_DIR / "labeled_seed.tsv")


@pytest.fixture(scope="session")
def fixture_model() -> TrainedModel:
    """Model trained on labeled_200.tsv with default config (committed)."""
    return TrainedModel.load(DATA_DIR / "model.json")


def make_mention(uri: str, context: str = "", doc: str = "doc1", version: int = 1) -> UriMention:
    if not context:
        context = uri
    return UriMention(DocumentId(doc, version), uri, context, (0, len(uri)))

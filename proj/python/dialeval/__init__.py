"""Python bindings for the dialeval evaluation core."""

import json

from ._core import (
    ConfigError,
    Error,
    MockServer,
    __version__,
    pair_count,
    sha256_hex,
    spearman,
)
from . import _core

__all__ = [
    "ConfigError",
    "Error",
    "MockServer",
    "__version__",
    "fed_score",
    "mock_likelihood",
    "pair_count",
    "plan",
    "rank_systems",
    "run_pipeline",
    "sha256_hex",
    "spearman",
    "validate_backend",
]

DEFAULT_MOCK_SPEC = {"bigram_weight": 0.5, "unigram_weight": 0.4, "floor_weight": 0.1, "vocabulary_size": 5000}


def plan(method, targets, partners=(), replicates=1, seed_ids=("seed-0",), master_seed=0):
    """Dialogue tasks as dicts with target_id, partner_id, seed_id and replicate_index."""
    return json.loads(_core._plan_json(method, list(targets), list(partners), replicates, list(seed_ids), master_seed))


def rank_systems(scores, dimension="Overall"):
    return json.loads(_core._rank_json(dict(scores), dimension))


def mock_likelihood(context, candidate, spec=None):
    return _core._mock_likelihood(list(context), candidate, json.dumps(spec or DEFAULT_MOCK_SPEC))


def fed_score(context, response, positives=(), negatives=(), mode="negatives-only", spec=None,
              normalization="mean-log-prob"):
    return _core._fed_score(list(context), response, list(positives), list(negatives), mode,
                            json.dumps(spec or DEFAULT_MOCK_SPEC), normalization)


def run_pipeline(config, run_dir, concurrency=0, annotations=""):
    """Plan, collect, score, rank and report in one call; returns rankings.json content."""
    return json.loads(_core._run_pipeline(str(config), str(run_dir), concurrency, str(annotations)))


def validate_backend(endpoint, timeout_ms=30000):
    return json.loads(_core._validate_backend(endpoint, timeout_ms))

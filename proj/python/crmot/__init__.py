"""Evaluation, filtering and synthetic data for cross-view referring tracking.

Thin wrappers over the native ``_core`` module. Configs are plain dicts with
the keys of :func:`default_config`; reports are returned as parsed JSON.
"""

import json
import os
import warnings

from . import _core
from ._core import (
    MissingInput,
    ParseError,
    brute_force_lap,
    fuse_features,
    fuse_scores,
    grad_loss_cmot,
    iou,
    loss_cmot,
    loss_referring,
    solve_lap,
)

__all__ = [
    "MissingInput",
    "ParseError",
    "brute_force_lap",
    "default_config",
    "evaluate",
    "filter_tracks",
    "fuse_features",
    "fuse_scores",
    "grad_loss_cmot",
    "iou",
    "loss_cmot",
    "loss_referring",
    "predictor_step",
    "solve_lap",
    "synth",
]


def _config_json(config):
    return None if config is None else json.dumps(config)


def default_config():
    return json.loads(_core.default_config())


def predictor_step(view_scores, hit_score=0.0, config=None):
    """One update of the hit-score rule. Returns ``(hit_score, emit)``."""
    return _core.predictor_step(list(view_scores), hit_score, _config_json(config))


def evaluate(scene_dir, predictions_root, descriptions=None, config=None, jobs=0):
    """Scores ``predictions_root/<description id>/`` against a scene directory."""
    report, notes = _core.evaluate(
        os.fspath(scene_dir),
        os.fspath(predictions_root),
        None if descriptions is None else os.fspath(descriptions),
        _config_json(config),
        jobs,
    )
    for note in notes:
        warnings.warn(note, stacklevel=2)
    return json.loads(report)


def filter_tracks(tracks_dir, scores_root, out_root, config=None):
    """Runs the predictor once per scored description directory."""
    return _core.filter(
        os.fspath(tracks_dir), os.fspath(scores_root), os.fspath(out_root), _config_json(config)
    )


def synth(out, errors=None, **options):
    """Writes a synthetic scene, descriptions, scored tracks and an error ledger.

    ``errors`` is an optional path to a JSON error spec.
    """
    if errors is not None:
        errors = os.fspath(errors)
    return _core.synth(os.fspath(out), errors=errors, **options)

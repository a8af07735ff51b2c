"""Laakso graphs, tree-to-graph maps and their Lipschitz analysis."""

import json

from . import _core
from ._core import (
    LaaksoGraph,
    build_laakso,
    composed_power_type,
    laakso_vertex_count,
    modulus,
    phi,
    run,
    tree_distance,
)

__all__ = [
    "LaaksoGraph",
    "build_laakso",
    "check_lemma42",
    "composed_power_type",
    "laakso_vertex_count",
    "modulus",
    "phi",
    "run",
    "tree_distance",
    "verify_all",
    "verify_james",
    "verify_phi",
]


def verify_phi(n=2, b=2, seed=0, samples=None, fault=None):
    return json.loads(_core.verify_phi(n, b, seed, samples, fault))


def verify_james(theta="3/4", indices=12, max_size=6):
    return json.loads(_core.verify_james(theta, indices, max_size))


def verify_all(seed=0, fault=None):
    passed, report = _core.verify_all(seed, fault)
    return passed, json.loads(report)


def check_lemma42(p, points=50):
    return json.loads(_core.check_lemma42(p, points))

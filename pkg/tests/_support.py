"""Shared helpers: cached pipeline runs and hypothesis settings for property suites."""

from __future__ import annotations

import functools
from pathlib import Path

from hypothesis import HealthCheck, settings

from qig.algebra.poly import parse_relations
from qig.engine import PipelineConfig, run_pipeline
from qig.presentation import parse_presentation

ROOT = Path(__file__).resolve().parent.parent
PRESENTATIONS = ROOT / "presentations"
SCHEMA = ROOT / "schema" / "report.v1.json"

PROPERTY = settings(max_examples=1000, deadline=None, derandomize=True,
                    suppress_health_check=[HealthCheck.too_slow, HealthCheck.data_too_large,
                                           HealthCheck.filter_too_much])


def presentation(name: str):
    return parse_presentation((PRESENTATIONS / f"{name}.grp").read_text())


@functools.lru_cache(maxsize=None)
def pipeline(name: str, **kw):
    return run_pipeline(presentation(name), PipelineConfig(**kw))


def reduces(store, text: str, alphabet) -> list[bool]:
    return [store.reduces_to_zero(r) for r in parse_relations(text, alphabet)]

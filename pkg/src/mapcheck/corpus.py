"""Bundled litmus corpus.

``corpus/*.lit`` holds the C11 sources; ``corpus/compiled/<stem>.<mapping>.lit``
holds each source compiled under every built-in mapping, with the expected
hardware verdict as its expectation line.
"""

from __future__ import annotations

from dataclasses import dataclass
from importlib import resources
from typing import Optional

from .litmus import LitmusTest, parse_litmus


@dataclass(frozen=True)
class CorpusEntry:
    path: str  # relative to the corpus root
    test: LitmusTest
    source: Optional[str] = None  # stem of the C11 source, compiled entries only
    mapping: Optional[str] = None


def _root():
    return resources.files("mapcheck") / "corpus"


def load_sources() -> list:
    out = []
    for item in sorted(_root().iterdir(), key=lambda p: p.name):
        if item.name.endswith(".lit"):
            out.append(CorpusEntry(item.name, parse_litmus(item.read_text("utf-8"))))
    return out


def load_compiled() -> list:
    out = []
    for item in sorted((_root() / "compiled").iterdir(), key=lambda p: p.name):
        if not item.name.endswith(".lit"):
            continue
        stem, mapping, _ = item.name.rsplit(".", 2)
        out.append(
            CorpusEntry(
                f"compiled/{item.name}",
                parse_litmus(item.read_text("utf-8")),
                source=stem,
                mapping=mapping,
            )
        )
    return out


def load_corpus() -> list:
    return load_sources() + load_compiled()


def source_test(stem: str) -> LitmusTest:
    return parse_litmus((_root() / f"{stem}.lit").read_text("utf-8"))


def compiled_test(stem: str, mapping: str) -> LitmusTest:
    return parse_litmus((_root() / "compiled" / f"{stem}.{mapping}.lit").read_text("utf-8"))


def corpus_path(name: str):
    """Bundled file for ``name`` (``iriw_acq_acq.lit`` or a compiled file name)."""
    for base in (_root(), _root() / "compiled"):
        item = base / name
        if item.is_file():
            return item
    return None

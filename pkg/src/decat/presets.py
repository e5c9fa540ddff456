"""The bundled corpus: schemas and named instances shipped with the package.

Everything is stored as text files under ``decat/corpus`` and parsed on
first use, so the corpus doubles as a fixture for the file formats.
"""

from __future__ import annotations

from functools import lru_cache
from importlib import resources

from .core import Instance, Schema
from .textio import parse_instance_text, parse_schema_text

__all__ = [
    "schema_names",
    "load_schema",
    "instance_names",
    "load_instance",
    "instances_over",
    "corpus_texts",
]


@lru_cache(maxsize=1)
def corpus_texts() -> dict[str, str]:
    """File name to file text for every bundled corpus file."""
    root = resources.files("decat") / "corpus"
    out = {}
    for entry in sorted(root.iterdir(), key=lambda e: e.name):
        if entry.name.endswith((".schema", ".inst")):
            out[entry.name] = entry.read_text(encoding="utf-8")
    return out


@lru_cache(maxsize=1)
def _schemas() -> dict[str, Schema]:
    out = {}
    for fname, text in corpus_texts().items():
        if fname.endswith(".schema"):
            s = parse_schema_text(text, source=fname)
            out[s.name] = s
    return out


@lru_cache(maxsize=1)
def _instances() -> dict[str, Instance]:
    out = {}
    for fname, text in corpus_texts().items():
        if fname.endswith(".inst"):
            inst = parse_instance_text(text, load_schema, source=fname)
            out[inst.name] = inst
    return out


def schema_names() -> tuple[str, ...]:
    return tuple(sorted(_schemas()))


def load_schema(name: str) -> Schema:
    return _schemas()[name]


def instance_names(schema_name: str | None = None) -> tuple[str, ...]:
    return tuple(
        sorted(
            n
            for n, inst in _instances().items()
            if schema_name is None or inst.schema.name == schema_name
        )
    )


def load_instance(name: str) -> Instance:
    return _instances()[name]


def instances_over(schema_name: str) -> dict[str, Instance]:
    return {
        n: inst for n, inst in _instances().items() if inst.schema.name == schema_name
    }

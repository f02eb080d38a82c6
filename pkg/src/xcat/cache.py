"""Content-addressed on-disk cache of built objects.

A file holds one JSON document with a format tag, a version, the request key
and the serialized object. Well-formed files whose matrices are wrong load
normally; the verifiers are what catch those.
"""

from __future__ import annotations

import hashlib
import json
import os
import tempfile
from pathlib import Path

from .forms import ContravariantForm
from .gspace import GradedObject, from_dict, to_dict

FORMAT = "xcat-object"
VERSION = 1
ENV_VAR = "XCAT_CACHE_DIR"


class CacheCorruption(Exception):
    """A cache file exists but cannot be read back as an object."""


def default_cache_dir() -> Path:
    env = os.environ.get(ENV_VAR)
    if env:
        return Path(env)
    base = os.environ.get("XDG_CACHE_HOME") or os.path.join(os.path.expanduser("~"), ".cache")
    return Path(base) / "xcat"


def request_key(rs_name: str, field: str, q: str, choice: str, lam, policy: str, depth: int | None) -> dict:
    return {
        "root_system": rs_name,
        "field": field,
        "q": q,
        "choice": choice,
        "lambda": [int(x) for x in lam],
        "policy": policy,
        "depth": depth,
    }


def canonical_json(data) -> str:
    return json.dumps(data, sort_keys=True, separators=(",", ":"), ensure_ascii=True) + "\n"


def key_digest(key: dict) -> str:
    return hashlib.sha256(canonical_json(key).encode()).hexdigest()


def form_to_dict(S: GradedObject, b: ContravariantForm) -> dict:
    fld = S.field
    return {
        "top_value": fld.encode(b.top_value),
        "gram": [[list(mu), [[fld.encode(x) for x in row] for row in g.tolist()]] for mu, g in sorted(b.gram.items())],
    }


def form_from_dict(S: GradedObject, data: dict) -> ContravariantForm:
    fld = S.field
    gram = {}
    for mu, rows in data["gram"]:
        d = S.dim(tuple(mu))
        gram[tuple(mu)] = fld.array([[fld.decode(x) for x in row] for row in rows], (d, d))
    return ContravariantForm(gram, fld.decode(data["top_value"]))


def serialize(key: dict, S: GradedObject, form: ContravariantForm | None = None) -> str:
    doc = {"format": FORMAT, "version": VERSION, "key": key, "object": to_dict(S)}
    if form is not None:
        doc["form"] = form_to_dict(S, form)
    return canonical_json(doc)


def deserialize(text: str, key: dict | None = None) -> tuple[GradedObject, ContravariantForm | None]:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise CacheCorruption(f"not valid JSON: {exc}") from exc
    if not isinstance(doc, dict) or doc.get("format") != FORMAT:
        raise CacheCorruption("missing or wrong format tag")
    if doc.get("version") != VERSION:
        raise CacheCorruption(f"unsupported cache version {doc.get('version')!r}")
    if key is not None and doc.get("key") != key:
        raise CacheCorruption("stored request key does not match the file name")
    try:
        S = from_dict(doc["object"])
        form = form_from_dict(S, doc["form"]) if doc.get("form") is not None else None
    except (KeyError, TypeError, ValueError, IndexError) as exc:
        raise CacheCorruption(f"malformed object: {exc}") from exc
    return S, form


class ObjectCache:
    def __init__(self, directory: str | os.PathLike | None = None):
        self.directory = Path(directory) if directory is not None else default_cache_dir()

    def path_for(self, key: dict) -> Path:
        return self.directory / f"{key_digest(key)}.json"

    def load(self, key: dict) -> tuple[GradedObject, ContravariantForm | None] | None:
        path = self.path_for(key)
        if not path.exists():
            return None
        return deserialize(path.read_text(encoding="ascii"), key)

    def store(self, key: dict, S: GradedObject, form: ContravariantForm | None = None) -> Path:
        self.directory.mkdir(parents=True, exist_ok=True)
        path = self.path_for(key)
        fd, tmp = tempfile.mkstemp(dir=self.directory, prefix=".tmp-", suffix=".json")
        try:
            with os.fdopen(fd, "w", encoding="ascii") as fh:
                fh.write(serialize(key, S, form))
            os.replace(tmp, path)
        except BaseException:
            if os.path.exists(tmp):
                os.unlink(tmp)
            raise
        return path

    def entries(self) -> list[tuple[Path, dict | None]]:
        """Cache files with their keys; unreadable files are listed with key None."""
        if not self.directory.is_dir():
            return []
        out = []
        for path in sorted(self.directory.glob("*.json")):
            try:
                key = json.loads(path.read_text(encoding="ascii")).get("key")
            except (ValueError, AttributeError, UnicodeDecodeError):
                key = None
            out.append((path, key))
        return out

    def clear(self) -> int:
        n = 0
        for path, _ in self.entries():
            path.unlink()
            n += 1
        return n

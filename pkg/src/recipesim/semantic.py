"""Instruction-text semantic similarity via pluggable embedding providers.

Transformer inference happens outside this engine: the production path
loads precomputed per-recipe embedding files, and a deterministic
feature-hashing embedder stands in when no files are available. An
optional HTTP provider can delegate to an external embedding service.

Embedding file formats (both carry model_tag, dimension, count):

  text    first line "model_tag dimension count", then one
          "recipe_id v1 v2 ... vD" line per recipe
  binary  magic "EMBB", then u16 tag length + UTF-8 tag, u32 dimension,
          u32 count, then per record u16 id length + UTF-8 id followed by
          dimension little-endian float32 values
"""

from __future__ import annotations

import hashlib
import math
import re
import struct
import threading
from dataclasses import dataclass

import numpy as np

from .corpus import Recipe
from .nutrition import clamp01, cosine

BINARY_MAGIC = b"EMBB"

_TOKEN_RE = re.compile(r"[a-z0-9]+")


class EmbeddingFormatError(ValueError):
    """Malformed or internally inconsistent embedding file."""


class MissingEmbeddingError(KeyError):
    def __init__(self, recipe_id: str, model_tag: str):
        super().__init__(recipe_id)
        self.recipe_id = recipe_id
        self.model_tag = model_tag

    def __str__(self) -> str:
        return f"missing embedding for recipe {self.recipe_id!r} (model {self.model_tag!r})"


@dataclass(frozen=True, eq=False)
class Embedding:
    values: np.ndarray
    model_tag: str

    def __post_init__(self) -> None:
        if not np.all(np.isfinite(self.values)):
            raise ValueError("embedding has non-finite entries")
        if float(np.linalg.norm(self.values)) == 0.0:
            raise ValueError("embedding has zero norm")


def semantic_similarity(e_a: Embedding, e_b: Embedding) -> float:
    """Clamped cosine between two same-provider embeddings."""
    if e_a.model_tag != e_b.model_tag:
        raise ValueError(f"provider mismatch: {e_a.model_tag!r} vs {e_b.model_tag!r}")
    if e_a.values.shape != e_b.values.shape:
        raise ValueError("embedding dimension mismatch")
    return clamp01(cosine(e_a.values, e_b.values))


def fallback_embed(text: str, dimension: int) -> Embedding:
    """Deterministic feature-hashed bag-of-words embedding, L2-normalized.

    Tokens hash (via blake2b, so results are stable across processes) to a
    bucket and a sign; identical text always yields the identical vector.
    """
    if not text or not text.strip():
        raise ValueError("cannot embed empty text")
    if dimension < 1:
        raise ValueError("dimension must be positive")
    values = np.zeros(dimension, dtype=np.float64)
    for token in _TOKEN_RE.findall(text.lower()):
        digest = hashlib.blake2b(token.encode("utf-8"), digest_size=8).digest()
        h = int.from_bytes(digest, "little")
        bucket = (h >> 1) % dimension
        sign = 1.0 if h & 1 else -1.0
        values[bucket] += sign
    norm = float(np.linalg.norm(values))
    if norm == 0.0:
        # Signs cancelled exactly; nudge the first bucket so the norm
        # invariant holds for any non-empty text.
        values[0] = 1.0
        norm = 1.0
    return Embedding(values=values / norm, model_tag="fallback")


class FallbackProvider:
    """Embeds recipe instruction text with the feature-hashing embedder."""

    def __init__(self, dimension: int, model_tag: str = "fallback"):
        self.model_tag = model_tag
        self.dimension = dimension

    def embed_recipe(self, recipe: Recipe) -> Embedding:
        e = fallback_embed(recipe.instruction_text(), self.dimension)
        return Embedding(values=e.values, model_tag=self.model_tag)


class FileEmbeddingStore:
    """Read-only recipe id -> embedding lookup backed by one model's file."""

    def __init__(self, model_tag: str, dimension: int, vectors: dict[str, np.ndarray]):
        self.model_tag = model_tag
        self.dimension = dimension
        self._vectors = vectors

    def __len__(self) -> int:
        return len(self._vectors)

    def __contains__(self, recipe_id: str) -> bool:
        return recipe_id in self._vectors

    def lookup(self, recipe_id: str) -> Embedding:
        vector = self._vectors.get(recipe_id)
        if vector is None:
            raise MissingEmbeddingError(recipe_id, self.model_tag)
        return Embedding(values=vector, model_tag=self.model_tag)

    def embed_recipe(self, recipe: Recipe) -> Embedding:
        return self.lookup(recipe.id)


def load_embeddings(path: str) -> FileEmbeddingStore:
    """Load an embedding file, auto-detecting the text or binary form."""
    with open(path, "rb") as fh:
        head = fh.read(4)
        fh.seek(0)
        if head == BINARY_MAGIC:
            return _load_binary(fh, path)
        return _load_text(fh, path)


def _load_text(fh, path: str) -> FileEmbeddingStore:
    header = fh.readline().decode("utf-8").split()
    if len(header) != 3:
        raise EmbeddingFormatError(f"{path}: header must be 'model_tag dimension count'")
    model_tag, dim_s, count_s = header
    try:
        dimension, count = int(dim_s), int(count_s)
    except ValueError:
        raise EmbeddingFormatError(f"{path}: non-integer dimension or count") from None
    if dimension < 1:
        raise EmbeddingFormatError(f"{path}: dimension must be positive")
    vectors: dict[str, np.ndarray] = {}
    for lineno, raw in enumerate(fh, start=2):
        line = raw.decode("utf-8").strip()
        if not line:
            continue
        parts = line.split()
        recipe_id = parts[0]
        if len(parts) - 1 != dimension:
            raise EmbeddingFormatError(
                f"{path}:{lineno}: expected {dimension} values, got {len(parts) - 1}"
            )
        if recipe_id in vectors:
            raise EmbeddingFormatError(f"{path}:{lineno}: duplicate id {recipe_id!r}")
        vectors[recipe_id] = _checked_vector(parts[1:], path, lineno)
    if len(vectors) != count:
        raise EmbeddingFormatError(
            f"{path}: header declares {count} records, file has {len(vectors)}"
        )
    return FileEmbeddingStore(model_tag, dimension, vectors)


def _checked_vector(parts: list[str], path: str, lineno: int) -> np.ndarray:
    try:
        vector = np.array([float(p) for p in parts], dtype=np.float64)
    except ValueError:
        raise EmbeddingFormatError(f"{path}:{lineno}: non-numeric value") from None
    if not np.all(np.isfinite(vector)) or float(np.linalg.norm(vector)) == 0.0:
        raise EmbeddingFormatError(f"{path}:{lineno}: vector must be finite with nonzero norm")
    return vector


def _load_binary(fh, path: str) -> FileEmbeddingStore:
    def read(n: int) -> bytes:
        data = fh.read(n)
        if len(data) != n:
            raise EmbeddingFormatError(f"{path}: truncated binary embedding file")
        return data

    read(4)  # magic
    (tag_len,) = struct.unpack("<H", read(2))
    model_tag = read(tag_len).decode("utf-8")
    dimension, count = struct.unpack("<II", read(8))
    if dimension < 1:
        raise EmbeddingFormatError(f"{path}: dimension must be positive")
    vectors: dict[str, np.ndarray] = {}
    for _ in range(count):
        (id_len,) = struct.unpack("<H", read(2))
        recipe_id = read(id_len).decode("utf-8")
        if recipe_id in vectors:
            raise EmbeddingFormatError(f"{path}: duplicate id {recipe_id!r}")
        raw = read(4 * dimension)
        vector = np.frombuffer(raw, dtype="<f4").astype(np.float64)
        if not np.all(np.isfinite(vector)) or float(np.linalg.norm(vector)) == 0.0:
            raise EmbeddingFormatError(
                f"{path}: vector for {recipe_id!r} must be finite with nonzero norm"
            )
        vectors[recipe_id] = vector
    if fh.read(1):
        raise EmbeddingFormatError(f"{path}: trailing bytes after {count} records")
    return FileEmbeddingStore(model_tag, dimension, vectors)


def write_embeddings_text(path: str, model_tag: str, embeddings: dict[str, np.ndarray]) -> None:
    dimension = _common_dimension(embeddings)
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(f"{model_tag} {dimension} {len(embeddings)}\n")
        for recipe_id, vector in embeddings.items():
            values = " ".join(repr(float(v)) for v in vector)
            fh.write(f"{recipe_id} {values}\n")


def write_embeddings_binary(path: str, model_tag: str, embeddings: dict[str, np.ndarray]) -> None:
    dimension = _common_dimension(embeddings)
    tag = model_tag.encode("utf-8")
    with open(path, "wb") as fh:
        fh.write(BINARY_MAGIC)
        fh.write(struct.pack("<H", len(tag)))
        fh.write(tag)
        fh.write(struct.pack("<II", dimension, len(embeddings)))
        for recipe_id, vector in embeddings.items():
            rid = recipe_id.encode("utf-8")
            fh.write(struct.pack("<H", len(rid)))
            fh.write(rid)
            fh.write(np.asarray(vector, dtype="<f4").tobytes())


def _common_dimension(embeddings: dict[str, np.ndarray]) -> int:
    if not embeddings:
        raise ValueError("no embeddings to write")
    dims = {len(v) for v in embeddings.values()}
    if len(dims) != 1:
        raise ValueError(f"inconsistent embedding dimensions: {sorted(dims)}")
    return dims.pop()


class HttpEmbeddingProvider:
    """Delegates embedding to an external service.

    POSTs {"texts": [...]} and expects {"vectors": [[...]]}. Requests are
    idempotent, so failures retry with backoff; a semaphore bounds in-flight
    requests. Vectors are cached per recipe id, keeping lookups
    deterministic within a run.
    """

    def __init__(
        self,
        endpoint: str,
        model_tag: str,
        dimension: int,
        timeout: float = 10.0,
        max_inflight: int = 4,
        retries: int = 2,
        backoff: float = 0.2,
    ):
        import httpx

        self.endpoint = endpoint
        self.model_tag = model_tag
        self.dimension = dimension
        self.timeout = timeout
        self.retries = retries
        self.backoff = backoff
        self._semaphore = threading.Semaphore(max_inflight)
        self._cache: dict[str, np.ndarray] = {}
        self._cache_lock = threading.Lock()
        self._client = httpx.Client(timeout=timeout)

    def embed_recipe(self, recipe: Recipe) -> Embedding:
        with self._cache_lock:
            cached = self._cache.get(recipe.id)
        if cached is None:
            cached = self._fetch(recipe.instruction_text())
            with self._cache_lock:
                cached = self._cache.setdefault(recipe.id, cached)
        return Embedding(values=cached, model_tag=self.model_tag)

    def _fetch(self, text: str) -> np.ndarray:
        import httpx
        import time

        last_error: Exception | None = None
        for attempt in range(self.retries + 1):
            if attempt:
                time.sleep(self.backoff * (2 ** (attempt - 1)))
            try:
                with self._semaphore:
                    response = self._client.post(self.endpoint, json={"texts": [text]})
                response.raise_for_status()
                vectors = response.json()["vectors"]
                vector = np.asarray(vectors[0], dtype=np.float64)
                if vector.shape != (self.dimension,):
                    raise EmbeddingFormatError(
                        f"service returned dimension {vector.shape}, expected {self.dimension}"
                    )
                return vector
            except (httpx.HTTPError, KeyError, IndexError) as exc:
                last_error = exc
        raise RuntimeError(f"embedding service failed after {self.retries + 1} attempts: {last_error}")

    def close(self) -> None:
        self._client.close()

"""Relevance-key extraction from semantic interactions.

Keys decide whether an edited sentence "relates to" an interaction: entities
and citations from highlights, entities from notes, names and locations from
cluster labels and member document titles. Extraction is deterministic so the
fidelity metric is reproducible; a model-backed extractor can be swapped in
behind the same call shape.
"""

from __future__ import annotations

from typing import AbstractSet, Optional

from ..diffing import InteractionKind, InteractionSet, SemanticInteraction
from ..textops import capitalized_phrases, contains_token_seq, tokens
from ..types import WorkspaceSnapshot

CITATION_PREFIX = "cite:"

_STOPWORDS = frozenset({
    "the", "a", "an", "of", "in", "on", "at", "to", "and", "or", "is",
    "was", "are", "were", "for", "from", "with", "by", "it", "its", "as",
    "that", "this", "be", "has", "have",
})


def _highlight_keys(text: str, doc_id: str) -> set[str]:
    keys = {t for t in tokens(text) if t not in _STOPWORDS and len(t) > 1}
    keys |= capitalized_phrases(text)
    keys.add(CITATION_PREFIX + doc_id.lower())
    return keys


def _entity_keys(text: str) -> set[str]:
    return set(capitalized_phrases(text))


def _title_of(doc_id: str, ws: Optional[WorkspaceSnapshot]) -> str:
    if ws is None:
        return ""
    doc = ws.document_map().get(doc_id)
    return doc.title if doc else ""


def interaction_keys(interaction: SemanticInteraction,
                     ws: Optional[WorkspaceSnapshot] = None) -> frozenset[str]:
    """Keys for a single interaction, drawn from its detail payload."""
    d = interaction.detail
    keys: set[str] = set()
    if interaction.object_type() == "highlight":
        keys |= _highlight_keys(d.get("text", ""), d.get("doc_id", ""))
        if "text_before" in d:
            keys |= _highlight_keys(d["text_before"], d.get("doc_id", ""))
    elif interaction.object_type() == "note":
        keys |= _entity_keys(d.get("text", ""))
        if "text_before" in d:
            keys |= _entity_keys(d["text_before"])
    else:
        keys |= _entity_keys(d.get("label", ""))
        if "label_before" in d:
            keys |= _entity_keys(d["label_before"])
        if interaction.kind in (InteractionKind.CLUSTER_CREATED,
                                InteractionKind.CLUSTER_DELETED):
            moved = list(d.get("members", ()))
        else:
            moved = list(d.get("members_added", ())) + list(d.get("members_removed", ()))
        for member in moved:
            title = member.get("title") or _title_of(member.get("doc_id", ""), ws)
            keys |= _entity_keys(title)
    keys.discard("")
    return frozenset(keys)


def interaction_key_sets(si: InteractionSet,
                         ws: Optional[WorkspaceSnapshot] = None
                         ) -> tuple[frozenset[str], ...]:
    """Per-interaction key sets, aligned with si.interactions."""
    return tuple(interaction_keys(i, ws) for i in si.interactions)


def extract_relevance_keys(si: InteractionSet,
                           ws: Optional[WorkspaceSnapshot] = None) -> frozenset[str]:
    """Union of all interactions' keys."""
    out: set[str] = set()
    for keys in interaction_key_sets(si, ws):
        out |= keys
    return frozenset(out)


def sentence_contains_key(sentence: str, key: str,
                          _token_cache: Optional[list[str]] = None) -> bool:
    sentence_tokens = _token_cache if _token_cache is not None else tokens(sentence)
    if key.startswith(CITATION_PREFIX):
        return key[len(CITATION_PREFIX):] in sentence_tokens
    return contains_token_seq(sentence_tokens, key)


def sentence_matches_any(sentence: str, keys: AbstractSet[str]) -> bool:
    sentence_tokens = tokens(sentence)
    return any(sentence_contains_key(sentence, k, sentence_tokens) for k in keys)

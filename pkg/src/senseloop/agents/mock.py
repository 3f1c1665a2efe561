"""Deterministic mock model clients for offline testing.

Three archetypes reproduce the qualitative behavior of the compared methods:

* baseline-rewriter  - regenerates every paragraph from the workspace.
* targeted-editor    - edits exactly the planned sections (summary and
  conclusion included), threading the interaction evidence into each edit.
* visonly-editor     - edits only the directly affected cluster paragraphs,
  skipping summary and conclusion (the low-recall pattern).

Each client answers by parsing the sentinel-delimited blocks the prompt
builders emit, so it exercises the same surface a real model would. Output is
a pure function of (archetype, seed, prompt).
"""

from __future__ import annotations

import hashlib
import re

from ..errors import SenseloopError
from ..textops import normalize_ws

ARCHETYPES = ("baseline-rewriter", "targeted-editor", "visonly-editor")

_QUOTED_RE = re.compile(r'"([^"]*)"')
_DOC_REF_RE = re.compile(r"\bdoc=(\S+)")
_CLUSTERS_RE = re.compile(r"clusters=\[([^\]]*)\]")
_EDIT_LINE_RE = re.compile(
    r"^EDIT\s+(\S+)\s+([a-z_]+)\s*:\s*(.+?)(?:\s*\[refs:[^\]]*\])?\s*$")
_WS_CLUSTER_RE = re.compile(r"^CLUSTER (\S+) :: (.*)$", re.MULTILINE)
_WS_DOC_RE = re.compile(r"^\s+DOCUMENT (\S+) :: (.*)$", re.MULTILINE)


def _block(prompt: str, name: str) -> str:
    start = f"=== {name} ==="
    end = f"=== END {name} ==="
    i = prompt.find(start)
    j = prompt.find(end)
    if i < 0 or j < 0:
        return ""
    return prompt[i + len(start):j].strip("\n")


def _line_value(prompt: str, label: str) -> str:
    for line in prompt.splitlines():
        if line.startswith(label):
            return line[len(label):].strip()
    return ""


def _section_list(prompt: str) -> list[str]:
    raw = _line_value(prompt, "SECTIONS:")
    return [s.strip() for s in raw.split(",") if s.strip()]


def _clean(text: str) -> str:
    """Strip sentence-terminal punctuation so embedded evidence cannot split
    the sentence it is quoted into."""
    return normalize_ws(re.sub(r"[.!?]+", ",", text)).strip(", ")


class _InteractionLine:
    """One parsed line of the interaction digest."""

    def __init__(self, line: str):
        parts = line.lstrip("- ").split()
        self.kind = parts[0] if parts else ""
        self.subject_id = parts[1] if len(parts) > 1 else ""
        m = _CLUSTERS_RE.search(line)
        self.cluster_ids = [c for c in (m.group(1).split(",") if m else []) if c]
        self.phrases = [_clean(p) for p in _QUOTED_RE.findall(line) if _clean(p)]
        doc = _DOC_REF_RE.search(line)
        self.doc_id = doc.group(1) if doc else ""

    def clause(self) -> str:
        body = ", ".join(f'"{p}"' for p in self.phrases) or self.subject_id
        if self.doc_id:
            body += f" (doc {self.doc_id})"
        return body


def _interaction_lines(prompt: str) -> list[_InteractionLine]:
    block = _block(prompt, "INTERACTIONS")
    return [_InteractionLine(line) for line in block.splitlines()
            if line.strip().startswith("- ")]


def _prev_paragraphs(prompt: str) -> dict[str, str]:
    """Map previous section keys to their paragraph text."""
    keys_raw = _line_value(prompt, "PREVIOUS SECTIONS:")
    keys = [k.strip() for k in keys_raw.split(",") if k.strip()]
    blocks = [b.strip() for b in re.split(r"\n\s*\n", _block(prompt, "PREVIOUS REPORT"))
              if b.strip()]
    if len(keys) != len(blocks):
        raise SenseloopError(
            f"mock cannot align previous report: {len(keys)} keys, {len(blocks)} paragraphs")
    return dict(zip(keys, blocks))


def _task(prompt: str) -> str:
    first = prompt.splitlines()[0].strip() if prompt else ""
    return first[len("TASK: "):] if first.startswith("TASK: ") else ""


class _MockClient:
    retries = 0

    def __init__(self, archetype: str, seed: int):
        self.archetype = archetype
        self.seed = seed

    def _nonce(self, *parts: str) -> str:
        digest = hashlib.sha256("|".join((str(self.seed),) + parts).encode("utf-8"))
        return digest.hexdigest()[:8]

    def complete(self, prompt: str) -> str:
        task = _task(prompt)
        if task == "ANALYSIS":
            return self._analysis(prompt)
        if task == "REFINEMENT":
            return self._refinement(prompt)
        if task == "REFINEMENT-SI":
            return self._si_refinement(prompt)
        if task == "GENERATION":
            return self._generation(prompt)
        raise SenseloopError(f"mock client got a prompt without a task tag: {prompt[:80]!r}")

    # -- analysis ----------------------------------------------------------

    def _analysis(self, prompt: str) -> str:
        lines = _interaction_lines(prompt)
        deleted = {ln.subject_id for ln in lines if ln.kind == "ClusterDeleted"}
        affected: set[str] = set()
        for ln in lines:
            affected.update(ln.cluster_ids)
        targets = sorted(f"cluster:{cid}" for cid in affected - deleted)

        focus = lines[0].phrases[0] if lines and lines[0].phrases else "the workspace"
        n = len(lines)
        intent = (f"The analyst made {n} workspace change{'s' if n != 1 else ''} "
                  f"centered on {focus}. "
                  f"The report should absorb this evidence in "
                  f"{len(targets) + 2} sections.")

        all_clause = "; ".join(ln.clause() for ln in lines)
        all_refs = ",".join(ln.subject_id for ln in lines)
        plan_lines = [f"EDIT summary append: Reflect {all_clause} [refs: {all_refs}]"]
        for target in targets:
            cid = target.split(":", 1)[1]
            relevant = [ln for ln in lines if cid in ln.cluster_ids]
            clause = "; ".join(ln.clause() for ln in relevant)
            refs = ",".join(ln.subject_id for ln in relevant)
            plan_lines.append(f"EDIT {target} append: Work in {clause} [refs: {refs}]")
        plan_lines.append(
            f"EDIT conclusion append: Weigh {all_clause} [refs: {all_refs}]")
        plan = "\n".join(plan_lines)
        return f"INTENT:\n{intent}\n\nPLAN:\n```\n{plan}\n```\n"

    # -- refinement (plan-driven) -------------------------------------------

    def _refinement(self, prompt: str) -> str:
        prev = _prev_paragraphs(prompt)
        out_sections = _section_list(prompt)
        edits: dict[str, list[tuple[str, str]]] = {}
        for raw in _block(prompt, "PLAN").splitlines():
            m = _EDIT_LINE_RE.match(raw.strip())
            if m:
                edits.setdefault(m.group(1), []).append((m.group(2), m.group(3)))

        paragraphs = []
        for key in out_sections:
            text = prev.get(key, "")
            for action, instruction in edits.get(key, ()):
                sentence = _clean(instruction) + "."
                if action == "remove_sentence":
                    text = self._drop_last_sentence(text)
                elif action in ("modify", "rewrite_sentence"):
                    text = self._drop_last_sentence(text)
                    text = (text + " " + sentence).strip()
                else:  # append
                    text = (text + " " + sentence).strip()
            if not text:
                text = f"No content for {key}."
            paragraphs.append(text)
        return "\n\n".join(paragraphs) + "\n"

    @staticmethod
    def _drop_last_sentence(text: str) -> str:
        from ..textops import split_sentences

        sentences = split_sentences(text)
        return " ".join(sentences[:-1]) if len(sentences) > 1 else ""

    # -- refinement from interactions only -----------------------------------

    def _si_refinement(self, prompt: str) -> str:
        prev = _prev_paragraphs(prompt)
        out_sections = _section_list(prompt)
        lines = _interaction_lines(prompt)
        by_cluster: dict[str, list[_InteractionLine]] = {}
        for ln in lines:
            for cid in ln.cluster_ids:
                by_cluster.setdefault(cid, []).append(ln)

        paragraphs = []
        for key in out_sections:
            text = prev.get(key, "")
            cid = key.split(":", 1)[1] if key.startswith("cluster:") else None
            if cid is not None and cid in by_cluster:
                clause = "; ".join(ln.clause() for ln in by_cluster[cid])
                text = (text + " " + f"Noted: {clause}.").strip()
            if not text:
                text = f"No content for {key}."
            paragraphs.append(text)
        return "\n\n".join(paragraphs) + "\n"

    # -- full regeneration ----------------------------------------------------

    def _generation(self, prompt: str) -> str:
        workspace = _block(prompt, "WORKSPACE")
        out_sections = _section_list(prompt)
        labels = dict(_WS_CLUSTER_RE.findall(workspace))
        docs_by_cluster: dict[str, list[str]] = {}
        current = None
        for line in workspace.splitlines():
            cluster_match = _WS_CLUSTER_RE.match(line)
            if cluster_match:
                current = cluster_match.group(1)
                continue
            if line.startswith("UNCLUSTERED"):
                current = None
                continue
            doc_match = _WS_DOC_RE.match(line)
            if doc_match and current is not None:
                docs_by_cluster.setdefault(current, []).append(doc_match.group(1))

        paragraphs = []
        for key in out_sections:
            nonce = self._nonce(key, prompt)
            if key == "summary":
                text = (f"Regenerated assessment of the workspace evidence "
                        f"(pass {nonce}). It spans {len(labels)} clusters.")
            elif key == "conclusion":
                text = (f"Overall the regenerated picture warrants continued "
                        f"scrutiny (pass {nonce}). Confidence remains moderate.")
            else:
                cid = key.split(":", 1)[1]
                members = docs_by_cluster.get(cid, [])
                label = _clean(labels.get(cid, cid)) or cid
                text = (f"Cluster {label} groups {len(members)} documents "
                        f"(pass {nonce}). Members include {', '.join(members) or 'none'}.")
            paragraphs.append(text)
        return "\n\n".join(paragraphs) + "\n"


class _BaselineRewriter(_MockClient):
    def _refinement(self, prompt: str) -> str:  # degrade gracefully if misused
        return self._generation(prompt)


def mock_model(archetype: str, seed: int = 0):
    """Deterministic stand-in client for one method archetype."""
    if archetype not in ARCHETYPES:
        raise ValueError(f"unknown archetype {archetype!r}; expected one of {ARCHETYPES}")
    if archetype == "baseline-rewriter":
        return _BaselineRewriter(archetype, seed)
    return _MockClient(archetype, seed)

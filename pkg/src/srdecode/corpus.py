"""CoNLL-style corpus readers and writers.

Chunk files: whitespace-separated ``token POS tag`` lines (extra middle
columns are allowed but every line of a file must have the same column
count), sentences separated by blank lines, ``-DOCSTART-`` lines ignored.

Dependency files: tab-separated ``ID FORM POS HEAD`` lines, or 10-column
CoNLL-X lines of which ID, FORM, POSTAG and HEAD (columns 1, 2, 5, 7) are
read.  Sentences are separated by blank lines.
"""

from __future__ import annotations

from pathlib import Path
from typing import Iterator, Sequence

from srdecode.core import LabeledSequence, Sentence, TagSet
from srdecode.dep.trees import ArcVector, DepInstance, _has_cycle


class CorpusFormatError(ValueError):
    def __init__(self, path, line: int, message: str):
        self.path = str(path)
        self.line = line
        super().__init__(f"{path}:{line}: {message}")


def _blocks(path) -> Iterator[list[tuple[int, str]]]:
    block: list[tuple[int, str]] = []
    with open(path, encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.rstrip("\n").rstrip("\r")
            if not line.strip():
                if block:
                    yield block
                block = []
            else:
                block.append((lineno, line))
    if block:
        yield block


def read_conll_chunks(path, tagset: TagSet | None = None) -> list[LabeledSequence]:
    """Read a chunk file.  Without ``tagset`` one is built in first-seen order."""
    raw: list[tuple[list[str], list[str], list[str]]] = []
    width = None
    for block in _blocks(path):
        tokens, pos, tags = [], [], []
        for lineno, line in block:
            cols = line.split()
            if cols[0] == "-DOCSTART-":
                continue
            if width is None:
                if len(cols) < 3:
                    raise CorpusFormatError(path, lineno, f"expected >= 3 columns, got {len(cols)}")
                width = len(cols)
            if len(cols) != width:
                raise CorpusFormatError(path, lineno, f"expected {width} columns, got {len(cols)}")
            tokens.append(cols[0])
            pos.append(cols[1])
            tags.append(cols[-1])
        if tokens:
            raw.append((tokens, pos, tags))
    if tagset is None:
        tagset = TagSet.from_corpus(t for _, _, t in raw)
    out = []
    for tokens, pos, tags in raw:
        try:
            idx = tagset.encode(tags)
        except KeyError as exc:
            raise CorpusFormatError(path, 0, str(exc)) from None
        out.append(LabeledSequence(Sentence(tuple(tokens), tuple(pos)), idx, tagset))
    return out


def write_conll_chunks(path, sequences: Sequence[LabeledSequence], gold=None) -> None:
    """Write ``token POS [gold] predicted`` lines."""
    with open(path, "w", encoding="utf-8") as fh:
        for i, seq in enumerate(sequences):
            s = seq.sentence
            pos = s.pos or ("_",) * len(s)
            gold_labels = gold[i].labels if gold is not None else None
            for t, (tok, p, lab) in enumerate(zip(s.tokens, pos, seq.labels)):
                cols = [tok, p] + ([gold_labels[t]] if gold_labels else []) + [lab]
                fh.write(" ".join(cols) + "\n")
            fh.write("\n")


def read_conll_dep(path) -> list[tuple[DepInstance, ArcVector]]:
    """Read dependency trees; non-projective trees load with ``projective`` False."""
    out = []
    for block in _blocks(path):
        words, pos, heads = [], [], []
        for lineno, line in block:
            cols = line.split("\t")
            if len(cols) == 10:
                cols = [cols[0], cols[1], cols[4], cols[6]]
            elif len(cols) != 4:
                raise CorpusFormatError(path, lineno, f"expected 4 or 10 columns, got {len(cols)}")
            try:
                ident = int(cols[0])
            except ValueError:
                raise CorpusFormatError(path, lineno, f"non-integer ID {cols[0]!r}") from None
            if ident != len(words) + 1:
                raise CorpusFormatError(
                    path, lineno, f"multi-head or out-of-order ID {ident}, expected {len(words) + 1}"
                )
            try:
                head = int(cols[3])
            except ValueError:
                raise CorpusFormatError(path, lineno, f"non-integer HEAD {cols[3]!r}") from None
            words.append(cols[1])
            pos.append(cols[2])
            heads.append(head)
        first = block[0][0]
        n = len(heads)
        for m, h in enumerate(heads, start=1):
            if not 0 <= h <= n or h == m:
                raise CorpusFormatError(path, first, f"invalid head {h} for word {m}")
        if _has_cycle(heads):
            raise CorpusFormatError(path, first, "cycle")
        out.append((DepInstance(tuple(words), tuple(pos)), ArcVector(tuple(heads))))
    return out


def write_conll_dep(path, instances: Sequence[DepInstance], trees: Sequence[ArcVector]) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for x, tree in zip(instances, trees):
            for m, (w, p, h) in enumerate(zip(x.words, x.pos, tree.heads), start=1):
                fh.write(f"{m}\t{w}\t{p}\t{h}\n")
            fh.write("\n")


def ensure_exists(path) -> Path:
    p = Path(path)
    if not p.is_file():
        raise FileNotFoundError(f"no such file: {path}")
    return p


def read_chunk_sentences(path) -> list[Sentence]:
    """Sentences to decode: ``token POS [...]`` lines, any trailing columns ignored."""
    out = []
    width = None
    for block in _blocks(path):
        tokens, pos = [], []
        for lineno, line in block:
            cols = line.split()
            if cols[0] == "-DOCSTART-":
                continue
            if width is None:
                if len(cols) < 2:
                    raise CorpusFormatError(path, lineno, f"expected >= 2 columns, got {len(cols)}")
                width = len(cols)
            if len(cols) != width:
                raise CorpusFormatError(path, lineno, f"expected {width} columns, got {len(cols)}")
            tokens.append(cols[0])
            pos.append(cols[1])
        if tokens:
            out.append(Sentence(tuple(tokens), tuple(pos)))
    return out


def read_dep_sentences(path) -> list[DepInstance]:
    """Sentences to parse from a dependency file; the HEAD column may be ``_``."""
    out = []
    for block in _blocks(path):
        words, pos = [], []
        for lineno, line in block:
            cols = line.split("\t")
            if len(cols) == 10:
                cols = [cols[0], cols[1], cols[4], cols[6]]
            elif len(cols) != 4:
                raise CorpusFormatError(path, lineno, f"expected 4 or 10 columns, got {len(cols)}")
            if cols[0] != str(len(words) + 1):
                raise CorpusFormatError(path, lineno, f"unexpected ID {cols[0]!r}")
            words.append(cols[1])
            pos.append(cols[2])
        out.append(DepInstance(tuple(words), tuple(pos)))
    return out

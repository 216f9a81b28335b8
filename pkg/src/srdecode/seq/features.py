"""Observation feature templates for chain models.

Every template looks at the sentence around one position and yields at most
one feature string; the model conjoins each with the candidate n-gram tag by
giving it one weight per n-gram column.
"""

from __future__ import annotations

from typing import Callable, Sequence

from srdecode.core import Sentence

PAD_LEFT = "<S>"
PAD_RIGHT = "</S>"


def _tok(s: Sentence, i: int) -> str:
    if i < 0:
        return PAD_LEFT
    if i >= len(s):
        return PAD_RIGHT
    return s.tokens[i]


def _pos(s: Sentence, i: int) -> str | None:
    if s.pos is None:
        return None
    if i < 0:
        return PAD_LEFT
    if i >= len(s):
        return PAD_RIGHT
    return s.pos[i]


def _word(off: int):
    return lambda s, t: _tok(s, t + off)


def _prefix(k: int):
    return lambda s, t: s.tokens[t][:k] if len(s.tokens[t]) >= k else None


def _suffix(k: int):
    return lambda s, t: s.tokens[t][-k:] if len(s.tokens[t]) >= k else None


def _postag(off: int):
    return lambda s, t: _pos(s, t + off)


TEMPLATES: dict[str, Callable[[Sentence, int], str | None]] = {
    "w-2": _word(-2),
    "w-1": _word(-1),
    "w0": _word(0),
    "w+1": _word(1),
    "w+2": _word(2),
    "w-1w0": lambda s, t: f"{_tok(s, t - 1)}|{_tok(s, t)}",
    "w0w+1": lambda s, t: f"{_tok(s, t)}|{_tok(s, t + 1)}",
    "lower0": lambda s, t: s.tokens[t].lower(),
    "pre1": _prefix(1),
    "pre2": _prefix(2),
    "pre3": _prefix(3),
    "suf1": _suffix(1),
    "suf2": _suffix(2),
    "suf3": _suffix(3),
    "p-1": _postag(-1),
    "p0": _postag(0),
    "p+1": _postag(1),
}

DEFAULT_FEATURE_SPEC: tuple[str, ...] = tuple(TEMPLATES)


def check_spec(spec: Sequence[str]) -> tuple[str, ...]:
    unknown = [name for name in spec if name not in TEMPLATES]
    if unknown:
        raise ValueError(f"unknown feature templates: {unknown}")
    return tuple(spec)


def position_features(sentence: Sentence, t: int, spec: Sequence[str]) -> list[str]:
    out = []
    for name in spec:
        value = TEMPLATES[name](sentence, t)
        if value is not None:
            out.append(f"{name}={value}")
    return out


def sentence_features(sentence: Sentence, spec: Sequence[str]) -> list[list[str]]:
    return [position_features(sentence, t, spec) for t in range(len(sentence))]

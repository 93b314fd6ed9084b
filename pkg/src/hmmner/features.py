"""Token-level features: meta-tags, gazetteer X-tags and pseudo-tokens."""
from __future__ import annotations

import logging
import os
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Mapping, Sequence

log = logging.getLogger(__name__)

# Separator joining the three fields of an observation key (SYMBOL FOR UNIT
# SEPARATOR). Whitespace tokenisation never produces it by accident.
SEP = "␟"

META_TAGS = (
    "YYYY", "ICAP", "ABBR", "CHAS", "HASH", "ATSY", "CCOL", "COLN", "CHYP",
    "HYPH", "DFOR", "DTWO", "DONE", "DIGT", "DCOM", "CLCO", "LCOM", "CMCO",
    "ALDT",
)

# Lookup order matters: the first list containing the token wins.
GAZETTEER_CODES = {
    "bperson": "BPER",
    "iperson": "IPER",
    "blocation": "BLOC",
    "ilocation": "ILOC",
    "facilities": "FACI",
    "months": "MONT",
    "days": "DAYS",
    "period": "PERD",
    "count_expr": "COUN",
    "monetary": "MONY",
}
RESERVED_X_TAGS = frozenset(GAZETTEER_CODES.values())

_STRIP_CHARS = str.maketrans("", "", ",.:#@")


def _first_is_capital(token: str) -> bool:
    return token[:1].isupper()


def is_abbreviation(token: str) -> bool:
    """Uppercase letters with optional periods, at least two characters.

    Matches ``BJP`` and ``U.S.`` but not ``A`` or ``Delhi``.
    """
    if len(token) < 2:
        return False
    letters = [c for c in token if c != "."]
    return bool(letters) and all(c.isalpha() and c.isupper() for c in letters)


def _all_digits(token: str) -> bool:
    return token.isdecimal()


def assign_meta_tag(token: str, position: int = 0,
                    aldt_means_all_digits: bool = False) -> str:
    """Return the surface-shape code of ``token``.

    Every rule block is evaluated in order and a matching block overwrites
    the code set by earlier ones, so the last match wins: ``"Modi,"`` is
    first ICAP and ends as CLCO, ``"@user1"`` ends as DIGT.

    ``position`` is accepted for callers that track the token index; no
    rule depends on it. With ``aldt_means_all_digits`` the final block tests
    for an all-digit token instead of an all-dot one.
    """
    if not token:
        raise ValueError("empty token")
    tag = "YYYY"
    cap = _first_is_capital(token)
    if cap:
        tag = "ICAP"
    if is_abbreviation(token):
        tag = "ABBR"

    if token.startswith("#") and _first_is_capital(token[1:]):
        tag = "CHAS"
    elif token.startswith("#"):
        tag = "HASH"

    if token.startswith("@"):
        tag = "ATSY"

    if token.endswith(":") and cap:
        tag = "CCOL"
    elif token.endswith(":"):
        tag = "COLN"

    if "-" in token and cap:
        tag = "CHYP"
    elif token.find("-") >= 3:
        tag = "HYPH"

    digits = _all_digits(token)
    if digits and len(token) == 4:
        tag = "DFOR"
    elif digits and len(token) == 2:
        tag = "DTWO"
    elif digits and len(token) == 1:
        tag = "DONE"
    elif any(c.isdecimal() for c in token):
        tag = "DIGT"

    commas = token.count(",")
    if commas == 1 and any(c.isdecimal() for c in token):
        tag = "DCOM"
    elif token.endswith(",") and cap:
        tag = "CLCO"
    elif commas == 1 and token.endswith(","):
        tag = "LCOM"
    elif commas > 1 and cap:
        tag = "CMCO"

    if aldt_means_all_digits:
        if digits:
            tag = "ALDT"
    elif all(c == "." for c in token):
        tag = "ALDT"
    return tag


def normalize_entry(word: str) -> str:
    """Gazetteer lookup form: drop , . : # @ (words of length >= 2), casefold."""
    if len(word) >= 2:
        word = word.translate(_STRIP_CHARS)
    return word.casefold()


class GazetteerSet:
    """Ten word lists keyed by name (see ``GAZETTEER_CODES``).

    Lists not given are empty. Entries are stored in lookup form.
    """

    def __init__(self, lists: Mapping[str, Iterable[str]] | None = None):
        lists = dict(lists or {})
        unknown = set(lists) - set(GAZETTEER_CODES)
        if unknown:
            raise ValueError(f"unknown gazetteer lists: {sorted(unknown)}")
        self.lists: dict[str, frozenset[str]] = {}
        for name in GAZETTEER_CODES:
            entries = (normalize_entry(w.strip()) for w in lists.get(name, ()))
            self.lists[name] = frozenset(e for e in entries if e)

    @classmethod
    def load(cls, directory: str | os.PathLike) -> "GazetteerSet":
        """Read ``<name>.txt`` files from ``directory``.

        One entry per line; blank lines and lines starting with ``#`` are
        skipped. A missing file gives an empty list.
        """
        directory = Path(directory)
        if not directory.is_dir():
            raise FileNotFoundError(f"gazetteer directory not found: {directory}")
        lists = {}
        for name in GAZETTEER_CODES:
            path = directory / f"{name}.txt"
            if not path.exists():
                log.warning("gazetteer list %s missing, using empty list", path)
                continue
            with open(path, encoding="utf-8") as fh:
                lists[name] = [line.strip() for line in fh
                               if line.strip() and not line.lstrip().startswith("#")]
        gaz = cls(lists)
        log.info("gazetteer sizes: %s", gaz.sizes())
        return gaz

    def sizes(self) -> dict[str, int]:
        return {name: len(entries) for name, entries in self.lists.items()}

    def lookup(self, token: str) -> str | None:
        key = normalize_entry(token)
        if not key:
            return None
        for name, code in GAZETTEER_CODES.items():
            if key in self.lists[name]:
                return code
        return None

    def __contains__(self, token: str) -> bool:
        return self.lookup(token) is not None


def assign_x_tag(token: str, pos_tag: str, gaz: GazetteerSet | None) -> str:
    if gaz is not None:
        code = gaz.lookup(token)
        if code is not None:
            return code
    return pos_tag


@dataclass(frozen=True)
class PseudoToken:
    word: str
    x_tag: str
    meta_tag: str

    def __post_init__(self):
        for name in ("word", "x_tag", "meta_tag"):
            value = getattr(self, name)
            if not value:
                raise ValueError(f"empty {name}")
            if SEP in value:
                raise ValueError(f"{name} {value!r} contains the key separator")

    @property
    def key(self) -> str:
        return observation_key(self)


def observation_key(p: PseudoToken) -> str:
    return f"{p.word}{SEP}{p.x_tag}{SEP}{p.meta_tag}"


def parse_observation_key(key: str) -> PseudoToken:
    parts = key.split(SEP)
    if len(parts) != 3:
        raise ValueError(f"not an observation key: {key!r}")
    return PseudoToken(*parts)


def featurize_sentence(tokens: Sequence, pos_tags: Sequence[str],
                       gaz: GazetteerSet | None,
                       aldt_means_all_digits: bool = False) -> list[PseudoToken]:
    """Turn tokens (``Token`` objects or plain strings) into pseudo-tokens."""
    if len(tokens) != len(pos_tags):
        raise ValueError(
            f"{len(tokens)} tokens but {len(pos_tags)} POS tags")
    out = []
    for i, (tok, pos) in enumerate(zip(tokens, pos_tags)):
        word = tok if isinstance(tok, str) else tok.surface
        if pos in RESERVED_X_TAGS:
            raise ValueError(f"POS tag {pos!r} collides with a gazetteer code")
        out.append(PseudoToken(
            word, assign_x_tag(word, pos, gaz),
            assign_meta_tag(word, i, aldt_means_all_digits)))
    return out

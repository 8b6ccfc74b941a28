"""Flow-motif canonicalization, alphabet enumeration, and counting.

A k-pass motif is the window of k+1 consecutive touches relabeled by
order of first appearance (first distinct player A, second B, ...), so
the pattern keeps the structure of the exchange and forgets who played.
For k=3 the alphabet is ABAB, ABAC, ABCA, ABCB, ABCD.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

from .possessions import Possession, touch_sequence

DEFAULT_K = 3

_LETTERS = "ABCDEFGHIJKLMNOPQRSTUVWXYZ"

MotifPattern = str


def canonicalize(window: Sequence[str]) -> MotifPattern:
    """Relabel a touch window by order of first appearance.

    The output is independent of the actual player identifiers; any
    injective renaming of the window yields the same pattern.
    """
    labels: dict[str, str] = {}
    out: list[str] = []
    prev: str | None = None
    for who in window:
        if who == prev:
            raise ValueError(f"adjacent duplicate touch {who!r} in window")
        prev = who
        label = labels.get(who)
        if label is None:
            if len(labels) >= len(_LETTERS):
                raise ValueError("more distinct players than available labels")
            label = _LETTERS[len(labels)]
            labels[who] = label
        out.append(label)
    return "".join(out)


def enumerate_patterns(k: int) -> list[MotifPattern]:
    """All valid k-pass motif patterns, in lexicographic order.

    Valid means: starts with A, each letter is either already seen or the
    next unused one (restricted growth), and no two adjacent letters are
    equal. The alphabet is computed, never hard-coded, so any k works.
    """
    if k < 1:
        raise ValueError(f"k must be >= 1, got {k}")
    if k + 1 > len(_LETTERS):
        raise ValueError(f"k={k} needs more than {len(_LETTERS)} labels")
    out: list[str] = []

    def extend(prefix: list[str], used: int) -> None:
        if len(prefix) == k + 1:
            out.append("".join(prefix))
            return
        for code in range(used + 1):  # seen labels plus the next unused one
            ch = _LETTERS[code]
            if ch == prefix[-1]:
                continue
            extend(prefix + [ch], used + 1 if code == used else used)

    extend(["A"], 1)
    return out


def extract_motifs(possession: Possession, k: int = DEFAULT_K) -> list[MotifPattern]:
    """Canonicalized sliding windows of k consecutive passes.

    A possession of n passes yields max(0, n-k+1) motifs; windows never
    span possession boundaries.
    """
    if k < 2:
        raise ValueError(f"k must be >= 2, got {k}")
    seq = touch_sequence(possession)
    return [canonicalize(seq[i : i + k + 1]) for i in range(len(seq) - k)]


@dataclass(slots=True)
class MotifCountVector:
    """Per-match, per-team motif occurrence counts over the full alphabet.

    ``counts`` holds every pattern of ``enumerate_patterns(k)`` as a key,
    in alphabet order, with zeros for patterns that never occurred.
    """

    match_id: str
    team_id: str
    k: int
    counts: dict[MotifPattern, int]

    @property
    def total(self) -> int:
        return sum(self.counts.values())


def count_motifs(
    possessions: Iterable[Possession],
    k: int = DEFAULT_K,
    *,
    match_id: str = "",
    team_id: str = "",
) -> MotifCountVector:
    """Aggregate motif counts over possessions of one match and team.

    ``match_id``/``team_id`` are only used when ``possessions`` is empty;
    otherwise they are taken from the possessions, which must all agree.
    """
    counts = {pattern: 0 for pattern in enumerate_patterns(k)}
    possessions = list(possessions)
    if possessions:
        match_id = possessions[0].match_id
        team_id = possessions[0].team_id
    for pos in possessions:
        if pos.match_id != match_id or pos.team_id != team_id:
            raise ValueError(
                f"possession ({pos.match_id!r}, {pos.team_id!r}) mixed into "
                f"({match_id!r}, {team_id!r})"
            )
        for pattern in extract_motifs(pos, k):
            counts[pattern] += 1
    return MotifCountVector(match_id=match_id, team_id=team_id, k=k, counts=counts)

"""Shared constructors and independent oracles for the test suite.

The oracles here deliberately reimplement behavior with different code:
canonical labels via first-occurrence lists, alphabets via brute-force
enumeration over all identifier sequences, and ESS via direct deviation
sums. Tests compare the library against these, never the other way round.
"""

from __future__ import annotations

from itertools import product

from flowmotif import MatchEventLog, PassEvent, Possession

_LETTERS = "ABCDEFGHIJKLMNOPQRSTUVWXYZ"


def make_events(pairs, match_id="m1", team_id="t1", times=None):
    """PassEvents from (passer, receiver) pairs, timestamps 0,1,2,... by default."""
    if times is None:
        times = [float(i) for i in range(len(pairs))]
    return [
        PassEvent(match_id, team_id, str(a), str(b), t)
        for (a, b), t in zip(pairs, times)
    ]


def make_log(pairs, match_id="m1", team_id="t1", times=None):
    return MatchEventLog(
        match_id, team_id, tuple(make_events(pairs, match_id, team_id, times))
    )


def make_possession(pairs, match_id="m1", team_id="t1", times=None):
    return Possession(
        match_id, team_id, tuple(make_events(pairs, match_id, team_id, times))
    )


def chain_possession(touches, match_id="m1", team_id="t1", start_t=0.0, step=1.0):
    """Possession whose touch sequence is exactly the given holder list."""
    pairs = list(zip(touches, touches[1:]))
    times = [start_t + i * step for i in range(len(pairs))]
    return make_possession(pairs, match_id, team_id, times)


def oracle_canonical(window) -> str:
    """Independent canonicalization: label = first-occurrence rank."""
    order: list = []
    for who in window:
        if who not in order:
            order.append(who)
    return "".join(_LETTERS[order.index(who)] for who in window)


def oracle_alphabet(k: int) -> list[str]:
    """All k-pass patterns by brute force over identifier sequences.

    k+1 identifiers suffice because a window of k+1 touches can involve at
    most k+1 distinct players.
    """
    patterns = set()
    for seq in product(range(k + 1), repeat=k + 1):
        if any(a == b for a, b in zip(seq, seq[1:])):
            continue
        patterns.add(oracle_canonical(seq))
    return sorted(patterns)


def oracle_window_patterns(touches, k: int) -> list[str]:
    """Every contiguous (k+1)-touch subsequence, canonicalized independently."""
    return [
        oracle_canonical(touches[i : i + k + 1]) for i in range(len(touches) - k)
    ]


def oracle_ess(rows) -> float:
    """Within-cluster sum of squares of one cluster, by direct deviations."""
    n = len(rows)
    dim = len(rows[0])
    means = [sum(r[j] for r in rows) / n for j in range(dim)]
    return sum((r[j] - means[j]) ** 2 for r in rows for j in range(dim))

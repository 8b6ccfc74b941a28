"""Randomized pass-network null models and per-match motif z-scores.

The default policy reassigns the match's touch slots by a uniformly
random permutation, so possession count, every possession length, and
the per-player touch multiset are exactly preserved while the identity
occupying each slot is randomized. Adjacent-duplicate touches produced
by the permutation are repaired by swapping the offending slot with a
random other slot; if a bounded repair budget runs out the permutation
is resampled, and inputs that can never satisfy the no-adjacent-repeat
constraint raise :class:`DegenerateInputError` instead of looping.

Replicate seeds are derived from (master_seed, match_id, replicate), so
distributions are reproducible bit-for-bit regardless of parallelism.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .events import PassEvent
from .motifs import MotifCountVector, MotifPattern, enumerate_patterns
from .possessions import Possession, touch_sequence
from .seeding import derive_seed

POLICIES = ("touch_shuffle_match", "touch_shuffle_possession", "uniform_walk")

DEFAULT_REPLICATES = 1000
DEFAULT_MAX_REPAIR_ATTEMPTS = 100

# Bound for |z| when the null distribution has zero variance but the real
# count still deviates from it; keeps downstream feature vectors finite.
Z_CAP = 10.0


class DegenerateInputError(ValueError):
    """Input that cannot be randomized under the requested policy."""


@dataclass(frozen=True, slots=True)
class NullModelConfig:
    replicates: int = DEFAULT_REPLICATES
    policy: str = "touch_shuffle_match"
    master_seed: int = 0
    max_repair_attempts: int = DEFAULT_MAX_REPAIR_ATTEMPTS

    def __post_init__(self) -> None:
        if self.replicates < 1:
            raise ValueError(f"replicates must be >= 1, got {self.replicates}")
        if self.policy not in POLICIES:
            raise ValueError(f"unknown policy {self.policy!r}, expected one of {POLICIES}")
        if self.max_repair_attempts < 1:
            raise ValueError("max_repair_attempts must be >= 1")


@dataclass(frozen=True, slots=True)
class NullDistribution:
    """Per-pattern sample moments of motif counts over the replicates.

    ``std`` is Bessel-corrected; with a single replicate it is undefined
    and reported as 0 with ``degenerate`` set.
    """

    k: int
    mean: dict[MotifPattern, float]
    std: dict[MotifPattern, float]
    replicates: int
    degenerate: bool


@dataclass(frozen=True, slots=True)
class ZScoreProfile:
    """Standardized motif prevalence of one team in one match.

    ``degenerate`` lists the patterns whose z-score came from a
    zero-variance or single-replicate null rather than the plain formula.
    """

    match_id: str
    team_id: str
    k: int
    z: dict[MotifPattern, float]
    degenerate: frozenset[MotifPattern] = field(default_factory=frozenset)


# ---------------------------------------------------------------------------
# Match layout: possessions flattened into arrays for fast shuffling/counting
# ---------------------------------------------------------------------------


class _MatchLayout:
    """Touch slots of one match as integer-coded numpy arrays.

    ``adjacency`` holds every slot index i such that i+1 belongs to the
    same possession; the no-adjacent-repeat constraint applies exactly at
    those positions.
    """

    def __init__(self, possessions: Sequence[Possession]) -> None:
        if possessions:
            self.match_id = possessions[0].match_id
            self.team_id = possessions[0].team_id
        else:
            self.match_id = ""
            self.team_id = ""
        codes: dict[str, int] = {}
        touch_codes: list[int] = []
        lengths: list[int] = []
        for pos in possessions:
            if pos.match_id != self.match_id or pos.team_id != self.team_id:
                raise ValueError(
                    f"possession ({pos.match_id!r}, {pos.team_id!r}) mixed into "
                    f"({self.match_id!r}, {self.team_id!r})"
                )
            seq = touch_sequence(pos)
            lengths.append(len(seq))
            for who in seq:
                code = codes.get(who)
                if code is None:
                    code = len(codes)
                    codes[who] = code
                touch_codes.append(code)
        self.possessions = tuple(possessions)
        self.players = tuple(codes)
        self.touches = np.asarray(touch_codes, dtype=np.int64)
        self.lengths = np.asarray(lengths, dtype=np.int64)
        self.starts = np.concatenate(([0], np.cumsum(self.lengths)))[:-1]
        in_run = np.ones(self.touches.size, dtype=bool)
        if self.touches.size:
            in_run[self.starts + self.lengths - 1] = False
        self.adjacency = np.flatnonzero(in_run)
        self.checked_policies: set[str] = set()

    def window_starts(self, k: int) -> np.ndarray:
        """Global start index of every (k+1)-touch window, per possession."""
        chunks = [
            start + np.arange(length - k)
            for start, length in zip(self.starts.tolist(), self.lengths.tolist())
            if length > k
        ]
        if not chunks:
            return np.empty(0, dtype=np.int64)
        return np.concatenate(chunks)

    def rebuild(self, touches: np.ndarray) -> list[Possession]:
        """Possessions with the given touch assignment and original timestamps."""
        out = []
        for pos, start, length in zip(
            self.possessions, self.starts.tolist(), self.lengths.tolist()
        ):
            names = [self.players[c] for c in touches[start : start + length].tolist()]
            passes = tuple(
                PassEvent(pos.match_id, pos.team_id, names[j], names[j + 1], p.timestamp)
                for j, p in enumerate(pos.passes)
            )
            out.append(Possession(pos.match_id, pos.team_id, passes))
        return out


class _PatternIndex:
    """Vectorized window canonicalization for a fixed k.

    Packs each window's restricted-growth code into a single integer and
    maps it to its position in ``enumerate_patterns(k)``.
    """

    def __init__(self, k: int) -> None:
        self.k = k
        self.patterns = enumerate_patterns(k)
        base = k + 1
        self._weights = base ** np.arange(k + 1, dtype=np.int64)
        keys = np.array(
            [
                sum((ord(c) - ord("A")) * int(w) for c, w in zip(p, self._weights))
                for p in self.patterns
            ],
            dtype=np.int64,
        )
        self._order = np.argsort(keys)
        self._sorted_keys = keys[self._order]

    def window_counts(self, touches: np.ndarray, window_starts: np.ndarray) -> np.ndarray:
        """Occurrence count of every alphabet pattern over the windows."""
        return self.window_counts_batch(touches[None, :], window_starts)[0]

    def window_counts_batch(
        self, touch_rows: np.ndarray, window_starts: np.ndarray
    ) -> np.ndarray:
        """Per-row pattern counts for a stack of touch assignments.

        Counting involves no randomness, so batching replicates here is
        purely an amortization of numpy call overhead; row r's counts are
        exactly ``window_counts(touch_rows[r], window_starts)``.
        """
        n_patterns = len(self.patterns)
        n_rows = touch_rows.shape[0]
        if window_starts.size == 0:
            return np.zeros((n_rows, n_patterns), dtype=np.int64)
        k = self.k
        w = touch_rows[:, window_starts[:, None] + np.arange(k + 1)]
        w = w.reshape(-1, k + 1)
        flat = np.arange(w.shape[0])
        codes = np.zeros_like(w)
        high = np.zeros(w.shape[0], dtype=w.dtype)  # highest code used per window
        for j in range(1, k + 1):
            prev_eq = w[:, :j] == w[:, j : j + 1]
            seen = prev_eq.any(axis=1)
            prior = codes[flat, prev_eq.argmax(axis=1)]
            col = np.where(seen, prior, high + 1)
            codes[:, j] = col
            np.maximum(high, col, out=high)
        packed = codes @ self._weights
        idx = self._order[np.searchsorted(self._sorted_keys, packed)]
        idx += np.repeat(np.arange(n_rows, dtype=np.int64), window_starts.size) * n_patterns
        counts = np.bincount(idx, minlength=n_rows * n_patterns)
        return counts.reshape(n_rows, n_patterns)


# ---------------------------------------------------------------------------
# Shuffle policies
# ---------------------------------------------------------------------------


def _repair_adjacent(
    arr: np.ndarray,
    adjacency: np.ndarray,
    rng: np.random.Generator,
    max_attempts: int,
) -> bool:
    """Swap duplicate-adjacent slots with uniformly random other slots.

    Each sweep rechecks all adjacency positions and swaps every slot still
    offending; returns False once the sweep budget is exhausted so the
    caller can resample the whole permutation.
    """
    size = arr.size
    succ = adjacency + 1
    for _ in range(max_attempts):
        bad = adjacency[arr[adjacency] == arr[succ]]
        if bad.size == 0:
            return True
        partners = rng.integers(0, size - 1, size=bad.size)
        for i, j in zip(bad.tolist(), partners.tolist()):
            if arr[i] != arr[i + 1]:
                continue  # fixed by an earlier swap in this sweep
            slot = i + 1
            if j >= slot:
                j += 1
            arr[slot], arr[j] = arr[j], arr[slot]
    return False


def _shuffle_slots(
    pool: np.ndarray,
    adjacency: np.ndarray,
    rng: np.random.Generator,
    max_attempts: int,
) -> np.ndarray | None:
    for _ in range(max_attempts):
        arr = pool.copy()
        rng.shuffle(arr)
        if _repair_adjacent(arr, adjacency, rng, max_attempts):
            return arr
    return None


def _check_match_feasible(layout: _MatchLayout) -> None:
    if layout.touches.size == 0:
        return
    capacity = int(np.sum((layout.lengths + 1) // 2))
    top = int(np.bincount(layout.touches).max())
    if top > capacity:
        raise DegenerateInputError(
            f"match {layout.match_id!r}: one player holds {top} touch slots but only "
            f"{capacity} can be filled without adjacent repeats"
        )


def _check_possession_feasible(layout: _MatchLayout, index: int) -> None:
    start = int(layout.starts[index])
    length = int(layout.lengths[index])
    top = int(np.bincount(layout.touches[start : start + length]).max())
    if top > (length + 1) // 2:
        raise DegenerateInputError(
            f"possession #{index} of match {layout.match_id!r}: one player holds "
            f"{top} of {length} touches, which forces adjacent repeats"
        )


def _randomize_layout(
    layout: _MatchLayout,
    policy: str,
    rng: np.random.Generator,
    max_repair_attempts: int,
) -> np.ndarray:
    if layout.touches.size == 0:
        return layout.touches.copy()

    if policy == "touch_shuffle_match":
        if policy not in layout.checked_policies:
            _check_match_feasible(layout)
            layout.checked_policies.add(policy)
        arr = _shuffle_slots(layout.touches, layout.adjacency, rng, max_repair_attempts)
        if arr is None:
            raise DegenerateInputError(
                f"match {layout.match_id!r}: repair budget exhausted while removing "
                "adjacent repeats"
            )
        return arr

    if policy == "touch_shuffle_possession":
        if policy not in layout.checked_policies:
            for i in range(layout.starts.size):
                _check_possession_feasible(layout, i)
            layout.checked_policies.add(policy)
        out = np.empty_like(layout.touches)
        for i, (start, length) in enumerate(
            zip(layout.starts.tolist(), layout.lengths.tolist())
        ):
            stop = start + length
            adj = np.arange(length - 1)  # all inner positions of this possession
            arr = _shuffle_slots(layout.touches[start:stop], adj, rng, max_repair_attempts)
            if arr is None:
                raise DegenerateInputError(
                    f"possession #{i} of match {layout.match_id!r}: repair budget "
                    "exhausted while removing adjacent repeats"
                )
            out[start:stop] = arr
        return out

    # uniform_walk: every touch uniform over the match's player set, with no
    # repeat of the immediately preceding holder inside a possession.
    n_players = len(layout.players)
    n_poss = layout.starts.size
    first_draws = rng.integers(0, n_players, size=n_poss)
    step_draws = rng.integers(0, n_players - 1, size=layout.touches.size - n_poss)
    out = np.empty_like(layout.touches)
    d = 0
    for p, (start, length) in enumerate(zip(layout.starts.tolist(), layout.lengths.tolist())):
        prev = int(first_draws[p])
        out[start] = prev
        for i in range(start + 1, start + length):
            prev = (prev + 1 + int(step_draws[d])) % n_players
            out[i] = prev
            d += 1
    return out


# ---------------------------------------------------------------------------
# Public operations
# ---------------------------------------------------------------------------


def randomize_possessions(
    possessions: Sequence[Possession],
    policy: str = "touch_shuffle_match",
    seed: int = 0,
    max_repair_attempts: int = DEFAULT_MAX_REPAIR_ATTEMPTS,
) -> list[Possession]:
    """One randomized replicate of a match's possessions.

    The output has the same possession count, the same lengths, and the
    original timestamps; only who occupies each touch slot changes.
    """
    if policy not in POLICIES:
        raise ValueError(f"unknown policy {policy!r}, expected one of {POLICIES}")
    layout = _MatchLayout(possessions)
    rng = np.random.default_rng(seed)
    return layout.rebuild(_randomize_layout(layout, policy, rng, max_repair_attempts))


def null_distribution(
    possessions: Sequence[Possession],
    k: int,
    config: NullModelConfig,
) -> NullDistribution:
    """Motif-count moments over ``config.replicates`` randomized replicates.

    Counts are accumulated as exact integers before the moments are taken,
    so the result is independent of any execution order.
    """
    layout = _MatchLayout(possessions)
    pidx = _PatternIndex(k)
    window_starts = layout.window_starts(k)
    n = len(pidx.patterns)
    total = np.zeros(n, dtype=np.int64)
    total_sq = np.zeros(n, dtype=np.int64)
    reps = config.replicates
    batch_size = min(64, reps)
    batch = np.empty((batch_size, layout.touches.size), dtype=layout.touches.dtype)
    filled = 0
    for r in range(reps):
        rng = np.random.default_rng(derive_seed(config.master_seed, layout.match_id, r))
        batch[filled] = _randomize_layout(layout, config.policy, rng, config.max_repair_attempts)
        filled += 1
        if filled == batch_size or r == reps - 1:
            counts = pidx.window_counts_batch(batch[:filled], window_starts)
            total += counts.sum(axis=0)
            total_sq += (counts * counts).sum(axis=0)
            filled = 0
    mean = total / reps
    if reps >= 2:
        var = (reps * total_sq - total * total) / (reps * (reps - 1))
        std = np.sqrt(np.maximum(var, 0.0))
        degenerate = False
    else:
        std = np.zeros(n)
        degenerate = True
    return NullDistribution(
        k=k,
        mean=dict(zip(pidx.patterns, mean.tolist())),
        std=dict(zip(pidx.patterns, std.tolist())),
        replicates=reps,
        degenerate=degenerate,
    )


def z_scores(real: MotifCountVector, null: NullDistribution) -> ZScoreProfile:
    """Standard scores of the real counts against the null distribution.

    Zero-variance patterns get z=0 when the real count matches the null
    mean and a sign-capped z=±Z_CAP (flagged) when it does not.
    """
    if real.k != null.k:
        raise ValueError(f"k mismatch: counts have k={real.k}, null has k={null.k}")
    z: dict[MotifPattern, float] = {}
    flagged = set()
    for pattern in enumerate_patterns(real.k):
        count = real.counts[pattern]
        mean = null.mean[pattern]
        std = null.std[pattern]
        if std > 0.0:
            z[pattern] = (count - mean) / std
        elif count == mean:
            z[pattern] = 0.0
        else:
            z[pattern] = Z_CAP if count > mean else -Z_CAP
            flagged.add(pattern)
        if null.degenerate:
            flagged.add(pattern)
    return ZScoreProfile(
        match_id=real.match_id,
        team_id=real.team_id,
        k=real.k,
        z=z,
        degenerate=frozenset(flagged),
    )

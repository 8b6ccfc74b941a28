"""Possession segmentation: split a match log into consecutive-pass chains.

A possession is a maximal run of passes in which each receiver makes the
next pass and the gap between consecutive passes never exceeds ``t_max``
seconds. Segmentation is greedy left-to-right, so no possession can
absorb the first pass of its successor.
"""

from __future__ import annotations

from dataclasses import dataclass

from .events import MatchEventLog, PassEvent

DEFAULT_T_MAX = 5.0


@dataclass(frozen=True, slots=True)
class SegmentationConfig:
    """Chaining parameters. ``t_max`` is the allowed gap between passes."""

    t_max: float = DEFAULT_T_MAX

    def __post_init__(self) -> None:
        if not self.t_max > 0:
            raise ValueError(f"t_max must be positive, got {self.t_max!r}")


@dataclass(frozen=True, slots=True)
class Possession:
    """A chain of n >= 1 passes where the ball never left the team."""

    match_id: str
    team_id: str
    passes: tuple[PassEvent, ...]

    def __post_init__(self) -> None:
        if not self.passes:
            raise ValueError("possession must contain at least one pass")
        for a, b in zip(self.passes, self.passes[1:]):
            if a.receiver != b.passer:
                raise ValueError(
                    f"broken chain: {a.receiver!r} received but {b.passer!r} passed next"
                )
            if b.timestamp < a.timestamp:
                raise ValueError("passes not in time order")

    def __len__(self) -> int:
        return len(self.passes)


def segment_possessions(
    log: MatchEventLog, config: SegmentationConfig = SegmentationConfig()
) -> list[Possession]:
    """Greedy maximal segmentation of a sorted match log.

    Every input pass lands in exactly one possession and concatenating the
    possessions in order reproduces the input sequence.
    """
    possessions: list[Possession] = []
    run: list[PassEvent] = []
    for ev in log.events:
        if run:
            prev = run[-1]
            chained = prev.receiver == ev.passer
            in_time = ev.timestamp - prev.timestamp <= config.t_max
            if chained and in_time:
                run.append(ev)
                continue
            possessions.append(Possession(log.match_id, log.team_id, tuple(run)))
        run = [ev]
    if run:
        possessions.append(Possession(log.match_id, log.team_id, tuple(run)))
    return possessions


def touch_sequence(possession: Possession) -> tuple[str, ...]:
    """Ordered ball holders: the first passer, then every receiver.

    n passes yield n+1 touches; chaining plus the no-self-pass invariant
    guarantee no two adjacent touches are the same player.
    """
    first = possession.passes[0].passer
    return (first,) + tuple(p.receiver for p in possession.passes)

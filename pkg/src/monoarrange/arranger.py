"""Search for the best arrangement of a piece for a set of instrument slots.

The search runs in two stages. First every global key offset in -6..5 is
tried; for each one, every part may additionally move by whole octaves, and
a combination of per-part shifts is accepted when the parts can be matched
one-to-one onto slots that can play them. Keys are ranked by the number of
accidentals the players would read, then by total semitone movement. Second,
with the shifts fixed, the part-to-slot assignment whose average pitches sit
closest to the middle of the instruments' ranges is chosen.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from functools import cache
from typing import Iterator, Sequence

from .errors import CountMismatchError
from .instruments import SlotList
from .pitch import HIGHEST, LOWEST, Fifths, concert_pc_of_fifths, major_key_fifths, written_pitch_class
from .score import PartRange, Piece, average_pitch, part_range, transpose_part

KEY_OFFSETS = range(-6, 6)
MAX_OCTAVES = 7


@dataclass(frozen=True)
class TranspositionChoice:
    total_shift: int
    playable_slots: frozenset[int]


@dataclass(frozen=True)
class Selection:
    key_offset: int
    shifts: tuple[int, ...]
    slot_sets: tuple[frozenset[int], ...]
    sharps: int
    deviation: int


@dataclass(frozen=True)
class ArrangementResult:
    """The chosen arrangement: part ``i`` is played by ``slots[assignment[i]]``
    after moving it by ``shifts[i]`` semitones."""

    assignment: tuple[int, ...]
    shifts: tuple[int, ...]
    key_offset: int
    concert_fifths: Fifths
    sharps: int
    deviation: int
    fit: float
    slots: SlotList

    def metrics_line(self) -> str:
        return f'sharps={self.sharps} deviation={self.deviation} fit={self.fit:.2f}'


def _check_counts(piece: Piece, slots: SlotList) -> None:
    if len(piece.parts) != len(slots):
        raise CountMismatchError(
            f'the piece has {len(piece.parts)} parts but {len(slots)} instruments were requested'
        )


def shifted_key_fifths(piece: Piece, key_offset: int) -> Fifths:
    """Concert key signature of the piece after moving it by ``key_offset``."""
    return major_key_fifths((concert_pc_of_fifths(piece.key) + key_offset) % 12)


def _options_for_ranges(
    ranges: Sequence[PartRange], slot_ranges: Sequence[PartRange], key_offset: int
) -> list[list[TranspositionChoice]] | None:
    options = []
    for rng in ranges:
        choices = []
        for k in range(-MAX_OCTAVES, MAX_OCTAVES + 1):
            shift = key_offset + 12 * k
            moved = rng.shifted(shift)
            if moved.lo < LOWEST or moved.hi > HIGHEST:
                continue
            playable = frozenset(j for j, slot in enumerate(slot_ranges) if moved in slot)
            if playable:
                choices.append(TranspositionChoice(shift, playable))
        if not choices:
            return None
        options.append(choices)
    return options


def find_transposed_options(
    piece: Piece, slots: SlotList, key_offset: int
) -> list[list[TranspositionChoice]] | None:
    """Per-part lists of octave-displaced shifts that some slot can play.

    Returns None as soon as one part has no playable shift at this key offset.
    """
    _check_counts(piece, slots)
    ranges = [part_range(p) for p in piece.parts]
    return _options_for_ranges(ranges, [s.range for s in slots], key_offset)


def validate_arrangement(slot_sets: Sequence[frozenset[int] | set[int]]) -> bool:
    """True if each part can take a distinct slot from its own set.

    Parts are assigned in order by backtracking; results are memoized on
    (part index, slots already taken).
    """
    masks = tuple(sum(1 << j for j in s) for s in slot_sets)
    n = len(masks)
    if n == 0:
        return True

    @cache
    def match(i: int, used: int) -> bool:
        if i == n:
            return True
        free = masks[i] & ~used
        while free:
            bit = free & -free
            if match(i + 1, used | bit):
                return True
            free ^= bit
        return False

    return match(0, 0)


def count_sharps(slots: SlotList, concert_fifths: Fifths) -> int:
    """Total accidentals over all slots' written key signatures.

    This does not depend on which part goes to which slot.
    """
    concert_pc = concert_pc_of_fifths(concert_fifths)
    return sum(abs(major_key_fifths(written_pitch_class(concert_pc, s.key))) for s in slots)


def _iter_selections(
    options: list[list[TranspositionChoice]] | None, n_slots: int, key_offset: int, sharps: int
) -> Iterator[Selection]:
    if options is None:
        return
    everything = frozenset(range(n_slots))
    for combo in itertools.product(*options):
        slot_sets = tuple(c.playable_slots for c in combo)
        if frozenset().union(*slot_sets) != everything:
            continue
        if not validate_arrangement(slot_sets):
            continue
        shifts = tuple(c.total_shift for c in combo)
        yield Selection(key_offset, shifts, slot_sets, sharps, sum(abs(s) for s in shifts))


def run_transposed(piece: Piece, slots: SlotList, key_offset: int) -> list[Selection]:
    """Every combination of per-part shifts at ``key_offset`` that admits a full matching."""
    options = find_transposed_options(piece, slots, key_offset)
    sharps = count_sharps(slots, shifted_key_fifths(piece, key_offset))
    return list(_iter_selections(options, len(slots), key_offset, sharps))


def find_best_choice(piece: Piece, slots: SlotList) -> Selection | None:
    """Pick the key offset with the fewest accidentals, then the least movement.

    Keys are scanned from -6 to 5. A key with more accidentals than the best
    one found so far is not searched at all. Within a key, the first
    combination with minimum deviation wins; across keys, ties go to the
    earlier offset.
    """
    _check_counts(piece, slots)
    ranges = [part_range(p) for p in piece.parts]
    slot_ranges = [s.range for s in slots]
    best: Selection | None = None
    best_sharps = float('inf')
    for key_offset in KEY_OFFSETS:
        sharps = count_sharps(slots, shifted_key_fifths(piece, key_offset))
        if sharps > best_sharps:
            continue
        options = _options_for_ranges(ranges, slot_ranges, key_offset)
        candidate = min(
            _iter_selections(options, len(slots), key_offset, sharps),
            key=lambda s: s.deviation,
            default=None,
        )
        if candidate is None:
            continue
        if sharps < best_sharps or candidate.deviation < best.deviation:
            best = candidate
            best_sharps = sharps
    return best


def assign_parts(piece: Piece, slots: SlotList, best: Selection) -> ArrangementResult:
    """Choose the part-to-slot bijection with the smallest total distance
    between each part's average pitch and its instrument's range midpoint.

    Assignments are explored in lexicographic order of slot indices, so the
    first of several equally good ones is kept. Copies of the same instrument
    are interchangeable and only the lowest free copy is tried.
    """
    _check_counts(piece, slots)
    moved = [transpose_part(p, s) for p, s in zip(piece.parts, best.shifts)]
    ranges = [part_range(p) for p in moved]
    averages = [average_pitch(p) for p in moved]
    n = len(slots)
    # fits[i][j] is None when slot j cannot play part i
    fits = [
        [abs(averages[i] - slots[j].range.median) if ranges[i] in slots[j].range else None for j in range(n)]
        for i in range(n)
    ]

    best_fit = float('inf')
    best_perm: tuple[int, ...] | None = None
    perm: list[int] = []
    used = [False] * n

    def search(i: int, partial: float) -> None:
        nonlocal best_fit, best_perm
        if partial >= best_fit:
            return
        if i == n:
            best_fit, best_perm = partial, tuple(perm)
            return
        for j in range(n):
            cost = fits[i][j]
            if used[j] or cost is None:
                continue
            if any(not used[t] and slots[t] == slots[j] for t in range(j)):
                continue
            used[j] = True
            perm.append(j)
            search(i + 1, partial + cost)
            perm.pop()
            used[j] = False

    search(0, 0.0)
    if best_perm is None:
        raise ValueError('selection admits no valid assignment')
    return ArrangementResult(
        assignment=best_perm,
        shifts=best.shifts,
        key_offset=best.key_offset,
        concert_fifths=shifted_key_fifths(piece, best.key_offset),
        sharps=best.sharps,
        deviation=best.deviation,
        fit=best_fit,
        slots=tuple(slots),
    )


def arrange(piece: Piece, slots: SlotList) -> ArrangementResult | None:
    """Full search; None when no key, octave shifts and assignment fit every part."""
    best = find_best_choice(piece, slots)
    if best is None:
        return None
    return assign_parts(piece, slots, best)

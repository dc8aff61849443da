"""Exhaustive reference arranger, used by the test suite to check the search.

It walks every key offset, every vector of per-part octave moves within
``octave_bound`` and every permutation of slots, with no memoization and
none of the search's shortcuts. It is far too slow for real scores and is
not used by the command-line tool.
"""

from __future__ import annotations

import itertools

from .arranger import ArrangementResult
from .instruments import SlotList
from .pitch import HIGHEST, LOWEST, concert_pc_of_fifths, major_key_fifths, written_pitch_class
from .score import Piece, average_pitch, part_range, transpose_part


def brute_force_arrange(piece: Piece, slots: SlotList, octave_bound: int = 7) -> ArrangementResult | None:
    n = len(piece.parts)
    assert n == len(slots)
    ranges = [part_range(p) for p in piece.parts]
    source_pc = concert_pc_of_fifths(piece.key)
    perms = list(itertools.permutations(range(n)))
    octaves = range(-octave_bound, octave_bound + 1)

    def plays(i: int, shift: int, j: int) -> bool:
        lo, hi = ranges[i].lo + shift, ranges[i].hi + shift
        inst = slots[j].range
        return LOWEST <= lo and hi <= HIGHEST and inst.lo <= lo and hi <= inst.hi

    best = None  # (sharps, deviation, key_offset, shifts, concert fifths)
    best_sharps = None
    for key_offset in range(-6, 6):
        concert_pc = (source_pc + key_offset) % 12
        sharps = 0
        for slot in slots:
            sharps += abs(major_key_fifths(written_pitch_class(concert_pc, slot.key)))
        if best_sharps is not None and sharps > best_sharps:
            continue

        key_best = None  # (deviation, shifts)
        # the lattice bound applies to each part separately
        on_keyboard = [
            [key_offset + 12 * k for k in octaves
             if LOWEST <= r.lo + key_offset + 12 * k and r.hi + key_offset + 12 * k <= HIGHEST]
            for r in ranges
        ]
        for shifts in itertools.product(*on_keyboard):
            deviation = sum(abs(s) for s in shifts)
            if key_best is not None and deviation >= key_best[0]:
                continue
            if any(all(plays(i, shifts[i], perm[i]) for i in range(n)) for perm in perms):
                key_best = (deviation, shifts)

        if key_best is None:
            continue
        if best_sharps is None or sharps < best_sharps or key_best[0] < best[1]:
            best = (sharps, key_best[0], key_offset, key_best[1], major_key_fifths(concert_pc))
            best_sharps = sharps

    if best is None:
        return None
    sharps, deviation, key_offset, shifts, concert_fifths = best
    averages = [average_pitch(transpose_part(p, s)) for p, s in zip(piece.parts, shifts)]
    best_fit, best_perm = None, None
    for perm in perms:
        if not all(plays(i, shifts[i], perm[i]) for i in range(n)):
            continue
        fit = 0.0
        for i in range(n):
            fit += abs(averages[i] - slots[perm[i]].range.median)
        if best_fit is None or fit < best_fit:
            best_fit, best_perm = fit, perm
    return ArrangementResult(
        assignment=tuple(best_perm),
        shifts=shifts,
        key_offset=key_offset,
        concert_fifths=concert_fifths,
        sharps=sharps,
        deviation=deviation,
        fit=best_fit,
        slots=tuple(slots),
    )

"""In-memory score model: monophonic parts made of timed note and rest events."""

from __future__ import annotations

from dataclasses import dataclass, field, replace

from .errors import EmptyPartError, LatticeError, PolyphonyError
from .pitch import HIGHEST, LOWEST, PitchIndex


@dataclass(frozen=True)
class NoteEvent:
    """One note or rest.

    ``duration`` and ``onset`` are in divisions; ``onset`` is measured from
    the start of the measure. Grace notes have ``grace=True`` and zero
    duration; they are carried along but ignored by range statistics.
    """

    pitch: PitchIndex | None
    duration: int
    measure_index: int
    onset: int = 0
    notated_type: str | None = None
    tie_start: bool = False
    tie_stop: bool = False
    grace: bool = False
    chord: bool = False
    voice: str | None = None

    def __post_init__(self):
        if self.duration < 0 or (self.duration == 0 and not self.grace):
            raise ValueError(f'event duration must be positive, got {self.duration}')

    @property
    def is_rest(self) -> bool:
        return self.pitch is None


@dataclass(frozen=True)
class PartRange:
    """Inclusive pitch interval."""

    lo: PitchIndex
    hi: PitchIndex

    def __post_init__(self):
        if self.lo > self.hi:
            raise ValueError(f'range low {self.lo} is above high {self.hi}')

    def __contains__(self, other: PartRange) -> bool:
        return self.lo <= other.lo and other.hi <= self.hi

    def shifted(self, semitones: int) -> PartRange:
        return PartRange(self.lo + semitones, self.hi + semitones)

    @property
    def median(self) -> float:
        return (self.lo + self.hi) / 2

    @property
    def width(self) -> int:
        return self.hi - self.lo


@dataclass(frozen=True)
class Part:
    id: str
    name: str
    events: tuple[NoteEvent, ...]
    measure_count: int

    def notes(self) -> list[NoteEvent]:
        """Sounding, non-grace notes."""
        return [e for e in self.events if e.pitch is not None and not e.grace]


@dataclass(frozen=True)
class Piece:
    divisions: int
    key: int
    time_signature: tuple[int, int] | None
    parts: tuple[Part, ...] = field(default=())


def part_range(part: Part) -> PartRange:
    pitches = [e.pitch for e in part.notes()]
    if not pitches:
        raise EmptyPartError(f'part {part.id!r} ({part.name}) contains no notes')
    return PartRange(min(pitches), max(pitches))


def average_pitch(part: Part) -> float:
    """Unweighted mean pitch index of the part's notes; durations are ignored."""
    pitches = [e.pitch for e in part.notes()]
    if not pitches:
        raise EmptyPartError(f'part {part.id!r} ({part.name}) contains no notes')
    return sum(pitches) / len(pitches)


def _fold_into_lattice(p: int) -> int:
    while p < LOWEST:
        p += 12
    while p > HIGHEST:
        p -= 12
    return p


def transpose_part(part: Part, semitones: int) -> Part:
    """Shift every note of ``part`` by ``semitones``; rhythm is untouched.

    Raises LatticeError if a note would leave A0..C8. Grace notes, which do not
    count toward the range, are folded back onto the keyboard by octaves instead.
    """
    if semitones == 0:
        return part
    events = []
    for e in part.events:
        if e.pitch is None:
            events.append(e)
            continue
        p = e.pitch + semitones
        if e.grace:
            p = _fold_into_lattice(p)
        elif not LOWEST <= p <= HIGHEST:
            raise LatticeError(
                f'part {part.id!r}: shifting pitch {e.pitch} by {semitones} leaves A0..C8'
                f' (measure {e.measure_index + 1})'
            )
        events.append(replace(e, pitch=p))
    return replace(part, events=tuple(events))


def validate_monophonic(part: Part) -> None:
    """Raise PolyphonyError unless the part is a single line of non-overlapping notes."""
    voices = set()
    for e in part.events:
        if e.chord:
            raise PolyphonyError(
                f'part {part.id!r} ({part.name}) has a chord in measure {e.measure_index + 1}'
            )
        if e.voice is not None:
            voices.add(e.voice)
            if len(voices) > 1:
                raise PolyphonyError(
                    f'part {part.id!r} ({part.name}) has more than one voice'
                    f' (measure {e.measure_index + 1})'
                )
    # notes sharing time within a measure
    by_measure: dict[int, list[NoteEvent]] = {}
    for e in part.events:
        if e.pitch is not None and not e.grace:
            by_measure.setdefault(e.measure_index, []).append(e)
    for index, notes in by_measure.items():
        notes = sorted(notes, key=lambda e: e.onset)
        for a, b in zip(notes, notes[1:]):
            if b.onset < a.onset + a.duration:
                raise PolyphonyError(
                    f'part {part.id!r} ({part.name}) has overlapping notes in measure {index + 1}'
                )

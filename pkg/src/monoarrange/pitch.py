"""Pitch arithmetic on the 88-key lattice.

Pitches are plain ints: 1 is A0, 40 is middle C (C4) and 88 is C8.
Pitch classes are ints 0..11 with C = 0. Key signatures are counted in
fifths, positive for sharps and negative for flats.
"""

from __future__ import annotations

import re

from .errors import LatticeError, NoteNameError

PitchIndex = int
PitchClass = int
Fifths = int

LOWEST = 1
HIGHEST = 88

# index 1 (A0) is MIDI note 21
_MIDI_OFFSET = 20

STEP_TO_PC = {'C': 0, 'D': 2, 'E': 4, 'F': 5, 'G': 7, 'A': 9, 'B': 11}
ALTER_OF = {'': 0, '#': 1, '##': 2, 'b': -1, 'bb': -2}
ACCIDENTAL_TEXT = {0: '', 1: '#', 2: '##', -1: 'b', -2: 'bb'}

_SHARP_SPELLING = [
    ('C', 0), ('C', 1), ('D', 0), ('D', 1), ('E', 0), ('F', 0),
    ('F', 1), ('G', 0), ('G', 1), ('A', 0), ('A', 1), ('B', 0),
]
_FLAT_SPELLING = [
    ('C', 0), ('D', -1), ('D', 0), ('E', -1), ('E', 0), ('F', 0),
    ('G', -1), ('G', 0), ('A', -1), ('A', 0), ('B', -1), ('B', 0),
]

_NOTE_RE = re.compile(r'([A-G])(##|bb|#|b)?(-?\d+)')
_PC_RE = re.compile(r'([A-G])(##|bb|#|b)?')


def check_index(p: int) -> PitchIndex:
    if not LOWEST <= p <= HIGHEST:
        raise LatticeError(f'pitch index {p} is outside A0..C8 (1..88)')
    return p


def spelled_index(step: str, alter: int, octave: int) -> int:
    """Position of a spelled pitch on the A0 = 1 scale, without range checking."""
    return 12 * (octave + 1) + STEP_TO_PC[step] + alter - _MIDI_OFFSET


def index_from_spelling(step: str, alter: int, octave: int) -> PitchIndex:
    """Convert a MusicXML-style (step, alter, octave) triple to a pitch index.

    Raises LatticeError when the pitch is not on the piano keyboard.
    """
    return check_index(spelled_index(step, alter, octave))


def parse_note_name(text: str) -> PitchIndex:
    """Parse a name in scientific pitch notation such as ``"Db3"`` or ``"C8"``."""
    m = _NOTE_RE.fullmatch(text.strip())
    if m is None:
        raise NoteNameError(f'malformed note name {text!r}')
    step, acc, octave = m.group(1), m.group(2) or '', int(m.group(3))
    try:
        return index_from_spelling(step, ALTER_OF[acc], octave)
    except LatticeError:
        raise NoteNameError(f'note {text!r} is outside A0..C8') from None


def parse_pitch_class(text: str) -> PitchClass:
    m = _PC_RE.fullmatch(text.strip())
    if m is None:
        raise NoteNameError(f'malformed pitch-class name {text!r}')
    return (STEP_TO_PC[m.group(1)] + ALTER_OF[m.group(2) or '']) % 12


def pitch_class(p: PitchIndex) -> PitchClass:
    return (p + _MIDI_OFFSET) % 12


def spell(p: PitchIndex, fifths: Fifths) -> tuple[str, int, int]:
    """Return ``(step, alter, octave)`` for a pitch, using flats in flat keys
    and sharps otherwise."""
    midi = p + _MIDI_OFFSET
    table = _FLAT_SPELLING if fifths < 0 else _SHARP_SPELLING
    step, alter = table[midi % 12]
    return step, alter, midi // 12 - 1


def format_note_name(p: PitchIndex, fifths: Fifths = 0) -> str:
    step, alter, octave = spell(p, fifths)
    return f'{step}{ACCIDENTAL_TEXT[alter]}{octave}'


def pitch_class_name(pc: PitchClass, fifths: Fifths = 0) -> str:
    step, alter = (_FLAT_SPELLING if fifths < 0 else _SHARP_SPELLING)[pc % 12]
    return step + ACCIDENTAL_TEXT[alter]


def major_key_fifths(pc: PitchClass) -> Fifths:
    """Fifths of the major key on ``pc`` with the fewest accidentals.

    F#/Gb is the only tie; the flat key (-6) wins.
    """
    # 7 is its own inverse mod 12, so stepping back by fifths is another multiply
    f = (7 * pc) % 12
    if f >= 6:
        f -= 12
    return f


def concert_pc_of_fifths(fifths: Fifths) -> PitchClass:
    return (7 * fifths) % 12


def written_pitch_class(sounding: PitchClass, instrument_key: PitchClass) -> PitchClass:
    """Pitch class an instrument in ``instrument_key`` reads to sound ``sounding``."""
    return (sounding - instrument_key) % 12


def written_key_fifths(concert_fifths: Fifths, instrument_key: PitchClass) -> Fifths:
    return major_key_fifths(written_pitch_class(concert_pc_of_fifths(concert_fifths), instrument_key))

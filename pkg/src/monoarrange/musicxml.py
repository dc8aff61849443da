"""Reading and writing score-partwise MusicXML.

Only the elements the arranger needs are modelled (pitch, rest, duration,
type, tie, measure, and the divisions/key/time/clef/transpose attributes).
Everything else stays in the retained element tree and is written back
unchanged, so dynamics, lyrics, slurs and the like survive an arrangement.

Pitches in the loaded :class:`Piece` are always concert (sounding) pitch:
a ``<transpose>`` element on a source part is undone while reading, and a
new one is written for each transposing instrument on output.
"""

from __future__ import annotations

import copy
import math
import xml.etree.ElementTree as ET
from dataclasses import dataclass

from .arranger import ArrangementResult
from .errors import LatticeError, ScoreFormatError
from .instruments import CLEFS, Instrument
from .pitch import (
    HIGHEST,
    LOWEST,
    STEP_TO_PC,
    concert_pc_of_fifths,
    spelled_index,
    major_key_fifths,
    spell,
    written_key_fifths,
)
from .score import NoteEvent, Part, Piece, part_range, transpose_part, validate_monophonic

DOCTYPE = (
    '<!DOCTYPE score-partwise PUBLIC "-//Recordare//DTD MusicXML 3.1 Partwise//EN"'
    ' "http://www.musicxml.org/dtds/partwise.dtd">'
)

# child order inside <attributes> and <note>, as required by the MusicXML schema
_ATTRIBUTES_ORDER = [
    'footnote', 'level', 'divisions', 'key', 'time', 'staves', 'part-symbol',
    'instruments', 'clef', 'staff-details', 'transpose', 'for-part', 'directive',
    'measure-style',
]
_NOTE_ORDER = [
    'grace', 'cue', 'chord', 'pitch', 'unpitched', 'rest', 'duration', 'tie',
    'instrument', 'footnote', 'level', 'voice', 'type', 'dot', 'accidental',
    'time-modification', 'stem', 'notehead', 'notehead-text', 'staff', 'beam',
    'notations', 'lyric', 'play', 'listen',
]
_ACCIDENTAL_NAMES = {-2: 'flat-flat', -1: 'flat', 0: 'natural', 1: 'sharp', 2: 'double-sharp'}
_SHARP_ORDER = 'FCGDAEB'
# steps spanned by an interval of n semitones, ignoring octaves
_DIATONIC_STEPS = [0, 1, 1, 2, 2, 3, 3, 4, 5, 5, 6, 6]


@dataclass
class ScoreDocument:
    """A parsed score plus the element tree it came from.

    The tree keeps every element the model does not interpret so that it
    can be written back out.
    """

    piece: Piece
    tree: ET.Element


def _int_text(el: ET.Element | None, what: str, where: str) -> int | None:
    if el is None or el.text is None:
        return None
    try:
        return int(el.text.strip())
    except ValueError:
        pass
    try:
        return round(float(el.text.strip()))
    except ValueError:
        raise ScoreFormatError(f'{where}: {what} {el.text!r} is not a number') from None


def _transpose_semitones(attributes: ET.Element) -> int | None:
    """Semitones to add to written pitch to get sounding pitch, or None."""
    tr = attributes.find('transpose')
    if tr is None:
        return None
    chromatic = _int_text(tr.find('chromatic'), 'chromatic', 'transpose') or 0
    octave = _int_text(tr.find('octave-change'), 'octave-change', 'transpose') or 0
    return chromatic + 12 * octave


def _concert_fifths(written_fifths: int, to_sounding: int) -> int:
    if to_sounding % 12 == 0:
        return written_fifths
    return major_key_fifths((concert_pc_of_fifths(written_fifths) + to_sounding) % 12)


def _part_names(root: ET.Element) -> dict[str, str]:
    names = {}
    part_list = root.find('part-list')
    if part_list is not None:
        for sp in part_list.findall('score-part'):
            names[sp.get('id', '')] = (sp.findtext('part-name') or '').strip()
    return names


def _all_divisions(root: ET.Element) -> list[int]:
    values = []
    for el in root.iter('divisions'):
        d = _int_text(el, 'divisions', 'attributes')
        if d is None or d <= 0:
            raise ScoreFormatError(f'divisions must be a positive integer, got {el.text!r}')
        values.append(d)
    return values


def _read_part(part_el: ET.Element, name: str, common: int, header: dict) -> Part:
    part_id = part_el.get('id', '?')
    events: list[NoteEvent] = []
    divisions = 1
    to_sounding = 0
    measures = part_el.findall('measure')
    for m_index, measure in enumerate(measures):
        where = f'part {part_id!r} measure {measure.get("number", m_index + 1)}'
        pos = 0
        last_onset = 0
        for child in measure:
            if child.tag == 'attributes':
                d = _int_text(child.find('divisions'), 'divisions', where)
                if d is not None:
                    divisions = d
                t = _transpose_semitones(child)
                if t is not None:
                    to_sounding = t
                key = child.find('key')
                if key is not None and 'key' not in header:
                    fifths = _int_text(key.find('fifths'), 'fifths', where)
                    if fifths is not None:
                        if not -7 <= fifths <= 7:
                            raise ScoreFormatError(f'{where}: key fifths {fifths} outside -7..7')
                        header['key'] = _concert_fifths(fifths, to_sounding)
                time = child.find('time')
                if time is not None and 'time' not in header:
                    try:
                        header['time'] = (int(time.findtext('beats')), int(time.findtext('beat-type')))
                    except (TypeError, ValueError):
                        header['time'] = None
            elif child.tag in ('backup', 'forward'):
                dur = _int_text(child.find('duration'), 'duration', where) or 0
                dur = dur * common // divisions
                pos += dur if child.tag == 'forward' else -dur
            elif child.tag == 'note':
                if child.find('unpitched') is not None:
                    raise ScoreFormatError(f'{where}: unpitched (percussion) notes are not supported')
                grace = child.find('grace') is not None
                chord = child.find('chord') is not None
                dur = _int_text(child.find('duration'), 'duration', where)
                if grace:
                    dur = 0
                elif dur is None or dur <= 0:
                    raise ScoreFormatError(f'{where}: note without a positive duration')
                else:
                    dur = dur * common // divisions
                pitch = None
                pitch_el = child.find('pitch')
                if child.find('rest') is None:
                    if pitch_el is None:
                        raise ScoreFormatError(f'{where}: note has neither pitch nor rest')
                    step = (pitch_el.findtext('step') or '').strip()
                    if step not in STEP_TO_PC:
                        raise ScoreFormatError(f'{where}: bad pitch step {step!r}')
                    alter = _int_text(pitch_el.find('alter'), 'alter', where) or 0
                    octave = _int_text(pitch_el.find('octave'), 'octave', where)
                    if octave is None:
                        raise ScoreFormatError(f'{where}: pitch without octave')
                    pitch = spelled_index(step, alter, octave) + to_sounding
                    if not LOWEST <= pitch <= HIGHEST:
                        raise LatticeError(f'{where}: sounding pitch index {pitch} is outside A0..C8')
                ties = {t.get('type') for t in child.findall('tie')}
                onset = last_onset if chord else pos
                events.append(NoteEvent(
                    pitch=pitch,
                    duration=dur,
                    measure_index=m_index,
                    onset=onset,
                    notated_type=child.findtext('type'),
                    tie_start='start' in ties,
                    tie_stop='stop' in ties,
                    grace=grace,
                    chord=chord,
                    voice=child.findtext('voice'),
                ))
                if not chord:
                    last_onset = pos
                    pos += dur
    part = Part(part_id, name, tuple(events), len(measures))
    validate_monophonic(part)
    part_range(part)  # rejects all-rest parts
    return part


def load_musicxml(data: bytes | str) -> ScoreDocument:
    """Parse an uncompressed score-partwise document."""
    try:
        root = ET.fromstring(data)
    except ET.ParseError as exc:
        raise ScoreFormatError(f'malformed XML: {exc}') from None
    if root.tag == 'score-timewise':
        raise ScoreFormatError('score-timewise documents are not supported; convert to score-partwise')
    if root.tag != 'score-partwise':
        raise ScoreFormatError(f'expected a score-partwise root element, found <{root.tag}>')
    part_els = root.findall('part')
    if not part_els:
        raise ScoreFormatError('the score has no parts')

    common = math.lcm(*_all_divisions(root)) if root.find('.//divisions') is not None else 1
    names = _part_names(root)
    header: dict = {}
    parts = tuple(_read_part(p, names.get(p.get('id', ''), ''), common, header) for p in part_els)
    counts = {p.measure_count for p in parts}
    if len(counts) > 1:
        detail = ', '.join(f'{p.id}: {p.measure_count}' for p in parts)
        raise ScoreFormatError(f'parts have different numbers of measures ({detail})')
    piece = Piece(common, header.get('key', 0), header.get('time'), parts)
    return ScoreDocument(piece, root)


def clef_for(instrument: Instrument) -> str:
    if instrument.clef is not None:
        return instrument.clef
    return 'bass' if instrument.range.median < 40 else 'treble'


def _insert_ordered(parent: ET.Element, child: ET.Element, order: list[str]) -> None:
    rank = order.index(child.tag)
    for i, existing in enumerate(parent):
        if existing.tag in order and order.index(existing.tag) > rank:
            parent.insert(i, child)
            return
    parent.append(child)


def _set_text_child(parent: ET.Element, tag: str, text: str, order: list[str]) -> None:
    el = parent.find(tag)
    if el is None:
        el = ET.Element(tag)
        _insert_ordered(parent, el, order)
    el.text = text


def _transpose_element(written_above: int) -> ET.Element:
    total = -written_above
    octaves = int(total / 12)
    chromatic = total - 12 * octaves
    diatonic = _DIATONIC_STEPS[abs(chromatic)] * (1 if chromatic >= 0 else -1)
    el = ET.Element('transpose')
    ET.SubElement(el, 'diatonic').text = str(diatonic)
    ET.SubElement(el, 'chromatic').text = str(chromatic)
    if octaves:
        ET.SubElement(el, 'octave-change').text = str(octaves)
    return el


def _set_clef(clef_el: ET.Element, clef: str) -> None:
    sign, line = CLEFS[clef]
    for child in list(clef_el):
        clef_el.remove(child)
    ET.SubElement(clef_el, 'sign').text = sign
    ET.SubElement(clef_el, 'line').text = str(line)


def _key_alters(fifths: int) -> dict[str, int]:
    alters = dict.fromkeys(STEP_TO_PC, 0)
    if fifths > 0:
        for step in _SHARP_ORDER[:fifths]:
            alters[step] = 1
    else:
        for step in _SHARP_ORDER[::-1][:-fifths]:
            alters[step] = -1
    return alters


def _rewrite_part(
    part_el: ET.Element, part: Part, shift: int, instrument: Instrument, new_id: str
) -> None:
    """Move ``part_el`` in place to its new sounding pitches, written for ``instrument``."""
    part_el.set('id', new_id)
    sounding = transpose_part(part, shift)
    notes = [n for m in part_el.findall('measure') for n in m.findall('note')]
    assert len(notes) == len(sounding.events)

    source_to_sounding = 0
    # used only when the source part never states a key: it is then C major
    written_fifths = written_key_fifths(major_key_fifths(shift % 12), instrument.key)
    default_fifths = written_fifths
    first_attributes = None
    events = iter(sounding.events)
    for measure in part_el.findall('measure'):
        state: dict[tuple[str, int], int] = {}
        for child in list(measure):
            if child.tag == 'attributes':
                if first_attributes is None:
                    first_attributes = child
                t = _transpose_semitones(child)
                if t is not None:
                    source_to_sounding = t
                for tr in child.findall('transpose'):
                    child.remove(tr)
                key = child.find('key')
                if key is not None and key.find('fifths') is not None:
                    source_fifths = int(key.findtext('fifths'))
                    concert = _concert_fifths(source_fifths, source_to_sounding)
                    concert = major_key_fifths((concert_pc_of_fifths(concert) + shift) % 12)
                    written_fifths = written_key_fifths(concert, instrument.key)
                    # keep the source's enharmonic choice (F# vs Gb) when the key is unchanged
                    if concert_pc_of_fifths(source_fifths) == concert_pc_of_fifths(written_fifths):
                        written_fifths = source_fifths
                    for cancel in key.findall('cancel'):
                        key.remove(cancel)
                    key.find('fifths').text = str(written_fifths)
                    state.clear()
                for clef_el in child.findall('clef'):
                    for extra in clef_el.findall('clef-octave-change'):
                        clef_el.remove(extra)
                    _set_clef(clef_el, clef_for(instrument))
            elif child.tag == 'note':
                event = next(events)
                for inst_ref in child.findall('instrument'):
                    child.remove(inst_ref)
                if event.pitch is None:
                    continue
                step, alter, octave = spell(event.pitch + instrument.transpose, written_fifths)
                pitch_el = child.find('pitch')
                for sub in list(pitch_el):
                    pitch_el.remove(sub)
                ET.SubElement(pitch_el, 'step').text = step
                if alter:
                    ET.SubElement(pitch_el, 'alter').text = str(alter)
                ET.SubElement(pitch_el, 'octave').text = str(octave)

                for acc in child.findall('accidental'):
                    child.remove(acc)
                slot = (step, octave)
                current = state.get(slot, _key_alters(written_fifths)[step])
                if event.tie_stop:
                    continue
                if alter != current:
                    acc = ET.Element('accidental')
                    acc.text = _ACCIDENTAL_NAMES[alter]
                    _insert_ordered(child, acc, _NOTE_ORDER)
                    state[slot] = alter

    if first_attributes is None:
        first_measure = part_el.find('measure')
        first_attributes = ET.Element('attributes')
        first_measure.insert(0, first_attributes)
    if first_attributes.find('clef') is None:
        clef_el = ET.Element('clef')
        _set_clef(clef_el, clef_for(instrument))
        _insert_ordered(first_attributes, clef_el, _ATTRIBUTES_ORDER)
    if first_attributes.find('key') is None:
        key = ET.Element('key')
        ET.SubElement(key, 'fifths').text = str(default_fifths)
        _insert_ordered(first_attributes, key, _ATTRIBUTES_ORDER)
    if instrument.transpose:
        _insert_ordered(first_attributes, _transpose_element(instrument.transpose), _ATTRIBUTES_ORDER)


def save_musicxml(result: ArrangementResult, source: ScoreDocument) -> bytes:
    """Serialize ``result`` as a new score with one part per slot, in slot order.

    Each part is the source part moved to its sounding pitch and written for
    its instrument: written key signature, clef, spelling and accidentals,
    plus a ``<transpose>`` element for transposing instruments.
    """
    root = copy.deepcopy(source.tree)
    part_els = root.findall('part')
    part_list = root.find('part-list')
    score_parts = {sp.get('id'): sp for sp in part_list.findall('score-part')} if part_list is not None else {}

    by_slot = {slot: i for i, slot in enumerate(result.assignment)}
    new_parts = []
    new_score_parts = []
    for j, instrument in enumerate(result.slots):
        i = by_slot[j]
        old_id = part_els[i].get('id')
        new_id = f'P{j + 1}'
        sp = copy.deepcopy(score_parts.get(old_id)) if old_id in score_parts else ET.Element('score-part')
        sp.set('id', new_id)
        for tag in ('part-name-display', 'part-abbreviation', 'part-abbreviation-display',
                    'score-instrument', 'midi-device', 'midi-instrument'):
            for el in sp.findall(tag):
                sp.remove(el)
        name = sp.find('part-name')
        if name is None:
            name = ET.Element('part-name')
            sp.insert(0, name)
        name.text = instrument.display_name
        new_score_parts.append(sp)

        _rewrite_part(part_els[i], source.piece.parts[i], result.shifts[i], instrument, new_id)
        new_parts.append(part_els[i])

    for el in part_els:
        root.remove(el)
    if part_list is None:
        part_list = ET.Element('part-list')
        root.append(part_list)
    for el in list(part_list):
        part_list.remove(el)
    part_list.extend(new_score_parts)
    root.extend(new_parts)

    ET.indent(root)
    body = ET.tostring(root, encoding='unicode')
    return ('<?xml version="1.0" encoding="UTF-8" standalone="no"?>\n' + DOCTYPE + '\n' + body + '\n').encode('utf-8')

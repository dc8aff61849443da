import xml.etree.ElementTree as ET

import pytest
from hypothesis import given, settings, strategies as st

from monoarrange.arranger import ArrangementResult, arrange
from monoarrange.errors import LatticeError, PolyphonyError, ScoreFormatError
from monoarrange.musicxml import clef_for, load_musicxml, save_musicxml
from monoarrange.pitch import format_note_name, parse_note_name, spelled_index

from conftest import make_instrument, musicxml


def identity_result(doc, slots):
    n = len(doc.piece.parts)
    return ArrangementResult(tuple(range(n)), (0,) * n, 0, doc.piece.key, 0, 0, 0.0, tuple(slots))


def written_notes(xml_bytes):
    """(part id, step, alter, octave) for every pitched note in output."""
    root = ET.fromstring(xml_bytes)
    out = []
    for part in root.findall('part'):
        for note in part.iter('note'):
            p = note.find('pitch')
            if p is not None:
                out.append((part.get('id'), p.findtext('step'), int(p.findtext('alter') or 0), int(p.findtext('octave'))))
    return out


def test_load_minimal():
    doc = load_musicxml(musicxml([[[('C4', 4)]]]))
    piece = doc.piece
    assert len(piece.parts) == 1
    [event] = piece.parts[0].events
    assert event.pitch == parse_note_name('C4') == 40
    assert event.duration == 4
    assert piece.key == 0 and piece.time_signature == (4, 4)


def test_load_chorale(chorale_bytes):
    piece = load_musicxml(chorale_bytes).piece
    assert len(piece.parts) == 4
    assert piece.key == -3
    assert [p.name for p in piece.parts] == ['Soprano', 'Alto', 'Tenor', 'Bass']
    assert {p.measure_count for p in piece.parts} == {4}


def test_divisions_rescaled_to_lcm(chorale_bytes):
    piece = load_musicxml(chorale_bytes).piece
    assert piece.divisions == 4
    # quarter notes in every part, whatever the source divisions
    for part in piece.parts:
        assert part.events[0].duration == 4
        for m in range(4):
            assert sum(e.duration for e in part.events if e.measure_index == m) == 16


def test_ties_rests_and_types(chorale_bytes):
    tenor = load_musicxml(chorale_bytes).piece.parts[2]
    tied = [e for e in tenor.events if e.tie_start or e.tie_stop]
    assert [(e.tie_start, e.tie_stop) for e in tied] == [(True, False), (False, True)]
    assert tenor.events[-1].is_rest and tenor.events[-1].notated_type == 'half'


def test_chord_rejected():
    doc = musicxml([[[('C4', 1), ('E4', 1)]]]).replace(b'<note><pitch><step>E', b'<note><chord/><pitch><step>E')
    with pytest.raises(PolyphonyError, match='chord'):
        load_musicxml(doc)


def test_two_voices_rejected():
    doc = musicxml([[[('C4', 4)]]]).replace(
        b'</measure>',
        b'<backup><duration>4</duration></backup><note><pitch><step>E</step><octave>4</octave></pitch>'
        b'<duration>4</duration><voice>2</voice></note></measure>')
    with pytest.raises(PolyphonyError, match='voice'):
        load_musicxml(doc)


def test_malformed_xml():
    with pytest.raises(ScoreFormatError, match='malformed'):
        load_musicxml(b'<score-partwise><part>')


def test_timewise_rejected():
    with pytest.raises(ScoreFormatError, match='timewise'):
        load_musicxml(b'<score-timewise version="3.1"/>')


def test_all_rest_part_rejected():
    from monoarrange.errors import EmptyPartError
    with pytest.raises(EmptyPartError):
        load_musicxml(musicxml([[[(None, 4)]]]))


def test_pitch_off_keyboard():
    doc = musicxml([[[('C4', 4)]]]).replace(b'<octave>4</octave>', b'<octave>9</octave>')
    with pytest.raises(LatticeError, match='measure 1'):
        load_musicxml(doc)


def test_unequal_measure_counts():
    with pytest.raises(ScoreFormatError, match='measures'):
        load_musicxml(musicxml([[[('C4', 4)]], [[('C4', 4)], [('D4', 4)]]]))


def test_transposing_source_read_as_concert():
    doc = musicxml([[[('D4', 4)]]], fifths=2).replace(
        b'</clef>', b'</clef><transpose><diatonic>-1</diatonic><chromatic>-2</chromatic></transpose>')
    piece = load_musicxml(doc).piece
    assert piece.parts[0].events[0].pitch == parse_note_name('C4')
    assert piece.key == 0


def test_identity_save_keeps_sounding_pitch(chorale_bytes):
    doc = load_musicxml(chorale_bytes)
    slots = [make_instrument(1, 88) for _ in range(4)]
    again = load_musicxml(save_musicxml(identity_result(doc, slots), doc)).piece
    for a, b in zip(doc.piece.parts, again.parts):
        assert [(e.pitch, e.duration, e.is_rest, e.measure_index, e.onset) for e in a.events] == \
            [(e.pitch, e.duration, e.is_rest, e.measure_index, e.onset) for e in b.events]
    assert again.key == doc.piece.key


def test_alto_sax_in_concert_eb_reads_c_major():
    doc = load_musicxml(musicxml([[[('Eb4', 2), ('G4', 2)]]], fifths=-3))
    sax = make_instrument(29, 62, key=3, ident='alto-sax')
    result = arrange(doc.piece, (sax,))
    out = ET.fromstring(save_musicxml(result, doc))
    assert out.find('part/measure/attributes/key/fifths').text == '0'
    assert out.findtext('part/measure/attributes/transpose/chromatic') == '-9'
    assert written_notes(save_musicxml(result, doc))[0][1:] == ('C', 0, 5)


def test_written_plus_transpose_is_sounding(chorale_bytes, sax_quartet):
    doc = load_musicxml(chorale_bytes)
    result = arrange(doc.piece, sax_quartet)
    out_bytes = save_musicxml(result, doc)
    root = ET.fromstring(out_bytes)
    by_slot = {slot: i for i, slot in enumerate(result.assignment)}
    for j, part_el in enumerate(root.findall('part')):
        tr = part_el.find('measure/attributes/transpose')
        offset = int(tr.findtext('chromatic')) + 12 * int(tr.findtext('octave-change') or 0)
        assert offset == -sax_quartet[j].transpose
        source = doc.piece.parts[by_slot[j]]
        shift = result.shifts[by_slot[j]]
        expected = [e.pitch + shift for e in source.events if e.pitch is not None]
        got = []
        for note in part_el.iter('note'):
            p = note.find('pitch')
            if p is not None:
                written = spelled_index(p.findtext('step'), int(p.findtext('alter') or 0), int(p.findtext('octave')))
                got.append(written + offset)
        assert got == expected


def test_save_orders_parts_by_slot():
    doc = load_musicxml(musicxml([[[('C4', 4)]], [[('C6', 4)]]]))
    high = make_instrument(55, 75, ident='high')
    low = make_instrument(30, 50, ident='low')
    result = arrange(doc.piece, (high, low))
    assert result.assignment == (1, 0)
    root = ET.fromstring(save_musicxml(result, doc))
    assert [p.get('id') for p in root.findall('part')] == ['P1', 'P2']
    assert [sp.get('id') for sp in root.findall('part-list/score-part')] == ['P1', 'P2']
    notes = written_notes(save_musicxml(result, doc))
    assert notes == [('P1', 'C', 0, 6), ('P2', 'C', 0, 4)]


def test_clef_rule():
    assert clef_for(make_instrument(20, 50)) == 'bass'
    assert clef_for(make_instrument(35, 50)) == 'treble'
    assert clef_for(make_instrument(20, 50, clef='alto')) == 'alto'


def test_clefs_and_names_written(chorale_bytes, sax_quartet):
    doc = load_musicxml(chorale_bytes)
    root = ET.fromstring(save_musicxml(arrange(doc.piece, sax_quartet), doc))
    names = [sp.findtext('part-name') for sp in root.findall('part-list/score-part')]
    assert names == ['SopranoSaxophone', 'AltoSaxophone', 'TenorSaxophone', 'BaritoneSaxophone']
    for part in root.findall('part'):
        clef = part.find('measure/attributes/clef')
        assert (clef.findtext('sign'), clef.findtext('line')) == ('G', '2')
        assert clef.find('clef-octave-change') is None
    assert root.find('.//score-instrument') is None


def test_annotations_carried_through(chorale_bytes, sax_quartet):
    doc = load_musicxml(chorale_bytes)
    out = save_musicxml(arrange(doc.piece, sax_quartet), doc)
    root = ET.fromstring(out)
    assert root.findtext('work/work-title') == 'Test Chorale'
    assert root.find('.//dynamics/mf') is not None
    assert root.findtext('.//lyric/text') == 'Lo'
    assert len(root.findall('.//notations/tied')) == 2


def test_accidentals_follow_written_key():
    # concert C major, a C#/C pair in one bar needs a sharp then a natural
    doc = load_musicxml(musicxml([[[('C#4', 1), ('C4', 1), ('D4', 1), ('Bb4', 1)]]], fifths=0))
    result = arrange(doc.piece, (make_instrument(30, 60),))
    root = ET.fromstring(save_musicxml(result, doc))
    accidentals = [n.findtext('accidental') for n in root.iter('note')]
    assert accidentals == ['sharp', 'natural', None, 'sharp']


def test_save_is_deterministic(chorale_bytes, sax_quartet):
    doc = load_musicxml(chorale_bytes)
    result = arrange(doc.piece, sax_quartet)
    assert save_musicxml(result, doc) == save_musicxml(result, load_musicxml(chorale_bytes))


def test_rhythm_preserved_after_arrangement(chorale_bytes, sax_quartet):
    doc = load_musicxml(chorale_bytes)
    result = arrange(doc.piece, sax_quartet)
    out = load_musicxml(save_musicxml(result, doc)).piece
    for i, part in enumerate(doc.piece.parts):
        matched = out.parts[result.assignment[i]]
        assert matched.measure_count == part.measure_count
        assert [(e.duration, e.is_rest, e.measure_index) for e in matched.events] == \
            [(e.duration, e.is_rest, e.measure_index) for e in part.events]
        assert [e.pitch for e in matched.notes()] == [e.pitch + result.shifts[i] for e in part.notes()]


def test_mid_piece_key_change_is_transposed():
    source = musicxml([[[('C4', 4)], [('D4', 4)]]], fifths=0).replace(
        b'<measure number="2">', b'<measure number="2"><attributes><key><fifths>2</fifths></key></attributes>')
    doc = load_musicxml(source)
    clarinet = make_instrument(26, 74, key=10, ident='clarinet')
    result = arrange(doc.piece, (clarinet,))
    root = ET.fromstring(save_musicxml(result, doc))
    keys = [int(k.findtext('fifths')) for k in root.iter('key')]
    # moved down a tone so the clarinet reads C major; the change to D major then reads as D
    assert result.key_offset == -2
    assert keys == [0, 2]


def test_grace_note_carried_and_shifted():
    source = musicxml([[[('C4', 4)]]]).replace(
        b'<note><pitch>', b'<note><grace/><pitch><step>B</step><octave>3</octave></pitch><voice>1</voice></note><note><pitch>', 1)
    doc = load_musicxml(source)
    events = doc.piece.parts[0].events
    assert events[0].grace and events[0].duration == 0
    result = arrange(doc.piece, (make_instrument(52, 60),))
    back = load_musicxml(save_musicxml(result, doc)).piece.parts[0].events
    assert [e.pitch for e in back] == [e.pitch + result.shifts[0] for e in events]


notes = st.tuples(st.one_of(st.none(), st.integers(1, 88)), st.sampled_from([1, 2, 3, 4]))


@settings(max_examples=40, deadline=None)
@given(st.lists(st.lists(notes, min_size=1, max_size=5), min_size=1, max_size=4).filter(
    lambda ms: any(p is not None for m in ms for p, _ in m)),
    st.integers(-7, 7), st.sampled_from([1, 2, 3]))
def test_identity_roundtrip_property(measures, fifths, divisions):
    named = [[(format_note_name(p, fifths) if p else None, d * divisions) for p, d in m] for m in measures]
    doc = load_musicxml(musicxml([named], fifths=fifths, divisions=divisions))
    result = identity_result(doc, [make_instrument(1, 88)])
    back = load_musicxml(save_musicxml(result, doc)).piece
    assert back.parts[0].events == doc.piece.parts[0].events
    assert back.key == doc.piece.key

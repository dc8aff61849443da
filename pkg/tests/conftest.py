import random
from pathlib import Path

import pytest

from monoarrange.instruments import Instrument, load_catalog
from monoarrange.pitch import parse_note_name, spell
from monoarrange.score import NoteEvent, Part, PartRange, Piece

DATA = Path(__file__).parent / 'data'


def make_part(pitches, part_id='P1', per_measure=4):
    """Part of quarter notes (divisions 1); ``None`` entries are rests."""
    events = tuple(
        NoteEvent(pitch=p, duration=1, measure_index=i // per_measure, onset=i % per_measure)
        for i, p in enumerate(pitches)
    )
    return Part(part_id, part_id, events, max(1, -(-len(pitches) // per_measure)))


def make_piece(*parts, key=0):
    parts = tuple(
        make_part(p, f'P{i + 1}') if not isinstance(p, Part) else p for i, p in enumerate(parts)
    )
    return Piece(divisions=1, key=key, time_signature=(4, 4), parts=parts)


def make_instrument(lo, hi, key=0, ident=None, clef=None):
    return Instrument(ident or f'inst-{lo}-{hi}-{key}', 'Test', PartRange(lo, hi), key, clef, (12 - key) % 12)


def musicxml(parts, fifths=0, divisions=1, time=(4, 4), extra_note_xml=None):
    """Build a score-partwise document.

    ``parts`` is a list of measures per part; each measure is a list of
    ``(name_or_None, duration)`` tuples. A name of None is a rest.
    """
    out = ['<?xml version="1.0" encoding="UTF-8"?>', '<score-partwise version="3.1">', '<part-list>']
    for i in range(len(parts)):
        out.append(f'<score-part id="P{i + 1}"><part-name>Part {i + 1}</part-name></score-part>')
    out.append('</part-list>')
    for i, measures in enumerate(parts):
        out.append(f'<part id="P{i + 1}">')
        for m, notes in enumerate(measures):
            out.append(f'<measure number="{m + 1}">')
            if m == 0:
                out.append(
                    f'<attributes><divisions>{divisions}</divisions><key><fifths>{fifths}</fifths></key>'
                    f'<time><beats>{time[0]}</beats><beat-type>{time[1]}</beat-type></time>'
                    '<clef><sign>G</sign><line>2</line></clef></attributes>'
                )
            for name, dur in notes:
                if name is None:
                    out.append(f'<note><rest/><duration>{dur}</duration><voice>1</voice></note>')
                    continue
                step, alter, octave = spell(parse_note_name(name), -1 if 'b' in name[1:] else 1)
                alter_xml = f'<alter>{alter}</alter>' if alter else ''
                extra = extra_note_xml or ''
                out.append(
                    f'<note><pitch><step>{step}</step>{alter_xml}<octave>{octave}</octave></pitch>'
                    f'<duration>{dur}</duration><voice>1</voice>{extra}</note>'
                )
            out.append('</measure>')
        out.append('</part>')
    out.append('</score-partwise>')
    return '\n'.join(out).encode()


@pytest.fixture
def chorale_bytes():
    return (DATA / 'chorale.musicxml').read_bytes()


@pytest.fixture
def catalog():
    return load_catalog()


@pytest.fixture
def sax_quartet(catalog):
    return tuple(catalog[k] for k in ('soprano-sax', 'alto-sax', 'tenor-sax', 'baritone-sax'))


def random_instance(rng: random.Random, max_parts=4, max_notes=8, keys=(0, 0, 10, 3, 5, 7)):
    """Random small arrangement problem, as used by the oracle comparisons."""
    n = rng.randint(1, max_parts)
    parts = []
    for i in range(n):
        center = rng.randint(15, 75)
        parts.append([max(1, min(88, center + rng.randint(-9, 9))) for _ in range(rng.randint(1, max_notes))])
    pool = []
    for j in range(rng.randint(1, 3)):
        width = rng.randint(12, 36)
        lo = rng.randint(1, 88 - width)
        pool.append(make_instrument(lo, lo + width, rng.choice(keys), ident=f'i{j}'))
    slots = tuple(rng.choice(pool) for _ in range(n))
    return make_piece(*parts, key=rng.randint(-6, 6)), slots


ACCEPTANCE_LINES: list[str] = []


@pytest.fixture
def criterion():
    """Record a one-line PASS/FAIL verdict for an acceptance criterion, then assert it."""
    def report(number, title, ok, detail=''):
        line = f'criterion {number} {"PASS" if ok else "FAIL"}: {title}' + (f' ({detail})' if detail else '')
        ACCEPTANCE_LINES.append(line)
        print(line)
        assert ok, line
    return report


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section('acceptance criteria')
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)

"""Instrument catalog and arrangement request loading.

The catalog is a TOML file with one table per instrument::

    [alto-sax]
    name = "AltoSaxophone"
    minimum = "Db3"
    maximum = "Bb5"
    key = "Eb"

``minimum``/``maximum`` are sounding pitches. Two optional keys extend the
format: ``clef`` ("treble", "bass", "alto" or "tenor") and ``transpose``, the
number of semitones the written part sits above the sounding pitch (for
example 14 for a tenor saxophone). Without ``transpose`` the smallest upward
interval consistent with ``key`` is used.

The arrangement request is a flat table of ``instrument-id = count`` pairs.
"""

from __future__ import annotations

import sys
from dataclasses import dataclass
from importlib import resources
from pathlib import Path

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib

from .errors import ConfigError, NoteNameError
from .pitch import PitchClass, parse_note_name, parse_pitch_class
from .score import PartRange

CLEFS = {'treble': ('G', 2), 'bass': ('F', 4), 'alto': ('C', 3), 'tenor': ('C', 4)}


@dataclass(frozen=True)
class Instrument:
    id: str
    display_name: str
    range: PartRange
    key: PitchClass
    clef: str | None = None
    transpose: int = 0

    @property
    def is_transposing(self) -> bool:
        return self.transpose != 0


SlotList = tuple[Instrument, ...]


def _parse_toml(text: str, source: str) -> dict:
    try:
        return tomllib.loads(text)
    except tomllib.TOMLDecodeError as exc:
        raise ConfigError(f'{source}: invalid TOML: {exc}') from None


def _instrument_from_table(ident: str, table, source: str) -> Instrument:
    if not isinstance(table, dict):
        raise ConfigError(f'{source}: entry {ident!r} must be a table')
    missing = [k for k in ('name', 'minimum', 'maximum', 'key') if k not in table]
    if missing:
        raise ConfigError(f'{source}: instrument {ident!r} is missing {", ".join(missing)}')
    try:
        lo = parse_note_name(str(table['minimum']))
        hi = parse_note_name(str(table['maximum']))
        key = parse_pitch_class(str(table['key']))
    except NoteNameError as exc:
        raise ConfigError(f'{source}: instrument {ident!r}: {exc}') from None
    if lo > hi:
        raise ConfigError(
            f'{source}: instrument {ident!r} has minimum {table["minimum"]} above maximum {table["maximum"]}'
        )
    clef = table.get('clef')
    if clef is not None and clef not in CLEFS:
        raise ConfigError(f'{source}: instrument {ident!r} has unknown clef {clef!r}')
    transpose = table.get('transpose', (12 - key) % 12)
    if not isinstance(transpose, int) or (transpose + key) % 12 != 0:
        raise ConfigError(
            f'{source}: instrument {ident!r}: transpose {transpose!r} does not match key {table["key"]!r}'
        )
    return Instrument(ident, str(table['name']), PartRange(lo, hi), key, clef, transpose)


def load_instrument_metadata(text: str, source: str = 'instrument catalog') -> dict[str, Instrument]:
    data = _parse_toml(text, source)
    return {ident: _instrument_from_table(ident, table, source) for ident, table in data.items()}


def load_arrangement(text: str, catalog: dict[str, Instrument], source: str = 'arrangement') -> SlotList:
    """Expand an ``id = count`` request into one slot per instrument copy, in file order."""
    data = _parse_toml(text, source)
    if not data:
        raise ConfigError(f'{source}: no instruments listed')
    slots: list[Instrument] = []
    for ident, count in data.items():
        if ident not in catalog:
            raise ConfigError(f'{source}: unknown instrument {ident!r}')
        if isinstance(count, bool) or not isinstance(count, int) or count < 1:
            raise ConfigError(f'{source}: count for {ident!r} must be a positive integer, got {count!r}')
        slots.extend([catalog[ident]] * count)
    return tuple(slots)


def default_catalog_text() -> str:
    return resources.files('monoarrange').joinpath('data/instruments.toml').read_text(encoding='utf-8')


def load_catalog(path: str | Path | None = None) -> dict[str, Instrument]:
    """Load a catalog file, or the bundled one when ``path`` is None."""
    if path is None:
        return load_instrument_metadata(default_catalog_text(), 'bundled instrument catalog')
    path = Path(path)
    try:
        text = path.read_text(encoding='utf-8')
    except OSError as exc:
        raise ConfigError(f'{path}: {exc.strerror}') from None
    return load_instrument_metadata(text, str(path))

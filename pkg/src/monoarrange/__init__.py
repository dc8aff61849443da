"""Re-arrange pieces written for monophonic parts for a different set of instruments."""

from .arranger import ArrangementResult, Selection, arrange
from .errors import ArrangeError
from .instruments import Instrument, load_arrangement, load_catalog, load_instrument_metadata
from .musicxml import ScoreDocument, load_musicxml, save_musicxml
from .score import NoteEvent, Part, PartRange, Piece

__all__ = [
    'ArrangeError',
    'ArrangementResult',
    'Instrument',
    'NoteEvent',
    'Part',
    'PartRange',
    'Piece',
    'ScoreDocument',
    'Selection',
    'arrange',
    'load_arrangement',
    'load_catalog',
    'load_instrument_metadata',
    'load_musicxml',
    'save_musicxml',
]

"""Exception types raised by the arrangement toolkit."""


class ArrangeError(Exception):
    """Base class for every error this package raises on bad input."""


class NoteNameError(ArrangeError, ValueError):
    """A note or pitch-class name could not be parsed."""


class LatticeError(ArrangeError, ValueError):
    """A pitch fell outside the 88-key range A0..C8."""


class EmptyPartError(ArrangeError):
    """A part contains only rests, so it has no range or average pitch."""


class PolyphonyError(ArrangeError):
    """A part contains chords or more than one voice."""


class ScoreFormatError(ArrangeError):
    """The MusicXML document is malformed or uses an unsupported layout."""


class ConfigError(ArrangeError):
    """An instrument catalog or arrangement request file is invalid."""


class CountMismatchError(ArrangeError):
    """The number of instrument slots differs from the number of parts."""

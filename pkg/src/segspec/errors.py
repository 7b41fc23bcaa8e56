"""Exception hierarchy shared by every segspec module."""


class SegspecError(Exception):
    """Base class for all errors raised by segspec."""


class MalformedWav(SegspecError, ValueError):
    """RIFF/WAVE container is damaged or truncated."""


class UnsupportedFormat(SegspecError, ValueError):
    """WAV file is valid but not PCM16 mono."""


class InvalidSpec(SegspecError, ValueError):
    """Synthesis parameters violate their declared ranges."""


class InvalidParams(SegspecError, ValueError):
    pass


class InvalidOrder(SegspecError, ValueError):
    pass


class InvalidThreshold(SegspecError, ValueError):
    pass


class TooShort(SegspecError, ValueError):
    """Signal holds fewer samples than a single analysis frame."""


class EmptySegment(SegspecError, ValueError):
    """A segment policy resolved to an empty sample range."""


class EmptySeries(SegspecError, ValueError):
    pass


class EmptyManifest(SegspecError, ValueError):
    pass


class EmptyEval(SegspecError, ValueError):
    pass


class TooFewRows(SegspecError, ValueError):
    pass


class DegenerateSplit(SegspecError, ValueError):
    """Train/eval split leaves a class or the eval set empty."""


class ParseError(SegspecError, ValueError):
    pass


class IoError(SegspecError, OSError):
    """A file could not be read or written."""

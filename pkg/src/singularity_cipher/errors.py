"""Exception hierarchy shared by all layers."""


class CipherError(ValueError):
    """Base class for every error raised by the package."""


class EmptyPassphrase(CipherError):
    pass


class Oversize(CipherError):
    pass


class MalformedHeader(CipherError):
    pass


class LengthMismatch(CipherError):
    pass


class DegeneratePolygon(CipherError):
    pass


class InsufficientData(CipherError):
    pass


class DecodeError(CipherError):
    """Raised when a cipher image cannot be turned back into bytes."""


class MalformedDocument(DecodeError):
    pass


class OrphanPolygon(MalformedDocument):
    pass


class EmptyImage(MalformedDocument):
    pass


class AmbiguousCell(DecodeError):
    pass


class FramingError(DecodeError):
    pass

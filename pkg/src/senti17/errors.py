"""Exception hierarchy shared by every senti17 module."""


class Senti17Error(Exception):
    """Base class for all toolkit errors."""


class DataError(Senti17Error, ValueError):
    """Bad input data: malformed files, unknown labels, inconsistent shapes."""


class ShapeError(Senti17Error, ValueError):
    """Tensor shapes do not agree with the layer they are fed to."""


class ModelFormatError(DataError):
    """A model file could not be decoded."""


class NotAModelFileError(ModelFormatError):
    pass


class UnsupportedVersionError(ModelFormatError):
    pass


class TruncatedModelError(ModelFormatError):
    pass


class SelectionError(Senti17Error):
    """Not enough mutually diverse candidates to fill the ensemble."""

    def __init__(self, message, selectable):
        super().__init__(message)
        self.selectable = selectable

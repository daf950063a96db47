"""Exception types raised across the package."""


class TaxelGridError(Exception):
    """Base class for all errors raised by this package."""


class LayoutError(TaxelGridError):
    """Electrode layout violates its invariants or cannot be parsed."""


class ZeroVariance(TaxelGridError):
    """All 24 electrode values are equal; z-scoring a no-contact reading."""


class ShapeMismatch(TaxelGridError):
    """Array shapes disagree with what the operation requires."""


class NoElectrodes(TaxelGridError):
    """Gap filling cannot converge on an image with zero electrode cells."""


class AngleOutOfRange(TaxelGridError):
    """Rotation angle outside the permitted [-10, 10] degree window."""


class EmptyDataset(TaxelGridError):
    """Training requires at least one sample."""


class SingleClass(TaxelGridError):
    """Training requires both classes to be present."""


class EmptyEvaluation(TaxelGridError):
    """Metrics require at least one evaluated sample."""


class KTooLarge(TaxelGridError):
    """More cross-validation folds requested than samples available."""


class TooFewObjects(TaxelGridError):
    """Holdout split requested more unknown objects than the dataset has."""


class ConfigInvalid(TaxelGridError):
    """Experiment or CLI configuration failed validation."""


class ParseError(TaxelGridError):
    """A file could not be parsed. Carries a line number when known."""

    def __init__(self, message, line=None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class BadLabel(ParseError):
    """Dataset row carries a label outside {stable, slippery}."""


class BadColumnCount(ParseError):
    """Dataset row does not have exactly 76 data columns."""


class VersionMismatch(TaxelGridError):
    """Serialized model was written with an unsupported format version."""

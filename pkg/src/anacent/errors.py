"""Exception types shared across the package."""


class AnacentError(Exception):
    """Base class for all package-specific errors."""


class LoadError(AnacentError):
    """A document, taxonomy, or category file failed to parse or validate."""

    def __init__(self, message, path=None, line=None):
        self.path = path
        self.line = line
        prefix = ""
        if path is not None:
            prefix = f"{path}:"
            if line is not None:
                prefix += f"{line}:"
            prefix += " "
        super().__init__(prefix + message)


class UnknownIdentifierError(AnacentError, KeyError):
    """Lookup of a category, concept, instance, or tree position failed."""

    def __str__(self):
        # KeyError quotes its argument; keep the plain message.
        return self.args[0] if self.args else ""


class ProcessingError(AnacentError):
    """The engine could not continue (fan-out, dead readings, protocol misuse)."""


class ConsumptionError(AnacentError):
    """An antecedent was missing from the Cf list or consumed twice."""


class DiscourseError(AnacentError):
    """Sentence commit failed because no reading survived."""

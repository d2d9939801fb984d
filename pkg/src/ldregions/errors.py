"""Exception types shared across the toolkit."""


class ToolkitError(Exception):
    """Base class for all errors raised by this package."""


class ParseError(ToolkitError):
    """A line of N-Triples input could not be parsed (strict mode only)."""

    def __init__(self, line_no: int, reason: str):
        super().__init__(f"line {line_no}: {reason}")
        self.line_no = line_no
        self.reason = reason


class BlankNodeSubjectError(ParseError):
    """A statement uses a blank node in subject position."""

    def __init__(self, line_no: int):
        super().__init__(line_no, "blank node subject is not supported")


class NotPresentError(ToolkitError):
    """A resource IRI is not a subject of the dataset version it was looked up in."""


class MissingDeletedTripleError(ToolkitError):
    """A changeset deletes a triple that the source version does not contain."""


class VersionChainBrokenError(ToolkitError):
    """Changeset version labels do not chain the supplied version sequence."""


class BadBoundariesError(ToolkitError):
    """Region bin boundaries violate 0 < t1 < t2 < 1."""


class BadConfigError(ToolkitError):
    """A configuration value violates its documented constraints."""


class BadWarmupError(ToolkitError):
    """The warmup setting is invalid for the requested simulation."""


class GoldStandardError(ToolkitError):
    """Base class for gold standard file problems."""


class MalformedGoldLineError(GoldStandardError):
    def __init__(self, line_no: int, reason: str):
        super().__init__(f"line {line_no}: {reason}")
        self.line_no = line_no


class DuplicateMappingError(GoldStandardError):
    def __init__(self, iri: str):
        super().__init__(f"duplicate mapping for {iri}")
        self.iri = iri

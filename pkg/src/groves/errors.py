"""Exception types shared across the toolkit."""


class GrovesError(Exception):
    """Base class for all toolkit errors."""


class ContractViolation(GrovesError):
    """An operation was called with inputs that break its preconditions."""


class TotalityError(ContractViolation):
    """A tabulated redistribution does not cover every key of its grid."""


class DeficitInputError(GrovesError):
    """A transform that requires a non-deficit input was given one that runs a deficit.

    Carries the offending type profile.
    """

    def __init__(self, witness):
        super().__init__(f"input mechanism runs a deficit at profile {witness}")
        self.witness = witness


class SpecFileError(GrovesError):
    """A mechanism spec file failed to parse or validate.

    `location` is a dotted path into the JSON document (e.g.
    ``redistribution.table[3].key``).
    """

    def __init__(self, message, location=""):
        self.location = location
        prefix = f"{location}: " if location else ""
        super().__init__(prefix + message)

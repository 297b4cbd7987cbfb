"""Exception hierarchy.

Every error carries the CLI exit code of the stage it belongs to, so the
command layer can map failures without a lookup table.
"""


class ShockRampError(Exception):
    exit_code = 1


class ConfigError(ShockRampError):
    exit_code = 1


# -- ingestion (exit 2) -----------------------------------------------------

class IngestError(ShockRampError):
    exit_code = 2


class NonMonotonicTime(IngestError):
    pass


class TooFewSamples(IngestError):
    pass


class NonFiniteSample(IngestError):
    pass


class NegativeVelocity(IngestError):
    pass


class ParseError(IngestError):
    def __init__(self, message, line=None):
        super().__init__(message if line is None else f"line {line}: {message}")
        self.line = line


class MissingThickness(IngestError):
    pass


class NonOverlappingRange(IngestError):
    pass


# -- convergence (exit 3) ---------------------------------------------------

class NotConverged(ShockRampError):
    exit_code = 3

    def __init__(self, message, state=None):
        super().__init__(message)
        self.state = state


class TangledNet(ShockRampError):
    exit_code = 3


class DegenerateFit(ShockRampError):
    exit_code = 3


# -- shock treatment (exit 4) -----------------------------------------------

class ShockTreatmentError(ShockRampError):
    exit_code = 4


class NoJumpDetected(ShockTreatmentError):
    pass


class TwoWaveStructure(ShockTreatmentError):
    pass


class InconsistentBreakouts(ShockTreatmentError):
    pass


class HugoniotOutOfRange(ShockTreatmentError):
    pass


class NoStiffeningRoot(ShockTreatmentError):
    pass


class NoSignChange(ShockTreatmentError):
    def __init__(self, message, g_lo=None, g_hi=None):
        super().__init__(message)
        self.g_lo = g_lo
        self.g_hi = g_hi


class BreakoutMismatch(ShockTreatmentError):
    pass


class AnchorOutsideRelation(ShockTreatmentError):
    pass


class RangeNotCovered(ShockRampError):
    exit_code = 2


# -- oracle (exit 5) --------------------------------------------------------

class OracleError(ShockRampError):
    exit_code = 5


class UnstableStep(OracleError):
    def __init__(self, message, last_good=None):
        super().__init__(message)
        self.last_good = last_good


class ShockFormation(OracleError):
    pass


class DriveReflection(OracleError):
    """A reflected wave reached the drive surface inside the forward window."""


class StationInReleaseZone(OracleError):
    pass

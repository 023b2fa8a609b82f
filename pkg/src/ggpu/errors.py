"""Exception hierarchy shared by all ggpu modules."""


class GgpuError(Exception):
    """Base class for all domain errors (CLI maps these to exit code 1)."""


class ConfigError(GgpuError):
    """Architectural parameter outside its allowed range."""


class RangeError(GgpuError):
    """Memory spec or numeric argument outside the supported range."""


class UnknownIdError(GgpuError):
    """Reference to a memory, net or stage id that does not exist."""


class LegalityError(GgpuError):
    """Transform that is structurally illegal on the given design."""


class StructuralError(GgpuError):
    """Design graph malformed (e.g. combinational cycle)."""


class StateError(GgpuError):
    """Operation invoked on an object in the wrong state (uncalibrated
    params, empty timing graph, ...)."""


class CalibrationError(GgpuError):
    """Calibration input rows inconsistent with the reference inventory."""


class ReplayError(GgpuError):
    """Transform log step not applicable during replay."""

    def __init__(self, sequence_no: int, message: str):
        super().__init__(f"step {sequence_no}: {message}")
        self.sequence_no = sequence_no


class ParseError(GgpuError):
    """Malformed interchange document."""

    def __init__(self, message: str, line: int | None = None, field: str | None = None):
        loc = []
        if line is not None:
            loc.append(f"line {line}")
        if field is not None:
            loc.append(f"field '{field}'")
        suffix = f" ({', '.join(loc)})" if loc else ""
        super().__init__(message + suffix)
        self.line = line
        self.field = field

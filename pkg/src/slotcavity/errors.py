"""Exception hierarchy shared by every module."""


class SlotCavityError(Exception):
    """Base class for all errors raised by slotcavity."""


class InvalidGeometry(SlotCavityError, ValueError):
    pass


class GeometryTooLarge(InvalidGeometry):
    pass


class InvalidBridge(InvalidGeometry):
    pass


class InvalidMesh(InvalidGeometry):
    pass


class NumericalError(SlotCavityError):
    """Raised when a computation runs but produces no usable answer."""


class NoGuidedMode(NumericalError):
    pass


class NotConverged(NumericalError):
    pass


class NoQuasiTeMode(NumericalError):
    pass


class ZeroField(NumericalError):
    pass


class LeakyMode(NumericalError):
    pass


class PointOutsideDomain(SlotCavityError, ValueError):
    pass


class ModeCutoff(NumericalError):
    pass


class NoResonanceFound(NumericalError):
    pass


class DegenerateCavity(SlotCavityError, ValueError):
    pass


class AllCellsFailed(NumericalError):
    pass


class UnknownEmitter(SlotCavityError, KeyError):
    pass


class ParameterRequired(SlotCavityError, ValueError):
    """An emitter parameter the calculation needs has not been supplied."""


class ConfigError(SlotCavityError, ValueError):
    pass

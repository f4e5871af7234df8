"""Exception types shared across the toolkit."""


class CooktwinError(Exception):
    """Base class for all toolkit errors."""


class ConfigError(CooktwinError):
    """Invalid or unparseable scenario configuration."""


class MeshError(CooktwinError):
    """Invalid mesh specification or out-of-domain query."""


class ConvergenceError(CooktwinError):
    """Outer (segregated) iteration failed to reach the residual threshold.

    Carries the residual history of the failed step for diagnosis.
    """

    def __init__(self, message, history=None, time=None):
        super().__init__(message)
        self.history = history or []
        self.time = time


class LinearSolverError(CooktwinError):
    """Inner linear solve failed to meet the reduction contract."""


class OscillatoryConvergenceError(CooktwinError):
    """Grid-study solution differences change sign between refinements."""


class RomTrainingError(CooktwinError):
    """Degenerate or rank-deficient identification problem."""


class RomDivergenceError(CooktwinError):
    """Reduced-order rollout produced a non-finite output.

    Carries the time stamp at which the rollout was aborted.
    """

    def __init__(self, message, time=None):
        super().__init__(message)
        self.time = time

"""Exception types shared across the package."""

import numpy as np


class NumericalFailure(RuntimeError):
    """A numerical operation produced a non-finite value.

    Carries the integration step index, the time node and the offending
    state so a failed run can be diagnosed from the exception alone.
    """

    def __init__(self, message: str, step: int | None = None,
                 t: float | None = None, state=None):
        super().__init__(message)
        self.step = step
        self.t = t
        self.state = None if state is None else np.asarray(state)


class DegenerateInput(ValueError):
    """Input data is degenerate for the requested statistic (e.g. all
    pooled points identical so no kernel bandwidth exists)."""

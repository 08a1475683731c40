"""Sample batches: an n-by-d matrix plus the seed and metadata that produced it."""

from dataclasses import dataclass, field

import numpy as np


@dataclass(frozen=True)
class SampleBatch:
    """n samples of dimension d with generation provenance.

    data is an (n, d) float array; meta holds free-form strings such as the
    sampler name and a config summary. All entries must be finite.
    """

    data: np.ndarray
    seed: int
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        data = np.atleast_2d(np.asarray(self.data, dtype=float))
        if not np.all(np.isfinite(data)):
            raise ValueError("SampleBatch requires finite entries")
        data.setflags(write=False)
        object.__setattr__(self, "data", data)

    @property
    def n(self) -> int:
        return self.data.shape[0]

    @property
    def dim(self) -> int:
        return self.data.shape[1]

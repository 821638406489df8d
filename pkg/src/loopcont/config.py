"""Numerical defaults shared by every module.

All tolerances that have no canonical value live here so the CLI can expose
and override them in one place.
"""
from dataclasses import dataclass, asdict, fields, replace


@dataclass(frozen=True)
class Tolerances:
    manifold: float = 1e-10      # |sum z_j^2 - 1| for points "on" the quadric
    real_locus: float = 1e-9     # kappa <= this counts as lying on K
    cut: float = 1e-8            # distance of g(w) to the negative real axis
    spec: float = 1e-9           # holomorphy / truncation defect budget
    overlap: float = 1e-6        # chain overlap residual budget
    zero: float = 1e-8           # minimum norm of a cover point
    lift: float = 1e-10          # centre reproduction of a regular lift
    cont: float = 0.5            # sup-distance allowed between consecutive curve samples

    def as_dict(self):
        return asdict(self)

    def updated(self, **changes):
        return replace(self, **changes)

    @classmethod
    def field_names(cls):
        return [f.name for f in fields(cls)]


DEFAULT = Tolerances()

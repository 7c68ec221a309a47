"""Shared numeric tolerances.

Every feasibility/optimality comparison in the package derives from a single
base epsilon so the CLI flag --eps (or the SVF_EPS environment variable) can
widen or tighten all checks coherently.
"""

from __future__ import annotations

from dataclasses import dataclass, replace


@dataclass(frozen=True)
class Tolerances:
    """Tolerance bundle threaded through the LP, geometry and selection code."""

    base: float = 1e-9
    opt: float = 1e-9
    slice_slack: float = 1e-7
    select: float = 1e-7
    unique: float = 1e-6

    def feas(self, scale: float = 1.0) -> float:
        """Feasibility tolerance for data whose largest magnitude is ``scale``."""
        return self.base * max(1.0, scale)


DEFAULT = Tolerances()


def with_base(eps: float) -> Tolerances:
    """The default bundle with a different base epsilon."""
    return replace(DEFAULT, base=float(eps))

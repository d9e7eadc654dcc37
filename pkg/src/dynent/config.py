"""Numerical tolerances shared across the package.

The defaults can be changed process-wide with :func:`set_tolerances` or
temporarily with the :func:`tolerances` context manager.
"""
from __future__ import annotations

import contextlib
import dataclasses


@dataclasses.dataclass(frozen=True)
class Tolerances:
    """Thresholds used by validation and the SDP solver.

    :param hermitian: max entrywise deviation ``|M - M^H|`` accepted as Hermitian.
    :param psd: smallest eigenvalue accepted as positive semidefinite (negative number).
    :param trace: absolute slack for trace-one / trace-preservation checks.
    :param solver: default interior-point stopping tolerance.
    :param max_iter: default interior-point iteration cap.
    """

    hermitian: float = 1e-10
    psd: float = -1e-9
    trace: float = 1e-9
    solver: float = 1e-7
    max_iter: int = 200


_current = Tolerances()


def get_tolerances() -> Tolerances:
    return _current


def set_tolerances(**changes) -> Tolerances:
    """Replace selected defaults; returns the previous settings."""
    global _current
    previous = _current
    _current = dataclasses.replace(_current, **changes)
    return previous


@contextlib.contextmanager
def tolerances(**changes):
    previous = set_tolerances(**changes)
    try:
        yield _current
    finally:
        set_tolerances(**dataclasses.asdict(previous))

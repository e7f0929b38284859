"""Shared tolerances and run configuration."""

from __future__ import annotations

import os
from dataclasses import dataclass, field
from pathlib import Path

#: absolute slack on unit-normalized inequalities
DEFAULT_TOL = 1e-9
#: allowed deviation of ``||u||`` from 1 for unit vectors
UNIT_TOL = 1e-12
DEFAULT_STEP = 1e-2
#: upper bound on the number of samples a construction may emit
DEFAULT_MAX_SAMPLES = 20_000_000

THREADS_ENV = "EELKIT_THREADS"


class DomainError(ValueError):
    """An argument lies outside the domain of an operation."""


class DegenerateSampleError(ValueError):
    """Consecutive or repeated samples make a direction undefined."""


class PreconditionError(ValueError):
    """A documented precondition of an operation does not hold.

    ``diagnostic`` carries whatever object explains the refusal
    (for instance a :class:`eelkit.checks.CheckReport`).
    """

    def __init__(self, message: str, diagnostic=None):
        super().__init__(message)
        self.diagnostic = diagnostic


def threads_from_env(default: int = 1) -> int:
    value = os.environ.get(THREADS_ENV)
    if value is None or value.strip() == "":
        return default
    n = int(value)
    if n < 1:
        raise DomainError(f"{THREADS_ENV} must be >= 1, got {n}")
    return n


@dataclass(frozen=True)
class RunConfig:
    tol: float = DEFAULT_TOL
    step: float = DEFAULT_STEP
    seed: int = 0
    output_dir: Path = field(default_factory=lambda: Path("."))
    format: str = "json"
    threads: int = 1

    def __post_init__(self):
        if not self.tol > 0:
            raise DomainError(f"tol must be positive, got {self.tol}")
        if not self.step > 0:
            raise DomainError(f"step must be positive, got {self.step}")
        if self.format not in ("csv", "json"):
            raise DomainError(f"format must be 'csv' or 'json', got {self.format!r}")
        if self.threads < 1:
            raise DomainError(f"threads must be >= 1, got {self.threads}")

"""Physical parameter set and external potentials.

The action scale kappa, the mass m, the noise intensity nu and the
dimensionless alpha are tied by kappa = 4*alpha*nu*m; the linear
wave-equation representation only exists on that surface, so the
constraint is enforced at construction time.
"""

from dataclasses import dataclass
from typing import Optional

import numpy as np

from .grid import Grid1D, RealField

KAPPA_CONSTRAINT_RTOL = 1e-12


@dataclass(frozen=True)
class PhysicalParams:
    m: float
    kappa: float
    alpha: float
    nu: float

    def __post_init__(self):
        for name in ("m", "kappa", "alpha", "nu"):
            if getattr(self, name) <= 0:
                raise ValueError(f"{name} must be positive")
        expected = 4.0 * self.alpha * self.nu * self.m
        if abs(self.kappa - expected) > KAPPA_CONSTRAINT_RTOL * self.kappa:
            raise ValueError(
                f"kappa={self.kappa} violates kappa = 4*alpha*nu*m = {expected}"
            )

    @classmethod
    def from_alpha(cls, m: float = 1.0, kappa: float = 1.0, alpha: float = 0.5) -> "PhysicalParams":
        """Fix nu from the constraint; alpha=1/2 gives nu = kappa/(2m)."""
        return cls(m=m, kappa=kappa, alpha=alpha, nu=kappa / (4.0 * alpha * m))

    @property
    def internal_coefficient(self) -> float:
        """Coefficient of (grad ln sqrt(rho))^2 in the internal energy: 8 a^2 nu^2 m = kappa^2/(2m)."""
        return 8.0 * self.alpha**2 * self.nu**2 * self.m


FREE = "free"
HARMONIC = "harmonic"
TABULATED = "tabulated"


@dataclass(frozen=True)
class Potential:
    kind: str
    omega: Optional[float] = None
    table: Optional[RealField] = None

    def __post_init__(self):
        if self.kind == HARMONIC:
            if self.omega is None or self.omega <= 0:
                raise ValueError("harmonic potential needs omega > 0")
        elif self.kind == TABULATED:
            if self.table is None:
                raise ValueError("tabulated potential needs a RealField")
        elif self.kind != FREE:
            raise ValueError(f"unknown potential kind {self.kind!r}")

    @classmethod
    def free(cls) -> "Potential":
        return cls(FREE)

    @classmethod
    def harmonic(cls, omega: float) -> "Potential":
        return cls(HARMONIC, omega=omega)

    @classmethod
    def tabulated(cls, table: RealField) -> "Potential":
        return cls(TABULATED, table=table)

    def sample(self, grid: Grid1D, m: float = 1.0) -> np.ndarray:
        """Potential values on the grid points; no interpolation for tables."""
        if self.kind == FREE:
            return np.zeros(grid.n)
        if self.kind == HARMONIC:
            return 0.5 * m * self.omega**2 * grid.points**2
        if self.table.grid != grid:
            raise ValueError("tabulated potential sampled on a different grid")
        return self.table.values.copy()

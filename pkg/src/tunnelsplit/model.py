"""Unit system, grids, and the complex field container shared by all modules.

Units are nm / fs / eV throughout; masses are measured in eV.fs^2/nm^2 so
that E = (hbar*k)^2 / (2*m) comes out in eV for k in 1/nm.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

#: Reduced Planck constant, eV.fs
HBAR = 0.6582119569
#: Electron rest mass, eV.fs^2/nm^2  (= 511000 eV / c^2, c = 299.792458 nm/fs)
ELECTRON_MASS = 5.685630

CHANNELS = ("full", "tr", "ref")


@dataclass(frozen=True)
class Constants:
    """Physical constants of the unit system (fixed values)."""

    hbar: float = HBAR
    electron_mass: float = ELECTRON_MASS


CONSTANTS = Constants()


@dataclass(frozen=True)
class KGrid:
    """Uniform wavenumber grid, k in 1/nm, k_min > 0."""

    k_min: float
    k_max: float
    n_points: int

    def __post_init__(self):
        if not self.k_min > 0:
            raise ValueError(f"k_min must be positive, got {self.k_min}")
        if not self.k_max > self.k_min:
            raise ValueError("k_max must exceed k_min")
        if self.n_points < 16:
            raise ValueError("need at least 16 wavenumber samples")

    @property
    def spacing(self) -> float:
        return (self.k_max - self.k_min) / (self.n_points - 1)

    def values(self) -> np.ndarray:
        return np.linspace(self.k_min, self.k_max, self.n_points)

    def trapezoid_weights(self) -> np.ndarray:
        w = np.full(self.n_points, self.spacing)
        w[0] *= 0.5
        w[-1] *= 0.5
        return w


@dataclass(frozen=True)
class XGrid:
    """Uniform position grid, x in nm."""

    x_min: float
    x_max: float
    n_points: int

    def __post_init__(self):
        if not self.x_max > self.x_min:
            raise ValueError("x_max must exceed x_min")
        if self.n_points < 2:
            raise ValueError("need at least 2 position samples")

    @property
    def dx(self) -> float:
        return (self.x_max - self.x_min) / (self.n_points - 1)

    def values(self) -> np.ndarray:
        return np.linspace(self.x_min, self.x_max, self.n_points)

    def trapezoid_weights(self) -> np.ndarray:
        w = np.full(self.n_points, self.dx)
        w[0] *= 0.5
        w[-1] *= 0.5
        return w


@dataclass(eq=False)
class WaveField:
    """Complex amplitude psi(x) on an XGrid at one instant.

    ``channel`` tags which component the field describes: "full",
    "tr" (transmission) or "ref" (reflection).
    """

    grid: XGrid
    values: np.ndarray
    time: float = 0.0
    channel: str = "full"

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=complex)
        if self.values.shape != (self.grid.n_points,):
            raise ValueError("field length does not match its grid")
        if self.channel not in CHANNELS:
            raise ValueError(f"unknown channel {self.channel!r}")


def _require_finite(values: np.ndarray):
    if not np.all(np.isfinite(values.view(float))):
        raise ValueError("field contains non-finite values")


def norm(field: WaveField) -> float:
    """Trapezoid-rule integral of |psi|^2 over the grid."""
    _require_finite(field.values)
    dens = np.abs(field.values) ** 2
    return float(np.dot(field.grid.trapezoid_weights(), dens))


def flux(field: WaveField, index: int, mass: float) -> float:
    """Probability flux (hbar/m) Im(psi* dpsi/dx) at an interior node, nm/fs.

    Uses the 2nd-order central difference of the field's own grid.
    """
    _require_finite(field.values)
    if not 0 < index < field.grid.n_points - 1:
        raise ValueError("flux needs an interior node (central differences)")
    psi = field.values
    dpsi = (psi[index + 1] - psi[index - 1]) / (2.0 * field.grid.dx)
    return float(HBAR / mass * np.imag(np.conj(psi[index]) * dpsi))


def mean_position(field: WaveField) -> float:
    """Expectation value of position, <x> = int x|psi|^2 dx / int |psi|^2 dx."""
    _require_finite(field.values)
    w = field.grid.trapezoid_weights()
    dens = np.abs(field.values) ** 2
    n = float(np.dot(w, dens))
    if n <= 0.0:
        raise ValueError("mean position of a zero-norm field is undefined")
    return float(np.dot(w, field.grid.values() * dens) / n)


def mean_square_position(field: WaveField) -> float:
    """Expectation value of x^2 (same normalization as mean_position)."""
    _require_finite(field.values)
    w = field.grid.trapezoid_weights()
    dens = np.abs(field.values) ** 2
    n = float(np.dot(w, dens))
    if n <= 0.0:
        raise ValueError("moment of a zero-norm field is undefined")
    return float(np.dot(w, field.grid.values() ** 2 * dens) / n)


def five_point_derivative(y: np.ndarray, h: float) -> np.ndarray:
    """d/dk by 5-point central stencils, 2nd-order one-sided at the edges."""
    y = np.asarray(y, dtype=float)
    if y.size < 5:
        raise ValueError("need at least 5 samples for the 5-point stencil")
    d = np.empty_like(y)
    d[2:-2] = (y[:-4] - 8.0 * y[1:-3] + 8.0 * y[3:-1] - y[4:]) / (12.0 * h)
    d[0] = (-3.0 * y[0] + 4.0 * y[1] - y[2]) / (2.0 * h)
    d[1] = (y[2] - y[0]) / (2.0 * h)
    d[-2] = (y[-1] - y[-3]) / (2.0 * h)
    d[-1] = (3.0 * y[-1] - 4.0 * y[-2] + y[-3]) / (2.0 * h)
    return d

"""Barrier descriptions: geometry, layer decomposition and symmetry tests.

A potential occupies the finite interval [a, b] with a > 0; outside it the
particle is free.  Wells are rectangular barriers with V0 < 0; the
point-like potential carries a strength W in eV.nm (the integral of V over
x), which makes 2*m*W/hbar^2 the derivative-jump coefficient in 1/nm.
"""

from __future__ import annotations

from dataclasses import dataclass

__all__ = [
    "Rectangular",
    "Delta",
    "PiecewiseConstant",
    "PotentialSpec",
    "Geometry",
    "geometry",
    "is_symmetric",
    "layers",
    "barrier_sign",
]


@dataclass(frozen=True)
class Rectangular:
    """Single layer of height v0 (eV, negative for a well) on [a, b]."""

    v0: float
    a: float
    b: float

    def __post_init__(self):
        if not self.a > 0:
            raise ValueError("left edge a must be positive")
        if not self.b > self.a:
            raise ValueError("right edge b must exceed a")


@dataclass(frozen=True)
class Delta:
    """Point potential W*delta(x - a), strength in eV.nm."""

    strength: float
    a: float

    def __post_init__(self):
        if not self.a > 0:
            raise ValueError("support point a must be positive")


@dataclass(frozen=True)
class PiecewiseConstant:
    """Stack of constant layers (V_j, width_j) starting at x = a."""

    a: float
    segments: tuple[tuple[float, float], ...]

    def __post_init__(self):
        if not self.a > 0:
            raise ValueError("left edge a must be positive")
        segs = tuple((float(v), float(w)) for v, w in self.segments)
        if not segs:
            raise ValueError("need at least one layer")
        if any(w <= 0 for _, w in segs):
            raise ValueError("layer widths must be positive")
        object.__setattr__(self, "segments", segs)


PotentialSpec = Rectangular | Delta | PiecewiseConstant


@dataclass(frozen=True)
class Geometry:
    a: float
    b: float
    d: float
    s: float
    x_mid: float


def geometry(p: PotentialSpec) -> Geometry:
    """Geometric scalars {a, b, d=b-a, s=a+b, x_mid}; for Delta b = a, d = 0."""
    if isinstance(p, Rectangular):
        a, b = p.a, p.b
    elif isinstance(p, Delta):
        a, b = p.a, p.a
    elif isinstance(p, PiecewiseConstant):
        a = p.a
        b = p.a + sum(w for _, w in p.segments)
    else:
        raise TypeError(f"unsupported potential {type(p).__name__}")
    return Geometry(a=a, b=b, d=b - a, s=a + b, x_mid=0.5 * (a + b))


def layers(p: PotentialSpec) -> tuple[tuple[float, float], ...]:
    """Constant layers (V_j, width_j) from left to right; empty for Delta."""
    if isinstance(p, Rectangular):
        return ((p.v0, p.b - p.a),)
    if isinstance(p, Delta):
        return ()
    if isinstance(p, PiecewiseConstant):
        return p.segments
    raise TypeError(f"unsupported potential {type(p).__name__}")


def is_symmetric(p: PotentialSpec) -> bool:
    """Exact mirror symmetry of the piecewise structure about x_mid."""
    segs = layers(p)
    return segs == tuple(reversed(segs))


def barrier_sign(p: PotentialSpec) -> int:
    """+1 for a barrier (V0 > 0 / W > 0), -1 for a well; 0 when free.

    For stacks the sign of the tallest layer by |V| decides.
    """
    if isinstance(p, Delta):
        v = p.strength
    else:
        segs = layers(p)
        v = max((seg[0] for seg in segs), key=abs)
    if v > 0:
        return 1
    if v < 0:
        return -1
    return 0

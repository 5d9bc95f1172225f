"""Fenchel-Nielsen model of the Teichmueller space of a surface with ideal boundary.

A point consists of length/twist pairs ``(ell_i, tau_i)`` for the
``3g - 3 + r`` interior curves of a pants decomposition and one trumpet
``(ell_j, F_j)`` per boundary circle. The symplectic form is the Wolpert
form on the interior block plus the trumpet form on each boundary block.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .diffeo import DiffeoLift, act_on_hill, compose, invert
from .errors import InvalidInputError
from .spectral import PeriodicFn, interpolate
from .trumpet import TrumpetPoint, TrumpetTangent, moment_diff, omega_N


def interior_count(genus, boundary):
    return 3 * genus - 3 + boundary


@dataclass(frozen=True, eq=False)
class FNPoint:
    genus: int
    interior: tuple = ()
    boundary: tuple = ()

    def __post_init__(self):
        g, r = int(self.genus), len(self.boundary)
        if g < 0:
            raise InvalidInputError(f"genus must be non-negative, got {g}")
        if 2 - 2 * g - r >= 0:
            raise InvalidInputError(f"surface with genus {g} and {r} boundary circles has Euler characteristic >= 0")
        pairs = tuple((float(ell), float(tau)) for ell, tau in self.interior)
        if len(pairs) != interior_count(g, r):
            raise InvalidInputError(f"need {interior_count(g, r)} interior (length, twist) pairs, got {len(pairs)}")
        for i, (ell, _) in enumerate(pairs):
            if not ell > 0:
                raise InvalidInputError(f"interior length {i} must be positive, got {ell}")
        for j, b in enumerate(self.boundary):
            if not isinstance(b, TrumpetPoint):
                raise InvalidInputError(f"boundary entry {j} is not a trumpet point")
        object.__setattr__(self, "genus", g)
        object.__setattr__(self, "interior", pairs)
        object.__setattr__(self, "boundary", tuple(self.boundary))

    @property
    def r(self):
        return len(self.boundary)

    def to_dict(self):
        return {
            "g": self.genus,
            "r": self.r,
            "interior": [[ell, tau] for ell, tau in self.interior],
            "boundary": [b.to_dict() for b in self.boundary],
        }

    @classmethod
    def from_dict(cls, data):
        boundary = [TrumpetPoint.from_dict(b) for b in data["boundary"]]
        if "r" in data and data["r"] != len(boundary):
            raise InvalidInputError(f"'r' is {data['r']} but {len(boundary)} boundary trumpets were given")
        return cls(data["g"], [tuple(pair) for pair in data["interior"]], boundary)


@dataclass(frozen=True, eq=False)
class FNTangent:
    interior: tuple = ()
    boundary: tuple = field(default_factory=tuple)

    def __post_init__(self):
        pairs = tuple((float(a), float(b)) for a, b in self.interior)
        if not all(np.isfinite(pairs).ravel()) if pairs else False:
            raise InvalidInputError("interior variations must be finite")
        object.__setattr__(self, "interior", pairs)
        object.__setattr__(self, "boundary", tuple(self.boundary))


def _check_dims(p, *tangents):
    for t in tangents:
        if len(t.interior) != len(p.interior) or len(t.boundary) != len(p.boundary):
            raise InvalidInputError(
                f"tangent has {len(t.interior)}+{len(t.boundary)} blocks, point has {len(p.interior)}+{len(p.boundary)}"
            )


def omega_teich(p, v, w):
    """``1/2 sum (dl_i ^ dtau_i) + sum omega_N`` on the boundary blocks."""
    _check_dims(p, v, w)
    total = 0.5 * sum(a[0] * b[1] - b[0] * a[1] for a, b in zip(v.interior, w.interior))
    for b, vj, wj in zip(p.boundary, v.boundary, w.boundary):
        total += omega_N(b, vj, wj)
    return total


def boundary_moment(p):
    """One Hill potential ``-(F_j^{-1} . T(ell_j))`` per boundary circle."""
    return [moment_diff(b) for b in p.boundary]


def _check_index(p, j):
    if not 0 <= j < p.r:
        raise InvalidInputError(f"boundary index {j} out of range for {p.r} boundary circles")


def boundary_action(p, j, F):
    """Replace ``F_j`` by ``F_j o F^{-1}``; all other parameters are unchanged."""
    _check_index(p, j)
    boundary = list(p.boundary)
    b = boundary[j]
    boundary[j] = TrumpetPoint(b.ell, compose(b.F, invert(F)))
    return FNPoint(p.genus, p.interior, boundary)


def transport_tangent(p, j, F, v):
    """Push ``v`` forward along :func:`boundary_action`: ``dF_j -> dF_j o F^{-1}``."""
    _check_index(p, j)
    _check_dims(p, v)
    Finv = invert(F)
    boundary = list(v.boundary)
    t = boundary[j]
    boundary[j] = TrumpetTangent(t.d_ell, PeriodicFn(interpolate(t.dF, Finv.lift_values())))
    return FNTangent(v.interior, boundary)


def transported_moment(F, phi):
    """Coadjoint transport of a boundary moment under ``F_j -> F_j o F^{-1}``."""
    return -act_on_hill(invert(F), -phi)


def identity_point(genus, ells_interior, ells_boundary, n):
    """Point with zero twists and identity trumpets."""
    interior = [(ell, 0.0) for ell in ells_interior]
    boundary = [TrumpetPoint(ell, DiffeoLift.identity(n)) for ell in ells_boundary]
    return FNPoint(genus, interior, boundary)

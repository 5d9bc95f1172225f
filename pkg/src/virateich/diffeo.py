"""Lifted circle diffeomorphisms, the Schwarzian and the action on Hill potentials.

A lift ``F(x) = x + phi(x) + winding`` commutes with integer translations,
so it is stored through its periodic part ``phi``. The constructor moves
the integer part of ``phi(0)`` into ``winding``; two lifts describe the
same map on the real line iff their ``lift_values`` agree.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import GridError, InvalidInputError, NumericalError
from .spectral import PeriodicFn, derivative, grid, interpolate, random_trig

MONOTONICITY_FLOOR = 1e-6


@dataclass(frozen=True, eq=False)
class DiffeoLift:
    phi: PeriodicFn
    winding: int = 0

    def __post_init__(self):
        # Calculus runs on the periodic part exactly as given (``_psi``), with its
        # integer offset kept separately: shifting the samples by an integer
        # would add rounding noise of size eps, which third derivatives amplify
        # by (pi n)^3.
        psi = self.phi if self.phi.weight == 0 else PeriodicFn(self.phi.values, 0)
        base = int(self.winding)
        shift = math.floor(psi.values[0])
        object.__setattr__(self, "_psi", psi)
        object.__setattr__(self, "_base", base)
        object.__setattr__(self, "phi", psi if shift == 0 else PeriodicFn(psi.values - shift, 0))
        object.__setattr__(self, "winding", base + shift)
        slope = 1.0 + derivative(psi).values
        if np.min(slope) <= MONOTONICITY_FLOOR:
            k = int(np.argmin(slope))
            raise InvalidInputError(
                f"lift is not orientation preserving: F'(x_{k}) = {slope[k]:.3e} <= {MONOTONICITY_FLOOR}"
            )

    @property
    def n(self):
        return self.phi.n

    @classmethod
    def identity(cls, n):
        return cls(PeriodicFn.constant(0.0, n))

    @classmethod
    def rotation(cls, t, n):
        return cls(PeriodicFn.constant(t, n))

    @classmethod
    def from_phi(cls, func, n):
        return cls(PeriodicFn.from_function(func, n))

    def displacement(self):
        """Samples of ``F(x_k) - x_k``."""
        return self._psi.values + self._base

    def lift_values(self):
        """Samples of the lift ``F(x_k)``."""
        return grid(self.n) + self._psi.values + self._base

    def __call__(self, points):
        pts = np.asarray(points, dtype=float)
        return pts + interpolate(self._psi, pts) + self._base

    def d1(self):
        """``F'`` as a weight-1 density."""
        return PeriodicFn(1.0 + derivative(self._psi).values, 1)

    def d2(self):
        return derivative(self._psi, 2)

    def d3(self):
        return derivative(self._psi, 3)

    def perturbed(self, dphi, h):
        """The lift with periodic part ``phi + h*dphi`` (used for finite differences)."""
        vals = dphi.values if isinstance(dphi, PeriodicFn) else np.asarray(dphi)
        return DiffeoLift(PeriodicFn(self._psi.values + h * vals), self._base)

    def to_dict(self):
        return {"phi": self.phi.to_dict(), "winding": self.winding}

    @classmethod
    def from_dict(cls, data):
        return cls(PeriodicFn.from_dict(data["phi"]), data.get("winding", 0))

    def __repr__(self):
        return f"DiffeoLift(n={self.n}, winding={self.winding}, max|phi|={self.phi.max_abs():.3g})"


def _same_grid(F, G):
    if F.n != G.n:
        raise GridError(f"diffeomorphisms live on different grids: {F.n} vs {G.n}")


def compose(F, G):
    """The lift ``F o G``, sampled on ``G``'s grid."""
    _same_grid(F, G)
    inner = grid(G.n) + G._psi.values
    phi = G._psi.values + interpolate(F._psi, inner)
    result_slope = G.d1().values * (1.0 + interpolate(F._psi, inner, derivative=1))
    if np.min(result_slope) <= MONOTONICITY_FLOOR:
        raise NumericalError("composition lost monotonicity")
    return DiffeoLift(PeriodicFn(phi), F._base + G._base)


def invert(F, tol=1e-14, max_iter=100):
    """The inverse lift, by safeguarded Newton iteration at every node.

    ``F(y) = x_k`` is solved for ``y`` inside the bracket that follows from
    ``min phi <= F(y) - y - winding <= max phi`` (padded); a Newton step that leaves
    the current bracket is replaced by bisection.
    """
    x = grid(F.n)
    psi = F._psi
    target = x - F._base
    # the interpolant may overshoot the sample range, so pad the bracket
    pad = 0.5 * np.ptp(psi.values) + 1e-8
    lo = target - psi.values.max() - pad
    hi = target - psi.values.min() + pad
    y = target - interpolate(psi, target)
    y = np.clip(y, lo, hi)
    for _ in range(max_iter):
        resid = y + interpolate(psi, y) - target
        done = np.abs(resid) <= tol
        if np.all(done):
            break
        lo = np.where(resid < 0, y, lo)
        hi = np.where(resid > 0, y, hi)
        slope = 1.0 + interpolate(psi, y, derivative=1)
        step = y - resid / slope
        outside = (step < lo) | (step > hi) | ~np.isfinite(step)
        y = np.where(done, y, np.where(outside, 0.5 * (lo + hi), step))
    else:
        resid = y + interpolate(psi, y) - target
        if np.max(np.abs(resid)) > tol:
            raise NumericalError(
                f"inverse did not converge in {max_iter} iterations (residual {np.max(np.abs(resid)):.2e})"
            )
    return DiffeoLift(PeriodicFn(y - target), -F._base)


def schwarzian(F):
    """``S(F) = F'''/F' - 3/2 (F''/F')^2`` as a weight-2 density."""
    d1 = F.d1().values
    d2 = F.d2().values
    d3 = F.d3().values
    return PeriodicFn(d3 / d1 - 1.5 * (d2 / d1) ** 2, 2)


def act_on_hill(F, T):
    """Transformed potential ``F'(x)^2 T(F(x)) + S(F)(x)/2``.

    This is the potential written ``F^{-1} . T``: it is the right-hand side
    evaluated with the given ``F``. Acting first with ``F`` and then with
    ``G`` equals acting once with ``compose(F, G)``.
    """
    _same_grid(F, T)
    d1 = F.d1().values
    return PeriodicFn(d1**2 * interpolate(T, F.lift_values()) + 0.5 * schwarzian(F).values, 2)


def left_invariant_vector(F, f):
    """Variation ``-F' f`` of ``F`` along the left-invariant field of ``f d/dx``."""
    return PeriodicFn(-F.d1().values * f.values, 0)


def random_diffeo(rng, n, modes=4, max_slope=0.5, shift=False):
    """Random lift whose periodic part is a trig polynomial with ``|phi'| <= max_slope``."""
    m = np.arange(1, modes + 1)
    a = rng.uniform(-1, 1, modes)
    b = rng.uniform(-1, 1, modes)
    bound = np.sum(2 * np.pi * m * (np.abs(a) + np.abs(b)))
    scale = rng.uniform(0.2, 1.0) * max_slope / bound
    x = grid(n)
    phi = np.sin(2 * np.pi * np.multiply.outer(x, m)) @ (a * scale)
    phi += np.cos(2 * np.pi * np.multiply.outer(x, m)) @ (b * scale)
    if shift:
        phi += rng.uniform(-0.5, 0.5)
    return DiffeoLift(PeriodicFn(phi))


def random_potential(rng, n, modes=4, amplitude=1.0, offset=0.0):
    return random_trig(rng, n, modes=modes, amplitude=amplitude, weight=2) + offset

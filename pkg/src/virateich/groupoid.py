"""The 2-form of the Virasoro action groupoid over Hill potentials.

A point is a pair ``(T, F)`` of a Hill potential and a lifted diffeomorphism.
In the left trivialization ``T`` is the source potential and

    omega_G = int( dT ^ beta + T beta ^ beta' - 1/4 beta''' ^ beta ),  beta = dF/F'.

In the right trivialization the point is ``(T0, F)`` with ``T = F^{-1} . T0``
and ``omega_G = d int( (T0 o F) F' dF - 1/4 dF''/F' )``. Fixing
``T0 = -ell^2/4`` recovers the trumpet form.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .diffeo import DiffeoLift, act_on_hill
from .errors import GridError
from .spectral import PeriodicFn, central_difference, derivative, fd_step, interpolate, random_trig
from .trumpet import omega_N


@dataclass(frozen=True, eq=False)
class GroupoidPoint:
    T: PeriodicFn
    F: DiffeoLift

    def __post_init__(self):
        if self.T.n != self.F.n:
            raise GridError("potential and diffeomorphism live on different grids")

    @property
    def n(self):
        return self.F.n

    def moved(self, tangent, h):
        return GroupoidPoint(self.T + h * tangent.dT.values, self.F.perturbed(tangent.dF, h))


@dataclass(frozen=True, eq=False)
class GroupoidTangent:
    dT: PeriodicFn
    dF: PeriodicFn

    def __post_init__(self):
        if self.dT.n != self.dF.n:
            raise GridError("tangent components live on different grids")

    def sup_norm(self):
        return max(self.dT.max_abs(), self.dF.max_abs())


def omega_G_left(p, v, w):
    Fp = p.F.d1().values
    bv = PeriodicFn(v.dF.values / Fp)
    bw = PeriodicFn(w.dF.values / Fp)
    T = p.T.values
    term_dT = v.dT.values * bw.values - w.dT.values * bv.values
    term_T = T * (bv.values * derivative(bw).values - bw.values * derivative(bv).values)
    term_3 = derivative(bv, 3).values * bw.values - derivative(bw, 3).values * bv.values
    return float(np.mean(term_dT + term_T - 0.25 * term_3))


def omega_G_right(p, v, w):
    """Exterior derivative of ``int( (T0 o F) F' dF - 1/4 dF''/F' )`` evaluated on ``v, w``.

    ``p.T`` is the right-trivialization potential ``T0``.
    """
    F = p.F
    Fp = F.d1().values
    pts = F.lift_values()
    T0F = interpolate(p.T, pts)
    dT0v = interpolate(v.dT, pts)
    dT0w = interpolate(w.dT, pts)
    a0, b0 = v.dF.values, w.dF.values
    a1, b1 = derivative(v.dF).values, derivative(w.dF).values
    a2, b2 = derivative(v.dF, 2).values, derivative(w.dF, 2).values
    integrand = Fp * (dT0v * b0 - dT0w * a0) + T0F * (a1 * b0 - b1 * a0) + 0.25 * (a1 * b2 - b1 * a2) / Fp**2
    return float(np.mean(integrand))


def right_to_left(p):
    """``(T0, F) -> (F^{-1} . T0, F)``."""
    return GroupoidPoint(act_on_hill(p.F, p.T), p.F)


def transport_right_to_left(p, v):
    """Push a right-trivialization tangent through :func:`right_to_left` by finite differences."""
    h = fd_step(v.sup_norm())
    dT = central_difference(lambda t: right_to_left(p.moved(v, t)).T.values, h)
    return GroupoidTangent(PeriodicFn(dT, 2), v.dF)


def left_right_residual(p_right, v, w):
    """``|omega_G_right(p; v, w) - omega_G_left(p'; v', w')|`` with transported data."""
    q = right_to_left(p_right)
    vl = transport_right_to_left(p_right, v)
    wl = transport_right_to_left(p_right, w)
    return abs(omega_G_right(p_right, v, w) - omega_G_left(q, vl, wl))


def slice_point(trumpet_point):
    n = trumpet_point.n
    return GroupoidPoint(PeriodicFn.constant(-0.25 * trumpet_point.ell**2, n, 2), trumpet_point.F)


def slice_tangent(trumpet_point, t):
    """Tangent of ``(ell, F) -> (-ell^2/4, F)``: ``dT0 = -ell d_ell / 2``."""
    n = trumpet_point.n
    return GroupoidTangent(PeriodicFn.constant(-0.5 * trumpet_point.ell * t.d_ell, n, 2), t.dF)


def slice_restrict(trumpet_point, v, w):
    """``omega_G_right`` pulled back to the slice of constant potentials ``-ell^2/4``."""
    return omega_G_right(slice_point(trumpet_point), slice_tangent(trumpet_point, v), slice_tangent(trumpet_point, w))


def slice_residual(trumpet_point, v, w):
    return abs(slice_restrict(trumpet_point, v, w) - omega_N(trumpet_point, v, w))


def random_tangent(rng, n, modes=4, amplitude=0.5):
    return GroupoidTangent(
        random_trig(rng, n, modes=modes, amplitude=amplitude, weight=2),
        random_trig(rng, n, modes=modes, amplitude=amplitude),
    )


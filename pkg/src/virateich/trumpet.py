"""The trumpet phase space: neck length ``ell > 0`` times lifted circle diffeomorphisms.

Tangent vectors vary ``ell`` and the periodic part of the lift directly.
The invariant 2-form is

    omega_N = 1/4 int( -F' d(ell^2) ^ dF - ell^2 dF' ^ dF + dF' ^ dF'' / F'^2 )

with primitive ``lambda = -1/4 int( ell^2 F' dF + dF''/F' )``. The
potential of the trumpet is the constant ``-ell^2/4``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .diffeo import DiffeoLift, act_on_hill, compose, left_invariant_vector, random_diffeo
from .errors import GridError, InvalidInputError
from .hill import monodromy
from .spectral import (
    FourierCoeffs,
    PeriodicFn,
    central_difference,
    derivative,
    fd_step,
    fourier,
    grid,
    integral,
    random_trig,
)


@dataclass(frozen=True, eq=False)
class TrumpetPoint:
    ell: float
    F: DiffeoLift

    def __post_init__(self):
        ell = float(self.ell)
        if not np.isfinite(ell) or ell <= 0:
            raise InvalidInputError(f"neck length must be positive, got {self.ell!r}")
        object.__setattr__(self, "ell", ell)

    @property
    def n(self):
        return self.F.n

    def moved(self, tangent, h):
        """The point ``p + h * tangent`` in the (ell, phi) coordinates."""
        return TrumpetPoint(self.ell + h * tangent.d_ell, self.F.perturbed(tangent.dF, h))

    def to_dict(self):
        return {"ell": self.ell, "F": self.F.to_dict()}

    @classmethod
    def from_dict(cls, data):
        return cls(data["ell"], DiffeoLift.from_dict(data["F"]))


@dataclass(frozen=True, eq=False)
class TrumpetTangent:
    d_ell: float
    dF: PeriodicFn

    def __post_init__(self):
        d_ell = float(self.d_ell)
        if not np.isfinite(d_ell):
            raise InvalidInputError("tangent d_ell must be finite")
        object.__setattr__(self, "d_ell", d_ell)
        dF = self.dF if self.dF.weight == 0 else PeriodicFn(self.dF.values)
        object.__setattr__(self, "dF", dF)

    @classmethod
    def zero(cls, n):
        return cls(0.0, PeriodicFn.constant(0.0, n))

    def sup_norm(self):
        return max(abs(self.d_ell), self.dF.max_abs())

    def __add__(self, other):
        return TrumpetTangent(self.d_ell + other.d_ell, self.dF + other.dF)

    def __mul__(self, c):
        return TrumpetTangent(c * self.d_ell, self.dF * float(c))

    __rmul__ = __mul__

    def to_dict(self):
        return {"d_ell": self.d_ell, "dF": self.dF.to_dict()}


def circle_generator(n):
    """The tangent ``Z = (0, 1)`` of the rotation action ``F -> F + t``."""
    return TrumpetTangent(0.0, PeriodicFn.constant(1.0, n))


def trumpet_potential(ell, n):
    return PeriodicFn.constant(-0.25 * ell**2, n, 2)


def _check(p, *tangents):
    for t in tangents:
        if t.dF.n != p.n:
            raise GridError(f"tangent has {t.dF.n} samples, point has {p.n}")


def omega_N(p, v, w):
    _check(p, v, w)
    Fp = p.F.d1().values
    a0, b0 = v.dF.values, w.dF.values
    a1, b1 = derivative(v.dF).values, derivative(w.dF).values
    a2, b2 = derivative(v.dF, 2).values, derivative(w.dF, 2).values
    ell = p.ell
    dell2 = -Fp * 2 * ell * (v.d_ell * b0 - w.d_ell * a0)
    dFp_dF = -(ell**2) * (a1 * b0 - b1 * a0)
    dFp_dFpp = (a1 * b2 - b1 * a2) / Fp**2
    return 0.25 * float(np.mean(dell2 + dFp_dF + dFp_dFpp))


def primitive(p, w):
    """``lambda_p(w) = -1/4 int( ell^2 F' dF + dF''/F' )``."""
    _check(p, w)
    Fp = p.F.d1().values
    return -0.25 * float(np.mean(p.ell**2 * Fp * w.dF.values + derivative(w.dF, 2).values / Fp))


def exactness_residual(p, v, w):
    """``|omega_N(v, w) - (D_v lambda(w) - D_w lambda(v))|`` with finite differences."""
    hv = fd_step(v.sup_norm())
    hw = fd_step(w.sup_norm())
    dv = central_difference(lambda t: primitive(p.moved(v, t), w), hv)
    dw = central_difference(lambda t: primitive(p.moved(w, t), v), hw)
    return abs(omega_N(p, v, w) - (dv - dw))


def moment_diff(p):
    """Diff-moment map value ``-(F^{-1} . T(ell))``."""
    return -act_on_hill(p.F, trumpet_potential(p.ell, p.n))


def verify_moment_diff(p, f, w):
    """Residual of ``omega_N(v_f, w) = D_w int (F^{-1} . T(ell)) f`` with ``v_f = (0, -F' f)``."""
    _check(p, w)
    v = TrumpetTangent(0.0, left_invariant_vector(p.F, f))
    lhs = omega_N(p, v, w)
    h = fd_step(w.sup_norm())
    rhs = central_difference(lambda t: -integral(moment_diff(p.moved(w, t)) * f), h)
    return abs(lhs - rhs)


def verify_moment_circle(p, w):
    """Residual of ``omega_N(Z, w) = 1/4 d(ell^2)(w) = ell w.d_ell / 2``."""
    lhs = omega_N(p, circle_generator(p.n), w)
    return abs(lhs - 0.5 * p.ell * w.d_ell)


def darboux_u(p):
    """``u = log F' + ell (F(x) - x)``."""
    F = p.F
    return PeriodicFn(np.log(F.d1().values) + p.ell * F.displacement())


def pushforward(p, v):
    """``du(v) = dF'/F' + d_ell (F(x) - x) + ell dF``."""
    _check(p, v)
    F = p.F
    return PeriodicFn(
        derivative(v.dF).values / F.d1().values + v.d_ell * F.displacement() + p.ell * v.dF.values
    )


def omega_N_darboux(p, v, w):
    """``-1/2 d ell ^ du_0 + 1/4 int du ^ du'`` with ``u_0`` the mean of ``u``."""
    a, b = pushforward(p, v), pushforward(p, w)
    a0, b0 = integral(a), integral(b)
    inner = integral(a * derivative(b)) - integral(b * derivative(a))
    return -0.5 * (v.d_ell * b0 - w.d_ell * a0) + 0.25 * inner


def omega_N_fourier(p, v, w, cutoff=None):
    """Fourier form ``-1/2 d ell ^ du_0 + pi i sum_{m>0} m (a_{-m} b_m - b_{-m} a_m)``."""
    a_fn, b_fn = pushforward(p, v), pushforward(p, w)
    cutoff = p.n // 2 - 1 if cutoff is None else cutoff
    a, b = fourier(a_fn, cutoff), fourier(b_fn, cutoff)
    return fourier_form(v.d_ell, a, w.d_ell, b)


def fourier_form(dl_v, a, dl_w, b):
    if not isinstance(a, FourierCoeffs) or not isinstance(b, FourierCoeffs):
        raise InvalidInputError("Fourier form needs FourierCoeffs")
    m = np.arange(1, min(a.cutoff, b.cutoff) + 1)
    am, bm = a.modes[m], b.modes[m]
    total = 1j * np.pi * np.sum(m * (np.conj(am) * bm - np.conj(bm) * am))
    base = -0.5 * (dl_v * b.modes[0].real - dl_w * a.modes[0].real)
    return base + float(total.real)


def gram_basis(n, cutoff=8):
    """Tangents ``d_ell``, ``dF = 1`` and ``dF = cos, sin(2 pi m x)`` scaled by ``m^{-3/2}``."""
    x = grid(n)
    basis = [TrumpetTangent(1.0, PeriodicFn(np.zeros(n))), TrumpetTangent(0.0, PeriodicFn(np.ones(n)))]
    for m in range(1, cutoff + 1):
        scale = m**-1.5
        basis.append(TrumpetTangent(0.0, PeriodicFn(scale * np.cos(2 * np.pi * m * x))))
        basis.append(TrumpetTangent(0.0, PeriodicFn(scale * np.sin(2 * np.pi * m * x))))
    return basis


def gram_matrix(p, basis):
    k = len(basis)
    G = np.zeros((k, k))
    for i in range(k):
        for j in range(i + 1, k):
            G[i, j] = omega_N(p, basis[i], basis[j])
            G[j, i] = -G[i, j]
    return G


def gram_smallest_singular_value(p, cutoff=8):
    G = gram_matrix(p, gram_basis(p.n, cutoff))
    return float(np.linalg.svd(G, compute_uv=False)[-1])


def random_tangent(rng, n, modes=4, amplitude=0.5):
    return TrumpetTangent(float(rng.uniform(-1, 1)), random_trig(rng, n, modes=modes, amplitude=amplitude))


def random_point(rng, n, modes=4, max_slope=0.5):
    return TrumpetPoint(float(rng.uniform(0.3, 3.0)), random_diffeo(rng, n, modes=modes, max_slope=max_slope))


def virasoro_orbit_check(ell, samples, rng, n=256):
    """Numerical shadow of the reduction to a Virasoro orbit.

    Over ``samples`` random ``F``: monodromy traces of ``-moment_diff`` at
    ``F`` and ``rot_t o F`` agree, the moment map is constant along the
    rotation orbit, ``omega_N(Z, Z) = 0`` and ``omega_N(Z, w) = 0`` for
    ``w.d_ell = 0``. Returns the maximal residual of each check.
    """
    if not ell > 0:
        raise InvalidInputError("neck length must be positive")
    out = {"trace": 0.0, "orbit_constant": 0.0, "omega_ZZ": 0.0, "omega_Zw": 0.0}
    Z = circle_generator(n)
    for _ in range(samples):
        p = TrumpetPoint(ell, random_diffeo(rng, n))
        t = float(rng.uniform(0, 1))
        q = TrumpetPoint(ell, compose(DiffeoLift.rotation(t, n), p.F))
        Mp, Mq = moment_diff(p), moment_diff(q)
        tr_p = monodromy(-Mp).trace
        tr_q = monodromy(-Mq).trace
        out["trace"] = max(out["trace"], abs(tr_p - tr_q))
        out["orbit_constant"] = max(out["orbit_constant"], (Mp - Mq).max_abs())
        out["omega_ZZ"] = max(out["omega_ZZ"], abs(omega_N(p, Z, Z)))
        w = TrumpetTangent(0.0, random_trig(rng, n))
        out["omega_Zw"] = max(out["omega_Zw"], abs(omega_N(p, Z, w)))
    return out

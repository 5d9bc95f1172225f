"""sl(2,R) boundary connections, Drinfeld-Sokolov gauge fixing and Hill potentials.

A boundary connection is ``A = [[s/2, a], [u, -s/2]] dx``; gauge maps act by
``g . A = g A g^{-1} - (dg) g^{-1}``. Every connection with ``a > 0`` has a
unique lower-triangular gauge taking it to ``[[0, 1], [-T, 0]] dx``, and
``T`` is its Hill potential.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import GridError, InvalidInputError, NumericalError, PreconditionError
from .spectral import PeriodicFn, derivative, interpolate, random_trig

TRACE_TOL = 1e-10
DET_TOL = 1e-10
SLICE_TOL = 1e-6


def _check_positive(a, what="connection"):
    bad = np.nonzero(a.values <= 0)[0]
    if len(bad):
        k = int(bad[0])
        raise PreconditionError(f"{what} is not positive: a(x_{k}) = a({k / a.n:g}) = {a.values[k]:.3e} <= 0")


@dataclass(frozen=True, eq=False)
class BoundaryConnection:
    a: PeriodicFn
    s: PeriodicFn
    u: PeriodicFn

    def __post_init__(self):
        if not (self.a.n == self.s.n == self.u.n):
            raise GridError("a, s, u must share one grid")

    @property
    def n(self):
        return self.a.n

    @property
    def positive(self):
        return bool(np.all(self.a.values > 0))

    @classmethod
    def drinfeld_sokolov(cls, T):
        """The slice connection ``[[0, 1], [-T, 0]] dx``."""
        n = T.n
        return cls(PeriodicFn.constant(1.0, n), PeriodicFn.constant(0.0, n), PeriodicFn(-T.values))

    def matrix(self):
        """Entries as an array of shape ``(2, 2, n)``."""
        s = self.s.values
        return np.array([[0.5 * s, self.a.values], [self.u.values, -0.5 * s]])

    @classmethod
    def from_matrix(cls, m, trace_tol=TRACE_TOL):
        trace = m[0, 0] + m[1, 1]
        if np.max(np.abs(trace)) > trace_tol:
            raise NumericalError(f"connection is not trace free (max |tr| = {np.max(np.abs(trace)):.2e})")
        return cls(PeriodicFn(m[0, 1]), PeriodicFn(m[0, 0] - m[1, 1]), PeriodicFn(m[1, 0]))

    def to_dict(self):
        return {"a": self.a.to_dict(), "s": self.s.to_dict(), "u": self.u.to_dict()}

    @classmethod
    def from_dict(cls, data):
        return cls(*(PeriodicFn.from_dict(data[k]) for k in ("a", "s", "u")))


@dataclass(frozen=True, eq=False)
class GaugeMap:
    """A smooth map from the circle into SL(2,R), stored entrywise."""

    g11: np.ndarray
    g12: np.ndarray
    g21: np.ndarray
    g22: np.ndarray

    def __post_init__(self):
        entries = [np.array(getattr(self, k), dtype=float) for k in ("g11", "g12", "g21", "g22")]
        if len({e.shape for e in entries}) != 1:
            raise GridError("gauge map entries must share one grid")
        for name, e in zip(("g11", "g12", "g21", "g22"), entries):
            e.setflags(write=False)
            object.__setattr__(self, name, e)
        det = entries[0] * entries[3] - entries[1] * entries[2]
        if np.max(np.abs(det - 1.0)) > DET_TOL:
            raise InvalidInputError(f"gauge map is not in SL(2): max |det - 1| = {np.max(np.abs(det - 1)):.2e}")

    @property
    def n(self):
        return len(self.g11)

    @classmethod
    def identity(cls, n):
        return cls(np.ones(n), np.zeros(n), np.zeros(n), np.ones(n))

    @classmethod
    def from_matrix(cls, m):
        return cls(m[0, 0], m[0, 1], m[1, 0], m[1, 1])

    def matrix(self):
        return np.array([[self.g11, self.g12], [self.g21, self.g22]])

    def inverse_matrix(self):
        return np.array([[self.g22, -self.g12], [-self.g21, self.g11]])

    def __matmul__(self, other):
        return GaugeMap.from_matrix(np.einsum("ijn,jkn->ikn", self.matrix(), other.matrix()))

    def distance(self, other):
        return float(np.max(np.abs(self.matrix() - other.matrix())))

    def to_dict(self):
        return {k: [float(v) for v in getattr(self, k)] for k in ("g11", "g12", "g21", "g22")}


@dataclass(frozen=True)
class Monodromy:
    matrix: np.ndarray
    trace: float
    orbit_class: str

    def to_dict(self):
        return {
            "matrix": [[float(v) for v in row] for row in self.matrix],
            "trace": self.trace,
            "det": float(np.linalg.det(self.matrix)),
            "class": self.orbit_class,
        }


def _mul(p, q):
    return np.einsum("ijn,jkn->ikn", p, q)


def gauge_transform(h, A):
    """``h . A = h A h^{-1} - (dh) h^{-1}`` with ``dh`` computed spectrally."""
    if h.n != A.n:
        raise GridError("gauge map and connection live on different grids")
    hm = h.matrix()
    hinv = h.inverse_matrix()
    dh = np.array([[derivative(PeriodicFn(hm[i, j])).values for j in range(2)] for i in range(2)])
    # det h = 1 makes the result trace free exactly; the sampled trace only measures
    # aliasing in the spectral product rule, so it is not checked here.
    return BoundaryConnection.from_matrix(_mul(_mul(hm, A.matrix()), hinv) - _mul(dh, hinv), trace_tol=np.inf)


def ds_normalize(A):
    """Gauge ``A`` into the slice; return ``(h, T)`` with ``h . A = [[0, 1], [-T, 0]]``.

    ``h = [[1, 0], [s/2 + a'/(2a), 1]] diag(a^{-1/2}, a^{1/2})``. The
    potential is read off as minus the lower-left entry of the actually
    transformed connection, not from a closed formula.
    """
    _check_positive(A.a)
    a = A.a.values
    lower = 0.5 * A.s.values + 0.5 * derivative(A.a).values / a
    r = np.sqrt(a)
    h = GaugeMap(1.0 / r, np.zeros_like(a), lower / r, r)
    B = gauge_transform(h, A)
    # the residual diagonal is aliasing from the spectral product rule; only a gross
    # deviation signals that the gauge failed
    off = max(np.max(np.abs(B.a.values - 1.0)), np.max(np.abs(B.s.values)))
    if off > SLICE_TOL * max(1.0, A.a.max_abs(), A.s.max_abs()):
        raise NumericalError(f"gauge did not reach the slice (deviation {off:.2e})")
    return h, PeriodicFn(-B.u.values, 2)


def hill_from_asu(A):
    """Hill potential of a positive connection by the closed formula.

    ``T = (a''/a - 3/2 (a'/a)^2)/2 - a u - s^2/4 - (a'/a) s/2 + s'/2``
    """
    _check_positive(A.a)
    a = A.a.values
    s = A.s.values
    la = derivative(A.a).values / a
    laa = derivative(A.a, 2).values / a
    T = 0.5 * (laa - 1.5 * la**2) - a * A.u.values - 0.25 * s**2 - 0.5 * la * s + 0.5 * derivative(A.s).values
    return PeriodicFn(T, 2)


def hat_moment(A):
    """Boundary moment-map density ``-s'/2 + s^2/4 + a u - a''/2``."""
    s = A.s.values
    val = -0.5 * derivative(A.s).values + 0.25 * s**2 + A.a.values * A.u.values - 0.5 * derivative(A.a, 2).values
    return PeriodicFn(val, 2)


def hat_moment_pairing(A, f):
    """``int (s f'/2 - a f''/2 + s^2 f/4 + a u f)``, the weak form of :func:`hat_moment`."""
    s = A.s.values
    fv = f.values
    integrand = (
        0.5 * s * derivative(f).values
        - 0.5 * A.a.values * derivative(f, 2).values
        + 0.25 * s**2 * fv
        + A.a.values * A.u.values * fv
    )
    return float(np.mean(integrand))


def _orbit_class(trace, tol):
    if abs(trace) > 2 + tol:
        return "hyperbolic"
    if abs(trace) < 2 - tol:
        return "elliptic"
    return "parabolic"


def monodromy(T, steps_per_sample=8, class_tol=1e-8):
    """Monodromy of ``u'' + T u = 0`` over one period (classical RK4).

    The state is ``(u, u')``; the step is ``1/(steps_per_sample * n)`` and
    ``T`` is evaluated at the half steps by exact trigonometric refinement.
    """
    n = T.n
    steps = steps_per_sample * n
    h = 1.0 / steps
    fine = 2 * steps
    spectrum = np.fft.rfft(T.values)
    padded = np.zeros(fine // 2 + 1, dtype=complex)
    padded[: n // 2 + 1] = spectrum
    padded[n // 2] *= 0.5
    Tf = np.fft.irfft(padded * (fine / n), n=fine)
    Tf = np.append(Tf, Tf[0])

    Y = np.eye(2)

    def rhs(t_val, Y):
        return np.array([[Y[1, 0], Y[1, 1]], [-t_val * Y[0, 0], -t_val * Y[0, 1]]])

    for j in range(steps):
        t0, tm, t1 = Tf[2 * j], Tf[2 * j + 1], Tf[2 * j + 2]
        k1 = rhs(t0, Y)
        k2 = rhs(tm, Y + 0.5 * h * k1)
        k3 = rhs(tm, Y + 0.5 * h * k2)
        k4 = rhs(t1, Y + h * k3)
        Y = Y + (h / 6.0) * (k1 + 2 * k2 + 2 * k3 + k4)
    if not np.all(np.isfinite(Y)):
        raise NumericalError("monodromy integration produced non-finite values")
    det = float(np.linalg.det(Y))
    if abs(det - 1.0) > 1e-8:
        raise NumericalError(f"monodromy lost unimodularity: det = {det!r}")
    tr = float(np.trace(Y))
    return Monodromy(Y, tr, _orbit_class(tr, class_tol))


def length_from_trace(trace):
    """Neck length ``l`` with ``trace = 2 cosh(l/2)`` (hyperbolic classes only)."""
    if abs(trace) < 2:
        raise PreconditionError(f"trace {trace} is not hyperbolic")
    return 2.0 * float(np.arccosh(abs(trace) / 2.0))


def ds_splitting_gauge(F):
    """``h = [[1, 0], [F''/(2F'), 1]] diag(F'^{-1/2}, F'^{1/2})``."""
    d1 = F.d1().values
    d2 = F.d2().values
    r = np.sqrt(d1)
    return GaugeMap(1.0 / r, np.zeros_like(d1), 0.5 * d2 / d1 / r, r)


def pullback(F, A):
    """``F^* A``: every entry sampled at ``F(x)`` and multiplied by ``F'(x)``."""
    pts = F.lift_values()
    d1 = F.d1().values
    return BoundaryConnection(
        PeriodicFn(interpolate(A.a, pts) * d1),
        PeriodicFn(interpolate(A.s, pts) * d1),
        PeriodicFn(interpolate(A.u, pts) * d1),
    )


def random_positive_connection(rng, n, modes=4):
    a = random_trig(rng, n, modes=modes, amplitude=0.5, mean=False) + rng.uniform(0.8, 2.0)
    s = random_trig(rng, n, modes=modes, amplitude=1.0)
    u = random_trig(rng, n, modes=modes, amplitude=1.0)
    return BoundaryConnection(a, s, u)


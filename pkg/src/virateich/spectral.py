"""Periodic grid functions on the unit circle and their spectral calculus.

A :class:`PeriodicFn` holds ``n`` samples of a 1-periodic real function at
``x_k = k/n``. Derivatives, quadrature and interpolation are all spectral
(FFT based), which is what makes third derivatives (Schwarzian) usable.

The ``weight`` field records that the samples are the coefficient of
``|dx|^weight``; it is bookkeeping only and never changes a value.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import GridError, InvalidInputError, PreconditionError

MIN_SAMPLES = 16


def _is_power_of_two(n):
    return n >= 1 and (n & (n - 1)) == 0


def check_sample_count(n):
    if not isinstance(n, (int, np.integer)) or isinstance(n, bool):
        raise GridError(f"sample count must be an integer, got {n!r}")
    if n < MIN_SAMPLES or not _is_power_of_two(int(n)):
        raise GridError(f"sample count must be a power of two >= {MIN_SAMPLES}, got {n}")
    return int(n)


def grid(n):
    """Uniform nodes ``k/n`` for ``k = 0..n-1``."""
    return np.arange(n) / n


@dataclass(frozen=True, eq=False)
class PeriodicFn:
    """Samples of a real 1-periodic function, tagged with a density weight."""

    values: np.ndarray
    weight: int = 0

    def __post_init__(self):
        vals = np.array(self.values, dtype=float)
        if vals.ndim != 1:
            raise InvalidInputError("PeriodicFn values must be one-dimensional")
        check_sample_count(len(vals))
        if not np.all(np.isfinite(vals)):
            raise InvalidInputError("PeriodicFn values must be finite")
        vals.setflags(write=False)
        object.__setattr__(self, "values", vals)
        object.__setattr__(self, "weight", int(self.weight))

    @property
    def n(self):
        return len(self.values)

    @property
    def x(self):
        return grid(self.n)

    @classmethod
    def from_function(cls, func, n, weight=0):
        return cls(func(grid(n)), weight)

    @classmethod
    def constant(cls, c, n, weight=0):
        return cls(np.full(n, float(c)), weight)

    def with_values(self, values, weight=None):
        return PeriodicFn(values, self.weight if weight is None else weight)

    def max_abs(self):
        return float(np.max(np.abs(self.values)))

    def min(self):
        return float(np.min(self.values))

    def mean(self):
        return float(np.mean(self.values))

    # arithmetic ---------------------------------------------------------

    def _other(self, other):
        if isinstance(other, PeriodicFn):
            if other.n != self.n:
                raise GridError(f"sample counts differ: {self.n} vs {other.n}")
            return other.values, other.weight
        return other, 0

    def __add__(self, other):
        vals, _ = self._other(other)
        return PeriodicFn(self.values + vals, self.weight)

    __radd__ = __add__

    def __sub__(self, other):
        vals, _ = self._other(other)
        return PeriodicFn(self.values - vals, self.weight)

    def __rsub__(self, other):
        vals, _ = self._other(other)
        return PeriodicFn(vals - self.values, self.weight)

    def __mul__(self, other):
        vals, w = self._other(other)
        return PeriodicFn(self.values * vals, self.weight + w)

    __rmul__ = __mul__

    def __truediv__(self, other):
        vals, w = self._other(other)
        return PeriodicFn(self.values / vals, self.weight - w)

    def __rtruediv__(self, other):
        vals, w = self._other(other)
        return PeriodicFn(vals / self.values, w - self.weight)

    def __neg__(self):
        return PeriodicFn(-self.values, self.weight)

    def __pow__(self, p):
        return PeriodicFn(self.values**p, self.weight * p if float(p).is_integer() else self.weight)

    def __repr__(self):
        return f"PeriodicFn(n={self.n}, weight={self.weight}, max|f|={self.max_abs():.3g})"

    # serialization ------------------------------------------------------

    def to_dict(self):
        return {"n": self.n, "weight": self.weight, "values": [float(v) for v in self.values]}

    @classmethod
    def from_dict(cls, data):
        values = data["values"]
        if len(values) != data["n"]:
            raise GridError(f"'n' is {data['n']} but {len(values)} values were given")
        return cls(np.asarray(values, dtype=float), data.get("weight", 0))


@dataclass(frozen=True, eq=False)
class FourierCoeffs:
    """Coefficients ``u_m`` for ``0 <= m <= M`` of a real periodic function.

    Negative modes are never stored; ``coeff(-m)`` returns ``conj(u_m)``,
    so Hermitian symmetry holds by construction.
    """

    modes: np.ndarray

    def __post_init__(self):
        modes = np.array(self.modes, dtype=complex)
        if modes.ndim != 1 or len(modes) == 0:
            raise InvalidInputError("FourierCoeffs needs a non-empty 1-d array")
        modes[0] = modes[0].real
        modes.setflags(write=False)
        object.__setattr__(self, "modes", modes)

    @property
    def cutoff(self):
        return len(self.modes) - 1

    def coeff(self, m):
        if abs(m) > self.cutoff:
            return 0j
        return self.modes[m] if m >= 0 else np.conj(self.modes[-m])

    def full(self):
        """Array of ``u_m`` for ``m = -M..M``."""
        return np.array([self.coeff(m) for m in range(-self.cutoff, self.cutoff + 1)])


def _rfft_wavenumbers(n):
    return 2j * np.pi * np.arange(n // 2 + 1)


def spectral_derivative(values, order=1, axis=-1):
    """Spectral derivative of real periodic samples along ``axis``.

    The Nyquist mode is dropped for odd orders so the result stays real and
    the operator stays skew.
    """
    if order < 0 or int(order) != order:
        raise InvalidInputError(f"derivative order must be a non-negative integer, got {order}")
    values = np.asarray(values, dtype=float)
    if order == 0:
        return values.copy()
    n = values.shape[axis]
    symbol = _rfft_wavenumbers(n) ** order
    if order % 2 == 1:
        symbol[-1] = 0.0
    shape = [1] * values.ndim
    shape[axis] = len(symbol)
    coeffs = np.fft.rfft(values, axis=axis) * symbol.reshape(shape)
    return np.fft.irfft(coeffs, n=n, axis=axis)


def derivative(f, order=1):
    """Spectral derivative of ``f``; the density weight grows by ``order``."""
    if order < 1 or int(order) != order:
        raise InvalidInputError(f"derivative order must be a positive integer, got {order}")
    return PeriodicFn(spectral_derivative(f.values, order), f.weight + order)


def integral(f):
    """Integral over one period (the sample mean; spectrally accurate)."""
    return float(np.mean(f.values))


def interpolate(f, points, derivative=0):
    """Evaluate the trigonometric interpolant of ``f`` (or its derivative) at ``points``.

    Points are taken modulo 1. At grid nodes the stored samples come back
    up to roundoff.
    """
    pts = np.mod(np.asarray(points, dtype=float), 1.0)
    n = f.n
    coeffs = np.fft.rfft(f.values) / n
    coeffs[1 : n // 2] *= 2.0
    if derivative:
        coeffs = coeffs * _rfft_wavenumbers(n) ** derivative
        if derivative % 2 == 1:
            coeffs[-1] = 0.0
    k = np.arange(n // 2 + 1)
    phase = np.exp(2j * np.pi * np.multiply.outer(pts.ravel(), k))
    return (phase @ coeffs).real.reshape(pts.shape)


def fourier(f, cutoff):
    """Fourier coefficients ``u_m = int f(x) exp(-2 pi i m x) dx`` for ``|m| <= cutoff``."""
    if cutoff < 0 or cutoff >= f.n // 2:
        raise InvalidInputError(f"mode cutoff must satisfy 0 <= M < n/2 = {f.n // 2}, got {cutoff}")
    coeffs = np.fft.rfft(f.values) / f.n
    return FourierCoeffs(coeffs[: cutoff + 1])


def inverse_fourier(coeffs, n, weight=0):
    """Samples on the ``n``-point grid of the real function with the given modes."""
    n = check_sample_count(n)
    if coeffs.cutoff >= n // 2:
        raise InvalidInputError(f"{n} samples cannot carry modes up to {coeffs.cutoff}")
    spectrum = np.zeros(n // 2 + 1, dtype=complex)
    spectrum[: coeffs.cutoff + 1] = coeffs.modes
    return PeriodicFn(np.fft.irfft(spectrum * n, n=n), weight)


def antiderivative_meanzero(f, tol=1e-10):
    """The mean-zero periodic primitive of a mean-zero ``f``."""
    mean = integral(f)
    if abs(mean) > tol:
        raise PreconditionError(f"function has mean {mean:.3e}; a periodic primitive needs mean zero")
    n = f.n
    symbol = _rfft_wavenumbers(n)
    symbol[0] = 1.0
    coeffs = np.fft.rfft(f.values) / symbol
    coeffs[0] = 0.0
    coeffs[-1] = 0.0
    return PeriodicFn(np.fft.irfft(coeffs, n=n), f.weight - 1)


def random_trig(rng, n, modes=4, amplitude=1.0, weight=0, mean=True):
    """Random real trigonometric polynomial of degree ``modes``, sup-norm at most ``amplitude``."""
    x = grid(n)
    a = rng.uniform(-1, 1, modes + 1)
    b = rng.uniform(-1, 1, modes + 1)
    m = np.arange(modes + 1)
    if not mean:
        a[0] = 0.0
    b[0] = 0.0
    total = np.sum(np.abs(a) + np.abs(b))
    scale = amplitude / total if total > 0 else 0.0
    vals = np.cos(2 * np.pi * np.multiply.outer(x, m)) @ (a * scale)
    vals += np.sin(2 * np.pi * np.multiply.outer(x, m)) @ (b * scale)
    return PeriodicFn(vals, weight)


def central_difference(func, h):
    """Fourth-order central difference of ``func(t)`` at ``t = 0`` with step ``h``.

    Works for scalar or array valued ``func``.
    """
    return (-func(2 * h) + 8 * func(h) - 8 * func(-h) + func(-2 * h)) / (12 * h)


def fd_step(sup_norm, base=1e-4):
    """Step ``base * (1 + sup_norm)`` used for all directional finite differences."""
    return base * (1.0 + sup_norm)

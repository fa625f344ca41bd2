"""Scaled complementary error function erfcx(z) = exp(z^2) erfc(z) for complex z.

This is the kernel behind the Gaussian-broadened resonance model: the
thermometer line averaged over a normally distributed resonance frequency
reduces to a single erfcx evaluation, so the fitting machinery calls this
function thousands of times per trace.  Target relative accuracy is 1e-10
on the square |Re z| <= 30, |Im z| <= 30, comfortably below the noise floor
of any trace we fit.

The evaluation is region-switched in the equivalent Faddeeva variable
zeta = i z (upper half-plane):

* |zeta| <= 2.5   -- Maclaurin series  w(zeta) = sum (i zeta)^n / Gamma(n/2+1)
* 2.5 < |zeta| < 6 -- rational approximation on a Moebius-mapped unit circle
  (Fourier coefficients of the sampled Gaussian, computed once at import)
* |zeta| >= 6     -- Laplace continued fraction, evaluated backward

Each branch is accurate to ~1e-13 in its region, so the seams are smooth at
the 1e-10 level.  Negative real parts are handled through the reflection
formula erfcx(z) = 2 exp(z^2) - erfcx(-z); when exp(z^2) is not
representable in double precision, the call is refused with RangeOverflowError
instead of silently returning inf.
"""

import math

import numpy as np

__all__ = ["erfcx", "faddeeva_w", "DomainError", "RangeOverflowError"]


class DomainError(ValueError):
    """Raised when a kernel entry point receives a non-finite argument."""


class RangeOverflowError(OverflowError):
    """Raised when the reflection formula would overflow double precision."""


_SERIES_RADIUS = 2.5
_CF_RADIUS = 6.0
_CF_LEVELS = 45
_RATIONAL_N = 48
_N_SERIES_TERMS = 110

# exp(z^2) representable iff Re(z^2) < log(DBL_MAX); keep a small safety margin
_LOG_MAX = math.log(np.finfo(float).max) - 1.0

# 1 / Gamma(n/2 + 1) for the Maclaurin series of the Faddeeva function
_RGAMMA = np.array([1.0 / math.gamma(n / 2.0 + 1.0) for n in range(_N_SERIES_TERMS)])


def _rational_coeffs(n):
    # Fourier coefficients of t -> exp(-t^2) (L^2 + t^2) sampled on the mapped
    # circle; L is the standard optimal half-width for this construction.
    m = 2 * n
    k = np.arange(-m + 1, m)
    half_width = np.sqrt(n / np.sqrt(2.0))
    t = half_width * np.tan(k * np.pi / (2 * m))
    f = np.exp(-(t**2)) * (half_width**2 + t**2)
    f = np.concatenate([[0.0], f])
    a = np.real(np.fft.fft(np.fft.fftshift(f))) / (2 * m)
    return half_width, np.flipud(a[1 : n + 1])


_RAT_L, _RAT_COEFFS = _rational_coeffs(_RATIONAL_N)


def _w_series(zeta):
    # Maclaurin series; cancellation stays below ~e^{|zeta|^2} eps, fine for
    # |zeta| <= 2.5.
    term = np.ones_like(zeta)
    acc = np.zeros_like(zeta)
    iz = 1j * zeta
    for n in range(_N_SERIES_TERMS):
        acc = acc + term * _RGAMMA[n]
        term = term * iz
    return acc


def _w_rational(zeta):
    mapped = (_RAT_L + 1j * zeta) / (_RAT_L - 1j * zeta)
    p = np.polyval(_RAT_COEFFS, mapped)
    return 2.0 * p / (_RAT_L - 1j * zeta) ** 2 + (1.0 / np.sqrt(np.pi)) / (
        _RAT_L - 1j * zeta
    )


def _w_continued_fraction(zeta):
    f = np.zeros_like(zeta)
    for n in range(_CF_LEVELS, 0, -1):
        f = (n / 2.0) / (zeta - f)
    return 1j / np.sqrt(np.pi) / (zeta - f)


def _w_upper(zeta):
    """Faddeeva function for Im(zeta) >= 0, vectorized over a complex array."""
    out = np.empty_like(zeta)
    r = np.abs(zeta)
    small = r <= _SERIES_RADIUS
    large = r >= _CF_RADIUS
    mid = ~(small | large)
    if small.any():
        out[small] = _w_series(zeta[small])
    if mid.any():
        out[mid] = _w_rational(zeta[mid])
    if large.any():
        out[large] = _w_continued_fraction(zeta[large])
    return out


def erfcx(z):
    """Scaled complementary error function exp(z^2) erfc(z) for complex z.

    Parameters
    ----------
    z : complex scalar or array_like
        Argument; every component must be finite.

    Returns
    -------
    complex scalar or ndarray matching the input shape.

    Raises
    ------
    DomainError
        If any component of z is NaN or infinite.
    RangeOverflowError
        If Re(z) < 0 and exp(z^2) exceeds the double-precision range, i.e.
        the reflection formula cannot represent the result.
    """
    z_arr = np.asarray(z, dtype=complex)
    if not np.all(np.isfinite(z_arr)):
        raise DomainError("erfcx requires finite arguments")

    flat = np.atleast_1d(z_arr).ravel()
    out = np.empty_like(flat)

    right = flat.real >= 0.0
    if right.any():
        out[right] = _w_upper(1j * flat[right])
    left = ~right
    if left.any():
        zl = flat[left]
        z2 = zl * zl
        if np.any(z2.real > _LOG_MAX):
            bad = zl[z2.real > _LOG_MAX][0]
            raise RangeOverflowError(
                f"erfcx({bad}) is not representable in double precision "
                "(reflection formula would overflow)"
            )
        out[left] = 2.0 * np.exp(z2) - _w_upper(-1j * zl)

    out = out.reshape(z_arr.shape)
    if np.isscalar(z) or z_arr.ndim == 0:
        return complex(out)
    return out


def faddeeva_w(z):
    """Faddeeva function w(z) = exp(-z^2) erfc(-iz) = erfcx(-iz).

    For Im(z) > 0, Re(w) is the Voigt profile up to the 1/sqrt(pi)
    normalization.  Errors propagate from :func:`erfcx`; in particular,
    deep in the lower half-plane w grows like 2 exp(-z^2) and the call is
    refused once that factor overflows.
    """
    z_arr = np.asarray(z, dtype=complex)
    if not np.all(np.isfinite(z_arr)):
        raise DomainError("faddeeva_w requires finite arguments")
    return erfcx(-1j * z_arr)

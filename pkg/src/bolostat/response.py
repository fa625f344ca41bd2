"""Forward models of the thermometer reflection measurement chain.

Conventions used throughout (and by everything downstream):

* probe/resonance frequencies ``f_p``, ``f_r``, ``mu``, ``sigma``, ``f_b``
  are ordinary frequencies in Hz;
* energy decay rates ``gamma``, ``gamma_c``, ``gamma_b``, ``gamma_bc`` are
  angular rates in rad/s;
* detunings carry the explicit 2*pi, e.g. Delta = 2*pi*(f_r - f_p).

The line delay enters the chain as exp(i*(f_p*tau + varphi)) with no 2*pi,
so ``tau`` is in rad/Hz rather than seconds; anyone comparing against lab
conventions should divide by 2*pi.
"""

import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .specfun import erfcx

__all__ = [
    "ResonatorParams",
    "FreqDistribution",
    "BackgroundParams",
    "LineParams",
    "RlcParams",
    "RlcRates",
    "sigma_floor",
    "bare_reflection",
    "averaged_reflection",
    "averaged_reflection_gh",
    "averaged_reflection_mc",
    "background_transfer",
    "full_chain_response",
    "rlc_input_impedance",
    "rlc_rates",
]

TWO_PI = 2.0 * math.pi


@dataclass(frozen=True)
class ResonatorParams:
    """Thermometer line: resonance f_r (Hz), rates (rad/s), asymmetry (rad)."""

    f_r: float
    gamma_c: float
    gamma: float
    phi: float = 0.0

    def __post_init__(self):
        if not self.f_r > 0:
            raise ValueError(f"f_r must be positive, got {self.f_r}")
        if not 0 < self.gamma_c <= self.gamma:
            raise ValueError(
                f"need 0 < gamma_c <= gamma, got gamma_c={self.gamma_c}, gamma={self.gamma}"
            )
        if not -math.pi < self.phi <= math.pi:
            raise ValueError(f"phi must lie in (-pi, pi], got {self.phi}")


@dataclass(frozen=True)
class FreqDistribution:
    """Gaussian law of the resonance frequency: mean mu (Hz), std sigma (Hz)."""

    mu: float
    sigma: float

    def __post_init__(self):
        if not self.mu > 0:
            raise ValueError(f"mu must be positive, got {self.mu}")
        if not self.sigma >= 0:
            raise ValueError(f"sigma must be non-negative, got {self.sigma}")


@dataclass(frozen=True)
class BackgroundParams:
    """Output-path transfer function: scale, Lorentzian term, asymmetry."""

    s_b: float
    f_b: float
    gamma_bc: float
    gamma_b: float
    phi_b: float = 0.0

    def __post_init__(self):
        if not self.gamma_b > 0:
            raise ValueError(f"gamma_b must be positive, got {self.gamma_b}")


@dataclass(frozen=True)
class LineParams:
    """Cable delay tau (rad/Hz, see module docstring) and phase offset (rad)."""

    tau: float
    varphi: float = 0.0

    def __post_init__(self):
        if not self.tau >= 0:
            raise ValueError(f"tau must be non-negative, got {self.tau}")


@dataclass(frozen=True)
class RlcParams:
    """Parallel RLC thermometer capacitively coupled to a Z0 feedline.

    Z = sqrt(L/C) is the characteristic impedance (Ohm), C_g the coupling
    capacitance (F), Q_i the internal quality factor.  Construction asserts
    the small-coupling expansion regime 2*pi*f_r*Z*C_g < 0.1.
    """

    Z: float
    C_g: float
    Q_i: float
    f_r: float
    Z0: float = 50.0

    def __post_init__(self):
        for name in ("Z", "C_g", "Q_i", "f_r", "Z0"):
            if not getattr(self, name) > 0:
                raise ValueError(f"{name} must be positive, got {getattr(self, name)}")
        coupling = TWO_PI * self.f_r * self.Z * self.C_g
        if coupling >= 0.1:
            raise ValueError(
                f"small-coupling expansion invalid: 2*pi*f_r*Z*C_g = {coupling:.3g} >= 0.1"
            )


class RlcRates(NamedTuple):
    gamma_i: float
    gamma_c_expr: float


def sigma_floor(gamma):
    """Smallest broadening (Hz) handled by the closed-form Gaussian average.

    Below 1e-6 of the linewidth gamma/(2*pi) the erfcx argument leaves any
    usefully representable range, so `averaged_reflection` falls back to the
    bare Lorentzian there; the seam is continuous to well below 1e-6.
    """
    return 1e-6 * gamma / TWO_PI


def bare_reflection(res, f_p):
    """Reflection of the bare line: S11 = 1 - e^{i phi} gamma_c / (gamma/2 + i Delta).

    Delta = 2*pi*(f_r - f_p).  Accepts a scalar or array probe frequency.
    """
    delta = TWO_PI * (res.f_r - np.asarray(f_p, dtype=float))
    return 1.0 - np.exp(1j * res.phi) * res.gamma_c / (res.gamma / 2.0 + 1j * delta)


def averaged_reflection(res, dist, f_p):
    """Reflection averaged over f_r ~ N(mu, sigma^2), in closed form.

    <S11> = 1 - e^{i phi} gamma_c / (2 sqrt(2 pi) sigma)
                * erfcx( (gamma/2 + i Delta') / (2 sqrt(2) pi sigma) )

    with Delta' = 2*pi*(mu - f_p).  The magnitude of the result is the Voigt
    profile of the line.  For sigma below `sigma_floor(gamma)` the Gaussian is
    effectively a delta distribution and the bare line at f_r = mu is returned.
    """
    if dist.sigma <= sigma_floor(res.gamma):
        return bare_reflection(
            ResonatorParams(dist.mu, res.gamma_c, res.gamma, res.phi), f_p
        )
    dprime = TWO_PI * (dist.mu - np.asarray(f_p, dtype=float))
    arg = (res.gamma / 2.0 + 1j * dprime) / (2.0 * math.sqrt(2.0) * math.pi * dist.sigma)
    prefactor = res.gamma_c / (2.0 * math.sqrt(TWO_PI) * dist.sigma)
    return 1.0 - np.exp(1j * res.phi) * prefactor * erfcx(arg)


def averaged_reflection_gh(res, dist, f_p, n_nodes=64):
    """Gauss-Hermite quadrature of `bare_reflection` over f_r ~ N(mu, sigma^2).

    Independent cross-check for `averaged_reflection`.  Converges extremely
    fast while sigma stays below roughly a third of the linewidth
    gamma/(2*pi); for broader distributions the integrand's pole sits too
    close to the node line and more nodes are required (the convergence
    factor is about exp(-2*d*sqrt(2*n+1)) with d = gamma/(4*sqrt(2)*pi*sigma)).
    """
    nodes, weights = np.polynomial.hermite.hermgauss(n_nodes)
    f_r = dist.mu + math.sqrt(2.0) * dist.sigma * nodes
    f_p = np.atleast_1d(np.asarray(f_p, dtype=float))
    vals = _bare_grid(res, f_r, f_p)
    out = (weights[:, None] * vals).sum(axis=0) / math.sqrt(math.pi)
    return out if out.size > 1 else complex(out[0])


def _bare_grid(res, f_r, f_p):
    # bare_reflection evaluated on an (f_r, f_p) outer grid
    delta = TWO_PI * (np.asarray(f_r)[:, None] - np.asarray(f_p)[None, :])
    return 1.0 - np.exp(1j * res.phi) * res.gamma_c / (res.gamma / 2.0 + 1j * delta)


def averaged_reflection_mc(res, dist, f_p, n_samples, seed, chunk=20000):
    """Monte-Carlo average of `bare_reflection` over f_r ~ N(mu, sigma^2).

    Brute-force oracle for `averaged_reflection`.  Draws come from a
    counter-based Philox generator keyed by ``seed``, so the result is
    reproducible and independent of chunking; the reduction order over
    chunks is fixed.
    """
    if n_samples < 1:
        raise ValueError(f"n_samples must be >= 1, got {n_samples}")
    f_p = np.atleast_1d(np.asarray(f_p, dtype=float))
    rng = np.random.Generator(np.random.Philox(seed))
    acc = np.zeros(f_p.shape, dtype=complex)
    drawn = 0
    while drawn < n_samples:
        m = min(chunk, n_samples - drawn)
        f_r = rng.normal(dist.mu, dist.sigma, m)
        acc += _bare_grid(res, f_r, f_p).sum(axis=0)
        drawn += m
    out = acc / n_samples
    return out if out.size > 1 else complex(out[0])


def background_transfer(bg, f_p, n_resonances=1, spacing=80e6):
    """Output-path transfer function H(f_p) = s_b + e^{i phi_b} gamma_bc / (gamma_b/2 + i Delta_b).

    Delta_b = 2*pi*(f_b - f_p).  With ``n_resonances`` > 1 the Lorentzian term
    is repeated at f_b + k*spacing (the output path of a real chain shows a
    comb of such mismatch resonances; the default spacing is 80 MHz).
    """
    f_p = np.asarray(f_p, dtype=float)
    term = 0.0
    for k in range(n_resonances):
        delta_b = TWO_PI * (bg.f_b + k * spacing - f_p)
        term = term + np.exp(1j * bg.phi_b) * bg.gamma_bc / (
            bg.gamma_b / 2.0 + 1j * delta_b
        )
    return bg.s_b + term


def full_chain_response(res, dist, bg, line, f_p, n_resonances=1, spacing=80e6):
    """Everything the digitizer sees: delay/phase * background * averaged line.

    S11(f_p) = exp(i*(f_p*tau + varphi)) H(f_p) <S11(f_p)>

    Note the delay phase is f_p*tau with no 2*pi (tau in rad/Hz).  This is
    the function the staged fits are run against.
    """
    f_p = np.asarray(f_p, dtype=float)
    line_factor = np.exp(1j * (f_p * line.tau + line.varphi))
    return (
        line_factor
        * background_transfer(bg, f_p, n_resonances, spacing)
        * averaged_reflection(res, dist, f_p)
    )


def rlc_input_impedance(circuit, delta_f):
    """Input impedance near resonance: Z_in = R' - i*2*L'*delta_f (Ohm).

    R' = 1/(8 pi Z C_g^2 Q_i f_r^2), L' = 1/(8 pi Z C_g^2 f_r^3); first-order
    expansion around f_r, valid for |delta_f| << f_r.
    """
    r_eff = 1.0 / (8.0 * math.pi * circuit.Z * circuit.C_g**2 * circuit.Q_i * circuit.f_r**2)
    l_eff = 1.0 / (8.0 * math.pi * circuit.Z * circuit.C_g**2 * circuit.f_r**3)
    return r_eff - 1j * 2.0 * l_eff * np.asarray(delta_f, dtype=float)


def rlc_rates(circuit):
    """Damping rates of the RLC picture: (gamma_i, gamma_c_expr).

    gamma_i = 2*pi*f_r/Q_i is an ordinary angular rate.  gamma_c_expr is the
    textbook small-coupling expression 4*Z*Z0*C_g^2*f_r returned verbatim;
    note it does not carry rad/s units as written (it is dimensionally a
    time unless f_r enters with a higher power), so nothing else in this
    package consumes it -- the fitted gamma_c is always used instead.
    """
    gamma_i = TWO_PI * circuit.f_r / circuit.Q_i
    gamma_c_expr = 4.0 * circuit.Z * circuit.Z0 * circuit.C_g**2 * circuit.f_r
    return RlcRates(gamma_i=gamma_i, gamma_c_expr=gamma_c_expr)

"""Closed-form switching model for partially poled ferroelectric films.

The model has three layers:

* a field-time kinetic law ``tau(E) = tau_inf * exp((E_a/E)**alpha)`` and its
  inversion to a pulse-width-dependent half-switching voltage,
* a Cauchy (Lorentzian) distribution of switching thresholds on the log10
  voltage axis, giving an arctangent transfer function for the switched
  fraction,
* an affine map from switched fraction to the mechanically read displacement,
  ``delta = y0 + A * S``.

A general nucleation-limited switching integral over a distribution of
logarithmic switching times is also provided; in the narrow-distribution
limit it reduces to the classical stretched-exponential switching law.

All distribution parameters exposed here are in decades (log10); the
switching-time integral works on the natural-log axis internally.
"""

import math
from dataclasses import dataclass

import numpy as np

from .errors import ConfigError, DomainError

LN10 = math.log(10.0)

# Cauchy tails are heavy enough to produce unphysical (negative or
# kilovolt-scale) thresholds; sampling and quadrature are confined to
# location +/- TRUNCATION_HALF_WIDTHS * scale (> 96.8% of the mass).
TRUNCATION_HALF_WIDTHS = 10.0


@dataclass(frozen=True)
class MerzKinetics:
    """Field-time switching kinetics.

    alpha    dimensionless field exponent
    tau_inf  attempt time in the infinite-field limit (s)
    e_a      activation field (V/m)
    t_film   ferroelectric film thickness (m)
    """

    alpha: float
    tau_inf: float
    e_a: float
    t_film: float

    def __post_init__(self):
        if not (self.alpha > 0 and self.tau_inf > 0 and self.e_a > 0 and self.t_film > 0):
            raise ConfigError("MerzKinetics requires alpha, tau_inf, e_a, t_film all > 0")
        if not math.isfinite(self.mu_star):
            raise ConfigError("MerzKinetics: log10(e_a * t_film) must be finite")

    @property
    def mu_star(self):
        """log10 of the activation voltage e_a * t_film, in decades."""
        return math.log10(self.e_a * self.t_film)

    @classmethod
    def from_mu_star(cls, alpha, tau_inf, mu_star, t_film):
        """Build kinetics from the regression intercept mu_star = log10(E_a * t_film)."""
        return cls(alpha=alpha, tau_inf=tau_inf, e_a=10.0**mu_star / t_film, t_film=t_film)


@dataclass(frozen=True)
class ThresholdDistribution:
    """Cauchy threshold distribution on the log10-voltage axis.

    mu  median of log10(V_p), decades
    w   half-width at half-maximum, decades
    """

    mu: float
    w: float

    def __post_init__(self):
        if not self.w > 0:
            raise ConfigError("ThresholdDistribution requires w > 0")
        if not (math.isfinite(self.mu) and self.v50 > 0):
            raise ConfigError("ThresholdDistribution requires finite mu")

    @property
    def v50(self):
        """Half-switching voltage 10**mu (V)."""
        return 10.0**self.mu


@dataclass(frozen=True)
class DeviceCalibration:
    """Per-device constants for reading and programming.

    delta_min / delta_max  displacements of the fully reset / fully poled
                           states (nm)
    v_ac                   small-signal read drive amplitude (V)
    t_film                 ferroelectric thickness (m)
    k_geom                 geometric gain, opaque calibration scalar (never
                           computed from beam mechanics here)
    read_noise_sigma       displacement read noise std (nm)
    dac_bits               DAC resolution controlling V_p
    dac_range              (V_min, V_max) programmable span (V)
    """

    delta_min: float
    delta_max: float
    v_ac: float
    t_film: float
    k_geom: float = 1.0
    read_noise_sigma: float = 0.0
    dac_bits: int = 18
    dac_range: tuple = (0.5, 9.0)

    def __post_init__(self):
        if not self.delta_max > self.delta_min:
            raise ConfigError("DeviceCalibration requires delta_max > delta_min")
        if not (self.v_ac > 0 and self.t_film > 0):
            raise ConfigError("DeviceCalibration requires v_ac > 0 and t_film > 0")
        if self.read_noise_sigma < 0:
            raise ConfigError("read_noise_sigma must be >= 0")
        if int(self.dac_bits) < 1:
            raise ConfigError("dac_bits must be >= 1")
        lo, hi = self.dac_range
        if not hi > lo:
            raise ConfigError("dac_range must satisfy V_max > V_min")

    @property
    def span(self):
        return self.delta_max - self.delta_min


@dataclass(frozen=True)
class NlsSpec:
    """Configuration of the nucleation-limited switching integral.

    exponent         effective dimensionality n of the switching law
    location, scale  Cauchy parameters of the switching-time distribution on
                     the ln(tau) axis
    band_half_widths integration band half-width in multiples of scale
    nodes            trapezoid node count (>= 32)
    """

    exponent: float
    location: float
    scale: float
    band_half_widths: float = TRUNCATION_HALF_WIDTHS
    nodes: int = 512

    def __post_init__(self):
        if not self.exponent > 0:
            raise ConfigError("NlsSpec requires exponent > 0")
        if not self.scale > 0:
            raise ConfigError("NlsSpec requires scale > 0")
        if not self.band_half_widths > 0:
            raise ConfigError("NlsSpec requires band_half_widths > 0")
        if int(self.nodes) < 32:
            raise ConfigError("NlsSpec requires at least 32 quadrature nodes")


def _as_float_or_array(x_in, out):
    out = np.asarray(out)
    return float(out) if out.ndim == 0 else out


def tau_of_field(kinetics, e_field):
    """Switching time tau(E) = tau_inf * exp((E_a/E)**alpha), E in V/m.

    Strictly decreasing in E; tends to tau_inf as E -> infinity.
    """
    e = np.asarray(e_field, dtype=float)
    if np.any(e <= 0):
        raise DomainError("tau_of_field requires E > 0")
    # far below the activation field the time overflows to inf, which is the
    # honest limit of the law
    with np.errstate(over="ignore"):
        tau = kinetics.tau_inf * np.exp((kinetics.e_a / e) ** kinetics.alpha)
    return _as_float_or_array(e_field, tau)


def threshold_voltage(kinetics, t_p):
    """Half-switching voltage for a pulse of width t_p (s).

    Inverts the kinetic law at tau = t_p:
    V50(t_p) = E_a * t_film / ln(t_p / tau_inf)**(1/alpha).
    Strictly decreasing in t_p; requires t_p > tau_inf.
    """
    t = np.asarray(t_p, dtype=float)
    if np.any(t <= kinetics.tau_inf):
        raise DomainError("threshold_voltage requires t_p > tau_inf")
    v = kinetics.e_a * kinetics.t_film / np.log(t / kinetics.tau_inf) ** (1.0 / kinetics.alpha)
    return _as_float_or_array(t_p, v)


def switched_fraction_cdf(dist, v_p):
    """Switched fraction S(V_p) = 1/2 + arctan((log10 V_p - mu)/w) / pi.

    Strictly increasing in V_p with range (0, 1); requires V_p > 0.
    """
    v = np.asarray(v_p, dtype=float)
    if np.any(v <= 0):
        raise DomainError("switched_fraction_cdf requires V_p > 0")
    s = 0.5 + np.arctan((np.log10(v) - dist.mu) / dist.w) / np.pi
    return _as_float_or_array(v_p, s)


def threshold_quantile(dist, s):
    """Inverse of the switched-fraction CDF: the voltage hitting fraction s.

    V_p = 10**(mu + w * tan(pi*(s - 1/2))) for s strictly inside (0, 1).
    """
    ss = np.asarray(s, dtype=float)
    if np.any(ss <= 0) or np.any(ss >= 1):
        raise DomainError("threshold_quantile requires 0 < s < 1")
    v = 10.0 ** (dist.mu + dist.w * np.tan(np.pi * (ss - 0.5)))
    return _as_float_or_array(s, v)


def threshold_pdf(dist, x):
    """Cauchy density of thresholds at x = log10 V_p, per decade.

    f(x) = (1/pi) * w / ((x - mu)^2 + w^2); peak 1/(pi*w) at x = mu.
    """
    xx = np.asarray(x, dtype=float)
    f = dist.w / (np.pi * ((xx - dist.mu) ** 2 + dist.w**2))
    return _as_float_or_array(x, f)


def displacement_of_fraction(y0, a, s):
    """Displacement of a partially switched state: delta = y0 + A * S (nm)."""
    ss = np.asarray(s, dtype=float)
    if np.any(ss < 0) or np.any(ss > 1):
        raise DomainError("displacement_of_fraction requires 0 <= S <= 1")
    return _as_float_or_array(s, y0 + a * ss)


def lorentzian_displacement(y0, a, mu, w, v_p):
    """Full transfer function delta(V_p) = y0 + A * S(V_p) for given (mu, w)."""
    return displacement_of_fraction(y0, a, switched_fraction_cdf(ThresholdDistribution(mu, w), v_p))


def nls_switched_fraction(spec, t):
    """Switched fraction after a pulse of duration t (s) under the NLS integral.

    Integrates [1 - exp(-(t/tau)^n)] against the Cauchy distribution of
    ln(tau), truncated to location +/- band_half_widths * scale and
    renormalized to unit mass over the band (fixed-node trapezoid).
    Result is clamped to [0, 1] and is nondecreasing in t.

    In the scale -> 0 limit this reduces to 1 - exp(-(t/tau0)^n) with
    tau0 = exp(location).
    """
    t = float(t)
    if t < 0:
        raise DomainError("nls_switched_fraction requires t >= 0")
    if t == 0.0:
        return 0.0
    half = spec.band_half_widths * spec.scale
    u = np.linspace(spec.location - half, spec.location + half, int(spec.nodes))
    dens = spec.scale / (np.pi * ((u - spec.location) ** 2 + spec.scale**2))
    with np.errstate(over="ignore", under="ignore"):
        switched = -np.expm1(-((t * np.exp(-u)) ** spec.exponent))
    # uniform-step trapezoid; normalizing by the band mass makes the
    # truncated distribution a proper one
    weights = np.ones_like(u)
    weights[0] = weights[-1] = 0.5
    value = float(np.sum(weights * switched * dens) / np.sum(weights * dens))
    return min(1.0, max(0.0, value))

"""Kinetic-law extraction and the universal data collapse.

The fitted medians mu(t_p) are regressed against X(t_p) =
log10[ln(t_p/tau_inf)]; the slope is -1/alpha and the intercept mu_* =
log10(E_a * t_film). tau_inf can be held fixed or profiled out by a 1-D
search (coarse grid, then golden-section refinement) over log10(tau_inf).

The collapse maps every sweep onto the reduced coordinates
z = (log10 V_p - mu)/w, s_bar = (value - y0)/A, where the master curve is
1/2 + arctan(z)/pi regardless of pulse width.
"""

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import ConfigError, DomainError
from .model import MerzKinetics

# slopes smaller than this are reported as degenerate (alpha = inf) rather
# than dividing by near-zero
_DEGENERATE_SLOPE = 1e-6

_GOLDEN = (math.sqrt(5.0) - 1.0) / 2.0


@dataclass(frozen=True)
class MerzRegression:
    """Result of regressing medians against X = log10[ln(t_p/tau_inf)]."""

    alpha: float
    tau_inf: float
    mu_star: float
    slope: float
    r_squared: float
    x_values: np.ndarray
    degenerate: bool = False

    def __post_init__(self):
        if not self.degenerate and abs(self.slope + 1.0 / self.alpha) > 1e-12 * abs(self.slope):
            raise ConfigError("MerzRegression requires slope == -1/alpha")

    def kinetics(self, t_film):
        """Materialize the regression as a kinetic law for a given thickness."""
        return MerzKinetics.from_mu_star(self.alpha, self.tau_inf, self.mu_star, t_film)

    def mu_fit(self):
        """Fitted medians at the regression's own X values."""
        return self.mu_star + self.slope * self.x_values


def _split_points(points):
    tp = np.asarray([p[0] for p in points], dtype=float)
    mu = np.asarray([p[1] for p in points], dtype=float)
    return tp, mu


def regress_mu_fixed_tau(points, tau_inf):
    """Ordinary least squares of mu on X at a fixed attempt time.

    ``points`` is a sequence of (t_p seconds, mu decades) pairs, >= 3 of
    them with distinct t_p all exceeding tau_inf. A near-zero slope yields a
    flagged degenerate result (alpha = inf) instead of an exception.
    """
    tp, mu = _split_points(points)
    if tp.size < 3:
        raise ConfigError("regression requires >= 3 (t_p, mu) points")
    if np.unique(tp).size != tp.size:
        raise ConfigError("regression requires distinct t_p values")
    if np.any(tp <= tau_inf):
        raise DomainError("all t_p must exceed tau_inf")

    x = np.log10(np.log(tp / tau_inf))
    dx = x - x.mean()
    dy = mu - mu.mean()
    sxx = float(dx @ dx)
    if sxx == 0.0:
        raise ConfigError("degenerate regression: all X values identical")
    slope = float(dx @ dy) / sxx
    intercept = float(mu.mean() - slope * x.mean())
    ss_res = float(np.sum((mu - (intercept + slope * x)) ** 2))
    ss_tot = float(dy @ dy)
    r2 = 1.0 - ss_res / ss_tot if ss_tot > 0 else 1.0

    degenerate = abs(slope) < _DEGENERATE_SLOPE
    alpha = math.inf if degenerate else -1.0 / slope
    return MerzRegression(alpha=alpha, tau_inf=float(tau_inf), mu_star=intercept,
                          slope=slope, r_squared=r2, x_values=x, degenerate=degenerate)


def _rss_at(points, log10_tau):
    tp, mu = _split_points(points)
    x = np.log10(np.log(tp / 10.0**log10_tau))
    dx = x - x.mean()
    slope = float(dx @ (mu - mu.mean())) / float(dx @ dx)
    intercept = mu.mean() - slope * x.mean()
    return float(np.sum((mu - (intercept + slope * x)) ** 2))


def fit_merz_nested(points, tau_search=(-16.0, -10.0)):
    """Profile the regression over tau_inf.

    Minimizes the inner regression's residual sum of squares over
    log10(tau_inf) on ``tau_search``: a 121-point coarse grid followed by
    golden-section refinement to 1e-3 in log10(tau_inf). With only a handful
    of pulse widths the (alpha, tau_inf) pair trades off strongly; expect
    tau_inf to be constrained to roughly an order of magnitude.
    """
    tp, _ = _split_points(points)
    if tp.size < 3:
        raise ConfigError("nested fit requires >= 3 (t_p, mu) points")
    lo, hi = float(tau_search[0]), float(tau_search[1])
    if not hi > lo:
        raise ConfigError("tau_search interval must satisfy hi > lo")

    log_tp_min = math.log10(tp.min())
    grid = np.linspace(lo, hi, 121)
    feasible = grid < log_tp_min
    if not feasible.any():
        raise DomainError("no tau_inf in the search interval is below every t_p")
    grid = grid[feasible]
    rss = np.array([_rss_at(points, g) for g in grid])
    k = int(np.argmin(rss))

    a = grid[max(k - 1, 0)]
    b = grid[min(k + 1, grid.size - 1)]
    c = b - _GOLDEN * (b - a)
    d = a + _GOLDEN * (b - a)
    fc, fd = _rss_at(points, c), _rss_at(points, d)
    while b - a > 1e-3:
        if fc < fd:
            b, d, fd = d, c, fc
            c = b - _GOLDEN * (b - a)
            fc = _rss_at(points, c)
        else:
            a, c, fc = c, d, fd
            d = a + _GOLDEN * (b - a)
            fd = _rss_at(points, d)
    best = 0.5 * (a + b)
    return regress_mu_fixed_tau(points, 10.0**best)


@dataclass(frozen=True)
class CollapsePoint:
    """One sample in reduced coordinates: z and normalized displacement s_bar."""

    z: float
    s_bar: float

    def __post_init__(self):
        if not math.isfinite(self.z):
            raise DomainError("collapse point requires finite z")
        if not (-0.2 <= self.s_bar <= 1.2):
            raise DomainError("s_bar outside the [-0.2, 1.2] noise allowance")


def master_curve(z):
    """Parameter-free master transfer function 1/2 + arctan(z)/pi."""
    return 0.5 + np.arctan(np.asarray(z, dtype=float)) / np.pi


def collapse_transform(curve, fit):
    """Map a sweep onto reduced coordinates using its own fit.

    z = (log10 V_p - mu)/w and s_bar = (value - y0)/A per sample. The fit
    must belong to the curve's pulse width.
    """
    if not math.isclose(curve.t_p, fit.t_p, rel_tol=1e-9):
        raise DomainError(f"fit is for t_p={fit.t_p}, curve has t_p={curve.t_p}")
    z = (np.log10(curve.v_p) - fit.mu) / fit.w
    s_bar = (curve.values - fit.y0) / fit.a
    return [CollapsePoint(z=float(zz), s_bar=float(ss)) for zz, ss in zip(z, s_bar)]


def collapse_rms(points):
    """RMS deviation of collapse points from the master curve."""
    if len(points) == 0:
        raise ConfigError("collapse_rms requires >= 1 point")
    z = np.array([p.z for p in points])
    s = np.array([p.s_bar for p in points])
    return float(np.sqrt(np.mean((s - master_curve(z)) ** 2)))

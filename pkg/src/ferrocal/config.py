"""Run configuration: a flat INI file with one section per subsystem.

Every key is scalar and human-editable; lists (pulse widths, targets) are
comma-separated. Unknown sections or keys are rejected so typos fail loudly.
The only environment variable honored anywhere is FERROCAL_OUT_DIR, an
output-directory default for the CLI.
"""

import configparser
from dataclasses import dataclass, field
from pathlib import Path

from .errors import ConfigError
from .model import DeviceCalibration, MerzKinetics
from .simulate import TriangularPulse, WriteProtocol

_KNOWN_KEYS = {
    "run": {"seed"},
    "device": {"delta_min_nm", "delta_max_nm", "v_ac_v", "t_film_m", "k_geom",
               "read_noise_sigma_nm", "dac_bits", "dac_vmin_v", "dac_vmax_v"},
    "protocol": {"reset_peak_v", "reset_width_s", "reset_count",
                 "write_peak_v", "write_count"},
    "ensemble": {"n", "mu_star", "w"},
    "kinetics": {"alpha", "tau_inf_s", "t_film_m"},
    "sweep": {"v_start_v", "v_stop_v", "v_step_v", "t_p_us", "observable", "p_r_uc_cm2"},
    "fit": {"share_offsets"},
    "merz": {"tau_inf_s", "search_lo", "search_hi"},
    "levels": {"margin_nm", "targets"},
}


@dataclass(frozen=True)
class SweepPlan:
    """Voltage grid and pulse widths for simulated sweeps."""

    v_start: float = 0.5
    v_stop: float = 9.0
    v_step: float = 0.005
    t_p: tuple = (10e-6, 20e-6, 100e-6, 200e-6, 500e-6)
    observable_kind: str = "displacement"
    p_r: float = 20.0

    def __post_init__(self):
        if not (self.v_stop > self.v_start > 0 and self.v_step > 0):
            raise ConfigError("sweep requires 0 < v_start < v_stop and v_step > 0")
        if not self.t_p or any(t <= 0 for t in self.t_p):
            raise ConfigError("sweep requires positive pulse widths")

    def grid(self):
        import numpy as np

        n = int(round((self.v_stop - self.v_start) / self.v_step)) + 1
        return self.v_start + self.v_step * np.arange(n)


@dataclass(frozen=True)
class RunConfig:
    """Everything one CLI invocation needs, validated block by block."""

    seed: int = 42
    device: DeviceCalibration = field(default_factory=lambda: DeviceCalibration(
        delta_min=-19.1364, delta_max=5.1152, v_ac=0.25, t_film=17e-9))
    kinetics: MerzKinetics = field(default_factory=lambda: MerzKinetics.from_mu_star(
        alpha=3.62, tau_inf=1.4e-14, mu_star=1.0694533407, t_film=17e-9))
    ensemble_n: int = 100_000
    ensemble_mu_star: float = 1.0694533407
    ensemble_w: float = 0.038244
    reset_peak: float = -9.0
    reset_width: float = 500e-6
    reset_count: int = 2
    write_peak: float = 5.0
    write_count: int = 2
    sweep: SweepPlan = field(default_factory=SweepPlan)
    share_offsets: bool = False
    merz_tau_inf: float | None = 1.4e-14
    merz_search: tuple = (-16.0, -10.0)
    levels_margin: float = 0.0
    levels_targets: tuple = (0.25, 0.5, 0.75)

    def protocol_for(self, t_p):
        """Write protocol template for one pulse width."""
        return WriteProtocol(
            reset_pulse=TriangularPulse(self.reset_peak, self.reset_width),
            write_pulse=TriangularPulse(self.write_peak, t_p),
            reset_count=self.reset_count,
            write_count=self.write_count,
        )


def _get(parser, section, key, cast, default):
    if not parser.has_option(section, key):
        return default
    raw = parser.get(section, key)
    try:
        if cast is bool:
            if raw.strip().lower() in ("true", "1", "yes", "on"):
                return True
            if raw.strip().lower() in ("false", "0", "no", "off"):
                return False
            raise ValueError(raw)
        return cast(raw)
    except ValueError:
        raise ConfigError(f"[{section}] {key}: cannot parse {raw!r}") from None


def _floats(raw):
    return tuple(float(tok) for tok in raw.split(",") if tok.strip())


def load_config(path):
    """Parse and validate an INI run configuration."""
    path = Path(path)
    if not path.exists():
        raise ConfigError(f"no such config file: {path}")
    parser = configparser.ConfigParser()
    try:
        parser.read(path)
    except configparser.Error as exc:
        raise ConfigError(f"malformed config: {exc}") from None

    for section in parser.sections():
        if section not in _KNOWN_KEYS:
            raise ConfigError(f"unknown config section [{section}]")
        for key in parser.options(section):
            if key not in _KNOWN_KEYS[section]:
                raise ConfigError(f"unknown key {key!r} in section [{section}]")

    defaults = RunConfig()
    device = DeviceCalibration(
        delta_min=_get(parser, "device", "delta_min_nm", float, defaults.device.delta_min),
        delta_max=_get(parser, "device", "delta_max_nm", float, defaults.device.delta_max),
        v_ac=_get(parser, "device", "v_ac_v", float, defaults.device.v_ac),
        t_film=_get(parser, "device", "t_film_m", float, defaults.device.t_film),
        k_geom=_get(parser, "device", "k_geom", float, defaults.device.k_geom),
        read_noise_sigma=_get(parser, "device", "read_noise_sigma_nm", float,
                              defaults.device.read_noise_sigma),
        dac_bits=_get(parser, "device", "dac_bits", int, defaults.device.dac_bits),
        dac_range=(
            _get(parser, "device", "dac_vmin_v", float, defaults.device.dac_range[0]),
            _get(parser, "device", "dac_vmax_v", float, defaults.device.dac_range[1]),
        ),
    )
    kin_t_film = _get(parser, "kinetics", "t_film_m", float, defaults.kinetics.t_film)
    kinetics = MerzKinetics.from_mu_star(
        alpha=_get(parser, "kinetics", "alpha", float, defaults.kinetics.alpha),
        tau_inf=_get(parser, "kinetics", "tau_inf_s", float, defaults.kinetics.tau_inf),
        mu_star=_get(parser, "ensemble", "mu_star", float, defaults.ensemble_mu_star),
        t_film=kin_t_film,
    )
    tp_us = parser.get("sweep", "t_p_us") if parser.has_option("sweep", "t_p_us") else None
    sweep = SweepPlan(
        v_start=_get(parser, "sweep", "v_start_v", float, defaults.sweep.v_start),
        v_stop=_get(parser, "sweep", "v_stop_v", float, defaults.sweep.v_stop),
        v_step=_get(parser, "sweep", "v_step_v", float, defaults.sweep.v_step),
        t_p=tuple(t * 1e-6 for t in _floats(tp_us)) if tp_us else defaults.sweep.t_p,
        observable_kind=_get(parser, "sweep", "observable", str, defaults.sweep.observable_kind),
        p_r=_get(parser, "sweep", "p_r_uc_cm2", float, defaults.sweep.p_r),
    )
    if sweep.observable_kind not in ("displacement", "polarization_change"):
        raise ConfigError(f"[sweep] observable: unknown kind {sweep.observable_kind!r}")

    merz_tau = _get(parser, "merz", "tau_inf_s", float, defaults.merz_tau_inf)
    targets_raw = parser.get("levels", "targets") if parser.has_option("levels", "targets") else None

    cfg = RunConfig(
        seed=_get(parser, "run", "seed", int, defaults.seed),
        device=device,
        kinetics=kinetics,
        ensemble_n=_get(parser, "ensemble", "n", int, defaults.ensemble_n),
        ensemble_mu_star=_get(parser, "ensemble", "mu_star", float, defaults.ensemble_mu_star),
        ensemble_w=_get(parser, "ensemble", "w", float, defaults.ensemble_w),
        reset_peak=_get(parser, "protocol", "reset_peak_v", float, defaults.reset_peak),
        reset_width=_get(parser, "protocol", "reset_width_s", float, defaults.reset_width),
        reset_count=_get(parser, "protocol", "reset_count", int, defaults.reset_count),
        write_peak=_get(parser, "protocol", "write_peak_v", float, defaults.write_peak),
        write_count=_get(parser, "protocol", "write_count", int, defaults.write_count),
        sweep=sweep,
        share_offsets=_get(parser, "fit", "share_offsets", bool, defaults.share_offsets),
        merz_tau_inf=merz_tau,
        merz_search=(
            _get(parser, "merz", "search_lo", float, defaults.merz_search[0]),
            _get(parser, "merz", "search_hi", float, defaults.merz_search[1]),
        ),
        levels_margin=_get(parser, "levels", "margin_nm", float, defaults.levels_margin),
        levels_targets=_floats(targets_raw) if targets_raw else defaults.levels_targets,
    )
    if cfg.ensemble_n < 1 or cfg.ensemble_w <= 0:
        raise ConfigError("[ensemble] requires n >= 1 and w > 0")
    if cfg.levels_margin < 0:
        raise ConfigError("[levels] margin_nm must be >= 0")
    for t in cfg.levels_targets:
        if not 0 < t < 1:
            raise ConfigError("[levels] targets must lie strictly inside (0, 1)")
    # constructing the protocol validates pulse signs and counts
    cfg.protocol_for(cfg.sweep.t_p[0])
    return cfg

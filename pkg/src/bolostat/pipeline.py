"""End-to-end synthetic sweeps: configuration, trace synthesis, staged
extraction of photon moments, and file I/O.

A sweep walks a control variable (radiator temperature or coherent input
flux), synthesizes the full-chain reflection trace implied by the photon
statistics at each point, and stores the truth alongside for round-trip
scoring.  Extraction runs the staged fit (one base calibration, one
six-parameter fit per trace), converts the fitted resonance shift into a
mean photon flux through the configured calibration polynomial, converts
the fitted broadening into a variance through Delta_n = alpha*sigma
referenced to the base trace, and reports g2(0).

File formats (all deterministic given the same inputs):

* traces: CSV with header ``f_p_hz,re,im``
* datasets: one JSON document with config, truth table, and traces
* statistics: CSV with header ``control,mu_hz,sigma_hz,mean_n,variance_n,
  g2,power_w,converged,n_iter,residual_norm``
"""

import csv
import dataclasses
import json
import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass

import numpy as np

from .fitkit import (
    PARAM_NAMES,
    ComplexSweep,
    FullModelParams,
    _chain_model,  # synthesis reuses the single forward-model implementation
    fit_base_calibration,
    fit_measurement,
)
from .photonstats import (
    CalibrationScale,
    RadiatorState,
    beamsplitter_combine,
    coherent_variance,
    flux_to_power,
    mixed_moments,
    planck_mean_photon,
    thermal_variance,
)
from .response import sigma_floor

__all__ = [
    "ConfigError",
    "ChainParams",
    "SweepConfig",
    "TracePoint",
    "SweepDataset",
    "StatsRecord",
    "simulate_sweep",
    "run_calibration",
    "extract_statistics",
    "default_seed",
    "trace_to_csv",
    "trace_from_csv",
    "dataset_to_json",
    "dataset_from_json",
    "stats_to_csv",
    "stats_from_csv",
    "DATASET_FORMAT",
]

DATASET_FORMAT = "bolostat-dataset-v1"
STATS_HEADER = [
    "control",
    "mu_hz",
    "sigma_hz",
    "mean_n",
    "variance_n",
    "g2",
    "power_w",
    "converged",
    "n_iter",
    "residual_norm",
]

MODES = ("thermal", "coherent", "mixed")


class ConfigError(ValueError):
    """A sweep configuration field failed validation."""


def default_seed(explicit=None, config_seed=0):
    """Seed precedence: explicit flag > BOLOSTAT_SEED env var > config."""
    if explicit is not None:
        return int(explicit)
    env = os.environ.get("BOLOSTAT_SEED")
    if env is not None:
        try:
            return int(env)
        except ValueError:
            raise ConfigError(f"BOLOSTAT_SEED must be an integer, got {env!r}") from None
    return int(config_seed)


@dataclass(frozen=True)
class ChainParams:
    """True measurement-chain scalars used for synthesis (see fitkit.PARAM_NAMES)."""

    mu_base_hz: float
    gamma_c: float
    phi: float
    gamma: float
    s_b: float
    f_b: float
    gamma_bc: float
    gamma_b: float
    phi_b: float
    tau: float
    varphi: float

    def vector(self, mu, sigma):
        """Full twelve-scalar vector with the given line center/broadening."""
        return np.array(
            [
                mu,
                sigma,
                self.gamma_c,
                self.phi,
                self.gamma,
                self.s_b,
                self.f_b,
                self.gamma_bc,
                self.gamma_b,
                self.phi_b,
                self.tau,
                self.varphi,
            ]
        )


@dataclass(frozen=True)
class SweepConfig:
    mode: str
    seed: int
    radiator_frequency_hz: float
    filter_center_hz: float
    filter_fwhm_hz: float
    alpha_photon_per_hz: float
    beamsplitter_gamma: float
    freq_shift_poly_hz: tuple
    chain: ChainParams
    probe_start_hz: float
    probe_stop_hz: float
    probe_points: int
    t_grid_k: tuple = ()
    flux_grid: tuple = ()
    coherent_input_flux: float = 0.0
    noise: float = 0.0
    workers: int = 1
    init_perturbation: float = 0.05

    @classmethod
    def from_dict(cls, raw):
        def need(key, kind, check=None, msg=""):
            if key not in raw:
                raise ConfigError(f"field '{key}': missing")
            value = raw[key]
            try:
                if kind is tuple:
                    value = tuple(float(v) for v in value)
                else:
                    value = kind(value)
            except (TypeError, ValueError):
                raise ConfigError(f"field '{key}': expected {kind.__name__}") from None
            if check is not None and not check(value):
                raise ConfigError(f"field '{key}': {msg}")
            return value

        mode = need("mode", str, lambda m: m in MODES, f"must be one of {MODES}")
        cfg = dict(
            mode=mode,
            seed=need("seed", int) if "seed" in raw else 0,
            radiator_frequency_hz=need(
                "radiator_frequency_hz", float, lambda v: v > 0, "must be positive"
            ),
            filter_center_hz=need(
                "filter_center_hz", float, lambda v: v > 0, "must be positive"
            ),
            filter_fwhm_hz=need(
                "filter_fwhm_hz", float, lambda v: v > 0, "must be positive"
            ),
            alpha_photon_per_hz=need(
                "alpha_photon_per_hz", float, lambda v: v > 0, "must be positive"
            ),
            beamsplitter_gamma=need(
                "beamsplitter_gamma", float, lambda v: 0 <= v <= 1, "must lie in [0, 1]"
            ),
            freq_shift_poly_hz=need(
                "freq_shift_poly_hz",
                tuple,
                lambda c: 1 <= len(c) <= 8,
                "must hold 1..8 ascending polynomial coefficients",
            ),
            probe_start_hz=need("probe_start_hz", float, lambda v: v > 0, "must be positive"),
            probe_stop_hz=need("probe_stop_hz", float, lambda v: v > 0, "must be positive"),
            probe_points=need("probe_points", int, lambda v: v >= 8, "must be >= 8"),
            noise=need("noise", float, lambda v: v >= 0, "must be >= 0") if "noise" in raw else 0.0,
            workers=need("workers", int, lambda v: v >= 1, "must be >= 1") if "workers" in raw else 1,
            init_perturbation=(
                need("init_perturbation", float, lambda v: 0 <= v < 0.5, "must lie in [0, 0.5)")
                if "init_perturbation" in raw
                else 0.05
            ),
        )
        if cfg["probe_stop_hz"] <= cfg["probe_start_hz"]:
            raise ConfigError("field 'probe_stop_hz': must exceed probe_start_hz")

        if "chain" not in raw or not isinstance(raw["chain"], dict):
            raise ConfigError("field 'chain': missing or not an object")
        chain_fields = {}
        for name in ChainParams.__dataclass_fields__:
            if name not in raw["chain"]:
                raise ConfigError(f"field 'chain.{name}': missing")
            try:
                chain_fields[name] = float(raw["chain"][name])
            except (TypeError, ValueError):
                raise ConfigError(f"field 'chain.{name}': expected float") from None
        cfg["chain"] = ChainParams(**chain_fields)

        def grid(key):
            values = need(key, tuple, lambda g: len(g) >= 1, "must be non-empty")
            if any(b <= a for a, b in zip(values, values[1:])):
                raise ConfigError(f"field '{key}': must be strictly increasing")
            return values

        if mode in ("thermal", "mixed"):
            cfg["t_grid_k"] = grid("t_grid_k")
            if any(v < 0 for v in cfg["t_grid_k"]):
                raise ConfigError("field 't_grid_k': temperatures must be >= 0")
        if mode == "coherent":
            cfg["flux_grid"] = grid("flux_grid")
            if any(v < 0 for v in cfg["flux_grid"]):
                raise ConfigError("field 'flux_grid': fluxes must be >= 0")
        if mode == "mixed":
            cfg["coherent_input_flux"] = need(
                "coherent_input_flux", float, lambda v: v >= 0, "must be >= 0"
            )
        return cls(**cfg)

    def to_dict(self):
        d = asdict(self)
        d["freq_shift_poly_hz"] = list(self.freq_shift_poly_hz)
        d["t_grid_k"] = list(self.t_grid_k)
        d["flux_grid"] = list(self.flux_grid)
        return d

    def probe_grid(self):
        return np.linspace(self.probe_start_hz, self.probe_stop_hz, self.probe_points)

    def scale(self):
        return CalibrationScale(alpha=self.alpha_photon_per_hz)

    def control_values(self):
        return self.flux_grid if self.mode == "coherent" else self.t_grid_k

    def truth_moments(self, control):
        """(mean, variance) of the detected field at one control point."""
        if self.mode == "thermal":
            mean = planck_mean_photon(RadiatorState(T=control, f=self.radiator_frequency_hz))
            return mean, thermal_variance(mean)
        if self.mode == "coherent":
            return control, coherent_variance(control)
        th = planck_mean_photon(RadiatorState(T=control, f=self.radiator_frequency_hz))
        field_ = beamsplitter_combine(
            self.coherent_input_flux, th, self.beamsplitter_gamma
        )
        m = mixed_moments(field_)
        return m.mean, m.variance


@dataclass(frozen=True)
class TracePoint:
    control: float | None
    truth: dict
    sweep: ComplexSweep


@dataclass(frozen=True)
class SweepDataset:
    config: SweepConfig
    base: TracePoint
    records: tuple


@dataclass(frozen=True)
class StatsRecord:
    """One extracted row: control value, fitted line, photon moments, g2."""

    control: float
    mu_hz: float
    sigma_hz: float
    mean_n: float
    variance_n: float
    g2: float
    power_w: float
    converged: bool
    n_iter: int
    residual_norm: float


def _shift_hz(coeffs, n):
    """Resonance shift (relative to zero input) of the calibration polynomial."""
    c = np.asarray(coeffs, dtype=float)
    return float(np.polynomial.polynomial.polyval(n, c) - c[0])


def _invert_shift(coeffs, shift, n_cap):
    """Solve shift(n) = shift for n >= 0 on the configured cubic."""
    c = np.asarray(coeffs, dtype=float).copy()
    c[0] = -shift
    roots = np.polynomial.polynomial.polyroots(c)
    real = roots[np.abs(roots.imag) <= 1e-8 * (1.0 + np.abs(roots.real))].real
    valid = real[(real >= -1e-12) & (real <= n_cap)]
    if valid.size:
        return float(max(valid.min(), 0.0))
    if real.size:  # out of calibrated range: clamp to the nearest physical root
        return float(max(real[np.argmin(np.abs(real))], 0.0))
    return 0.0


def _synthesize(cfg, mean, variance, rng):
    freqs = cfg.probe_grid()
    sigma = math.sqrt(variance) / cfg.alpha_photon_per_hz
    mu = cfg.chain.mu_base_hz + _shift_hz(cfg.freq_shift_poly_hz, mean)
    values = _chain_model(cfg.chain.vector(mu, sigma), freqs)
    if cfg.noise > 0:
        span = float(np.ptp(np.abs(values)))
        s = cfg.noise * span / math.sqrt(2.0)
        values = values + rng.normal(0.0, s, freqs.size) + 1j * rng.normal(
            0.0, s, freqs.size
        )
    truth = {
        "mean_n": mean,
        "variance_n": variance,
        "mu_hz": mu,
        "sigma_hz": sigma,
    }
    return truth, ComplexSweep(freqs=freqs, values=values)


def simulate_sweep(cfg, seed=None):
    """Synthesize the full trace dataset for a sweep configuration.

    Deterministic for a given (config, seed); the seed keys one Philox
    stream that supplies both the per-trace noise and the calibration init
    perturbation used later.  A zero-input base trace is always included as
    the fitting reference.  The returned dataset carries the seed actually
    used in its config, so a stored dataset reproduces itself.
    """
    seed = cfg.seed if seed is None else seed
    cfg = dataclasses.replace(cfg, seed=int(seed))
    rng = np.random.Generator(np.random.Philox(seed))
    truth, sweep = _synthesize(cfg, 0.0, 0.0, rng)
    base = TracePoint(control=None, truth=truth, sweep=sweep)
    records = []
    for control in cfg.control_values():
        mean, variance = cfg.truth_moments(control)
        truth, sweep = _synthesize(cfg, mean, variance, rng)
        records.append(TracePoint(control=float(control), truth=truth, sweep=sweep))
    return SweepDataset(config=cfg, base=base, records=tuple(records))


def _calibration_init(cfg, base_sweep, seed):
    """Perturbed-truth starting point for the base calibration.

    Scale parameters move by +-init_perturbation relative, frequencies by
    +-init_perturbation of the probe span, phases by +-init_perturbation rad;
    mu additionally snaps to the trace magnitude minimum.
    """
    rng = np.random.Generator(np.random.Philox(seed + 1))
    span = cfg.probe_stop_hz - cfg.probe_start_hz
    x = cfg.chain.vector(cfg.chain.mu_base_hz, sigma_floor(cfg.chain.gamma))
    frac = cfg.init_perturbation
    for i, name in enumerate(PARAM_NAMES):
        u = rng.uniform(-1.0, 1.0)
        if name in ("mu", "f_b"):
            x[i] += frac * span * u
        elif name in ("phi", "phi_b", "varphi"):
            x[i] += frac * u
        elif name != "sigma":  # sigma starts at its floor untouched
            x[i] *= 1.0 + frac * u
    x[0] = base_sweep.freqs[int(np.argmin(np.abs(base_sweep.values)))]
    return FullModelParams.from_vector(x)


def run_calibration(dataset, seed=None):
    """Base-trace calibration for a simulated dataset (truth-free per-trace fits
    still need this one anchor; its init is the configured perturbed truth)."""
    cfg = dataset.config
    seed = cfg.seed if seed is None else seed
    init = _calibration_init(cfg, dataset.base.sweep, seed)
    return fit_base_calibration(dataset.base.sweep, init)


def extract_statistics(dataset, calibration=None):
    """Fit every trace of a dataset and convert to photon statistics.

    Runs `fit_base_calibration` on the stored base trace (unless a
    calibration is supplied), then one `fit_measurement` per record,
    possibly across several worker threads; the output order always follows
    the dataset order.  Non-converged fits are reported in their record via
    ``converged``/``n_iter``/``residual_norm`` rather than dropped.
    """
    cfg = dataset.config
    if calibration is None:
        calibration = run_calibration(dataset)
    sigma_base = float(calibration.fit.params[PARAM_NAMES.index("sigma")])
    mu_base = float(calibration.fit.params[PARAM_NAMES.index("mu")])
    alpha = cfg.alpha_photon_per_hz
    caps = [cfg.truth_moments(c)[0] for c in cfg.control_values()]
    n_cap = 2.0 * max(caps) + 1.0

    def one(point):
        mu, sigma, fit = fit_measurement(point.sweep, calibration)
        sigma2 = max(sigma**2 - sigma_base**2, 0.0)
        variance = alpha**2 * sigma2
        mean = _invert_shift(cfg.freq_shift_poly_hz, mu - mu_base, n_cap)
        g2 = 1.0 + (variance - mean) / mean**2 if mean > 0 else float("nan")
        power = flux_to_power(mean, cfg.radiator_frequency_hz, cfg.filter_fwhm_hz)
        return StatsRecord(
            control=point.control,
            mu_hz=mu,
            sigma_hz=sigma,
            mean_n=mean,
            variance_n=variance,
            g2=g2,
            power_w=power,
            converged=fit.converged,
            n_iter=fit.n_iter,
            residual_norm=fit.residual_norm,
        )

    if cfg.workers > 1:
        with ThreadPoolExecutor(max_workers=cfg.workers) as pool:
            return list(pool.map(one, dataset.records))
    return [one(point) for point in dataset.records]


# ---------------------------------------------------------------------------
# persistence


def trace_to_csv(sweep, fh):
    writer = csv.writer(fh, lineterminator="\n")
    writer.writerow(["f_p_hz", "re", "im"])
    for f, v in zip(sweep.freqs, sweep.values):
        writer.writerow([repr(float(f)), repr(float(v.real)), repr(float(v.imag))])


def trace_from_csv(fh):
    reader = csv.reader(fh)
    header = next(reader)
    if header != ["f_p_hz", "re", "im"]:
        raise ValueError(f"unexpected trace header: {header}")
    rows = [(float(f), complex(float(re), float(im))) for f, re, im in reader]
    return ComplexSweep(
        freqs=np.array([r[0] for r in rows]), values=np.array([r[1] for r in rows])
    )


def _point_to_dict(point):
    return {
        "control": point.control,
        "truth": point.truth,
        "f_p_hz": [float(f) for f in point.sweep.freqs],
        "re": [float(v) for v in point.sweep.values.real],
        "im": [float(v) for v in point.sweep.values.imag],
    }


def _point_from_dict(d):
    freqs = np.array([float(x) for x in d["f_p_hz"]])
    values = np.array([float(x) for x in d["re"]]) + 1j * np.array(
        [float(x) for x in d["im"]]
    )
    return TracePoint(
        control=d["control"], truth=d["truth"], sweep=ComplexSweep(freqs, values)
    )


def dataset_to_json(dataset, fh):
    doc = {
        "format": DATASET_FORMAT,
        "config": dataset.config.to_dict(),
        "base": _point_to_dict(dataset.base),
        "records": [_point_to_dict(p) for p in dataset.records],
    }
    json.dump(doc, fh, indent=1, sort_keys=True)
    fh.write("\n")


def dataset_from_json(fh):
    doc = json.load(fh)
    if doc.get("format") != DATASET_FORMAT:
        raise ValueError(f"not a {DATASET_FORMAT} document")
    raw = doc["config"]
    raw["chain"] = dict(raw["chain"])
    cfg = SweepConfig.from_dict(raw)
    return SweepDataset(
        config=cfg,
        base=_point_from_dict(doc["base"]),
        records=tuple(_point_from_dict(p) for p in doc["records"]),
    )


def stats_to_csv(records, fh):
    writer = csv.writer(fh, lineterminator="\n")
    writer.writerow(STATS_HEADER)
    for r in records:
        writer.writerow(
            [
                repr(float(r.control)),
                repr(float(r.mu_hz)),
                repr(float(r.sigma_hz)),
                repr(float(r.mean_n)),
                repr(float(r.variance_n)),
                repr(float(r.g2)),
                repr(float(r.power_w)),
                int(r.converged),
                r.n_iter,
                repr(float(r.residual_norm)),
            ]
        )


def stats_from_csv(fh):
    reader = csv.reader(fh)
    header = next(reader)
    if header != STATS_HEADER:
        raise ValueError(f"unexpected statistics header: {header}")
    out = []
    for row in reader:
        out.append(
            StatsRecord(
                control=float(row[0]),
                mu_hz=float(row[1]),
                sigma_hz=float(row[2]),
                mean_n=float(row[3]),
                variance_n=float(row[4]),
                g2=float(row[5]),
                power_w=float(row[6]),
                converged=bool(int(row[7])),
                n_iter=int(row[8]),
                residual_norm=float(row[9]),
            )
        )
    return out

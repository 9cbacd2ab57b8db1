"""
``sim``: scenario runner writing CSV data and a JSON summary per run.

    sim <scenario> [figure] --config FILE [--set key=value]... --out DIR

Scenarios: ``spectrum``, ``flux-sweep``, ``g2``, ``cs-bounds``,
``figure fig1|fig2|fig3|fig4|fig6|fig7`` and ``validate``. All rates are in
units of gamma; ``--mhz`` adds frequency columns in MHz (gamma/2pi = 5.2 MHz).

Exit status: 0 success, 1 configuration error, 2 solver failure,
3 validation failure.
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import logging
import sys
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path
from typing import Any, Callable, Sequence

import numpy as np

from . import __version__
from .correlations import (UndefinedCorrelationError, cauchy_schwarz_report, first_order_many,
                           g2_zero, second_order_matrix)
from .lindblad import SolverError, steady_state_residual, uniform_grid
from .models import (LINEWIDTH_MHZ, BuiltSystem, CesiumParams, TwoLevelParams, build_cesium,
                     build_dressed_secular, build_two_level, dressed_g2_auto, dressed_g2_cross,
                     convergence_check, population_confinement)
from .spectra import Spectrum, parseval_error, power_spectrum, spectral_peaks, steady_flux

log = logging.getLogger("mollowcav.cli")

EXIT_OK, EXIT_CONFIG, EXIT_SOLVER, EXIT_VALIDATION = 0, 1, 2, 3
SCENARIOS = ("spectrum", "flux-sweep", "g2", "cs-bounds", "figure", "validate")
FIGURES = ("fig1", "fig2", "fig3", "fig4", "fig6", "fig7")
MODELS = ("two-level", "dressed", "cesium")
RECOMMENDED_N_MAX = 3


class ConfigError(ValueError):
    pass


# -- configuration ------------------------------------------------------------------

def _floats(text: str) -> tuple[float, ...]:
    return tuple(float(x) for x in text.split(",") if x.strip())


def _bool(text: str) -> bool:
    t = text.strip().lower()
    if t in ("1", "true", "yes", "on"):
        return True
    if t in ("0", "false", "no", "off"):
        return False
    raise ValueError(f"not a boolean: {text!r}")


# key -> (parser, default)
KEYS: dict[str, tuple[Callable[[str], Any], Any]] = {
    "model": (str, "two-level"),
    "gamma": (float, 1.0),
    "kappa": (float, 1.0),
    "g": (float, 1.0),
    "omega_rabi": (float, 25.0),
    "delta0": (float, 25.0),
    "n_max": (int, 3),
    "ground_splitting": (float, None),
    "detuning_2": (float, None),
    "detuning_3": (float, None),
    "detuning_4": (float, None),
    "manifolds": (str, None),
    "drive_polarization": (int, -1),
    "atomic_dissipator": (str, "secular"),
    "steady_method": (str, "auto"),
    "tau_max": (float, 10.0),
    "tau_step": (float, 0.01),
    "spectrum_tau_max": (float, 40.0),
    "spectrum_tau_step": (float, 0.005),
    "omega_min": (float, -40.0),
    "omega_max": (float, 40.0),
    "omega_points": (int, 4001),
    "sweep_param": (str, None),
    "sweep_min": (float, None),
    "sweep_max": (float, None),
    "sweep_step": (float, None),
    "g_values": (_floats, (0.25, 1.0, 2.5)),
    "kappa_values": (_floats, None),
    "convergence_check": (_bool, False),
    "criteria": (str, None),
}

SWEEPABLE = ("omega_rabi", "kappa", "g", "delta0", "gamma")


def read_config(path: str | Path | None, overrides: Sequence[str] = ()) -> dict[str, str]:
    """Flat ``key = value`` file (``#`` comments) plus ``key=value`` overrides."""
    raw: dict[str, str] = {}
    if path is not None:
        try:
            lines = Path(path).read_text().splitlines()
        except OSError as exc:
            raise ConfigError(f"cannot read config {path}: {exc}") from exc
        for n, line in enumerate(lines, 1):
            line = line.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ConfigError(f"{path}:{n}: expected key = value")
            k, v = line.split("=", 1)
            raw[k.strip()] = v.strip()
    for item in overrides:
        if "=" not in item:
            raise ConfigError(f"--set expects key=value, got {item!r}")
        k, v = item.split("=", 1)
        raw[k.strip()] = v.strip()
    unknown = sorted(set(raw) - set(KEYS))
    if unknown:
        raise ConfigError(f"unknown config keys: {', '.join(unknown)}")
    return raw


@dataclasses.dataclass
class ScenarioConfig:
    scenario: str
    values: dict[str, Any]
    explicit: frozenset
    out: Path
    mhz: bool = False
    workers: int = 1
    figure: str | None = None

    def __getitem__(self, key):
        return self.values[key]

    def get(self, key, figure_default):
        """Config value if set by the user, else a scenario-specific default."""
        return self.values[key] if key in self.explicit else figure_default


def parse_values(raw: dict[str, str]) -> dict[str, Any]:
    vals = {}
    for key, (conv, default) in KEYS.items():
        if key in raw:
            try:
                vals[key] = conv(raw[key])
            except ValueError as exc:
                raise ConfigError(f"bad value for {key}: {raw[key]!r} ({exc})") from None
        else:
            vals[key] = default
    if vals["model"] not in MODELS:
        raise ConfigError(f"model must be one of {MODELS}, got {vals['model']!r}")
    if vals["steady_method"] not in ("auto", "direct", "iterative"):
        raise ConfigError("steady_method must be auto, direct or iterative")
    if vals["atomic_dissipator"] not in ("secular", "bare"):
        raise ConfigError("atomic_dissipator must be secular or bare")
    if vals["sweep_param"] is not None and vals["sweep_param"] not in SWEEPABLE:
        raise ConfigError(f"sweep_param must be one of {SWEEPABLE}")
    for key in ("tau_step", "spectrum_tau_step", "tau_max", "spectrum_tau_max"):
        if not vals[key] > 0:
            raise ConfigError(f"{key} must be > 0")
    if vals["omega_points"] < 2 or not vals["omega_max"] > vals["omega_min"]:
        raise ConfigError("omega grid needs omega_max > omega_min and at least 2 points")
    return vals


def make_params(vals: dict[str, Any], model: str | None = None, **replace):
    """Model parameters from config values; invariant violations become ConfigError."""
    model = model or vals["model"]
    kw = {k: vals[k] for k in ("gamma", "kappa", "g", "omega_rabi", "delta0", "n_max")}
    kw.update(replace)
    try:
        if model != "cesium":
            return TwoLevelParams(**kw)
        if vals["ground_splitting"] is not None:
            kw["ground_splitting"] = vals["ground_splitting"]
        det = {fp: vals[f"detuning_{fp}"] for fp in (2, 3, 4) if vals[f"detuning_{fp}"] is not None}
        if det:
            kw["excited_detunings"] = {**CesiumParams().excited_detunings, **det}
        if vals["manifolds"]:
            kw["included_manifolds"] = frozenset(m.strip() for m in vals["manifolds"].split(","))
        kw["drive_polarization"] = vals["drive_polarization"]
        return CesiumParams(**kw)
    except (ValueError, TypeError) as exc:
        raise ConfigError(str(exc)) from None


def build(model: str, params, atomic_dissipator: str = "secular") -> BuiltSystem:
    if model == "two-level":
        return build_two_level(params)
    if model == "dressed":
        try:
            return build_dressed_secular(params, atomic_dissipator)
        except ValueError as exc:
            raise ConfigError(str(exc)) from None
    return build_cesium(params)


def _params_dict(params) -> dict:
    d = dataclasses.asdict(params)
    for k, v in d.items():
        if isinstance(v, frozenset):
            d[k] = sorted(v)
        elif isinstance(v, dict):
            d[k] = {str(a): b for a, b in v.items()}
    return d


# -- output -------------------------------------------------------------------------

def _fmt(x) -> str:
    if isinstance(x, str):
        return x
    return "%.16e" % float(x)


def write_csv(path: Path, columns: dict[str, Sequence], meta: dict) -> None:
    names = list(columns)
    n = len(next(iter(columns.values())))
    if any(len(c) != n for c in columns.values()):
        raise ValueError("CSV columns differ in length")
    lines = [f"# mollowcav {__version__}"]
    lines += [f"# {k}: {json.dumps(v, sort_keys=True, default=_json_default)}"
              for k, v in meta.items()]
    lines.append(",".join(names))
    for i in range(n):
        lines.append(",".join(_fmt(columns[k][i]) for k in names))
    path.write_text("\n".join(lines) + "\n")
    log.info("wrote %s", path)


def _json_default(x):
    if isinstance(x, np.ndarray):
        return x.tolist()
    if isinstance(x, (np.floating, np.integer)):
        return x.item()
    if isinstance(x, np.bool_):
        return bool(x)
    if isinstance(x, (frozenset, set)):
        return sorted(x)
    raise TypeError(f"not JSON serializable: {type(x)}")


def write_summary(cfg: ScenarioConfig, payload: dict) -> Path:
    path = cfg.out / "summary.json"
    doc = {"scenario": cfg.scenario, "figure": cfg.figure, "version": __version__,
           "config": {k: cfg.values[k] for k in sorted(cfg.explicit)}, **payload}
    path.write_text(json.dumps(doc, indent=2, sort_keys=True, default=_json_default) + "\n")
    return path


def _meta(cfg: ScenarioConfig, params, **extra) -> dict:
    m = {"scenario": cfg.scenario, "model": cfg["model"]}
    if cfg.figure:
        m["figure"] = cfg.figure
    if params is not None:
        m["params"] = _params_dict(params)
    m["units"] = "rates and frequencies in units of gamma"
    m.update(extra)
    return m


def _mhz_column(cfg: ScenarioConfig, columns: dict, key: str, values) -> None:
    if cfg.mhz:
        columns[key] = np.asarray(values, dtype=float) * LINEWIDTH_MHZ


# -- shared computations ------------------------------------------------------------

def truncation_warnings(params) -> list[str]:
    warn = []
    if params.n_max < RECOMMENDED_N_MAX:
        warn.append(f"n_max={params.n_max} is below the recommended {RECOMMENDED_N_MAX}: "
                    f"Fock truncation may not be converged")
    return warn


def _steady(model, params, method, dissipator):
    system = build(model, params, dissipator)
    rho = system.steady_state(method=method)
    return system, rho


def _sources(system: BuiltSystem, model: str) -> dict[str, list[str]]:
    atomic = [name for name, _rate in system.extras.get("atomic_sources", ())] \
        if model == "cesium" else ["sigma_minus"]
    return {"atomic": atomic, "red": ["r"], "blue": ["b"], "total": ["E"]}


def compute_spectra(system: BuiltSystem, rho, model: str, tau, omega) -> tuple[dict, dict]:
    """Spectra for the atomic, red, blue and total sources plus per-source metadata."""
    sources = _sources(system, model)
    names = sorted({op for ops in sources.values() for op in ops})
    corr = first_order_many(system.liouvillian, rho, {n: system.op(n) for n in names}, tau)
    spectra, info = {}, {}
    for src, ops in sources.items():
        total = np.zeros(omega.size)
        meta = {"window_rate": 0.0, "parseval_error": 0.0, "imag_residual": 0.0}
        for op in ops:
            sp_ = power_spectrum(corr[op], omega, source_label=src)
            total += sp_.values
            meta["window_rate"] = max(meta["window_rate"], sp_.window_rate)
            meta["imag_residual"] = max(meta["imag_residual"], sp_.imag_residual)
            meta["parseval_error"] = max(meta["parseval_error"], parseval_error(corr[op]))
        spectra[src] = total
        info[src] = meta
    return spectra, info


def _spectrum_summary(omega, values) -> dict:
    spec = Spectrum(omega, values)
    peaks = spectral_peaks(spec)
    return {"peaks": [{"omega": float(w), "height": spec.value_at(w)} for w in peaks],
            "max": float(values.max()) if values.size else 0.0,
            "central_height": spec.value_at(0.0)}


def _g2_zero_point(system: BuiltSystem, rho) -> dict:
    out = {}
    pairs = {"g2_E": ("E", None), "g2_b": ("b", None), "g2_r": ("r", None),
             "g2_br": ("b", "r"), "g2_rb": ("r", "b")}
    for key, (a, b) in pairs.items():
        try:
            out[key] = g2_zero(rho, system.op(a), None if b is None else system.op(b))
        except UndefinedCorrelationError:
            out[key] = float("nan")
            out.setdefault("undefined", []).append(key)
    return out


# -- sweep machinery ---------------------------------------------------------------

def _pool_map(func, items: list, workers: int) -> list:
    if workers <= 1 or len(items) <= 1:
        return [func(x) for x in items]
    with ProcessPoolExecutor(max_workers=workers) as ex:
        return list(ex.map(func, items))  # order preserved


def _flux_point(job) -> dict:
    model, params, method, dissipator = job
    try:
        system, rho = _steady(model, params, method, dissipator)
        E = system.op("E")
        return {"flux": steady_flux(rho, params.kappa, E.dag(), E),
                "residual": steady_state_residual(system.liouvillian, rho), "status": "ok"}
    except (SolverError, ValueError, ArithmeticError) as exc:
        return {"flux": float("nan"), "residual": float("nan"),
                "status": f"error: {type(exc).__name__}: {exc}"}


def _g2_point(job) -> dict:
    model, params, method, dissipator = job
    try:
        system, rho = _steady(model, params, method, dissipator)
        vals = _g2_zero_point(system, rho)
        status = "ok" if "undefined" not in vals else "undefined: " + ",".join(vals.pop("undefined"))
        vals["status"] = status
        return vals
    except (SolverError, ValueError, ArithmeticError) as exc:
        nan = float("nan")
        return {"g2_E": nan, "g2_b": nan, "g2_r": nan, "g2_br": nan, "g2_rb": nan,
                "status": f"error: {type(exc).__name__}: {exc}"}


def _sweep_values(cfg: ScenarioConfig, lo, hi, step) -> np.ndarray:
    lo = cfg.get("sweep_min", lo)
    hi = cfg.get("sweep_max", hi)
    step = cfg.get("sweep_step", step)
    if lo is None or hi is None or step is None:
        raise ConfigError("sweep needs sweep_min, sweep_max and sweep_step")
    if not step > 0 or hi < lo:
        raise ConfigError("sweep needs sweep_step > 0 and sweep_max >= sweep_min")
    n = int(np.floor((hi - lo) / step + 1e-9))
    return np.round(lo + step * np.arange(n + 1), 12)


def flux_sweep(cfg, model, base, param, values) -> list[dict]:
    jobs = [(model, _replace(base, param, v), cfg["steady_method"], cfg["atomic_dissipator"])
            for v in values]
    return _pool_map(_flux_point, jobs, cfg.workers)


def g2_sweep(cfg, model, base, param, values) -> list[dict]:
    jobs = [(model, _replace(base, param, v), cfg["steady_method"], cfg["atomic_dissipator"])
            for v in values]
    return _pool_map(_g2_point, jobs, cfg.workers)


def _replace(params, key, value):
    try:
        return dataclasses.replace(params, **{key: float(value)})
    except ValueError as exc:
        raise ConfigError(f"sweep point {key}={value}: {exc}") from None


# -- scenarios -------------------------------------------------------------------------

def run_spectrum(cfg: ScenarioConfig) -> dict:
    model = cfg["model"]
    params = make_params(cfg.values)
    system, rho = _steady(model, params, cfg["steady_method"], cfg["atomic_dissipator"])
    tau = uniform_grid(cfg["spectrum_tau_max"], cfg["spectrum_tau_step"])
    omega = np.linspace(cfg["omega_min"], cfg["omega_max"], cfg["omega_points"])
    spectra, info = compute_spectra(system, rho, model, tau, omega)
    summary = {}
    for src, vals in spectra.items():
        cols = {"omega_over_gamma": omega, "P": vals}
        _mhz_column(cfg, cols, "omega_MHz", omega)
        write_csv(cfg.out / f"spectrum_{src}.csv", cols, _meta(cfg, params, source=src, **info[src]))
        summary[src] = {**_spectrum_summary(omega, vals), **info[src]}
    return {"params": _params_dict(params), "sources": summary,
            "steady_state_residual": steady_state_residual(system.liouvillian, rho),
            "warnings": list(system.warnings) + truncation_warnings(params)}


def run_flux_sweep(cfg: ScenarioConfig) -> dict:
    model = cfg["model"]
    params = make_params(cfg.values)
    param = cfg["sweep_param"] or "omega_rabi"
    values = _sweep_values(cfg, 15.0, 35.0, 0.5)
    rows = flux_sweep(cfg, model, params, param, values)
    flux = np.array([r["flux"] for r in rows])
    cols = {f"{param}_over_gamma": values, "flux": flux,
            "steady_state_residual": [r["residual"] for r in rows],
            "status": [r["status"] for r in rows]}
    _mhz_column(cfg, cols, f"{param}_MHz", values)
    write_csv(cfg.out / "flux_sweep.csv", cols, _meta(cfg, params, sweep_param=param))
    ok = np.isfinite(flux)
    out = {"params": _params_dict(params), "sweep_param": param, "points": len(values),
           "failed_points": int((~ok).sum()),
           "warnings": list(params.validity_warnings()) + truncation_warnings(params)}
    if ok.any():
        i = int(np.nanargmax(flux))
        out.update(argmax=float(values[i]), flux_max=float(flux[i]))
    return out


def _g2_tau(cfg, model, params):
    system, rho = _steady(model, params, cfg["steady_method"], cfg["atomic_dissipator"])
    tau = uniform_grid(cfg["tau_max"], cfg["tau_step"])
    try:
        g2 = second_order_matrix(system.liouvillian, rho,
                                 {k: system.op(k) for k in ("E", "b", "r")}, tau)
    except UndefinedCorrelationError as exc:
        raise UndefinedCorrelationError(f"g2 undefined for {model} with {params}: {exc}") from exc
    return system, rho, tau, g2


def _g2_columns(tau, g2) -> dict:
    return {"tau_over_gamma": tau, "g2_E": g2[("E", "E")].values, "g2_b": g2[("b", "b")].values,
            "g2_r": g2[("r", "r")].values, "g2_br": g2[("b", "r")].values,
            "g2_rb": g2[("r", "b")].values}


def _cs_reports(g2) -> dict:
    return {order: cauchy_schwarz_report(g2[("b", "b")], g2[("r", "r")], g2[pair]).as_dict()
            for order, pair in (("br", ("b", "r")), ("rb", ("r", "b")))}


def run_g2(cfg: ScenarioConfig) -> dict:
    model = cfg["model"]
    params = make_params(cfg.values)
    warnings = list(params.validity_warnings()) + truncation_warnings(params)
    if cfg["sweep_param"]:
        param = cfg["sweep_param"]
        values = _sweep_values(cfg, None, None, None)
        rows = g2_sweep(cfg, model, params, param, values)
        cols = {f"{param}_over_gamma": values}
        for key in ("g2_E", "g2_b", "g2_r", "g2_br", "g2_rb"):
            cols[key] = [r[key] for r in rows]
        # zero-delay Cauchy-Schwarz margins (positive = violated)
        cols["cs_single_b"] = [1.0 - r["g2_b"] for r in rows]
        cols["cs_single_r"] = [1.0 - r["g2_r"] for r in rows]
        cols["cs_two_mode"] = [max(r["g2_br"], r["g2_rb"]) - np.sqrt(r["g2_b"] * r["g2_r"])
                               for r in rows]
        cols["status"] = [r["status"] for r in rows]
        _mhz_column(cfg, cols, f"{param}_MHz", values)
        write_csv(cfg.out / f"g2_zero_vs_{param}.csv", cols, _meta(cfg, params, sweep_param=param))
        return {"params": _params_dict(params), "sweep_param": param, "points": len(values),
                "undefined_points": sum(r["status"] != "ok" for r in rows), "warnings": warnings}

    system, rho, tau, g2 = _g2_tau(cfg, model, params)
    cols = _g2_columns(tau, g2)
    if model == "dressed":
        cols["dressed_auto"] = dressed_g2_auto(tau, params.gamma)
        cols["dressed_cross"] = dressed_g2_cross(tau, params.gamma, params.kappa)
    write_csv(cfg.out / "g2_tau.csv", cols, _meta(cfg, params))
    out = {"params": _params_dict(params),
           "g2_zero": {k: float(np.asarray(v)[0]) for k, v in cols.items() if k != "tau_over_gamma"},
           "cauchy_schwarz": _cs_reports(g2), "warnings": warnings}
    if model == "cesium":
        out["confinement"] = population_confinement(rho, system)
    if cfg["convergence_check"]:
        conv = out["convergence"] = _convergence(cfg, model, params)
        if not conv["converged"]:
            warnings.append(f"g2(0) changes by {conv['max_relative_change']:.2%} from "
                            f"n_max={params.n_max} to {params.n_max + 1}")
    return out


def run_cs_bounds(cfg: ScenarioConfig) -> dict:
    model = cfg["model"]
    params = make_params(cfg.values)
    system, rho, tau, g2 = _g2_tau(cfg, model, params)
    reports = _cs_reports(g2)
    gb, gr = g2[("b", "b")].values, g2[("r", "r")].values
    bound = np.sqrt(max(gb[0], 0.0) * max(gr[0], 0.0))
    cols = {"tau_over_gamma": tau, "g2_b": gb, "g2_r": gr, "g2_br": g2[("b", "r")].values,
            "g2_rb": g2[("r", "b")].values,
            "temporal_margin_b": gb - gb[0], "temporal_margin_r": gr - gr[0],
            "two_mode_margin_br": np.abs(g2[("b", "r")].values) - bound,
            "two_mode_margin_rb": np.abs(g2[("r", "b")].values) - bound}
    write_csv(cfg.out / "cs_bounds.csv", cols,
              _meta(cfg, params, margins="positive margin = classical bound violated"))
    return {"params": _params_dict(params), "cauchy_schwarz": reports,
            "warnings": list(params.validity_warnings()) + truncation_warnings(params)}


def _convergence(cfg, model, params) -> dict:
    def observables(system, rho):
        return {k: v for k, v in _g2_zero_point(system, rho).items() if k != "undefined"}

    rep = convergence_check(lambda p: build(model, p, cfg["atomic_dissipator"]), params,
                            observables)
    return {"n_max": rep.n_max, "max_relative_change": rep.max_relative_change,
            "converged": rep.converged}


# -- figures ---------------------------------------------------------------------------

def _figure_params(cfg, model, **defaults):
    vals = dict(cfg.values)
    for k, v in defaults.items():
        if k not in cfg.explicit:
            vals[k] = v
    return make_params(vals, model=model)


def fig1(cfg: ScenarioConfig) -> dict:
    base = _figure_params(cfg, "two-level", g=0.0, kappa=2.5)
    omega = np.linspace(cfg["omega_min"], cfg["omega_max"], cfg["omega_points"])
    d0, k = base.delta0, base.kappa
    cols = {"omega_over_gamma": omega,
            "T_schematic": k ** 2 / ((omega - d0) ** 2 + k ** 2) + k ** 2 / ((omega + d0) ** 2 + k ** 2)}
    tau = uniform_grid(cfg["spectrum_tau_max"], cfg["spectrum_tau_step"])
    peaks = {}
    for frac in (0.5, 1.0, 1.5):
        p = dataclasses.replace(base, omega_rabi=frac * d0)
        system, rho = _steady("two-level", p, cfg["steady_method"], "secular")
        spectra, _ = compute_spectra(system, rho, "two-level", tau, omega)
        cols[f"P_atomic_omega{frac:g}delta0"] = spectra["atomic"]
        peaks[f"{frac:g}"] = _spectrum_summary(omega, spectra["atomic"])["peaks"]
    _mhz_column(cfg, cols, "omega_MHz", omega)
    write_csv(cfg.out / "fig1.csv", cols,
              _meta(cfg, base, note="T_schematic is an illustrative pair of Lorentzians of "
                                    "halfwidth kappa, not a computed transmission"))
    return {"params": _params_dict(base), "atomic_peaks": peaks}


def fig2(cfg: ScenarioConfig) -> dict:
    base = _figure_params(cfg, "two-level", kappa=2.5)
    gs = cfg["g_values"]
    omegas = _sweep_values(cfg, 15.0, 35.0, 0.5)
    cols = {"omega_rabi_over_gamma": omegas}
    argmax = {}
    for g in gs:
        rows = flux_sweep(cfg, "two-level", dataclasses.replace(base, g=g), "omega_rabi", omegas)
        flux = np.array([r["flux"] for r in rows])
        cols[f"flux_g{g:g}"] = flux
        argmax[f"{g:g}"] = float(omegas[int(np.nanargmax(flux))]) if np.isfinite(flux).any() else None
    _mhz_column(cfg, cols, "omega_rabi_MHz", omegas)
    write_csv(cfg.out / "fig2a_flux.csv", cols, _meta(cfg, base, panel="a"))
    spectra_summary = _figure_spectra(cfg, "two-level", base, gs, "fig2b")
    return {"params": _params_dict(base), "flux_argmax": argmax, "spectra": spectra_summary}


def _figure_spectra(cfg, model, base, gs, stem) -> dict:
    tau = uniform_grid(cfg["spectrum_tau_max"], cfg["spectrum_tau_step"])
    omega = np.linspace(cfg["omega_min"], cfg["omega_max"], cfg["omega_points"])
    out = {}
    for g in gs:
        p = dataclasses.replace(base, g=g)
        system, rho = _steady(model, p, cfg["steady_method"], "secular")
        spectra, info = compute_spectra(system, rho, model, tau, omega)
        cols = {"omega_over_gamma": omega, **spectra}
        _mhz_column(cfg, cols, "omega_MHz", omega)
        write_csv(cfg.out / f"{stem}_g{g:g}.csv", cols, _meta(cfg, p, sources=info))
        out[f"{g:g}"] = {src: _spectrum_summary(omega, v) for src, v in spectra.items()}
        if model == "cesium":
            out[f"{g:g}"]["confinement"] = population_confinement(rho, system)
    return out


def fig3(cfg: ScenarioConfig) -> dict:
    base = _figure_params(cfg, "two-level")
    kappas = _sweep_values(cfg, 0.25, 5.0, 0.25)
    summary = {}
    for g in cfg["g_values"]:
        rows = g2_sweep(cfg, "two-level", dataclasses.replace(base, g=g), "kappa", kappas)
        cols = {"kappa_over_gamma": kappas}
        for key in ("g2_E", "g2_b", "g2_r", "g2_br", "g2_rb"):
            cols[key] = [r[key] for r in rows]
        cols["status"] = [r["status"] for r in rows]
        _mhz_column(cfg, cols, "kappa_MHz", kappas)
        write_csv(cfg.out / f"fig3_g{g:g}.csv", cols, _meta(cfg, base, g=g))
        summary[f"{g:g}"] = {"failed_points": sum(r["status"] != "ok" for r in rows)}
    return {"params": _params_dict(base), "kappa_range": [float(kappas[0]), float(kappas[-1])],
            "per_g": summary}


def _figure_g2(cfg, model, base, kappas, gs, stem, overlay) -> dict:
    out = {}
    for kappa in kappas:
        cols, zero = None, {}
        for g in gs:
            p = dataclasses.replace(base, kappa=kappa, g=g)
            _system, _rho, tau, g2 = _g2_tau(cfg, model, p)
            if cols is None:
                cols = {"tau_over_gamma": tau}
            sfx = f"_g{g:g}" if len(gs) > 1 else ""
            for key, pair in (("g2_br", ("b", "r")), ("g2_rb", ("r", "b")),
                              ("g2_b", ("b", "b")), ("g2_r", ("r", "r"))):
                cols[key + sfx] = g2[pair].values
                zero[key + sfx] = float(g2[pair].values[0])
        if overlay:
            cols["dressed_auto"] = dressed_g2_auto(cols["tau_over_gamma"], base.gamma)
            cols["dressed_cross"] = dressed_g2_cross(cols["tau_over_gamma"], base.gamma, kappa)
        write_csv(cfg.out / f"{stem}_kappa{kappa:g}.csv", cols, _meta(cfg, base, kappa=kappa))
        out[f"{kappa:g}"] = zero
    return out


def fig4(cfg: ScenarioConfig) -> dict:
    base = _figure_params(cfg, "two-level")
    kappas = cfg["kappa_values"] or (1.0, 2.5)
    return {"params": _params_dict(base),
            "g2_zero": _figure_g2(cfg, "two-level", base, kappas, cfg["g_values"], "fig4", True)}


def fig6(cfg: ScenarioConfig) -> dict:
    base = _figure_params(cfg, "cesium", kappa=2.5)
    return {"params": _params_dict(base),
            "spectra": _figure_spectra(cfg, "cesium", base, cfg["g_values"], "fig6")}


def fig7(cfg: ScenarioConfig) -> dict:
    base = _figure_params(cfg, "cesium", g=1.0)
    kappas = cfg["kappa_values"] or (1.0, 2.5)
    gs = (base.g,)
    return {"params": _params_dict(base),
            "g2_zero": _figure_g2(cfg, "cesium", base, kappas, gs, "fig7", False)}


FIGURE_RUNNERS = {"fig1": fig1, "fig2": fig2, "fig3": fig3, "fig4": fig4, "fig6": fig6,
                  "fig7": fig7}


def run_figure(cfg: ScenarioConfig) -> dict:
    return FIGURE_RUNNERS[cfg.figure](cfg)


def run_validate(cfg: ScenarioConfig) -> tuple[dict, bool]:
    from .validation import ValidationContext, run_criteria
    params = make_params(cfg.values)  # refuses corrupt configs before any work
    ctx = ValidationContext(n_max=params.n_max, steady_method=cfg["steady_method"])
    ctx.warnings += truncation_warnings(params)
    for w in ctx.warnings:
        log.warning(w)
    numbers = None
    if cfg["criteria"]:
        try:
            numbers = [int(x) for x in cfg["criteria"].split(",")]
        except ValueError:
            raise ConfigError("criteria must be a comma list of integers") from None
        bad = [n for n in numbers if not 1 <= n <= 10]
        if bad:
            raise ConfigError(f"unknown criteria {bad}")
    results = run_criteria(numbers, ctx, on_result=lambda r: print(r.line(), flush=True))
    report = {"criteria": [r.as_dict() for r in results],
              "passed": all(r.passed for r in results), "warnings": ctx.warnings}
    (cfg.out / "validation.json").write_text(
        json.dumps(report, indent=2, sort_keys=True, default=_json_default) + "\n")
    return report, report["passed"]


RUNNERS = {"spectrum": run_spectrum, "flux-sweep": run_flux_sweep, "g2": run_g2,
           "cs-bounds": run_cs_bounds, "figure": run_figure}


# -- entry point -----------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="sim", description=__doc__.split("\n\n")[0].strip())
    ap.add_argument("scenario", choices=SCENARIOS)
    ap.add_argument("figure", nargs="?", choices=FIGURES, help="figure name for 'figure'")
    ap.add_argument("--config", help="flat key = value file")
    ap.add_argument("--set", dest="overrides", action="append", default=[], metavar="KEY=VALUE")
    ap.add_argument("--out", default="sim_output", help="output directory")
    ap.add_argument("--mhz", action="store_true", help="add frequency columns in MHz")
    ap.add_argument("--workers", type=int, default=1, help="processes for sweep points")
    ap.add_argument("-v", "--verbose", action="store_true")
    return ap


def main(argv: Sequence[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        if (args.scenario == "figure") != (args.figure is not None):
            raise ConfigError("a figure name is required with (and only with) 'figure'")
        if args.workers < 1:
            raise ConfigError("--workers must be >= 1")
        raw = read_config(args.config, args.overrides)
        cfg = ScenarioConfig(args.scenario, parse_values(raw), frozenset(raw), Path(args.out),
                             args.mhz, args.workers, args.figure)
        cfg.out.mkdir(parents=True, exist_ok=True)
        if args.scenario == "validate":
            report, passed = run_validate(cfg)
            write_summary(cfg, {"passed": passed,
                                "failed": [c["criterion"] for c in report["criteria"]
                                           if not c["passed"]]})
            return EXIT_OK if passed else EXIT_VALIDATION
        # parameter invariants are checked before any solve
        make_params(cfg.values, model="cesium" if cfg.figure in ("fig6", "fig7") else None)
        payload = RUNNERS[args.scenario](cfg)
        for w in payload.get("warnings", []):
            log.warning(w)
        write_summary(cfg, payload)
        return EXIT_OK
    except ConfigError as exc:
        print(f"sim: config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (SolverError, UndefinedCorrelationError) as exc:
        print(f"sim: solver failure in {args.scenario}: {exc}", file=sys.stderr)
        return EXIT_SOLVER


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())

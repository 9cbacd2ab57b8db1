"""
Acceptance checks against target values, shared by ``sim validate`` and
the acceptance tests.

Each ``criterion_N`` returns a :class:`CriterionResult`; nothing here is
tuned to pass. Measured values are always reported next to the target so a
failure is self-explanatory.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

import numpy as np
import scipy.linalg as la

from .correlations import (cauchy_schwarz_report, first_order, first_order_many, g2_zero,
                           second_order, second_order_matrix)
from .hilbert import DensityOperator, Operator, SpaceLayout
from .lindblad import (CollapseChannel, build_liouvillian, evolve, steady_state,
                       steady_state_residual, uniform_grid)
from .models import (CesiumParams, TwoLevelParams, build_cesium, build_two_level,
                     clebsch_gordan, dressed_g2_auto, dressed_g2_cross, population_confinement)
from .spectra import parseval_error, power_spectrum, spectral_peaks, steady_flux

__all__ = [
    "CriterionResult",
    "ValidationContext",
    "CRITERIA",
    "run_criteria",
    "random_open_system",
    "dense_liouvillian",
    "brute_force_first_order",
    "brute_force_second_order",
]

PEAK_PROMINENCE = 1e-2  # share of the spectral maximum that counts as a peak
SPECTRUM_TAU = (40.0, 0.005)
SPECTRUM_OMEGA = (-40.0, 40.0, 4001)
G2_TAU = (10.0, 0.01)


@dataclass
class CriterionResult:
    number: int
    title: str
    passed: bool
    measured: dict = field(default_factory=dict)
    target: str = ""
    note: str = ""

    def line(self) -> str:
        return f"[{'PASS' if self.passed else 'FAIL'}] criterion {self.number}: {self.title}"

    def as_dict(self) -> dict:
        return {"criterion": self.number, "title": self.title, "passed": self.passed,
                "target": self.target, "measured": _jsonable(self.measured), "note": self.note}


def _jsonable(x):
    if isinstance(x, dict):
        return {str(k): _jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple, np.ndarray)):
        return [_jsonable(v) for v in x]
    if isinstance(x, (np.floating, float)):
        return float(x)
    if isinstance(x, (np.integer, int)) and not isinstance(x, bool):
        return int(x)
    if isinstance(x, np.bool_):
        return bool(x)
    return x


class ValidationContext:
    """Settings shared by all criteria plus a log of every state and spectrum
    produced, which the conservation suite re-checks."""

    def __init__(self, n_max: int = 3, steady_method: str = "auto"):
        self.n_max = n_max
        self.steady_method = steady_method
        self.states: list[tuple[str, DensityOperator]] = []
        self.systems: list = []
        self.first_order_series: list = []
        self.g2_series: list = []
        self.warnings: list[str] = []

    def two_level(self, **kw):
        p = TwoLevelParams(n_max=self.n_max, **kw)
        sys_ = build_two_level(p)
        rho = sys_.steady_state(method=self.steady_method)
        self.states.append((f"two-level {kw}", rho))
        self.systems.append((sys_, rho))
        return sys_, rho

    def cesium(self, **kw):
        p = CesiumParams(n_max=self.n_max, **kw)
        sys_ = build_cesium(p)
        rho = sys_.steady_state(method=self.steady_method)
        self.states.append((f"cesium {kw}", rho))
        self.systems.append((sys_, rho))
        return sys_, rho


def _within(x, target, tol):
    return abs(x - target) <= tol


# -- target correlation values ---------------------------------------------------

def criterion_1(ctx: ValidationContext) -> CriterionResult:
    s, rho = ctx.two_level(kappa=1.0, g=1.0)
    E, b, r = s.op("E"), s.op("b"), s.op("r")
    m = {"g2_E": g2_zero(rho, E), "g2_b": g2_zero(rho, b), "g2_r": g2_zero(rho, r),
         "g2_br": g2_zero(rho, b, r), "g2_rb": g2_zero(rho, r, b)}
    ok = (_within(m["g2_E"], 1.5, 0.05) and _within(m["g2_b"], 0.36, 0.02)
          and _within(m["g2_br"], 1.32, 0.02))
    return CriterionResult(1, "two-level g2(0) values", ok, m,
                           "g2_E=1.5±0.05, g2_b=0.36±0.02, g2_br=1.32±0.02")


def criterion_2(ctx: ValidationContext) -> CriterionResult:
    m, ok = {}, True
    for (kappa, g), (tb, tbr) in {(1.0, 1.0): (0.35, 1.32), (2.5, 1.0): (0.21, 1.09)}.items():
        s, rho = ctx.cesium(kappa=kappa, g=g)
        b, r = s.op("b"), s.op("r")
        gb, gbr = g2_zero(rho, b), g2_zero(rho, b, r)
        m[f"kappa={kappa},g={g}"] = {"g2_b": gb, "g2_br": gbr, "g2_rb": g2_zero(rho, r, b),
                                     "confinement": population_confinement(rho, s)}
        ok &= _within(gb, tb, 0.02) and _within(gbr, tbr, 0.02)
    return CriterionResult(2, "cesium g2(0) values", ok, m,
                           "kappa=g=1: 0.35/1.32; kappa=2.5,g=1: 0.21/1.09 (±0.02)")


# -- flux resonance and spectra --------------------------------------------------

def flux_curve(ctx: ValidationContext, g: float, kappa: float, omegas) -> np.ndarray:
    out = []
    for om in omegas:
        s, rho = ctx.two_level(kappa=kappa, g=g, omega_rabi=float(om))
        E = s.op("E")
        out.append(steady_flux(rho, kappa, E.dag(), E))
    return np.array(out)


def criterion_3(ctx: ValidationContext) -> CriterionResult:
    omegas = np.round(np.arange(15.0, 35.0 + 1e-9, 0.5), 10)
    m, ok = {}, True
    for g in (0.25, 1.0, 2.5):
        flux = flux_curve(ctx, g, 2.5, omegas)
        i = int(np.argmax(flux))
        j25 = int(np.argmin(np.abs(omegas - 25.0)))
        m[f"g={g}"] = {"argmax_omega": omegas[i], "flux_max": flux[i], "flux_at_25": flux[j25]}
        ok &= bool(omegas[i] == 25.0)
    return CriterionResult(3, "flux maximum at omega_rabi = delta0", ok, m,
                           "argmax over [15, 35] gamma, step 0.5, equals 25 gamma for each g")


def _spectra_for(ctx: ValidationContext, g: float, kappa: float):
    s, rho = ctx.two_level(kappa=kappa, g=g)
    tau = uniform_grid(*SPECTRUM_TAU)
    omega = np.linspace(*SPECTRUM_OMEGA)
    corr = first_order_many(s.liouvillian, rho, {"atomic": s.op("sigma_minus"),
                                                  "total": s.op("E")}, tau)
    ctx.first_order_series += list(corr.values())
    return {k: power_spectrum(c, omega, source_label=k) for k, c in corr.items()}


def _local_maxima(values: np.ndarray) -> int:
    v = values
    return int(np.sum((v[1:-1] > v[:-2]) & (v[1:-1] >= v[2:])))


def criterion_4(ctx: ValidationContext) -> CriterionResult:
    step = (SPECTRUM_OMEGA[1] - SPECTRUM_OMEGA[0]) / (SPECTRUM_OMEGA[2] - 1)
    m, ok, central = {}, True, []
    for g in (0.25, 1.0, 2.5):
        spec = _spectra_for(ctx, g, 2.5)
        pa = spectral_peaks(spec["atomic"], PEAK_PROMINENCE)
        pt = spectral_peaks(spec["total"], PEAK_PROMINENCE)
        atomic_ok = pa.size == 3 and np.all(np.abs(np.sort(pa) - [-25, 0, 25]) <= step + 1e-9)
        total_ok = pt.size == 2 and np.all(np.abs(np.sort(pt) - [-25, 25]) <= step + 1e-9)
        h0 = spec["atomic"].value_at(0.0)
        central.append(h0)
        m[f"g={g}"] = {"atomic_peaks": pa, "total_peaks": pt,
                       "atomic_local_maxima": _local_maxima(spec["atomic"].values),
                       "total_local_maxima": _local_maxima(spec["total"].values),
                       "central_height": h0, "atomic_ok": bool(atomic_ok),
                       "total_ok": bool(total_ok)}
        ok &= bool(atomic_ok and total_ok)
    decreasing = bool(np.all(np.diff(central) < 0))
    m["central_height_decreasing"] = decreasing
    m["grid_step"] = step
    return CriterionResult(
        4, "Mollow triplet and doubly peaked cavity spectrum", ok and decreasing, m,
        f"atomic peaks at -25/0/25 and cavity peaks at ±25 within {step:g}; central height "
        "decreasing in g",
        note=f"peaks are local maxima with prominence >= {PEAK_PROMINENCE:g} of the maximum")


def criterion_5(ctx: ValidationContext) -> CriterionResult:
    s, rho = ctx.cesium(kappa=2.5, g=2.5)
    conf = population_confinement(rho, s)
    return CriterionResult(5, "cycling-state confinement", conf >= 0.97,
                           {"confinement": conf}, ">= 0.97 at g=kappa=2.5")


def criterion_6(ctx: ValidationContext) -> CriterionResult:
    s, rho = ctx.two_level(kappa=2.5, g=0.25)
    tau = uniform_grid(*G2_TAU)
    g2 = second_order_matrix(s.liouvillian, rho, {"r": s.op("r"), "b": s.op("b")}, tau)
    ctx.g2_series += list(g2.values())
    auto_dev = np.abs(g2[("r", "r")].values - dressed_g2_auto(tau))
    cross_dev = np.abs(g2[("r", "b")].values - dressed_g2_cross(tau, 1.0, 2.5))
    m = {"max_auto_deviation": auto_dev.max(), "tau_at_max_auto": tau[auto_dev.argmax()],
         "max_cross_deviation": cross_dev.max(), "tau_at_max_cross": tau[cross_dev.argmax()],
         "g2_r_0": g2[("r", "r")].values[0], "g2_rb_0": g2[("r", "b")].values[0]}
    ok = auto_dev.max() <= 0.1 and cross_dev.max() <= 0.1
    return CriterionResult(6, "dressed-state analytic limit", bool(ok), m,
                           "pointwise deviation <= 0.1 on tau in [0, 10]")


def criterion_7(ctx: ValidationContext) -> CriterionResult:
    s, rho = ctx.two_level(kappa=1.0, g=1.0)
    tau = uniform_grid(*G2_TAU)
    g2 = second_order_matrix(s.liouvillian, rho, {"b": s.op("b"), "r": s.op("r")}, tau)
    ctx.g2_series += list(g2.values())
    rep = cauchy_schwarz_report(g2[("b", "b")], g2[("r", "r")], g2[("b", "r")])
    m = rep.as_dict()
    ok = rep.single_mode_violated["bb"] and rep.two_mode_violated
    return CriterionResult(7, "Cauchy-Schwarz violations", bool(ok), m,
                           "g2_b(0) < 1 and g2_br(0) > sqrt(g2_b(0) g2_r(0))")


# -- dense oracles -----------------------------------------------------------------

_RANDOM_DIMS = ((2,), (3,), (4,), (2, 2), (2, 3), (2, 4), (8,), (2, 2, 2))


def random_open_system(rng: np.random.Generator, dims=None, min_gap: float = 0.2,
                       max_tries: int = 50):
    """A random Hermitian ``H`` and 1-3 random jump operators with unique,
    quickly reached steady state (Liouvillian gap >= ``min_gap``)."""
    for _ in range(max_tries):
        d_sub = dims or _RANDOM_DIMS[rng.integers(len(_RANDOM_DIMS))]
        layout = SpaceLayout([(f"s{i}", d) for i, d in enumerate(d_sub)])
        d = layout.total_dim
        a = rng.normal(size=(d, d)) + 1j * rng.normal(size=(d, d))
        H = Operator(layout, 0.5 * (a + a.conj().T))
        channels = []
        for _k in range(int(rng.integers(1, 4))):
            c = (rng.normal(size=(d, d)) + 1j * rng.normal(size=(d, d))) / np.sqrt(d)
            channels.append(CollapseChannel(Operator(layout, c), float(rng.uniform(0.5, 2.0))))
        ev = np.linalg.eigvals(dense_liouvillian(H, channels))
        ev = ev[np.argsort(-ev.real)]
        if -ev[1].real >= min_gap:
            return H, channels
    raise RuntimeError("could not draw a well-gapped random system")


def dense_liouvillian(H: Operator, channels) -> np.ndarray:
    """Generator matrix assembled column by column from the explicit master
    equation acting on matrix units (no Kronecker identities)."""
    d = H.shape[0]
    h = H.toarray()
    cs = [(ch.op.toarray(), ch.rate) for ch in channels]
    out = np.empty((d * d, d * d), dtype=complex)
    for j in range(d):
        for i in range(d):
            e = np.zeros((d, d), dtype=complex)
            e[i, j] = 1.0
            r = -1j * (h @ e - e @ h)
            for c, rate in cs:
                cd = c.conj().T
                r += rate * (c @ e @ cd - 0.5 * (cd @ c @ e + e @ cd @ c))
            out[:, i + j * d] = r.reshape(-1, order="F")
    return out


def brute_force_first_order(Ld: np.ndarray, rho: np.ndarray, op: np.ndarray, tau) -> np.ndarray:
    d = rho.shape[0]
    x0 = (op @ rho).reshape(-1, order="F")
    mean = np.trace(op @ rho)
    out = []
    for t in tau:
        x = (la.expm(Ld * t) @ x0).reshape(d, d, order="F")
        out.append(np.trace(op.conj().T @ x) - abs(mean) ** 2)
    return np.array(out)


def brute_force_second_order(Ld: np.ndarray, rho: np.ndarray, o1: np.ndarray, o2: np.ndarray,
                             tau) -> np.ndarray:
    d = rho.shape[0]
    x0 = (o1 @ rho @ o1.conj().T).reshape(-1, order="F")
    n1 = np.trace(o1.conj().T @ o1 @ rho).real
    n2 = np.trace(o2.conj().T @ o2 @ rho).real
    out = []
    for t in tau:
        x = (la.expm(Ld * t) @ x0).reshape(d, d, order="F")
        out.append(np.trace(o2.conj().T @ o2 @ x) / (n1 * n2))
    return np.array(out)


def _unit_norm(a: np.ndarray) -> np.ndarray:
    # unit spectral norm keeps correlation values O(1), so tolerances are relative
    return a / np.linalg.norm(a, 2)


def oracle_checks(H: Operator, channels, rng: np.random.Generator) -> dict:
    """Deviations of the library from the dense oracles on one system."""
    L = build_liouvillian(H, channels)
    Ld = dense_liouvillian(H, channels)
    d = H.shape[0]
    a = rng.normal(size=(d, d)) + 1j * rng.normal(size=(d, d))
    x = a @ a.conj().T
    x /= np.trace(x)
    action = float(np.abs(L.apply(x) - (Ld @ x.reshape(-1, order="F")).reshape(d, d, order="F")).max())
    rho = steady_state(L)
    tau = uniform_grid(2.0, 0.1)
    o1, o2 = (Operator(H.layout, _unit_norm(rng.normal(size=(d, d)) + 1j * rng.normal(size=(d, d))))
              for _ in range(2))
    f = first_order(L, rho, o1, tau).values
    f_ref = brute_force_first_order(Ld, rho.matrix, o1.toarray(), tau)
    s = second_order(L, rho, o1, o2, tau).values
    s_ref = brute_force_second_order(Ld, rho.matrix, o1.toarray(), o2.toarray(), tau)
    late = evolve(L, DensityOperator(H.layout, x), np.array([0.0, 100.0]))[-1]
    return {"action": action,
            "first_order": float(np.abs(f - f_ref).max()),
            "second_order": float(np.abs(s - s_ref).max()),
            "steady_vs_evolve": float(np.abs(late.matrix - rho.matrix).max())}


def criterion_8(ctx: ValidationContext, n_systems: int = 12, seed: int = 20240611) -> CriterionResult:
    rng = np.random.default_rng(seed)
    worst = {"action": 0.0, "first_order": 0.0, "second_order": 0.0, "steady_vs_evolve": 0.0}
    for _ in range(n_systems):
        H, ch = random_open_system(rng)
        for k, v in oracle_checks(H, ch, rng).items():
            worst[k] = max(worst[k], v)
    ok = (worst["action"] <= 1e-12 and worst["first_order"] <= 1e-8
          and worst["second_order"] <= 1e-8 and worst["steady_vs_evolve"] <= 1e-6)
    return CriterionResult(8, "dense-oracle equivalence", ok, worst,
                           "action 1e-12, regression 1e-8, steady vs evolve(100) 1e-6",
                           note=f"{n_systems} random systems, seed {seed}")


def criterion_9(ctx: ValidationContext) -> CriterionResult:
    m = {f"{fp}'": clebsch_gordan(4, fp, -4, 1) / clebsch_gordan(4, 5, -4, -1) for fp in (5, 4, 3)}
    ok = all(_within(m[k], t, 0.005) for k, t in (("5'", 0.15), ("4'", 0.34), ("3'", 0.44)))
    return CriterionResult(9, "hyperfine coupling ratios", ok, m, "0.15, 0.34, 0.44 (±0.005)")


# -- conservation and normalization --------------------------------------------------

def criterion_10(ctx: ValidationContext) -> CriterionResult:
    m = {}
    if not ctx.states:
        ctx.two_level(kappa=1.0, g=1.0)
    m["states_checked"] = len(ctx.states)
    m["max_trace_error"] = max(r.trace_error() for _, r in ctx.states)
    m["max_hermiticity_error"] = max(r.hermiticity_error() for _, r in ctx.states)
    m["min_eigenvalue"] = min(r.min_eigenvalue() for _, r in ctx.states)
    m["max_relative_residual"] = max(steady_state_residual(s_.liouvillian, r)
                                     for s_, r in ctx.systems)
    ok = (m["max_trace_error"] <= 1e-10 and m["max_hermiticity_error"] <= 1e-10
          and m["min_eigenvalue"] >= -1e-8 and m["max_relative_residual"] <= 1e-10)

    # trajectory from the bare ground state
    s = build_two_level(TwoLevelParams(kappa=1.0, g=1.0, n_max=ctx.n_max))
    traj = evolve(s.liouvillian, DensityOperator(s.layout, _ground(s.layout)),
                  uniform_grid(10.0, 0.1))
    m["trajectory_trace_error"] = max(r.trace_error() for r in traj)
    m["trajectory_hermiticity_error"] = max(r.hermiticity_error() for r in traj)
    m["trajectory_min_eigenvalue"] = min(r.min_eigenvalue() for r in traj)
    ok &= (m["trajectory_trace_error"] <= 1e-8 and m["trajectory_hermiticity_error"] <= 1e-8
           and m["trajectory_min_eigenvalue"] >= -1e-6)

    # long-delay factorization
    sys_, rho = ctx.two_level(kappa=1.0, g=1.0)
    tau = uniform_grid(30.0, 0.01)
    g2 = second_order_matrix(sys_.liouvillian, rho,
                             {k: sys_.op(k) for k in ("E", "r", "b")}, tau)
    series = list(g2.values()) + ctx.g2_series
    m["max_long_delay_deviation"] = max(
        float(np.abs(s_.values[s_.tau >= 20.0] - 1.0).max()) if np.any(s_.tau >= 20.0)
        else 0.0 for s_ in series)
    ok &= m["max_long_delay_deviation"] <= 0.01

    # Parseval on every spectrum source produced in this run
    corrs = list(ctx.first_order_series)
    if not corrs:
        corrs = list(first_order_many(sys_.liouvillian, rho, {"E": sys_.op("E")},
                                      uniform_grid(*SPECTRUM_TAU)).values())
    m["parseval_sources"] = len(corrs)
    m["max_parseval_error"] = max(parseval_error(c) for c in corrs)
    ok &= m["max_parseval_error"] <= 0.01
    m["warnings"] = list(ctx.warnings)
    return CriterionResult(10, "conservation and normalization", bool(ok), m,
                           "trace/Hermiticity 1e-10 (states) 1e-8 (trajectories), eigenvalues, "
                           "|g2(tau>=20)-1| <= 0.01, Parseval 1%")


def _ground(layout: SpaceLayout) -> np.ndarray:
    rho = np.zeros((layout.total_dim,) * 2, dtype=complex)
    rho[0, 0] = 1.0
    return rho


CRITERIA: dict[int, Callable[[ValidationContext], CriterionResult]] = {
    1: criterion_1, 2: criterion_2, 3: criterion_3, 4: criterion_4, 5: criterion_5,
    6: criterion_6, 7: criterion_7, 8: criterion_8, 9: criterion_9, 10: criterion_10,
}


def run_criteria(numbers=None, ctx: ValidationContext | None = None,
                 on_result: Callable[[CriterionResult], None] | None = None) -> list[CriterionResult]:
    """Run the selected criteria in order (criterion 10 last, so it sees
    everything the others produced)."""
    ctx = ctx or ValidationContext()
    numbers = sorted(numbers or CRITERIA)
    results = []
    for n in numbers:
        res = CRITERIA[n](ctx)
        results.append(res)
        if on_result:
            on_result(res)
    return results

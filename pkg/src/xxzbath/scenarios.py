"""Figure presets, parameter sweeps and CSV output."""
from __future__ import annotations

import csv
import dataclasses
import json
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional

import numpy as np

from .entanglement import ConcurrenceSeries, Method, detect_esd
from .errors import ConfigError, UnknownFigure
from .model import DEFAULT_TAIL_EPSILON, PARAM_FIELDS, InitialQubitState, ModelParams, validate
from .pipeline import MethodResult, closed_form_available, concurrence_series

CSV_HEADER = ("t", "concurrence", "rho11", "rho22", "rho33", "rho44",
              "re_rho14", "im_rho14", "method", "sweep_param", "sweep_value")
METHOD_CHOICES = ("closed_form", "ode", "oracle", "all")
SWEEP_FIELDS = PARAM_FIELDS + ("chi",)

TRACE_TOL = 1e-9
HERMITIAN_TOL = 1e-10
POSITIVITY_TOL = 1e-9
X_FORM_TOL = 1e-10
AGREEMENT_TOL = 1e-6
ESD_THRESHOLD = 1e-6


@dataclass(frozen=True)
class Sweep:
    field: str
    values: tuple

    def __post_init__(self):
        if self.field not in SWEEP_FIELDS:
            raise ConfigError(f"unknown sweep field {self.field!r}; expected one of {SWEEP_FIELDS}")
        object.__setattr__(self, "values", tuple(float(v) for v in self.values))
        if not self.values:
            raise ConfigError("sweep needs at least one value")


@dataclass(frozen=True)
class ScenarioConfig:
    params: ModelParams
    init: InitialQubitState
    t_max: float = 10.0
    steps: int = 1001
    method: str = "all"
    sweep: Optional[Sweep] = None
    tail_epsilon: float = DEFAULT_TAIL_EPSILON
    output_path: str = "results"
    name: str = "custom"
    # keep mu0 = 2 g_bath while sweeping g_bath
    lock_resonance: bool = False

    def __post_init__(self):
        if int(self.steps) != self.steps or self.steps < 2:
            raise ConfigError(f"steps must be an integer >= 2, got {self.steps}")
        if not self.t_max > 0:
            raise ConfigError(f"t_max must be > 0, got {self.t_max}")
        if self.method not in METHOD_CHOICES:
            raise ConfigError(f"method must be one of {METHOD_CHOICES}, got {self.method!r}")
        if not 0 < self.tail_epsilon < 1:
            raise ConfigError("tail_epsilon must lie in (0, 1)")

    def replace(self, **changes) -> "ScenarioConfig":
        return dataclasses.replace(self, **changes)

    def times(self) -> np.ndarray:
        return np.linspace(0.0, self.t_max, int(self.steps))

    def methods(self) -> list[Method]:
        if self.method == "all":
            return list(Method)
        return [Method(self.method)]

    def points(self) -> list[tuple[Optional[float], ModelParams]]:
        """(sweep value, params) for every sweep point, in sweep order."""
        if self.sweep is None:
            return [(None, self.params)]
        out = []
        for v in self.sweep.values:
            if self.sweep.field == "chi":
                p = self.params.replace(gamma_z=self.params.omega + v)
            else:
                p = self.params.replace(**{self.sweep.field: v})
                if self.lock_resonance and self.sweep.field == "g_bath":
                    p = p.replace(mu0=2.0 * v)
            out.append((v, p))
        return out

    def to_dict(self) -> dict:
        d = {
            "params": self.params.to_dict(),
            "init": {"alpha_re": self.init.alpha.real, "alpha_im": self.init.alpha.imag,
                     "beta_re": self.init.beta.real, "beta_im": self.init.beta.imag},
            "t_max": self.t_max, "steps": self.steps, "method": self.method,
            "sweep": None if self.sweep is None else {"field": self.sweep.field,
                                                      "values": list(self.sweep.values)},
            "tail_epsilon": self.tail_epsilon, "output_path": self.output_path,
            "name": self.name, "lock_resonance": self.lock_resonance,
        }
        return d


# ---------------------------------------------------------------- presets

def _preset(name, init, sweep, lock=False, **params):
    base = dict(omega=0.0, gamma_z=0.0, dz_sys=0.0, g0=2.0, g_bath=2.0)
    base.update(params)
    base.setdefault("mu0", 2.0 * base["g_bath"])
    return ScenarioConfig(params=ModelParams(**base), init=init, sweep=sweep,
                          name=name, output_path=f"results/{name}", lock_resonance=lock)


_BELL = InitialQubitState.bell()
_GROUND = InitialQubitState.ground()
_DZ_VALUES = (0.0, 0.5, 1.0, 2.0)

FIGURE_PRESETS = {
    "fig1": lambda: _preset("fig1", _GROUND, Sweep("dz_sys", _DZ_VALUES), temperature=4.0),
    "fig2": lambda: _preset("fig2", _BELL, Sweep("dz_sys", _DZ_VALUES), temperature=6.0),
    "fig3": lambda: _preset("fig3", _BELL, Sweep("dz_sys", _DZ_VALUES), omega=1.0, gamma_z=0.5,
                            temperature=4.0),
    "fig4": lambda: _preset("fig4", _BELL, Sweep("temperature", (2.0, 4.0, 10.0, 20.0)),
                            dz_sys=0.4, temperature=4.0),
    "fig5": lambda: _preset("fig5", _BELL, Sweep("dz_sys", _DZ_VALUES), temperature=20.0),
    "fig6": lambda: _preset("fig6", _BELL, Sweep("chi", (0.0, 1.0, 2.0, 4.0)), temperature=6.0),
    "fig7": lambda: _preset("fig7", _BELL, Sweep("g0", (0.5, 1.0, 2.0, 3.0)), omega=2.0,
                            dz_sys=1.0, gamma_z=1.0, temperature=4.0),
    "fig8": lambda: _preset("fig8", _BELL, Sweep("g_bath", (1.0, 2.0, 3.0, 4.0)), lock=True,
                            omega=2.0, dz_sys=0.2, gamma_z=2.0, temperature=6.0),
}


def figure_preset(figure_id: str) -> ScenarioConfig:
    try:
        return FIGURE_PRESETS[figure_id]()
    except KeyError:
        raise UnknownFigure(f"unknown figure {figure_id!r}; choose from {sorted(FIGURE_PRESETS)}") from None


# ---------------------------------------------------------------- config files

def config_from_dict(data: dict, base: Optional[ScenarioConfig] = None) -> ScenarioConfig:
    """Build a config from the JSON schema; keys absent from ``data`` keep ``base``."""
    known = {"params", "init", "t_max", "steps", "method", "sweep", "tail_epsilon",
             "output_path", "name", "lock_resonance"}
    unknown = set(data) - known
    if unknown:
        raise ConfigError(f"unknown config keys: {sorted(unknown)}")
    base = base or ScenarioConfig(params=ModelParams(), init=InitialQubitState.bell())
    changes = {}
    try:
        if "params" in data:
            bad = set(data["params"]) - set(PARAM_FIELDS)
            if bad:
                raise ConfigError(f"unknown params: {sorted(bad)}")
            changes["params"] = base.params.replace(**{k: float(v) for k, v in data["params"].items()})
        if "init" in data:
            i = data["init"]
            changes["init"] = InitialQubitState(complex(i.get("alpha_re", 0.0), i.get("alpha_im", 0.0)),
                                                complex(i.get("beta_re", 0.0), i.get("beta_im", 0.0)))
        if "sweep" in data:
            s = data["sweep"]
            changes["sweep"] = None if s is None else Sweep(s["field"], tuple(s["values"]))
        for key in ("t_max", "tail_epsilon"):
            if key in data:
                changes[key] = float(data[key])
        if "steps" in data:
            changes["steps"] = int(data["steps"])
        for key in ("method", "output_path", "name"):
            if key in data:
                changes[key] = str(data[key])
        if "lock_resonance" in data:
            changes["lock_resonance"] = bool(data["lock_resonance"])
    except (KeyError, TypeError, ValueError) as exc:
        if isinstance(exc, ConfigError):
            raise
        raise ConfigError(f"malformed config: {exc}") from exc
    return base.replace(**changes)


def load_config(path, base: Optional[ScenarioConfig] = None) -> ScenarioConfig:
    try:
        data = json.loads(Path(path).read_text(encoding="utf-8"))
    except (OSError, json.JSONDecodeError) as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    return config_from_dict(data, base)


def parse_sweep(text: str) -> Sweep:
    """``field=v1,v2,...``"""
    key, sep, values = text.partition("=")
    if not sep:
        raise ConfigError(f"sweep must look like field=v1,v2,..., got {text!r}")
    try:
        return Sweep(key.strip(), tuple(float(v) for v in values.split(",") if v.strip()))
    except ValueError as exc:
        raise ConfigError(f"bad sweep values in {text!r}") from exc


# ---------------------------------------------------------------- running

@dataclass
class PointReport:
    sweep_value: Optional[float]
    params: ModelParams
    results: dict = field(default_factory=dict)      # Method -> MethodResult
    skipped: list = field(default_factory=list)

    def diagnostics(self) -> dict:
        d = {"trace_error": 0.0, "hermiticity": 0.0, "positivity_violation": 0.0,
             "off_pattern": 0.0, "method_disagreement": 0.0}
        for res in self.results.values():
            d.update(_merge_max(d, density_diagnostics(res.densities)))
        values = [r.series.values for r in self.results.values()]
        for i in range(len(values)):
            for j in range(i + 1, len(values)):
                d["method_disagreement"] = max(d["method_disagreement"],
                                               float(np.max(np.abs(values[i] - values[j]))))
        return d

    def reference(self) -> MethodResult:
        for m in (Method.ORACLE, Method.ODE, Method.CLOSED_FORM):
            if m in self.results:
                return self.results[m]
        raise LookupError("no results")


def _merge_max(a: dict, b: dict) -> dict:
    return {k: max(a.get(k, 0.0), v) for k, v in b.items()}


def density_diagnostics(rhos: np.ndarray) -> dict:
    herm = float(np.max(np.abs(rhos - np.swapaxes(rhos.conj(), -1, -2))))
    trace = float(np.max(np.abs(np.trace(rhos, axis1=-2, axis2=-1) - 1.0)))
    sym = 0.5 * (rhos + np.swapaxes(rhos.conj(), -1, -2))
    min_eig = float(np.min(np.linalg.eigvalsh(sym)))
    mask = np.ones((4, 4), dtype=bool)
    mask[np.arange(4), np.arange(4)] = False
    mask[np.arange(4), 3 - np.arange(4)] = False
    return {"trace_error": trace, "hermiticity": herm,
            "positivity_violation": max(0.0, -min_eig),
            "off_pattern": float(np.max(np.abs(rhos[:, mask])))}


def compute_point(config: ScenarioConfig, sweep_value: Optional[float],
                  params: ModelParams) -> PointReport:
    validate(params)
    report = PointReport(sweep_value, params)
    times = config.times()
    for method in config.methods():
        if method is Method.CLOSED_FORM and not closed_form_available(params):
            if config.method == "all":
                report.skipped.append(method.value)
                continue
        report.results[method] = concurrence_series(params, config.init, times, method,
                                                    tail_epsilon=config.tail_epsilon)
    return report


def _compute_task(args):
    return compute_point(*args)


def compute_all(config: ScenarioConfig, jobs: int = 1) -> list[PointReport]:
    tasks = [(config, v, p) for v, p in config.points()]
    if jobs > 1 and len(tasks) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            return list(pool.map(_compute_task, tasks))
    return [_compute_task(t) for t in tasks]


def _fmt(x: float) -> str:
    return f"{x:.17g}"


def csv_rows(result: MethodResult, sweep_param: str, sweep_value: Optional[float]):
    rhos = result.densities
    sv = "" if sweep_value is None else _fmt(sweep_value)
    for k, t in enumerate(result.times):
        r = rhos[k]
        yield [_fmt(t), _fmt(result.series.values[k]), _fmt(r[0, 0].real), _fmt(r[1, 1].real),
               _fmt(r[2, 2].real), _fmt(r[3, 3].real), _fmt(r[0, 3].real), _fmt(r[0, 3].imag),
               result.method.value, sweep_param, sv]


def write_csv(path: Path, result: MethodResult, sweep_param: str, sweep_value: Optional[float]) -> Path:
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(CSV_HEADER)
        w.writerows(csv_rows(result, sweep_param, sweep_value))
    return path


def csv_name(config: ScenarioConfig, sweep_value: Optional[float], method: Method) -> str:
    if sweep_value is None:
        return f"{config.name}_{method.value}.csv"
    return f"{config.name}_{config.sweep.field}={sweep_value:g}_{method.value}.csv"


@dataclass
class RunReport:
    config: ScenarioConfig
    points: list
    files: list
    summary: dict
    exit_code: int


def summarize(config: ScenarioConfig, points: list[PointReport]) -> tuple[dict, int]:
    entries = []
    totals = {"trace_error": 0.0, "hermiticity": 0.0, "positivity_violation": 0.0,
              "off_pattern_dz0": 0.0, "method_disagreement": 0.0}
    for pt in points:
        diag = pt.diagnostics()
        ref = pt.reference()
        entry = {
            "sweep_value": pt.sweep_value,
            "methods": [m.value for m in pt.results],
            "skipped": pt.skipped,
            **diag,
            "peak_concurrence": float(np.max(ref.series.values)),
            "esd_intervals": detect_esd(ref.series, ESD_THRESHOLD),
        }
        entries.append(entry)
        for key in ("trace_error", "hermiticity", "positivity_violation", "method_disagreement"):
            totals[key] = max(totals[key], diag[key])
        if pt.params.dz_sys == 0.0:
            totals["off_pattern_dz0"] = max(totals["off_pattern_dz0"], diag["off_pattern"])
    violations = []
    limits = {"trace_error": TRACE_TOL, "hermiticity": HERMITIAN_TOL,
              "positivity_violation": POSITIVITY_TOL, "off_pattern_dz0": X_FORM_TOL,
              "method_disagreement": AGREEMENT_TOL}
    for key, lim in limits.items():
        if totals[key] > lim:
            violations.append(f"{key} = {totals[key]:.3e} exceeds {lim:g}")
    summary = {"name": config.name, "sweep_param": config.sweep.field if config.sweep else None,
               "points": entries, "max": totals, "violations": violations}
    return summary, (2 if violations else 0)


def run(config: ScenarioConfig, jobs: int = 1, write: bool = True) -> RunReport:
    points = compute_all(config, jobs)
    files = []
    sweep_param = config.sweep.field if config.sweep else ""
    if write:
        out = Path(config.output_path)
        for pt in points:
            for method, res in pt.results.items():
                files.append(write_csv(out / csv_name(config, pt.sweep_value, method), res,
                                       sweep_param, pt.sweep_value))
    summary, code = summarize(config, points)
    if write:
        summary_path = Path(config.output_path) / f"{config.name}_summary.json"
        summary_path.write_text(json.dumps(summary, indent=2, default=_json_default) + "\n",
                                encoding="utf-8")
        files.append(summary_path)
    return RunReport(config, points, files, summary, code)


def _json_default(obj):
    if isinstance(obj, (np.floating, np.integer)):
        return obj.item()
    if isinstance(obj, float) and math.isnan(obj):
        return None
    raise TypeError(type(obj))


def sweep_chi(base: ScenarioConfig, chi_values, jobs: int = 1, write: bool = True) -> RunReport:
    """Run ``base`` with gamma_z = omega + chi for each chi, so |gamma_z - omega| = chi."""
    return run(base.replace(sweep=Sweep("chi", tuple(chi_values))), jobs=jobs, write=write)


def series_by_value(report: RunReport, method: Method = Method.ORACLE) -> dict:
    return {pt.sweep_value: pt.results[method].series for pt in report.points}


__all__ = [
    "ScenarioConfig", "Sweep", "figure_preset", "FIGURE_PRESETS", "run", "sweep_chi",
    "config_from_dict", "load_config", "parse_sweep", "RunReport", "ConcurrenceSeries",
]

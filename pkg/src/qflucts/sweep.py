"""Temperature sweeps, report tables and comparison against the oracles.

A sweep runs one experiment on every point of a ``beta*omega`` grid (a
square grid of ``(beta1*omega1, beta2*omega2)`` for the engines), and
collects one report row per grid cell.  Rows are produced in sorted grid
order and every cell draws from its own derived seed, so the output is
reproducible byte for byte.
"""
from __future__ import annotations

import csv
import io
import itertools
import json
import math
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Any, Mapping

import numpy as np

from . import oracles, tpm
from .noise import NoiseConfig
from .thermal import QubitSpec
from .tpm import SIGN_NAMES, SIGNS, ExperimentDef, Kind, Protocol

DEFAULT_OMEGA1 = 5.25
DEFAULT_OMEGA2 = 5.17
DEFAULT_SHOTS = 8192
DEFAULT_N_STEPS = (1, 2, 3, 5, 10, 25, 50)
FORMATS = ("csv", "json")
EXACT_TOLERANCE = 1e-10

_P_NAMES = [f"P_{SIGN_NAMES[a]}{SIGN_NAMES[b]}" for a in SIGNS for b in SIGNS]

JARZYNSKI_COLUMNS = [
    "beta_omega_nominal", "beta_omega_measured", "P_plus", "P_minus", "P_zero", "err_P",
    "jarzynski_value", "jarzynski_err", "oracle_P_plus", "oracle_P_minus", "oracle_P_zero",
]
INTERMEDIATE_COLUMNS = [
    "n_steps", "beta_omega_nominal", "beta_omega_measured", "P_plus", "P_minus", "P_zero",
    "err_P", "p_0_given_0", "p_1_given_1", "p_0_given_1", "p_1_given_0", "err_p_cond",
    "jarzynski_value", "jarzynski_err", "oracle_P_plus", "oracle_P_minus", "oracle_P_zero",
    "oracle_p_0_given_0", "oracle_p_0_given_1",
]
ENGINE_COLUMNS = (
    ["b1_nominal", "b2_nominal", "b1_measured", "b2_measured"]
    + _P_NAMES + ["err_P"]
    + ["dE1", "dE2", "W", "err_dE1", "err_dE2", "err_W", "fr_value", "fr_err", "mode"]
    + ["oracle_" + p for p in _P_NAMES]
    + ["oracle_dE1", "oracle_dE2", "oracle_W", "oracle_fr", "oracle_mode"]
    + ["dev_P_max", "dev_dE1", "dev_dE2", "dev_W", "dev_fr"]
)


class ConfigError(ValueError):
    """Invalid run configuration; the message names the offending field."""


def default_grid(kind: Kind) -> list[float]:
    if kind.n_systems == 2:
        return np.linspace(0.0, 2.5, 17).tolist()
    return np.linspace(-2.5, 2.5, 21).tolist()


@dataclass(frozen=True)
class RunConfig:
    experiment: Kind
    protocol: Protocol = Protocol.AATPM
    grid: tuple[float, ...] = ()
    n_steps: tuple[int, ...] = DEFAULT_N_STEPS
    omega1: float = DEFAULT_OMEGA1
    omega2: float = DEFAULT_OMEGA2
    shots: int = DEFAULT_SHOTS
    repetitions: int = 1
    seed: int = 0
    noise: NoiseConfig = field(default_factory=NoiseConfig)
    exact: bool = False
    out: str | None = None
    format: str = "csv"
    tolerance: float | None = None

    def __post_init__(self):
        try:
            object.__setattr__(self, "experiment", Kind(self.experiment))
        except ValueError:
            raise ConfigError(f"experiment: unknown kind {self.experiment!r}; "
                              f"choose from {[k.value for k in Kind]}") from None
        try:
            object.__setattr__(self, "protocol", Protocol(self.protocol))
        except ValueError:
            raise ConfigError(f"protocol: unknown protocol {self.protocol!r}; "
                              f"choose from {[p.value for p in Protocol]}") from None
        grid = tuple(float(g) for g in self.grid) or tuple(default_grid(self.experiment))
        object.__setattr__(self, "grid", grid)
        object.__setattr__(self, "n_steps", tuple(int(n) for n in self.n_steps))
        if not all(math.isfinite(g) for g in grid):
            raise ConfigError("grid: values must be finite")
        if not self.n_steps or min(self.n_steps) < 1:
            raise ConfigError("n_steps: need at least one value, all >= 1")
        if self.shots < 1:
            raise ConfigError("shots: must be >= 1")
        if self.repetitions < 1:
            raise ConfigError("repetitions: must be >= 1")
        if not 0 <= self.seed < 2**64:
            raise ConfigError("seed: must be an unsigned 64-bit integer")
        for name in ("omega1", "omega2"):
            if not getattr(self, name) > 0:
                raise ConfigError(f"{name}: must be positive")
        if self.format not in FORMATS:
            raise ConfigError(f"format: must be one of {FORMATS}, got {self.format!r}")
        if self.tolerance is not None and not self.tolerance > 0:
            raise ConfigError("tolerance: must be positive")

    @property
    def is_noiseless(self) -> bool:
        return self.noise.is_noiseless

    def probability_tolerance(self) -> float:
        if self.tolerance is not None:
            return self.tolerance
        return EXACT_TOLERANCE if self.exact else 5 / math.sqrt(self.shots)

    def to_dict(self) -> dict[str, Any]:
        return {
            "experiment": self.experiment.value, "protocol": self.protocol.value,
            "grid": list(self.grid), "n_steps": list(self.n_steps),
            "omega1": self.omega1, "omega2": self.omega2, "shots": self.shots,
            "repetitions": self.repetitions, "seed": self.seed,
            "noise": self.noise.to_dict(), "exact": self.exact,
            "format": self.format, "tolerance": self.tolerance,
        }


def config_from_mapping(data: Mapping[str, Any]) -> RunConfig:
    """Build a :class:`RunConfig` from a parsed config file.

    Accepted layout (TOML)::

        experiment = "swap"      # jarzynski | intermediate | swap | qmc
        protocol = "aatpm"       # aatpm | tpm
        shots = 8192
        repetitions = 1
        seed = 0
        exact = false
        n_steps = [1, 2, 5]      # intermediate experiment only
        tolerance = 0.05         # optional
        [grid]                   # or: grid = [0.5, 1.0]
        start = 0.0
        stop = 2.5
        num = 17
        [frequencies]
        omega1 = 5.25
        omega2 = 5.17
        [noise]
        heating = 0.05
        [output]
        path = "swap.csv"
        format = "csv"
    """
    data = dict(data)
    known = {"experiment", "protocol", "shots", "repetitions", "seed", "exact", "n_steps",
             "tolerance", "grid", "frequencies", "noise", "output"}
    unknown = set(data) - known
    if unknown:
        raise ConfigError(f"{sorted(unknown)[0]}: unknown configuration key")
    if "experiment" not in data:
        raise ConfigError("experiment: required")
    kwargs: dict[str, Any] = {k: data[k] for k in
                              ("experiment", "protocol", "shots", "repetitions", "seed",
                               "exact", "n_steps", "tolerance") if k in data}
    if "grid" in data:
        kwargs["grid"] = parse_grid(data["grid"])
    freq = data.get("frequencies", {})
    for name in ("omega1", "omega2"):
        if name in freq:
            kwargs[name] = float(freq[name])
    if set(freq) - {"omega1", "omega2"}:
        raise ConfigError("frequencies: only omega1 and omega2 are allowed")
    if "noise" in data:
        try:
            kwargs["noise"] = NoiseConfig.from_mapping(data["noise"])
        except (TypeError, ValueError) as exc:
            raise ConfigError(f"noise: {exc}") from None
    out = data.get("output", {})
    if set(out) - {"path", "format"}:
        raise ConfigError("output: only path and format are allowed")
    if "path" in out:
        kwargs["out"] = str(out["path"])
    if "format" in out:
        kwargs["format"] = out["format"]
    for name in ("shots", "repetitions", "seed"):
        if name in kwargs and not isinstance(kwargs[name], int):
            raise ConfigError(f"{name}: must be an integer")
    return RunConfig(**kwargs)


def parse_grid(spec: Any) -> tuple[float, ...]:
    """Grid from a list, a ``{start, stop, num}`` table, or ``"start:stop:num"`` / ``"a,b,c"``."""
    try:
        if isinstance(spec, Mapping):
            return tuple(np.linspace(float(spec["start"]), float(spec["stop"]),
                                     int(spec["num"])).tolist())
        if isinstance(spec, str):
            if ":" in spec:
                start, stop, num = spec.split(":")
                return tuple(np.linspace(float(start), float(stop), int(num)).tolist())
            return tuple(float(v) for v in spec.split(",") if v.strip())
        return tuple(float(v) for v in spec)
    except (KeyError, ValueError, TypeError) as exc:
        raise ConfigError(f"grid: cannot parse {spec!r} ({exc})") from None


@dataclass
class Report:
    """Table of sweep results plus the configuration that produced it."""

    experiment: str
    columns: list[str]
    rows: list[dict[str, Any]]
    config: dict[str, Any] = field(default_factory=dict)

    def column(self, name: str) -> np.ndarray:
        return np.array([row[name] for row in self.rows])


def _measured_beta_omega(jd: tpm.JointDistribution, i: int, fallback: float) -> tuple[float, float]:
    """``(reported, used)`` measured beta*omega; a pure readout reports NaN and uses nominal."""
    p0, p1 = jd.initial_populations(i)
    if p0 <= 0 or p1 <= 0:
        return math.nan, fallback
    b = math.log(p1 / p0)
    return b, b


def _runs(definition: ExperimentDef, config: RunConfig, cell: int) -> list[tpm.JointDistribution]:
    if config.exact:
        return [tpm.exact_distribution(definition)]
    return [tpm.run_experiment(replace(definition, seed=tpm.derive_seed(config.seed, cell, r)))
            for r in range(config.repetitions)]


def _fr_with_error(values: list[float], first: tpm.FrEstimate) -> tuple[float, float]:
    if len(values) > 1:
        return first.value, float(np.std(values, ddof=1))
    return first.value, first.std_error


def _single_row(config: RunConfig, b: float, cell: int, n_steps: int) -> dict[str, Any]:
    kind = config.experiment
    spec = QubitSpec.from_beta_omega(b, config.omega1)
    definition = ExperimentDef(kind, config.protocol, (spec,), config.shots, 0,
                               None if config.is_noiseless else config.noise, n_steps)
    runs = _runs(definition, config, cell)
    estimates = []
    for jd in runs:
        _, used = _measured_beta_omega(jd, 0, b)
        ecd = tpm.energy_change_distribution(jd, (1.0,))
        estimates.append(tpm.jarzynski_estimator(ecd, used))
    jd = runs[0]
    measured, _ = _measured_beta_omega(jd, 0, b)
    ecd = tpm.energy_change_distribution(jd, (1.0,))
    value, err = _fr_with_error([e.value for e in estimates], estimates[0])
    if kind is Kind.JARZYNSKI:
        oracle = oracles.hadamard_work_statistics(b)
    else:
        oracle = oracles.work_statistics(b, oracles.intermediate_matrix(n_steps))
    row = {
        "n_steps": n_steps,
        "beta_omega_nominal": b,
        "beta_omega_measured": measured,
        "P_plus": ecd.p(1), "P_minus": ecd.p(-1), "P_zero": ecd.p(0),
        "err_P": jd.entry_error(),
        "jarzynski_value": value, "jarzynski_err": err,
        "oracle_P_plus": oracle[0], "oracle_P_minus": oracle[1], "oracle_P_zero": oracle[2],
    }
    if kind is Kind.INTERMEDIATE:
        cond = jd.conditional()
        stay, flip = oracles.intermediate_pmn(n_steps)
        pops = jd.initial_populations(0)
        row.update({
            "p_0_given_0": cond[0, 0], "p_1_given_1": cond[1, 1],
            "p_0_given_1": cond[0, 1], "p_1_given_0": cond[1, 0],
            "err_p_cond": (0.0 if jd.shots is None or pops.min() == 0
                           else 1 / math.sqrt(jd.shots * pops.min())),
            "oracle_p_0_given_0": stay, "oracle_p_0_given_1": flip,
        })
    return row


def _engine_row(config: RunConfig, b1: float, b2: float, cell: int) -> dict[str, Any]:
    kind = config.experiment
    w1, w2 = config.omega1, config.omega2
    specs = (QubitSpec.from_beta_omega(b1, w1), QubitSpec.from_beta_omega(b2, w2))
    definition = ExperimentDef(kind, config.protocol, specs, config.shots, 0,
                               None if config.is_noiseless else config.noise)
    runs = _runs(definition, config, cell)
    estimates = []
    for jd in runs:
        ecd = tpm.energy_change_distribution(jd, (w1, w2))
        used = [_measured_beta_omega(jd, i, b)[1] for i, b in enumerate((b1, b2))]
        estimates.append(tpm.multivariate_fr_estimator(ecd, used[0] / w1, used[1] / w2))
    jd = runs[0]
    ecd = tpm.energy_change_distribution(jd, (w1, w2))
    en = tpm.engine_energetics(jd, (w1, w2))
    value, err = _fr_with_error([e.value for e in estimates], estimates[0])
    if kind is Kind.SWAP:
        grid = oracles.swap_joint_probabilities(b1, b2)
        o_e = oracles.swap_energetics(b1, b2, w1, w2)
    else:
        grid = oracles.qmc_joint_probabilities(b1, b2)
        o_e = oracles.qmc_energetics(b1, b2, w1, w2)
    beta1, beta2 = b1 / w1, b2 / w2
    row: dict[str, Any] = {
        "b1_nominal": b1, "b2_nominal": b2,
        "b1_measured": _measured_beta_omega(jd, 0, b1)[0],
        "b2_measured": _measured_beta_omega(jd, 1, b2)[0],
    }
    for name, (a, b) in zip(_P_NAMES, itertools.product(SIGNS, SIGNS)):
        row[name] = ecd.p(a, b)
        row["oracle_" + name] = float(grid[SIGNS.index(a), SIGNS.index(b)])
    row.update({
        "err_P": jd.entry_error(),
        "dE1": en.dE1, "dE2": en.dE2, "W": en.work,
        "err_dE1": en.err_dE1, "err_dE2": en.err_dE2, "err_W": en.err_work,
        "fr_value": value, "fr_err": err,
        "mode": oracles.classify_mode(en.dE1, en.dE2, en.work, beta1, beta2,
                                      en.err_dE1, en.err_dE2, en.err_work).value,
        "oracle_dE1": o_e[0], "oracle_dE2": o_e[1], "oracle_W": o_e[2], "oracle_fr": 1.0,
        "oracle_mode": oracles.classify_mode(*o_e, beta1, beta2).value,
    })
    row["dev_P_max"] = max(abs(row[n] - row["oracle_" + n]) for n in _P_NAMES)
    for q in ("dE1", "dE2", "W"):
        row["dev_" + q] = abs(row[q] - row["oracle_" + q])
    row["dev_fr"] = abs(value - 1.0)
    return {c: float(v) if isinstance(v, (np.floating, np.integer)) else v for c, v in row.items()}


def run_sweep(config: RunConfig) -> Report:
    """Run the configured experiment on every grid cell, in sorted grid order."""
    kind = config.experiment
    grid = sorted(config.grid)
    rows: list[dict[str, Any]] = []
    if kind is Kind.JARZYNSKI:
        columns = JARZYNSKI_COLUMNS
        for cell, b in enumerate(grid):
            rows.append(_single_row(config, b, cell, 1))
    elif kind is Kind.INTERMEDIATE:
        columns = INTERMEDIATE_COLUMNS
        cell = 0
        for n in sorted(config.n_steps):
            for b in grid:
                rows.append(_single_row(config, b, cell, n))
                cell += 1
    else:
        columns = ENGINE_COLUMNS
        cell = 0
        for b1 in grid:
            for b2 in grid:
                rows.append(_engine_row(config, b1, b2, cell))
                cell += 1
    # rows hold exactly what gets serialised, so a JSON round trip is lossless
    rows = [{c: _round12(_plain(row[c])) for c in columns} for row in rows]
    return Report(kind.value, list(columns), rows, config.to_dict())


def _plain(v: Any) -> Any:
    if isinstance(v, (bool, str)):
        return v
    if isinstance(v, (int, np.integer)):
        return int(v)
    return float(v)


# --- serialisation --------------------------------------------------------

def _fmt(v: Any) -> str:
    if isinstance(v, float):
        return format(v, ".12g")
    return str(v)


def _round12(v: Any) -> Any:
    # + 0.0 folds -0.0 into 0.0
    return float(format(v, ".12g")) + 0.0 if isinstance(v, float) else v


def report_to_csv(report: Report) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(report.columns)
    for row in report.rows:
        writer.writerow([_fmt(row[c]) for c in report.columns])
    return buf.getvalue()


def report_to_json(report: Report) -> str:
    doc = {
        "experiment": report.experiment,
        "columns": report.columns,
        "config": report.config,
        "rows": [{c: row[c] for c in report.columns} for row in report.rows],
    }
    return json.dumps(doc, indent=1) + "\n"


def emit_report(report: Report, path: str | Path | None, fmt: str = "csv") -> str:
    """Serialise ``report``; write it to ``path`` unless that is ``None``.  Returns the text."""
    if fmt not in FORMATS:
        raise ValueError(f"unknown format {fmt!r}")
    text = report_to_csv(report) if fmt == "csv" else report_to_json(report)
    if path is not None:
        Path(path).write_text(text)
    return text


def load_report(path: str | Path) -> Report:
    """Read a report written by :func:`emit_report` in JSON format."""
    doc = json.loads(Path(path).read_text())
    return Report(doc["experiment"], doc["columns"], doc["rows"], doc.get("config", {}))


# --- comparison -----------------------------------------------------------

@dataclass
class Deviation:
    max_abs: float
    mean_abs: float
    tolerance: float
    exceedances: int


@dataclass
class Summary:
    quantities: dict[str, Deviation]
    noiseless: bool
    exact: bool

    @property
    def exceedances(self) -> int:
        return sum(d.exceedances for d in self.quantities.values())

    @property
    def failed(self) -> bool:
        """Deviations beyond tolerance count as failure for noiseless runs only."""
        return self.noiseless and self.exceedances > 0

    def lines(self) -> list[str]:
        out = []
        for name, d in self.quantities.items():
            out.append(f"{name:>16s}  max {d.max_abs:.3e}  mean {d.mean_abs:.3e}  "
                       f"tol {d.tolerance:.3e}  exceed {d.exceedances}")
        return out


def _deviation(dev: np.ndarray, tol: np.ndarray) -> Deviation:
    dev = np.asarray(dev, dtype=float)
    if dev.size == 0:
        return Deviation(0.0, 0.0, float(np.max(tol, initial=0.0)), 0)
    tol = np.broadcast_to(tol, dev.shape)
    return Deviation(float(dev.max()), float(dev.mean()), float(tol.max()),
                     int((dev > tol).sum()))


def compare_to_oracle(report: Report, tolerance: float | None = None) -> Summary:
    """Per-quantity deviation from the closed-form results.

    Probabilities are held to ``tolerance`` (default ``5/sqrt(N)``, or
    1e-10 in exact mode).  Fluctuation-relation values and mean energies
    are held to five of their own reported standard errors, with the
    probability tolerance as a floor.
    """
    cfg = report.config
    exact = bool(cfg.get("exact", False))
    shots = int(cfg.get("shots", DEFAULT_SHOTS))
    if tolerance is None:
        tolerance = cfg.get("tolerance") or (EXACT_TOLERANCE if exact else 5 / math.sqrt(shots))
    noiseless = NoiseConfig.from_mapping(cfg.get("noise", {})).is_noiseless
    quantities: dict[str, Deviation] = {}
    if not report.rows:
        return Summary(quantities, noiseless, exact)

    def stat_tol(err_col: str) -> np.ndarray:
        if exact:
            return np.full(len(report.rows), tolerance)
        return np.maximum(5 * report.column(err_col).astype(float), tolerance)

    if report.experiment in (Kind.JARZYNSKI.value, Kind.INTERMEDIATE.value):
        for p in ("P_plus", "P_minus", "P_zero"):
            quantities[p] = _deviation(abs(report.column(p) - report.column("oracle_" + p)),
                                       tolerance)
        if report.experiment == Kind.INTERMEDIATE.value:
            for p, o in (("p_0_given_0", "oracle_p_0_given_0"),
                         ("p_0_given_1", "oracle_p_0_given_1")):
                dev = abs(report.column(p) - report.column(o))
                tol = (np.full(dev.shape, tolerance) if exact
                       else np.maximum(5 * report.column("err_p_cond"), tolerance))
                quantities[p] = _deviation(np.nan_to_num(dev, nan=np.inf), tol)
        quantities["jarzynski"] = _deviation(abs(report.column("jarzynski_value") - 1.0),
                                             stat_tol("jarzynski_err"))
    else:
        quantities["P_ab"] = _deviation(report.column("dev_P_max"), tolerance)
        for q in ("dE1", "dE2", "W"):
            quantities[q] = _deviation(report.column("dev_" + q), stat_tol("err_" + q))
        quantities["fr"] = _deviation(report.column("dev_fr"), stat_tol("fr_err"))
    return Summary(quantities, noiseless, exact)

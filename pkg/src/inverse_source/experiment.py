"""Rod-cooling experiment: reconstruct a cooling source and tabulate the results.

The rod ``(0, pi)`` starts from ``phi(x) = x**3 (pi - x)**3`` and must reach
``psi = 0`` at time ``T``.  For each truncation ``l`` the driver writes

* ``u_eps<eps>_l<l>.csv``   columns ``x, t=0, t=<snapshot>...``
* ``f_eps<eps>_l<l>.csv``   columns ``x, f``
* ``verify_eps<eps>_l<l>.json``  forward-oracle terminal error
* optional SVG plots

plus ``manifest.json`` listing every file with its sha256.
"""

from __future__ import annotations

import configparser
import csv
import hashlib
import json
import logging
import math
from collections.abc import Iterable, Mapping, Sequence
from dataclasses import asdict, dataclass, field, replace
from pathlib import Path

import numpy as np

from .forward import (
    DEFAULT_M,
    DEFAULT_N,
    DEFAULT_TOLERANCE,
    VerificationReport,
    forward_modal,
    verify_reconstruction,
)
from .inverse import InverseSolution, ProblemData, evaluate_f, evaluate_u, solve
from .operators import DEFAULT_NODES, EigenSystem, dirichlet_laplacian, involution, l2_norm

log = logging.getLogger(__name__)

ROD_OPERATORS = ("involution", "dirichlet_laplacian")
MANIFEST = "manifest.json"


class ConfigError(ValueError):
    """Invalid experiment configuration."""


class ExperimentError(RuntimeError):
    """A solver or oracle failure inside one ``(l, epsilon)`` cell."""

    def __init__(self, l: int, epsilon: float, cause: Exception):
        super().__init__(f"l={l}, epsilon={epsilon:g}: {type(cause).__name__}: {cause}")
        self.l = l
        self.epsilon = epsilon
        self.cause = cause


# -- rod data ---------------------------------------------------------------


def rod_profile(x) -> np.ndarray:
    """Initial temperature ``x**3 (pi - x)**3``; exactly zero at both ends."""
    x = np.asarray(x, dtype=float)
    return x**3 * (math.pi - x) ** 3


def rod_profile_d2(x) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    s = math.pi - x
    return 6.0 * x * s**3 - 18.0 * x**2 * s**2 + 6.0 * x**3 * s


def rod_lphi(x, epsilon: float) -> np.ndarray:
    """``-phi''(x) + epsilon phi''(pi - x)`` for the rod profile."""
    x = np.asarray(x, dtype=float)
    return -rod_profile_d2(x) + epsilon * rod_profile_d2(math.pi - x)


# -- configuration ----------------------------------------------------------


def _floats(value) -> tuple[float, ...]:
    if isinstance(value, str):
        value = [v for v in value.replace(";", ",").split(",") if v.strip()]
    return tuple(float(v) for v in value)


def _ints(value) -> tuple[int, ...]:
    out = []
    for v in _floats(value):
        if v != int(v):
            raise ConfigError(f"mode count must be an integer, got {v}")
        out.append(int(v))
    return tuple(out)


@dataclass(frozen=True)
class ExperimentConfig:
    operator: str = "involution"
    epsilon: float = 0.9
    alpha: float = 1.0
    T: float = 5.0
    truncations: tuple[int, ...] = (7, 10, 20)
    snapshot_times: tuple[float, ...] = (0.5, 2.5, 4.5)
    space_N: int = DEFAULT_N
    time_M: int = DEFAULT_M
    output_dir: Path = Path("results")
    emit_plots: bool = False
    epsilons: tuple[float, ...] = (0.0, 0.9)
    tolerance: float = DEFAULT_TOLERANCE
    nodes: int = DEFAULT_NODES

    def __post_init__(self):
        set_ = lambda k, v: object.__setattr__(self, k, v)  # noqa: E731
        try:
            set_("truncations", _ints(self.truncations))
            set_("snapshot_times", _floats(self.snapshot_times))
            set_("epsilons", _floats(self.epsilons))
            for name in ("epsilon", "alpha", "T", "tolerance"):
                set_(name, float(getattr(self, name)))
            for name in ("space_N", "time_M", "nodes"):
                set_(name, int(getattr(self, name)))
        except (TypeError, ValueError) as exc:
            raise ConfigError(str(exc)) from None
        set_("output_dir", Path(self.output_dir))
        set_("emit_plots", bool(self.emit_plots))
        self.validate()

    def validate(self) -> None:
        if self.operator not in ROD_OPERATORS:
            raise ConfigError(
                f"operator {self.operator!r} not usable for the rod experiment; choose from {ROD_OPERATORS}"
            )
        for eps in (self.epsilon, *self.epsilons):
            if not abs(eps) < 1.0:
                raise ConfigError(f"epsilon must satisfy |epsilon| < 1, got {eps}")
        if not 0.0 < self.alpha <= 1.0:
            raise ConfigError(f"alpha must lie in (0, 1], got {self.alpha}")
        if not (math.isfinite(self.T) and self.T > 0):
            raise ConfigError(f"horizon must be positive, got {self.T}")
        if not self.truncations:
            raise ConfigError("truncations must be non-empty")
        if any(l < 1 for l in self.truncations) or any(
            b <= a for a, b in zip(self.truncations, self.truncations[1:])
        ):
            raise ConfigError(f"truncations must be positive and increasing, got {self.truncations}")
        if 4 * self.truncations[-1] > self.nodes - 1:
            raise ConfigError(f"{self.nodes} quadrature nodes cannot resolve l={self.truncations[-1]}")
        if any(not 0.0 <= t <= self.T for t in self.snapshot_times):
            raise ConfigError(f"snapshot times must lie in [0, {self.T}], got {self.snapshot_times}")
        if self.space_N < 3 or self.time_M < 10:
            raise ConfigError("need space_N >= 3 and time_M >= 10")
        if not self.tolerance > 0:
            raise ConfigError("tolerance must be positive")

    def with_overrides(self, **changes) -> ExperimentConfig:
        changes = {k: v for k, v in changes.items() if v is not None}
        try:
            return replace(self, **changes)
        except TypeError as exc:
            raise ConfigError(str(exc)) from None


# config-file key -> ExperimentConfig field
CONFIG_KEYS = {
    "operator": "operator",
    "epsilon": "epsilon",
    "alpha": "alpha",
    "horizon": "T",
    "t": "T",
    "modes": "truncations",
    "truncations": "truncations",
    "snapshots": "snapshot_times",
    "space_n": "space_N",
    "time_m": "time_M",
    "out": "output_dir",
    "output_dir": "output_dir",
    "plots": "emit_plots",
    "epsilons": "epsilons",
    "tolerance": "tolerance",
    "nodes": "nodes",
}


def parse_config_text(text: str) -> dict:
    """Flatten a ``key = value`` file with section headers into config fields.

    Section names are only grouping; a key may appear once across the file.
    """
    parser = configparser.ConfigParser(interpolation=None)
    try:
        parser.read_string(text)
    except configparser.Error as exc:
        raise ConfigError(f"unreadable config: {exc}") from None
    out: dict = {}
    for section in parser.sections():
        for key, raw in parser.items(section):
            name = CONFIG_KEYS.get(key.lower())
            if name is None:
                raise ConfigError(f"unknown config key {key!r} in [{section}]")
            if name in out:
                raise ConfigError(f"config key {key!r} given twice")
            if name == "emit_plots":
                try:
                    value = parser.getboolean(section, key)
                except ValueError:
                    raise ConfigError(f"plots must be a boolean, got {raw!r}") from None
            else:
                value = raw.strip()
            out[name] = value
    return out


def load_config(path: str | Path, **overrides) -> ExperimentConfig:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from None
    # command-line values (non-None) take precedence over the file
    merged = {**parse_config_text(text), **{k: v for k, v in overrides.items() if v is not None}}
    return ExperimentConfig().with_overrides(**merged)


# -- output helpers ---------------------------------------------------------


def format_float(v: float) -> str:
    return format(float(v), ".17g")


def write_csv(path: Path, header: Sequence[str], columns: Sequence[np.ndarray]) -> None:
    rows = np.column_stack([np.asarray(c, dtype=float) for c in columns])
    with path.open("w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for row in rows:
            w.writerow([format_float(v) for v in row])


def write_json(path: Path, payload) -> None:
    path.write_text(json.dumps(payload, indent=2, sort_keys=True) + "\n")


def sha256(path: Path) -> str:
    return hashlib.sha256(path.read_bytes()).hexdigest()


def _tag(epsilon: float, l: int | None = None) -> str:
    tag = f"eps{epsilon:g}"
    return tag if l is None else f"{tag}_l{l}"


def _time_columns(config: ExperimentConfig) -> list[float]:
    times = [0.0]
    for t in config.snapshot_times:
        if t not in times:
            times.append(t)
    return times


def _plot(path: Path, x, series: Mapping[str, np.ndarray], title: str, ylabel: str) -> None:
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    with matplotlib.rc_context({"svg.hashsalt": "inverse-source", "svg.fonttype": "none"}):
        fig, ax = plt.subplots(figsize=(6, 4))
        for label, y in series.items():
            ax.plot(x, y, label=label, linewidth=1.2)
        ax.set_xlabel("x")
        ax.set_ylabel(ylabel)
        ax.set_title(title)
        ax.legend()
        fig.savefig(path, format="svg", metadata={"Date": None})
        plt.close(fig)


# -- experiment -------------------------------------------------------------


def build_operator(config: ExperimentConfig, epsilon: float | None = None) -> EigenSystem:
    modes = max(config.truncations)
    if config.operator == "dirichlet_laplacian":
        return dirichlet_laplacian(0.0, math.pi, nodes=config.nodes, modes=modes)
    eps = config.epsilon if epsilon is None else epsilon
    return involution(eps, nodes=config.nodes, modes=modes)


def _epsilon(config: ExperimentConfig, epsilon: float | None = None) -> float:
    if config.operator == "dirichlet_laplacian":
        return 0.0
    return config.epsilon if epsilon is None else epsilon


@dataclass
class CellResult:
    """Outcome of one ``(epsilon, l)`` cell."""

    epsilon: float
    l: int
    solution: InverseSolution
    source: np.ndarray
    report: VerificationReport
    files: list[tuple[str, str]] = field(default_factory=list)


def run_cell(
    config: ExperimentConfig,
    sys: EigenSystem,
    epsilon: float,
    l: int,
    write: bool = True,
) -> CellResult:
    """Solve, evaluate and verify a single truncation; optionally write its files."""
    x = sys.nodes
    phi = rod_profile(x)
    data = ProblemData(phi, np.zeros_like(phi), config.T, config.alpha)
    try:
        sol = solve(sys, data, l)
        source = evaluate_f(sol, rod_lphi(x, epsilon))
        report = verify_reconstruction(
            sys, data, sol, config.space_N, config.time_M, config.tolerance, f=source
        )
        times = _time_columns(config)
        snapshots = [evaluate_u(sol, t) for t in times]
    except (ArithmeticError, ValueError, np.linalg.LinAlgError) as exc:
        raise ExperimentError(l, epsilon, exc) from exc
    cell = CellResult(epsilon, l, sol, source, report)
    if not write:
        return cell
    out = config.output_dir
    tag = _tag(epsilon, l)
    u_name, f_name, v_name = f"u_{tag}.csv", f"f_{tag}.csv", f"verify_{tag}.json"
    write_csv(out / u_name, ["x"] + [f"t={t:g}" for t in times], [x, *snapshots])
    write_csv(out / f_name, ["x", "f"], [x, source])
    write_json(out / v_name, report.as_dict())
    cell.files += [(u_name, "u_snapshots"), (f_name, "source"), (v_name, "verification")]
    if config.emit_plots:
        p_name = f"u_{tag}.svg"
        _plot(
            out / p_name,
            x,
            {f"t={t:g}": u for t, u in zip(times, snapshots)},
            f"temperature, epsilon={epsilon:g}, l={l}",
            "u",
        )
        cell.files.append((p_name, "plot"))
    return cell


def _manifest(config: ExperimentConfig, entries: Iterable[tuple[str, str]], extra: dict) -> dict:
    out = config.output_dir
    files = [
        {"filename": name, "role": role, "sha256": sha256(out / name)} for name, role in entries
    ]
    cfg = {k: (str(v) if isinstance(v, Path) else v) for k, v in asdict(config).items()}
    cfg = {k: list(v) if isinstance(v, tuple) else v for k, v in cfg.items()}
    manifest = {"config": cfg, "files": files, **extra}
    write_json(out / MANIFEST, manifest)
    return manifest


def run_experiment(config: ExperimentConfig) -> dict:
    """Run every truncation of ``config`` and return the manifest.

    The manifest carries ``files`` (filename, role, sha256) and
    ``verification`` (one report per truncation).  Failed verifications are
    reported, not raised; solver failures raise :class:`ExperimentError`.
    """
    config.output_dir.mkdir(parents=True, exist_ok=True)
    eps = _epsilon(config)
    sys = build_operator(config, eps)
    cells = [run_cell(config, sys, eps, l) for l in config.truncations]
    entries = [item for c in cells for item in c.files]
    if config.emit_plots:
        name = f"f_{_tag(eps)}.svg"
        _plot(
            config.output_dir / name,
            sys.nodes,
            {f"l={c.l}": c.source for c in cells},
            f"source, epsilon={eps:g}",
            "f",
        )
        entries.append((name, "plot"))
    reports = [c.report.as_dict() for c in cells]
    return _manifest(config, entries, {"verification": reports})


def compare_energy(config: ExperimentConfig) -> dict:
    """Tabulate cooling effort and free-cooling decay across ``config.epsilons``.

    Uses the largest truncation.  Each row holds ``||f||``, the controlled
    temperature norms at the snapshots, the norms of free cooling (``f = 0``)
    at the snapshots and the verification error.  Writes ``energy.csv``.
    """
    if config.operator != "involution":
        raise ConfigError("energy comparison needs the involution operator")
    if len(config.epsilons) < 2:
        raise ConfigError("energy comparison needs at least two epsilon values")
    if len(set(config.epsilons)) != len(config.epsilons):
        raise ConfigError("epsilon values must be distinct")
    config.output_dir.mkdir(parents=True, exist_ok=True)
    l = config.truncations[-1]
    times = list(config.snapshot_times)
    header = (
        ["epsilon", "f_norm"]
        + [f"u_norm_t={t:g}" for t in times]
        + [f"free_norm_t={t:g}" for t in times]
        + ["terminal_error"]
    )
    rows = []
    for eps in config.epsilons:
        sys = build_operator(config, eps)
        cell = run_cell(config, sys, eps, l, write=False)
        phi = cell.solution.phi_field
        try:
            controlled = [l2_norm(sys, evaluate_u(cell.solution, t)) for t in times]
            free = forward_modal(sys, phi, np.zeros_like(phi), config.alpha, config.T, l, times)
        except (ArithmeticError, ValueError) as exc:
            raise ExperimentError(l, eps, exc) from exc
        rows.append(
            {
                "epsilon": eps,
                "l": l,
                "f_norm": l2_norm(sys, cell.source),
                "u_norm": controlled,
                "free_norm": [l2_norm(sys, u) for u in free],
                "terminal_error": cell.report.terminal_error,
                "passed": cell.report.passed,
            }
        )
    columns = [
        [r["epsilon"] for r in rows],
        [r["f_norm"] for r in rows],
        *([r["u_norm"][i] for r in rows] for i in range(len(times))),
        *([r["free_norm"][i] for r in rows] for i in range(len(times))),
        [r["terminal_error"] for r in rows],
    ]
    write_csv(config.output_dir / "energy.csv", header, columns)
    return {"l": l, "snapshot_times": times, "rows": rows, "file": "energy.csv"}

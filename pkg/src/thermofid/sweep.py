"""Parameter sweeps over the XY (gamma, lambda) plane, CSV output and plot scripts."""

from __future__ import annotations

import enum
import math
import os
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import __version__
from .fidelity import clamp_log_factors, half_angle_weights, log_fidelity_kernel
from .loschmidt import angle_terms, log_echo_kernel
from .model import Grid, unit_vectors, xy_mode_arrays

CSV_HEADER = "beta,gamma,lambda,value,log_value"


class Quantity(enum.Enum):
    FIDELITY = "fidelity"
    ECHO = "echo"


class ConfigError(ValueError):
    def __init__(self, field_name: str, message: str):
        super().__init__(f"{field_name}: {message}")
        self.field = field_name


@dataclass(frozen=True)
class SweepConfig:
    n_sites: int = 200
    grid: Grid = Grid.INTEGER
    gamma_range: tuple = (0.0, 1.5, 151)
    lambda_range: tuple = (0.0, 2.0, 201)
    delta_gamma: float = 1e-2
    delta_lambda: float = 1e-2
    beta_list: tuple = (1.0, 10.0, 20.0, 100.0)
    quantity: Quantity = Quantity.FIDELITY
    echo_time: float | None = None
    output_path: str | None = None
    emit_plot_script: bool = False

    def validate(self) -> None:
        if int(self.n_sites) != self.n_sites or self.n_sites < 2 or self.n_sites % 2:
            raise ConfigError("n_sites", f"must be an even integer >= 2, got {self.n_sites}")
        for name in ("gamma_range", "lambda_range"):
            _validate_range(name, getattr(self, name))
        for name in ("delta_gamma", "delta_lambda"):
            value = getattr(self, name)
            if not (math.isfinite(value) and value >= 0):
                raise ConfigError(name, f"must be finite and >= 0, got {value}")
        if self.delta_gamma == 0 and self.delta_lambda == 0:
            raise ConfigError("delta_lambda", "delta_gamma and delta_lambda cannot both be 0")
        if not self.beta_list:
            raise ConfigError("beta_list", "at least one beta is required")
        for b in self.beta_list:
            if math.isnan(b) or not b > 0:
                raise ConfigError("beta_list", f"beta must be > 0 (or inf), got {b}")
        if self.quantity is Quantity.ECHO:
            if self.echo_time is None:
                raise ConfigError("echo_time", "required for echo sweeps")
            if not (math.isfinite(self.echo_time) and self.echo_time >= 0):
                raise ConfigError("echo_time", f"must be finite and >= 0, got {self.echo_time}")

    def axis(self, name: str) -> np.ndarray:
        lo, hi, steps = getattr(self, name)
        return np.linspace(lo, hi, int(steps))


def _validate_range(name, rng):
    try:
        lo, hi, steps = rng
    except (TypeError, ValueError):
        raise ConfigError(name, f"expected (min, max, steps), got {rng!r}") from None
    if not (math.isfinite(lo) and math.isfinite(hi)):
        raise ConfigError(name, "bounds must be finite")
    if int(steps) != steps or steps < 1:
        raise ConfigError(name, f"steps must be a positive integer, got {steps}")
    if steps == 1 and lo != hi:
        raise ConfigError(name, "a single step needs min == max")
    if steps >= 2 and hi < lo:
        raise ConfigError(name, "max must be >= min")


@dataclass
class SweepResult:
    """Rows are (beta, gamma, lambda, value, log_value), beta outermost and lambda innermost."""

    rows: np.ndarray
    metadata: dict = field(default_factory=dict)
    errors: list = field(default_factory=list)
    clamped: int = 0
    max_excursion: float = 0.0

    @property
    def betas(self) -> list[float]:
        return list(dict.fromkeys(self.rows[:, 0].tolist()))

    @property
    def gammas(self) -> np.ndarray:
        return np.unique(self.rows[:, 1])


def _log_values(cfg: SweepConfig, beta: float, gammas: np.ndarray, lambdas: np.ndarray):
    """Per-mode log factors on the (gamma, lambda) grid, shape (n_gamma, n_lambda, n_modes)."""
    g = gammas[:, None]
    lam = lambdas[None, :]
    eps0, d0 = xy_mode_arrays(g, lam, cfg.n_sites, cfg.grid)
    eps1, d1 = xy_mode_arrays(g + cfg.delta_gamma, lam + cfg.delta_lambda, cfg.n_sites, cfg.grid)
    c0, s0 = unit_vectors(eps0, d0)
    c1, s1 = unit_vectors(eps1, d1)
    lam0 = np.hypot(eps0, d0)
    lam1 = np.hypot(eps1, d1)
    if cfg.quantity is Quantity.FIDELITY:
        if math.isinf(beta):
            cos2h, _ = half_angle_weights(c0, s0, c1, s1)
            with np.errstate(divide="ignore"):
                return 0.5 * np.log(cos2h)
        return log_fidelity_kernel(beta * lam0, beta * lam1, c0, s0, c1, s1)
    cos2d, sin2d = angle_terms(c0, s0, c1, s1)
    phase = lam1 * cfg.echo_time
    if math.isinf(beta):
        s = sin2d * np.sin(phase) ** 2
        with np.errstate(divide="ignore"):
            return np.where(s == 0.0, 0.0, 0.5 * np.log(cos2d + sin2d * np.cos(phase) ** 2))
    return log_echo_kernel(beta * lam0, cos2d, sin2d, phase)


def run_sweep(cfg: SweepConfig, timestamp: str | None = None) -> SweepResult:
    """Evaluate the fidelity or echo total at every (beta, gamma, lambda) grid point.

    The second Hamiltonian is H(gamma + delta_gamma, lambda + delta_lambda).
    Non-finite totals are kept as NaN rows and listed in ``errors``.
    """
    cfg.validate()
    gammas = cfg.axis("gamma_range")
    lambdas = cfg.axis("lambda_range")
    blocks = []
    errors = []
    clamped = 0
    excursion = 0.0
    for beta in cfg.beta_list:
        beta = float(beta)
        log_f = _log_values(cfg, beta, gammas, lambdas)
        log_f, count, exc = clamp_log_factors(log_f)
        clamped += count
        excursion = max(excursion, exc)
        log_total = np.sum(log_f, axis=-1)
        value = np.exp(log_total)
        bad = ~np.isfinite(value) | np.isnan(log_total)
        for gi, li in zip(*np.nonzero(bad)):
            errors.append((beta, float(gammas[gi]), float(lambdas[li]), f"non-finite value {value[gi, li]}"))
            value[gi, li] = np.nan
        gg, ll = np.meshgrid(gammas, lambdas, indexing="ij")
        blocks.append(np.column_stack([np.full(gg.size, beta), gg.ravel(), ll.ravel(), value.ravel(), log_total.ravel()]))
    metadata = {
        "tool": f"thermofid {__version__}",
        "quantity": cfg.quantity.value,
        "n_sites": str(cfg.n_sites),
        "grid": cfg.grid.value,
        "gamma_range": ":".join(_fmt(x) for x in cfg.gamma_range),
        "lambda_range": ":".join(_fmt(x) for x in cfg.lambda_range),
        "delta_gamma": _fmt(cfg.delta_gamma),
        "delta_lambda": _fmt(cfg.delta_lambda),
        "beta": ",".join(_fmt(b) for b in cfg.beta_list),
    }
    if cfg.quantity is Quantity.ECHO:
        metadata["time"] = _fmt(cfg.echo_time)
    if timestamp is not None:
        metadata["timestamp"] = timestamp
    return SweepResult(np.vstack(blocks), metadata, errors, clamped, excursion)


def _fmt(x) -> str:
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    return format(float(x), ".17g")


def format_row(row) -> str:
    return ",".join(format(float(x), ".17g") for x in row)


def write_csv(result: SweepResult, path) -> None:
    """Write ``#`` metadata lines, the header, then one line per grid point."""
    lines = [f"# {k}={v}" for k, v in result.metadata.items()]
    if result.errors:
        lines.append(f"# errors={len(result.errors)}")
    lines.append(CSV_HEADER)
    lines.extend(format_row(r) for r in result.rows)
    try:
        Path(path).write_text("\n".join(lines) + "\n")
    except OSError as exc:
        raise OSError(f"cannot write CSV to {path}: {exc}") from exc


def read_csv(path) -> SweepResult:
    metadata = {}
    rows = []
    with open(path) as fh:
        for line in fh:
            line = line.rstrip("\n")
            if line.startswith("#"):
                key, _, value = line[1:].strip().partition("=")
                metadata[key] = value
            elif line == CSV_HEADER:
                continue
            elif line:
                rows.append([float(x) for x in line.split(",")])
    metadata.pop("errors", None)
    return SweepResult(np.array(rows, dtype=float).reshape(-1, 5), metadata)


_PLOT_PREAMBLE = '''\
import os

import matplotlib.pyplot as plt
import numpy as np

HERE = os.path.dirname(os.path.abspath(__file__))
with open(os.path.join(HERE, {csv!r})) as fh:
    lines = [line for line in fh if not line.startswith("#")]
data = np.genfromtxt(lines, delimiter=",", names=True)
BETAS = {betas!r}
'''

_LINE_BODY = '''
fig, ax = plt.subplots(figsize=(6, 4))
for beta in BETAS:
    sel = data["beta"] == beta
    ax.plot(data["lambda"][sel], data["value"][sel], label=f"beta={{beta:g}}")
ax.set_xlabel("lambda")
ax.set_ylabel({ylabel!r})
ax.set_title("gamma = {gamma}")
ax.legend()
fig.tight_layout()
fig.savefig(os.path.join(HERE, {png!r}), dpi=150)
'''

_HEATMAP_BODY = '''
N_GAMMA, N_LAMBDA = {n_gamma}, {n_lambda}
fig, axes = plt.subplots(1, len(BETAS), figsize=(4 * len(BETAS), 3.5), squeeze=False)
for ax, beta in zip(axes[0], BETAS):
    sel = data["beta"] == beta
    lam = data["lambda"][sel].reshape(N_GAMMA, N_LAMBDA)
    gam = data["gamma"][sel].reshape(N_GAMMA, N_LAMBDA)
    val = data["value"][sel].reshape(N_GAMMA, N_LAMBDA)
    mesh = ax.pcolormesh(lam, gam, val, shading="auto", vmin=0.0, vmax=1.0)
    ax.set_xlabel("lambda")
    ax.set_ylabel("gamma")
    ax.set_title(f"{ylabel} beta={{beta:g}}")
    fig.colorbar(mesh, ax=ax)
fig.tight_layout()
fig.savefig(os.path.join(HERE, {png!r}), dpi=150)
'''


def plot_script_text(result: SweepResult, csv_name: str, png_name: str) -> str:
    """Matplotlib script: one curve per beta for a single gamma, else one heatmap per beta."""
    betas = result.betas
    gammas = result.gammas
    ylabel = result.metadata.get("quantity", "value")
    text = _PLOT_PREAMBLE.format(csv=csv_name, betas=betas)
    if gammas.size == 1:
        text += _LINE_BODY.format(ylabel=ylabel, gamma=format(float(gammas[0]), "g"), png=png_name)
    else:
        n_lambda = int(np.sum((result.rows[:, 0] == betas[0]) & (result.rows[:, 1] == gammas[0])))
        text += _HEATMAP_BODY.format(n_gamma=gammas.size, n_lambda=n_lambda, ylabel=ylabel, png=png_name)
    return text


def emit_plot_script(result: SweepResult, path, csv_path) -> None:
    """Write a plotting script that reads ``csv_path`` relative to its own location."""
    path = Path(path)
    csv_rel = os.path.relpath(Path(csv_path).resolve(), path.resolve().parent)
    png = path.with_suffix(".png").name
    try:
        path.write_text(plot_script_text(result, csv_rel, png))
    except OSError as exc:
        raise OSError(f"cannot write plot script to {path}: {exc}") from exc


def dip_depth(result: SweepResult, beta: float, reference_lambda: float = 1.5) -> float:
    """value(lambda = reference) - min_lambda value along a single-gamma sweep at ``beta``."""
    sel = result.rows[result.rows[:, 0] == beta]
    ref = sel[np.argmin(np.abs(sel[:, 2] - reference_lambda)), 3]
    return float(ref - np.min(sel[:, 3]))


def argmin_lambda(result: SweepResult, beta: float) -> float:
    sel = result.rows[result.rows[:, 0] == beta]
    return float(sel[np.argmin(sel[:, 3]), 2])


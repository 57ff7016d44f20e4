"""Command-line entry point: ``thermofid {fidelity-sweep,echo-sweep,mode-dump,oracle-check}``."""

from __future__ import annotations

import argparse
import math
import sys
from datetime import datetime, timezone
from pathlib import Path

from . import checks
from .model import Grid, XYParams, xy_phases, xy_to_quasifree
from .sweep import ConfigError, Quantity, SweepConfig, emit_plot_script, run_sweep, write_csv

# Keys accepted in a config file (flag names without the leading dashes).
_FILE_KEYS = {
    "n-sites", "grid", "gamma", "lambda", "gamma-range", "lambda-range",
    "delta-gamma", "delta-lambda", "beta", "time", "out", "plot",
}


def parse_range(text: str) -> tuple[float, float, int]:
    parts = text.split(":")
    if len(parts) != 3:
        raise argparse.ArgumentTypeError(f"expected MIN:MAX:STEPS, got {text!r}")
    try:
        return float(parts[0]), float(parts[1]), int(parts[2])
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected MIN:MAX:STEPS, got {text!r}") from None


def parse_beta(text: str) -> float:
    if text.strip().lower() in ("inf", "infinite", "infinity"):
        return math.inf
    try:
        return float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"invalid beta {text!r}") from None


def read_config_file(path: str) -> dict:
    """Parse ``key = value`` lines; ``beta`` may repeat or hold a comma list."""
    values: dict = {}
    for lineno, raw in enumerate(Path(path).read_text().splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        key, sep, value = line.partition("=")
        key = key.strip().lstrip("-").replace("_", "-")
        value = value.strip()
        if not sep or key not in _FILE_KEYS:
            raise ConfigError(key or "config", f"{path}:{lineno}: cannot parse {raw!r}")
        if key == "beta":
            values.setdefault("beta", []).extend(parse_beta(v) for v in value.split(",") if v.strip())
        else:
            values[key] = value
    return values


def _sweep_parser(sub, name: str, help_text: str):
    p = sub.add_parser(name, help=help_text)
    p.add_argument("--config", help="key=value file; command-line flags take precedence")
    p.add_argument("--n-sites", type=int)
    p.add_argument("--grid", choices=[g.value for g in Grid])
    p.add_argument("--gamma", type=float, help="fixed gamma (1-D cross-section)")
    p.add_argument("--gamma-range", type=parse_range, metavar="MIN:MAX:STEPS")
    p.add_argument("--lambda", dest="lam", type=float, help="fixed lambda")
    p.add_argument("--lambda-range", type=parse_range, metavar="MIN:MAX:STEPS")
    p.add_argument("--delta-gamma", type=float)
    p.add_argument("--delta-lambda", type=float)
    p.add_argument("--beta", type=parse_beta, action="append", help="repeatable; 'inf' for the ground state")
    p.add_argument("--time", type=float, help="echo time")
    p.add_argument("--out", help="CSV output path (default: stdout)")
    p.add_argument("--plot", action="store_true", help="also write a matplotlib script next to the CSV")
    p.add_argument("--timestamp", action="store_true", help="record the UTC time in the CSV metadata")
    return p


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="thermofid", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)
    _sweep_parser(sub, "fidelity-sweep", "mixed-state fidelity over a (gamma, lambda) grid")
    _sweep_parser(sub, "echo-sweep", "thermal Loschmidt echo over a (gamma, lambda) grid")

    dump = sub.add_parser("mode-dump", help="print epsilon, delta, Lambda, theta per mode")
    dump.add_argument("--n-sites", type=int, required=True)
    dump.add_argument("--gamma", type=float, required=True)
    dump.add_argument("--lambda", dest="lam", type=float, required=True)
    dump.add_argument("--grid", choices=[g.value for g in Grid], default=Grid.INTEGER.value)

    oc = sub.add_parser("oracle-check", help="compare closed forms with the dense oracle on random draws")
    oc.add_argument("--seed", type=int, default=0)
    oc.add_argument("--draws", type=int, default=1000)
    return parser


def config_from_args(args, quantity: Quantity) -> SweepConfig:
    file_values = read_config_file(args.config) if args.config else {}

    def pick(flag_value, key, convert):
        if flag_value is not None:
            return flag_value
        if key in file_values:
            try:
                return convert(file_values[key])
            except (ValueError, argparse.ArgumentTypeError) as exc:
                raise ConfigError(key, str(exc)) from None
        return None

    defaults = SweepConfig()
    gamma_range = pick(args.gamma_range, "gamma-range", parse_range)
    gamma = pick(args.gamma, "gamma", float)
    if gamma is not None:
        gamma_range = (gamma, gamma, 1)
    lambda_range = pick(args.lambda_range, "lambda-range", parse_range)
    lam = pick(args.lam, "lambda", float)
    if lam is not None:
        lambda_range = (lam, lam, 1)
    betas = args.beta if args.beta else file_values.get("beta")
    plot = args.plot or file_values.get("plot", "").lower() in ("1", "true", "yes")
    grid = pick(args.grid, "grid", str)
    n_sites = pick(args.n_sites, "n-sites", int)
    dg = pick(args.delta_gamma, "delta-gamma", float)
    dl = pick(args.delta_lambda, "delta-lambda", float)
    try:
        grid = Grid(grid) if grid is not None else defaults.grid
    except ValueError:
        raise ConfigError("grid", f"unknown grid {grid!r}") from None
    cfg = SweepConfig(
        n_sites=n_sites if n_sites is not None else defaults.n_sites,
        grid=grid,
        gamma_range=gamma_range or defaults.gamma_range,
        lambda_range=lambda_range or defaults.lambda_range,
        delta_gamma=dg if dg is not None else defaults.delta_gamma,
        delta_lambda=dl if dl is not None else defaults.delta_lambda,
        beta_list=tuple(betas) if betas else defaults.beta_list,
        quantity=quantity,
        echo_time=pick(args.time, "time", float),
        output_path=pick(args.out, "out", str),
        emit_plot_script=plot,
    )
    cfg.validate()
    return cfg


def _run_sweep_command(args, parser, quantity: Quantity) -> int:
    try:
        cfg = config_from_args(args, quantity)
    except (ConfigError, OSError) as exc:
        parser.print_usage(sys.stderr)
        print(f"thermofid: error: {exc}", file=sys.stderr)
        return 2
    stamp = datetime.now(timezone.utc).isoformat(timespec="seconds") if args.timestamp else None
    result = run_sweep(cfg, timestamp=stamp)
    for beta, gamma, lam, msg in result.errors:
        print(f"warning: beta={beta} gamma={gamma} lambda={lam}: {msg}", file=sys.stderr)
    if cfg.output_path is None:
        if cfg.emit_plot_script:
            print("thermofid: error: --plot needs --out", file=sys.stderr)
            return 2
        from .sweep import CSV_HEADER, format_row

        for k, v in result.metadata.items():
            print(f"# {k}={v}")
        print(CSV_HEADER)
        for row in result.rows:
            print(format_row(row))
        return 0
    out = Path(cfg.output_path)
    write_csv(result, out)
    if cfg.emit_plot_script:
        emit_plot_script(result, out.with_name(out.stem + "_plot.py"), out)
    return 0


def _mode_dump(args) -> int:
    params = XYParams(args.gamma, args.lam, args.n_sites, Grid(args.grid))
    model = xy_to_quasifree(params)
    print(f"{'j':>4} {'phi':>16} {'epsilon':>16} {'delta':>16} {'Lambda':>16} {'theta':>16}")
    for j, (phi, mode) in enumerate(zip(xy_phases(params.n_sites, params.grid), model.modes), 1):
        print(f"{j:>4} {phi:16.12f} {mode.epsilon:16.12f} {mode.delta:16.12f} {mode.lambda_k:16.12f} {mode.theta_k:16.12f}")
    return 0


def _oracle_check(args) -> int:
    if args.draws < 1:
        print("thermofid: error: --draws must be >= 1", file=sys.stderr)
        return 2
    reports = checks.run_oracle_checks(args.seed, args.draws)
    for r in reports:
        print(r.line())
    return 0 if all(r.passed for r in reports) else 1


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    if args.command == "fidelity-sweep":
        return _run_sweep_command(args, parser, Quantity.FIDELITY)
    if args.command == "echo-sweep":
        return _run_sweep_command(args, parser, Quantity.ECHO)
    if args.command == "mode-dump":
        try:
            return _mode_dump(args)
        except ValueError as exc:
            print(f"thermofid: error: {exc}", file=sys.stderr)
            return 2
    return _oracle_check(args)


if __name__ == "__main__":
    sys.exit(main())

"""Batch command-line front end.

Subcommands:
    verify    run the identity-check registry, emit a JSON report
    tabulate  fundamental-solution table (n, y, g1, g2), optionally density
    transform spectral table (rho, density, fhat) of an input element
    greens    kernel coefficient table and Green solutions of an input
    limit     classical-limit error sweep over (q, t)

Shared flags: --q, --config <json>, --out <path>, --format csv|json.
The config file mirrors the run configuration; explicit flags win.
Exit codes: 0 pass, 1 check failure, 2 usage error, 3 I/O error.
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import dataclass, field

import numpy as np

from . import green as G
from . import spherical as S
from .context import Q_MAX, Q_MIN, QContext
from .discalg import (
    DiscElement,
    delta_fn,
    element_from_json_dict,
    element_to_json_dict,
)
from .errors import DomainError, QDiscError
from .verify import run_registry

EXIT_OK = 0
EXIT_CHECK_FAILED = 1
EXIT_USAGE = 2
EXIT_IO = 3


@dataclass
class RunConfig:
    command: str
    q: float = 0.5
    series_tol: float = 1e-14
    grid_horizon: int = 64
    trunc_terms: int = 200
    out: str | None = None
    format: str = "csv"
    nmax: int = 40
    node_count: int = 1024
    checks: list[str] = field(default_factory=list)
    q_list: list[float] = field(default_factory=lambda: [0.9, 0.99, 0.999])
    t_list: list[float] = field(default_factory=lambda: [0.25, 0.5, 0.75])
    input: dict | str | None = None
    with_density: bool = False
    coef_terms: int = 30

    def validate(self) -> None:
        if not (Q_MIN <= self.q <= Q_MAX):
            raise DomainError(f"q must lie in [{Q_MIN}, {Q_MAX}]")
        if self.series_tol <= 0:
            raise DomainError("series_tol must be positive")
        if self.format not in ("csv", "json"):
            raise DomainError("format must be csv or json")
        if self.grid_horizon < 1 or self.trunc_terms < 1:
            raise DomainError("horizons must be positive")

    def context(self) -> QContext:
        return QContext(
            self.q,
            series_tol=self.series_tol,
            grid_horizon=self.grid_horizon,
            trunc_terms=self.trunc_terms,
        )


def _build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="qdisc", description=__doc__.split("\n")[0])
    sub = p.add_subparsers(dest="command", required=True)
    for name in ("verify", "tabulate", "transform", "greens", "limit"):
        sp = sub.add_parser(name)
        sp.add_argument("--q", type=float, default=None)
        sp.add_argument("--config", type=str, default=None)
        sp.add_argument("--out", type=str, default=None)
        sp.add_argument("--format", choices=("csv", "json"), default=None)
        if name == "verify":
            sp.add_argument(
                "--checks",
                type=str,
                default=None,
                help="comma-separated name substrings to select checks",
            )
        if name == "tabulate":
            sp.add_argument("--nmax", type=int, default=None)
            sp.add_argument("--with-density", action="store_true")
        if name in ("transform", "greens"):
            sp.add_argument("--input", type=str, default=None,
                            help="path to a serialized element (default: centre delta)")
        if name == "transform":
            sp.add_argument("--nodes", type=int, default=None)
    return p


def _load_config(args) -> RunConfig:
    cfg = RunConfig(command=args.command)
    if args.config:
        try:
            with open(args.config) as fh:
                doc = json.load(fh)
        except OSError as exc:
            raise IOError(f"cannot read config: {exc}") from exc
        except json.JSONDecodeError as exc:
            raise DomainError(f"config is not valid JSON: {exc}") from exc
        for key, val in doc.items():
            if not hasattr(cfg, key):
                raise DomainError(f"unknown config key {key!r}")
            setattr(cfg, key, val)
    if args.q is not None:
        cfg.q = args.q
    if args.out is not None:
        cfg.out = args.out
    if args.format is not None:
        cfg.format = args.format
    if getattr(args, "checks", None):
        cfg.checks = [s.strip() for s in args.checks.split(",") if s.strip()]
    if getattr(args, "nmax", None) is not None:
        cfg.nmax = args.nmax
    if getattr(args, "with_density", False):
        cfg.with_density = True
    if getattr(args, "input", None) is not None:
        cfg.input = args.input
    if getattr(args, "nodes", None) is not None:
        cfg.node_count = args.nodes
    cfg.validate()
    return cfg


def _emit_table(rows: list[dict], header: list[str], cfg: RunConfig) -> None:
    if cfg.format == "json":
        text = json.dumps(rows, indent=1)
    else:
        lines = [",".join(header)]
        for row in rows:
            lines.append(",".join(_fmt(row[h]) for h in header))
        text = "\n".join(lines) + "\n"
    _write(text, cfg.out)


def _fmt(v) -> str:
    if isinstance(v, float):
        return repr(v)
    return str(v)


def _write(text: str, out: str | None) -> None:
    if out is None:
        sys.stdout.write(text)
        return
    try:
        with open(out, "w") as fh:
            fh.write(text)
    except OSError as exc:
        raise IOError(f"cannot write output: {exc}") from exc


def _input_element(cfg: RunConfig, ctx: QContext) -> DiscElement:
    if cfg.input is None:
        return delta_fn(0, ctx)
    if isinstance(cfg.input, dict):
        return element_from_json_dict(cfg.input, ctx)
    try:
        with open(cfg.input) as fh:
            return element_from_json_dict(json.load(fh), ctx)
    except OSError as exc:
        raise IOError(f"cannot read input element: {exc}") from exc


def cmd_verify(cfg: RunConfig) -> int:
    ctx = cfg.context()
    results = run_registry(ctx, cfg.checks or None)
    report = {
        "q": cfg.q,
        "passed": all(r.passed for r in results),
        "checks": [r.as_dict() for r in results],
    }
    _write(json.dumps(report, indent=1) + "\n", cfg.out)
    return EXIT_OK if report["passed"] else EXIT_CHECK_FAILED


def cmd_tabulate(cfg: RunConfig) -> int:
    ctx = cfg.context()
    npts = min(cfg.nmax + 1, ctx.npoints)
    g1 = G.g_radial_grid(1, ctx, npts)
    g2 = G.g_radial_grid(2, ctx, npts)
    yg = ctx.ygrid(npts)
    rows = [
        {
            "n": n,
            "y": float(yg[n]),
            "g1": float(g1.values[n].real),
            "g2": float(g2.values[n].real),
        }
        for n in range(npts)
    ]
    _emit_table(rows, ["n", "y", "g1", "g2"], cfg)
    if cfg.with_density:
        period = ctx.rho_period()
        rhos = period * np.arange(cfg.node_count) / cfg.node_count
        dens = [
            {"rho": float(r), "density": S.sigma_density(float(r), ctx)}
            for r in rhos
        ]
        out2 = (cfg.out + ".density") if cfg.out else None
        sub = RunConfig(command="tabulate", q=cfg.q, out=out2, format=cfg.format)
        _emit_table(dens, ["rho", "density"], sub)
    return EXIT_OK


def cmd_transform(cfg: RunConfig) -> int:
    ctx = cfg.context()
    el = _input_element(cfg, ctx)
    radial = el.sector(0)
    F = S.transform_forward(radial, ctx, cfg.node_count)
    rows = []
    for rho, val in zip(F.nodes, F.values):
        rows.append(
            {
                "rho": float(rho),
                "density": S.sigma_density(float(rho), ctx),
                "fhat_re": float(val.real),
                "fhat_im": float(val.imag),
            }
        )
    _emit_table(rows, ["rho", "density", "fhat_re", "fhat_im"], cfg)
    return EXIT_OK


def cmd_greens(cfg: RunConfig) -> int:
    ctx = cfg.context()
    el = _input_element(cfg, ctx)
    rows = []
    for m in range(1, cfg.coef_terms + 1):
        rows.append(
            {
                "m": m,
                "coef_order1": G.coef_order1(m, ctx.q),
                "coef_order2_direct": G.coef_order2(m, ctx.q),
                "coef_order2_log": (1.0 - ctx.q2) / ctx.h * G.coef_order1(m, ctx.q),
            }
        )
    _emit_table(
        rows, ["m", "coef_order1", "coef_order2_direct", "coef_order2_log"], cfg
    )
    sol1 = G.green_solve(el, 1, ctx)
    sol2 = G.green_solve(el, 2, ctx)
    if cfg.out:
        for order, sol in ((1, sol1), (2, sol2)):
            path = f"{cfg.out}.solution{order}.json"
            with open(path, "w") as fh:
                json.dump(element_to_json_dict(sol), fh, indent=1)
    return EXIT_OK


def cmd_limit(cfg: RunConfig) -> int:
    if not cfg.q_list:
        raise DomainError("limit sweep needs a nonempty q_list")
    rows_out = []
    rows = G.classical_limit_report(cfg.t_list, cfg.q_list, None)
    for r in rows:
        rows_out.append(
            {
                "q": r.q,
                "t": r.t,
                "err_order1": r.err_order1,
                "err_order2": r.err_order2,
                "reflection_residual": r.reflection_residual,
            }
        )
    _emit_table(
        rows_out, ["q", "t", "err_order1", "err_order2", "reflection_residual"], cfg
    )
    return EXIT_OK


_COMMANDS = {
    "verify": cmd_verify,
    "tabulate": cmd_tabulate,
    "transform": cmd_transform,
    "greens": cmd_greens,
    "limit": cmd_limit,
}


def main(argv: list[str] | None = None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code not in (0, None) else EXIT_OK
    try:
        cfg = _load_config(args)
    except (DomainError, ValueError) as exc:
        sys.stderr.write(f"qdisc: usage error: {exc}\n")
        return EXIT_USAGE
    except IOError as exc:
        sys.stderr.write(f"qdisc: {exc}\n")
        return EXIT_IO
    try:
        return _COMMANDS[cfg.command](cfg)
    except IOError as exc:
        sys.stderr.write(f"qdisc: {exc}\n")
        return EXIT_IO
    except QDiscError as exc:
        sys.stderr.write(f"qdisc: usage error: {exc}\n")
        return EXIT_USAGE


def console_entry() -> None:
    sys.exit(main())


if __name__ == "__main__":
    console_entry()

"""Command-line interface: ``cuspnp {validate,spectrum,resonance,field}``.

Each run writes a CSV (header plus a ``#`` metadata line carrying the
config hash) and a JSON summary next to it.  Exit codes: 0 success,
1 failed checks, 2 configuration errors.
"""

from __future__ import annotations

import argparse
import csv
import dataclasses
import hashlib
import io
import json
import sys
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import __version__
from .frequency import ConfigurationError, build_grid
from .geometry import GeometryError
from .resonance import (DEFAULT_DELTAS, DielectricParams, DipoleSource, SourceLocationError,
                        blowup_limit, bounded_case_check, q_density, resonance_grid,
                        sweep_norms, total_field)
from .spectral import k_cut, negative_channel
from .utils import check_delta_seq, check_domain, check_points, check_positive
from .validation import SuiteSettings, run_suite

EXIT_OK, EXIT_FAIL, EXIT_CONFIG = 0, 1, 2


@dataclass
class RunConfig:
    domain: str = "crescent"
    R: float = 1.0
    r: float = 0.5
    k_min: float = 1e-6
    k_max: float | None = None
    n_per_decade: int = 4
    order: int = 16
    source: dict | None = None
    eps_c: float = -1 / 3
    delta: float = 1e-2
    deltas: list | None = None
    seed: int = 0
    n_oracle: int = 3
    fast: bool = False
    corrupt_symbol: bool = False
    points: str | None = None
    out: str | None = None

    def domain_spec(self):
        return check_domain(self.domain, R=self.R, r=self.r)

    def grid_kw(self) -> dict:
        kw = {"k_min": check_positive(self.k_min, "k_min"), "n_per_decade": int(self.n_per_decade),
              "order": int(self.order)}
        if self.k_max is not None:
            kw["k_max"] = check_positive(self.k_max, "k_max")
        return kw

    def dipole(self) -> DipoleSource:
        if not self.source:
            raise ConfigurationError("this command needs a source: {'location': [x, y], 'moment': [ax, ay]}")
        try:
            return DipoleSource(self.source["location"], self.source.get("moment", (1.0, 0.0)))
        except (KeyError, TypeError, ValueError) as exc:
            raise ConfigurationError(f"bad source spec: {exc}") from None

    def sweep(self) -> np.ndarray:
        if self.deltas is not None:
            return check_delta_seq(self.deltas)
        return DEFAULT_DELTAS

    def canonical(self) -> str:
        d = dataclasses.asdict(self)
        d.pop("out")
        return json.dumps(d, sort_keys=True, separators=(",", ":"))

    def hash(self) -> str:
        return hashlib.sha256(self.canonical().encode()).hexdigest()[:16]


def fmt(v) -> str:
    """17 significant digits, so values round-trip exactly."""
    if isinstance(v, (bool, np.bool_)):
        return "true" if v else "false"
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, (float, np.floating)):
        return format(float(v), ".17g")
    return str(v)


def _jsonable(v):
    if isinstance(v, dict):
        return {k: _jsonable(x) for k, x in v.items()}
    if isinstance(v, (list, tuple, np.ndarray)):
        return [_jsonable(x) for x in v]
    if isinstance(v, (bool, np.bool_)):
        return bool(v)
    if isinstance(v, (int, np.integer)):
        return int(v)
    if isinstance(v, (float, np.floating)):
        f = float(v)
        return float(format(f, ".17g")) if np.isfinite(f) else str(f)
    return v


def write_outputs(cfg: RunConfig, command: str, header, rows, summary: dict, default_name: str):
    out = Path(cfg.out or default_name)
    buf = io.StringIO(newline="")
    buf.write(f"# cuspnp {__version__} command={command} config_hash={cfg.hash()}\n")
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow([fmt(v) for v in row])
    out.parent.mkdir(parents=True, exist_ok=True)
    out.write_text(buf.getvalue())
    summary = {"command": command, "config_hash": cfg.hash(), "config": json.loads(cfg.canonical()),
               "csv": out.name, **summary}
    out.with_suffix(".json").write_text(json.dumps(_jsonable(summary), indent=2, sort_keys=True) + "\n")
    return out


def cmd_validate(cfg: RunConfig) -> int:
    domain = cfg.domain_spec()
    kw = cfg.grid_kw()
    grid = build_grid(kw.pop("k_max", 200.0 / domain.gap), **kw)
    rep = run_suite(domain, SuiteSettings(seed=cfg.seed, n_oracle=cfg.n_oracle, grid=grid,
                                          corrupt_symbol=cfg.corrupt_symbol,
                                          include_slow=not cfg.fast))
    rows = [(c.name, c.error, c.tolerance, c.passed, c.relaxed) for c in rep.checks]
    summary = {"passed": rep.passed, "n_checks": len(rows),
               "failed": [c.name for c in rep.checks if not c.passed],
               "relaxed": any(c.relaxed for c in rep.checks)}
    out = write_outputs(cfg, "validate", ["check", "error", "tolerance", "passed", "relaxed"],
                        rows, summary, "validate.csv")
    for c in rep.checks:
        print(f"{'PASS' if c.passed else 'FAIL'} {c.name}: {c.error:.3e} (tol {c.tolerance:.1e})")
    print(f"report: {out}")
    return EXIT_OK if rep.passed else EXIT_FAIL


def cmd_spectrum(cfg: RunConfig) -> int:
    domain, src = cfg.domain_spec(), cfg.dipole()
    grid = resonance_grid(None, domain, **cfg.grid_kw())
    m = q_density(src, domain, grid=grid)
    neg = negative_channel(domain)
    rows = []
    ends = q_density(src, domain, [-0.5, 0.5], grid)
    rows.append((-0.5, ends[0], neg, 0.0))
    for t, Q in zip(m.t_nodes, m.density.real):
        rows.append((t, Q, neg if t < 0 else 3 - neg, float(k_cut(t, domain))))
    rows.append((0.5, ends[1], 3 - neg, 0.0))
    summary = {"mass": m.mass().real, "Q_left": ends[0], "Q_right": ends[1],
               "min_Q": float(m.density.real.min()), "n_nodes": len(rows)}
    out = write_outputs(cfg, "spectrum", ["t", "Q", "channel", "kappa"], rows, summary, "spectrum.csv")
    print(f"mass {fmt(summary['mass'])}; endpoints {fmt(ends[0])}, {fmt(ends[1])}; wrote {out}")
    return EXIT_OK


def cmd_resonance(cfg: RunConfig) -> int:
    domain, src = cfg.domain_spec(), cfg.dipole()
    deltas = cfg.sweep()
    params = DielectricParams(cfg.eps_c, float(deltas[0]))
    lam0 = params.lam0
    summary = {"lambda0": lam0}
    if lam0 == 0:
        res = bounded_case_check(src, domain, deltas)
        norms = res.scaled / deltas**2
        summary.update(regime="bounded", max_delta2_norm_sq=res.max_scaled,
                       majorant=res.majorants.tolist(), within_bound=res.within_bound)
    elif -0.5 <= lam0 < 0.5:
        res = blowup_limit(cfg.eps_c, src, domain, deltas)
        norms = res.norms_sq
        summary.update(regime="blowup", extrapolated=res.estimate, predicted=res.predicted,
                       relative_gap=res.relative_gap, predicted_poisson=res.predicted_poisson,
                       relative_gap_poisson=res.relative_gap_poisson)
    else:
        norms = sweep_norms(cfg.eps_c, src, domain, deltas)
        summary.update(regime="no_resonance", no_resonance=True,
                       relative_variation=float((norms.max() - norms.min()) / norms.min()))
    rows = [(d, n, d * n) for d, n in zip(deltas, norms)]
    out = write_outputs(cfg, "resonance", ["delta", "norm_sq", "delta_times_norm_sq"], rows,
                        summary, "resonance.csv")
    print(f"regime {summary['regime']}; wrote {out}")
    return EXIT_OK


def _read_points(path) -> np.ndarray:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ConfigurationError(f"cannot read points file: {exc}") from None
    rows = [r for r in csv.reader(io.StringIO(text)) if r and not r[0].startswith("#")]
    try:
        float(rows[0][0])
    except (ValueError, IndexError):
        rows = rows[1:]
    try:
        return check_points([[float(a), float(b)] for a, b, *_ in rows])
    except ValueError as exc:
        raise ConfigurationError(f"bad points file: {exc}") from None


def cmd_field(cfg: RunConfig) -> int:
    domain, src = cfg.domain_spec(), cfg.dipole()
    if not cfg.points:
        raise ConfigurationError("field needs --points")
    pts = _read_points(cfg.points)
    params = DielectricParams(cfg.eps_c, check_positive(cfg.delta, "delta"))
    u, on = total_field(params, src, domain, pts, resonance_grid(params, domain, **cfg.grid_kw()))
    rows = [(x, y, v, b) for (x, y), v, b in zip(pts, u, on)]
    out = write_outputs(cfg, "field", ["x", "y", "u", "on_boundary"], rows,
                        {"n_points": len(rows), "n_on_boundary": int(on.sum())}, "field.csv")
    print(f"wrote {out}")
    return EXIT_OK


COMMANDS = {"validate": cmd_validate, "spectrum": cmd_spectrum,
            "resonance": cmd_resonance, "field": cmd_field}

_FLAG_FIELDS = {"domain": "domain", "R": "R", "r": "r", "eps_c": "eps_c", "delta": "delta",
                "kmax": "k_max", "seed": "seed", "out": "out", "points": "points"}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="cuspnp", description="NP-operator spectral tools for cusp domains.")
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        p = sub.add_parser(name)
        p.add_argument("--config", help="JSON config; flags override its fields")
        p.add_argument("--out", help="CSV output path (JSON summary goes alongside)")
        p.add_argument("--domain", choices=["crescent", "touching"])
        p.add_argument("--R", type=float)
        p.add_argument("--r", type=float)
        p.add_argument("--eps-c", dest="eps_c", type=float)
        p.add_argument("--delta", type=float)
        p.add_argument("--kmax", type=float)
        p.add_argument("--seed", type=int)
        if name == "field":
            p.add_argument("--points", help="CSV of x,y plane points")
        if name == "validate":
            p.add_argument("--fast", action="store_true", help="skip the oracle checks")
            p.add_argument("--corrupt-symbol", action="store_true", help=argparse.SUPPRESS)
    return parser


def load_config(args) -> RunConfig:
    data = {}
    if args.config:
        try:
            data = json.loads(Path(args.config).read_text())
        except (OSError, json.JSONDecodeError) as exc:
            raise ConfigurationError(f"cannot load config: {exc}") from None
        if not isinstance(data, dict):
            raise ConfigurationError("config must be a JSON object")
        known = {f.name for f in dataclasses.fields(RunConfig)}
        unknown = sorted(set(data) - known)
        if unknown:
            raise ConfigurationError(f"unknown config fields: {unknown}")
    for flag, fld in _FLAG_FIELDS.items():
        v = getattr(args, flag, None)
        if v is not None:
            data[fld] = v
    for flag in ("fast", "corrupt_symbol"):
        if getattr(args, flag, False):
            data[flag] = True
    cfg = RunConfig(**data)
    cfg.domain_spec()
    cfg.grid_kw()
    check_positive(cfg.delta, "delta")
    if cfg.eps_c == 1:
        raise ConfigurationError("eps_c must differ from 1")
    return cfg


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = load_config(args)
        return COMMANDS[args.command](cfg)
    except (ConfigurationError, GeometryError, SourceLocationError, TypeError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())

"""Command-line front end.

Subcommands ``feasibility``, ``bounds``, ``verify``, ``sweep`` and
``spectrum`` read one JSON config and write JSON/CSV artifacts into the
output directory.  Exit status: 0 all verifications pass, 1 a verification
failed, 2 configuration error, 3 infeasible or hypothesis unmet, 4 other.
"""

from __future__ import annotations

import argparse
import json
import sys
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path

import numpy as np

from . import bounds as B
from .errors import BDPError, ConfigError
from .lognorm import coefficient_profile, linear_bounds
from .model import PRESETS, BDPSpec, from_tables, preset
from .oracle import (
    cesaro_average,
    frozen_spectrum,
    integrate_kolmogorov,
    point_mass,
    stationary_distribution,
)
from .rates import RateFunction
from .serialize import SCHEMA_VERSION, write_csv, write_json
from .verify import (
    check_decay,
    check_means_and_tails,
    check_null,
    check_two_sided,
    format_table,
    standard_pair,
    trajectory,
)
from .weights import (
    ErgodicFeasibility,
    NullFeasibility,
    PresetSetup,
    explicit_weights,
    find_ergodic_weights,
    find_null_weights,
    preset_setup,
)

ANALYSES = ("feasibility", "bounds", "verify", "spectrum", "cesaro")
REQUIRES = {"bounds": "feasibility", "verify": "bounds"}
STRATEGIES = ("auto", "paper-preset", "explicit")


# -- configuration --------------------------------------------------------
def parse_rate(data, field_name: str) -> RateFunction:
    """Rate from a number, a shorthand dict or a full serialized form."""
    try:
        if isinstance(data, (int, float)):
            return RateFunction.constant(float(data))
        if not isinstance(data, dict):
            raise ConfigError(f"{field_name}: expected a number or an object")
        if "constant" in data:
            return RateFunction.constant(float(data["constant"]))
        if "sinusoid" in data:
            s = data["sinusoid"]
            return RateFunction.sinusoid(float(s["mean"]), float(s["amplitude"]), float(s.get("period", 1.0)))
        return RateFunction.from_dict(data)
    except ConfigError:
        raise
    except (BDPError, KeyError, TypeError, ValueError) as exc:
        raise ConfigError(f"{field_name}: {exc}") from exc


def build_spec(cfg: dict, trunc: int | None = None) -> BDPSpec:
    model = cfg.get("model")
    if not isinstance(model, dict):
        raise ConfigError("model: missing or not an object")
    a = parse_rate(cfg.get("a", 1.0), "a")
    b = parse_rate(cfg.get("b", 1.0), "b")
    try:
        if "preset" in model:
            if model["preset"] not in PRESETS:
                raise ConfigError(f"model.preset: unknown preset {model['preset']!r}")
            return preset(
                model["preset"], a, b, S=model.get("S"),
                trunc=int(trunc or model.get("trunc", 200)),
                lam=float(model.get("lam", 1.0)), mu=float(model.get("mu", 1.0)),
            )
        if "birth" in model and "death" in model:
            return from_tables(model["birth"], model["death"], a, b)
    except ConfigError:
        raise
    except BDPError as exc:
        raise ConfigError(f"model: {exc}") from exc
    raise ConfigError("model: give either 'preset' or both 'birth' and 'death' tables")


def validate(cfg: dict) -> dict:
    if not isinstance(cfg, dict):
        raise ConfigError("config: top level must be an object")
    version = cfg.get("schema_version", SCHEMA_VERSION)
    if version != SCHEMA_VERSION:
        raise ConfigError(f"schema_version: expected {SCHEMA_VERSION}, got {version!r}")
    analyses = cfg.get("analyses", ["feasibility", "bounds", "verify"])
    bad = [x for x in analyses if x not in ANALYSES]
    if bad:
        raise ConfigError(f"analyses: unknown entries {bad}")
    for step, need in REQUIRES.items():
        if step in analyses and need not in analyses:
            raise ConfigError(f"analyses: '{step}' requires '{need}'")
    weights = cfg.get("weights", {"strategy": "paper-preset"})
    if isinstance(weights, str):
        weights = {"strategy": weights}
    if weights.get("strategy") not in STRATEGIES:
        raise ConfigError(f"weights.strategy: expected one of {STRATEGIES}")
    regime = cfg.get("regime")
    if regime not in (None, "ergodic", "null"):
        raise ConfigError("regime: expected 'ergodic' or 'null'")
    horizon = cfg.get("horizon", 10.0)
    if not isinstance(horizon, (int, float)) or horizon <= 0:
        raise ConfigError("horizon: must be a positive number")
    points = cfg.get("grid_points", 201)
    if not isinstance(points, int) or points < 2:
        raise ConfigError("grid_points: must be an integer >= 2")
    return {**cfg, "analyses": list(analyses), "weights": weights}


def load_config(path) -> dict:
    text = Path(path).read_text()
    try:
        cfg = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path}: line {exc.lineno}, column {exc.colno}: {exc.msg}") from exc
    return validate(cfg)


# -- pipeline -------------------------------------------------------------
def _default_regime(spec: BDPSpec) -> str:
    if spec.finite:
        return "ergodic"
    lam, mu = spec.lam_limit, spec.mu_limit
    return "ergodic" if mu * spec.b.long_run_average() >= lam * spec.a.long_run_average() else "null"


def setup_weights(spec: BDPSpec, cfg: dict) -> PresetSetup:
    wcfg = cfg["weights"]
    strategy = wcfg["strategy"]
    if strategy == "paper-preset":
        if spec.name == "custom":
            raise ConfigError("weights: 'paper-preset' needs a preset model")
        return preset_setup(spec, epsilon=wcfg.get("epsilon"), case=wcfg.get("case"))
    regime = cfg.get("regime") or _default_regime(spec)
    choice = wcfg.get("choice", "geometric")
    if strategy == "auto":
        finder = find_ergodic_weights if regime == "ergodic" else find_null_weights
        feas, w = finder(spec, wcfg.get("Delta"), wcfg.get("c"), choice=choice)
        return PresetSetup(regime, w, feas.drift, feas)
    # explicit weights: the drift is the componentwise lower bound of the coefficients
    kind = wcfg.get("kind", "triangular" if regime == "ergodic" else "diagonal")
    if "delta" not in wcfg:
        raise ConfigError("weights.delta: required for the explicit strategy")
    try:
        w = explicit_weights(kind, wcfg["delta"], wcfg.get("tail"), spec.finite)
    except BDPError as exc:
        raise ConfigError(f"weights: {exc}") from exc
    lower, _ = linear_bounds(spec, w, "alpha" if kind == "triangular" else "alpha0")
    return PresetSetup(regime, w, lower, None, ("explicit weights: drift from coefficient bounds",))


def feasibility_report(spec: BDPSpec, setup: PresetSetup) -> dict:
    out = {
        "schema_version": SCHEMA_VERSION,
        "model": spec.to_dict(),
        "regime": setup.regime,
        "weights": setup.weights.to_dict(),
        "drift": setup.drift.to_dict(),
        "drift_mean": setup.drift.mean(spec.a, spec.b),
        "notes": list(setup.notes),
    }
    if setup.feasibility is not None:
        out["feasibility"] = setup.feasibility.to_dict()
    return out


def build_certificates(spec: BDPSpec, setup: PresetSetup, cfg: dict) -> list[B.BoundCertificate]:
    feas, w, rate = setup.feasibility, setup.weights, setup.drift
    certs: list[B.BoundCertificate] = []
    if setup.regime == "ergodic":
        ef = feas if isinstance(feas, ErgodicFeasibility) else None
        certs += B.weak_ergodic_certificate(spec, ef, w, rate=rate)
        if spec.finite:
            certs += B.two_sided_certificate(spec, w, ef, rate=rate)
        if spec.a.is_constant() and spec.b.is_constant():
            certs.append(B.ergodic_certificate(spec, ef, w, stationary_distribution(spec), rate=rate))
        if not spec.finite:
            eps = cfg.get("epsilon", 0.5 * rate.mean(spec.a, spec.b))
            for j in cfg.get("tail_states", [0, 3, 10]):
                certs.append(B.tail_certificate(spec, ef, w, eps, int(j), rate=rate))
            certs += B.mean_bounds(spec, ef, w, eps=eps, rate=rate)
        elif spec.name == "mmss":
            certs += B.mean_bounds(spec)
    else:
        nf = feas if isinstance(feas, NullFeasibility) else None
        states = [int(k) for k in cfg.get("null_states", [0, 3, 10])]
        certs += B.null_ergodic_certificate(spec, nf, w, states=states, rate=rate)
        certs += B.mean_bounds(spec, nf, w, regime="null")
    return certs


def run_verification(spec, setup, certs, t_grid, tol, out_dir: Path | None) -> list:
    w = setup.weights
    cache: dict = {}
    p1, p2 = standard_pair(spec)
    reports = []
    decay = [c for c in certs if c.shape == "decay" and c.init_norm is not None]
    two_sided = [c for c in decay if c.statement_id.startswith(("two-sided", "ordered"))]
    for c in decay:
        if c in two_sided:
            continue
        if "pi" in c.params:
            reports.append(check_decay(c, spec, w, p1, None, t_grid, tol, cache))
        else:
            reports.append(check_decay(c, spec, w, p1, p2, t_grid, tol, cache))
    if two_sided:
        reports += check_two_sided(two_sided, spec, w, p1, p2, t_grid, tol, cache)
    null = [c for c in certs if c.norm in ("weighted_sum", "state", "cumulative")]
    if null:
        reports += check_null(null, spec, w, p1, t_grid, tol, cache)
    rest = [c for c in certs if c.norm in ("cdf", "mean")]
    if rest:
        reports += check_means_and_tails(rest, spec, w, t_grid, tol, cache)
    if out_dir is not None:
        for name, p0 in (("p1", p1), ("p2", p2)):
            trajectory(spec, p0, t_grid, tol, cache).to_csv(out_dir / f"trajectory_{name}.csv")
        for r in reports:
            write_csv(out_dir / f"verify_{r.certificate}.csv", ["t", "lhs", "rhs", "slack"], r.rows())
    return reports


def _time_grid(cfg: dict) -> np.ndarray:
    return np.linspace(0.0, float(cfg.get("horizon", 10.0)), int(cfg.get("grid_points", 201)))


def cmd_pipeline(cfg: dict, out: Path, tol: float, trunc: int | None, upto: str, quiet: bool) -> int:
    spec = build_spec(cfg, trunc)
    setup = setup_weights(spec, cfg)
    out.mkdir(parents=True, exist_ok=True)
    feas = feasibility_report(spec, setup)
    write_json(out / "feasibility.json", feas)
    if not quiet:
        print(f"regime {setup.regime}: drift mean {feas['drift_mean']:.10g}")
    if upto == "feasibility":
        return 0

    t_grid = _time_grid(cfg)
    certs = build_certificates(spec, setup, cfg)
    write_json(out / "certificates.json",
               {"schema_version": SCHEMA_VERSION, "certificates": [c.to_dict() for c in certs]})
    for c in certs:
        write_csv(out / f"envelope_{c.statement_id}.csv", ["t", "envelope_value"],
                  zip(t_grid.tolist(), B.envelope(c, spec, t_grid).tolist()))
    if not quiet:
        print(f"{len(certs)} certificates written")
    if upto == "bounds":
        return 0

    reports = run_verification(spec, setup, certs, t_grid, tol, out)
    extras = {}
    if "spectrum" in cfg["analyses"]:
        extras["spectrum"] = spectrum_summary(spec, setup, float(cfg.get("time", 0.0)))
    if "cesaro" in cfg["analyses"]:
        traj = integrate_kolmogorov(spec, point_mass(spec, 0), t_grid, tol)
        half = float(t_grid[-1]) / 2
        diff = float(np.abs(cesaro_average(traj, t_grid[-1]) - cesaro_average(traj, half)).sum())
        extras["cesaro"] = {"t_half": half, "t_end": float(t_grid[-1]), "l1_difference": diff}
    ok = all(r.passed for r in reports)
    write_json(out / "report.json", {
        "schema_version": SCHEMA_VERSION,
        "passed": ok,
        "drift_mean": feas["drift_mean"],
        "feasibility": feas.get("feasibility"),
        "reports": [r.summary() for r in reports],
        **extras,
    })
    if not quiet:
        print(format_table(reports))
    return 0 if ok else 1


def spectrum_summary(spec: BDPSpec, setup: PresetSetup, t: float) -> dict:
    ev = frozen_spectrum(spec, t)
    out = {"time": t, "eigenvalues": ev.tolist(), "spectral_gap": float(-ev.max())}
    if setup.weights.kind == "triangular":
        out["inf_alpha"] = coefficient_profile(spec, setup.weights, t, "alpha").inf
        out["sup_zeta"] = coefficient_profile(spec, setup.weights, t, "zeta").sup
    else:
        out["inf_alpha0"] = coefficient_profile(spec, setup.weights, t, "alpha0").inf
    return out


def cmd_spectrum(cfg: dict, out: Path, trunc: int | None, quiet: bool) -> int:
    spec = build_spec(cfg, trunc)
    setup = setup_weights(spec, cfg)
    out.mkdir(parents=True, exist_ok=True)
    t = float(cfg.get("time", 0.0))
    summary = spectrum_summary(spec, setup, t)
    write_json(out / "spectrum.json", {"schema_version": SCHEMA_VERSION, **summary})
    write_csv(out / "spectrum.csv", ["index", "eigenvalue"], enumerate(summary["eigenvalues"]))
    kind = "alpha" if setup.weights.kind == "triangular" else "alpha0"
    coefficient_profile(spec, setup.weights, t, kind).to_csv(out / f"profile_{kind}.csv")
    if not quiet:
        print(f"spectral gap at t={t:g}: {summary['spectral_gap']:.10g}")
    return 0


def _sweep_spec(spec: BDPSpec, cfg: dict, parameter: str, value: float) -> BDPSpec:
    if parameter != "rho":
        return spec
    if spec.name not in ("mm1", "mms"):
        raise ConfigError("sweep over rho needs the mm1 or mms preset")
    S = spec.params.get("S") or 1
    mu = spec.params.get("mu", 1.0)
    lam = value * S * mu * spec.b.long_run_average() / spec.a.long_run_average()
    return preset(spec.name, spec.a, spec.b, S=spec.params.get("S"), trunc=spec.trunc, lam=lam, mu=mu)


def cmd_sweep(cfg: dict, out: Path, trunc: int | None, quiet: bool) -> int:
    spec = build_spec(cfg, trunc)
    sweep = cfg.get("sweep")
    if not isinstance(sweep, dict) or sweep.get("parameter") not in ("rho", "epsilon"):
        raise ConfigError("sweep: need {'parameter': 'rho'|'epsilon', 'values': [...]}")
    values = sweep.get("values")
    if not isinstance(values, list) or not values:
        raise ConfigError("sweep.values: need a non-empty list")
    parameter = sweep["parameter"]
    with ThreadPoolExecutor() as pool:
        rows = list(pool.map(lambda v: _sweep_row(spec, cfg, parameter, float(v)), values))
    cols = ["parameter", "value", "regime", "Delta", "c", "drift_mean", "auto_Delta", "auto_c",
            "auto_drift_mean", "note"]
    out.mkdir(parents=True, exist_ok=True)
    write_csv(out / "sweep.csv", cols, ([r.get(c, "") for c in cols] for r in rows))
    write_json(out / "sweep.json", {"schema_version": SCHEMA_VERSION, "rows": rows})
    if not quiet:
        for r in rows:
            print(f"{parameter}={r['value']:<8g} {r.get('regime', ''):<8} drift {r.get('drift_mean', float('nan')):.6g}")
    return 0


def _sweep_row(spec: BDPSpec, cfg: dict, parameter: str, v: float) -> dict:
    """One grid point: preset weights and the automatic search."""
    s = _sweep_spec(spec, cfg, parameter, v)
    row = {"parameter": parameter, "value": v}
    try:
        setup = preset_setup(s, epsilon=v if parameter == "epsilon" else None)
        row.update(regime=setup.regime, drift_mean=setup.drift.mean(s.a, s.b))
        if setup.feasibility is not None:
            row.update(Delta=setup.feasibility.Delta, c=setup.feasibility.c)
    except BDPError as exc:
        row.update(regime="none", note=str(exc))
    try:
        finder = find_ergodic_weights if _default_regime(s) == "ergodic" else find_null_weights
        feas, _ = finder(s)
        row.update(auto_Delta=feas.Delta, auto_c=feas.c, auto_drift_mean=feas.mean_drift)
    except BDPError as exc:
        row.setdefault("note", str(exc))
    return row


# -- entry point ----------------------------------------------------------
def make_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="bdpbounds", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)
    for name, text in (
        ("feasibility", "check hypotheses and construct weights"),
        ("bounds", "emit certificates and envelope tables"),
        ("verify", "check certificates against the numerical oracle"),
        ("sweep", "drift-rate table over a parameter grid"),
        ("spectrum", "eigenvalues of the frozen reduced matrix"),
    ):
        p = sub.add_parser(name, help=text)
        p.add_argument("--config", required=True, help="JSON run configuration")
        p.add_argument("--out", default="out", help="output directory (default: out)")
        p.add_argument("--tol", type=float, default=None, help="ODE tolerance (default 1e-9)")
        p.add_argument("--trunc", type=int, default=None, help="truncation level for infinite chains")
        p.add_argument("--quiet", action="store_true", help="suppress console output")
    return parser


def main(argv=None) -> int:
    args = make_parser().parse_args(argv)
    try:
        cfg = load_config(args.config)
        tol = args.tol if args.tol is not None else float(cfg.get("tol", 1e-9))
        out = Path(args.out)
        if args.command in ("feasibility", "bounds", "verify"):
            return cmd_pipeline(cfg, out, tol, args.trunc, args.command, args.quiet)
        if args.command == "spectrum":
            return cmd_spectrum(cfg, out, args.trunc, args.quiet)
        return cmd_sweep(cfg, out, args.trunc, args.quiet)
    except BDPError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.exit_code
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2 if isinstance(exc, FileNotFoundError) else 4
    except Exception as exc:  # pragma: no cover - last-resort mapping
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 4


if __name__ == "__main__":
    sys.exit(main())

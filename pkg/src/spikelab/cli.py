"""Command-line front end.

Every command reads `key = value` config files (later files win), applies
--set overrides, writes a resolved `manifest.txt` that reproduces the run,
and emits deterministic CSV artifacts into --out.

Exit codes: 0 success, 1 configuration error, 2 solver failure (with the
diagnostics mirrored to error.txt in the output directory).
"""

from __future__ import annotations

import argparse
import csv
import sys
from pathlib import Path

from . import continuation as ct
from . import nlep, outer, sim, smalleig
from .errors import SpikeLabError
from .model import ModelParams


class ConfigError(Exception):
    pass


# ---------------------------------------------------------------------------
# config plumbing

def _to_bool(s: str) -> bool:
    sl = s.strip().lower()
    if sl in ("1", "true", "yes", "on"):
        return True
    if sl in ("0", "false", "no", "off"):
        return False
    raise ConfigError(f"expected a boolean, got {s!r}")


MODEL_SCHEMA = {
    "a": float, "b": float, "c": float, "delta1": float, "Dv": float,
    "theta": float, "tau": float, "l": float, "delta2": float,
}

SIM_SCHEMA = {
    "n": int, "t_end": float, "dt": float, "half_domain": _to_bool,
    "ramp": str, "ramp_rate": float,
    "initial": str, "center": float, "ic_mode": str, "amplitude": float,
    "seed": int, "V0": float,
    "output_stride": int, "snapshots": int, "snapshot_max_nodes": int,
}

COMMAND_SCHEMAS = {
    "equilibrium": {**MODEL_SCHEMA},
    "nucleation": {**MODEL_SCHEMA},
    "nlep-theta": {**MODEL_SCHEMA, "asymptotic": _to_bool, "V0": float,
                   "op_n": int, "op_Ly": float},
    "nlep-tau": {**MODEL_SCHEMA, "op_n": int, "op_Ly": float},
    "smalleig": {**MODEL_SCHEMA, "V0": float},
    "simulate": {**MODEL_SCHEMA, **SIM_SCHEMA},
    "continue": {**MODEL_SCHEMA, "Dv_start": float, "Dv_end": float,
                 "ds": float, "n": int, "max_points": int},
    "sweep": {},   # validated against the inner command's schema
}


def parse_config_file(path: str) -> dict[str, str]:
    p = Path(path)
    if not p.is_file():
        raise ConfigError(f"config file not found: {path}")
    out: dict[str, str] = {}
    for lineno, raw in enumerate(p.read_text().splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"{path}:{lineno}: expected 'key = value', got {raw!r}")
        key, val = (s.strip() for s in line.split("=", 1))
        if not key:
            raise ConfigError(f"{path}:{lineno}: empty key")
        out[key] = val
    return out


def resolve_settings(command: str, configs: list[str], sets: list[str],
                     schema: dict | None = None,
                     flags: dict[str, str] | None = None) -> dict:
    schema = schema if schema is not None else COMMAND_SCHEMAS[command]
    raw: dict[str, str] = {}
    for cfg in configs:
        raw.update(parse_config_file(cfg))
    for item in sets:
        if "=" not in item:
            raise ConfigError(f"--set expects key=value, got {item!r}")
        key, val = (s.strip() for s in item.split("=", 1))
        raw[key] = val
    for key, val in (flags or {}).items():
        if val is not None:
            raw[key] = val
    out: dict = {}
    for key, val in raw.items():
        if key not in schema:
            raise ConfigError(f"unknown key {key!r} for command {command!r} "
                              f"(known: {', '.join(sorted(schema))})")
        try:
            out[key] = schema[key](val)
        except ConfigError:
            raise
        except (TypeError, ValueError) as exc:
            raise ConfigError(f"bad value for {key!r}: {val!r} ({exc})") from exc
    return out


def model_from(settings: dict) -> ModelParams:
    kwargs = {k: v for k, v in settings.items() if k in MODEL_SCHEMA}
    try:
        return ModelParams(**kwargs)
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc


def write_manifest(outdir: Path, command: str, settings: dict):
    lines = [f"# spikelab {command}"]
    for key in sorted(settings):
        val = settings[key]
        if isinstance(val, bool):
            val = "true" if val else "false"
        elif isinstance(val, float):
            val = f"{val:.17g}"
        lines.append(f"{key} = {val}")
    (outdir / "manifest.txt").write_text("\n".join(lines) + "\n")


def write_summary(outdir: Path, rows: list[tuple]):
    with open(outdir / "summary.csv", "w", newline="") as fh:
        wr = csv.writer(fh)
        wr.writerow(["quantity", "value", "tolerance", "source"])
        for q, v, tol, src in rows:
            vs = f"{v:.10g}" if isinstance(v, float) else str(v)
            wr.writerow([q, vs, tol, src])


# ---------------------------------------------------------------------------
# command implementations

def _write_curve_csv(path: Path, fn, pole: float, lo: float = 0.0,
                     hi: float = 3.0, n: int = 241, margin: float = 0.05):
    """Sample a spectral function on [lo, hi], skipping a window at its pole."""
    with open(path, "w", newline="") as fh:
        wr = csv.writer(fh)
        wr.writerow(["lam", "re", "im"])
        for i in range(n):
            lam = lo + (hi - lo) * i / (n - 1)
            if abs(lam - pole) < margin:
                continue
            val = fn(lam)
            wr.writerow([f"{lam:.17g}", f"{val.real:.17g}", f"{val.imag:.17g}"])


def cmd_equilibrium(settings: dict, outdir: Path) -> list[tuple]:
    p = model_from(settings)
    sol = outer.solve_V0_mu(p)
    from .profile import gamma_of
    g = gamma_of(p.a, p.c, p.delta1, sol.V0)
    return [
        ("V0", sol.V0, "", "matched flux/length system"),
        ("mu", sol.mu, "", "far-field activator value"),
        ("u0p", sol.u0p, "", "outer boundary value at the spike"),
        ("gamma", g, "", "core deformation parameter"),
        ("chi_mu", sol.chi_of_mu, "", "half-length integral at mu"),
        ("residual_flux", sol.residuals[0], "", "final Newton residual"),
        ("residual_length", sol.residuals[1], "", "final Newton residual"),
    ]


def cmd_nucleation(settings: dict, outdir: Path) -> list[tuple]:
    p = model_from(settings)
    res = outer.nucleation_threshold(p)
    rows = [("regime", res.regime.value, "", "bc vs a comparison")]
    if res.regime is outer.Regime.NUCLEATING:
        rows += [
            ("D_nuc", res.D_nuc, "", "saddle-node of the outer problem"),
            ("chi_max", res.chi_max, "", "chi at mu = 2a"),
            ("V0_at_fold", res.V0_at_fold, "", "amplitude at the fold"),
        ]
    return rows


def cmd_nlep_theta(settings: dict, outdir: Path) -> list[tuple]:
    p = model_from(settings)
    op = nlep.LineOperator(n=settings.get("op_n", 4001),
                           Ly=settings.get("op_Ly", 20.0))
    res = nlep.hopf_theta(p, V0=settings.get("V0"), op=op,
                          asymptotic=settings.get("asymptotic", False))
    th_hat = res.threshold / p.b if not settings.get("asymptotic", False) \
        else res.threshold
    _write_curve_csv(outdir / "f_of_lambda.csv",
                     lambda lam: nlep.f_lambda(lam, op), pole=1.25)
    return [
        ("theta_h", res.threshold, "", "amplitude Hopf threshold"),
        ("theta_hat_h", th_hat, "", "threshold scaled by 1/b"),
        ("omega_h", res.omega, "", "Hopf frequency"),
        ("residual", res.residual, "", "root residual"),
    ]


def cmd_nlep_tau(settings: dict, outdir: Path) -> list[tuple]:
    p = model_from(settings)
    op = nlep.LineOperator(n=settings.get("op_n", 4001),
                           Ly=settings.get("op_Ly", 20.0))
    res = nlep.hopf_tau_large(p, op=op)
    lam0_0 = nlep.lambda0_root(0.0, p.c)
    lam0_inf = nlep.lambda0_root(1e9, p.c)
    g_pole = nlep.lambda0_root(p.tau, p.c) if p.tau > 0 else lam0_0
    _write_curve_csv(outdir / "g_of_lambda.csv",
                     lambda lam: nlep.g_lambda(lam, p.c, p.tau, op),
                     pole=g_pole)
    return [
        ("tau_lh", res.threshold, "", "tau Hopf threshold at theta = 0"),
        ("omega_h", res.omega, "", "Hopf frequency"),
        ("lambda0_tau0", lam0_0, "", "dominant real eigenvalue, tau = 0"),
        ("lambda0_tauinf", lam0_inf, "", "dominant real eigenvalue, tau -> inf"),
        ("residual", res.residual, "", "root residual"),
    ]


def cmd_smalleig(settings: dict, outdir: Path) -> list[tuple]:
    p = model_from(settings)
    tau = p.tau if p.tau > 0 else 1.0
    spec = smalleig.small_lambda_roots(tau, p)
    rows = [
        ("tau_h", spec.tau_h, "", "drift Hopf threshold 7c/6"),
        ("k", spec.k, "", "geometric restoring factor"),
        ("re_lambda", spec.lambda_pair[0].real, "", "slow eigenvalue pair"),
        ("im_lambda", abs(spec.lambda_pair[0].imag), "", "slow eigenvalue pair"),
        ("re_asym", spec.re_asym, "", "asymptotic growth rate"),
        ("im_asym", spec.im_asym, "", "asymptotic frequency"),
    ]
    V0 = settings.get("V0")
    if V0 is None:
        V0 = outer.smalla_roots(p)[2][0]
    eta = smalleig.eta_profile(p, V0)
    rows += [
        ("eta_jump", eta.jump, "", "inhibitor-response jump at the spike"),
        ("eta_x_mean", eta.eta_x_mean, "", "averaged response slope"),
    ]
    return rows


def cmd_simulate(settings: dict, outdir: Path) -> list[tuple]:
    p = model_from(settings)
    ramp_kind = settings.get("ramp", "none")
    cfg = sim.SimConfig(
        params=p,
        n=settings.get("n", 2001),
        t_end=settings.get("t_end", 10.0),
        dt=settings.get("dt", 1e-3),
        half_domain=settings.get("half_domain", False),
        ramp=sim.RampSchedule(kind=ramp_kind, rate=settings.get("ramp_rate", 0.0)),
        initial=sim.InitialCondition(
            kind=settings.get("initial", "spike"),
            center=settings.get("center", 0.0),
            mode=settings.get("ic_mode", "auto"),
            amplitude=settings.get("amplitude", 1e-3),
            seed=settings.get("seed", 0),
            V0=settings.get("V0"),
        ),
        output_stride=settings.get("output_stride", 50),
        snapshot_times=settings.get("snapshots", 0),
        snapshot_max_nodes=settings.get("snapshot_max_nodes", 401),
    )
    result = sim.simulate(cfg)
    sim.write_snapshot_csv(outdir / "snapshots.csv", result,
                           max_nodes=cfg.snapshot_max_nodes)
    sim.write_track_csv(outdir / "track.csv", result)
    sim.write_event_csv(outdir / "events.csv", result)
    final_spikes = result.track.spikes[-1]
    rows = [
        ("t_final", result.t, "", "simulated time"),
        ("spike_count", len(final_spikes), "", "final spike count"),
        ("n_events", len(result.track.events), "", "detected events"),
    ]
    for sid, (pos, amp) in enumerate(final_spikes):
        rows.append((f"spike{sid}_position", pos, "", "final tracked position"))
        rows.append((f"spike{sid}_amplitude", amp, "", "final tracked amplitude"))
    return rows


def cmd_continue(settings: dict, outdir: Path) -> list[tuple]:
    p = model_from(settings)
    Dv_start = settings.get("Dv_start", p.Dv)
    Dv_end = settings.get("Dv_end")
    if Dv_end is None:
        raise ConfigError("continue needs Dv_end")
    points = ct.continue_branch(
        p, Dv_start, Dv_end,
        n=settings.get("n", 4001),
        ds=settings.get("ds", 0.02),
        max_points=settings.get("max_points", 400),
    )
    ct.write_branch_csv(outdir / "branch.csv", points)
    rows = [("n_points", len(points), "", "branch samples")]
    fd = ct.fold_Dv(points)
    if fd is not None:
        rows.append(("fold_Dv", fd, "", "quadratic fit at the tangent reversal"))
    rows.append(("Dv_last", points[-1].Dv, "", "end of traced branch"))
    rows.append(("mu_last", points[-1].mu, "", "end of traced branch"))
    return rows


COMMANDS = {
    "equilibrium": cmd_equilibrium,
    "nucleation": cmd_nucleation,
    "nlep-theta": cmd_nlep_theta,
    "nlep-tau": cmd_nlep_tau,
    "smalleig": cmd_smalleig,
    "simulate": cmd_simulate,
    "continue": cmd_continue,
}


def run_sweep(args) -> int:
    inner = args.sweep_command
    if inner not in COMMANDS:
        raise ConfigError(f"sweep cannot wrap {inner!r}")
    schema = COMMAND_SCHEMAS[inner]
    if args.key not in schema:
        raise ConfigError(f"sweep key {args.key!r} unknown for {inner!r}")
    values = [v.strip() for v in args.values.split(",") if v.strip()]
    if not values:
        raise ConfigError("sweep needs at least one value")
    base = resolve_settings(inner, args.config, args.set, schema=schema)
    outdir = Path(args.out)
    outdir.mkdir(parents=True, exist_ok=True)
    all_rows: list[tuple] = []
    for i, val in enumerate(values):
        sub = dict(base)
        sub[args.key] = schema[args.key](val)
        subdir = outdir / f"run_{i:03d}"
        subdir.mkdir(parents=True, exist_ok=True)
        write_manifest(subdir, inner, sub)
        rows = COMMANDS[inner](sub, subdir)
        write_summary(subdir, rows)
        for q, v, tol, src in rows:
            all_rows.append((f"{args.key}={val}:{q}", v, tol, src))
    write_summary(outdir, all_rows)
    write_manifest(outdir, f"sweep {inner} {args.key}", base)
    return 0


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="spikelab",
        description="Numerical laboratory for one-spike dynamics of a "
                    "three-component activator-inhibitor system.",
    )
    sub = ap.add_subparsers(dest="command", required=True)

    def common(sp, schema=None):
        sp.add_argument("--config", action="append", default=[],
                        help="key = value config file (repeatable, later wins)")
        sp.add_argument("--set", action="append", default=[], metavar="KEY=VAL",
                        help="override a single setting (repeatable)")
        sp.add_argument("--out", default=".", help="output directory")
        for key in (schema or {}):
            sp.add_argument(f"--{key}", dest=f"opt_{key}", default=None,
                            metavar="V", help=f"set {key}")

    for name in COMMANDS:
        common(sub.add_parser(name), COMMAND_SCHEMAS[name])
    sw = sub.add_parser("sweep")
    common(sw)
    sw.add_argument("sweep_command", choices=sorted(COMMANDS))
    sw.add_argument("key", help="setting to vary")
    sw.add_argument("values", help="comma-separated values")
    return ap


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.command == "sweep":
            return run_sweep(args)
        flags = {k[4:]: v for k, v in vars(args).items()
                 if k.startswith("opt_")}
        settings = resolve_settings(args.command, args.config, args.set,
                                    flags=flags)
        outdir = Path(args.out)
        outdir.mkdir(parents=True, exist_ok=True)
        write_manifest(outdir, args.command, settings)
        rows = COMMANDS[args.command](settings, outdir)
        write_summary(outdir, rows)
        return 0
    except ConfigError as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return 1
    except (SpikeLabError, ValueError) as exc:
        msg = f"solver failure in {args.command}: {type(exc).__name__}: {exc}"
        print(msg, file=sys.stderr)
        try:
            Path(args.out).mkdir(parents=True, exist_ok=True)
            (Path(args.out) / "error.txt").write_text(msg + "\n")
        except OSError:
            pass
        return 2


if __name__ == "__main__":
    sys.exit(main())

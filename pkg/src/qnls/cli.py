"""Experiment orchestration: subcommand dispatch, seeded reproducibility,
manifest and artifact persistence.

Exit codes: 0 success, 2 assertion failure inside a run, 3 budget guard,
4 configuration error.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from . import __version__, dynamics, flows, nf, resonance, sturm, svgplot
from .errors import BudgetError, ConfigError
from .poly import ModeSet, build_p6, build_z2, poly_to_json
from .spectral import freqs_conv

EXIT_OK, EXIT_ASSERT, EXIT_BUDGET, EXIT_CONFIG = 0, 2, 3, 4


def _write_json(path: Path, obj):
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w") as fh:
        json.dump(obj, fh, indent=2, sort_keys=True)
        fh.write("\n")


def _manifest(out: Path, args: argparse.Namespace, outputs: list[str]):
    resolved = {k: v for k, v in vars(args).items() if k not in ("func", "config")}
    _write_json(out / "manifest.json", {
        "artifact": "qnls", "version": __version__,
        "config": resolved, "outputs": outputs,
    })


def _frequencies(args, M: int):
    ms = ModeSet.symmetric(M)
    if getattr(args, "potential", None):
        doc = json.loads(Path(args.potential).read_text())
        V = np.asarray(doc["V"] if isinstance(doc, dict) else doc, dtype=float)
        if V.shape != (ms.size,):
            raise ConfigError(f"potential file must carry {ms.size} real coefficients")
    elif getattr(args, "free", False):
        V = np.zeros(ms.size)
    else:
        V = resonance.sample_conv_potential(args.s_star, M, args.seed)
    return ms, freqs_conv(V, ms)


# ----------------------------------------------------------------- commands


def cmd_plan(args, out: Path) -> int:
    plan = dynamics.plan_parameters(args.eps, args.nu, args.alpha, s=args.s,
                                    beta_s=args.beta_s, rho=args.rho,
                                    kappa=args.kappa, c=args.c, k=args.k)
    _write_json(out / "plan.json", plan.to_dict())
    _manifest(out, args, ["plan.json"])
    print(f"plan: r={plan.r} gamma={plan.gamma:.3e} M={plan.M} "
          f"T_eps={plan.T_eps:.4g} feasible={plan.feasible}")
    return EXIT_OK if plan.feasible else EXIT_ASSERT


def cmd_certify(args, out: Path) -> int:
    window = ModeSet.symmetric(args.hmax)
    if args.free:
        omega = {k: float(k * k) for k in window.modes}
    else:
        V = resonance.sample_conv_potential(args.s_star, args.hmax, args.seed)
        omega = freqs_conv(V, window)
    bounds = resonance.NRBounds(args.qmax, args.m1max, args.hmax, args.amax)
    if args.kind == "strong":
        cert = resonance.certify_strong(omega, bounds, alpha=args.alpha)
    else:
        cert = resonance.certify_weak(omega, bounds, s_star=args.s_star)
    _write_json(out / "cert.json", cert.to_dict())
    _manifest(out, args, ["cert.json"])
    name = "rho" if args.kind == "strong" else "gamma"
    print(f"certify[{args.kind}]: {name}_fit={cert.fitted:.6g} "
          f"violations={len(cert.violations)} checked={cert.n_checked}")
    for v in cert.violations[:10]:
        print(f"  exact zero: m={v['m']} h={v['h']} a={v['a']}")
    return EXIT_ASSERT if cert.violations else EXIT_OK


def cmd_sturm(args, out: Path) -> int:
    W = resonance.sample_mult_potential(args.s_star, 4 * args.nmax, args.seed)
    basis = sturm.dirichlet_eig(W, n_max=args.nmax)
    c_est = sturm.verify_ev_asymptotics(basis)
    decay = sturm.verify_ef_decay(basis)
    _write_json(out / "basis.json", {
        "lambdas": basis.lambdas.tolist(),
        "sine_coefficients": basis.eigvecs.tolist(),
        "W_cosine": basis.W_hat.tolist(),
        "avg_W": basis.avg_W,
        "ev_asymptotics_constant": c_est,
        "ef_decay": decay,
        "gram_defect": basis.gram_defect(),
    })
    _manifest(out, args, ["basis.json"])
    print(f"sturm: n_max={args.nmax} C_est={c_est:.6g} "
          f"ef_decay_C={decay['C_fit']:.6g} gram={basis.gram_defect():.2e}")
    return EXIT_OK


def cmd_normal_form(args, out: Path) -> int:
    ms, omega = _frequencies(args, args.modes)
    z2 = build_z2(ms, omega)
    p6 = build_p6(ms, args.sigma, args.c6)
    gamma = args.gamma
    if gamma is None:
        gamma = nf.suggest_gamma(ms, omega, k=args.k, r=args.order)
    cfg = nf.NormalFormConfig(r=args.order, gamma=gamma, J_max=args.j_max,
                              seed=args.seed, norm_multistart=args.multistart)
    result = nf.birkhoff(z2, p6, omega, cfg)
    doc = {
        "eps_r": result.eps_r,
        "gamma": gamma,
        "norm_p": result.norm_p.to_dict() | {"witness": None},
        "tail_report": [vars(e) for e in result.tail_report],
        "truncated_degrees": result.truncated_degrees,
        "generators": [json.loads(poly_to_json(g)) for g in result.generators],
        "resonant": {str(2 * j): json.loads(poly_to_json(Q))
                     for j, Q in result.resonant.items()},
    }
    _write_json(out / "normal_form.json", doc)
    _manifest(out, args, ["normal_form.json"])
    print(f"normal-form: M={args.modes} r={args.order} gamma={gamma:.3e} "
          f"eps_r={result.eps_r:.4g} tail_ok={result.tail_ok} "
          f"truncated={result.truncated_degrees}")
    return EXIT_OK if result.tail_ok else EXIT_ASSERT


def cmd_simulate(args, out: Path) -> int:
    ms, omega = _frequencies(args, args.modes)
    z2 = build_z2(ms, omega)
    p6 = build_p6(ms, args.sigma, args.c6)
    rng = np.random.default_rng(args.seed)
    u0 = rng.standard_normal(ms.size) + 1j * rng.standard_normal(ms.size)
    u0 *= args.eps / np.linalg.norm(u0)
    traj = dynamics.integrate(z2, p6, u0, args.T, args.dt)
    traj.to_csv(out / "trajectory.csv")
    _manifest(out, args, ["trajectory.csv"])
    print(f"simulate: T={args.T} dt={args.dt} samples={traj.times.size} "
          f"norm_drift={traj.norm_drift():.2e} energy_drift={traj.energy_drift():.2e}")
    return EXIT_OK


def cmd_drift(args, out: Path) -> int:
    ms, omega = _frequencies(args, args.modes)
    z2 = build_z2(ms, omega)
    p6 = build_p6(ms, args.sigma, args.c6)
    gamma = args.gamma
    if gamma is None:
        gamma = nf.suggest_gamma(ms, omega, k=args.k, r=args.order)
    report = nf.check_krgamma(ms, omega, args.k, args.order, gamma)
    if not report.certified:
        print(f"drift: (k={args.k}, r={args.order}, gamma={gamma:.3e}) "
              f"is resonant; {len(report.violations)} offending keys")
        return EXIT_ASSERT
    cfg = nf.NormalFormConfig(r=args.order, gamma=gamma, J_max=args.j_max, seed=args.seed)
    result = nf.birkhoff(z2, p6, omega, cfg)
    eps_list = [float(x) for x in args.eps_list.split(",")]
    drift = dynamics.action_drift(result, z2, p6, args.k, eps_list, args.T,
                                  args.dt, seed=args.seed)
    doc = {
        "gamma": gamma, "eps_r": result.eps_r, "exponent": drift.exponent,
        "transformed_no_worse": drift.transformed_no_worse,
        "rows": [vars(r) for r in drift.rows],
    }
    _write_json(out / "drift.json", doc)
    outputs = ["drift.json"]
    if args.svg:
        eps = [r.eps for r in drift.rows]
        series = {"raw": (eps, [r.drift_raw for r in drift.rows])}
        if all(r.drift_transformed is not None for r in drift.rows):
            series["transformed"] = (eps, [r.drift_transformed for r in drift.rows])
        svgplot.line_plot(out / "drift.svg", series, title="action drift",
                          xlabel="log10 eps", ylabel="log10 drift", loglog=True)
        outputs.append("drift.svg")
    _manifest(out, args, outputs)
    print(f"drift: exponent={drift.exponent:.3f} "
          f"transformed_no_worse={drift.transformed_no_worse}")
    return EXIT_OK


def cmd_strichartz(args, out: Path) -> int:
    m_list = [int(x) for x in args.m_list.split(",")]
    scan = dynamics.strichartz_scan(m_list, sigma=args.sigma, c6=args.c6,
                                    multistart=args.multistart, seed=args.seed)
    doc = {
        "rows": [vars(r) for r in scan.rows],
        "exponents": scan.exponents,
        "monotone": scan.monotone(),
    }
    _write_json(out / "strichartz.json", doc)
    outputs = ["strichartz.json"]
    if args.svg:
        svgplot.line_plot(out / "strichartz.svg",
                          {"S(M)": ([r.M for r in scan.rows], [r.lower for r in scan.rows])},
                          title="Strichartz constant scan", xlabel="log10 M",
                          ylabel="log10 S", loglog=True)
        outputs.append("strichartz.svg")
    _manifest(out, args, outputs)
    print(f"strichartz: S={[round(r.lower, 6) for r in scan.rows]} "
          f"exponents={[round(e, 4) for e in scan.exponents]}")
    return EXIT_OK


# --------------------------------------------------------------------- main


def _add_common(p: argparse.ArgumentParser):
    p.add_argument("--config", type=str, default=None, help="JSON file with defaults")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--threads", type=int, default=1,
                   help="parallelism hint (runs are deterministic regardless)")
    p.add_argument("--out", type=str, default="runs/latest")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="qnls", description=__doc__)
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("plan", help="resolve experiment parameters from the scaling recipe")
    p.add_argument("--eps", type=float, required=True)
    p.add_argument("--nu", type=float, required=True)
    p.add_argument("--alpha", type=float, required=True)
    p.add_argument("--s", type=float, default=0.45)
    p.add_argument("--beta-s", dest="beta_s", type=float, default=1.0)
    p.add_argument("--rho", type=float, default=1.0)
    p.add_argument("--kappa", type=float, default=1.0)
    p.add_argument("--c", type=float, default=1.0)
    p.add_argument("--k", type=int, default=1)
    p.set_defaults(func=cmd_plan)

    p = sub.add_parser("certify", help="fit a non-resonance constant over a finite window")
    p.add_argument("--kind", choices=["weak", "strong"], default="strong")
    p.add_argument("--alpha", type=float, default=0.4)
    p.add_argument("--qmax", type=int, default=3)
    p.add_argument("--m1max", type=int, default=4)
    p.add_argument("--hmax", type=int, default=20)
    p.add_argument("--amax", type=int, default=0, help="0 = automatic cap")
    p.add_argument("--s-star", dest="s_star", type=float, default=1.0)
    p.add_argument("--free", action="store_true", help="use the unperturbed frequencies k^2")
    p.set_defaults(func=cmd_certify)

    p = sub.add_parser("sturm", help="Dirichlet eigenbasis of a sampled even potential")
    p.add_argument("--s-star", dest="s_star", type=float, default=2.0)
    p.add_argument("--nmax", type=int, default=50)
    p.set_defaults(func=cmd_sturm)

    p = sub.add_parser("normal-form", help="Birkhoff normal form of the truncated system")
    p.add_argument("--modes", type=int, required=True)
    p.add_argument("--order", type=int, required=True)
    p.add_argument("--gamma", type=float, default=None)
    p.add_argument("--j-max", dest="j_max", type=int, default=None)
    p.add_argument("--multistart", type=int, default=16,
                   help="ascent restarts per norm enclosure")
    p.add_argument("--k", type=int, default=1)
    p.add_argument("--potential", type=str, default=None)
    p.add_argument("--s-star", dest="s_star", type=float, default=1.0)
    p.add_argument("--sigma", type=int, default=1, choices=[1, -1])
    p.add_argument("--c6", type=float, default=1.0)
    p.set_defaults(func=cmd_normal_form)

    p = sub.add_parser("simulate", help="integrate the truncated flow, stream CSV")
    p.add_argument("--modes", type=int, required=True)
    p.add_argument("--eps", type=float, default=0.1)
    p.add_argument("--T", type=float, default=100.0)
    p.add_argument("--dt", type=float, default=0.01)
    p.add_argument("--potential", type=str, default=None)
    p.add_argument("--s-star", dest="s_star", type=float, default=1.0)
    p.add_argument("--sigma", type=int, default=1, choices=[1, -1])
    p.add_argument("--c6", type=float, default=1.0)
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("drift", help="action-drift scaling experiment")
    p.add_argument("--modes", type=int, default=5)
    p.add_argument("--k", type=int, default=1)
    p.add_argument("--order", type=int, default=3)
    p.add_argument("--gamma", type=float, default=None)
    p.add_argument("--j-max", dest="j_max", type=int, default=None)
    p.add_argument("--eps-list", dest="eps_list", type=str, default="0.1,0.07,0.05")
    p.add_argument("--T", type=float, default=1000.0)
    p.add_argument("--dt", type=float, default=0.002)
    p.add_argument("--potential", type=str, default=None)
    p.add_argument("--s-star", dest="s_star", type=float, default=1.0)
    p.add_argument("--sigma", type=int, default=1, choices=[1, -1])
    p.add_argument("--c6", type=float, default=1.0)
    p.add_argument("--svg", action="store_true")
    p.set_defaults(func=cmd_drift)

    p = sub.add_parser("strichartz", help="scan the sextic level-sup norm over windows")
    p.add_argument("--m-list", dest="m_list", type=str, default="1,2,4,8,16")
    p.add_argument("--multistart", type=int, default=48)
    p.add_argument("--sigma", type=int, default=1, choices=[1, -1])
    p.add_argument("--c6", type=float, default=1.0)
    p.add_argument("--svg", action="store_true")
    p.set_defaults(func=cmd_strichartz)

    for sp in sub.choices.values():
        _add_common(sp)
    return ap


def _apply_config(ap: argparse.ArgumentParser, argv: list[str]) -> argparse.Namespace:
    try:
        args = ap.parse_args(argv)
    except SystemExit as exc:
        if exc.code == 0:       # --help
            raise
        raise ConfigError("invalid command line (see usage above)") from exc
    if args.config:
        try:
            overrides = json.loads(Path(args.config).read_text())
        except (OSError, json.JSONDecodeError) as exc:
            raise ConfigError(f"cannot read config file: {exc}") from exc
        if not isinstance(overrides, dict):
            raise ConfigError("config file must hold a JSON object")
        known = vars(args)
        explicit = {a for a in argv if a.startswith("--")}
        for key, val in overrides.items():
            dest = key.replace("-", "_")
            if dest not in known:
                raise ConfigError(f"unknown config field: {key}")
            if f"--{key}" not in explicit and f"--{dest.replace('_','-')}" not in explicit:
                setattr(args, dest, val)
    return args


def main(argv=None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    ap = build_parser()
    try:
        args = _apply_config(ap, argv)
        out = Path(args.out)
        out.mkdir(parents=True, exist_ok=True)
        return args.func(args, out)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except BudgetError as exc:
        print(f"budget exceeded: {exc}", file=sys.stderr)
        return EXIT_BUDGET
    except ValueError as exc:
        print(f"invalid parameters: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (AssertionError, ArithmeticError, flows.FlowConvergenceError) as exc:
        print(f"run failed: {exc}", file=sys.stderr)
        return EXIT_ASSERT


if __name__ == "__main__":
    sys.exit(main())

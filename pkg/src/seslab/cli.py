"""Command-line front end.

Exit status: 0 on success, 1 when the model rejects the input or a numerical
step fails, 2 for usage and configuration errors.
"""

from __future__ import annotations

import argparse
import sys

import numpy as np

from . import games, learning, network, optimal_control as oc, stability
from .equilibria import equilibrium, equilibrium_numerical
from .io import (COMMAND_FIELDS, ConfigError, load_config, output_dir, validate_config,
                 write_csv, write_json)
from .model import (IntegrationError, ModelParams, ParameterError, StepControl, SystemState,
                    complete_weights, integrate, star_weights)
from .presets import get_preset

DOMAIN_ERRORS = (ParameterError, IntegrationError, oc.RegimeError, oc.SynthesisError,
                 oc.DomainError, oc.SingularityError, ArithmeticError, RuntimeError)

DISCRETE_SLICES = ((0.1, 0.3), (0.3, 0.6), (0.6, 0.9))


class UsageError(Exception):
    pass


def _need(cfg, *keys):
    missing = [k for k in keys if k not in cfg]
    if missing:
        raise ConfigError("required field missing", missing[0])


def _model(cfg):
    _need(cfg, "b", "nu", "rho")
    n = len(cfg["b"])
    weights = cfg.get("weights")
    topo = cfg.get("topology")
    if weights is None and topo == "star":
        weights = star_weights(n)
    elif weights is None:
        weights = complete_weights(n)
    return ModelParams(b=cfg["b"], nu=cfg["nu"], rho=cfg["rho"], weights=weights)


def cmd_simulate(cfg, out):
    params = _model(cfg)
    y0 = cfg.get("y0", [0.0] * params.n)
    init = SystemState(cfg.get("x0", 0.5), y0)
    control = StepControl(rtol=cfg.get("rtol", 1e-7), atol=cfg.get("atol", 1e-9))
    traj = integrate(params, init, cfg.get("t_end", 100.0), control,
                     n_samples=cfg.get("n_samples", 1001))
    path = write_csv(out / "trajectory.csv", traj.header(), traj.rows())
    fin = traj.final
    return f"simulate: n={params.n} t_end={float(traj.times[-1])!r} x_final={fin.x!r}", [path]


def cmd_equilibrium(cfg, out):
    params = _model(cfg)
    rep = equilibrium_numerical(params) if cfg.get("method") == "numerical" else equilibrium(params)
    path = write_json(out / "equilibrium.json", rep.to_dict())
    if not rep.exists:
        return f"equilibrium: none ({rep.reason})", [path]
    return f"equilibrium: x_bar={rep.x_bar!r} classification={rep.classification}", [path]


def cmd_stability(cfg, out):
    params = _model(cfg)
    if params.n == 1:
        rep = stability.global_single(params)
    elif params.n == 2:
        rep = stability.routh_dual(params)
        lyap = stability.lyapunov_dual(params)
        rep = stability.StabilityReport(rep.local, rep.eigenvalues, lyap.global_condition,
                                        {**rep.values, **lyap.values})
    else:
        ok = stability.locally_stable(params)
        rep = stability.StabilityReport("stable" if ok else "not_stable", (), "not_applicable")
    trials = cfg.get("oracle_trials", 0)
    if trials:
        frac = stability.stability_oracle(params, trials, cfg.get("oracle_scale", 0.1),
                                          rng=cfg.get("seed", 0))
        rep = stability.StabilityReport(rep.local, rep.eigenvalues, rep.global_condition,
                                        rep.values, frac)
    path = write_json(out / "stability.json", rep.to_dict())
    return f"stability: local={rep.local} global={rep.global_condition}", [path]


def cmd_aggregate(cfg, out):
    params = network.self_directed_instance(cfg.get("n", 100), cfg.get("seed", 0))
    n = params.n
    y0 = cfg.get("y0", 0.0)
    init = SystemState(cfg.get("x0", 0.1), np.full(n, y0 / n))
    ba_hat, p_hat = network.aggregate_self_directed(params)
    ba = cfg.get("guess_ba", ba_hat)
    p = cfg.get("guess_p", p_hat)
    t, x, Y, xa, Ya = network.aggregate_trajectory(params, init, cfg.get("t_end", 200.0), ba, p)
    rows = zip(t, x, Y, xa, Ya)
    csv_path = write_csv(out / "aggregate.csv", ("t", "x", "Y", "x_agg", "Y_agg"), rows)
    err = float(max(np.max(np.abs(x - xa)), np.max(np.abs(Y - Ya))))
    summary = {"n": n, "ba_hat": ba_hat, "p_hat": p_hat, "ba_used": ba, "p_used": p,
               "sup_error": err}
    json_path = write_json(out / "aggregate.json", summary)
    return f"aggregate: n={n} sup_error={err!r}", [csv_path, json_path]


def cmd_ocp(cfg, out):
    _need(cfg, "delta")
    ocp = oc.OcpParams(cfg["delta"], cfg.get("mu", 0.0), cfg.get("beta_el", 1.0),
                       cfg.get("x0", 0.5))
    law = oc.synthesize_feedback(ocp.delta, n_grid=cfg.get("n_grid", 400))
    t_end = cfg.get("t_end", 1000.0 if ocp.delta < 1 else 50.0)
    traj = oc.simulate_optimal(ocp, law, t_end)
    law_path = write_csv(out / "feedback_law.csv", law.header(), law.rows())
    traj_path = write_csv(out / "optimal_trajectory.csv", traj.header(), traj.rows())
    report = {"delta": ocp.delta, "regime": law.regime, "branch": traj.branch,
              "sustainability": oc.sustainability_check(ocp), "objective": traj.objective,
              "spread": law.spread, "x_final": float(traj.x[-1]), "y_final": float(traj.y[-1])}
    if ocp.delta < 1:
        sp = oc.saddle_point(ocp.delta)
        report.update(z_hat=sp.z_hat, lambda_hat=sp.lambda_hat, y_hat=sp.y_hat,
                      eigenvalues=list(sp.eigenvalues))
    json_path = write_json(out / "ocp.json", report)
    return (f"ocp: delta={ocp.delta!r} regime={law.regime} "
            f"{report['sustainability']} y_final={report['y_final']!r}"), [law_path, traj_path, json_path]


def cmd_game(cfg, out):
    mode = cfg.get("mode", "continuous" if "nu1" in cfg else "discrete")
    if mode == "continuous":
        _need(cfg, "nu1", "nu2")
        rep = games.tragicness(cfg["nu1"], cfg["nu2"])
        path = write_json(out / "game.json", rep.to_dict())
        return f"game: nash={rep.nash!r} tragicness={rep.tragicness!r}", [path]
    _need(cfg, "rho_L", "rho_H", "nu_L", "nu_H")
    g = games.build_discrete_game(cfg["rho_L"], cfg["rho_H"], cfg["nu_L"], cfg["nu_H"])
    path = write_json(out / "game.json", g.to_dict())
    return f"game: label={g.label} tragic={g.tragic} nash={','.join(g.nash)}", [path]


def cmd_learn(cfg, out):
    _need(cfg, "nu1", "nu2")
    p = learning.LearningParams(cfg["nu1"], cfg["nu2"], cfg.get("b1", 1.0), cfg.get("b2", 1.0))
    init = learning.LearningState(cfg.get("x0", 0.5), cfg.get("y1", 0.0), cfg.get("y2", 0.0),
                                  cfg.get("rho1", 0.8), cfg.get("rho2", 0.2))
    traj = learning.simulate_learning(p, init, cfg.get("t_end", 100.0),
                                      n_samples=cfg.get("n_samples", 1001))
    csv_path = write_csv(out / "learning.csv", traj.header(), traj.rows())
    eq = learning.learning_equilibrium(p.nu1, p.nu2)
    stab = learning.learning_stability(p)
    json_path = write_json(out / "learning.json", {
        "equilibrium": eq.as_vector(), "stability": stab.to_dict(), "stable": stab.stable,
        "final": traj.final.as_vector()})
    return f"learn: stable={stab.stable} x_final={traj.final.x!r}", [csv_path, json_path]


def cmd_sweep(cfg, out):
    _need(cfg, "figure")
    fig = cfg["figure"]
    n = cfg.get("n", 100 if fig == "game-a" else 50)
    if fig == "game-a":
        rows = games.sweep_continuous(n, n) if n else []
        path = write_csv(out / "sweep_game-a.csv", games.CONTINUOUS_COLUMNS, rows)
    elif fig == "disc-trag":
        rows = []
        if n:
            for nl, nh in DISCRETE_SLICES:
                rows.extend(games.sweep_discrete(nl, nh, n))
        path = write_csv(out / "sweep_disc-trag.csv", games.DISCRETE_COLUMNS, rows)
    else:
        raise ConfigError(f"unknown figure {fig!r}; choose game-a or disc-trag", "figure")
    return f"sweep: figure={fig} cells={len(rows)}", [path]


HANDLERS = {
    "simulate": cmd_simulate, "equilibrium": cmd_equilibrium, "stability": cmd_stability,
    "aggregate": cmd_aggregate, "ocp": cmd_ocp, "game": cmd_game, "learn": cmd_learn,
    "sweep": cmd_sweep,
}


def _flag_type(spec):
    kind = spec.get("type")
    if kind == "number":
        return float
    if kind == "integer":
        return int
    if kind == "array":
        if spec["items"].get("type") == "array":
            return lambda s: [[float(v) for v in r.split(",")] for r in s.split(";")]
        return lambda s: [float(v) for v in s.split(",")]
    return str


def build_parser():
    parser = argparse.ArgumentParser(prog="seslab", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)
    for name, fields in COMMAND_FIELDS.items():
        sp = sub.add_parser(name)
        sp.add_argument("--config", help="JSON run configuration")
        sp.add_argument("--preset", help="named figure recipe")
        sp.add_argument("--seed", type=int)
        sp.add_argument("--output-dir", dest="output_dir")
        for key, spec in fields.items():
            sp.add_argument(f"--{key.replace('_', '-')}", dest=key, type=_flag_type(spec),
                            default=None)
    return parser


def _merged_config(args):
    cfg = {}
    if args.preset:
        try:
            preset = get_preset(args.preset)
        except KeyError as exc:
            raise UsageError(exc.args[0]) from exc
        conf = dict(preset.config)
        if preset.command != args.command:
            # borrow only the fields this command understands, e.g. a simulate
            # preset's parameters for a stability verdict
            allowed = COMMAND_FIELDS[args.command]
            conf = {k: v for k, v in conf.items() if k in allowed or k == "seed"}
            if not conf:
                raise UsageError(f"preset {args.preset!r} has nothing usable by {args.command}")
        cfg.update(conf)
    if args.config:
        cfg.update(load_config(args.config))
    for key in list(COMMAND_FIELDS[args.command]) + ["seed", "output_dir"]:
        val = getattr(args, key, None)
        if val is not None:
            cfg[key] = val
    cfg.pop("preset", None)
    return validate_config(args.command, cfg)


def main(argv=None):
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        cfg = _merged_config(args)
    except (ConfigError, UsageError) as exc:
        print(f"seslab {args.command}: config error: {exc}", file=sys.stderr)
        return 2
    out = output_dir(cfg.pop("output_dir", None))
    try:
        line, _ = HANDLERS[args.command](cfg, out)
    except ConfigError as exc:
        print(f"seslab {args.command}: config error: {exc}", file=sys.stderr)
        return 2
    except DOMAIN_ERRORS as exc:
        print(f"seslab {args.command}: error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 1
    print(line)
    return 0


if __name__ == "__main__":
    sys.exit(main())

"""Command-line front end: ``signsat <command> [options]``.

Commands: simulate, maxscore, sstest, idscan, geom, mc-study. Settings come
from ``--config`` (see :mod:`signsat.config`) and are overridden by flags.
Output goes to ``--out`` (plus a ``.manifest.json`` sidecar) or stdout.

Exit status: 0 success, 2 configuration error, 3 degenerate data,
4 capacity exceeded, 1 anything else raised by the library.
"""

from __future__ import annotations

import argparse
import csv
import io
import sys

from . import config as _config
from . import dgp, geometry, ident, maxscore, records, sstest, study
from .errors import ConfigError, SignSatError
from .links import parse_link
from .rng import check_seed

DEFAULT_FORMAT = {
    "simulate": "csv",
    "maxscore": "record",
    "sstest": "record",
    "idscan": "csv",
    "geom": "record",
    "mc-study": "csv",
}

# config sections that matter to each command
SECTIONS = {
    "simulate": ("run", "design", "simulate"),
    "maxscore": ("run", "maxscore"),
    "sstest": ("run", "sstest"),
    "idscan": ("run", "design", "idscan"),
    "geom": ("run", "geom"),
    "mc-study": ("run", "design", "mc_study"),
}


def _csv(rows) -> str:
    buf = io.StringIO()
    csv.writer(buf, lineterminator="\n").writerows(rows)
    return buf.getvalue()


def _num(x) -> str:
    return format(float(x), ".17g")


# -- commands ------------------------------------------------------------------


def cmd_simulate(cfg, args):
    design = _config.build_design(cfg)
    n = cfg["simulate"]["n"]
    if n < 1:
        raise cfg.error("simulate", "n", "n must be at least 1")
    sample = dgp.simulate(design, n, cfg["run"]["seed"], threads=args.threads)
    if args.format == "csv":
        return dgp.sample_to_csv(sample)
    return records.dumps({
        "config": cfg.echo(SECTIONS[args.command]),
        "n": sample.n,
        "w": sample.w.tolist(),
        "y0": sample.y0.tolist(),
        "y1": sample.y1.tolist(),
    }) + "\n"


def _load_input(cfg, section):
    path = cfg[section]["input"]
    if not path:
        raise cfg.error(section, "input", "no input sample given")
    try:
        return dgp.read_sample(path)
    except OSError as exc:
        raise cfg.error(section, "input", f"cannot read {path}: {exc.strerror}") from None
    except (ValueError, IndexError) as exc:
        raise cfg.error(section, "input", f"{path}: {exc}") from None


def cmd_maxscore(cfg, args):
    sample = _load_input(cfg, "maxscore")
    obj = maxscore.ScoreObjective.from_sample(sample)
    sec = cfg["maxscore"]
    kw = dict(samples=sec["samples"], seed=cfg["run"]["seed"])
    sup = maxscore.maximize(obj, sec["method"], **kw)
    inf = maxscore.minimize(obj, sec["method"], **kw)
    if args.format == "csv":
        head = ["side", "value"] + [f"q_{j + 1}" for j in range(obj.k)] + ["method", "cells_visited"]
        rows = [head]
        for name, r in (("sup", sup), ("inf", inf)):
            rows.append([name, _num(r.value)] + [_num(x) for x in r.argq] + [r.method, r.cells_visited])
        return _csv(rows)
    rec = {"config": cfg.echo(SECTIONS[args.command]), "n": obj.n}
    for name, r in (("sup", sup), ("inf", inf)):
        rec[name] = {"value": r.value, "argq": r.argq.tolist(), "method": r.method,
                     "cells_visited": r.cells_visited}
    return records.dumps(rec) + "\n"


def _check_reps(cfg, section):
    sec = cfg[section]
    if not 0 < sec["alpha"] < 1:
        raise cfg.error(section, "alpha", "alpha must lie in (0, 1)")
    need = sstest.min_reps(sec["alpha"])
    if sec["b_reps"] < need:
        raise cfg.error(section, "b_reps", f"need at least {need} replicates at alpha = {sec['alpha']}")


def cmd_sstest(cfg, args):
    sample = _load_input(cfg, "sstest")
    _check_reps(cfg, "sstest")
    sec = cfg["sstest"]
    tc = _config.make_test_config(cfg, "sstest", cfg["run"]["seed"], args.threads)
    direction = sec["direction"]
    if direction == "both":
        rep = sstest.sign_saturation_check(sample, tc)
        reports = [rep.upper, rep.lower]
        verdict = rep.verdict
    else:
        fn = sstest.test_upper if direction == "upper" else sstest.test_lower
        reports = [fn(sample, tc)]
        verdict = None
    if sec["draws_out"]:
        text = _csv([["replicate", "sup_draw"]] + [[i, _num(x)] for i, x in enumerate(reports[0].boot_draws)])
        records.write_text(sec["draws_out"], text)
    if args.format == "csv":
        rows = [["direction", "n", "t_n", "c_crit", "reject", "verdict"]]
        for r in reports:
            rows.append([r.direction, r.n, _num(r.t_n), _num(r.c_crit),
                         "true" if r.reject else "false", verdict or ""])
        return _csv(rows)
    rec = {"config": cfg.echo(SECTIONS[args.command]), "reports": [r.to_record() for r in reports]}
    if verdict is not None:
        rec["verdict"] = verdict
    return records.dumps(rec) + "\n"


def cmd_idscan(cfg, args):
    design = _config.build_design(cfg)
    sec = cfg["idscan"]
    grid = sec["b_grid"]
    for b in grid:
        if len(b) != design.k:
            raise cfg.error("idscan", "b_grid", f"every b needs {design.k} components")
    if sec["method"] == "analytic" and grid and not ident.supports_analytic(design):
        raise cfg.error("idscan", "method", "no closed form for this design; use montecarlo")
    reports = ident.id_scan(design, grid, sec["method"], draws=sec["draws"], seed=cfg["run"]["seed"])
    if args.format == "csv":
        return ident.scan_to_csv(reports, design.k)
    rows = [{"b": list(r.b), "r_value": r.r_value, "se": r.se, "mass_pos": r.mass_pos,
             "mass_neg": r.mass_neg, "mass_zero": r.mass_zero, "verdict": r.verdict,
             "method": r.method} for r in reports]
    return records.dumps({"config": cfg.echo(SECTIONS[args.command]), "reports": rows}) + "\n"


def _window(spec):
    return None if spec is None else geometry.WindowSpec(*spec)


def cmd_geom(cfg, args):
    sec = cfg["geom"]
    link = parse_link(sec["link"])
    grid = _window(sec["grid"]).grid()
    if sec["deltas"] is not None:
        if sec["t"] is None:
            raise cfg.error("geom", "t", "a delta scan needs t")
        scan = geometry.delta_scan(link, sec["t"], sec["deltas"], grid, sec["floor"])
        if args.format == "csv":
            rows = [["delta", "s", "t", "verdict", "residual"]]
            for d, cert in scan:
                rows.append([_num(d), _num(cert.s), _num(cert.t), cert.verdict,
                             "" if cert.residual is None else _num(cert.residual)])
            return _csv(rows)
        return records.dumps({"config": cfg.echo(SECTIONS[args.command]),
                              "scan": [dict(delta=d, **c.to_record()) for d, c in scan]}) + "\n"
    if sec["s"] is None or sec["t"] is None:
        raise cfg.error("geom", "s", "geom needs both s and t")
    opts = geometry.HullOptions(window=_window(sec["window"]), grid=grid,
                                margin=sec["margin"], floor=sec["floor"])
    cert = geometry.hull_status(link, sec["s"], sec["t"], opts)
    rec = cert.to_record()
    if sec["epsilon"]:
        try:
            rec["epsilon"] = geometry.find_epsilon(link, sec["s"], sec["t"])
        except SignSatError as exc:
            rec["epsilon_error"] = str(exc)
    if args.format == "csv":
        rows = [["verdict", "s", "t", "residual", "separator"]]
        sep = "" if cert.separator is None else " ".join(_num(v) for v in cert.separator)
        rows.append([cert.verdict, _num(cert.s), _num(cert.t),
                     "" if cert.residual is None else _num(cert.residual), sep])
        return _csv(rows)
    return records.dumps({"config": cfg.echo(SECTIONS[args.command]), "certificate": rec}) + "\n"


def cmd_mc_study(cfg, args):
    design = _config.build_design(cfg)
    sec = cfg["mc_study"]
    if sec["trials"] < 1:
        raise cfg.error("mc_study", "trials", "trials must be at least 1")
    if sec["n"] < 2:
        raise cfg.error("mc_study", "n", "n must be at least 2")
    _check_reps(cfg, "mc_study")
    tc = _config.make_test_config(cfg, "mc_study", 0, 1, direction=sec["test"])
    res = study.mc_study(design, sec["n"], sec["trials"], sec["test"], tc,
                         seed=cfg["run"]["seed"], threads=args.threads)
    if args.format == "csv":
        text = res.to_csv()
    else:
        rows = [{"statistic": r.statistic, "trials": r.trials, "rejections": r.rejections,
                 "frequency": r.frequency, "mc_se": r.mc_se, "degenerate": r.degenerate}
                for r in res.rows]
        text = records.dumps({"config": cfg.echo(SECTIONS[args.command]), "truncated": res.truncated,
                              "completed": res.completed, "rows": rows}) + "\n"
    return text, res.truncated


COMMANDS = {
    "simulate": cmd_simulate,
    "maxscore": cmd_maxscore,
    "sstest": cmd_sstest,
    "idscan": cmd_idscan,
    "geom": cmd_geom,
    "mc-study": cmd_mc_study,
}


# -- argument handling ---------------------------------------------------------


def _design_flags(p):
    p.add_argument("--kind", choices=("uniform_example", "chamberlain"))
    p.add_argument("--beta", help="comma-separated coefficients, e.g. 1,0.5")
    p.add_argument("--link", help="logistic | gaussian_tail | periodic_gdot(a=2.0)")


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="INI run configuration")
    common.add_argument("--seed", help="64-bit seed (overrides [run] seed)")
    common.add_argument("--out", help="output file; stdout when omitted")
    common.add_argument("--threads", type=int, default=1, help="worker threads (results do not depend on it)")
    common.add_argument("--format", choices=("csv", "record"))

    parser = argparse.ArgumentParser(prog="signsat", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("simulate", parents=[common], help="simulate a panel sample")
    _design_flags(p)
    p.add_argument("--n")

    p = sub.add_parser("maxscore", parents=[common], help="sup and inf of the score objective")
    p.add_argument("input", nargs="?")
    p.add_argument("--method", choices=maxscore.METHODS)
    p.add_argument("--samples")

    p = sub.add_parser("sstest", parents=[common], help="bootstrap sign-saturation test")
    p.add_argument("input", nargs="?")
    p.add_argument("--alpha")
    p.add_argument("--breps")
    p.add_argument("--direction", choices=("upper", "lower", "both"))
    p.add_argument("--optimizer", choices=maxscore.METHODS)
    p.add_argument("--convention", choices=(sstest.GEQ, sstest.VERBATIM))
    p.add_argument("--draws-out")

    p = sub.add_parser("idscan", parents=[common], help="identification verdicts over a grid of b")
    _design_flags(p)
    p.add_argument("--b-grid", help="vectors separated by ';', e.g. '1,0.7; 1,0.8'")
    p.add_argument("--method", choices=("analytic", "montecarlo"))
    p.add_argument("--draws")

    p = sub.add_parser("geom", parents=[common], help="hull certificates for a link")
    p.add_argument("--link")
    p.add_argument("--s")
    p.add_argument("--t")
    p.add_argument("--window", help="low,high,points")
    p.add_argument("--grid", help="low,high,points")
    p.add_argument("--deltas", help="comma-separated shifts for a scan at t + delta")
    p.add_argument("--epsilon", action="store_true")

    p = sub.add_parser("mc-study", parents=[common], help="Monte Carlo size/power study")
    _design_flags(p)
    p.add_argument("--n")
    p.add_argument("--trials")
    p.add_argument("--test", choices=("upper", "lower", "both"))
    p.add_argument("--alpha")
    p.add_argument("--breps")
    p.add_argument("--optimizer", choices=maxscore.METHODS)
    return parser


# flag -> (section, key), per command
_FLAGS = {
    "simulate": {"kind": ("design", "kind"), "beta": ("design", "beta"), "link": ("design", "link"),
                 "n": ("simulate", "n")},
    "maxscore": {"input": ("maxscore", "input"), "method": ("maxscore", "method"),
                 "samples": ("maxscore", "samples")},
    "sstest": {"input": ("sstest", "input"), "alpha": ("sstest", "alpha"), "breps": ("sstest", "b_reps"),
               "direction": ("sstest", "direction"), "optimizer": ("sstest", "optimizer"),
               "convention": ("sstest", "boundary_convention"), "draws_out": ("sstest", "draws_out")},
    "idscan": {"kind": ("design", "kind"), "beta": ("design", "beta"), "link": ("design", "link"),
               "b_grid": ("idscan", "b_grid"), "method": ("idscan", "method"), "draws": ("idscan", "draws")},
    "geom": {"link": ("geom", "link"), "s": ("geom", "s"), "t": ("geom", "t"), "window": ("geom", "window"),
             "grid": ("geom", "grid"), "deltas": ("geom", "deltas")},
    "mc-study": {"kind": ("design", "kind"), "beta": ("design", "beta"), "link": ("design", "link"),
                 "n": ("mc_study", "n"), "trials": ("mc_study", "trials"), "test": ("mc_study", "test"),
                 "alpha": ("mc_study", "alpha"), "breps": ("mc_study", "b_reps"),
                 "optimizer": ("mc_study", "optimizer")},
}


def resolve_config(args) -> "_config.RunConfig":
    cfg = _config.load_config(args.config) if args.config else _config.defaults()
    if args.seed is not None:
        cfg.override("run", "seed", args.seed)
    try:
        check_seed(cfg["run"]["seed"])
    except SignSatError as exc:
        raise cfg.error("run", "seed", str(exc)) from None
    for flag, (section, key) in _FLAGS[args.command].items():
        value = getattr(args, flag, None)
        if value is not None:
            cfg.override(section, key, value)
    if getattr(args, "epsilon", False):
        cfg.override("geom", "epsilon", True)
    if args.threads < 1:
        raise ConfigError("--threads must be at least 1")
    return cfg


def run(argv=None) -> int:
    args = build_parser().parse_args(argv)
    args.format = args.format or DEFAULT_FORMAT[args.command]
    truncated = False
    try:
        cfg = resolve_config(args)
        out = COMMANDS[args.command](cfg, args)
        if isinstance(out, tuple):
            out, truncated = out
        if args.out:
            records.write_text(args.out, out)
            outputs = [args.out]
            draws = cfg.values.get("sstest", {}).get("draws_out") if args.command == "sstest" else None
            if draws:
                outputs.append(draws)
            echo = cfg.echo(SECTIONS[args.command])
            echo["output"] = {"format": args.format}
            records.write_manifest(args.out, args.command, echo, outputs)
        else:
            sys.stdout.write(out)
    except SignSatError as exc:
        print(f"signsat {args.command}: error: {exc}", file=sys.stderr)
        return exc.code
    if truncated:
        print(f"signsat {args.command}: interrupted; partial results written", file=sys.stderr)
        return 130
    return 0


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()

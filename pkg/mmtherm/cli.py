#!/usr/bin/env python3
# -*- coding: utf-8 -*-
# File   : cli.py
# License: GNU v3.0
# Author : the mmtherm developers
# Date   : 19.10.2026


'''The ``mmtherm`` command-line interface.

Subcommands write plot-ready data (CSV or JSON) to ``--out`` or stdout;
human-readable feedback goes to stderr. Exit codes: 0 success, 1 numerical
failure (quadrature, extrapolation or zero evidence), 2 improper
(divergent) prior, 3 validation failures, 4 bad configuration.

Examples
--------
::

    mmtherm list
    mmtherm prior --scenario s22 --metric minimal --out s22_marginal.csv
    mmtherm thermo --scenario s24 --beta 0:10:0.1 --format json
    mmtherm infogain --scenario s21 --sequence AD
    mmtherm validate --scenario s26-3
'''


import  os
import  sys
import  json
import  argparse
import  textwrap
from    concurrent.futures  import  ProcessPoolExecutor

import  numpy               as      np
import  pandas              as      pd

from    .                   import  bayes
from    .                   import  measure
from    .                   import  scenarios
from    .                   import  thermo
from    .__version__        import  __version__
from    .config             import  ConfigError, load_config, max_workers
from    .measure            import  (
    ConvergenceError,
    DivergenceError,
    ExtrapolationError,
)
from    .metric             import  compare_metrics
from    .utilities          import  SignalHandlerKI, banner


EXIT_OK = 0
EXIT_FAILURE = 1
EXIT_DIVERGENT = 2
EXIT_VALIDATION = 3
EXIT_CONFIG = 4

# Points per axis of the two-dimensional density grid written by `prior`
DENSITY_GRID = 101




class ArgumentParser(argparse.ArgumentParser):
    '''Argument parser exiting with the configuration error code.'''

    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_CONFIG, f"{self.prog}: error: {message}\n")




def _build_parser():
    common = argparse.ArgumentParser(add_help = False)
    common.add_argument("--config", metavar = "TOML",
                        help = "TOML file of `key = value` settings.")
    common.add_argument("--out", metavar = "PATH",
                        help = "Output file; stdout if omitted.")
    common.add_argument("--format", choices = ["csv", "json"],
                        help = "Output format (default csv).")
    common.add_argument("-v", "--verbose", action = "count",
                        help = "Print banners (-v) and progress (-vv).")

    scenario = argparse.ArgumentParser(add_help = False)
    scenario.add_argument("--scenario", metavar = "ID",
                          help = "Scenario id; see `mmtherm list`.")
    scenario.add_argument("--metric", choices = ["minimal", "maximal"],
                          help = "Monotone metric (default: the scenario's).")
    scenario.add_argument("--tol", type = float,
                          help = "Quadrature tolerance in (0, 1e-2].")

    parser = ArgumentParser(
        prog = "mmtherm",
        description = (
            "Monotone-metric priors over density-matrix families, their "
            "thermodynamics and Bayesian information gains."
        ),
    )
    parser.add_argument("--version", action = "version",
                        version = f"%(prog)s {__version__}")
    subparsers = parser.add_subparsers(dest = "command", required = True)

    subparsers.add_parser("list", parents = [common],
                          help = "List the registered scenarios.")

    prior = subparsers.add_parser(
        "prior", parents = [common, scenario],
        help = "Tabulate the normalised prior and its marginal.",
    )
    prior.add_argument("--grid", type = int,
                       help = "Marginal grid points (default 201).")
    prior.add_argument("--axis", type = int,
                       help = "Marginal axis (default: the energy axis).")
    prior.add_argument("--shrink-limit", action = "store_true",
                       default = None,
                       help = "Use the shrink-limit marginal of improper "
                       "priors.")

    therm = subparsers.add_parser(
        "thermo", parents = [common, scenario],
        help = "Partition function, mean energy and variance over beta.",
    )
    therm.add_argument("--beta", metavar = "START:STOP:STEP",
                       help = "Inverse temperature grid (stop inclusive).")
    therm.add_argument("--h", type = float, help = "Field scale (default 1).")
    therm.add_argument("--grid", type = int,
                       help = "Shrink-limit grid points (default 201).")
    therm.add_argument("--shrink-limit", action = "store_true",
                       default = None,
                       help = "Use the shrink-limit marginal of improper "
                       "priors.")

    gain = subparsers.add_parser(
        "infogain", parents = [common, scenario],
        help = "Information gains of joint spin measurements.",
    )
    gain.add_argument("--sequence", metavar = "OUTCOMES",
                      help = "Outcome chain over A (agree) and D (disagree).")

    comp = subparsers.add_parser(
        "compare", parents = [common, scenario],
        help = "Compare the minimal and maximal metrics at random points.",
    )
    comp.add_argument("--seed", type = int,
                      help = "Seed of the interior points (default 20).")

    subparsers.add_parser(
        "validate", parents = [common, scenario],
        help = "Run the validation checks of one or all scenarios.",
    )

    return parser




def _config(args):
    flags = dict(
        scenario = getattr(args, "scenario", None),
        metric = getattr(args, "metric", None),
        beta = getattr(args, "beta", None),
        h = getattr(args, "h", None),
        format = args.format,
        out = args.out,
        tol = getattr(args, "tol", None),
        grid = getattr(args, "grid", None),
        shrink_limit = getattr(args, "shrink_limit", None),
        sequence = getattr(args, "sequence", None),
        axis = getattr(args, "axis", None),
        seed = getattr(args, "seed", None),
        verbose = args.verbose,
    )
    return load_config(args.config, **flags)




def _require_scenario(cfg, resolved = True):
    if cfg.scenario is None:
        raise ConfigError("This command needs --scenario; see `mmtherm list`.")
    try:
        sc = scenarios.get_scenario(cfg.scenario)
    except KeyError as err:
        raise ConfigError(err.args[0]) from err

    if resolved and sc.status != "ok":
        raise ConfigError(textwrap.fill((
            f"Scenario `{sc.id}` is unresolved: {' '.join(sc.notes)}"
        )))
    return sc




def _notes(sc, prefix = "DEVIATION"):
    # Documented departures from quoted results always reach stderr
    for note in sc.notes:
        if note.startswith(prefix):
            print(f"mmtherm: {sc.id}: {note}", flush = True,
                  file = sys.stderr)




def _energy_axis(sc):
    try:
        return sc.energy_axis
    except ValueError as err:
        raise ConfigError(str(err)) from err




def _kind(sc, cfg):
    try:
        return sc.kind(cfg.metric)
    except ValueError as err:
        raise ConfigError(str(err)) from err




def _make_parent(out):
    directory = os.path.dirname(out)
    if directory:
        os.makedirs(directory, exist_ok = True)




def _write(text, out):
    if out is None:
        sys.stdout.write(text)
        if not text.endswith("\n"):
            sys.stdout.write("\n")
        return

    _make_parent(out)
    with open(out, "w") as f:
        f.write(text)




def _frame_text(frame, cfg, meta = None):
    if cfg.format == "json":
        records = json.loads(frame.to_json(orient = "records",
                                           double_precision = 15))
        return json.dumps(dict(meta = meta or {}, rows = records), indent = 2)

    lines = "".join(f"# {k}: {v}\n" for k, v in (meta or {}).items())
    return lines + frame.to_csv(index = False, float_format = "%.17g")




def _feedback(cfg, message):
    if cfg.verbose >= 1:
        print(message, flush = True, file = sys.stderr)




def cmd_list(cfg):
    '''Print the scenario table, or the registry JSON with ``--format
    json``.
    '''
    if cfg.format == "json":
        _write(scenarios.export_registry(), cfg.out)
    else:
        table = scenarios.list_scenarios()
        _write(table.to_string(index = False), cfg.out)
    return EXIT_OK




def _density_grid(prior):
    box = prior.region.bounds()
    xs = np.linspace(box[0, 0], box[0, 1], DENSITY_GRID)[1:-1]
    ys = np.linspace(box[1, 0], box[1, 1], DENSITY_GRID)[1:-1]
    xx, yy = np.meshgrid(xs, ys, indexing = "ij")
    points = np.column_stack([xx.ravel(), yy.ravel()])

    density = np.full(len(points), np.nan)
    inside = prior.region.contains(points, tol = -1e-9)
    density[inside] = prior(points[inside])
    return pd.DataFrame(dict(x0 = points[:, 0], x1 = points[:, 1],
                             density = density))




def cmd_prior(cfg):
    '''Tabulate the marginal of the normalised prior along the chosen axis;
    for two-parameter scenarios also write the density on a grid next to
    ``--out``.
    '''

    sc = _require_scenario(cfg)
    kind = _kind(sc, cfg)
    _notes(sc)

    if cfg.shrink_limit:
        _energy_axis(sc)
        _feedback(cfg, f"Shrink-limit marginal of {sc.id} ({kind})")
        table = sc.shrink_limit_prior(kind, grid_size = cfg.grid,
                                      verbose = cfg.verbose >= 2).table
        prior = None
    else:
        prior = sc.prior(kind, tol = cfg.tol)
        axis = _energy_axis(sc) if cfg.axis is None else cfg.axis
        if not 0 <= axis < prior.dim:
            raise ConfigError(f"Axis {axis} out of range for the "
                              f"{prior.dim}-parameter scenario `{sc.id}`.")
        _feedback(cfg, f"Marginal of {sc.id} ({kind}) along axis {axis}, "
                  f"normalisation {prior.Z:.12g}")
        table = measure.marginal(prior, axis, grid_size = cfg.grid)

    meta = dict(scenario = sc.id, metric = kind)
    meta.update(table.meta)
    table.meta = meta

    if cfg.format == "json":
        _write(json.dumps(dict(meta = meta, support = list(table.support),
                               x = table.x.tolist(),
                               density = table.density.tolist()),
                          indent = 2), cfg.out)
    elif cfg.out is None:
        table.to_csv(sys.stdout)
    else:
        _make_parent(cfg.out)
        table.to_csv(cfg.out)

    if prior is not None and prior.dim == 2 and cfg.out is not None:
        stem, ext = os.path.splitext(cfg.out)
        grid_meta = dict(scenario = sc.id, metric = kind,
                         normalization = repr(prior.Z))
        _write(_frame_text(_density_grid(prior), cfg, grid_meta),
               f"{stem}_grid{ext or '.csv'}")

    return EXIT_OK




def cmd_thermo(cfg):
    '''Write the ThermoCurve of a scenario over the beta grid.'''

    sc = _require_scenario(cfg)
    kind = _kind(sc, cfg)
    _notes(sc)

    if cfg.shrink_limit:
        _energy_axis(sc)
        prior = sc.shrink_limit_prior(kind, grid_size = cfg.grid,
                                      verbose = cfg.verbose >= 2)
        obs = sc.axis_energy()
    else:
        prior = sc.prior(kind, tol = cfg.tol)
        obs = sc.energy

    closed = sc.closed_form(kind)
    meta = dict(scenario = sc.id, metric = kind,
                normalization = repr(prior.Z),
                shrink_limit = bool(cfg.shrink_limit))

    if cfg.verbose >= 1:
        banner(f"mmtherm thermo: {sc.id} ({kind})")

    curve = thermo.thermo_curve(prior, obs, cfg.beta_grid(), h = cfg.h,
                                closed = closed, tol = cfg.tol, meta = meta,
                                verbose = cfg.verbose >= 2)

    if cfg.verbose >= 1:
        if curve.has_closed_form:
            rq, re = curve.max_residuals()
            _feedback(cfg, f"Largest residuals: Q {rq:.3e}, E {re:.3e}")
        else:
            _feedback(cfg, "No closed form registered; numeric columns only.")

    if cfg.format == "json":
        _write(curve.to_json(), cfg.out)
    else:
        _write(curve.to_csv(), cfg.out)
    return EXIT_OK




def cmd_infogain(cfg):
    '''Write the gain report of a joint spin measurement, with the per-step
    gains of ``--sequence`` when given.
    '''

    sc = _require_scenario(cfg)
    kind = _kind(sc, cfg)
    model = sc.measurement_model()
    if model is None:
        raise ConfigError(textwrap.fill((
            f"Scenario `{sc.id}` has no joint spin measurement; use one of "
            f"{[s for s, x in scenarios.REGISTRY.items() if x.measurement]}."
        )))

    steps = None
    if cfg.sequence is not None:
        try:
            bayes.parse_sequence(cfg.sequence, model)
        except ValueError as err:
            raise ConfigError(str(err)) from err

    prior = sc.prior(kind, tol = cfg.tol)
    report = bayes.expected_gain(prior, model)
    if cfg.sequence is not None:
        steps = bayes.sequential_gains(prior, model, cfg.sequence)

    if cfg.verbose >= 1:
        banner(f"mmtherm infogain: {sc.id} ({kind})")
        print(report.to_frame(), flush = True, file = sys.stderr)

    if cfg.format == "csv":
        frame = (pd.DataFrame([s.to_dict() for s in steps]) if steps
                 else report.to_frame())
        meta = dict(scenario = sc.id, metric = kind,
                    expected_gain_nats = report.expected_gain)
        _write(_frame_text(frame, cfg, meta), cfg.out)
        return EXIT_OK

    doc = dict(scenario = sc.id, metric = kind, sequence = cfg.sequence)
    if steps is not None:
        doc["steps"] = [s.to_dict() for s in steps]
    doc.update(report.to_dict())
    _write(json.dumps(doc, indent = 2), cfg.out)
    return EXIT_OK




def cmd_compare(cfg):
    '''Compare the two metrics of a family scenario at seeded interior
    points.
    '''

    sc = _require_scenario(cfg)
    if sc.family is None or sc.status != "ok":
        raise ConfigError(textwrap.fill((
            f"Scenario `{sc.id}` has no resolved density-matrix family to "
            "compare metrics on."
        )))

    points = sc.region.interior_points(scenarios.POINT_COUNT, rng = cfg.seed,
                                       margin = 0.05)
    table = compare_metrics(sc.family, points,
                            with_sld = sc.family.dim <= 8)

    ratio = table["ratio"]
    meta = dict(
        scenario = sc.id,
        seed = cfg.seed,
        ratio_spread = float(ratio.max() / ratio.min() - 1.),
        min_eig_max_minus_min = float(table["min_eig_max_minus_min"].min()),
    )
    _feedback(cfg, "\n".join(f"{k}: {v}" for k, v in meta.items()))
    _write(_frame_text(table, cfg, meta), cfg.out)
    return EXIT_OK




def _validate_one(sid, kinds):
    return scenarios.validate_scenario(sid, kinds).to_dict()




def cmd_validate(cfg):
    '''Validate one scenario (``--scenario``) or the whole registry, in
    parallel worker processes capped by ``MMTHERM_THREADS``.
    '''

    if cfg.scenario is not None:
        ids = [_require_scenario(cfg, resolved = False).id]
    else:
        ids = scenarios.scenario_ids()
    kinds = None if cfg.metric is None else [cfg.metric]

    workers = min(max_workers(), len(ids))
    if cfg.verbose >= 1:
        banner(f"mmtherm validate: {len(ids)} scenario(s), {workers} "
               "worker(s)")

    if workers == 1:
        reports = [_validate_one(sid, kinds) for sid in ids]
    else:
        with SignalHandlerKI(), ProcessPoolExecutor(workers) as executor:
            futures = [executor.submit(_validate_one, sid, kinds)
                       for sid in ids]
            try:
                reports = [f.result() for f in futures]
            except KeyboardInterrupt:
                for f in futures:
                    f.cancel()
                raise

    passed = all(r["passed"] for r in reports)
    if cfg.verbose >= 1:
        summary = pd.DataFrame([
            dict(scenario = r["scenario"], passed = r["passed"],
                 checks = len(r["entries"]),
                 failures = sum(e["status"] == "fail" for e in r["entries"]))
            for r in reports
        ])
        print(summary.to_string(index = False), flush = True,
              file = sys.stderr)

    if cfg.format == "csv":
        frame = pd.DataFrame([
            dict(scenario = r["scenario"], **e)
            for r in reports for e in r["entries"]
        ])
        _write(_frame_text(frame, cfg, dict(passed = passed)), cfg.out)
    else:
        _write(json.dumps(dict(passed = passed, scenarios = reports),
                          indent = 2), cfg.out)

    return EXIT_OK if passed else EXIT_VALIDATION




COMMANDS = dict(
    list = cmd_list,
    prior = cmd_prior,
    thermo = cmd_thermo,
    infogain = cmd_infogain,
    compare = cmd_compare,
    validate = cmd_validate,
)




def main(argv = None):
    '''Entry point of the ``mmtherm`` console script; returns the exit code.
    '''

    parser = _build_parser()
    args = parser.parse_args(argv)

    try:
        cfg = _config(args)
        if args.command == "validate" and args.format is None and \
                cfg.format == "csv" and args.config is None:
            cfg.format = "json"
        return COMMANDS[args.command](cfg)

    except DivergenceError as err:
        print(f"mmtherm: improper prior: {err}", flush = True,
              file = sys.stderr)
        return EXIT_DIVERGENT

    except ConfigError as err:
        print(f"mmtherm: configuration error: {err}", flush = True,
              file = sys.stderr)
        return EXIT_CONFIG

    except (ConvergenceError, ExtrapolationError, ZeroDivisionError) as err:
        print(f"mmtherm: numerical failure: {err}", flush = True,
              file = sys.stderr)
        return EXIT_FAILURE




if __name__ == "__main__":
    raise SystemExit(main())

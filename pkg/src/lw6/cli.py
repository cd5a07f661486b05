"""Command-line front end: ``lw6 {verify,flux,sweep,simulate,fields,run}``.

Exit status: 0 all checks pass, 2 configuration error, 3 a numerical check
failed, 4 a computation did not converge.
"""
from __future__ import annotations

import argparse
import logging
import sys
import time
from concurrent.futures import ThreadPoolExecutor

import numpy as np
import scipy

from . import __version__, kernels
from . import balance as bal
from . import checks as ck
from . import config as cfg
from . import flux as fx
from . import motion as mo
from .quadrature import QuadratureError, SphereQuadrature
from .report import CSV_COLUMNS, FORMATS, Report, Table, emit_report
from .worldline import KinematicState, RetardedTimeError, builtin_worldline

EXIT_OK, EXIT_CONFIG, EXIT_NUMERIC, EXIT_CONVERGENCE = 0, 2, 3, 4

log = logging.getLogger("lw6")

_KIND_PARAMS = {
    "uniform": ("velocity",),
    "hyperbolic": ("g", "axis"),
    "circular": ("radius", "beta"),
    "helical": ("radius", "beta", "drift"),
}


class NumericFailure(RuntimeError):
    pass


def worldline(sc: cfg.Scenario):
    kind = sc["trajectory.kind"]
    return builtin_worldline(kind, **{p: sc[f"trajectory.{p}"] for p in _KIND_PARAMS[kind]})


def constants(sc: cfg.Scenario) -> bal.RenormalizationConstants:
    kind, _, args = sc["constants.nu"].partition(":")
    nu = {"zero": bal.GaugeFunction.zero,
          "sin": lambda: bal.GaugeFunction.sin(*cfg._floats(args)),
          "poly": lambda: bal.GaugeFunction.poly(*cfg._floats(args))}[kind]()
    return bal.RenormalizationConstants(sc["constants.m"], sc["constants.mu"], nu)


def _quadrature(sc) -> SphereQuadrature:
    return SphereQuadrature(tuple(sc["quadrature.n_theta"]), sc["quadrature.n_phi"])


def _tol(sc, key):
    return sc[f"tolerances.{key}"]


# --- tasks ----------------------------------------------------------------------

def task_verify(sc, rep: Report) -> None:
    w, e = worldline(sc), sc["charge.e"]
    suites = sc["verify.suites"]

    def run(name):
        if name == "moments":
            return ck.moments_suite(sc["quadrature.moment_nodes"], _tol(sc, "moments"))
        if name == "field":
            return _field_checks(sc, w, e)
        if name == "stress":
            return _stress_checks(sc, w, e)
        if name == "flux":
            return ck.flux_suite(w, e, sc["flux.r"], sc["flux.tau0"], sc["flux.tau1"], sc["flux.r_alt"],
                                 _quadrature(sc), sc["quadrature.epsrel"], _tol(sc, "p_rad"), _tol(sc, "p_bnd"),
                                 _tol(sc, "M_bnd"), _tol(sc, "r_independence"),
                                 limit=sc["quadrature.max_panels"])
        return _balance_checks(sc, w, e)

    workers = sc["scenario.workers"]
    if workers > 1:
        with ThreadPoolExecutor(workers) as pool:
            results = list(pool.map(run, suites))
    else:
        results = [run(s) for s in suites]
    for r in results:
        rep.checks.extend(r)


def _field_checks(sc, w, e, samples=None):
    return ck.field_suite(w, e, sc["fields.samples"], sc["scenario.seed"], sc["fields.h_ratio"], _tol(sc, "order"),
                          (sc["fields.tau0"], sc["fields.tau1"]), (sc["fields.r_min"], sc["fields.r_max"]),
                          samples=samples)


def _stress_checks(sc, w, e):
    return ck.stress_suite(w, e, sc["fields.stress_samples"], sc["scenario.seed"] + 1,
                           _tol(sc, "reconstruction"), _tol(sc, "null"), _tol(sc, "rescaling"),
                           (sc["fields.tau0"], sc["fields.tau1"]))


def _balance_checks(sc, w, e):
    return ck.balance_suite(w, constants(sc), e, sc["balance.taus"], sc["balance.fd_step"], _tol(sc, "nu"),
                            _tol(sc, "angular"), _tol(sc, "chain"), _tol(sc, "identity"), _tol(sc, "closure"))


def task_flux(sc, rep: Report) -> None:
    w, e = worldline(sc), sc["charge.e"]
    r, t0, t1 = sc["flux.r"], sc["flux.tau0"], sc["flux.tau1"]
    q = _quadrature(sc)
    num = fx.tube_flux_numeric(w, e, t0, t1, q, sc["quadrature.epsrel"], limit=sc["quadrature.max_panels"])
    fr = fx.flux_report(w, e, r, t0, t1, q, numeric=num)
    tols = {"p_rad": _tol(sc, "p_rad"), "M_rad": _tol(sc, "p_rad"), "p_bnd": _tol(sc, "p_bnd"),
            "M_bnd": _tol(sc, "M_bnd")}
    rows = fr.rows()
    scale = {}
    for name, _, closed, numeric, _ in rows:
        scale[name] = max(scale.get(name, 0.0), abs(closed), abs(numeric))
    t = Table("flux", ["quantity", "index", "closed", "numeric", "residual", "tol", "pass", "r", "tau0", "tau1"])
    for name, idx, closed, numeric, res in rows:
        ok = abs(res) <= tols[name] * (scale[name] if scale[name] > 0 else 1.0)
        t.add(name, idx, closed, numeric, res, tols[name], ok, r, t0, t1)
    rep.tables.append(t)
    rep.checks.extend(ck.flux_suite(w, e, r, t0, t1, sc["flux.r_alt"], q, sc["quadrature.epsrel"],
                                    tols["p_rad"], tols["p_bnd"], tols["M_bnd"], _tol(sc, "r_independence"),
                                    numeric=num, limit=sc["quadrature.max_panels"]))


def task_sweep(sc, rep: Report) -> None:
    w, e = worldline(sc), sc["charge.e"]
    radii = sc["sweep.radii"]
    try:
        if sc["sweep.method"] == "tube":
            sw = fx.sweep_tube(w, e, sc["sweep.tau0"], sc["sweep.tau1"], radii, _quadrature(sc),
                               sc["quadrature.epsrel"], sc["scenario.workers"], sc["quadrature.max_panels"])
        else:
            sw = fx.sweep_hyperplane(w, e, sc["sweep.tau"], radii, sc["sweep.far"],
                                     SphereQuadrature.uniform(sc["sweep.hyperplane_nodes"]),
                                     max(sc["quadrature.epsrel"], 1e-10))
    except fx.FitError as exc:
        raise NumericFailure(f"power-law fit failed: {exc}") from None
    cols = ["r"] + [f"p{i}" for i in range(6)]
    if sw.angular is not None:
        cols += [f"M{i}{j}" for i in range(6) for j in range(i + 1, 6)]
    data = Table("sweep_data", cols)
    iu = np.triu_indices(6, 1)
    for k, r in enumerate(sw.radii):
        row = [r, *sw.momentum[k]]
        if sw.angular is not None:
            row += list(sw.angular[k][iu])
        data.add(*row)
    rep.tables.append(data)
    expected = sc["sweep.expected"]
    tol = _tol(sc, "exponent")
    fit_t = Table("sweep_fit", ["quantity", "exponent", "expected", "deviation", "tol", "pass", "coefficient_norm"])
    for label, fit in (("momentum", sw.momentum_fit), ("angular", sw.angular_fit)):
        if fit is None:
            continue
        for p, coef in zip(fit.exponents, fit.coefficients):
            near = min(expected, key=lambda x: abs(x - p))
            dev = abs(p - near)
            fit_t.add(label, p, near, dev, tol, dev <= tol, float(np.max(np.abs(coef))))
    rep.tables.append(fit_t)
    if sw.spin_fitted is not None:
        st = Table("spin", ["component", "expected", "fitted", "residual", "tol", "pass"])
        scale = float(np.max(np.abs(sw.spin_expected)))
        for i, j in zip(*iu):
            res = sw.spin_fitted[i, j] - sw.spin_expected[i, j]
            st.add(f"{i}{j}", sw.spin_expected[i, j], sw.spin_fitted[i, j], res, _tol(sc, "spin"),
                   abs(res) <= _tol(sc, "spin") * scale)
        rep.tables.append(st)
    rep.checks.extend(ck.sweep_checks(sw, expected, tol, _tol(sc, "spin")))


def _initial_state(sc) -> mo.MotionState:
    if sc["simulate.start"] == "trajectory":
        return mo.MotionState.from_kinematic(worldline(sc).state(sc["simulate.start_tau"]))
    acc = np.concatenate([[0.0], sc["simulate.rest_acceleration"]])
    return mo.MotionState.at_rest(sc["simulate.start_tau"], a=acc)


def _force(sc):
    vec = sc["simulate.force_vector"]
    return {"none": lambda: None, "lab": lambda: mo.lab_constant_force(vec),
            "covariant": lambda: mo.covariant_constant_force(vec)}[sc["simulate.force"]]()


def _kinematic(s: mo.MotionState) -> bal.KinematicState:
    return KinematicState(s.tau, s.z, s.u, s.a, s.adot, s.addot, np.zeros(6))


def task_simulate(sc, rep: Report) -> None:
    c, e = constants(sc), sc["charge.e"]
    s0 = _initial_state(sc)
    t0, t_end, dt = s0.tau, sc["simulate.tau_end"], sc["simulate.output_step"]
    n_out = int(np.floor((t_end - t0) / dt + 1e-9))
    outputs = [t0 + k * dt for k in range(1, n_out + 1) if t0 + k * dt < t_end]
    bound = sc["simulate.drift_bound"]
    try:
        traj = mo.integrate_motion(s0, c, e, _force(sc), t_end, sc["simulate.rtol"], sc["simulate.atol"],
                                   output_times=outputs, drift_bound=bound)
    except mo.ConstraintDriftError as exc:
        raise NumericFailure(str(exc)) from None
    wanted = set([t0, *outputs, t_end])
    cols = (["tau"] + [f"z{i}" for i in range(6)] + [f"u{i}" for i in range(6)] + [f"a{i}" for i in range(6)]
            + ["drift", "drift_bound", "pass"] + [f"p{i}" for i in range(6)] + ["s2"])
    t = Table("trajectory", cols)
    for s, d in zip(traj.states, traj.drifts):
        if s.tau not in wanted:
            continue
        ks = _kinematic(s)
        p = bal.particle_momentum(ks, c, e)
        s2 = bal.spin_magnitude(ks, c, e)[0]
        t.add(s.tau, *s.z, *s.u, *s.a, d, bound, d <= bound, *p, s2)
    rep.tables.append(t)
    rep.checks.append(ck.Check("simulate", "max_drift", traj.max_drift, bound))
    rep.checks.append(ck.Check("simulate", "reached_end", 0.0 if traj.states[-1].tau == t_end else 1.0, 0.5))
    expect = sc["simulate.expect"]
    tol = sc["simulate.expect_tol"]
    if expect == "constant_force":
        rep.checks.extend(_constant_force_checks(sc, traj, c, tol))
    elif expect == "uniform":
        dev = float(np.max(np.abs(traj.array("a"))))
        line = traj.array("z") - (s0.z + np.outer(traj.taus - t0, s0.u))
        rep.checks.append(ck.Check("simulate", "uniform_acceleration", dev, tol))
        rep.checks.append(ck.Check("simulate", "uniform_position", float(np.max(np.abs(line))), tol))
    elif expect == "runaway":
        predicted, fitted = runaway_growth(traj, outputs, c, e)
        rep.checks.append(ck.Check("simulate", "runaway_growth_rate", fitted.real, tol * abs(predicted.real),
                                   predicted.real))
        rep.checks.append(ck.Check("simulate", "runaway_frequency", abs(fitted.imag), tol * max(abs(predicted.imag), 1.0),
                                   abs(predicted.imag)))
        # with no external force the mechanical energy still changes
        energy = [bal.particle_momentum(_kinematic(s), c, e)[0] for s in (traj.states[0], traj.states[-1])]
        rep.checks.append(ck.Check("simulate", "mechanical_energy_changes", float(abs(energy[1] - energy[0]) <= 1e-12), 0.5))


def runaway_growth(traj: mo.Trajectory, outputs, c, e) -> tuple[complex, complex]:
    """Dominant predicted runaway exponent and the nearest exponent fitted to the run.

    The fit uses the transverse acceleration at the evenly spaced output rows.
    """
    wanted = set(outputs)
    rows = [s for s in traj.states if s.tau in wanted]
    acc = np.array([s.a[1:] for s in rows])
    live = np.max(np.abs(acc), axis=0) > 0.0
    fitted = mo.fitted_rates([s.tau for s in rows], acc[:, live])
    predicted = mo.runaway_rates(c, e)
    dominant = predicted[np.argmax(predicted.real)]
    return complex(dominant), complex(fitted[np.argmin(np.abs(fitted - dominant))])


def _constant_force_checks(sc, traj, c, tol):
    f = np.asarray(sc["simulate.force_vector"], dtype=float)
    fmag = float(np.linalg.norm(f))
    if sc["simulate.force"] != "lab" or fmag == 0.0:
        raise cfg.ConfigError("expect = constant_force needs force = lab with a nonzero force_vector")
    g = fmag / c.m
    fhat = f / fmag
    tau = traj.taus - traj.taus[0]
    z = traj.array("z") - traj.states[0].z
    along = z[:, 1:] @ fhat
    checks = [
        ck.Check("simulate", "constant_force_position", float(np.max(np.abs(along - (np.cosh(g * tau) - 1) / g))), tol),
        ck.Check("simulate", "constant_force_time", float(np.max(np.abs(z[:, 0] - np.sinh(g * tau) / g))), tol),
        ck.Check("simulate", "constant_force_lab_time",
                 float(np.max(np.abs(along - (np.sqrt(1 + (g * z[:, 0]) ** 2) - 1) / g))), tol),
    ]
    return checks


def task_fields(sc, rep: Report) -> None:
    w, e = worldline(sc), sc["charge.e"]
    samples = []
    field_checks = _field_checks(sc, w, e, samples)
    tol = _tol(sc, "order")
    t = Table("field_samples", ["sample", "tau_ret", "r", "field_order", "gauge_order", "wave_order", "tol", "pass"])
    for i, (tau, r, o) in enumerate(samples):
        ok = all(abs(o[k] - 4.0) <= tol for k in ("field", "gauge", "wave"))
        t.add(i, tau, r, o["field"], o["gauge"], o["wave"], tol, ok)
    rep.tables.append(t)
    rep.checks.extend(field_checks)
    rep.checks.extend(_stress_checks(sc, w, e))


TASKS = {"verify": task_verify, "flux": task_flux, "sweep": task_sweep, "simulate": task_simulate,
         "fields": task_fields}


def run_scenario(sc: cfg.Scenario, task: str, timings: bool = False) -> Report:
    meta = {
        "name": sc["scenario.name"],
        "versions": f"lw6 {__version__}, numpy {np.__version__}, scipy {scipy.__version__}",
        "kernel_backend": kernels.BACKEND,
        "quick": sc.quick,
        "scenario": sc.echo(),
    }
    rep = Report(task, meta)
    start = time.perf_counter()
    TASKS[task](sc, rep)
    if timings:
        rep.meta["seconds"] = round(time.perf_counter() - start, 3)
    return rep


def _parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="lw6", description="Retarded-field fluxes and particle balance in six dimensions.")
    p.add_argument("--help-config", action="store_true", help="describe every configuration key and exit")
    p.add_argument("-v", "--verbose", action="store_true", help="log progress to stderr")
    sub = p.add_subparsers(dest="command")
    for name in (*TASKS, "run"):
        s = sub.add_parser(name, help="run the scenario's own task" if name == "run" else f"run the {name} task")
        s.add_argument("--config", help="scenario file (INI)")
        s.add_argument("--set", action="append", default=[], metavar="SECTION.KEY=VALUE", help="override a key")
        s.add_argument("--format", choices=sorted(FORMATS), default="human")
        s.add_argument("--out", help="write the report here instead of stdout")
        s.add_argument("--quick", action="store_true", help="reduced effort for smoke runs")
        s.add_argument("--timings", action="store_true", help="add wall-clock seconds to the metadata")
    return p


def main(argv=None) -> int:
    args = _parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, stream=sys.stderr,
                        format="%(levelname)s %(name)s: %(message)s")
    if args.help_config:
        print(cfg.describe())
        print(CSV_COLUMNS)
        return EXIT_OK
    if not args.command:
        _parser().print_usage(sys.stderr)
        return EXIT_CONFIG
    try:
        text = ""
        if args.config:
            with open(args.config, encoding="utf-8") as fh:
                text = fh.read()
        sc = cfg.load(text, args.set, args.quick)
        task = sc["scenario.task"] if args.command == "run" else args.command
        rep = run_scenario(sc, task, args.timings)
    except (cfg.ConfigError, OSError, QuadratureError) as exc:
        print(f"lw6: configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (fx.ConvergenceError, mo.StepCollapseError, RetardedTimeError) as exc:
        print(f"lw6: did not converge: {exc}", file=sys.stderr)
        return EXIT_CONVERGENCE
    except NumericFailure as exc:
        print(f"lw6: numerical check failed: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    data = emit_report(rep, args.format)
    if args.out:
        with open(args.out, "wb") as fh:
            fh.write(data)
    else:
        sys.stdout.buffer.write(data)
        sys.stdout.flush()
    for c in rep.checks:
        if not c.passed:
            log.warning("check failed: %s/%s = %.3e (tol %.1e)", c.suite, c.name, c.value, c.tol)
    return EXIT_OK if rep.passed else EXIT_NUMERIC


if __name__ == "__main__":
    sys.exit(main())

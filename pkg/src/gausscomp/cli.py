"""Command-line interface: ``gausscomp {stats,bound,sample,verify,experiment}``.

Exit status is 0 on success, 1 when a verdict fails and 2 on usage errors.
"""

from __future__ import annotations

import argparse
import io
import json
import math
import sys
import time
from pathlib import Path

import numpy as np

from . import applications as ap
from . import bounds as bd
from . import ensembles as en
from . import gaussian as gm
from . import montecarlo as mc
from . import tracemgf as tm
from .core import RectMatrix, SymMatrix, dilate
from .rng import trial_generator

GLOBAL_DEFAULTS = {
    "seed": 0,
    "workers": 1,
    "trials": None,
    "format": "json",
    "tolerance": 1e-4,
    "no_timestamp": False,
    "config": None,
}


class UsageError(Exception):
    pass


# ---------------------------------------------------------------------- helpers


def _to_builtin(obj):
    if isinstance(obj, dict):
        return {str(k): _to_builtin(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_to_builtin(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return _to_builtin(obj.tolist())
    if isinstance(obj, (np.bool_, bool)):
        return bool(obj)
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (np.floating, float)):
        x = float(obj)
        return x if math.isfinite(x) else str(x)
    return obj


def _emit(obj, args, out):
    obj = _to_builtin(obj)
    if not args.no_timestamp:
        obj = {**obj, "generated_at": time.strftime("%Y-%m-%dT%H:%M:%SZ", time.gmtime())}
    text = json.dumps(obj, indent=2, sort_keys=True)
    out.write(text + "\n")
    return text


def _emit_csv(values, out):
    buf = io.StringIO()
    buf.write("trial,value\n")
    for i, v in enumerate(values):
        buf.write(f"{i},{float(v):.17g}\n")
    out.write(buf.getvalue())


def _trials(args, default):
    return int(args.trials) if args.trials is not None else default


def _cfg(args, default_trials, statistic="lambda_max"):
    return mc.MCConfig(trials=_trials(args, default_trials), seed=int(args.seed),
                       workers=int(args.workers), statistic=statistic)


def _need(args, *names):
    missing = [n for n in names if getattr(args, n, None) is None]
    if missing:
        raise UsageError("missing required option(s): " + ", ".join("--" + m.replace("_", "-")
                                                                     for m in missing))


ENSEMBLES = ("wigner", "covariance", "rect", "graph", "graph-perp", "pauli")


def _build_ensemble(name, args):
    if name == "wigner":
        _need(args, "dim")
        return en.wigner_rademacher(args.dim)
    if name == "covariance":
        _need(args, "dim", "n")
        return en.rademacher_covariance(args.dim, args.n)
    if name == "rect":
        _need(args, "rows", "cols")
        return en.rademacher_rect(args.rows, args.cols)
    if name in ("graph", "graph-perp"):
        _need(args, "n", "degree")
        ens = en.permutation_graph(args.n, args.degree)
        return ens.compressed if name == "graph-perp" else ens
    if name == "pauli":
        _need(args, "n_qubits", "k")
        return en.pauli_model(args.n_qubits, args.k)
    raise UsageError(f"unknown ensemble {name!r}")


def _build_model(name, args):
    if name == "goe":
        _need(args, "dim")
        return gm.goe(args.dim)
    if name == "gue":
        _need(args, "dim")
        return gm.gue(args.dim)
    if name == "offdiag":
        _need(args, "dim")
        return gm.offdiag_wigner(args.dim)
    if name == "iid-rect":
        _need(args, "rows", "cols")
        return gm.iid_rect(args.rows, args.cols)
    ens = _build_ensemble(name, args)
    if ens.bound_proxy is None:
        raise UsageError(f"ensemble {name!r} has no Gaussian proxy")
    return ens.bound_proxy


# ---------------------------------------------------------------------- commands


def cmd_stats(args, out):
    model = _build_model(args.model, args)
    mc_trials = args.mc_trials if args.mc_trials is not None else 0
    st = gm.gaussian_stats(model, mc_trials, np.random.default_rng(args.seed))
    upper, pm_upper, pm_lower = gm.khinchin_bounds(model)
    obj = {
        "model": args.model,
        "dim": model.dim,
        "stats": st.to_json(),
        "khinchin": {"phi_upper_eig": upper, "phi_pm_upper": pm_upper, "phi_pm_lower": pm_lower},
    }
    if model.is_rect:
        obj["rect_shape"] = list(model.rect_shape)
    _emit(obj, args, out)
    return 0


def _inputs_from_ensemble(kind, args):
    ens = _build_ensemble(args.from_ensemble, args)
    model = ens.bound_proxy
    trials = args.mc_trials if args.mc_trials is not None else 200
    wv = gm.weak_variance(model)
    rng = np.random.default_rng(args.seed)
    fkind = "norm" if kind == "norm" else "eig"
    phi, _ = gm.fluctuation_mc(model, trials, rng, fkind)
    lam = np.linalg.eigvalsh(model.mean)
    if kind == "norm":
        mu, r, d = phi + float(np.abs(lam).max()), ens.r_pm, model.dim
        if not model.is_rect:
            d = 2 * model.dim
    elif kind in ("mineig", "psd-iid"):
        mu, r, d = float(lam[0]) - phi, ens.r_minus, model.dim
    else:
        mu, r, d = float(lam[-1]) + phi, ens.r_plus, model.dim
    if r is None:
        raise UsageError(f"ensemble {args.from_ensemble!r} declares no summand bound for {kind}")
    prov = {"mu": "mc", "phi": "mc", "sigma_star2": wv.exactness, "r": "closed_form"}
    inp = bd.BoundInputs(d, mu, phi, wv.value, r, args.s, provenance=prov)
    return inp, gm.matrix_variance(model)


def cmd_bound(args, out):
    kind = args.kind
    if args.from_ensemble:
        inp, sigma2 = _inputs_from_ensemble(kind, args)
        if args.sigma2 is not None:
            sigma2 = args.sigma2
    else:
        if kind == "bernstein":
            _need(args, "d", "sigma2", "r")
            mu = args.mu if args.mu is not None else 0.0
            inp = bd.BoundInputs(args.d, mu, 0.0, 0.0, args.r, provenance={"mu": "user"})
        elif kind == "psd-iid":
            _need(args, "d", "mu", "sigma_star2")
            inp = bd.BoundInputs(args.d, args.mu, 0.0, args.sigma_star2, 0.0, args.s,
                                 provenance={"mu": "user", "sigma_star2": "user"})
        else:
            _need(args, "d", "mu", "phi", "sigma_star2", "r")
            inp = bd.BoundInputs(args.d, args.mu, args.phi, args.sigma_star2, args.r, args.s,
                                 provenance={k: "user" for k in ("mu", "phi", "sigma_star2", "r")})
        sigma2 = args.sigma2
    if args.p is not None:
        if kind == "bernstein":
            raise UsageError("--p is not available for the Bernstein baseline")
        s, _ = bd.invert_tail(args.p, kind, inp)
        inp = inp.with_s(s)
    report = bd.evaluate(kind, inp, sigma2=sigma2)
    _emit(report.to_json(), args, out)
    return 0


def cmd_sample(args, out):
    trials = _trials(args, 1)
    rng_for = lambda i: trial_generator(args.seed, i)  # noqa: E731
    name = args.ensemble
    if name in ("countsketch", "sparsestack"):
        _need(args, "b", "n")
        zeta = args.zeta if name == "sparsestack" else 1
        if zeta is None:
            raise UsageError("missing required option(s): --zeta")
        draws = [en.sparsestack(args.b, zeta, args.n, rng_for(i), args.field).to_json()
                 for i in range(trials)]
        _emit({"ensemble": name, "samples": draws}, args, out)
        return 0
    if name in ("goe", "gue", "offdiag", "iid-rect"):
        model = _build_model(name, args)
        draw = model.sample_rect if model.is_rect else model.sample
        stat_fn = None
        samples = [draw(rng_for(i)) for i in range(trials)]
    else:
        ens = _build_ensemble(name, args)
        samples = [ens.sample(rng_for(i)) for i in range(trials)]
        stat_fn = ens.statistic
    if args.format == "csv":
        stat = args.statistic
        vals = []
        for y in samples:
            if stat_fn is not None:
                vals.append(stat_fn(y, stat))
            else:
                y = np.asarray(y)
                if y.shape[0] != y.shape[1] or stat == "norm":
                    vals.append(np.linalg.norm(y, 2))
                else:
                    ev = np.linalg.eigvalsh(y)
                    vals.append({"lambda_max": ev[-1], "lambda_min": ev[0],
                                 "lambda_2": ev[-2]}[stat])
        _emit_csv(vals, out)
        return 0
    enc = []
    for y in samples:
        y = np.asarray(y)
        enc.append(RectMatrix(y).to_json() if y.shape[0] != y.shape[1] else SymMatrix(y).to_json())
    _emit({"ensemble": name, "samples": enc}, args, out)
    return 0


def _random_sym(rng, d):
    a = rng.standard_normal((d, d))
    return (a + a.T) / 2


def cmd_verify(args, out):
    rng = np.random.default_rng(args.seed)
    check = args.check
    if check == "stahl":
        d = args.dim or 4
        pairs = args.pairs
        reports = []
        for _ in range(pairs):
            lf = tm.LineFunction(_random_sym(rng, d), _random_sym(rng, d))
            reports.append(tm.check_stahl_structure(lf, rel_tol=args.tolerance))
        passed = all(r.passed for r in reports)
        _emit({"check": check, "dim": d, "pairs": pairs, "pass": passed,
               "failures": [r.to_json() for r in reports if not r.passed]}, args, out)
        return 0 if passed else 1
    if check == "one-step":
        d = args.dim or 3
        a = _random_sym(rng, d)
        a /= max(np.abs(np.linalg.eigvalsh(a)).max(), 1e-300)

        def summand(g):
            w = np.zeros((d, d))
            w[0, 1] = w[1, 0] = g.choice((-1.0, 1.0))
            return w

        coeff = np.zeros((1, d, d))
        coeff[0, 0, 1] = coeff[0, 1, 0] = 1.0
        proxy = gm.generic(np.zeros((d, d)), coeff)
        rep = tm.check_one_step(a, summand, 1.0, _trials(args, 100000), rng, proxy=proxy)
        _emit({"check": check, **rep.to_json()}, args, out)
        return 0 if rep.passed else 1
    if check == "exchange":
        ens = _build_ensemble(args.ensemble or "wigner", _with_default_dim(args, 3))
        rep = tm.check_exchange(ens, args.theta, _trials(args, 100000), rng)
        _emit({"check": check, **rep.to_json()}, args, out)
        return 0 if rep.passed else 1
    if check == "khinchin":
        trials = _trials(args, 400)
        rows = []
        passed = True
        for name, model in (("goe", gm.goe(args.dim or 64)), ("gue", gm.gue(args.dim or 64))):
            est, se = gm.fluctuation_mc(model, trials, rng, "norm")
            _, hi, lo = gm.khinchin_bounds(model)
            ok = lo - 3 * se <= est <= hi + 3 * se
            passed &= ok
            rows.append({"model": name, "phi_pm": est, "stderr": se, "lower": lo, "upper": hi,
                         "pass": ok})
        _emit({"check": check, "results": rows, "pass": passed}, args, out)
        return 0 if passed else 1
    if check == "proxy-match":
        ens = _build_ensemble(args.ensemble or "wigner", _with_default_dim(args, 6))
        trials = _trials(args, 5000)
        ys = np.array([np.asarray(ens.sample(trial_generator(args.seed, i)))
                       for i in range(trials)])
        if ens.is_rect:
            ys = np.array([dilate(y) for y in ys])
        rows, passed = [], True
        for _ in range(10):
            m = _random_sym(rng, ens.dim)
            ips = np.einsum("tij,ij->t", ys.conj(), m).real
            emp = float(ips.var(ddof=1))
            # stderr of a sample variance
            se = float(np.sqrt(max(np.var((ips - ips.mean()) ** 2, ddof=1), 0) / trials))
            ana = gm.variance(ens.proxy, m)
            ok = abs(emp - ana) <= 5 * se + 1e-12 * max(ana, 1)
            passed &= ok
            rows.append({"empirical": emp, "analytic": ana, "stderr": se, "pass": ok})
        _emit({"check": check, "ensemble": ens.kind, "probes": rows, "pass": passed}, args, out)
        return 0 if passed else 1
    raise UsageError(f"unknown check {check!r}")


def _with_default_dim(args, d):
    if getattr(args, "dim", None) is None:
        args.dim = d
    return args


_EXPERIMENT_PARAMS = ("d", "n", "alpha", "p", "degree", "n_qubits", "k", "eps", "beta",
                      "subspace", "vectors", "zeta", "b", "proxy_trials")


def cmd_experiment(args, out):
    overrides = dict(args.params or {})
    for key in _EXPERIMENT_PARAMS:
        val = getattr(args, "x_" + key, None)
        if val is not None:
            overrides[key] = val
    default_trials = ap.EXPERIMENTS[args.name][1] if args.name in ap.EXPERIMENTS else 1
    cfg = _cfg(args, default_trials)
    report = ap.run_experiment(args.name, overrides, cfg)
    if args.keep_trials is not None:
        outdir = Path(args.keep_trials)
        outdir.mkdir(parents=True, exist_ok=True)
        for key, res in report.mc_results.items():
            mc.write_trials_csv(outdir / f"{args.name}_{key}.csv", res.values)
    if args.format == "csv":
        first = next(iter(report.mc_results.values()))
        _emit_csv(first.values, out)
    else:
        obj = {**report.to_json(), "trials": cfg.trials}
        if args.out:
            with open(args.out, "w") as fh:
                _emit(obj, args, fh)
            summary = {"name": report.name, "ok": report.ok, "out": args.out,
                       "verdicts": {k: v.verdict for k, v in report.verdicts.items()}}
            _emit(summary, args, out)
        else:
            _emit(obj, args, out)
    return 0 if report.ok else 1


# ---------------------------------------------------------------------- parser


def _common_parent():
    p = argparse.ArgumentParser(add_help=False)
    g = p.add_argument_group("global options")
    S = argparse.SUPPRESS
    g.add_argument("--seed", type=int, default=S, help="base random seed (default 0)")
    g.add_argument("--workers", type=int, default=S, help="worker threads (default 1)")
    g.add_argument("--trials", type=int, default=S, help="Monte-Carlo trials")
    g.add_argument("--format", choices=("json", "csv"), default=S, help="output format")
    g.add_argument("--tolerance", type=float, default=S, help="relative tolerance for checks")
    g.add_argument("--no-timestamp", action="store_true", default=S,
                   help="omit the generation timestamp from reports")
    g.add_argument("--config", default=S, help="JSON file with option defaults")
    return p


def _kv(text):
    if "=" not in text:
        raise argparse.ArgumentTypeError("expected KEY=VALUE")
    k, v = text.split("=", 1)
    try:
        v = json.loads(v)
    except json.JSONDecodeError:
        pass
    return k, v


def build_parser() -> argparse.ArgumentParser:
    common = _common_parent()
    parser = argparse.ArgumentParser(
        prog="gausscomp", parents=[common],
        description="Gaussian-comparison matrix concentration bounds and Monte-Carlo checks.")
    sub = parser.add_subparsers(dest="command", required=True)

    def dims(p):
        p.add_argument("--dim", type=int)
        p.add_argument("--rows", type=int)
        p.add_argument("--cols", type=int)
        p.add_argument("--n", type=int)
        p.add_argument("--degree", type=int)
        p.add_argument("--n-qubits", type=int, dest="n_qubits")
        p.add_argument("--k", type=int)

    p = sub.add_parser("stats", parents=[common], help="statistics of a Gaussian model or proxy")
    p.add_argument("model", choices=("goe", "gue", "offdiag", "iid-rect") + ENSEMBLES)
    dims(p)
    p.add_argument("--mc-trials", type=int, dest="mc_trials")
    p.set_defaults(func=cmd_stats)

    p = sub.add_parser("bound", parents=[common], help="evaluate a comparison bound")
    p.add_argument("kind", choices=("maxeig", "mineig", "norm", "psd-iid", "bernstein"))
    p.add_argument("--d", type=int, help="dimension (d1 + d2 for norms)")
    p.add_argument("--mu", type=float)
    p.add_argument("--phi", type=float)
    p.add_argument("--sigma-star2", type=float, dest="sigma_star2")
    p.add_argument("--sigma2", type=float)
    p.add_argument("--r", type=float, help="summand bound R+, R- or R+-")
    p.add_argument("--s", type=float, help="tail parameter; omit for the expectation bound")
    p.add_argument("--p", type=float, help="target failure probability (sets s)")
    p.add_argument("--from-ensemble", choices=ENSEMBLES, dest="from_ensemble")
    p.add_argument("--mc-trials", type=int, dest="mc_trials")
    dims(p)
    p.set_defaults(func=cmd_bound)

    p = sub.add_parser("sample", parents=[common], help="draw realizations")
    p.add_argument("ensemble", choices=ENSEMBLES + ("goe", "gue", "offdiag", "iid-rect",
                                                    "countsketch", "sparsestack"))
    dims(p)
    p.add_argument("--b", type=int)
    p.add_argument("--zeta", type=int)
    p.add_argument("--field", choices=("complex", "real"), default="complex")
    p.add_argument("--statistic", choices=mc.STATISTICS, default="lambda_max",
                   help="per-trial statistic written in CSV mode")
    p.set_defaults(func=cmd_sample)

    p = sub.add_parser("verify", parents=[common], help="run a numerical diagnostic")
    p.add_argument("check", choices=("stahl", "one-step", "exchange", "khinchin", "proxy-match"))
    dims(p)
    p.add_argument("--ensemble", choices=ENSEMBLES)
    p.add_argument("--theta", type=float, default=0.5)
    p.add_argument("--pairs", type=int, default=20)
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("experiment", parents=[common], help="run a named experiment")
    p.add_argument("name", choices=sorted(ap.EXPERIMENTS))
    p.add_argument("--out", help="write the full JSON report here")
    p.add_argument("--keep-trials", nargs="?", const=".", default=None, dest="keep_trials",
                   metavar="DIR", help="write per-trial CSV files into DIR")
    p.add_argument("--param", type=_kv, action="append", dest="param_list", default=[],
                   metavar="KEY=VALUE", help="override any experiment parameter")
    for key, typ in (("d", int), ("n", int), ("alpha", float), ("p", float), ("degree", int),
                     ("n-qubits", int), ("k", int), ("eps", float), ("beta", float),
                     ("subspace", str), ("vectors", str), ("zeta", int), ("b", int),
                     ("proxy-trials", int)):
        p.add_argument("--" + key, type=typ, dest="x_" + key.replace("-", "_"))
    p.set_defaults(func=cmd_experiment)
    return parser


def _resolve(args):
    """Apply config-file values and defaults to options not given on the command line."""
    config = {}
    path = getattr(args, "config", None)
    if path:
        with open(path) as fh:
            config = json.load(fh)
        if not isinstance(config, dict):
            raise UsageError("config file must hold a JSON object")
    for key, default in GLOBAL_DEFAULTS.items():
        if not hasattr(args, key):
            setattr(args, key, config.get(key.replace("_", "-"), config.get(key, default)))
    for key, val in config.items():
        dest = key.replace("-", "_")
        if dest in GLOBAL_DEFAULTS or dest == "params":
            continue
        if getattr(args, dest, None) is None and hasattr(args, dest):
            setattr(args, dest, val)
        elif hasattr(args, "x_" + dest) and getattr(args, "x_" + dest) is None:
            setattr(args, "x_" + dest, val)
    if hasattr(args, "param_list"):
        args.params = {**config.get("params", {}), **dict(args.param_list)}
    return args


def main(argv=None, out=None) -> int:
    out = out or sys.stdout
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        args = _resolve(args)
        return args.func(args, out)
    except (UsageError, ValueError, OSError, json.JSONDecodeError) as exc:
        print(f"gausscomp: error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())

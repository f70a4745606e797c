"""Command-line surface: fit / dof / select / simulate / eval.

All commands read row-per-observation numeric CSVs and write versioned JSON
reports (plus flat CSV tables where plotting data is useful). The seed comes
from --seed, falling back to the RRDOF_SEED environment variable, then 0.
"""

from __future__ import annotations

import argparse
import os
import sys
from dataclasses import asdict

import numpy as np

from . import dof as dof_mod
from .estimators import adaptive, coef_matrix, fit_ols, fit_rrr, fit_shrunk, hard, soft
from .exceptions import RrdofError
from .pipeline import eval_splits, ingest_csv, write_matrix_csv, write_report
from .selection import Criterion, select_rank
from .simbench import PRESETS, run_dof_study, run_pred_study


def _seed_from(args) -> int:
    if args.seed is not None:
        return args.seed
    env = os.environ.get("RRDOF_SEED")
    return int(env) if env else 0


def _load_xy(args):
    x = ingest_csv(args.x, header=args.header, log_transform=args.log,
                   standardize=args.standardize)
    y = ingest_csv(args.y, header=args.header, log_transform=args.log,
                   standardize=args.standardize)
    return x, y


def _rule_from(args, d1: float):
    if args.rank is not None:
        return hard(args.rank)
    if args.soft is not None:
        return soft(args.soft)
    if args.adaptive is not None:
        return adaptive(args.adaptive, gamma=args.gamma)
    return None


def _add_data_flags(sp):
    sp.add_argument("--x", required=True, help="design matrix CSV")
    sp.add_argument("--y", required=True, help="response matrix CSV")
    sp.add_argument("--header", action="store_true", help="skip a header row")
    sp.add_argument("--log", action="store_true", help="log-transform the data")
    sp.add_argument("--standardize", action="store_true", help="z-score each column")


def _add_rule_flags(sp):
    sp.add_argument("--rank", type=int, help="hard rank truncation")
    sp.add_argument("--soft", type=float, help="soft-threshold penalty")
    sp.add_argument("--adaptive", type=float, help="adaptive-threshold penalty")
    sp.add_argument("--gamma", type=float, default=2.0, help="adaptive power (default 2)")


def cmd_fit(args) -> int:
    x, y = _load_xy(args)
    ls = fit_ols(x, y)
    rule = _rule_from(args, float(ls.d[0]) if ls.d.size else 0.0)
    fm = fit_shrunk(ls, rule) if rule is not None else fit_rrr(ls, ls.r_bar)
    b = coef_matrix(fm)
    payload = {
        "n": int(x.shape[0]), "p": int(x.shape[1]), "q": int(y.shape[1]),
        "r_x": int(ls.gram.r_x), "r_bar": int(ls.r_bar),
        "rank_fitted": int(fm.r_tilde),
        "singular_values": [float(v) for v in ls.d],
        "shrunk_singular_values": [float(v) for v in fm.d_tilde],
        "rss": float(np.sum((y - fm.y_fit) ** 2)),
    }
    write_report(args.output, "fit", payload, seed=_seed_from(args))
    if args.coef_out:
        write_matrix_csv(args.coef_out, b)
    return 0


def cmd_dof(args) -> int:
    x, y = _load_xy(args)
    seed = _seed_from(args)
    ls = fit_ols(x, y)
    r_x, q = ls.gram.r_x, y.shape[1]
    rule = _rule_from(args, float(ls.d[0]))
    method = args.method
    if method in ("exact", "naive", "fd") and rule is None:
        raise RrdofError(f"--method {method} needs --rank, --soft, or --adaptive")

    if method == "naive":
        if args.rank is None:
            raise RrdofError("--method naive requires --rank")
        est = dof_mod.DofEstimate(value=dof_mod.naive_df(r_x, q, args.rank), method="naive")
    elif method == "exact":
        s, sp = rule.weights(ls.d)
        est = dof_mod.exact_df_shrunk(ls.d, r_x, q, s, sp)
    elif method == "fd":
        est = dof_mod.divergence_fd(ls.hf.h, rule)
    elif method == "mc":
        if args.sigma2 is None:
            raise RrdofError("--method mc requires --sigma2")
        fitter = _fitter_from(args, x)
        est = dof_mod.mc_df(x, ls.y_hat, args.sigma2, fitter, reps=args.reps, seed=seed)
    elif method == "perturb":
        tau = args.tau if args.tau is not None else 0.1 * _sigma_hat(ls)
        fitter = _fitter_from(args, x)
        est = dof_mod.perturbation_df(x, y, fitter, n_pert=args.reps, tau=tau, seed=seed)
    else:  # pragma: no cover - argparse restricts choices
        raise RrdofError(f"unknown method {method}")
    payload = asdict(est)
    write_report(args.output, "dof", payload, seed=seed)
    return 0


def _sigma_hat(ls) -> float:
    n, q = ls.y.shape
    dof_resid = max(n * q - ls.gram.r_x * q, 1)
    return float(np.sqrt(np.sum((ls.y - ls.y_hat) ** 2) / dof_resid))


def _fitter_from(args, x):
    rank = args.rank
    lam_soft, lam_adaptive, gamma = args.soft, args.adaptive, args.gamma

    def fitter(y_draw):
        ls = fit_ols(x, y_draw)
        if rank is not None:
            return fit_rrr(ls, min(rank, ls.r_bar)).y_fit
        if lam_soft is not None:
            return fit_shrunk(ls, soft(lam_soft)).y_fit
        if lam_adaptive is not None:
            return fit_shrunk(ls, adaptive(lam_adaptive, gamma)).y_fit
        return ls.y_hat

    return fitter


def _criterion_from(args) -> Criterion:
    return Criterion(kind=args.criterion, df_mode=args.df, sigma2=args.sigma2)


def cmd_select(args) -> int:
    x, y = _load_xy(args)
    ls = fit_ols(x, y)
    report = select_rank(ls, _criterion_from(args))
    payload = {
        "criterion": args.criterion,
        "df_mode": args.df,
        "candidates": report.candidates,
        "scores": report.scores,
        "df_used": [e.value for e in report.df_used],
        "residual_ss": report.residual_ss,
        "chosen": report.chosen,
    }
    write_report(args.output, "select", payload, seed=_seed_from(args))
    return 0


def cmd_simulate(args) -> int:
    from dataclasses import replace

    cfg = PRESETS[args.preset]
    overrides = {"seed": _seed_from(args)}
    if args.reps is not None:
        overrides["reps"] = args.reps
    cfg = replace(cfg, **overrides)
    if args.study == "dof":
        res = run_dof_study(cfg)
        payload = {
            "preset": args.preset,
            "config": asdict(cfg),
            "ranks": res.ranks,
            "naive": res.naive,
            "exact_mean": res.exact_mean,
            "exact_se": res.exact_se,
            "perturb_mean": res.perturb_mean,
            "perturb_se": res.perturb_se,
            "mc_value": [e.value for e in res.mc],
            "mc_se": [e.std_error for e in res.mc],
        }
        if args.table_out:
            rows = np.column_stack([res.ranks, res.naive, res.exact_mean, res.exact_se,
                                    res.perturb_mean, res.perturb_se,
                                    [e.value for e in res.mc], [e.std_error for e in res.mc]])
            write_matrix_csv(args.table_out, rows)
    else:
        res = run_pred_study(cfg)
        payload = {
            "preset": args.preset,
            "config": asdict(cfg),
            "summary": res.summary(),
            "per_replication": {
                "est_exact": res.est_exact, "est_naive": res.est_naive,
                "pred_exact": res.pred_exact, "pred_naive": res.pred_naive,
                "rank_exact": res.rank_exact, "rank_naive": res.rank_naive,
                "prg": res.prg, "snr": res.snr,
            },
        }
        if args.table_out:
            rows = np.column_stack([res.pred_exact, res.pred_naive,
                                    res.rank_exact, res.rank_naive, res.prg])
            write_matrix_csv(args.table_out, rows)
    write_report(args.output, f"simulate_{args.study}", payload, seed=cfg.seed)
    return 0


def cmd_eval(args) -> int:
    x, y = _load_xy(args)
    seed = _seed_from(args)
    criteria = {}
    for kind in args.criterion:
        for mode in args.df:
            sigma2 = args.sigma2 if kind == "cp" else None
            criteria[f"{kind}_{mode}"] = Criterion(kind=kind, df_mode=mode, sigma2=sigma2)
    report = eval_splits(
        x, y, criteria,
        n_splits=args.splits,
        split_fraction=args.split_fraction,
        seed=seed,
        jobs=args.jobs,
    )
    write_report(args.output, "eval", report.to_payload(), seed=seed)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="rrdof",
        description="Reduced-rank regression with exact degrees of freedom",
    )
    parser.add_argument("--seed", type=int, default=None,
                        help="PRNG seed (falls back to RRDOF_SEED, then 0)")
    sub = parser.add_subparsers(dest="command", required=True)

    sp = sub.add_parser("fit", help="fit a reduced-rank or shrinkage estimator")
    _add_data_flags(sp)
    _add_rule_flags(sp)
    sp.add_argument("--output", required=True, help="JSON report path")
    sp.add_argument("--coef-out", help="optional CSV path for the coefficient matrix")
    sp.set_defaults(func=cmd_fit)

    sp = sub.add_parser("dof", help="estimate effective degrees of freedom")
    _add_data_flags(sp)
    _add_rule_flags(sp)
    sp.add_argument("--method", required=True,
                    choices=["exact", "naive", "mc", "perturb", "fd"])
    sp.add_argument("--sigma2", type=float, help="error variance (mc)")
    sp.add_argument("--tau", type=float, help="perturbation size (default 0.1*sigma_hat)")
    sp.add_argument("--reps", type=int, default=100,
                    help="replications / perturbations for stochastic methods")
    sp.add_argument("--output", required=True)
    sp.set_defaults(func=cmd_dof)

    sp = sub.add_parser("select", help="select a rank by Cp, GCV, or BIC")
    _add_data_flags(sp)
    sp.add_argument("--criterion", required=True, choices=["gcv", "cp", "bic"])
    sp.add_argument("--df", default="exact", choices=["exact", "naive"])
    sp.add_argument("--sigma2", type=float, help="error variance (required for cp)")
    sp.add_argument("--output", required=True)
    sp.set_defaults(func=cmd_select)

    sp = sub.add_parser("simulate", help="run a named simulation study")
    sp.add_argument("--preset", required=True, choices=sorted(PRESETS))
    sp.add_argument("--study", default="dof", choices=["dof", "pred"])
    sp.add_argument("--reps", type=int, help="override the preset replication count")
    sp.add_argument("--output", required=True)
    sp.add_argument("--table-out", help="optional flat CSV of the plotting data")
    sp.set_defaults(func=cmd_simulate)

    sp = sub.add_parser("eval", help="train/test split evaluation pipeline")
    _add_data_flags(sp)
    sp.add_argument("--criterion", nargs="+", default=["gcv"],
                    choices=["gcv", "cp", "bic"])
    sp.add_argument("--df", nargs="+", default=["exact"], choices=["exact", "naive"])
    sp.add_argument("--sigma2", type=float, help="error variance (required for cp)")
    sp.add_argument("--splits", type=int, default=100)
    sp.add_argument("--split-fraction", type=float, default=0.5)
    sp.add_argument("--jobs", type=int, default=1, help="worker threads for splits")
    sp.add_argument("--output", required=True)
    sp.set_defaults(func=cmd_eval)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except RrdofError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())

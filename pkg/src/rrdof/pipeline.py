"""CSV ingestion, train/test evaluation pipeline, and report emission.

The evaluation workflow splits (X, Y) into train/test halves, selects a rank
on the training split by a chosen criterion, predicts the held-out responses,
and aggregates MSPE over repeated random splits alongside an OLS baseline.
"""

from __future__ import annotations

import csv
import json
import math
from dataclasses import dataclass

import numpy as np

from .estimators import coef_matrix, fit_ols, fit_rrr
from .exceptions import DomainError, ParseError, SaturationError
from .selection import Criterion, select_rank

#: Version tag carried by every emitted report; field names are part of the
#: external contract.
REPORT_SCHEMA_VERSION = 1

REPORT_SCHEMA = {
    "$schema": "https://json-schema.org/draft/2020-12/schema",
    "type": "object",
    "required": ["schema_version", "kind", "payload"],
    "properties": {
        "schema_version": {"const": REPORT_SCHEMA_VERSION},
        "kind": {"type": "string"},
        "seed": {"type": ["integer", "null"]},
        "payload": {"type": "object"},
    },
}


def ingest_csv(
    path,
    header: bool = False,
    log_transform: bool = False,
    standardize: bool = False,
) -> np.ndarray:
    """Read a rectangular numeric CSV as a matrix (row = observation).

    Optional flags skip a header row, apply a log transform, and z-score each
    column (mean 0, sample sd 1). Missing values are rejected.
    """
    rows: list[list[float]] = []
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        for lineno, record in enumerate(reader, start=1):
            if header and lineno == 1:
                continue
            if not record:
                continue
            parsed = []
            for colno, cell in enumerate(record, start=1):
                cell = cell.strip()
                if cell == "":
                    raise ParseError(f"missing value at row {lineno}, column {colno}")
                try:
                    parsed.append(float(cell))
                except ValueError:
                    raise ParseError(
                        f"non-numeric cell {cell!r} at row {lineno}, column {colno}"
                    ) from None
            if rows and len(parsed) != len(rows[0]):
                raise ParseError(
                    f"ragged row at line {lineno}: expected {len(rows[0])} columns, got {len(parsed)}"
                )
            rows.append(parsed)
    if not rows:
        raise ParseError(f"{path}: empty file")
    m = np.array(rows, dtype=float)
    if log_transform:
        if np.any(m <= 0):
            raise ParseError("log transform requires strictly positive values")
        m = np.log(m)
    if standardize:
        m = (m - m.mean(axis=0)) / m.std(axis=0, ddof=1)
    return m


def write_matrix_csv(path, m: np.ndarray) -> None:
    """Emit a matrix as CSV with enough digits for a bit-exact round trip."""
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        for row in np.atleast_2d(m):
            writer.writerow([repr(float(v)) for v in row])


def write_report(path, kind: str, payload: dict, seed: int | None = None) -> None:
    """Write a versioned JSON report; keys are sorted for determinism."""
    doc = {"schema_version": REPORT_SCHEMA_VERSION, "kind": kind, "seed": seed, "payload": payload}
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(doc, fh, indent=2, sort_keys=True)
        fh.write("\n")


@dataclass
class EvalReport:
    """Per-split MSPE and selected rank for each criterion plus OLS baseline."""

    criteria: list[str]
    mspe: dict[str, list[float]]
    ranks: dict[str, list[int]]
    split_fraction: float
    n_splits: int
    failures: list[dict]

    def summary(self) -> dict:
        out = {}
        for name in self.criteria + ["ols"]:
            vals = np.asarray(self.mspe[name], dtype=float)
            entry = {
                "mean_mspe": float(vals.mean()),
                "std_mspe": float(vals.std(ddof=1)) if vals.size > 1 else 0.0,
            }
            if name != "ols":
                r = np.asarray(self.ranks[name], dtype=float)
                entry["mean_rank"] = float(r.mean())
                entry["std_rank"] = float(r.std(ddof=1)) if r.size > 1 else 0.0
            out[name] = entry
        return out

    def to_payload(self) -> dict:
        return {
            "split_fraction": self.split_fraction,
            "n_splits": self.n_splits,
            "per_split": {"mspe": self.mspe, "ranks": self.ranks},
            "summary": self.summary(),
            "failures": self.failures,
        }


def _mspe(y_test: np.ndarray, y_pred: np.ndarray) -> float:
    # Factor 2 follows the equal-halves convention of the train/test split;
    # normalization is by the test size explicitly so other fractions stay
    # well defined.
    n_test, q = y_test.shape
    return 2.0 * float(np.sum((y_test - y_pred) ** 2)) / (n_test * q)


def _eval_one_split(x, y, criteria, n_train, seed, t):
    rng = np.random.default_rng(np.random.SeedSequence(entropy=int(seed), spawn_key=(3, t)))
    perm = rng.permutation(x.shape[0])
    train, test = perm[:n_train], perm[n_train:]
    x_te, y_te = x[test], y[test]
    ls = fit_ols(x[train], y[train])
    mspe, ranks = {}, {}
    for name, crit in criteria.items():
        rep = select_rank(ls, crit)
        bhat = coef_matrix(fit_rrr(ls, rep.chosen))
        mspe[name] = _mspe(y_te, x_te @ bhat)
        ranks[name] = rep.chosen
    mspe["ols"] = _mspe(y_te, x_te @ coef_matrix(fit_rrr(ls, ls.r_bar)))
    return mspe, ranks


def eval_splits(
    x,
    y,
    criteria: dict[str, Criterion],
    n_splits: int,
    split_fraction: float = 0.5,
    seed: int = 0,
    jobs: int = 1,
) -> EvalReport:
    """Repeated random-split evaluation of selection criteria.

    Each criterion selects a rank on the training half; MSPE is recorded on
    the held-out half, alongside a full-rank OLS baseline. A selection
    failure on one split is recorded and the run continues. With jobs > 1
    splits run on a thread pool; results merge in split order either way.
    """
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if x.shape[0] != y.shape[0]:
        raise DomainError("x and y must have the same number of rows")
    if n_splits < 1:
        raise DomainError("n_splits must be at least 1")
    if not 0.0 < split_fraction < 1.0:
        raise DomainError("split_fraction must be in (0, 1)")
    n = x.shape[0]
    n_train = int(round(n * split_fraction))
    if n_train < 1 or n_train >= n:
        raise DomainError("split_fraction leaves an empty train or test set")

    def run(t):
        try:
            return _eval_one_split(x, y, criteria, n_train, seed, t)
        except (SaturationError, DomainError) as exc:
            return exc

    if jobs > 1:
        from concurrent.futures import ThreadPoolExecutor

        with ThreadPoolExecutor(max_workers=jobs) as pool:
            results = list(pool.map(run, range(n_splits)))
    else:
        results = [run(t) for t in range(n_splits)]

    names = list(criteria)
    report = EvalReport(
        criteria=names,
        mspe={name: [] for name in names + ["ols"]},
        ranks={name: [] for name in names},
        split_fraction=split_fraction,
        n_splits=n_splits,
        failures=[],
    )
    for t, res in enumerate(results):
        if isinstance(res, Exception):
            report.failures.append({"split": t, "error": str(res)})
            continue
        mspe, ranks = res
        for name in names:
            report.mspe[name].append(mspe[name])
            report.ranks[name].append(ranks[name])
        report.mspe["ols"].append(mspe["ols"])
    if not report.mspe["ols"]:
        raise SaturationError("selection failed on every split")
    return report


def synthetic_fixture(
    n: int = 118,
    p: int = 39,
    q: int = 36,
    sigma2: float = 1.0,
    seed: int = 20240501,
) -> tuple[np.ndarray, np.ndarray]:
    """Deterministic synthetic stand-in with the shape of a gene-expression
    train/test pipeline dataset.

    One dominant latent factor plus a slowly decaying tail of marginal
    factors near the noise level, so parsimonious criteria select rank 1
    while greedier ones chase the tail.
    """
    rng = np.random.default_rng(np.random.SeedSequence(entropy=seed, spawn_key=(4,)))
    x = rng.standard_normal((n, p))
    sv = np.concatenate([[5.0], 1.6 * 0.95 ** np.arange(8)])
    r0 = sv.size
    left = np.linalg.qr(rng.standard_normal((p, r0)))[0]
    right = np.linalg.qr(rng.standard_normal((q, r0)))[0]
    b = (left * sv[None, :]) @ right.T
    y = x @ b + math.sqrt(sigma2) * rng.standard_normal((n, q))
    return x, y


def fixture_paths() -> tuple[str, str]:
    """Filesystem paths of the bundled (X, Y) fixture CSVs."""
    from importlib.resources import files

    data = files("rrdof") / "data"
    return str(data / "fixture_x.csv"), str(data / "fixture_y.csv")

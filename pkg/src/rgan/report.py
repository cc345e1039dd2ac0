"""CSV and markdown writers for result tables, rankings and sweeps."""

from __future__ import annotations

import csv
from pathlib import Path

from .harness import Cell, RankingTable, ResultTable

FORMATS = ("csv", "markdown")


def table_columns(classifiers) -> list:
    cols = ["dataset", "method"]
    for c in classifiers:
        cols += [f"{c}_mean", f"{c}_std", f"{c}_n"]
    return cols


def write_table_csv(rt: ResultTable, path) -> Path:
    """One row per (dataset, method); floats use repr so reading back is exact."""
    path = Path(path)
    clfs = rt.classifiers
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(table_columns(clfs))
        for ds in rt.datasets:
            for m in rt.methods:
                if not any((ds, c, m) in rt.cells for c in clfs):
                    continue
                row = [ds, m]
                for c in clfs:
                    cell = rt.cells.get((ds, c, m))
                    row += ["", "", ""] if cell is None else [repr(cell.mean), repr(cell.std), cell.n]
                w.writerow(row)
    return path


def read_table_csv(path) -> ResultTable:
    with open(path, newline="") as fh:
        rows = list(csv.reader(fh))
    header, body = rows[0], rows[1:]
    if header[:2] != ["dataset", "method"] or (len(header) - 2) % 3:
        raise ValueError(f"{path} is not a result table")
    clfs = [header[i][: -len("_mean")] for i in range(2, len(header), 3)]
    cells = {}
    for r in body:
        for j, c in enumerate(clfs):
            mean, std, n = r[2 + 3 * j: 5 + 3 * j]
            if mean:
                cells[(r[0], c, r[1])] = Cell(float(mean), float(std), int(n))
    return ResultTable(cells)


def table_markdown(rt: ResultTable, digits: int = 4) -> str:
    """Per dataset: methods as rows, classifiers as columns, ``mean ± std``."""
    out = []
    clfs = rt.classifiers
    for ds in rt.datasets:
        out.append(f"### {ds}\n")
        out.append("| method | " + " | ".join(c.upper() for c in clfs) + " |")
        out.append("|---" * (len(clfs) + 1) + "|")
        for m in rt.methods:
            vals = []
            for c in clfs:
                cell = rt.cells.get((ds, c, m))
                vals.append("" if cell is None else f"{cell.mean:.{digits}f} ± {cell.std:.{digits}f}")
            out.append(f"| {m} | " + " | ".join(vals) + " |")
        out.append("")
    return "\n".join(out)


def write_ranking_csv(rk: RankingTable, path) -> Path:
    path = Path(path)
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["dataset", "classifier", "best", "second"])
        for (ds, clf), r in rk.groups.items():
            w.writerow([ds, clf, r.best, r.second or ""])
    return path


def ranking_markdown(rk: RankingTable) -> str:
    lines = ["| dataset | classifier | best | second |", "|---|---|---|---|"]
    for (ds, clf), r in rk.groups.items():
        lines.append(f"| {ds} | {clf} | {r.best} | {r.second or ''} |")
    lines.append("")
    lines.append(f"restrained family best in {rk.restrained_best} of {len(rk.groups)} groups; "
                 f"in the top two in {rk.restrained_top2}")
    return "\n".join(lines) + "\n"


def write_rows_csv(header, rows, path) -> Path:
    path = Path(path)
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(header)
        for r in rows:
            w.writerow([repr(v) if isinstance(v, float) else ("" if v is None else v) for v in r])
    return path


def write_sr_sweep(sweep, path) -> Path:
    clfs = list(sweep.correlation)
    rows = [[p.name, p.sr] + [p.auc[c] for c in clfs] for p in sweep.points]
    return write_rows_csv(["pair", "sr"] + [f"{c}_auc" for c in clfs], rows, path)


def write_lambda_curve(curve, path) -> Path:
    rt = curve.table
    rows = []
    for ds in rt.datasets:
        for c in rt.classifiers:
            for lam, value in curve.curve(ds, c):
                rows.append([ds, c, float(lam), value])
    return write_rows_csv(["dataset", "classifier", "lambda", "auc"], rows, path)


def report(obj, out_dir, fmt="csv", stem="results") -> list:
    """Write ``obj`` (result table, ranking, or sweep output) in ``fmt`` under ``out_dir``."""
    from .sweeps import LambdaCurve, SrSweep

    if fmt not in FORMATS:
        raise ValueError(f"format must be one of {FORMATS}")
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    if isinstance(obj, ResultTable):
        if fmt == "csv":
            return [write_table_csv(obj, out_dir / f"{stem}.csv")]
        p = out_dir / f"{stem}.md"
        p.write_text(table_markdown(obj))
        return [p]
    if isinstance(obj, RankingTable):
        if fmt == "csv":
            return [write_ranking_csv(obj, out_dir / f"{stem}_ranking.csv")]
        p = out_dir / f"{stem}_ranking.md"
        p.write_text(ranking_markdown(obj))
        return [p]
    if isinstance(obj, SrSweep):
        return [write_sr_sweep(obj, out_dir / f"{stem}_sr.csv")]
    if isinstance(obj, LambdaCurve):
        paths = [write_lambda_curve(obj, out_dir / f"{stem}_lambda.csv")]
        if fmt == "markdown":
            p = out_dir / f"{stem}_lambda.md"
            p.write_text(table_markdown(obj.table))
            paths.append(p)
        return paths
    raise TypeError(f"cannot report {type(obj).__name__}")

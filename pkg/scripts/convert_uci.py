#!/usr/bin/env python3
"""Convert raw UCI files for the four benchmark datasets into headed CSVs.

Usage::

    python scripts/convert_uci.py RAW_DIR OUT_DIR

``RAW_DIR`` must contain the original distribution files:

    australian/australian.dat        (KEEL/ARFF-style header or bare rows)
    german/german.data.txt           (space separated, symbolic attributes)
    pima/pima.dat                    (KEEL/ARFF-style header or bare rows)
    spect_f/SPECT.train.txt, spect_f/SPECT.test.txt

The same files are redistributed by the ``common-datasets`` wheel on PyPI
under ``common_datasets/data/classification``.
"""

import csv
import sys
from pathlib import Path

GERMAN_COLUMNS = [
    "checking_status", "duration", "credit_history", "purpose", "credit_amount",
    "savings", "employment", "installment_rate", "personal_status", "other_debtors",
    "residence_since", "property", "age", "other_installment_plans", "housing",
    "existing_credits", "job", "num_dependents", "telephone", "foreign_worker",
    "class",
]
PIMA_COLUMNS = ["preg", "plas", "pres", "skin", "insu", "mass", "pedi", "age", "class"]


def _arff_rows(path):
    rows, in_data = [], False
    has_header = path.read_text().lstrip().startswith("@")
    for line in path.read_text().splitlines():
        line = line.strip()
        if not line or line.startswith("%"):
            continue
        if has_header and not in_data:
            in_data = line.lower().startswith("@data")
            continue
        rows.append([v.strip() for v in line.split(",")])
    return rows


def _write(path, header, rows):
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(header)
        writer.writerows(rows)
    print(f"{path}: {len(rows)} rows x {len(header) - 1} attributes")


def main(raw_dir, out_dir):
    raw, out = Path(raw_dir), Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)

    rows = _arff_rows(raw / "australian" / "australian.dat")
    _write(out / "australian.csv", [f"A{i}" for i in range(1, 15)] + ["class"], rows)

    rows = [line.split() for line in (raw / "german" / "german.data.txt").read_text().splitlines() if line.strip()]
    _write(out / "german.csv", GERMAN_COLUMNS, rows)

    rows = _arff_rows(raw / "pima" / "pima.dat")
    _write(out / "pima.csv", PIMA_COLUMNS, rows)

    rows = []
    for part in ("SPECT.train.txt", "SPECT.test.txt"):
        for line in (raw / "spect_f" / part).read_text().splitlines():
            if line.strip():
                vals = [v.strip() for v in line.split(",")]
                # label is the first field in the UCI layout; move it last
                rows.append(vals[1:] + vals[:1])
    _write(out / "spect.csv", [f"F{i}" for i in range(1, 23)] + ["class"], rows)


if __name__ == "__main__":
    if len(sys.argv) != 3:
        sys.exit(__doc__)
    main(sys.argv[1], sys.argv[2])

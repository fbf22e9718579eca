#!/usr/bin/env python3
"""Convert the public benchmark datasets into ordrank's canonical layout.

Each prepared file is a comma-separated numeric table with the metric
target in the last column, plus a ``<name>.manifest`` next to it.

Fetching is manual.  Put the raw files in a directory and pass it with
``--raw``; any dataset whose raw file is absent is skipped.

  name         raw file            source
  machine      machine.data        UCI "Computer Hardware"
  auto_mpg     auto-mpg.data       UCI "Auto MPG"
  boston       housing.data        UCI "Housing" (Boston)
  abalone      abalone.data        UCI "Abalone"
  stocks       stock.data          L. Torgo's regression datasets page ("Stocks domain")
  pyrimidines  pyrim.data          L. Torgo's regression datasets page
  triazines    triazines.data      L. Torgo's regression datasets page
  diabetes     diabetes.data       L. Torgo's regression datasets page

UCI: https://archive.ics.uci.edu/   Torgo: https://www.dcc.fc.up.pt/~ltorgo/Regression/DataSets.html

Machine, Boston and Auto MPG are also bundled in two PyPI packages
(``pydataset`` ships the R MASS ``cpus`` and ``Boston`` tables, ``ISLP``
ships ``Auto``).  ``--pypi DIR`` reads those from downloaded archives in
DIR, e.g. after ``pip download --no-deps pydataset ISLP -d DIR``.

Usage:
  python scripts/prepare_datasets.py --raw raw/ --out data/
  python scripts/prepare_datasets.py --pypi /tmp/wheels --out data/
"""

import argparse
import csv
import glob
import io
import os
import sys
import tarfile
import zipfile

sys.path.insert(0, os.path.join(os.path.dirname(__file__), "..", "src"))
from ordrank.reference import TRAIN_COUNTS  # noqa: E402

ABALONE_SEX = {"M": 1.0, "F": 2.0, "I": 3.0}


def _rows_from_csv_text(text, feature_cols, target_col, skip_header=True):
    reader = csv.reader(io.StringIO(text))
    rows = []
    for i, rec in enumerate(reader):
        if skip_header and i == 0:
            continue
        if not rec:
            continue
        try:
            rows.append([float(rec[c]) for c in feature_cols] + [float(rec[target_col])])
        except ValueError:
            continue  # missing value marker such as '?'
    return rows


def raw_machine(text):
    # vendor, model, MYCT, MMIN, MMAX, CACH, CHMIN, CHMAX, PRP, ERP
    return _rows_from_csv_text(text, range(2, 8), 8, skip_header=False)


def raw_auto_mpg(text):
    rows = []
    for line in text.splitlines():
        head = line.split('"')[0].split()
        if len(head) != 8 or "?" in head:
            continue
        vals = [float(v) for v in head]
        rows.append(vals[1:] + vals[:1])
    return rows


def raw_whitespace_target_last(text):
    rows = []
    for line in text.splitlines():
        parts = line.replace(",", " ").split()
        if not parts or line.lstrip().startswith("#"):
            continue
        try:
            rows.append([float(v) for v in parts])
        except ValueError:
            continue
    return rows


def raw_abalone(text):
    rows = []
    for line in text.splitlines():
        parts = line.strip().split(",")
        if len(parts) != 9:
            continue
        rows.append([ABALONE_SEX[parts[0]]] + [float(v) for v in parts[1:]])
    return rows


RAW = {
    "machine": ("machine.data", raw_machine),
    "auto_mpg": ("auto-mpg.data", raw_auto_mpg),
    "boston": ("housing.data", raw_whitespace_target_last),
    "abalone": ("abalone.data", raw_abalone),
    "stocks": ("stock.data", raw_whitespace_target_last),
    "pyrimidines": ("pyrim.data", raw_whitespace_target_last),
    "triazines": ("triazines.data", raw_whitespace_target_last),
    "diabetes": ("diabetes.data", raw_whitespace_target_last),
}


def from_pypi(directory):
    """Machine, Boston and Auto MPG from downloaded pydataset / ISLP archives."""
    found = {}
    sdists = glob.glob(os.path.join(directory, "**", "pydataset-*.tar.gz"), recursive=True)
    if sdists:
        outer = tarfile.open(sdists[0])
        member = next(m for m in outer.getmembers() if m.name.endswith("resources.tar.gz"))
        inner = tarfile.open(fileobj=io.BytesIO(outer.extractfile(member).read()))
        cpus = inner.extractfile("resources/rdata/csv/MASS/cpus.csv").read().decode()
        # "", name, syct, mmin, mmax, cach, chmin, chmax, perf, estperf
        found["machine"] = _rows_from_csv_text(cpus, range(2, 8), 8)
        boston = inner.extractfile("resources/rdata/csv/MASS/Boston.csv").read().decode()
        found["boston"] = _rows_from_csv_text(boston, range(1, 14), 14)
    wheels = glob.glob(os.path.join(directory, "**", "[Ii][Ss][Ll][Pp]-*.whl"), recursive=True)
    if wheels:
        auto = zipfile.ZipFile(wheels[0]).read("ISLP/data/Auto.csv").decode()
        header = next(csv.reader(io.StringIO(auto)))
        cols = [header.index(c) for c in
                ("cylinders", "displacement", "horsepower", "weight", "acceleration", "year", "origin")]
        found["auto_mpg"] = _rows_from_csv_text(auto, cols, header.index("mpg"))
    return found


def write_dataset(name, rows, out_dir):
    path = os.path.join(out_dir, f"{name}.csv")
    with open(path, "w") as fh:
        fh.write(f"# {name}: {len(rows)} rows, {len(rows[0]) - 1} features, target in last column\n")
        for r in rows:
            fh.write(",".join(repr(v).removesuffix(".0") for v in r) + "\n")
    with open(os.path.join(out_dir, f"{name}.manifest"), "w") as fh:
        fh.write(f"name={name}\npath={name}.csv\ntarget_column=-1\nK=5\ntrain_count={TRAIN_COUNTS[name]}\n")
    print(f"{name}: {len(rows)} rows x {len(rows[0]) - 1} features -> {path}")


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    ap.add_argument("--raw", help="directory holding raw public files")
    ap.add_argument("--pypi", help="directory holding downloaded pydataset/ISLP archives")
    ap.add_argument("--out", default="data")
    args = ap.parse_args(argv)
    os.makedirs(args.out, exist_ok=True)
    prepared = {}
    if args.pypi:
        prepared.update(from_pypi(args.pypi))
    if args.raw:
        for name, (fname, parse) in RAW.items():
            path = os.path.join(args.raw, fname)
            if os.path.exists(path):
                with open(path) as fh:
                    prepared[name] = parse(fh.read())
    if not prepared:
        ap.error("nothing found; see --help for the expected raw files")
    for name in sorted(prepared):
        write_dataset(name, prepared[name], args.out)


if __name__ == "__main__":
    main()

"""Download the example datasets used by the demos and acceptance suite.

Writes one-column CSVs (header + one value per line) that ``topomix`` reads
directly.  The core commands never need the network; this is a one-off.

    python scripts/fetch_datasets.py faithful
    python scripts/fetch_datasets.py color-indices --column g-r
"""
from __future__ import annotations

import argparse
import csv
import io
import sys
import urllib.request
from pathlib import Path

DATA = Path(__file__).resolve().parent.parent / "tests" / "data"

# R datasets::faithful, mirrored as CSV by the Rdatasets project.
FAITHFUL_URL = "https://vincentarelbundock.github.io/Rdatasets/csv/datasets/faithful.csv"
# VizieR catalogue J/ApJ/700/523 as tab-separated values.
VIZIER_URL = "https://vizier.cds.unistra.fr/viz-bin/asu-tsv?-source=J/ApJ/700/523&-out.max=unlimited&-out.all"


def _get(url: str) -> str:
    with urllib.request.urlopen(url, timeout=60) as resp:
        return resp.read().decode("utf-8")


def _write(path: Path, name: str, values) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(name + "\n" + "\n".join(values) + "\n")
    print(f"wrote {len(values)} values to {path}", file=sys.stderr)


def fetch_faithful(out: Path) -> None:
    rows = csv.DictReader(io.StringIO(_get(FAITHFUL_URL)))
    _write(out, "waiting", [r["waiting"] for r in rows])


def fetch_color_indices(out: Path, column: str) -> None:
    # asu-tsv: '#' comments, a header line, a units line, a dashes line, then data
    lines = [ln for ln in _get(VIZIER_URL).splitlines() if ln and not ln.startswith("#")]
    header = [h.strip() for h in lines[0].split("\t")]
    if column not in header:
        sys.exit(f"column {column!r} not found; available: {', '.join(header)}")
    k = header.index(column)
    values = []
    for ln in lines[3:]:
        cell = ln.split("\t")[k].strip() if len(ln.split("\t")) > k else ""
        try:
            float(cell)
        except ValueError:
            continue
        values.append(cell)
    _write(out, column, values)


def main(argv=None) -> int:
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("dataset", choices=["faithful", "color-indices"])
    p.add_argument("--output", "-o", type=Path, help="destination CSV")
    p.add_argument("--column", default="g-r", help="catalogue column for color-indices")
    args = p.parse_args(argv)
    if args.dataset == "faithful":
        fetch_faithful(args.output or DATA / "faithful_waiting.csv")
    else:
        fetch_color_indices(args.output or DATA / "color_indices.csv", args.column)
    return 0


if __name__ == "__main__":
    sys.exit(main())

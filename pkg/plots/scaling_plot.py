"""Render the scaling-experiment CSV as a log-log figure.

Usage: scaling-plot CSV_PATH OUT_PATH [--png]

Reads the counting harness CSV (header n,M,triples,sumP,Q,Iprime,I,seconds),
refits the log-log slope of M against n independently, and draws the scatter
with the fitted slope annotated and a dashed reference line of slope 11/6.
Output is SVG by default for diffable review; --png switches format.
"""

from __future__ import annotations

import argparse
import math
import sys
from dataclasses import dataclass

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

EXPECTED_HEADER = "n,M,triples,sumP,Q,Iprime,I,seconds"
REFERENCE_SLOPE = 11 / 6


class ParseError(ValueError):
    pass


@dataclass(frozen=True)
class ScalingRow:
    n: int
    M: int
    triples: int
    sumP: int
    Q: int
    Iprime: int
    I: int
    seconds: float


@dataclass(frozen=True)
class ScalingSeries:
    rows: tuple[ScalingRow, ...]

    def __post_init__(self):
        ns = [r.n for r in self.rows]
        if any(b <= a for a, b in zip(ns, ns[1:])):
            raise ParseError("n must be strictly increasing")
        for r in self.rows:
            if min(r.n, r.M, r.triples, r.sumP, r.Q, r.Iprime, r.I) < 0:
                raise ParseError(f"negative count in row n={r.n}")
            if r.seconds < 0:
                raise ParseError(f"negative seconds in row n={r.n}")


def parse_series(text: str) -> ScalingSeries:
    lines = [ln for ln in text.splitlines() if ln.strip()]
    if not lines or lines[0].strip() != EXPECTED_HEADER:
        got = lines[0].strip() if lines else "<empty file>"
        raise ParseError(f"expected header {EXPECTED_HEADER!r}, got {got!r}")
    if len(lines) == 1:
        raise ParseError("empty CSV: no data rows")
    rows = []
    n_fields = len(EXPECTED_HEADER.split(","))
    for ln in lines[1:]:
        parts = ln.split(",")
        if len(parts) != n_fields:
            raise ParseError(f"expected {n_fields} fields, got {len(parts)}: {ln!r}")
        try:
            counts = [int(v) for v in parts[:7]]
            seconds = float(parts[7])
        except ValueError:
            raise ParseError(f"malformed row: {ln!r}")
        rows.append(ScalingRow(*counts, seconds))
    return ScalingSeries(tuple(rows))


def fit_slope(series: ScalingSeries) -> float:
    """Least-squares slope of log max(M,1) against log n."""
    if len(series.rows) < 2:
        raise ParseError("need at least 2 rows to fit a slope")
    xs = np.log([r.n for r in series.rows])
    ys = np.log([max(r.M, 1) for r in series.rows])
    return float(np.polyfit(xs, ys, 1)[0])


def render(csv_path: str, out_path: str, png: bool = False) -> float:
    """Write the figure and return the fitted slope."""
    with open(csv_path, "r", encoding="utf-8") as fh:
        series = parse_series(fh.read())
    if len(series.rows) == 2:
        sys.stderr.write("warning: only two data points; the slope fit is exact by construction\n")
    slope = fit_slope(series)

    ns = np.array([r.n for r in series.rows], dtype=float)
    ms = np.array([max(r.M, 1) for r in series.rows], dtype=float)

    plt.rcParams["svg.fonttype"] = "none"
    plt.rcParams["svg.hashsalt"] = "scaling-plot"
    fig, ax = plt.subplots(figsize=(6.4, 4.8))
    ax.scatter(ns, ms, zorder=3, label="measured M")
    anchor = ms[0] / ns[0] ** REFERENCE_SLOPE
    grid = np.geomspace(ns[0], ns[-1], 64)
    ax.plot(grid, anchor * grid**REFERENCE_SLOPE, linestyle="--", color="gray",
            label="reference slope 11/6")
    ax.set_xscale("log")
    ax.set_yscale("log")
    ax.set_xlabel("n")
    ax.set_ylabel("max(M, 1)")
    ax.set_title("spanned unit circles vs points per circle")
    ax.annotate(f"fit slope = {slope:.12f}", xy=(0.05, 0.92), xycoords="axes fraction")
    ax.legend(loc="lower right")
    fig.tight_layout()
    if png:
        fig.savefig(out_path, format="png", dpi=144)
    else:
        fig.savefig(out_path, format="svg", metadata={"Date": None})
    plt.close(fig)
    return slope


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(prog="scaling-plot", description=__doc__)
    parser.add_argument("csv_path")
    parser.add_argument("out_path")
    parser.add_argument("--png", action="store_true", help="emit PNG instead of SVG")
    args = parser.parse_args(argv)
    try:
        slope = render(args.csv_path, args.out_path, png=args.png)
    except (ParseError, OSError) as exc:
        sys.stderr.write(f"error: {exc}\n")
        return 1
    print(f"fit slope = {slope:.12f}")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())

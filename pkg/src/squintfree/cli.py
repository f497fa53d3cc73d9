"""Batch front-end: reproduce the gain table and figure data as CSV or JSON.

Subcommands: table1, gain-linear, arch-compare, approx-error, spectrum, chains, plot.
Exit codes: 0 success, 2 invalid scenario, 3 numerical failure.
"""

from __future__ import annotations

import argparse
import csv
import dataclasses
import io
import json
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from . import architectures as arch
from .continuum import discretization_error, ula_kernel_spectrum
from .geometry import (SPEED_OF_LIGHT, ArrayGeometry, BandSpec, Direction, required_rf_chains,
                       squint_factor, uv_from_angles, _ceil)
from .spectra import MatrixTooLargeError, NumericalError, spectrum_gram

EXIT_OK, EXIT_SCENARIO, EXIT_NUMERICAL = 0, 2, 3
KNOWN_ARCHITECTURES = ("optimal", "beamspace", "hybridly", "partially")


class ScenarioError(ValueError):
    pass


@dataclass
class Scenario:
    """Experiment definition; defaults reproduce the 128 x 128 table at 300 GHz."""

    n_x: int = 128
    n_y: int = 128
    spacing: float = 0.5  # wavelengths at f_c
    f_c: float = 300e9
    bandwidths: list = field(default_factory=lambda: [g * 1e9 for g in (1, 2, 3, 4, 5, 10, 15, 20, 25, 30)])
    zenith: float = 90.0
    azimuths: list = field(default_factory=lambda: list(range(360)))
    architectures: list = field(default_factory=lambda: ["optimal", "beamspace"])
    additional_chains: list = field(default_factory=lambda: [0, 1, 2])
    nodes: Optional[int] = None
    partition: Optional[dict] = None
    # figure sweeps
    alphas: list = field(default_factory=lambda: [round(0.25 * k, 2) for k in range(1, 65)])
    chain_offsets: list = field(default_factory=lambda: [0, 1])
    alpha: float = 4.0
    relative_chains: list = field(default_factory=lambda: [round(0.1 * k, 1) for k in range(1, 31)])
    n_values: list = field(default_factory=lambda: [16, 32, 64, 128])

    def __post_init__(self):
        if self.n_x < 1 or self.n_y < 1 or not self.spacing > 0:
            raise ScenarioError("array counts and spacing must be positive")
        if not self.bandwidths or not self.azimuths:
            raise ScenarioError("bandwidth list and azimuth grid must be non-empty")
        bad = set(self.architectures) - set(KNOWN_ARCHITECTURES)
        if bad:
            raise ScenarioError(f"unknown architectures {sorted(bad)}")
        if any(a < 0 for a in self.additional_chains):
            raise ScenarioError("additional chain counts must be nonnegative")
        if self.nodes is not None and self.nodes < 2:
            raise ScenarioError("quadrature node count must be at least 2")
        if {"hybridly", "partially"} & set(self.architectures):
            part = self.hybrid_partition()
            try:
                part.check(self.geometry())
            except ValueError as exc:
                raise ScenarioError(str(exc)) from exc
        try:
            for w in self.bandwidths:
                BandSpec(self.f_c, w)
        except ValueError as exc:
            raise ScenarioError(str(exc)) from exc

    @classmethod
    def from_dict(cls, data: dict) -> "Scenario":
        names = {f.name for f in dataclasses.fields(cls)}
        unknown = set(data) - names
        if unknown:
            raise ScenarioError(f"unknown scenario keys: {sorted(unknown)}")
        try:
            return cls(**data)
        except TypeError as exc:
            raise ScenarioError(str(exc)) from exc

    @classmethod
    def load(cls, path: str) -> "Scenario":
        try:
            with open(path) as fh:
                data = json.load(fh)
        except (OSError, json.JSONDecodeError) as exc:
            raise ScenarioError(f"cannot read scenario {path}: {exc}") from exc
        if not isinstance(data, dict):
            raise ScenarioError("scenario file must hold a JSON object")
        return cls.from_dict(data)

    def geometry(self) -> ArrayGeometry:
        d = self.spacing * SPEED_OF_LIGHT / self.f_c
        return ArrayGeometry(self.n_x, self.n_y, d, d)

    def hybrid_partition(self) -> arch.HybridPartition:
        p = self.partition or {"m_x": 2, "m_y": 2}
        try:
            return arch.HybridPartition(p["m_x"], p.get("m_y", 1))
        except (KeyError, TypeError) as exc:
            raise ScenarioError(f"bad partition {p!r}") from exc


# ---------------------------------------------------------------- runners

def _azimuth_gains(geom: ArrayGeometry, band: BandSpec, direction: Direction, architecture: str,
                   extras: list, nodes: Optional[int], part: Optional[arch.HybridPartition]):
    """Normalised gains for each additional-chain count at one azimuth."""
    sf = squint_factor(geom, direction, band)
    if architecture == "optimal":
        spec = spectrum_gram(geom, direction, band, nodes)
        return [spec.partial_sum(required_rf_chains(sf, a)) / geom.n for a in extras]
    if architecture == "beamspace":
        if sf.is_broadside:
            return [1.0 for _ in extras]
        return [arch.beamspace_avg_gain(geom, direction, band, required_rf_chains(sf, a), nodes)
                for a in extras]
    # identical subarrays share one spectrum; g_avg / N equals the per-subarray ratio
    sub = part.subarray_geometry(geom)
    sub_sf = squint_factor(sub, direction, band)
    spec = spectrum_gram(sub, direction, band, nodes)
    if architecture == "hybridly":
        return [spec.partial_sum(required_rf_chains(sub_sf, a)) / sub.n for a in extras]
    return [spec.partial_sum(1) / sub.n for _ in extras]


def run_table1(scenario: Scenario, threads: Optional[int] = None) -> list[dict]:
    """Worst-over-azimuth normalised average gain per (architecture, extra chains, bandwidth)."""
    geom = scenario.geometry()
    part = scenario.hybrid_partition() if {"hybridly", "partially"} & set(scenario.architectures) else None
    directions = [uv_from_angles(th, scenario.zenith) for th in scenario.azimuths]
    rows = []
    with ThreadPoolExecutor(max_workers=threads or os.cpu_count()) as pool:
        for architecture in scenario.architectures:
            extras = [0] if architecture == "partially" else list(scenario.additional_chains)
            for w in scenario.bandwidths:
                band = BandSpec(scenario.f_c, w)
                per_az = list(pool.map(
                    lambda d: _azimuth_gains(geom, band, d, architecture, extras, scenario.nodes, part),
                    directions))
                gains = np.array(per_az)
                for j, extra in enumerate(extras):
                    i = int(np.argmin(gains[:, j]))
                    rows.append({
                        "architecture": architecture,
                        "additional_chains": extra,
                        "bandwidth": w,
                        "worst_normalized_gain": float(gains[i, j]),
                        "worst_azimuth": scenario.azimuths[i],
                    })
    return rows


def run_gain_linear(alphas, chain_offsets, n_nodes: Optional[int] = None) -> list[dict]:
    """Normalised optimal gain ``sum_{l < n_rf} lambda_l(B_alpha) / alpha`` on an alpha grid."""
    rows = []
    for a in alphas:
        spec = ula_kernel_spectrum(a, n_nodes)
        for off in chain_offsets:
            n_rf = max(1, _ceil(a) + off)
            rows.append({"alpha": a, "chain_offset": off, "n_rf": n_rf,
                         "normalized_gain": spec.partial_sum(n_rf) / a})
    return rows


def run_arch_compare(alpha: float, relative_chains, n_nodes: Optional[int] = None) -> list[dict]:
    """Fully- vs partially-connected ULA gains against ``N_RF / alpha`` (``M / alpha`` for partial)."""
    spec = ula_kernel_spectrum(alpha, n_nodes)
    rows = []
    for p in relative_chains:
        m = p * alpha
        rows.append({
            "relative_chains": p,
            "fully_asymptotic": min(p, 1.0),
            "fully_alpha4": spec.partial_sum(max(1, _ceil(p * alpha))) / alpha,
            "partial_mrt": arch.partial_mrt_gain(alpha, m),
            "partial_optimal": arch.partial_optimal_gain(alpha, m),
        })
    return rows


def approx_error_case(alpha: float, n: int):
    """ULA of n unit-spaced elements at endfire with bandwidth chosen to give ``alpha``."""
    w = alpha * SPEED_OF_LIGHT / n
    return ArrayGeometry(n, 1, 1.0, 1.0), Direction(1.0, 0.0), BandSpec(w, w)


def run_approx_error(alphas, n_values, n_nodes: Optional[int] = None) -> list[dict]:
    rows = []
    for n in n_values:
        for a in alphas:
            geom, direction, band = approx_error_case(a, n)
            rows.append({"alpha": a, "N": n,
                         "normalized_error": discretization_error(geom, direction, band, n_nodes)})
    return rows


def run_spectrum(scenario: Scenario) -> list[dict]:
    geom = scenario.geometry()
    band = BandSpec(scenario.f_c, scenario.bandwidths[0])
    direction = uv_from_angles(scenario.azimuths[0], scenario.zenith)
    vals = spectrum_gram(geom, direction, band, scenario.nodes).eigenvalues
    cum = np.cumsum(vals) / geom.n
    return [{"index": i, "eigenvalue": float(v), "normalized": float(v / geom.n),
             "cumulative_normalized": float(c)} for i, (v, c) in enumerate(zip(vals, cum))]


def run_chains(scenario: Scenario) -> list[dict]:
    geom = scenario.geometry()
    rows = []
    for w in scenario.bandwidths:
        band = BandSpec(scenario.f_c, w)
        for th in scenario.azimuths:
            sf = squint_factor(geom, uv_from_angles(th, scenario.zenith), band)
            rows.append({"bandwidth": w, "azimuth": th, "alpha_x": sf.alpha_x,
                         "alpha_y": sf.alpha_y, "alpha_up": sf.alpha_up,
                         "required_chains": required_rf_chains(sf)})
    return rows


# ---------------------------------------------------------------- output

def rows_to_csv(rows: list[dict]) -> str:
    buf = io.StringIO()
    if rows:
        writer = csv.DictWriter(buf, fieldnames=list(rows[0]), lineterminator="\n")
        writer.writeheader()
        for row in rows:
            writer.writerow({k: repr(v) if isinstance(v, float) else v for k, v in row.items()})
    return buf.getvalue()


def svg_line_chart(series: dict, x_label: str = "", y_label: str = "",
                   width: int = 640, height: int = 400) -> str:
    """Minimal SVG polyline chart; ``series`` maps a label to ``(xs, ys)``."""
    pad = 50
    xs = np.concatenate([np.asarray(v[0], float) for v in series.values()])
    ys = np.concatenate([np.asarray(v[1], float) for v in series.values()])
    x0, x1 = float(xs.min()), float(xs.max())
    y0, y1 = float(ys.min()), float(ys.max())
    x1 = x1 if x1 > x0 else x0 + 1
    y1 = y1 if y1 > y0 else y0 + 1

    def sx(x):
        return pad + (x - x0) / (x1 - x0) * (width - 2 * pad)

    def sy(y):
        return height - pad - (y - y0) / (y1 - y0) * (height - 2 * pad)

    colors = ["#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b"]
    out = [f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}">',
           f'<rect x="{pad}" y="{pad}" width="{width - 2 * pad}" height="{height - 2 * pad}" '
           'fill="none" stroke="black"/>',
           f'<text x="{width / 2}" y="{height - 10}" text-anchor="middle">{x_label}</text>',
           f'<text x="15" y="{height / 2}" transform="rotate(-90 15 {height / 2})" '
           f'text-anchor="middle">{y_label}</text>',
           f'<text x="{pad}" y="{height - pad + 15}" font-size="10">{x0:g}</text>',
           f'<text x="{width - pad}" y="{height - pad + 15}" font-size="10" text-anchor="end">{x1:g}</text>',
           f'<text x="{pad - 5}" y="{height - pad}" font-size="10" text-anchor="end">{y0:.4g}</text>',
           f'<text x="{pad - 5}" y="{pad + 10}" font-size="10" text-anchor="end">{y1:.4g}</text>']
    for k, (label, (sxs, sys_)) in enumerate(series.items()):
        pts = " ".join(f"{sx(x):.2f},{sy(y):.2f}" for x, y in zip(sxs, sys_))
        color = colors[k % len(colors)]
        out.append(f'<polyline fill="none" stroke="{color}" points="{pts}"/>')
        out.append(f'<text x="{width - pad - 5}" y="{pad + 15 * (k + 1)}" font-size="11" '
                   f'text-anchor="end" fill="{color}">{label}</text>')
    out.append("</svg>")
    return "\n".join(out)


def chart_for(command: str, rows: list[dict]) -> str:
    def group(key, x, y):
        series = {}
        for r in rows:
            xs, ys = series.setdefault(f"{key}={r[key]}", ([], []))
            xs.append(r[x])
            ys.append(r[y])
        return series

    if command == "table1":
        series = {}
        for r in rows:
            xs, ys = series.setdefault(f"{r['architecture']}+{r['additional_chains']}", ([], []))
            xs.append(r["bandwidth"] / 1e9)
            ys.append(r["worst_normalized_gain"])
        return svg_line_chart(series, "bandwidth [GHz]", "worst normalized gain")
    if command == "gain-linear":
        return svg_line_chart(group("chain_offset", "alpha", "normalized_gain"), "alpha", "normalized gain")
    if command == "arch-compare":
        p = [r["relative_chains"] for r in rows]
        series = {k: (p, [r[k] for r in rows])
                  for k in ("fully_asymptotic", "fully_alpha4", "partial_mrt", "partial_optimal")}
        return svg_line_chart(series, "relative number of RF chains", "normalized gain")
    if command == "approx-error":
        return svg_line_chart(group("N", "alpha", "normalized_error"), "alpha", "normalized error")
    if command == "spectrum":
        return svg_line_chart({"eigenvalue / N": ([r["index"] for r in rows],
                                                  [r["normalized"] for r in rows])}, "index", "lambda / N")
    return svg_line_chart(group("bandwidth", "azimuth", "alpha_up"), "azimuth [deg]", "alpha_up")


def _plot_csv(path: str, x: str, y: str, by: Optional[str]) -> str:
    with open(path, newline="") as fh:
        rows = list(csv.DictReader(fh))
    series = {}
    for r in rows:
        label = f"{by}={r[by]}" if by else y
        xs, ys = series.setdefault(label, ([], []))
        xs.append(float(r[x]))
        ys.append(float(r[y]))
    return svg_line_chart(series, x, y)


def _write(text: str, path: Optional[str]):
    if path:
        with open(path, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="squintfree", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)
    for name, help_ in [("table1", "worst-over-azimuth gain table"),
                        ("gain-linear", "ULA continuum gain vs alpha"),
                        ("arch-compare", "fully vs partially connected"),
                        ("approx-error", "continuum approximation error"),
                        ("spectrum", "eigenvalues of B for one scenario point"),
                        ("chains", "required RF chains per bandwidth and azimuth")]:
        p = sub.add_parser(name, help=help_)
        p.add_argument("--config", help="scenario JSON file")
        p.add_argument("--out", help="output path (default stdout)")
        p.add_argument("--json", action="store_true", help="emit a JSON array instead of CSV")
        p.add_argument("--nodes", type=int, help="quadrature node override")
        p.add_argument("--threads", type=int, default=os.cpu_count(), help="worker threads")
        p.add_argument("--svg", help="also write an SVG line chart")
    p = sub.add_parser("plot", help="SVG line chart from a CSV file")
    p.add_argument("csv")
    p.add_argument("--x", required=True)
    p.add_argument("--y", required=True)
    p.add_argument("--by", help="column to split series on")
    p.add_argument("--svg", required=True)
    return parser


def run(args: argparse.Namespace) -> list[dict]:
    scenario = Scenario.load(args.config) if args.config else Scenario()
    if args.nodes is not None:
        if args.nodes < 2:
            raise ScenarioError("--nodes must be at least 2")
        scenario.nodes = args.nodes
    if args.command == "table1":
        return run_table1(scenario, args.threads)
    if args.command == "gain-linear":
        return run_gain_linear(scenario.alphas, scenario.chain_offsets, args.nodes)
    if args.command == "arch-compare":
        return run_arch_compare(scenario.alpha, scenario.relative_chains, args.nodes)
    if args.command == "approx-error":
        return run_approx_error(scenario.alphas, scenario.n_values, args.nodes)
    if args.command == "spectrum":
        return run_spectrum(scenario)
    return run_chains(scenario)


def main(argv: Optional[list] = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.command == "plot":
            _write(_plot_csv(args.csv, args.x, args.y, args.by), args.svg)
            return EXIT_OK
        rows = run(args)
    except (ScenarioError, MatrixTooLargeError) as exc:
        print(f"invalid scenario: {exc}", file=sys.stderr)
        return EXIT_SCENARIO
    except (NumericalError, np.linalg.LinAlgError, arch.RankDeficientError) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    except ValueError as exc:
        print(f"invalid scenario: {exc}", file=sys.stderr)
        return EXIT_SCENARIO
    text = json.dumps(rows, indent=1) + "\n" if args.json else rows_to_csv(rows)
    _write(text, args.out)
    if args.svg and rows:
        _write(chart_for(args.command, rows), args.svg)
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())

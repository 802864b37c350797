"""Cross-configuration comparison: savings, (QPS x Qscore) grids, heatmaps.

A grid cell fixes a workload intensity (QPS) and a quality floor (alpha) and
holds every configuration's carbon per functional unit at that operating
point. The greenest configuration is the one with the lowest defined CFU;
its headline number is the percentage saved relative to the second greenest.
"""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass

from .errors import GridError, UndefinedSavingsError
from .funit import CarbonReport

#: Tile fill colors assigned to configs in sorted-label order, cycling.
_PALETTE = ("#4c9f70", "#5b8def", "#e4a33c", "#b4656f", "#8e6fc1", "#5bb8c4")
_INFEASIBLE_FILL = "#cccccc"


@dataclass(frozen=True)
class GridCell:
    """One (QPS, alpha) operating point across all configurations.

    ``per_config`` maps every config label to its CFU, None standing for
    undefined (no qualifying token, or no run at this point). ``greenest`` is
    None when no config has a defined CFU; ``savings_pct`` is present only
    when at least two configs are defined and the reference CFU is positive.
    """

    qps: float
    alpha: float
    per_config: dict[str, float | None]
    greenest: str | None
    savings_pct: float | None


@dataclass(frozen=True)
class ComparisonGrid:
    """Dense (alpha x QPS) matrix of cells under fixed beta/gamma.

    ``cells[i][j]`` is the cell for alpha_axis[i], qps_axis[j]; both axes are
    sorted ascending.
    """

    qps_axis: tuple[float, ...]
    alpha_axis: tuple[float, ...]
    beta: float
    gamma: float
    cells: tuple[tuple[GridCell, ...], ...]

    @property
    def configs(self) -> tuple[str, ...]:
        labels: set[str] = set()
        for row in self.cells:
            for cell in row:
                labels.update(cell.per_config)
        return tuple(sorted(labels))

    def cell(self, qps: float, alpha: float) -> GridCell:
        try:
            i = self.alpha_axis.index(alpha)
            j = self.qps_axis.index(qps)
        except ValueError:
            raise GridError(f"no cell at qps={qps}, alpha={alpha}") from None
        return self.cells[i][j]


def carbon_savings(cfu_ref: float | None, cfu_alt: float | None) -> float:
    """Percent carbon saved by the alternative relative to the reference:
    (ref - alt) / ref * 100. Negative when the alternative emits more."""
    if cfu_ref is None or cfu_alt is None:
        raise UndefinedSavingsError("savings need both CFUs defined")
    if not cfu_ref > 0:
        raise UndefinedSavingsError(f"savings need a positive reference CFU, got {cfu_ref}")
    return (cfu_ref - cfu_alt) / cfu_ref * 100.0


def _rank_defined(per_config: dict[str, float | None]) -> list[tuple[float, str]]:
    # Ties broken by label so grid building is order-independent.
    return sorted((v, k) for k, v in per_config.items() if v is not None)


def build_grid(reports: list[CarbonReport],
               alpha_axis: list[float],
               beta: float,
               gamma: float) -> ComparisonGrid:
    """Assemble a comparison grid from per-run reports.

    Every report must have been computed under the given beta/gamma, and at
    most one report may exist per (config, qps, alpha). Points of the axis
    cross-product with no report stay undefined in the cell.
    """
    if not alpha_axis:
        raise GridError("alpha_axis must be non-empty")
    alphas = tuple(sorted(set(alpha_axis)))

    by_key: dict[tuple[str, float, float], CarbonReport] = {}
    configs: set[str] = set()
    qps_values: set[float] = set()
    for rep in reports:
        spec = rep.fu_spec
        if spec.beta != beta or spec.gamma != gamma:
            raise GridError(
                f"report {rep.config_label!r} computed at beta={spec.beta}, "
                f"gamma={spec.gamma}; grid wants beta={beta}, gamma={gamma}")
        if spec.alpha not in alphas:
            raise GridError(
                f"report {rep.config_label!r} computed at alpha={spec.alpha}, "
                f"not on the grid's alpha axis")
        key = (rep.config_label, spec.qps, spec.alpha)
        if key in by_key:
            raise GridError(f"duplicate report for config={key[0]!r}, "
                            f"qps={key[1]}, alpha={key[2]}")
        by_key[key] = rep
        configs.add(rep.config_label)
        qps_values.add(spec.qps)
    if not by_key:
        raise GridError("no reports to grid")

    qps_axis = tuple(sorted(qps_values))
    labels = sorted(configs)

    rows = []
    for alpha in alphas:
        row = []
        for qps in qps_axis:
            per_config: dict[str, float | None] = {}
            for label in labels:
                rep = by_key.get((label, qps, alpha))
                per_config[label] = rep.cfu_g_per_token if rep is not None else None
            ranked = _rank_defined(per_config)
            greenest = ranked[0][1] if ranked else None
            savings = None
            if len(ranked) >= 2 and ranked[1][0] > 0:
                savings = carbon_savings(ranked[1][0], ranked[0][0])
            row.append(GridCell(qps=qps, alpha=alpha, per_config=per_config,
                                greenest=greenest, savings_pct=savings))
        rows.append(tuple(row))

    return ComparisonGrid(qps_axis=qps_axis, alpha_axis=alphas,
                          beta=beta, gamma=gamma, cells=tuple(rows))


# ---------------------------------------------------------------------------
# Emission
# ---------------------------------------------------------------------------


def emit_grid(grid: ComparisonGrid, format: str) -> str:
    if format == "csv":
        return _emit_csv(grid)
    if format == "json":
        return _emit_json(grid)
    if format == "svg":
        return _emit_svg(grid)
    raise ValueError(f"unsupported grid format {format!r}")


def _emit_csv(grid: ComparisonGrid) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    configs = grid.configs
    writer.writerow(["qps", "alpha", *configs, "greenest", "savings_pct"])
    for qps in grid.qps_axis:
        for alpha in grid.alpha_axis:
            cell = grid.cell(qps, alpha)
            row: list = [repr(qps), repr(alpha)]
            for label in configs:
                v = cell.per_config.get(label)
                row.append("" if v is None else repr(v))
            row.append(cell.greenest or "")
            row.append("" if cell.savings_pct is None else repr(cell.savings_pct))
            writer.writerow(row)
    return buf.getvalue()


def _cell_to_dict(cell: GridCell) -> dict:
    return {
        "qps": cell.qps,
        "alpha": cell.alpha,
        "per_config": dict(sorted(cell.per_config.items())),
        "greenest": cell.greenest,
        "savings_pct": cell.savings_pct,
    }


def grid_to_dict(grid: ComparisonGrid) -> dict:
    return {
        "qps_axis": list(grid.qps_axis),
        "alpha_axis": list(grid.alpha_axis),
        "beta": grid.beta,
        "gamma": grid.gamma,
        "cells": [[_cell_to_dict(c) for c in row] for row in grid.cells],
    }


def _emit_json(grid: ComparisonGrid) -> str:
    return json.dumps(grid_to_dict(grid), indent=2)


def parse_grid(text: str) -> ComparisonGrid:
    """Inverse of the json emission; parse(emit(grid)) == grid."""
    try:
        obj = json.loads(text)
    except json.JSONDecodeError as exc:
        raise GridError(f"malformed grid json: {exc.msg}") from exc
    try:
        cells = tuple(
            tuple(GridCell(qps=float(c["qps"]), alpha=float(c["alpha"]),
                           per_config={str(k): (float(v) if v is not None else None)
                                       for k, v in c["per_config"].items()},
                           greenest=c["greenest"],
                           savings_pct=(float(c["savings_pct"])
                                        if c["savings_pct"] is not None else None))
                  for c in row)
            for row in obj["cells"])
        return ComparisonGrid(
            qps_axis=tuple(float(q) for q in obj["qps_axis"]),
            alpha_axis=tuple(float(a) for a in obj["alpha_axis"]),
            beta=float(obj["beta"]),
            gamma=float(obj["gamma"]),
            cells=cells,
        )
    except (KeyError, TypeError, ValueError) as exc:
        raise GridError(f"grid json missing or mistyped field: {exc}") from exc


def parse_grid_csv(text: str, beta: float, gamma: float) -> ComparisonGrid:
    """Inverse of the csv emission, up to the beta/gamma context the csv does
    not carry; emitted floats use repr so values survive exactly."""
    rows = list(csv.reader(io.StringIO(text)))
    if not rows or rows[0][:2] != ["qps", "alpha"] or rows[0][-2:] != ["greenest", "savings_pct"]:
        raise GridError("csv header does not look like an emitted grid")
    configs = rows[0][2:-2]
    cells_by_key: dict[tuple[float, float], GridCell] = {}
    for row in rows[1:]:
        if len(row) != len(rows[0]):
            raise GridError(f"csv row has {len(row)} fields, header has {len(rows[0])}")
        qps, alpha = float(row[0]), float(row[1])
        per_config: dict[str, float | None] = {
            label: (float(v) if v else None) for label, v in zip(configs, row[2:-2])}
        cells_by_key[(qps, alpha)] = GridCell(
            qps=qps, alpha=alpha, per_config=per_config,
            greenest=row[-2] or None,
            savings_pct=float(row[-1]) if row[-1] else None)
    qps_axis = tuple(sorted({k[0] for k in cells_by_key}))
    alpha_axis = tuple(sorted({k[1] for k in cells_by_key}))
    try:
        cells = tuple(tuple(cells_by_key[(q, a)] for q in qps_axis) for a in alpha_axis)
    except KeyError as exc:
        raise GridError(f"csv grid is not dense: missing cell {exc.args[0]}") from None
    return ComparisonGrid(qps_axis=qps_axis, alpha_axis=alpha_axis,
                          beta=beta, gamma=gamma, cells=cells)


def _round_half_up(x: float) -> int:
    return math.floor(x + 0.5)


def _emit_svg(grid: ComparisonGrid) -> str:
    """Tile heatmap: x = QPS, y = Qscore floor (alpha), tile color = greenest
    config, tile label = savings percent rounded to nearest integer."""
    tile_w, tile_h = 72, 44
    margin_l, margin_b, margin_t = 70, 56, 16
    legend_h = 22 * max(1, len(grid.configs))
    plot_w = tile_w * len(grid.qps_axis)
    plot_h = tile_h * len(grid.alpha_axis)
    width = margin_l + plot_w + 16
    height = margin_t + plot_h + margin_b + legend_h

    fill_for = {label: _PALETTE[i % len(_PALETTE)] for i, label in enumerate(grid.configs)}
    parts: list[str] = []
    parts.append(f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" '
                 f'height="{height}" viewBox="0 0 {width} {height}">')
    parts.append(f'<rect x="0" y="0" width="{width}" height="{height}" fill="#ffffff"/>')

    text_style = 'font-family="sans-serif" font-size="12"'
    for i, alpha in enumerate(grid.alpha_axis):
        # Highest alpha on top, matching the usual heatmap orientation.
        y = margin_t + (len(grid.alpha_axis) - 1 - i) * tile_h
        for j, qps in enumerate(grid.qps_axis):
            cell = grid.cells[i][j]
            x = margin_l + j * tile_w
            fill = fill_for.get(cell.greenest, _INFEASIBLE_FILL) if cell.greenest else _INFEASIBLE_FILL
            parts.append(f'<rect class="tile" x="{x}" y="{y}" width="{tile_w}" '
                         f'height="{tile_h}" fill="{fill}" stroke="#ffffff"/>')
            if cell.savings_pct is not None:
                label = f"{_round_half_up(cell.savings_pct)}%"
                parts.append(f'<text x="{x + tile_w / 2}" y="{y + tile_h / 2 + 4}" '
                             f'{text_style} fill="#ffffff" '
                             f'text-anchor="middle">{label}</text>')
        parts.append(f'<text x="{margin_l - 8}" y="{y + tile_h / 2 + 4}" {text_style} '
                     f'fill="#333333" text-anchor="end">{alpha:g}</text>')

    for j, qps in enumerate(grid.qps_axis):
        x = margin_l + j * tile_w + tile_w / 2
        parts.append(f'<text x="{x}" y="{margin_t + plot_h + 18}" {text_style} '
                     f'fill="#333333" text-anchor="middle">{qps:g}</text>')

    parts.append(f'<text x="{margin_l + plot_w / 2}" y="{margin_t + plot_h + 40}" '
                 f'{text_style} fill="#000000" text-anchor="middle">QPS</text>')
    parts.append(f'<text x="16" y="{margin_t + plot_h / 2}" {text_style} fill="#000000" '
                 f'text-anchor="middle" '
                 f'transform="rotate(-90 16 {margin_t + plot_h / 2})">Qscore</text>')

    ly = margin_t + plot_h + margin_b
    for i, label in enumerate(grid.configs):
        parts.append(f'<rect x="{margin_l}" y="{ly + i * 22}" width="14" height="14" '
                     f'fill="{fill_for[label]}"/>')
        parts.append(f'<text x="{margin_l + 20}" y="{ly + i * 22 + 11}" {text_style} '
                     f'fill="#333333">{label}</text>')

    parts.append("</svg>")
    return "\n".join(parts) + "\n"

"""CSV, SVG level-diagram and comparison-report writers."""

from __future__ import annotations

import csv
import io
import math
from collections import defaultdict
from pathlib import Path

from .config import ExperimentConfig
from .model import NCSpectraError
from .perturbation import printed_closed_form_C
from .sweep import PRINTED_REL_TOL, SpectrumRow, _rel, branch_pairs

CSV_HEADER = ["variant", "n", "m", "branch", "theta", "E_comm", "E_zeroth", "dE1", "E_total",
              "method", "oracle_E", "flags"]

WIDTH, HEIGHT = 800, 600
MARGIN_L, MARGIN_R, MARGIN_T, MARGIN_B = 80, 170, 40, 60
COLORS = {"+": "#c0392b", "-": "#2471a3", "": "#1e8449", "commutative": "#7f7f7f"}


class OutputError(NCSpectraError, OSError):
    pass


def _fmt(value) -> str:
    if value is None:
        return ""
    return repr(float(value))


def csv_text(rows) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(CSV_HEADER)
    for r in rows:
        writer.writerow([r.variant, r.n, r.m, r.branch, _fmt(r.theta), _fmt(r.E_comm), _fmt(r.E_zeroth),
                         _fmt(r.dE1), _fmt(r.E_total), r.method, _fmt(r.oracle_E), ";".join(r.flags)])
    return buf.getvalue()


def _write(path, text):
    path = Path(path)
    try:
        path.write_text(text, encoding="utf-8")
    except OSError as exc:
        raise OutputError(f"cannot write {path}: {exc.strerror}") from None
    return path


def emit_csv(rows, path) -> Path:
    """Write rows with the fixed header; floats use shortest round-trip repr."""
    if not rows:
        raise ValueError("no rows to write")
    return _write(path, csv_text(rows))


def read_csv(path) -> list[SpectrumRow]:
    """Parse a CSV written by :func:`emit_csv` (audit-only fields are not restored)."""
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        header = next(reader)
        if header != CSV_HEADER:
            raise ValueError(f"unexpected CSV header {header}")
        rows = []
        for rec in reader:
            d = dict(zip(header, rec))
            rows.append(
                SpectrumRow(
                    variant=d["variant"],
                    n=int(d["n"]),
                    m=int(d["m"]),
                    branch=d["branch"],
                    theta=float(d["theta"]),
                    E_comm=float(d["E_comm"]),
                    E_zeroth=float(d["E_zeroth"]),
                    dE1=float(d["dE1"]),
                    E_total=float(d["E_total"]),
                    method=d["method"],
                    oracle_E=float(d["oracle_E"]) if d["oracle_E"] else None,
                    flags=tuple(f for f in d["flags"].split(";") if f),
                )
            )
    return rows


# -- SVG --------------------------------------------------------------------


def _series(rows):
    groups = defaultdict(list)
    for r in rows:
        groups[(r.n, r.m, r.branch)].append(r)
    for pts in groups.values():
        pts.sort(key=lambda r: r.theta)
    return dict(sorted(groups.items(), key=lambda kv: (kv[0][0], kv[0][1], kv[0][2] == "+")))


def svg_text(rows, title: str = "Energy levels") -> str:
    """Level diagram: one polyline per (n, m, branch) across theta, colored by branch.

    Each theta column carries a short horizontal tick at the level; a dashed grey
    line marks the commutative level of every (n, m) group.
    """
    rows = list(rows)
    thetas = sorted({r.theta for r in rows})
    energies = [r.E_total for r in rows if math.isfinite(r.E_total)]
    energies += [r.E_comm for r in rows if math.isfinite(r.E_comm)]
    lo, hi = (min(energies), max(energies)) if energies else (0.0, 1.0)
    if hi - lo < 1e-12 * max(1.0, abs(hi)):
        lo, hi = lo - 0.5, hi + 0.5
    pad = 0.05 * (hi - lo)
    lo, hi = lo - pad, hi + pad
    plot_w = WIDTH - MARGIN_L - MARGIN_R
    plot_h = HEIGHT - MARGIN_T - MARGIN_B
    t_lo, t_hi = thetas[0], thetas[-1]
    tick = 24.0 if len(thetas) == 1 else min(24.0, 0.4 * plot_w / (len(thetas) - 1))

    def x_of(theta):
        if t_hi == t_lo:
            return MARGIN_L + 0.5 * plot_w
        return MARGIN_L + tick + (plot_w - 2 * tick) * (theta - t_lo) / (t_hi - t_lo)

    def y_of(energy):
        return MARGIN_T + plot_h * (hi - energy) / (hi - lo)

    out = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" '
        f'viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="12">',
        f'<rect x="0" y="0" width="{WIDTH}" height="{HEIGHT}" fill="#ffffff"/>',
        f'<text x="{WIDTH / 2:.2f}" y="24" text-anchor="middle" font-size="15">{title}</text>',
        f'<rect x="{MARGIN_L}" y="{MARGIN_T}" width="{plot_w}" height="{plot_h}" '
        'fill="none" stroke="#000000" stroke-width="1"/>',
    ]
    # axes ticks
    for i in range(6):
        e = lo + (hi - lo) * i / 5
        y = y_of(e)
        out.append(f'<line x1="{MARGIN_L - 5}" y1="{y:.2f}" x2="{MARGIN_L}" y2="{y:.2f}" stroke="#000000"/>')
        out.append(f'<text x="{MARGIN_L - 8}" y="{y + 4:.2f}" text-anchor="end">{e:.4g}</text>')
    for t in thetas:
        x = x_of(t)
        y = MARGIN_T + plot_h
        out.append(f'<line x1="{x:.2f}" y1="{y}" x2="{x:.2f}" y2="{y + 5}" stroke="#000000"/>')
        out.append(f'<text x="{x:.2f}" y="{y + 18}" text-anchor="middle">{t:.4g}</text>')
    out.append(f'<text x="{MARGIN_L + plot_w / 2:.2f}" y="{HEIGHT - 15}" text-anchor="middle">theta</text>')
    out.append(f'<text x="20" y="{MARGIN_T + plot_h / 2:.2f}" text-anchor="middle" '
               f'transform="rotate(-90 20 {MARGIN_T + plot_h / 2:.2f})">energy</text>')

    x0, x1 = MARGIN_L, MARGIN_L + plot_w
    drawn_comm = set()
    for (n, m, branch), pts in _series(rows).items():
        if (n, m) not in drawn_comm and math.isfinite(pts[0].E_comm):
            drawn_comm.add((n, m))
            y = y_of(pts[0].E_comm)
            out.append(f'<line class="commutative" x1="{x0}" y1="{y:.2f}" x2="{x1}" y2="{y:.2f}" '
                       f'stroke="{COLORS["commutative"]}" stroke-dasharray="4 3" stroke-width="1"/>')
            out.append(f'<text x="{x1 + 6}" y="{y + 4:.2f}" fill="{COLORS["commutative"]}">n={n}, m={m}</text>')
        color = COLORS[branch]
        finite = [p for p in pts if math.isfinite(p.E_total)]
        label = f"n={n} m={m}" + (f" {branch}" if branch else "")
        if len(finite) > 1:
            coords = " ".join(f"{x_of(p.theta):.2f},{y_of(p.E_total):.2f}" for p in finite)
            out.append(f'<polyline class="fan" data-level="{label}" points="{coords}" fill="none" '
                       f'stroke="{color}" stroke-width="1" stroke-opacity="0.6"/>')
        for p in finite:
            x, y = x_of(p.theta), y_of(p.E_total)
            out.append(f'<line class="level" data-level="{label}" x1="{x - tick / 2:.2f}" y1="{y:.2f}" '
                       f'x2="{x + tick / 2:.2f}" y2="{y:.2f}" stroke="{color}" stroke-width="2.5"/>')

    legend = [("commutative level", COLORS["commutative"])]
    branches = sorted({r.branch for r in rows})
    if "" in branches:
        legend.append(("canonical", COLORS[""]))
    if "+" in branches:
        legend.append(("branch s_z = +1/2", COLORS["+"]))
    if "-" in branches:
        legend.append(("branch s_z = -1/2", COLORS["-"]))
    lx, ly = WIDTH - MARGIN_R + 10, HEIGHT - MARGIN_B - 18 * len(legend) - 10
    out.append(f'<g class="legend"><rect x="{lx - 5}" y="{ly - 14}" width="{MARGIN_R - 15}" '
               f'height="{18 * len(legend) + 8}" fill="#ffffff" stroke="#999999"/>')
    for i, (name, color) in enumerate(legend):
        y = ly + 18 * i
        out.append(f'<line x1="{lx}" y1="{y - 4}" x2="{lx + 18}" y2="{y - 4}" stroke="{color}" stroke-width="2.5"/>')
        out.append(f'<text x="{lx + 24}" y="{y}">{name}</text>')
    out.append("</g>")
    out.append("</svg>")
    return "\n".join(out) + "\n"


def emit_svg(rows, path, title: str = "Energy levels") -> Path:
    if not rows:
        raise ValueError("no rows to draw")
    return _write(path, svg_text(rows, title))


# -- report -----------------------------------------------------------------


def _g(x):
    if x is None:
        return "n/a"
    if isinstance(x, float) and math.isinf(x):
        return "divergent"
    return f"{x:.10g}"


def discrepancy_rows(rows, tol: float = PRINTED_REL_TOL):
    """Rows whose printed-formula values differ from the reference by more than ``tol``."""
    out = []
    for r in rows:
        items = {
            "E_comm": (r.printed_E_comm, r.E_comm),
            "dE1": (r.printed_dE1, r.reference_dE1),
            "E_total": (r.printed_E_total, r.reference_E_total),
        }
        diffs = {k: _rel(p, q) for k, (p, q) in items.items() if not (math.isnan(p) and math.isnan(q))}
        bad = {k: v for k, v in diffs.items() if v > tol}
        if bad:
            out.append((r, bad))
    return out


def closed_form_audit(config: ExperimentConfig):
    """ClosedFormComparison for every (n, m) and both delta conventions."""
    audits = []
    for n in config.n_range:
        for m in config.m_range:
            for label, delta in (("1/2+m", 0.5 + m), ("m", float(m))):
                try:
                    cmp = printed_closed_form_C(config.params, n, m, delta)
                except NCSpectraError as exc:
                    audits.append((n, m, label, None, str(exc)))
                    continue
                audits.append((n, m, label, cmp, None))
    return audits


def report_text(rows, config: ExperimentConfig, figures=()) -> str:
    p = config.params
    nc = config.nc
    lines = [
        "# Noncommutative spectrum report",
        "",
        f"Potential: V(r) = {p.c!r}/r + {p.a!r} r + {p.b!r} r^2  (hbar = 1, 2M = 1)",
        f"Variant: {nc.variant.value}; a-term mode: {nc.a_term_mode.value}; "
        f"closed-form mode: {nc.closed_form_mode.value}",
        f"theta values: {', '.join(repr(t) for t in config.theta_values)}",
        f"Rows: {len(rows)}",
        "",
    ]
    if figures:
        lines += ["## Figures", ""]
        lines += [f"![{Path(f).stem}]({Path(f).name})" for f in figures]
        lines.append("")

    lines += ["## Commutative energies", "",
              "| n | m | termination E | 2 sqrt(b)(1+m+n) | rel. diff | oracle E | flags |",
              "|---|---|---|---|---|---|---|"]
    seen = set()
    for r in rows:
        if (r.n, r.m) in seen:
            continue
        seen.add((r.n, r.m))
        flags = ", ".join(f for f in r.flags if not f.startswith("printed-closed") and not f.startswith("error"))
        lines.append(f"| {r.n} | {r.m} | {_g(r.E_comm)} | {_g(r.printed_E_comm)} | "
                     f"{_rel(r.E_comm, r.printed_E_comm):.3e} | {_g(r.oracle_E)} | {flags} |")
    lines.append("")

    pairs = branch_pairs(rows)
    if pairs:
        lines += ["## Branch splitting", "", "| theta | n | m | E(+) - E(-) |", "|---|---|---|---|"]
        for (theta, n, m), (minus, plus) in sorted(pairs.items()):
            lines.append(f"| {theta!r} | {n} | {m} | {_g(plus.E_total - minus.E_total)} |")
        lines.append("")

    errors = [r for r in rows if r.error]
    if errors:
        lines += ["## Row failures", ""]
        for r in errors:
            lines.append(f"- theta={r.theta!r} n={r.n} m={r.m} branch={r.branch or '.'}: {r.error}")
        lines.append("")

    lines += ["## Discrepancies: printed formulas vs reference", "",
              f"Reference: termination energy, expanded a-term, quadrature integrals. "
              f"Listed when the relative difference exceeds {PRINTED_REL_TOL:g}.", "",
              "| theta | n | m | branch | quantity | printed | reference | rel. diff |",
              "|---|---|---|---|---|---|---|---|"]
    for r, bad in discrepancy_rows(rows):
        values = {"E_comm": (r.printed_E_comm, r.E_comm), "dE1": (r.printed_dE1, r.reference_dE1),
                  "E_total": (r.printed_E_total, r.reference_E_total)}
        for name, rel in bad.items():
            printed, ref = values[name]
            lines.append(f"| {r.theta!r} | {r.n} | {r.m} | {r.branch or '.'} | {name} | {_g(printed)} | "
                         f"{_g(ref)} | {rel:.3e} |")
    lines.append("")

    lines += ["## Closed-form audit", "",
              "Energy coefficient of the c-term (shift per unit theta*mu). The printed forms are "
              "evaluated verbatim; C_0 and A_n enter the levels as C_0 and -2 A_n.", "",
              "| n | m | delta | printed inverse-square integral (x pi c) | printed C_0 | printed -2 A_n | "
              "completed square | quadrature | worst printed rel. diff |",
              "|---|---|---|---|---|---|---|---|---|"]
    for n, m, label, cmp, err in closed_form_audit(config):
        if cmp is None:
            lines.append(f"| {n} | {m} | {label} | {err} | | | | | |")
            continue
        disc = cmp.discrepancies()
        worst = max((v for k, v in disc.items() if k.startswith("printed")), default=0.0)
        lines.append(f"| {n} | {m} | {label} | {_g(cmp.printed_inverse_square)} | {_g(cmp.printed_c0)} | "
                     f"{_g(cmp.printed_a_n)} | {_g(cmp.completed_square)} | {_g(cmp.quadrature)} | "
                     f"{worst:.3e} |")
    lines.append("")
    return "\n".join(lines)


def emit_report(rows, path, config: ExperimentConfig, figures=()) -> Path:
    if not rows:
        raise ValueError("no rows to report")
    return _write(path, report_text(rows, config, figures))

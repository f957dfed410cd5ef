"""Figure parameter sets and four-panel SVG rendering of closed trajectories."""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import UnknownFigureId
from .hyperbolic import cayley_to_disk
from .periodicity import kajigaya_strength, legendre_branch_count, phase_period, quantized_strength
from .trajectories import MagneticParams, legendre_trajectory, reconstruct_curve

TORUS_R = 2.0
TORUS_RHO = 1.0
PANEL = 300.0
MARGIN = 18.0


@dataclass(frozen=True)
class FigureSpec:
    fig_id: str
    m: int
    k: int
    sigma: float
    h: int | None = None

    @property
    def legendre(self) -> bool:
        return self.h is not None


FIGURES = {
    "L1": FigureSpec("L1", 1, 3, math.pi / 2, 0),
    "L2": FigureSpec("L2", 3, 5, math.pi / 2, 2),
    "L3": FigureSpec("L3", 2, 7, math.pi / 2, 3),
    "M4": FigureSpec("M4", 1, 3, 2 * math.pi / 5),
    "M5": FigureSpec("M5", 3, 5, math.pi / 3),
}


def figure_spec(fig_id: str) -> FigureSpec:
    try:
        return FIGURES[fig_id]
    except KeyError:
        raise UnknownFigureId(f"unknown figure id {fig_id!r}; choose from {sorted(FIGURES)}") from None


@dataclass
class FigureCurve:
    spec: FigureSpec
    q: float
    s: np.ndarray
    xyt: np.ndarray
    n_periods: int
    period: float


def figure_curve(fig_id: str, samples: int = 2000) -> FigureCurve:
    """The closed trajectory for a figure, sampled over one full closing span."""
    spec = figure_spec(fig_id)
    if spec.legendre:
        q = kajigaya_strength(spec.m, spec.k)
        curve = legendre_trajectory(q)
        n = legendre_branch_count(spec.m, spec.k) + 1
        T = curve.period
    else:
        cert = quantized_strength(spec.m, spec.k, spec.sigma)
        q = cert.q_values[0]
        curve = reconstruct_curve(MagneticParams(q, spec.sigma))
        T = phase_period(MagneticParams(q, spec.sigma))
        n = round(cert.T_total[0] / T)
    s = np.linspace(0.0, n * T, samples)
    return FigureCurve(spec, q, s, curve(s), n, T)


def _fit(points: np.ndarray, x0: float, equal: bool = True) -> np.ndarray:
    lo, hi = points.min(axis=0), points.max(axis=0)
    span = np.maximum(hi - lo, 1e-12)
    inner = PANEL - 2 * MARGIN
    sx, sy = inner / span
    if equal:
        sx = sy = min(sx, sy)
    cx, cy = (lo + hi) / 2
    px = x0 + PANEL / 2 + (points[:, 0] - cx) * sx
    py = PANEL / 2 - (points[:, 1] - cy) * sy
    return np.column_stack([px, py]), (cx, cy, sx, sy)


def _polyline(pts: np.ndarray, stroke: str, width: float = 1.0) -> str:
    coords = " ".join(f"{x:.6f},{y:.6f}" for x, y in pts)
    return f'<polyline fill="none" stroke="{stroke}" stroke-width="{width}" points="{coords}"/>'


def _torus_view(u, v, theta, azimuth: float, elevation: float) -> np.ndarray:
    rad = TORUS_R + TORUS_RHO * u
    X, Y, Z = rad * np.cos(theta), rad * np.sin(theta), TORUS_RHO * v
    ca, sa = math.cos(azimuth), math.sin(azimuth)
    X1, Y1 = ca * X - sa * Y, sa * X + ca * Y
    ce, se = math.cos(elevation), math.sin(elevation)
    return np.column_stack([X1, Z * ce - Y1 * se])


def render_svg(fc: FigureCurve) -> str:
    """Four panels: half plane, Cayley disk, two views of the solid torus."""
    x, y, theta = fc.xyt.T
    u, v = cayley_to_disk(x, y)
    parts = []
    hp, _ = _fit(np.column_stack([x, y]), 0.0)
    parts.append(_polyline(hp, "#1f4e9a"))
    circ = np.linspace(0, 2 * np.pi, 241)
    unit = np.column_stack([np.cos(circ), np.sin(circ)])
    disk_all, _ = _fit(np.vstack([unit, np.column_stack([u, v])]), PANEL)
    parts.append(_polyline(disk_all[: len(unit)], "#999999", 0.5))
    parts.append(_polyline(disk_all[len(unit):], "#1f4e9a"))
    for i, (az, el) in enumerate([(0.5, 0.6), (0.5, 1.3)]):
        core = _torus_view(np.zeros_like(circ), np.zeros_like(circ), circ, az, el)
        # cos/sin make theta mod 2pi implicit; the unwrapped value keeps the polyline unbroken
        pts = _torus_view(u, v, theta, az, el)
        both, _ = _fit(np.vstack([core, pts]), PANEL * (2 + i))
        parts.append(_polyline(both[: len(core)], "#999999", 0.5))
        parts.append(_polyline(both[len(core):], "#9a1f3a"))
    s = fc.spec
    label = f"{s.fig_id}: m={s.m}, k={s.k}, sigma={s.sigma:.6f}, q={fc.q:.6f}, periods={fc.n_periods}"
    if s.h is not None:
        label += f", h={s.h}"
    frames = "".join(
        f'<rect x="{PANEL * i:.6f}" y="0.000000" width="{PANEL:.6f}" height="{PANEL:.6f}" '
        f'fill="none" stroke="#cccccc"/>' for i in range(4)
    )
    width = 4 * PANEL
    return (
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width:.0f}" height="{PANEL + 24:.0f}" '
        f'viewBox="0 0 {width:.6f} {PANEL + 24:.6f}">\n'
        f"<desc>{label}</desc>\n{frames}\n" + "\n".join(parts) +
        f'\n<text x="6.000000" y="{PANEL + 16:.6f}" font-family="monospace" font-size="12">{label}</text>\n'
        "</svg>\n"
    )

"""The four billiard generating functions over a support-function domain.

All four models share one configuration space: the support angle phi with
period 2*pi.  Orbit polygons are recovered per model:

  birkhoff    S(x0,x1) = -2 h(m) sin(d),  m = (x0+x1)/2, d = (x1-x0)/2.
              Configuration values are chord coordinates; the polygon vertex
              between chords k and k+1 sits at the mean angle m_k, and
              -sum S equals the polygon perimeter for every admissible
              periodic configuration.
  symplectic  S(t0,t1) = -1/2 w(gamma(t0), gamma(t1)); configuration values
              are vertex angles; -sum S is the inscribed polygon area.
  outer       per-edge summand = area of the wedge O, gamma(x0), M, gamma(x1)
              where M is the tangent intersection; sum = circumscribed
              polygon area.
  fourth      S(x0,x1) = lambda0 + lambda1, the two tangent segment lengths
              from M; sum = circumscribed polygon perimeter.

The twist condition S12 < 0 holds on each model's admissible strip.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .geometry import SupportDomain, boundary_xy, eval_support
from .twist import Configuration, TwistSystem

TWO_PI = 2.0 * math.pi

MODEL_TAGS = ("birkhoff", "symplectic", "outer", "fourth")


def _cross(ax, ay, bx, by):
    return ax * by - ay * bx


def make_system(dom: SupportDomain, tag: str) -> TwistSystem:
    if tag == "birkhoff":
        return _birkhoff_system(dom)
    if tag == "symplectic":
        return _symplectic_system(dom)
    if tag == "outer":
        return _outer_system(dom)
    if tag == "fourth":
        return _fourth_system(dom)
    raise ValueError(f"unknown model tag: {tag!r}")


def _birkhoff_system(dom: SupportDomain) -> TwistSystem:
    h = lambda x, k=0: eval_support(dom, x, k)

    def parts(x0, x1):
        m = 0.5 * (np.asarray(x0) + np.asarray(x1))
        d = 0.5 * (np.asarray(x1) - np.asarray(x0))
        return m, np.sin(d), np.cos(d)

    def S(x0, x1):
        m, s, c = parts(x0, x1)
        return -2.0 * h(m) * s

    def S1(x0, x1):
        m, s, c = parts(x0, x1)
        return -h(m, 1) * s + h(m) * c

    def S2(x0, x1):
        m, s, c = parts(x0, x1)
        return -h(m, 1) * s - h(m) * c

    def S11(x0, x1):
        m, s, c = parts(x0, x1)
        return 0.5 * (-h(m, 2) * s + 2.0 * h(m, 1) * c + h(m) * s)

    def S22(x0, x1):
        m, s, c = parts(x0, x1)
        return 0.5 * (-h(m, 2) * s - 2.0 * h(m, 1) * c + h(m) * s)

    def S12(x0, x1):
        m, s, c = parts(x0, x1)
        return -0.5 * (h(m) + h(m, 2)) * s

    return TwistSystem(TWO_PI, TWO_PI, S, S1, S2, S11, S12, S22, name="birkhoff")


def _gamma_jets(dom, t):
    """gamma, gamma', gamma'' components at support angle t."""
    t = np.asarray(t, dtype=float)
    h0 = eval_support(dom, t, 0)
    h1 = eval_support(dom, t, 1)
    r = h0 + eval_support(dom, t, 2)
    rp = h1 + eval_support(dom, t, 3)
    c, s = np.cos(t), np.sin(t)
    gx, gy = h0 * c - h1 * s, h0 * s + h1 * c
    dx, dy = -r * s, r * c
    ddx, ddy = -rp * s - r * c, rp * c - r * s
    return (gx, gy), (dx, dy), (ddx, ddy)


def _symplectic_system(dom: SupportDomain) -> TwistSystem:
    def S(x0, x1):
        (g0x, g0y), _, _ = _gamma_jets(dom, x0)
        (g1x, g1y), _, _ = _gamma_jets(dom, x1)
        return -0.5 * _cross(g0x, g0y, g1x, g1y)

    def S1(x0, x1):
        _, (d0x, d0y), _ = _gamma_jets(dom, x0)
        (g1x, g1y), _, _ = _gamma_jets(dom, x1)
        return -0.5 * _cross(d0x, d0y, g1x, g1y)

    def S2(x0, x1):
        (g0x, g0y), _, _ = _gamma_jets(dom, x0)
        _, (d1x, d1y), _ = _gamma_jets(dom, x1)
        return -0.5 * _cross(g0x, g0y, d1x, d1y)

    def S11(x0, x1):
        _, _, (q0x, q0y) = _gamma_jets(dom, x0)
        (g1x, g1y), _, _ = _gamma_jets(dom, x1)
        return -0.5 * _cross(q0x, q0y, g1x, g1y)

    def S12(x0, x1):
        _, (d0x, d0y), _ = _gamma_jets(dom, x0)
        _, (d1x, d1y), _ = _gamma_jets(dom, x1)
        return -0.5 * _cross(d0x, d0y, d1x, d1y)

    def S22(x0, x1):
        (g0x, g0y), _, _ = _gamma_jets(dom, x0)
        _, _, (q1x, q1y) = _gamma_jets(dom, x1)
        return -0.5 * _cross(g0x, g0y, q1x, q1y)

    return TwistSystem(TWO_PI, math.pi, S, S1, S2, S11, S12, S22, name="symplectic")


def _tangent_wedge(dom, x0, x1):
    """Support values and tangent-segment lengths at a tangent-line pair.

    Returns h and derivatives at both angles, trig of the gap, and the
    signed lengths lambda0 = |M - gamma(x0)|, lambda1 = |gamma(x1) - M| where
    M is the intersection of the two tangent lines (positive for gaps in
    (0, pi) on a strictly convex domain).
    """
    x0 = np.asarray(x0, dtype=float)
    x1 = np.asarray(x1, dtype=float)
    g0 = [eval_support(dom, x0, k) for k in range(4)]
    g1 = [eval_support(dom, x1, k) for k in range(4)]
    delta = x1 - x0
    s, c = np.sin(delta), np.cos(delta)
    inv_s = 1.0 / s
    cot = c * inv_s
    lam0 = -g0[1] + g1[0] * inv_s - g0[0] * cot
    lam1 = g1[1] + g0[0] * inv_s - g1[0] * cot
    return g0, g1, s, c, inv_s, cot, lam0, lam1


def _lambda_partials(g0, g1, s, c, inv_s, cot):
    """First partials of lambda0, lambda1 in (x0, x1)."""
    p = inv_s * inv_s
    cp = c * p
    a = -g0[2] + g1[0] * cp - g0[1] * cot - g0[0] * p  # d lam0 / d x0
    b = g1[1] * inv_s - g1[0] * cp + g0[0] * p  # d lam0 / d x1
    cc = g0[1] * inv_s + g0[0] * cp - g1[0] * p  # d lam1 / d x0
    d = g1[2] - g0[0] * cp - g1[1] * cot + g1[0] * p  # d lam1 / d x1
    return a, b, cc, d, p, cp


def _lambda_second_partials(g0, g1, s, c, inv_s, cot, p, cp):
    """Second partials of lambda0, lambda1; e = 1/s + 2 c^2 / s^3, f = 2 c / s^3."""
    e = inv_s + 2.0 * c * cp * inv_s
    f = 2.0 * cp * inv_s
    a00 = -g0[3] + g1[0] * e - g0[2] * cot - 2.0 * g0[1] * p - g0[0] * f
    a01 = g1[1] * cp - g1[0] * e + g0[1] * p + g0[0] * f
    b11 = g1[2] * inv_s - 2.0 * g1[1] * cp + g1[0] * e - g0[0] * f
    c00 = g0[2] * inv_s + 2.0 * g0[1] * cp + g0[0] * e - g1[0] * f
    c01 = -g0[1] * cp - g0[0] * e - g1[1] * p + g1[0] * f
    d11 = g1[3] + g0[0] * e - g1[2] * cot + 2.0 * g1[1] * p - g1[0] * f
    return a00, a01, b11, c00, c01, d11


def _outer_system(dom: SupportDomain) -> TwistSystem:
    # per-edge area of the wedge (O, gamma(x0), M, gamma(x1)):
    #   S = (h(x0) lam0 + h(x1) lam1) / 2, summing to the circumscribed area.
    def S(x0, x1):
        g0, g1, *_, lam0, lam1 = _tangent_wedge(dom, x0, x1)
        return 0.5 * (g0[0] * lam0 + g1[0] * lam1)

    def S1(x0, x1):
        g0, g1, s, c, inv_s, cot, lam0, lam1 = _tangent_wedge(dom, x0, x1)
        a, b, cc, d, _, _ = _lambda_partials(g0, g1, s, c, inv_s, cot)
        return 0.5 * (g0[1] * lam0 + g0[0] * a + g1[0] * cc)

    def S2(x0, x1):
        g0, g1, s, c, inv_s, cot, lam0, lam1 = _tangent_wedge(dom, x0, x1)
        a, b, cc, d, _, _ = _lambda_partials(g0, g1, s, c, inv_s, cot)
        return 0.5 * (g0[0] * b + g1[1] * lam1 + g1[0] * d)

    def S11(x0, x1):
        g0, g1, s, c, inv_s, cot, lam0, lam1 = _tangent_wedge(dom, x0, x1)
        a, b, cc, d, p, cp = _lambda_partials(g0, g1, s, c, inv_s, cot)
        a00, a01, b11, c00, c01, d11 = _lambda_second_partials(g0, g1, s, c, inv_s, cot, p, cp)
        return 0.5 * (g0[2] * lam0 + 2.0 * g0[1] * a + g0[0] * a00 + g1[0] * c00)

    def S12(x0, x1):
        g0, g1, s, c, inv_s, cot, lam0, lam1 = _tangent_wedge(dom, x0, x1)
        a, b, cc, d, p, cp = _lambda_partials(g0, g1, s, c, inv_s, cot)
        a00, a01, b11, c00, c01, d11 = _lambda_second_partials(g0, g1, s, c, inv_s, cot, p, cp)
        return 0.5 * (g0[1] * b + g0[0] * a01 + g1[1] * cc + g1[0] * c01)

    def S22(x0, x1):
        g0, g1, s, c, inv_s, cot, lam0, lam1 = _tangent_wedge(dom, x0, x1)
        a, b, cc, d, p, cp = _lambda_partials(g0, g1, s, c, inv_s, cot)
        a00, a01, b11, c00, c01, d11 = _lambda_second_partials(g0, g1, s, c, inv_s, cot, p, cp)
        return 0.5 * (g0[0] * b11 + g1[2] * lam1 + 2.0 * g1[1] * d + g1[0] * d11)

    return TwistSystem(TWO_PI, math.pi, S, S1, S2, S11, S12, S22, name="outer")


def _fourth_system(dom: SupportDomain) -> TwistSystem:
    h = lambda x, k=0: eval_support(dom, x, k)

    def trig(x0, x1):
        half = 0.5 * (np.asarray(x1) - np.asarray(x0))
        tan = np.tan(half)
        sec2 = 1.0 + tan * tan
        return tan, sec2

    def S(x0, x1):
        tan, _ = trig(x0, x1)
        return h(x1, 1) - h(x0, 1) + (h(x0) + h(x1)) * tan

    def S1(x0, x1):
        tan, sec2 = trig(x0, x1)
        return -h(x0, 2) + h(x0, 1) * tan - 0.5 * (h(x0) + h(x1)) * sec2

    def S2(x0, x1):
        tan, sec2 = trig(x0, x1)
        return h(x1, 2) + h(x1, 1) * tan + 0.5 * (h(x0) + h(x1)) * sec2

    def S11(x0, x1):
        tan, sec2 = trig(x0, x1)
        return -h(x0, 3) + h(x0, 2) * tan - h(x0, 1) * sec2 + 0.5 * (h(x0) + h(x1)) * sec2 * tan

    def S12(x0, x1):
        tan, sec2 = trig(x0, x1)
        return 0.5 * sec2 * (h(x0, 1) - h(x1, 1)) - 0.5 * (h(x0) + h(x1)) * sec2 * tan

    def S22(x0, x1):
        tan, sec2 = trig(x0, x1)
        return h(x1, 3) + h(x1, 2) * tan + h(x1, 1) * sec2 + 0.5 * (h(x0) + h(x1)) * sec2 * tan

    return TwistSystem(TWO_PI, math.pi, S, S1, S2, S11, S12, S22, name="fourth")


def beta_disk(tag: str, rho: float) -> float:
    """Closed-form beta of the unit disk for each model."""
    if tag == "birkhoff":
        if not 0.0 < rho <= 0.5:
            raise ValueError("rotation number out of range")
        return -2.0 * math.sin(math.pi * rho)
    if not 0.0 < rho < 0.5 and tag in ("outer", "fourth"):
        raise ValueError("rotation number out of range")
    if tag == "outer":
        return math.tan(math.pi * rho)
    if tag == "symplectic":
        if not 0.0 < rho <= 0.5:
            raise ValueError("rotation number out of range")
        return -0.5 * math.sin(2.0 * math.pi * rho)
    if tag == "fourth":
        return 2.0 * math.tan(math.pi * rho)
    raise ValueError(f"unknown model tag: {tag!r}")


@dataclass(frozen=True)
class OuterPolygon:
    vertices: np.ndarray
    area: float


def tangent_intersection(dom: SupportDomain, t0, t1):
    """Intersection of the tangent lines at support angles t0, t1 (gap < pi)."""
    h0 = eval_support(dom, t0, 0)
    h1 = eval_support(dom, t1, 0)
    s = np.sin(np.asarray(t1) - np.asarray(t0))
    x = (h0 * np.sin(t1) - h1 * np.sin(t0)) / s
    y = (h1 * np.cos(t0) - h0 * np.cos(t1)) / s
    return np.stack([x, y], axis=-1)


def outer_polygon(dom: SupportDomain, cfg: Configuration) -> OuterPolygon:
    """Circumscribed polygon of a tangency configuration and its signed area."""
    x = cfg.points
    xn = np.append(x[1:], x[0] + cfg.winding * TWO_PI)
    gaps = xn - x
    if gaps.min() <= 0.0 or gaps.max() >= math.pi:
        raise ValueError("gap violation")
    verts = tangent_intersection(dom, x, xn)
    nxt = np.roll(verts, -1, axis=0)
    signed = 0.5 * float(np.sum(verts[:, 0] * nxt[:, 1] - verts[:, 1] * nxt[:, 0]))
    return OuterPolygon(verts, signed)


def polygon_perimeter(vertices: np.ndarray) -> float:
    nxt = np.roll(vertices, -1, axis=0)
    return float(np.sqrt(((nxt - vertices) ** 2).sum(axis=1)).sum())


def polygon_area(vertices: np.ndarray) -> float:
    nxt = np.roll(vertices, -1, axis=0)
    return 0.5 * float(np.sum(vertices[:, 0] * nxt[:, 1] - vertices[:, 1] * nxt[:, 0]))


def config_vertices(dom: SupportDomain, tag: str, cfg: Configuration) -> np.ndarray:
    """Orbit polygon vertices of a configuration, per model convention."""
    if tag == "birkhoff":
        x = cfg.points
        xn = np.append(x[1:], x[0] + cfg.winding * TWO_PI)
        return boundary_xy(dom, 0.5 * (x + xn))
    if tag == "symplectic":
        return boundary_xy(dom, cfg.points)
    if tag in ("outer", "fourth"):
        return outer_polygon(dom, cfg).vertices
    raise ValueError(f"unknown model tag: {tag!r}")


# ---------------------------------------------------------------------------
# forward maps
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ChordState:
    """Birkhoff state: boundary support angle and incidence angle in (0, pi)."""

    phi: float
    alpha: float


def _bisect_newton(f, lo, hi, flo, df=None, iters=80):
    for _ in range(iters):
        mid = 0.5 * (lo + hi)
        fm = f(mid)
        if (fm > 0) == (flo > 0):
            lo, flo = mid, fm
        else:
            hi = mid
        if hi - lo < 1e-13:
            break
    root = 0.5 * (lo + hi)
    if df is not None:
        for _ in range(4):
            fr, dr = f(root), df(root)
            if dr == 0:
                break
            step = fr / dr
            new = root - step
            if not lo <= new <= hi:
                break
            root = new
            if abs(step) < 1e-15:
                break
    return root


def _birkhoff_step(dom: SupportDomain, phi: float, alpha: float):
    c, s = math.cos(phi), math.sin(phi)
    tangent = np.array([-s, c])
    normal = np.array([c, s])
    d = math.cos(alpha) * tangent - math.sin(alpha) * normal
    p0 = boundary_xy(dom, phi)

    def f(psi):
        g = boundary_xy(dom, psi)
        return d[0] * (g[1] - p0[1]) - d[1] * (g[0] - p0[0])

    lo, hi = phi + 1e-9, phi + TWO_PI - 1e-9
    flo = f(lo)
    if (flo > 0) == (f(hi) > 0):
        raise RuntimeError("geometry error")
    psi = _bisect_newton(f, lo, hi, flo)
    t1 = np.array([-math.sin(psi), math.cos(psi)])
    n1 = np.array([math.cos(psi), math.sin(psi)])
    alpha1 = math.atan2(float(d @ n1), float(d @ t1))
    return psi, alpha1


def _symplectic_step(dom: SupportDomain, t0: float, t1: float):
    tangent = np.array([-math.sin(t1), math.cos(t1)])
    p0 = boundary_xy(dom, t0)

    def f(psi):
        g = boundary_xy(dom, psi)
        return tangent[0] * (g[1] - p0[1]) - tangent[1] * (g[0] - p0[0])

    lo, hi = t1 + 1e-9, t1 + math.pi - 1e-9
    flo = f(lo)
    if (flo > 0) == (f(hi) > 0):
        # defensive scan; strict convexity should put the root inside
        grid = np.linspace(lo, t0 + TWO_PI - 1e-9, 256)
        vals = np.array([f(g) for g in grid])
        idx = np.flatnonzero(np.sign(vals[:-1]) != np.sign(vals[1:]))
        if idx.size == 0:
            raise RuntimeError("geometry error")
        lo, hi, flo = grid[idx[0]], grid[idx[0] + 1], vals[idx[0]]
    t2 = _bisect_newton(f, lo, hi, flo)
    return t1, t2


def _outer_step(dom: SupportDomain, point: np.ndarray):
    point = np.asarray(point, dtype=float)

    def f(theta):
        return point[0] * math.cos(theta) + point[1] * math.sin(theta) - eval_support(dom, theta, 0)

    grid = np.linspace(0.0, TWO_PI, 512, endpoint=False)
    vals = point[0] * np.cos(grid) + point[1] * np.sin(grid) - eval_support(dom, grid, 0)
    nxt = np.roll(vals, -1)
    down = np.flatnonzero((vals > 0) & (nxt <= 0))  # crossing + -> - has F' < 0
    if down.size == 0:
        raise RuntimeError("geometry error")
    i = int(down[0])
    lo, hi = grid[i], grid[i] + (TWO_PI / grid.size)
    theta = _bisect_newton(f, lo, hi, f(lo))
    tangency = boundary_xy(dom, theta)
    return 2.0 * tangency - point, theta


def forward_map(dom: SupportDomain, tag: str, state):
    """One step of the billiard map; see ChordState / (t0, t1) / point conventions."""
    if tag == "birkhoff":
        phi, alpha = (state.phi, state.alpha) if isinstance(state, ChordState) else state
        psi, alpha1 = _birkhoff_step(dom, float(phi), float(alpha))
        return ChordState(psi, alpha1)
    if tag == "symplectic":
        t0, t1 = state
        return _symplectic_step(dom, float(t0), float(t1))
    if tag == "outer":
        image, _ = _outer_step(dom, state)
        return image
    raise ValueError(f"forward map not implemented for tag {tag!r}")


def orbit_deviation(dom: SupportDomain, tag: str, cfg: Configuration) -> float:
    """Max distance between a configuration and its forward-map re-iteration.

    The first chord (first two points for symplectic, first vertex and
    incidence for Birkhoff, first polygon vertex for outer) seeds the map.
    """
    p, q = cfg.winding, cfg.q
    if tag == "birkhoff":
        x = cfg.points
        xn = np.append(x[1:], x[0] + p * TWO_PI)
        psi = 0.5 * (x + xn)  # vertex support angles
        psi_closed = np.append(psi, psi[0] + p * TWO_PI)
        v0 = boundary_xy(dom, psi[0])
        v1 = boundary_xy(dom, psi_closed[1])
        d = (v1 - v0) / np.hypot(*(v1 - v0))
        t0 = np.array([-math.sin(psi[0]), math.cos(psi[0])])
        n0 = np.array([math.cos(psi[0]), math.sin(psi[0])])
        alpha = math.atan2(-float(d @ n0), float(d @ t0))
        cur, dev = (psi[0], alpha), 0.0
        for k in range(1, q + 1):
            cur = _birkhoff_step(dom, cur[0], cur[1])
            dev = max(dev, abs(cur[0] - psi_closed[k]))
        return dev
    if tag == "symplectic":
        x = np.append(cfg.points, [cfg.points[0] + p * TWO_PI, cfg.points[1] + p * TWO_PI])
        dev = 0.0
        cur = (x[0], x[1])
        for k in range(2, q + 2):
            cur = _symplectic_step(dom, cur[0], cur[1])
            dev = max(dev, abs(cur[1] - x[k]))
        return dev
    if tag == "outer":
        verts = outer_polygon(dom, cfg).vertices
        cur, dev = verts[0], 0.0
        for k in range(1, q + 1):
            cur, _ = _outer_step(dom, cur)
            dev = max(dev, float(np.abs(cur - verts[k % q]).max()))
        return dev
    raise ValueError(f"forward map not implemented for tag {tag!r}")


def orbit_rows(dom: SupportDomain, tag: str, cfg: Configuration):
    """CSV-ready orbit dump rows (k, phi_k, x, y) of the orbit polygon."""
    verts = config_vertices(dom, tag, cfg)
    if tag == "birkhoff":
        x = cfg.points
        angles = 0.5 * (x + np.append(x[1:], x[0] + cfg.winding * TWO_PI))
    else:
        angles = cfg.points
    return [(k, float(angles[k]), float(v[0]), float(v[1])) for k, v in enumerate(verts)]

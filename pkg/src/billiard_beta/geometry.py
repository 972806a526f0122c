"""Strictly convex planar domains represented by truncated Fourier support functions.

A domain is encoded by its support function

    h(phi) = a0 + sum_{n=1}^{N} (a_n cos(n phi) + b_n sin(n phi)),

the signed distance from the origin to the tangent line with outer normal
(cos phi, sin phi).  The boundary point with that normal is

    gamma(phi) = h(phi) (cos phi, sin phi) + h'(phi) (-sin phi, cos phi),

and the radius of curvature there is h + h''.  Everything in this module is a
pure function of immutable `SupportDomain` values.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

import numpy as np

TWO_PI = 2.0 * math.pi


def _grid_size(n_modes: int) -> int:
    # resolves the highest mode with >= 16 samples
    return max(1024, 16 * n_modes)


def _readonly(values) -> np.ndarray:
    arr = np.array(values, dtype=float).reshape(-1).copy()
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True)
class SupportDomain:
    """Convex domain given by a truncated Fourier support function.

    Construction validates, on a uniform grid of max(1024, 16 N) angles, that
    h > 0 (origin inside) and h + h'' > 0 (strict convexity); invalid
    coefficients raise ValueError("nonconvex parameters").  Instances are
    immutable and safe to share across threads.
    """

    a0: float
    an: np.ndarray = field(default_factory=lambda: np.zeros(0))
    bn: np.ndarray = field(default_factory=lambda: np.zeros(0))

    def __post_init__(self):
        an = _readonly(self.an)
        bn = _readonly(self.bn)
        if an.size != bn.size:
            raise ValueError("an and bn must have equal length")
        object.__setattr__(self, "a0", float(self.a0))
        object.__setattr__(self, "an", an)
        object.__setattr__(self, "bn", bn)
        grid = np.linspace(0.0, TWO_PI, _grid_size(self.n_modes), endpoint=False)
        h = eval_support(self, grid, 0)
        radius = h + eval_support(self, grid, 2)
        if h.min() <= 0.0 or radius.min() <= 0.0:
            raise ValueError("nonconvex parameters")

    @property
    def n_modes(self) -> int:
        return int(self.an.size)

    def grid(self) -> np.ndarray:
        """Validation grid used for all quadrature on this domain."""
        return np.linspace(0.0, TWO_PI, _grid_size(self.n_modes), endpoint=False)

    def to_json_dict(self) -> dict:
        return {"a0": self.a0, "modes": [[a, b] for a, b in zip(self.an, self.bn)]}

    @classmethod
    def from_json_dict(cls, data: dict) -> "SupportDomain":
        modes = data.get("modes", [])
        an = [m[0] for m in modes]
        bn = [m[1] for m in modes]
        return cls(float(data["a0"]), np.array(an), np.array(bn))


@dataclass(frozen=True)
class BoundaryPoint:
    phi: float
    position: np.ndarray
    tangent: np.ndarray
    curvature_radius: float


@dataclass(frozen=True)
class AffineMap:
    """Orientation-preserving affine map x -> linear @ x + translation."""

    linear: np.ndarray
    translation: np.ndarray = field(default_factory=lambda: np.zeros(2))

    def __post_init__(self):
        lin = np.array(self.linear, dtype=float).reshape(2, 2)
        tr = np.array(self.translation, dtype=float).reshape(2)
        if np.linalg.det(lin) <= 0.0:
            raise ValueError("linear part must have positive determinant")
        lin.setflags(write=False)
        tr.setflags(write=False)
        object.__setattr__(self, "linear", lin)
        object.__setattr__(self, "translation", tr)

    @property
    def det(self) -> float:
        return float(np.linalg.det(self.linear))

    @classmethod
    def rotation(cls, angle: float) -> "AffineMap":
        c, s = math.cos(angle), math.sin(angle)
        return cls(np.array([[c, -s], [s, c]]))

    @classmethod
    def scaling(cls, sx: float, sy: float) -> "AffineMap":
        return cls(np.array([[sx, 0.0], [0.0, sy]]))


def eval_support(dom: SupportDomain, phi, order: int = 0):
    """Evaluate h and its derivatives term-wise from the Fourier sum.

    order 0, 1, 2 are the documented surface; higher orders follow the same
    term-wise rule and are used internally by the billiard models.
    """
    phi_arr = np.asarray(phi, dtype=float)
    scalar = phi_arr.ndim == 0
    if dom.n_modes == 0:
        out = np.full(phi_arr.shape, dom.a0 if order == 0 else 0.0)
        return float(out) if scalar else out
    n = np.arange(1, dom.n_modes + 1, dtype=float)
    shift = 0.5 * math.pi * order
    ang = phi_arr[..., None] * n + shift
    scale = n**order
    out = np.cos(ang) @ (dom.an * scale) + np.sin(ang) @ (dom.bn * scale)
    if order == 0:
        out = out + dom.a0
    return float(out) if scalar else out


def boundary_xy(dom: SupportDomain, phi):
    """Boundary points for an array of support angles, shape (..., 2)."""
    phi_arr = np.asarray(phi, dtype=float)
    h = eval_support(dom, phi_arr, 0)
    hp = eval_support(dom, phi_arr, 1)
    c, s = np.cos(phi_arr), np.sin(phi_arr)
    return np.stack([h * c - hp * s, h * s + hp * c], axis=-1)


def boundary_point(dom: SupportDomain, phi: float) -> BoundaryPoint:
    phi = float(phi)
    pos = boundary_xy(dom, phi)
    tangent = np.array([-math.sin(phi), math.cos(phi)])
    radius = eval_support(dom, phi, 0) + eval_support(dom, phi, 2)
    return BoundaryPoint(phi, pos, tangent, float(radius))


def perimeter(dom: SupportDomain) -> float:
    """Boundary length, the Cauchy integral of h over one turn."""
    grid = dom.grid()
    return float(eval_support(dom, grid, 0).mean() * TWO_PI)


def area(dom: SupportDomain) -> float:
    """Enclosed area via the support identity |Omega| = 1/2 int (h^2 - h'^2)."""
    grid = dom.grid()
    h = eval_support(dom, grid, 0)
    hp = eval_support(dom, grid, 1)
    return float(0.5 * np.mean(h * h - hp * hp) * TWO_PI)


def area_fourier(dom: SupportDomain) -> float:
    """Closed-form area for the pure Fourier representation (cross-check)."""
    n = np.arange(1, dom.n_modes + 1, dtype=float)
    return math.pi * (dom.a0**2 + 0.5 * float(((1 - n * n) * (dom.an**2 + dom.bn**2)).sum()))


def project_to_modes(samples: np.ndarray, n_out: int, rel_tol: float = 1e-8):
    """Fit a0 and n_out Fourier modes to uniform samples of a support function.

    Raises ValueError("insufficient modes") when the discarded tail carries
    more than rel_tol of the oscillatory energy.
    """
    m = samples.size
    if n_out >= m // 2:
        raise ValueError("insufficient modes")
    coeffs = np.fft.rfft(samples)
    a0 = float(coeffs[0].real) / m
    an = 2.0 * coeffs[1 : n_out + 1].real / m
    bn = -2.0 * coeffs[1 : n_out + 1].imag / m
    tail = np.abs(coeffs[n_out + 1 :]) ** 2
    total = np.abs(coeffs[1:]) ** 2
    denom = float(total.sum())
    if denom > 0 and float(tail.sum()) > rel_tol * denom:
        raise ValueError("insufficient modes")
    return a0, an, bn


def affine_image(dom: SupportDomain, amap: AffineMap, n_out: int = 64) -> SupportDomain:
    """Support function of amap(domain), projected to n_out Fourier modes."""
    m = _grid_size(max(n_out, dom.n_modes))
    psi = np.linspace(0.0, TWO_PI, m, endpoint=False)
    u = np.stack([np.cos(psi), np.sin(psi)], axis=-1)
    v = u @ amap.linear  # rows are A^T u
    norm = np.hypot(v[:, 0], v[:, 1])
    ang = np.arctan2(v[:, 1], v[:, 0])
    samples = norm * eval_support(dom, ang, 0) + u @ amap.translation
    a0, an, bn = project_to_modes(samples, n_out)
    return SupportDomain(a0, an, bn)


def scaled(dom: SupportDomain, factor: float) -> SupportDomain:
    if factor <= 0:
        raise ValueError("scale factor must be positive")
    return SupportDomain(factor * dom.a0, factor * dom.an, factor * dom.bn)


def disk(radius: float = 1.0) -> SupportDomain:
    return SupportDomain(radius)


def ellipse(a: float, b: float, n_out: int = 64) -> SupportDomain:
    """Ellipse with semi-axes a, b: h = sqrt(a^2 cos^2 + b^2 sin^2), projected."""
    m = _grid_size(n_out)
    phi = np.linspace(0.0, TWO_PI, m, endpoint=False)
    samples = np.sqrt((a * np.cos(phi)) ** 2 + (b * np.sin(phi)) ** 2)
    a0, an, bn = project_to_modes(samples, n_out, rel_tol=1e-12)
    return SupportDomain(a0, an, bn)


def gutkin(n: int, eps: float) -> SupportDomain:
    """One-mode perturbation h = 1 + eps cos(n phi); convex iff |eps|(n^2-1) < 1."""
    if n < 2:
        raise ValueError("gutkin mode must satisfy n >= 2")
    an = np.zeros(n)
    an[n - 1] = eps
    return SupportDomain(1.0, an, np.zeros(n))


def constant_width(eps: float, n: int = 3) -> SupportDomain:
    """Odd single-mode domain of constant width 2: h = 1 + eps cos(n phi), n odd."""
    if n % 2 == 0 or n < 3:
        raise ValueError("constant width requires an odd mode n >= 3")
    return gutkin(n, eps)


SQUEEZE_SIGMA = 0.35


def squeezed_disk(eps: float, sigma: float = SQUEEZE_SIGMA, n_out: int = 48) -> SupportDomain:
    """Unit disk flattened near phi = pi/2, rescaled back to area pi.

    The dent is the smooth periodic cap bump(phi) = exp(-(1 - cos(phi - pi/2)) / sigma^2).
    """
    m = _grid_size(n_out)
    phi = np.linspace(0.0, TWO_PI, m, endpoint=False)
    bump = np.exp(-(1.0 - np.cos(phi - 0.5 * math.pi)) / sigma**2)
    a0, an, bn = project_to_modes(1.0 - eps * bump, n_out, rel_tol=1e-12)
    raw = SupportDomain(a0, an, bn)
    return scaled(raw, math.sqrt(math.pi / area(raw)))


_NAMED = {
    "disk": disk,
    "ellipse": ellipse,
    "gutkin": gutkin,
    "constant_width": constant_width,
    "squeezed_disk": squeezed_disk,
}


def make_named(family: str, *params) -> SupportDomain:
    try:
        builder = _NAMED[family]
    except KeyError:
        raise ValueError(f"unknown domain family: {family!r}") from None
    return builder(*params)


@dataclass(frozen=True)
class RadonReport:
    is_centrally_symmetric: bool
    max_defect: float
    is_radon: bool
    tol: float


def radon_check(dom: SupportDomain, tol: float = 1e-8, n_grid: int = 256) -> RadonReport:
    """Test symmetry of Birkhoff orthogonality on a centrally symmetric curve.

    For each grid angle phi, find phi* with gamma(phi*) parallel to the
    tangent at gamma(phi) and measure how far gamma(phi) is from being
    parallel to the tangent at gamma(phi*) (angle defect mod pi).  Domains
    with odd Fourier modes are reported non-symmetric and not scanned.
    """
    odd = slice(0, dom.n_modes, 2)  # indices 0,2,... hold modes n=1,3,...
    odd_amp = 0.0
    if dom.n_modes:
        odd_amp = float(max(np.abs(dom.an[odd]).max(), np.abs(dom.bn[odd]).max()))
    if odd_amp >= tol:
        return RadonReport(False, math.nan, False, tol)

    def support_dot(psi, phi):
        # <gamma(psi), (cos phi, sin phi)>
        return eval_support(dom, psi, 0) * np.cos(psi - phi) - eval_support(dom, psi, 1) * np.sin(psi - phi)

    max_defect = 0.0
    for phi in np.linspace(0.0, TWO_PI, n_grid, endpoint=False):
        lo, hi = phi + 1e-12, phi + math.pi - 1e-12
        flo = support_dot(lo, phi)
        for _ in range(80):
            mid = 0.5 * (lo + hi)
            fm = support_dot(mid, phi)
            if (fm > 0) == (flo > 0):
                lo, flo = mid, fm
            else:
                hi = mid
        psi = 0.5 * (lo + hi)
        pos = boundary_xy(dom, phi)
        ang_pos = math.atan2(pos[1], pos[0])
        ang_tan = psi + 0.5 * math.pi
        defect = abs((ang_pos - ang_tan + 0.5 * math.pi) % math.pi - 0.5 * math.pi)
        max_defect = max(max_defect, float(defect))
    return RadonReport(True, max_defect, max_defect < tol, tol)


def load_domain(path: str) -> SupportDomain:
    with open(path, "r", encoding="utf-8") as fh:
        return SupportDomain.from_json_dict(json.load(fh))


def save_domain(dom: SupportDomain, path: str) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(dom.to_json_dict(), fh)
        fh.write("\n")

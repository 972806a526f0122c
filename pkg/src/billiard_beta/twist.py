"""Generic Aubry-Mather engine for twist-map generating functions.

Given a generating function S(x0, x1) with partial derivatives, the minimal
average action at a rational rotation number p/q is found by minimizing the
periodic action

    A(x) = sum_{k=0}^{q-1} S(x_k, x_{k+1}),   x_q = x_0 + p * period,

over cyclically ordered configurations.  Irrational rotation numbers are
bracketed through continued-fraction convergents using convexity of the
minimal average action.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from fractions import Fraction
from typing import Callable, Optional, Sequence

import numpy as np
from scipy.linalg import solve_banded


@dataclass(frozen=True)
class TwistSystem:
    """Generating-function system on a periodic parameter line.

    S must satisfy S(x0 + period, x1 + period) = S(x0, x1) and have negative
    mixed second derivative (positive twist) on the admissible strip
    0 < x1 - x0 < max_gap.  All callables must accept numpy arrays.
    """

    period: float
    max_gap: float
    S: Callable
    S1: Callable
    S2: Callable
    S11: Optional[Callable] = None
    S12: Optional[Callable] = None
    S22: Optional[Callable] = None
    name: str = ""

    @property
    def has_hessian(self) -> bool:
        return self.S11 is not None and self.S12 is not None and self.S22 is not None


@dataclass(frozen=True)
class RotationNumber:
    """Rational p/q in lowest terms, or an irrational target with tolerance."""

    p: int = 0
    q: int = 0
    omega: float = math.nan
    tol: float = 1e-6

    def __post_init__(self):
        if self.q:
            g = math.gcd(self.p, self.q)
            object.__setattr__(self, "p", self.p // g)
            object.__setattr__(self, "q", self.q // g)

    @property
    def is_rational(self) -> bool:
        return self.q != 0

    @property
    def value(self) -> float:
        return self.p / self.q if self.is_rational else self.omega

    @classmethod
    def rational(cls, p: int, q: int) -> "RotationNumber":
        return cls(p=p, q=q)

    @classmethod
    def irrational(cls, omega: float, tol: float = 1e-6) -> "RotationNumber":
        return cls(omega=float(omega), tol=tol)

    @classmethod
    def parse(cls, text: str, tol: float = 1e-6) -> "RotationNumber":
        text = text.strip()
        if "/" in text:
            p_str, q_str = text.split("/", 1)
            return cls.rational(int(p_str), int(q_str))
        value = float(text)
        frac = Fraction(value).limit_denominator(10**6)
        if float(frac) == value:
            return cls.rational(frac.numerator, frac.denominator)
        return cls.irrational(value, tol)

    def __str__(self) -> str:
        return f"{self.p}/{self.q}" if self.is_rational else repr(self.omega)


@dataclass(frozen=True)
class Configuration:
    """Cyclically ordered q-point configuration with winding number."""

    points: np.ndarray
    winding: int
    period: float

    def __post_init__(self):
        pts = np.array(self.points, dtype=float).reshape(-1)
        pts.setflags(write=False)
        object.__setattr__(self, "points", pts)

    @property
    def q(self) -> int:
        return int(self.points.size)

    def gaps(self) -> np.ndarray:
        x = self.points
        closed = np.append(x[1:], x[0] + self.winding * self.period)
        return closed - x

    def translated(self, shift: float) -> "Configuration":
        return Configuration(self.points + shift, self.winding, self.period)


@dataclass(frozen=True)
class BetaResult:
    beta: float
    config: Configuration
    grad_residual: float
    starts_tried: int
    converged: bool

    def to_json_dict(self) -> dict:
        return {
            "beta": float(self.beta),
            "points": [float(v) for v in self.config.points],
            "winding": self.config.winding,
            "grad_residual": float(self.grad_residual),
            "converged": bool(self.converged),
        }


@dataclass(frozen=True)
class MinimizeOptions:
    tol: float = 1e-10
    starts: int = 8
    seed: int = 0
    switch_tol: float = 1e-4
    max_gd_iter: int = 4000
    max_newton_iter: int = 80
    jitter: float = 1e-3
    gap_min_frac: float = 1e-9
    q_max: int = 2000


def _require_gaps(sys: TwistSystem, points: np.ndarray, winding: int) -> None:
    if points.size == 1 and winding == 0:
        return
    closed = np.append(points[1:], points[0] + winding * sys.period)
    gaps = closed - points
    if gaps.min() <= 0.0 or gaps.max() >= sys.max_gap:
        raise ValueError("gap violation")


def _closed(points: np.ndarray, winding: int, period: float) -> np.ndarray:
    return np.append(points[1:], points[0] + winding * period)


def action(sys: TwistSystem, cfg: Configuration) -> float:
    _require_gaps(sys, cfg.points, cfg.winding)
    xn = _closed(cfg.points, cfg.winding, sys.period)
    return float(np.sum(sys.S(cfg.points, xn)))


def action_gradient(sys: TwistSystem, cfg: Configuration) -> np.ndarray:
    _require_gaps(sys, cfg.points, cfg.winding)
    return _grad(sys, cfg.points, cfg.winding)


def _grad(sys: TwistSystem, x: np.ndarray, p: int) -> np.ndarray:
    xn = _closed(x, p, sys.period)
    if x.size == 1:
        return np.array([float(sys.S1(x[0], xn[0]) + sys.S2(x[0], xn[0]))])
    return sys.S1(x, xn) + np.roll(sys.S2(x, xn), 1)


def _action_rows(sys: TwistSystem, rows: np.ndarray, p: int) -> np.ndarray:
    xn = np.concatenate([rows[:, 1:], rows[:, :1] + p * sys.period], axis=1)
    return np.sum(sys.S(rows, xn), axis=1)


def _grad_rows(sys: TwistSystem, rows: np.ndarray, p: int) -> np.ndarray:
    xn = np.concatenate([rows[:, 1:], rows[:, :1] + p * sys.period], axis=1)
    return sys.S1(rows, xn) + np.roll(sys.S2(rows, xn), 1, axis=1)


def _row_gaps(rows: np.ndarray, p: int, period: float) -> np.ndarray:
    closed = np.concatenate([rows[:, 1:], rows[:, :1] + p * period], axis=1)
    return closed - rows


def _feasible_fraction(rows, steps, p, period, lo, hi):
    """Largest lambda per row keeping all gaps of rows + lambda*steps in (lo, hi)."""
    g = _row_gaps(rows, p, period)
    dg = _row_gaps(steps, 0, period)
    with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
        up = np.where(dg > 0, (hi - g) / np.where(dg > 0, dg, 1.0), np.inf)
        dn = np.where(dg < 0, (lo - g) / np.where(dg < 0, dg, -1.0), np.inf)
    lam = np.minimum(up.min(axis=1), dn.min(axis=1))
    lam = np.clip(lam, 0.0, 1.0)
    return np.where(lam < 1.0, 0.999 * lam, lam)


def _gd_phase(sys, rows, p, opts):
    """Projected gradient descent with adaptive step, vectorized across starts.

    Accepted steps update the step length by the Barzilai-Borwein rule
    <s,y>/<y,y>; rejected steps halve it.  Gap constraints are enforced by
    clipping the step to the feasible fraction.
    """
    q = rows.shape[1]
    gap_min = opts.gap_min_frac * sys.period
    hi = sys.max_gap - gap_min
    act = _action_rows(sys, rows, p)
    grad = _grad_rows(sys, rows, p)
    res = np.abs(grad).max(axis=1)
    alpha = 0.01 * sys.period / q / (res + 1e-300)
    restarted = np.zeros(rows.shape[0], dtype=bool)
    rng = np.random.default_rng(opts.seed + 1)
    for _ in range(opts.max_gd_iter):
        active = res >= opts.switch_tol
        if not active.any():
            break
        steps = -alpha[:, None] * grad
        lam = _feasible_fraction(rows, steps, p, sys.period, gap_min, hi)
        trial = rows + (lam * active)[:, None] * steps
        act_trial = _action_rows(sys, trial, p)
        improved = active & (act_trial < act)
        if improved.any():
            grad_trial = _grad_rows(sys, trial, p)
            s = trial - rows
            y = grad_trial - grad
            with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
                bb = np.sum(s * y, axis=1) / np.sum(y * y, axis=1)
            base_alpha = sys.period / q
            good_bb = np.isfinite(bb) & (bb > 0)
            next_alpha = np.where(
                good_bb, np.clip(bb, 1e-9 * base_alpha, 1e6 * base_alpha), alpha * 1.3
            )
            rows = np.where(improved[:, None], trial, rows)
            act = np.where(improved, act_trial, act)
            grad = np.where(improved[:, None], grad_trial, grad)
            res = np.where(improved, np.abs(grad_trial).max(axis=1), res)
            alpha = np.where(improved, next_alpha, alpha * 0.5)
        else:
            alpha = np.where(active, alpha * 0.5, alpha)
        stalled = active & ~improved & (alpha * res < 1e-15 * sys.period)
        collapse = _row_gaps(rows, p, sys.period).min(axis=1) < 2 * gap_min
        redo = (stalled | (active & collapse)) & ~restarted
        if redo.any():
            base = np.arange(q) * (p * sys.period / q)
            rows = rows.copy()
            for i in np.flatnonzero(redo):
                jit = np.sort(rng.standard_normal(q)) * (1e-3 * p * sys.period / q)
                rows[i] = base + rng.uniform(0, sys.period) + jit
                restarted[i] = True
            act = _action_rows(sys, rows, p)
            grad = _grad_rows(sys, rows, p)
            res = np.abs(grad).max(axis=1)
        elif not (active & ~stalled).any():
            break
    return rows


def _hessian_parts(sys, x, p):
    xn = _closed(x, p, sys.period)
    d1 = np.atleast_1d(sys.S11(x, xn))
    d2 = np.atleast_1d(sys.S22(x, xn))
    e = np.atleast_1d(sys.S12(x, xn))
    diag = d1 + np.roll(d2, 1)
    return diag, e


def _solve_cyclic(diag, e, rhs):
    """Solve the cyclic tridiagonal system in O(q).

    Off-diagonal couplings e[k] join unknowns k and k+1; e[-1] is the corner
    coupling (q-1, 0), removed by a rank-one Sherman-Morrison update.
    """
    q = diag.size
    if q == 1:
        return rhs / diag
    if q == 2:
        m = np.array([[diag[0], e[0] + e[1]], [e[0] + e[1], diag[1]]])
        return np.linalg.solve(m, rhs)
    if q == 3:
        m = np.array(
            [
                [diag[0], e[0], e[2]],
                [e[0], diag[1], e[1]],
                [e[2], e[1], diag[2]],
            ]
        )
        return np.linalg.solve(m, rhs)
    corner = e[-1]
    gamma = -diag[0] if diag[0] != 0 else 1.0
    dmod = diag.copy()
    dmod[0] -= gamma
    dmod[-1] -= corner * corner / gamma
    band = np.zeros((3, q))
    band[0, 1:] = e[:-1]
    band[1] = dmod
    band[2, :-1] = e[:-1]
    u = np.zeros(q)
    u[0] = gamma
    u[-1] = corner
    y = solve_banded((1, 1), band, np.column_stack([rhs, u]))
    sol, z = y[:, 0], y[:, 1]
    denom = 1.0 + z[0] + z[-1] * corner / gamma
    if abs(denom) < 1e-300:
        raise np.linalg.LinAlgError("singular cyclic system")
    factor = (sol[0] + sol[-1] * corner / gamma) / denom
    return sol - factor * z


def _tol_effective(opts, act, q):
    return opts.tol * (1.0 + abs(act / q))


def _newton_phase(sys, x, p, opts):
    """Damped Newton on the criticality equations with gap clipping."""
    q = x.size
    gap_min = opts.gap_min_frac * sys.period
    hi = sys.max_gap - gap_min
    grad = _grad(sys, x, p)
    res = float(np.abs(grad).max())
    mu = 0.0
    for _ in range(opts.max_newton_iter):
        act = _action_rows(sys, x[None, :], p)[0]
        tol_eff = _tol_effective(opts, act, q)
        if res < tol_eff:
            return x, res, True
        if not sys.has_hessian:
            break
        diag, e = _hessian_parts(sys, x, p)
        accepted = False
        for _ in range(8):
            try:
                if q == 1:
                    xn = _closed(x, p, sys.period)
                    h_scalar = float(
                        sys.S11(x[0], xn[0]) + 2.0 * sys.S12(x[0], xn[0]) + sys.S22(x[0], xn[0])
                    )
                    delta = -grad / (h_scalar + mu)
                else:
                    delta = _solve_cyclic(diag + mu, e, -grad)
            except np.linalg.LinAlgError:
                mu = max(10.0 * mu, 1e-12)
                continue
            if not np.all(np.isfinite(delta)):
                mu = max(10.0 * mu, 1e-12)
                continue
            lam = _feasible_fraction(x[None, :], delta[None, :], p, sys.period, gap_min, hi)[0]
            trial = x + lam * delta
            grad_trial = _grad(sys, trial, p)
            res_trial = float(np.abs(grad_trial).max())
            if res_trial < res:
                x, grad, res = trial, grad_trial, res_trial
                mu *= 0.25
                accepted = True
                break
            mu = max(10.0 * mu, 1e-10)
        if not accepted:
            break
    act = _action_rows(sys, x[None, :], p)[0]
    return x, res, res < _tol_effective(opts, act, q)


def _gd_polish(sys, x, p, opts):
    """Fallback full-tolerance descent for systems without second derivatives."""
    rows = x[None, :].copy()
    tight = replace(opts, switch_tol=opts.tol, max_gd_iter=20 * opts.max_gd_iter)
    rows = _gd_phase(sys, rows, p, tight)
    x = rows[0]
    res = float(np.abs(_grad(sys, x, p)).max())
    act = _action_rows(sys, rows, p)[0]
    return x, res, res < _tol_effective(opts, act, x.size)


def _canonical(sys, x, p):
    shift = math.floor(x[0] / sys.period)
    return x - shift * sys.period


def _minimize_fixed_point(sys, opts):
    """q = 1, winding 0: minimize S(x, x) over one period."""
    grid = np.linspace(0.0, sys.period, 512, endpoint=False)
    vals = sys.S(grid, grid)
    x = float(grid[np.argmin(vals)])
    for _ in range(opts.max_newton_iter):
        g = float(sys.S1(x, x) + sys.S2(x, x))
        if sys.has_hessian:
            h = float(sys.S11(x, x) + 2.0 * sys.S12(x, x) + sys.S22(x, x))
        else:
            h = 0.0
        if h <= 0:
            break
        step = -g / h
        x += step
        if abs(step) < 1e-14 * sys.period:
            break
    res = abs(float(sys.S1(x, x) + sys.S2(x, x)))
    beta = float(sys.S(x, x))
    cfg = Configuration(np.array([x % sys.period]), 0, sys.period)
    return BetaResult(beta, cfg, res, 1, res < _tol_effective(opts, beta, 1))


def minimize_periodic(sys: TwistSystem, p: int, q: int, opts: MinimizeOptions | None = None) -> BetaResult:
    """Minimize the periodic action at rotation number p/q.

    Multi-start: `starts` equispaced configurations, phase-shifted by
    j*period/(q*starts), each with one small random jitter (deterministic
    seed).  Two phases per start: projected gradient descent to a residual of
    switch_tol, then Newton on the cyclic tridiagonal criticality system.
    Ties among converged starts break by lowest action, then lowest residual,
    then start index.
    """
    opts = opts or MinimizeOptions()
    if q < 1 or p < 0:
        raise ValueError("rotation number must have q >= 1, p >= 0")
    if p == 0:
        if q != 1:
            raise ValueError("winding 0 requires q = 1")
        return _minimize_fixed_point(sys, opts)
    gap = p * sys.period / q
    if not (0.0 < gap < sys.max_gap):
        raise ValueError("gap violation")
    rng = np.random.default_rng(opts.seed)
    base = np.arange(q) * gap
    shifts = np.arange(opts.starts) * (sys.period / (q * opts.starts))
    rows = shifts[:, None] + base[None, :]
    rows = rows + rng.standard_normal(rows.shape) * (opts.jitter * gap)
    rows = _gd_phase(sys, rows, p, opts)

    candidates = []
    for j in range(opts.starts):
        if sys.has_hessian:
            x, res, ok = _newton_phase(sys, rows[j].copy(), p, opts)
        else:
            x, res, ok = _gd_polish(sys, rows[j], p, opts)
        act = _action_rows(sys, x[None, :], p)[0]
        candidates.append((float(act), float(res), j, x, ok))

    converged = [c for c in candidates if c[4]]
    pool = converged if converged else sorted(candidates, key=lambda c: c[1])[:1]
    act, res, _, x, ok = min(pool, key=lambda c: (c[0], c[1], c[2]))
    x = _canonical(sys, x, p)
    cfg = Configuration(x, p, sys.period)
    return BetaResult(float(act) / q, cfg, float(res), opts.starts, bool(ok))


def minimize_with_fixed_start(
    sys: TwistSystem, p: int, q: int, x0: float, opts: MinimizeOptions | None = None
) -> BetaResult:
    """Minimize the periodic action over configurations pinned at x_0 = x0.

    Used to certify invariant curves of periodic orbits: if the pinned minimal
    action is independent of x0, every phase carries a minimal orbit.
    """
    opts = opts or MinimizeOptions()
    if q < 2:
        raise ValueError("fixed-start minimization needs q >= 2")
    gap = p * sys.period / q
    if not (0.0 < gap < sys.max_gap):
        raise ValueError("gap violation")
    gap_min = opts.gap_min_frac * sys.period
    hi = sys.max_gap - gap_min
    x = x0 + np.arange(q) * gap

    def pinned_grad(xx):
        g = _grad(sys, xx, p)
        g[0] = 0.0
        return g

    alpha = 0.01 * sys.period / q
    act = _action_rows(sys, x[None, :], p)[0]
    for _ in range(opts.max_gd_iter):
        g = pinned_grad(x)
        res = float(np.abs(g).max())
        if res < opts.switch_tol:
            break
        step = -alpha * g
        lam = _feasible_fraction(x[None, :], step[None, :], p, sys.period, gap_min, hi)[0]
        trial = x + lam * step
        act_trial = _action_rows(sys, trial[None, :], p)[0]
        if act_trial < act:
            x, act, alpha = trial, act_trial, alpha * 1.3
        else:
            alpha *= 0.5
            if alpha * res < 1e-16 * sys.period:
                break

    for _ in range(opts.max_newton_iter):
        g = pinned_grad(x)
        res = float(np.abs(g).max())
        act = _action_rows(sys, x[None, :], p)[0]
        if res < _tol_effective(opts, act, q) or not sys.has_hessian:
            break
        diag, e = _hessian_parts(sys, x, p)
        band = np.zeros((3, q - 1))
        band[1] = diag[1:]
        band[0, 1:] = e[1:-1]
        band[2, :-1] = e[1:-1]
        try:
            delta_free = solve_banded((1, 1), band, -g[1:])
        except np.linalg.LinAlgError:
            break
        delta = np.concatenate([[0.0], delta_free])
        if not np.all(np.isfinite(delta)):
            break
        lam = _feasible_fraction(x[None, :], delta[None, :], p, sys.period, gap_min, hi)[0]
        trial = x + lam * delta
        if float(np.abs(pinned_grad(trial)).max()) >= res:
            break
        x = trial

    g = pinned_grad(x)
    res = float(np.abs(g).max())
    act = _action_rows(sys, x[None, :], p)[0]
    cfg = Configuration(x, p, sys.period)
    return BetaResult(float(act) / q, cfg, res, 1, res < _tol_effective(opts, act, q))


def beta_rational(sys: TwistSystem, p: int, q: int, opts: MinimizeOptions | None = None) -> float:
    g = math.gcd(p, q) if p else 1
    return minimize_periodic(sys, p // g if g else p, q // g if g else q, opts).beta


def convergents(omega: float, q_max: int) -> list[tuple[int, int]]:
    """Continued-fraction convergents p/q of omega with q <= q_max."""
    out = []
    p_prev, q_prev = 1, 0
    p_cur, q_cur = int(math.floor(omega)), 1
    if q_cur <= q_max and p_cur > 0:
        out.append((p_cur, q_cur))
    x = omega - math.floor(omega)
    for _ in range(64):
        if x < 1e-13:
            break
        x = 1.0 / x
        a = int(math.floor(x))
        x -= a
        p_next = a * p_cur + p_prev
        q_next = a * q_cur + q_prev
        if q_next > q_max:
            break
        out.append((p_next, q_next))
        p_prev, q_prev, p_cur, q_cur = p_cur, q_cur, p_next, q_next
    return out


@dataclass(frozen=True)
class IrrationalBetaResult:
    value: float
    lower: float
    upper: float
    converged: bool
    evaluations: tuple


def beta_irrational_result(
    sys: TwistSystem,
    omega: float,
    tol: float = 1e-6,
    opts: MinimizeOptions | None = None,
) -> IrrationalBetaResult:
    """Bracket beta(omega) between convexity bounds built on convergents.

    The chord through the two evaluated convergents straddling omega is an
    upper bound; the chord through the two nearest convergents on one side,
    extrapolated to omega, is a lower bound.  Convergents whose equispaced
    gap is inadmissible for the system are skipped.
    """
    opts = opts or MinimizeOptions()
    frac = Fraction(omega).limit_denominator(opts.q_max)
    if float(frac) == float(omega):
        val = beta_rational(sys, frac.numerator, frac.denominator, opts)
        return IrrationalBetaResult(val, val, val, True, ((frac.numerator, frac.denominator, val),))

    evals = []
    best = (math.nan, math.nan)
    for p, q in convergents(omega, opts.q_max):
        gap = p * sys.period / q
        if not (0.0 < gap < sys.max_gap):
            continue
        evals.append((p / q, beta_rational(sys, p, q, opts), p, q))
        below = sorted((e for e in evals if e[0] < omega), key=lambda e: -e[0])
        above = sorted((e for e in evals if e[0] > omega), key=lambda e: e[0])
        if not below or not above:
            continue
        (rl, bl, *_), (rr, br, *_) = below[0], above[0]
        upper = bl + (br - bl) * (omega - rl) / (rr - rl)
        lower = -math.inf
        for side in (below, above):
            if len(side) >= 2:
                (r1, b1, *_), (r2, b2, *_) = side[0], side[1]
                lower = max(lower, b1 + (b2 - b1) * (omega - r1) / (r2 - r1))
        best = (lower, upper)
        if upper - lower < tol:
            return IrrationalBetaResult(
                0.5 * (lower + upper), lower, upper, True, tuple((p, q, b) for r, b, p, q in evals)
            )
    lower, upper = best
    value = upper if math.isinf(lower) or math.isnan(lower) else 0.5 * (lower + upper)
    return IrrationalBetaResult(value, lower, upper, False, tuple((p, q, b) for r, b, p, q in evals))


def beta_irrational(
    sys: TwistSystem, omega: float, tol: float = 1e-6, opts: MinimizeOptions | None = None
) -> float:
    return beta_irrational_result(sys, omega, tol, opts).value


def beta_of(sys: TwistSystem, rho: RotationNumber, opts: MinimizeOptions | None = None) -> float:
    """beta at a RotationNumber: exact minimization if rational, bracket otherwise."""
    if rho.is_rational:
        return beta_rational(sys, rho.p, rho.q, opts)
    return beta_irrational(sys, rho.omega, rho.tol, opts)


def equispaced_average_action(sys: TwistSystem, omega: float, x0: float = 0.0) -> float:
    """Average action of the equispaced configuration x_k = x0 + k*omega*period.

    Exact cyclic average for rational omega; Birkhoff (= phase-space) average
    via periodic trapezoid quadrature for irrational omega.
    """
    frac = Fraction(omega).limit_denominator(4096)
    gap = omega * sys.period
    if float(frac) == float(omega) and frac.denominator <= 4096:
        q = frac.denominator
        x = x0 + np.arange(q) * gap
        return float(np.mean(sys.S(x, x + gap)))
    t = np.linspace(0.0, sys.period, 4096, endpoint=False)
    return float(np.mean(sys.S(t + x0, t + x0 + gap)))


def make_toy_system(
    ell: Callable,
    ell_d: Callable,
    ell_dd: Callable,
    V: Callable | None = None,
    V_d: Callable | None = None,
    V_dd: Callable | None = None,
    name: str = "toy",
) -> TwistSystem:
    """Integrable kinetic term plus periodic potential: S(q, Q) = ell(Q-q) + V(q).

    The potential mean over one period is subtracted, so the zero-mean
    normalization holds regardless of the supplied V.
    """
    if V is None:
        V = lambda x: np.zeros_like(np.asarray(x, dtype=float))
        V_d = lambda x: np.zeros_like(np.asarray(x, dtype=float))
        V_dd = lambda x: np.zeros_like(np.asarray(x, dtype=float))
    if V_d is None:
        raise ValueError("V requires V_d for the action gradient")
    grid = np.linspace(0.0, 1.0, 8192, endpoint=False)
    v_mean = float(np.mean(V(grid)))

    def S(x0, x1):
        return ell(x1 - x0) + V(x0) - v_mean

    def S1(x0, x1):
        return -ell_d(x1 - x0) + V_d(x0)

    def S2(x0, x1):
        return ell_d(x1 - x0)

    S11 = S12 = S22 = None
    if V_dd is not None:
        S11 = lambda x0, x1: ell_dd(x1 - x0) + V_dd(x0)
        S12 = lambda x0, x1: -ell_dd(x1 - x0)
        S22 = lambda x0, x1: ell_dd(x1 - x0)
    return TwistSystem(1.0, math.inf, S, S1, S2, S11, S12, S22, name=name)


def quadratic_kinetic():
    """ell(v) = v^2 / 2 with derivatives; the free toy system has beta = rho^2/2."""
    return (lambda v: 0.5 * np.asarray(v) ** 2, lambda v: np.asarray(v) + 0.0, lambda v: np.ones_like(np.asarray(v, dtype=float)))


def trig_potential(cos_coeffs: Sequence[float], sin_coeffs: Sequence[float] = ()):
    """Zero-mean trigonometric potential sum_k c_k cos(2 pi k q) + s_k sin(2 pi k q)."""
    cos_c = np.asarray(cos_coeffs, dtype=float)
    sin_c = np.asarray(list(sin_coeffs) + [0.0] * (len(cos_c) - len(tuple(sin_coeffs))), dtype=float)
    k = 2.0 * math.pi * np.arange(1, cos_c.size + 1)

    def V(x):
        ang = np.multiply.outer(np.asarray(x, dtype=float), k)
        return np.cos(ang) @ cos_c + np.sin(ang) @ sin_c

    def V_d(x):
        ang = np.multiply.outer(np.asarray(x, dtype=float), k)
        return -np.sin(ang) @ (k * cos_c) + np.cos(ang) @ (k * sin_c)

    def V_dd(x):
        ang = np.multiply.outer(np.asarray(x, dtype=float), k)
        return -np.cos(ang) @ (k * k * cos_c) - np.sin(ang) @ (k * k * sin_c)

    return V, V_d, V_dd


def farey_fractions(max_den: int, include_half: bool = True) -> list[tuple[int, int]]:
    """Coprime p/q in (0, 1/2] (or (0, 1/2)) with q <= max_den, ascending."""
    out = set()
    for q in range(2, max_den + 1):
        for p in range(1, q // 2 + 1):
            if math.gcd(p, q) == 1 and (include_half or 2 * p < q):
                out.add((p, q))
    return sorted(out, key=lambda t: t[0] / t[1])

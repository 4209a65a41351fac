"""Numerical kernels: quadrature, finite differences, corner smoothing, limits.

Everything here is pure and reentrant.  Callables handed to these routines are
expected to be vectorized (numpy ufunc style): they receive float arrays of any
shape and return arrays of the same shape.
"""

from __future__ import annotations

import math
import os
from dataclasses import dataclass, fields, replace
from typing import Callable, NamedTuple, Sequence

import numpy as np
from scipy.interpolate import CubicSpline, PchipInterpolator

from .errors import DomainError, DomainTooSmall, NoConvergence, NonFinite, NotMonotone

__all__ = [
    "Tolerances",
    "DEFAULT_TOL",
    "Sampled1D",
    "integrate",
    "gauss_legendre",
    "Antiderivative",
    "panel_nodes",
    "derivative",
    "smoothstep",
    "Branch",
    "Mollified",
    "mollify_corner",
    "LimitEstimate",
    "limit_extrapolate",
    "invert_increasing",
    "solve_increasing",
]

ENV_VAR = "ADMLAB_TOL"


@dataclass(frozen=True)
class Tolerances:
    quad_abs_tol: float = 1e-10
    deriv_step: float = 1e-6
    limit_rel_tol: float = 1e-6
    root_tol: float = 1e-12

    def __post_init__(self):
        for f in fields(self):
            value = getattr(self, f.name)
            if not (isinstance(value, (int, float)) and value > 0 and math.isfinite(value)):
                raise ValueError(f"tolerance {f.name} must be strictly positive, got {value!r}")

    @classmethod
    def from_env(cls, environ=None) -> "Tolerances":
        """Read overrides from ``ADMLAB_TOL``.

        Accepted forms: ``"quad_abs_tol=1e-9,limit_rel_tol=1e-7"`` or a bare
        number, which sets ``quad_abs_tol``.
        """
        raw = (environ if environ is not None else os.environ).get(ENV_VAR, "").strip()
        if not raw:
            return cls()
        try:
            return cls(quad_abs_tol=float(raw))
        except ValueError:
            pass
        known = {f.name for f in fields(cls)}
        updates = {}
        for item in raw.split(","):
            key, _, value = item.partition("=")
            key = key.strip()
            if key not in known:
                raise ValueError(f"unknown tolerance {key!r} in {ENV_VAR}")
            updates[key] = float(value)
        return replace(cls(), **updates)

    def as_dict(self) -> dict:
        return {f.name: getattr(self, f.name) for f in fields(self)}


DEFAULT_TOL = Tolerances()


# ---------------------------------------------------------------------------
# sampled data


class Sampled1D:
    """Interpolant of sampled data, evaluable only inside its nodes.

    ``method`` is ``"spline"`` (natural-ish cubic spline, C^2) or ``"pchip"``
    (shape preserving, no overshoot between nodes).  Derivatives come from
    ``derivative_fn`` when given, otherwise from 4th-order centered
    differences of the interpolant.
    """

    def __init__(self, nodes, values, derivative_fn=None, method: str = "spline"):
        nodes = np.asarray(nodes, dtype=float)
        values = np.asarray(values, dtype=float)
        if nodes.ndim != 1 or nodes.size < 2:
            raise ValueError("Sampled1D needs at least two nodes")
        if nodes.shape != values.shape:
            raise ValueError("nodes and values must have the same length")
        if np.any(np.diff(nodes) <= 0):
            raise ValueError("nodes must be strictly increasing")
        self.nodes = nodes
        self.values = values
        self.derivative_fn = derivative_fn
        if method == "spline":
            self._spline = CubicSpline(nodes, values)
        elif method == "pchip":
            self._spline = PchipInterpolator(nodes, values)
        else:
            raise ValueError(f"unknown interpolation method {method!r}")
        self.method = method

    @property
    def lo(self) -> float:
        return float(self.nodes[0])

    @property
    def hi(self) -> float:
        return float(self.nodes[-1])

    def _check(self, x):
        x = np.asarray(x, dtype=float)
        span = self.hi - self.lo
        if np.any(x < self.lo - 1e-12 * span) or np.any(x > self.hi + 1e-12 * span):
            raise DomainError(f"evaluation outside [{self.lo}, {self.hi}]")
        return np.clip(x, self.lo, self.hi)

    def __call__(self, x):
        return self._spline(self._check(x))

    def derivative(self, x, order: int = 1):
        x = self._check(x)
        if self.derivative_fn is not None and order == 1:
            return self.derivative_fn(x)
        # keep the stencil inside the node range
        step = 1e-3 * (self.hi - self.lo) / max(len(self.nodes), 1)
        xc = np.clip(x, self.lo + 2 * step, self.hi - 2 * step)
        return derivative(self._spline, xc, order=order, step=step)


# ---------------------------------------------------------------------------
# quadrature


def _simpson(h, fa, fm, fb):
    return h / 6.0 * (fa + 4.0 * fm + fb)


def _eval(fn, x):
    return np.asarray(fn(x), dtype=float) * np.ones_like(x)


def _probe(fn, x):
    """Endpoint evaluation where inf or nan is an expected answer."""
    with np.errstate(divide="ignore", invalid="ignore"):
        return _eval(fn, x)


def _adaptive_simpson(fn, a, b, tol, fa=None, fb=None, max_depth=48, max_evals=2_000_000):
    """Level-wise adaptive Simpson; all new nodes of a level are evaluated at once."""
    if fa is None:
        fa = float(_eval(fn, np.array([a]))[0])
    if fb is None:
        fb = float(_eval(fn, np.array([b]))[0])
    m = 0.5 * (a + b)
    fm = float(_eval(fn, np.array([m]))[0])
    if not math.isfinite(fm):
        raise NonFinite(f"integrand not finite at x={m}")
    lo = np.array([a])
    hi = np.array([b])
    f_lo = np.array([fa])
    f_mid = np.array([fm])
    f_hi = np.array([fb])
    whole = _simpson(hi - lo, f_lo, f_mid, f_hi)
    tols = np.array([tol])
    total = 0.0
    evals = 3
    for depth in range(max_depth):
        mid = 0.5 * (lo + hi)
        lm = 0.5 * (lo + mid)
        rm = 0.5 * (mid + hi)
        vals = _eval(fn, np.concatenate([lm, rm]))
        evals += vals.size
        if not np.all(np.isfinite(vals)):
            bad = np.concatenate([lm, rm])[~np.isfinite(vals)][0]
            raise NonFinite(f"integrand not finite at x={bad}")
        f_lm, f_rm = vals[: lm.size], vals[lm.size:]
        left = _simpson(mid - lo, f_lo, f_lm, f_mid)
        right = _simpson(hi - mid, f_mid, f_rm, f_hi)
        delta = left + right - whole
        done = np.abs(delta) <= 15.0 * tols
        # intervals that shrank to rounding level are accepted as they are
        done |= (hi - lo) <= 1e-15 * max(abs(a), abs(b), 1.0)
        total += float(np.sum((left + right + delta / 15.0)[done]))
        keep = ~done
        if not np.any(keep):
            return total
        if evals > max_evals:
            break
        lo = np.concatenate([lo[keep], mid[keep]])
        hi = np.concatenate([mid[keep], hi[keep]])
        new_lo_f = np.concatenate([f_lo[keep], f_mid[keep]])
        new_hi_f = np.concatenate([f_mid[keep], f_hi[keep]])
        f_mid = np.concatenate([f_lm[keep], f_rm[keep]])
        whole = np.concatenate([left[keep], right[keep]])
        tols = np.concatenate([tols[keep], tols[keep]]) / 2.0
        f_lo, f_hi = new_lo_f, new_hi_f
    raise NoConvergence(f"adaptive Simpson on [{a}, {b}] hit its subdivision limit")


def _endpoint_value(g, u0, span):
    """Value of a smooth g at u0 from interior samples, for 0*inf style endpoints."""
    val = float(_probe(g, np.array([u0]))[0])
    if math.isfinite(val):
        return val
    d = 1e-3 * span
    pts = _eval(g, np.array([u0 + d, u0 + 2 * d, u0 + 3 * d]))
    return float(3 * pts[0] - 3 * pts[1] + pts[2])


def integrate(fn: Callable, a: float, b: float, tol: float = DEFAULT_TOL.quad_abs_tol,
              singular: str | None = None) -> float:
    """Adaptive Simpson quadrature of ``fn`` over ``[a, b]``.

    Endpoints where ``fn`` is not finite are treated as integrable
    ``(x - a)^(-1/2)`` type singularities and removed by the substitution
    ``x = a + u**2``.  ``singular`` forces this for ``"left"``, ``"right"`` or
    ``"both"`` ends.
    """
    if b < a:
        raise ValueError("integrate requires a <= b")
    if a == b:
        return 0.0
    fa = float(_probe(fn, np.array([a]))[0])
    fb = float(_probe(fn, np.array([b]))[0])
    left = singular in ("left", "both") or not math.isfinite(fa)
    right = singular in ("right", "both") or not math.isfinite(fb)
    if left and right:
        m = 0.5 * (a + b)
        return integrate(fn, a, m, tol / 2, "left") + integrate(fn, m, b, tol / 2, "right")
    if left:
        def g(u):
            # weight with the representable offset so c/sqrt(x - a) cancels exactly
            x = a + u * u
            return 2.0 * np.sqrt(x - a) * fn(x)
        span = math.sqrt(b - a)
        g0 = _endpoint_value(g, 0.0, span)
        return _adaptive_simpson(g, 0.0, span, tol, fa=g0, fb=2.0 * span * fb)
    if right:
        def g(u):
            x = b - u * u
            return 2.0 * np.sqrt(b - x) * fn(x)
        span = math.sqrt(b - a)
        g0 = _endpoint_value(g, 0.0, span)
        return _adaptive_simpson(g, 0.0, span, tol, fa=g0, fb=2.0 * span * fa)
    return _adaptive_simpson(fn, a, b, tol, fa=fa, fb=fb)


_GL_CACHE: dict[int, tuple[np.ndarray, np.ndarray]] = {}


def gauss_legendre(order: int = 24):
    if order not in _GL_CACHE:
        _GL_CACHE[order] = np.polynomial.legendre.leggauss(order)
    return _GL_CACHE[order]


def panel_nodes(lo: float, hi: float, breakpoints: Sequence[float] = (),
                first_width: float | None = None, ratio: float = 1.2) -> np.ndarray:
    """Geometrically graded nodes from ``lo`` to ``hi`` that include every breakpoint."""
    if hi <= lo:
        raise ValueError("panel_nodes needs lo < hi")
    scale = max(abs(lo), hi - lo, 1.0)
    if first_width is None:
        first_width = 1e-4 * max(abs(lo), 1.0)
    first_width = min(first_width, hi - lo)
    count = int(math.ceil(math.log((hi - lo) / first_width) / math.log(ratio))) + 1
    offsets = first_width * ratio ** np.arange(count)
    nodes = np.concatenate([[lo], lo + offsets[offsets < hi - lo], [hi]])
    bps = [b for b in breakpoints if lo < b < hi]
    nodes = np.unique(np.concatenate([nodes, bps]))
    # drop nodes crowding a breakpoint so no panel becomes absurdly thin
    keep = np.ones(nodes.size, dtype=bool)
    for b in bps:
        close = (np.abs(nodes - b) < 1e-9 * scale) & (nodes != b)
        keep &= ~close
    return nodes[keep]


class Antiderivative:
    """F(x) = integral of ``fn`` from ``nodes[0]`` to x.

    Each panel between consecutive nodes is integrated by Gauss-Legendre at
    two orders; panels where they disagree fall back to :func:`integrate`.
    Evaluation inside a panel uses fixed Gauss-Legendre, so ``fn`` must be
    smooth inside each panel (put kinks at nodes).  With ``singular_left``
    the first panel is integrated in ``u = sqrt(x - x0)``.
    """

    def __init__(self, fn: Callable, nodes, singular_left: bool = False,
                 tol: float = 1e-12, order: int = 24):
        nodes = np.asarray(nodes, dtype=float)
        if nodes.size < 2 or np.any(np.diff(nodes) <= 0):
            raise ValueError("Antiderivative needs strictly increasing nodes")
        self.fn = fn
        self.nodes = nodes
        self.singular_left = singular_left
        self.order = order
        lo, hi = nodes[:-1], nodes[1:]
        sing = np.zeros(lo.shape, dtype=bool)
        sing[0] = singular_left
        coarse = self.local(lo, hi, sing, order)
        fine = self.local(lo, hi, sing, 2 * order)
        if not np.all(np.isfinite(fine)):
            k = int(np.argmin(np.isfinite(fine)))
            raise NonFinite(f"integrand not finite on panel [{lo[k]}, {hi[k]}]")
        floor = 1e-15 * float(np.sum(np.abs(fine)))
        pieces = fine.copy()
        for k in np.flatnonzero(np.abs(coarse - fine) > tol * np.abs(fine) + floor):
            pieces[k] = self._refine(lo[k], hi[k], bool(sing[k]), fine[k], tol, floor)
        self.table = np.concatenate([[0.0], np.cumsum(pieces)])

    def _refine(self, lo, hi, singular, first, tol, floor, max_split=256):
        """Composite Gauss-Legendre on one panel, doubling the pieces until settled.

        Stops early when successive differences stop shrinking: that is the
        integrand's own noise floor (typical next to a boundary whose
        location is only known to rounding).
        """
        t, w = gauss_legendre(2 * self.order)
        prev, prev_diff = first, math.inf
        parts = 2
        while parts <= max_split:
            if singular:
                edges = np.linspace(0.0, math.sqrt(hi - lo), parts + 1)
            else:
                edges = np.linspace(lo, hi, parts + 1)
            mid = 0.5 * (edges[1:] + edges[:-1])[:, None]
            half = 0.5 * (edges[1:] - edges[:-1])[:, None]
            u = mid + half * t
            if singular:
                x = lo + u * u
                weight = 2.0 * np.sqrt(x - lo)
                with np.errstate(invalid="ignore"):
                    vals = np.where(weight > 0, weight * _eval(self.fn, x), 0.0)
            else:
                vals = _eval(self.fn, u)
            if not np.all(np.isfinite(vals)):
                raise NonFinite(f"integrand not finite on panel [{lo}, {hi}]")
            value = float(np.sum(half * w * vals))
            diff = abs(value - prev)
            if diff <= tol * abs(value) + floor or diff >= prev_diff:
                return value
            prev, prev_diff = value, diff
            parts *= 2
        return prev

    @property
    def lo(self) -> float:
        return float(self.nodes[0])

    @property
    def hi(self) -> float:
        return float(self.nodes[-1])

    def panel_of(self, x):
        k = np.searchsorted(self.nodes, x, side="right") - 1
        return np.clip(k, 0, self.nodes.size - 2)

    def local(self, lo, x, singular, order=None):
        """Integral of fn from ``lo`` to ``x`` elementwise (same panel)."""
        t, w = gauss_legendre(order or self.order)
        lo = np.asarray(lo, dtype=float)
        x = np.asarray(x, dtype=float)
        out = np.zeros(x.shape)
        reg = ~singular
        if np.any(reg):
            a, b = lo[reg], x[reg]
            mid = 0.5 * (a + b)
            half = 0.5 * (b - a)
            pts = mid[:, None] + half[:, None] * t[None, :]
            out[reg] = half * np.sum(w[None, :] * _eval(self.fn, pts), axis=1)
        if np.any(singular):
            a, b = lo[singular], x[singular]
            umax = np.sqrt(np.maximum(b - a, 0.0))
            u = 0.5 * umax[:, None] * (t[None, :] + 1.0)
            pts = a[:, None] + u * u
            weight = 2.0 * np.sqrt(pts - a[:, None])
            with np.errstate(invalid="ignore"):
                vals = np.where(weight > 0, weight * _eval(self.fn, pts), 0.0)
            out[singular] = 0.5 * umax * np.sum(w[None, :] * vals, axis=1)
        return out

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        scalar = x.ndim == 0
        x = np.atleast_1d(x)
        span = self.hi - self.lo
        if np.any(x < self.lo - 1e-12 * span) or np.any(x > self.hi * (1 + 1e-12) + 1e-12):
            raise DomainError(f"antiderivative evaluated outside [{self.lo}, {self.hi}]")
        x = np.clip(x, self.lo, self.hi)
        k = self.panel_of(x)
        singular = (k == 0) & self.singular_left
        res = self.table[k] + self.local(self.nodes[k], x, singular)
        at_node = np.searchsorted(self.nodes, x)
        exact = (at_node < self.nodes.size) & (self.nodes[np.minimum(at_node, self.nodes.size - 1)] == x)
        res = np.where(exact, self.table[np.minimum(at_node, self.nodes.size - 1)], res)
        return res[0] if scalar else res


# ---------------------------------------------------------------------------
# finite differences


def derivative(fn: Callable, x, order: int = 1, step=None, rel_step: float = DEFAULT_TOL.deriv_step):
    """4th-order centered difference of ``fn`` at ``x`` (order 1 or 2).

    The default step is ``rel_step * max(1, |x|)`` for first derivatives and
    ``1e-3 * max(1, |x|)`` for second derivatives, where the 1/h^2 roundoff
    would otherwise dominate.
    """
    x = np.asarray(x, dtype=float)
    if step is None:
        base = rel_step if order == 1 else 1e-3
        step = base * np.maximum(1.0, np.abs(x))
    h = step
    fm2, fm1 = _eval(fn, x - 2 * h), _eval(fn, x - h)
    fp1, fp2 = _eval(fn, x + h), _eval(fn, x + 2 * h)
    if order == 1:
        return (fm2 - 8 * fm1 + 8 * fp1 - fp2) / (12 * h)
    if order == 2:
        f0 = _eval(fn, x)
        return (-fm2 + 16 * fm1 - 30 * f0 + 16 * fp1 - fp2) / (12 * h * h)
    raise ValueError("only first and second derivatives are supported")


def invert_increasing(fn: Callable, targets, lo: float, hi: float, iterations: int = 200):
    """Vectorized bisection for fn(x) = target with fn nondecreasing on [lo, hi]."""
    targets = np.asarray(targets, dtype=float)
    a = np.full(targets.shape, float(lo))
    b = np.full(targets.shape, float(hi))
    for _ in range(iterations):
        m = 0.5 * (a + b)
        below = _eval(fn, m) < targets
        a = np.where(below, m, a)
        b = np.where(below, b, m)
        if np.all(b - a <= 4e-16 * np.maximum(np.abs(b), 1.0)):
            break
    return 0.5 * (a + b)


def solve_increasing(fn: Callable, dfn: Callable, targets, lo: float, hi: float,
                     guess=None, xtol: float = DEFAULT_TOL.root_tol, max_iter: int = 200):
    """Vectorized safeguarded Newton for fn(x) = target, fn increasing on [lo, hi].

    Each iterate keeps a bracket; Newton steps that leave it are replaced by
    bisection, so convergence never depends on the quality of ``guess``.
    After 20 iterations every other step bisects, which bounds the work when
    rounding in fn makes Newton cycle.
    """
    targets = np.asarray(targets, dtype=float)
    a = np.full(targets.shape, float(lo))
    b = np.full(targets.shape, float(hi))
    x = np.clip(np.full(targets.shape, 0.5 * (lo + hi)) if guess is None
                else np.asarray(guess, dtype=float) * np.ones(targets.shape), lo, hi)
    for it in range(max_iter):
        r = _eval(fn, x) - targets
        a = np.where(r < 0, x, a)
        b = np.where(r > 0, x, b)
        d = _eval(dfn, x)
        with np.errstate(divide="ignore", invalid="ignore"):
            step = r / d
            newton = x - step
        ok = np.isfinite(newton) & (newton >= a) & (newton <= b)
        if it >= 20 and it % 2:
            # a quantized fn can make Newton cycle inside the bracket
            ok = np.zeros_like(ok)
        x_new = np.where(ok, newton, 0.5 * (a + b))
        x_new = np.where(r == 0, x, x_new)
        room = np.maximum(xtol * np.maximum(np.abs(x_new), 1.0), 4.0 * np.spacing(np.abs(x_new)))
        settled = np.abs(r) <= 4.0 * np.spacing(np.abs(targets))
        if np.all((np.abs(x_new - x) <= room) | (b - a <= room) | settled):
            return np.where(settled, x, x_new)
        x = x_new
    raise NoConvergence("safeguarded Newton did not converge")


# ---------------------------------------------------------------------------
# corner mollifier


def smoothstep(t):
    """Quintic smoothstep: 0 -> 1 on [0, 1] with vanishing 1st/2nd derivatives at the ends."""
    t = np.clip(t, 0.0, 1.0)
    return t ** 3 * (10.0 - 15.0 * t + 6.0 * t * t)


def _smoothstep_d1(t):
    t = np.clip(t, 0.0, 1.0)
    return 30.0 * t * t * (1.0 - t) ** 2


def _smoothstep_d2(t):
    t = np.clip(t, 0.0, 1.0)
    return 60.0 * t * (1.0 - t) * (1.0 - 2.0 * t)


class Branch(NamedTuple):
    """A smooth extension of one side of a corner: value, slope, curvature."""

    value: Callable
    d1: Callable
    d2: Callable


def _taylor_branch(x0, v, d1, d2):
    return Branch(
        lambda x: v + d1 * (x - x0) + 0.5 * d2 * (x - x0) ** 2,
        lambda x: d1 + d2 * (x - x0),
        lambda x: d2 + 0.0 * x,
    )


class Mollified:
    """Corner-smoothed function produced by :func:`mollify_corner`.

    Inside the annulus the slope is a smoothstep blend of the two branch
    slopes plus a nonnegative-shaped bump that restores the right endpoint
    value; outside it the original function is returned untouched.
    """

    def __init__(self, f, df, d2f, corner, half_width, left: Branch, right: Branch, order=24):
        self.f, self.df, self.d2f = f, df, d2f
        self.corner = float(corner)
        self.half_width = float(half_width)
        self.left, self.right = left, right
        self.lo = self.corner - self.half_width
        self.hi = self.corner + self.half_width
        self._order = order
        self._f_lo = float(np.asarray(f(np.array(self.lo))))
        f_hi = float(np.asarray(f(np.array(self.hi))))
        blend_total = float(self._blend_integral(np.array([self.hi]), bump=False)[0])
        self.kappa = f_hi - self._f_lo - blend_total

    def _t(self, x):
        return (x - self.lo) / (2.0 * self.half_width)

    def _inner_slope(self, x, bump=True):
        t = self._t(x)
        s = smoothstep(t)
        out = (1.0 - s) * self.left.d1(x) + s * self.right.d1(x)
        if bump:
            out = out + self.kappa * _smoothstep_d1(t) / (2.0 * self.half_width)
        return out

    def _blend_integral(self, x, bump=True):
        t, w = gauss_legendre(self._order)
        x = np.asarray(x, dtype=float)
        half = 0.5 * (x - self.lo)
        pts = self.lo + half[..., None] * (t + 1.0)
        return half * np.sum(w * self._inner_slope(pts, bump=bump), axis=-1)

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        inside = (x > self.lo) & (x < self.hi)
        out = np.asarray(self.f(x), dtype=float) * np.ones_like(x)
        if np.any(inside):
            out = np.where(inside, self._f_lo + self._blend_integral(np.where(inside, x, self.lo)), out)
        return out

    def derivative(self, x):
        x = np.asarray(x, dtype=float)
        inside = (x > self.lo) & (x < self.hi)
        out = np.asarray(self.df(x), dtype=float) * np.ones_like(x)
        if np.any(inside):
            out = np.where(inside, self._inner_slope(np.where(inside, x, self.lo)), out)
        return out

    def second_derivative(self, x):
        x = np.asarray(x, dtype=float)
        inside = (x > self.lo) & (x < self.hi)
        out = np.asarray(self.d2f(x), dtype=float) * np.ones_like(x)
        if np.any(inside):
            xi = np.where(inside, x, self.lo)
            t = self._t(xi)
            s = smoothstep(t)
            ds = _smoothstep_d1(t) / (2.0 * self.half_width)
            inner = (
                ds * (self.right.d1(xi) - self.left.d1(xi))
                + (1.0 - s) * self.left.d2(xi)
                + s * self.right.d2(xi)
                + self.kappa * _smoothstep_d2(t) / (2.0 * self.half_width) ** 2
            )
            out = np.where(inside, inner, out)
        return out


def mollify_corner(f: Callable, corner: float, half_width: float, *, df=None, d2f=None,
                   left: Branch | None = None, right: Branch | None = None,
                   domain: tuple[float, float] | None = None) -> Mollified:
    """Smooth ``f`` on ``[corner - half_width, corner + half_width]`` to a C^2 function.

    ``left``/``right`` are smooth continuations of the two sides across the
    corner; by default they are second-order Taylor extensions from the
    annulus endpoints.  Missing derivatives of ``f`` are taken by centered
    differences.  The result agrees with ``f`` exactly outside the annulus and
    is nondecreasing there whenever both branch slopes are nonnegative and the
    endpoint correction ``kappa`` is nonnegative.
    """
    if half_width <= 0:
        raise ValueError("half_width must be positive")
    lo, hi = corner - half_width, corner + half_width
    if domain is not None and (lo < domain[0] or hi > domain[1]):
        raise DomainTooSmall(f"annulus [{lo}, {hi}] leaves the domain {domain}")
    if df is None:
        df = lambda x: derivative(f, x)  # noqa: E731
    if d2f is None:
        d2f = lambda x: derivative(f, x, order=2)  # noqa: E731

    def at(fn, x):
        return float(np.asarray(fn(np.array(x))))

    if left is None:
        left = _taylor_branch(lo, at(f, lo), at(df, lo), at(d2f, lo))
    if right is None:
        right = _taylor_branch(hi, at(f, hi), at(df, hi), at(d2f, hi))
    return Mollified(f, df, d2f, corner, half_width, left, right)


# ---------------------------------------------------------------------------
# limits of monotone sequences


class LimitEstimate(NamedTuple):
    value: float
    error: float

    @property
    def diverges(self) -> bool:
        return math.isinf(self.value)


def limit_extrapolate(abscissae, samples, decay_exponent_hint: float = 1.0,
                      rel_tol: float = DEFAULT_TOL.limit_rel_tol) -> LimitEstimate:
    """Limit of a nondecreasing sequence sampled at increasing abscissae.

    Fits ``m(x) = m_inf - c * x**(-p)`` through the last two samples and uses
    the previous pair for the error bar.  A curve whose slope per unit of
    ``log x`` at the end is at least twice the slope at the start is declared
    divergent and reported as ``+inf``.
    """
    x = np.asarray(abscissae, dtype=float)
    m = np.asarray(samples, dtype=float)
    if x.shape != m.shape or x.ndim != 1:
        raise ValueError("abscissae and samples must be 1-d and of equal length")
    if x.size < 2:
        raise ValueError("need at least two samples")
    if np.any(np.diff(x) <= 0):
        raise ValueError("abscissae must be strictly increasing")
    if np.all(m == m[0]):
        return LimitEstimate(float(m[0]), 0.0)
    noise = rel_tol * max(1.0, float(np.max(np.abs(m))))
    steps = np.diff(m)
    worst = int(np.argmin(steps))
    if steps[worst] < -noise:
        raise NotMonotone(
            f"samples decrease by {-steps[worst]:.3e} between x={x[worst]} and x={x[worst + 1]}",
            location=float(x[worst + 1]),
            amount=float(-steps[worst]),
        )
    if x.size >= 3 and x[0] > 0:
        slopes = steps / np.diff(np.log(x))
        if slopes[-1] > 0 and slopes[-1] >= 2.0 * max(slopes[0], 0.0) and m[-1] - m[0] > 10 * noise:
            return LimitEstimate(math.inf, math.inf)
    p = decay_exponent_hint

    def fit(i, j):
        if x[i] <= 0:
            return float(m[j])
        wi, wj = x[i] ** p, x[j] ** p
        return float((m[j] * wj - m[i] * wi) / (wj - wi))

    est = fit(-2, -1)
    if x.size >= 3:
        prev = fit(-3, -2)
        err = abs(est - prev) + noise
    else:
        err = abs(float(m[-1] - m[-2])) + noise
    return LimitEstimate(est, err)

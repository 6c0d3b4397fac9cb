"""Slice idempotents: ``f * f = f``.

On each sphere ``e^{tS}`` an idempotent is identically 0, identically 1, or
takes the affine form ``-((J-K)^{-1} K + I (J-K)^{-1})`` which vanishes at
``I = J`` and equals 1 at ``I = K``.

Apart from the constants 0 and 1 no idempotent has finite Laurent support:
the ``I``-part of a pair sphere has modulus at least 1/2 and cannot vanish at
the real points.  Idempotents are therefore built as exact interpolants on
the angles of a midpoint grid, and checked at the resolution of that grid
(coefficients compared modulo the grid's index aliasing, see
``series.alias``).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Union

import numpy as np

from .boundary import BoundaryGrid, evaluate_on_grid, fibonacci_sphere
from .errors import DegenerateUnits, Unclassifiable
from .quaternions import (
    EPS0,
    ONE,
    Quaternion,
    UnitImaginary,
    dot_cross_decompose,
    imag_times,
    inverse,
    qinv,
    qmul,
    qnorm,
    slice_decompose,
)
from .series import (
    SliceLaurentSeries,
    alias,
    conjugate,
    evaluate_boundary,
    star,
    stem,
    tilde,
)

UNIT_TOL = 1e-8


@dataclass(frozen=True)
class SphereBehavior:
    tag: str
    J: UnitImaginary | None = None
    K: UnitImaginary | None = None

    def __post_init__(self):
        if self.tag not in ("zero", "one", "pair"):
            raise ValueError(f"unknown sphere behavior {self.tag!r}")
        if self.tag == "pair":
            if self.J is None or self.K is None:
                raise ValueError("pair behavior needs J and K")
            if np.linalg.norm(self.J.vector - self.K.vector) <= EPS0:
                raise DegenerateUnits("pair behavior needs J != K")

    @classmethod
    def zero(cls):
        return cls("zero")

    @classmethod
    def one(cls):
        return cls("one")

    @classmethod
    def pair(cls, J: UnitImaginary, K: UnitImaginary):
        return cls("pair", J, K)

    def is_self_tilde_conjugate(self, tol: float = UNIT_TOL) -> bool:
        if self.tag != "pair":
            return True
        return bool(np.linalg.norm(self.J.vector + self.K.vector) <= tol)

    def values(self, units) -> np.ndarray:
        """Values at the units (n, 3) of one sphere, shape (n, 4)."""
        units = np.atleast_2d(np.asarray(units, dtype=float))
        out = np.zeros((len(units), 4))
        if self.tag == "one":
            out[:, 0] = 1.0
        elif self.tag == "pair":
            d = qinv(np.r_[0.0, self.J.vector - self.K.vector])
            dk = qmul(d, np.r_[0.0, self.K.vector])
            out = -(dk[None, :] + imag_times(units, np.broadcast_to(d, out.shape)))
        return out


def idempotent_value(b: SphereBehavior, I: UnitImaginary) -> Quaternion:
    if b.tag == "zero":
        return Quaternion()
    if b.tag == "one":
        return ONE
    d = inverse(b.J.as_quaternion() - b.K.as_quaternion())
    return -(d * b.K + I.as_quaternion() * d)


# -- specifications ----------------------------------------------------------

BehaviorLike = Union[SphereBehavior, Callable[[float], SphereBehavior]]


@dataclass(frozen=True)
class Interval:
    t0: float
    t1: float
    behavior: BehaviorLike

    def at(self, t: float) -> SphereBehavior:
        b = self.behavior
        return b if isinstance(b, SphereBehavior) else b(t)


@dataclass
class IdempotentSpec:
    """Sphere-by-sphere description of an idempotent on ``(0, pi)``."""

    intervals: list
    real_points: dict = field(default_factory=lambda: {"+1": 0, "-1": 0})

    def __post_init__(self):
        ivs = sorted(self.intervals, key=lambda iv: iv.t0)
        if not ivs:
            raise ValueError("spec needs at least one interval")
        if abs(ivs[0].t0) > 1e-12 or abs(ivs[-1].t1 - math.pi) > 1e-9:
            raise ValueError("intervals must cover (0, pi)")
        for a, b in zip(ivs, ivs[1:]):
            if abs(a.t1 - b.t0) > 1e-12:
                raise ValueError(f"intervals must be contiguous: {a.t1} vs {b.t0}")
        for iv in ivs:
            if not iv.t1 > iv.t0:
                raise ValueError("interval with t1 <= t0")
        for key in ("+1", "-1"):
            if self.real_points.get(key, 0) not in (0, 1):
                raise ValueError("real point values must be 0 or 1")
        self.intervals = ivs

    def behavior_at(self, t: float) -> SphereBehavior:
        for iv in self.intervals:
            if iv.t0 <= t < iv.t1:
                return iv.at(t)
        return self.intervals[-1].at(t)

    @classmethod
    def from_dict(cls, d: dict) -> IdempotentSpec:
        intervals = []
        for item in d["intervals"]:
            tag = item["tag"]
            if tag == "pair":
                b = SphereBehavior.pair(UnitImaginary.from_vector(item["J"]),
                                        UnitImaginary.from_vector(item["K"]))
            else:
                b = SphereBehavior(tag)
            intervals.append(Interval(float(item["t0"]), float(item["t1"]), b))
        real = d.get("real_points", {"+1": 0, "-1": 0})
        return cls(intervals, {"+1": int(real.get("+1", 0)), "-1": int(real.get("-1", 0))})

    def to_dict(self) -> dict:
        items = []
        for iv in self.intervals:
            if not isinstance(iv.behavior, SphereBehavior):
                raise ValueError("t-dependent behaviors cannot be serialized")
            item = {"t0": iv.t0, "t1": iv.t1, "tag": iv.behavior.tag}
            if iv.behavior.tag == "pair":
                item["J"] = iv.behavior.J.vector.tolist()
                item["K"] = iv.behavior.K.vector.tolist()
            items.append(item)
        return {"intervals": items, "real_points": dict(self.real_points)}


def characteristic_spec(t0: float, t1: float) -> IdempotentSpec:
    """Indicator of the spheres with ``t0 <= t < t1`` (a circular set)."""
    ivs = []
    if t0 > 0:
        ivs.append(Interval(0.0, t0, SphereBehavior.zero()))
    ivs.append(Interval(t0, t1, SphereBehavior.one()))
    if t1 < math.pi:
        ivs.append(Interval(t1, math.pi, SphereBehavior.zero()))
    return IdempotentSpec(ivs, {"+1": int(t0 == 0), "-1": int(t1 >= math.pi)})


def ell_spec(J: UnitImaginary) -> IdempotentSpec:
    """``(1 - IJ)/2`` on every sphere: zero at ``-J``, one at ``J``."""
    return IdempotentSpec([Interval(0.0, math.pi, SphereBehavior.pair(-J, J))])


def pair_spec(J: UnitImaginary, K: UnitImaginary) -> IdempotentSpec:
    return IdempotentSpec([Interval(0.0, math.pi, SphereBehavior.pair(J, K))])


def rotating_spec() -> IdempotentSpec:
    """``(1 + I (cos t i + sin t j))/2``: the zero turns with the sphere."""
    def behavior(t):
        u = UnitImaginary(math.cos(t), math.sin(t), 0.0)
        return SphereBehavior.pair(u, -u)
    return IdempotentSpec([Interval(0.0, math.pi, behavior)])


def spec_values(spec: IdempotentSpec, t_nodes, units) -> np.ndarray:
    """Prescribed values, shape (len(t_nodes), len(units), 4)."""
    return np.stack([spec.behavior_at(float(t)).values(units) for t in t_nodes])


# -- construction and checks ---------------------------------------------------

def build_idempotent(spec: IdempotentSpec, n_t: int = 128) -> SliceLaurentSeries:
    """Interpolate ``spec`` on the circle of the slice through ``i``.

    The nodes are the ``2 n_t`` angles ``(m + 1/2) pi / n_t``, i.e. the
    t-nodes of ``make_grid(n_t, .)`` and their mirror images.  The returned
    series lives on ``[-n_t, n_t - 1]`` and reproduces the spec exactly at
    those nodes on every slice whenever the spec is a genuine slice function.
    """
    M = 2 * n_t
    theta = (np.arange(M) + 0.5) * math.pi / n_t
    plus = np.array([[1.0, 0.0, 0.0]])
    vals = np.empty((M, 4))
    for m in range(M):
        if m < n_t:
            vals[m] = spec.behavior_at(theta[m]).values(plus)[0]
        else:
            vals[m] = spec.behavior_at(2.0 * math.pi - theta[m]).values(-plus)[0]
    # q = z1 + z2 j; left multiplication by e^{i phi} scales both parts
    z1 = vals[:, 0] + 1j * vals[:, 1]
    z2 = vals[:, 2] + 1j * vals[:, 3]
    n = np.arange(-n_t, n_t)
    phase = np.exp(-1j * math.pi * n / M) / M
    c1 = phase * np.fft.fft(z1)[n % M]
    c2 = phase * np.fft.fft(z2)[n % M]
    coeffs = np.stack([c1.real, c1.imag, c2.real, c2.imag], axis=1)
    return SliceLaurentSeries(-n_t, coeffs)


def fit_residual(f: SliceLaurentSeries, spec: IdempotentSpec, grid: BoundaryGrid) -> float:
    """Largest nodal gap between ``f`` and the prescribed values.

    The fit only sees one slice, so agreement on the whole sphere lattice is
    what certifies that the spec describes a slice function.
    """
    target = spec_values(spec, grid.t_nodes, grid.sphere_nodes)
    return float(np.max(qnorm(evaluate_on_grid(f, grid) - target)))


def verify_idempotent(f: SliceLaurentSeries, grid: BoundaryGrid, aliased: bool = True,
                      max_degree: int | None = None) -> float:
    """Nodal ``max |f*f - f|`` plus the coefficient norm of ``f*f - f``.

    With ``aliased`` the coefficients are compared after folding by the
    grid's alias period, which is exactly the information the nodes carry.
    """
    ff = star(f, f, max_degree)
    nodal = float(np.max(qnorm(evaluate_on_grid(ff, grid) - evaluate_on_grid(f, grid))))
    if aliased:
        p = grid.alias_period
        coeff = (alias(ff, p) - alias(f, p)).l2_norm()
    else:
        coeff = (ff - f).l2_norm()
    return nodal + coeff


def is_self_tilde_conjugate(f: SliceLaurentSeries, period: int | None = None,
                            tol: float = 1e-12) -> bool:
    g = tilde(conjugate(f))
    if period is not None:
        f, g = alias(f, period), alias(g, period)
    return bool(np.max(qnorm((g - f).coeffs)) <= tol)


def _sphere_values(u, v, units):
    units = np.atleast_2d(units)
    return u[None, :] + imag_times(units, np.broadcast_to(v, (len(units), 4)))


def _tangent_basis(p):
    a = np.array([1.0, 0.0, 0.0]) if abs(p[0]) < 0.9 else np.array([0.0, 1.0, 0.0])
    e1 = np.cross(p, a)
    e1 /= np.linalg.norm(e1)
    return e1, np.cross(p, e1)


def _refine(cost, p, h, steps):
    """Compass search on the sphere: 8 tangent directions, halve on failure."""
    best = cost(p[None])[0]
    for _ in range(steps):
        e1, e2 = _tangent_basis(p)
        dirs = np.array([e1, -e1, e2, -e2, e1 + e2, e1 - e2, -e1 + e2, -e1 - e2])
        cand = p[None] + h * dirs
        cand /= np.linalg.norm(cand, axis=1, keepdims=True)
        c = cost(cand)
        k = int(np.argmin(c))
        if c[k] < best:
            p, best = cand[k], c[k]
        else:
            h *= 0.5
    return p, best


def _as_unit(q):
    """Unit imaginary closest to quaternion ``q`` and how far ``q`` is from it."""
    v = q[1:]
    nv = np.linalg.norm(v)
    if nv <= EPS0:
        return None, np.inf
    return v / nv, math.hypot(q[0], nv - 1.0)


def classify_sphere(f: SliceLaurentSeries, t: float, tol: float = UNIT_TOL,
                    n_scan: int = 1024, refine_steps: int = 20) -> SphereBehavior:
    """Recognize how ``f`` behaves on the sphere ``e^{tS}``.

    The zero ``J`` and the one ``K`` are located by a lattice scan followed by
    a compass refinement; the affine dependence of ``f`` on ``I`` then gives
    the closed forms ``J = -U V^{-1}``, ``K = (1 - U) V^{-1}`` that polish the
    estimate.  The located pair must reproduce every scanned value.
    """
    u, v = (a[0] for a in stem(f, np.exp(1j * t)))
    units = fibonacci_sphere(n_scan)
    vals = _sphere_values(u, v, units)
    mod0 = qnorm(vals)
    mod1 = qnorm(vals - np.array([1.0, 0.0, 0.0, 0.0]))
    if mod0.max() < tol:
        return SphereBehavior.zero()
    if mod1.max() < tol:
        return SphereBehavior.one()

    one = np.array([1.0, 0.0, 0.0, 0.0])

    def cost0(p):
        return qnorm(_sphere_values(u, v, p))

    def cost1(p):
        return qnorm(_sphere_values(u, v, p) - one)

    h0 = math.sqrt(4.0 * math.pi / n_scan)
    J, cj = _refine(cost0, units[int(np.argmin(mod0))], h0, refine_steps)
    K, ck = _refine(cost1, units[int(np.argmin(mod1))], h0, refine_steps)
    if qnorm(v) > EPS0:
        vinv = qinv(v)
        Jc, dj = _as_unit(-qmul(u, vinv))
        Kc, dk = _as_unit(qmul(one - u, vinv))
        if Jc is not None and dj < tol and cost0(Jc[None])[0] <= cj:
            J, cj = Jc, cost0(Jc[None])[0]
        if Kc is not None and dk < tol and cost1(Kc[None])[0] <= ck:
            K, ck = Kc, cost1(Kc[None])[0]
    if cj > tol or ck > tol or np.linalg.norm(J - K) <= EPS0:
        raise Unclassifiable(
            f"sphere t={t:.6g}: no idempotent pair (|f(J)|={cj:.3g}, |f(K)-1|={ck:.3g})")
    b = SphereBehavior.pair(UnitImaginary.from_vector(J), UnitImaginary.from_vector(K))
    recon = float(np.max(qnorm(b.values(units) - vals)))
    if recon > tol:
        raise Unclassifiable(f"sphere t={t:.6g}: pair reconstruction off by {recon:.3g}")
    return b


def classify_real_point(f: SliceLaurentSeries, sign: int = 1, tol: float = UNIT_TOL) -> int:
    """Value (0 or 1) of ``f`` at the real point ``sign * 1``."""
    val = evaluate_boundary(f, 0.0 if sign > 0 else math.pi, np.array([1.0, 0.0, 0.0]))[0]
    if qnorm(val) < tol:
        return 0
    if qnorm(val - np.array([1.0, 0.0, 0.0, 0.0])) < tol:
        return 1
    raise Unclassifiable(f"value {val} at real point {sign:+d} is neither 0 nor 1")


@dataclass
class PairStructureReport:
    t: float
    behavior: SphereBehavior
    a: Quaternion
    x: float
    y: float
    K_perp: UnitImaginary | None
    residual_x: float
    residual_dot: float
    residual_equation: float
    self_tilde_conjugate: bool
    residual_a_one: float | None
    tol: float = UNIT_TOL

    @property
    def passed(self) -> bool:
        ok = max(self.residual_x, self.residual_dot, self.residual_equation) < self.tol
        if self.self_tilde_conjugate:
            ok = ok and self.residual_a_one is not None and self.residual_a_one < self.tol
        return ok


def check_pair_structure(f: SliceLaurentSeries, t: float, tol: float = UNIT_TOL,
                      period: int | None = None) -> PairStructureReport:
    """Value of ``f`` opposite its zero: ``a = f(e^{-tJ})``.

    For an idempotent ``a`` solves ``aJ + Ja = 2J``, so ``a = 1 + yK`` with
    ``K`` orthogonal to ``J``; ``a = 1`` when ``f`` is self-tilde-conjugate.
    """
    b = classify_sphere(f, t, tol)
    if b.tag != "pair":
        raise Unclassifiable(f"sphere t={t:.6g} is constant ({b.tag}); no isolated zero")
    J = b.J
    u, v = (arr[0] for arr in stem(f, np.exp(1j * t)))
    a = Quaternion.from_array(u - imag_times(J.vector, v))
    x, y, Kp = slice_decompose(a)
    Jq = J.as_quaternion()
    eq = (a * Jq + Jq * a - 2 * Jq).norm()
    dot = 0.0
    if Kp is not None and y >= tol:
        dot = abs(dot_cross_decompose(Kp, J)[0])
    stc = is_self_tilde_conjugate(f, period=period)
    return PairStructureReport(
        t=t, behavior=b, a=a, x=x, y=y, K_perp=Kp,
        residual_x=abs(x - 1.0), residual_dot=dot, residual_equation=eq,
        self_tilde_conjugate=stc,
        residual_a_one=(a - ONE).norm() if stc else None,
        tol=tol,
    )

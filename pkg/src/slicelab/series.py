"""Finitely supported quaternion Laurent series and the star-product algebra.

A series ``f`` stands for the slice function ``f(q) = sum_n q^n a_n``: powers
of the variable act on the left, coefficients sit on the right.  Coefficients
are stored densely on the contiguous index range ``[n_min, n_max]`` as a
``(len, 4)`` float array.

On the boundary ``q = e^{tI}`` every series splits as ``f = U(t) + I V(t)``
where ``U`` and ``V`` are quaternion-valued and do not depend on ``I`` (the
"stem" of ``f``).  ``stem`` computes the pair for a batch of complex points
and all evaluation is routed through it.
"""

from __future__ import annotations

import numpy as np

from .errors import NotInvertible, SupportOverflow, ZeroValue
from .quaternions import (
    EPS0,
    Quaternion,
    imag_times,
    qconj,
    qinv,
    qmul,
    qnorm,
)

MAX_DEGREE = 256
SERIES_TOL = 1e-12


def _check_support(lo: int, hi: int, max_degree: int | None) -> None:
    md = MAX_DEGREE if max_degree is None else max_degree
    if lo < -md or hi > md:
        raise SupportOverflow(lo, hi, md)


class SliceLaurentSeries:
    """Immutable quaternion Laurent polynomial ``sum_{n_min}^{n_max} q^n a_n``."""

    __slots__ = ("n_min", "_coeffs")

    def __init__(self, n_min: int, coeffs):
        c = np.array(coeffs, dtype=float)
        if c.ndim == 1 and c.size == 4:
            c = c.reshape(1, 4)
        if c.ndim != 2 or c.shape[1] != 4 or c.shape[0] == 0:
            raise ValueError(f"coefficients must have shape (n, 4), got {c.shape}")
        if not np.all(np.isfinite(c)):
            raise ValueError("coefficients must be finite")
        c.setflags(write=False)
        self.n_min = int(n_min)
        self._coeffs = c

    # -- constructors -------------------------------------------------------

    @classmethod
    def zero(cls) -> SliceLaurentSeries:
        return cls(0, np.zeros((1, 4)))

    @classmethod
    def constant(cls, c) -> SliceLaurentSeries:
        return cls(0, _as_qarray(c).reshape(1, 4))

    @classmethod
    def monomial(cls, n: int, a=1.0) -> SliceLaurentSeries:
        return cls(n, _as_qarray(a).reshape(1, 4))

    @classmethod
    def from_terms(cls, terms: dict) -> SliceLaurentSeries:
        """Build from ``{n: coefficient}``; gaps are filled with zeros."""
        if not terms:
            return cls.zero()
        lo, hi = min(terms), max(terms)
        c = np.zeros((hi - lo + 1, 4))
        for n, a in terms.items():
            c[n - lo] = _as_qarray(a)
        return cls(lo, c)

    @classmethod
    def from_dict(cls, d: dict) -> SliceLaurentSeries:
        if not isinstance(d, dict) or "n_min" not in d or "coeffs" not in d:
            raise ValueError('series JSON needs keys "n_min" and "coeffs"')
        n_min = d["n_min"]
        if isinstance(n_min, bool) or not isinstance(n_min, int):
            raise ValueError('"n_min" must be an integer')
        coeffs = d["coeffs"]
        if not isinstance(coeffs, list) or not coeffs:
            raise ValueError('"coeffs" must be a non-empty list of [w, x, y, z]')
        for row in coeffs:
            if (not isinstance(row, list) or len(row) != 4
                    or not all(isinstance(v, (int, float)) and not isinstance(v, bool)
                               for v in row)):
                raise ValueError(f"bad coefficient entry {row!r}")
        return cls(n_min, coeffs)

    def to_dict(self) -> dict:
        return {"n_min": self.n_min, "coeffs": [[float(v) for v in row] for row in self._coeffs]}

    # -- accessors ----------------------------------------------------------

    @property
    def coeffs(self) -> np.ndarray:
        return self._coeffs

    @property
    def n_max(self) -> int:
        return self.n_min + len(self._coeffs) - 1

    @property
    def support(self) -> tuple[int, int]:
        return self.n_min, self.n_max

    def __len__(self) -> int:
        return len(self._coeffs)

    def coeff(self, n: int) -> Quaternion:
        return Quaternion.from_array(self.coeff_array(n))

    def coeff_array(self, n: int) -> np.ndarray:
        if self.n_min <= n <= self.n_max:
            return self._coeffs[n - self.n_min].copy()
        return np.zeros(4)

    def is_hardy(self, tol: float = EPS0) -> bool:
        k = min(0, self.n_max + 1) - self.n_min
        return k <= 0 or bool(np.all(qnorm(self._coeffs[:k]) <= tol))

    def l2_norm(self) -> float:
        return float(np.sqrt(np.sum(self._coeffs ** 2)))

    def l1_norm(self) -> float:
        return float(np.sum(qnorm(self._coeffs)))

    def nonzero_support(self, tol: float = 0.0):
        """Smallest index interval holding every coefficient with norm > tol."""
        idx = np.nonzero(qnorm(self._coeffs) > tol)[0]
        if idx.size == 0:
            return None
        return self.n_min + int(idx[0]), self.n_min + int(idx[-1])

    # -- reshaping ------------------------------------------------------------

    def restrict(self, lo: int, hi: int) -> SliceLaurentSeries:
        """Coefficients on ``[lo, hi]``, padding with zeros where needed."""
        if hi < lo:
            raise ValueError("empty interval")
        return SliceLaurentSeries(lo, self.window(lo, hi))

    def window(self, lo: int, hi: int) -> np.ndarray:
        out = np.zeros((hi - lo + 1, 4))
        a, b = max(lo, self.n_min), min(hi, self.n_max)
        if a <= b:
            out[a - lo:b - lo + 1] = self._coeffs[a - self.n_min:b - self.n_min + 1]
        return out

    def trim(self, tol: float = 0.0) -> SliceLaurentSeries:
        span = self.nonzero_support(tol)
        if span is None:
            return SliceLaurentSeries.zero()
        return self.restrict(*span)

    def shift(self, k: int, max_degree: int | None = None) -> SliceLaurentSeries:
        """``q^k * f``."""
        _check_support(self.n_min + k, self.n_max + k, max_degree)
        return SliceLaurentSeries(self.n_min + k, self._coeffs)

    def right_mul(self, lam) -> SliceLaurentSeries:
        """``f * lam`` for a constant ``lam``; acts on coefficients from the right."""
        return SliceLaurentSeries(self.n_min, qmul(self._coeffs, _as_qarray(lam)))

    # -- vector space structure --------------------------------------------------

    def _binary(self, other, sign):
        lo, hi = min(self.n_min, other.n_min), max(self.n_max, other.n_max)
        return SliceLaurentSeries(lo, self.window(lo, hi) + sign * other.window(lo, hi))

    def __add__(self, other):
        if not isinstance(other, SliceLaurentSeries):
            return NotImplemented
        return self._binary(other, 1.0)

    def __sub__(self, other):
        if not isinstance(other, SliceLaurentSeries):
            return NotImplemented
        return self._binary(other, -1.0)

    def __neg__(self):
        return SliceLaurentSeries(self.n_min, -self._coeffs)

    def __mul__(self, r):
        if isinstance(r, (int, float, np.floating, np.integer)):
            return SliceLaurentSeries(self.n_min, self._coeffs * float(r))
        return NotImplemented

    __rmul__ = __mul__

    def __truediv__(self, r):
        if isinstance(r, (int, float, np.floating, np.integer)):
            return self * (1.0 / float(r))
        return NotImplemented

    def __repr__(self):
        return f"SliceLaurentSeries(n_min={self.n_min}, n_max={self.n_max})"


def _as_qarray(a) -> np.ndarray:
    if isinstance(a, Quaternion):
        return a.as_array()
    if isinstance(a, (int, float, np.floating, np.integer)):
        return np.array([float(a), 0.0, 0.0, 0.0])
    arr = np.asarray(a, dtype=float)
    if arr.shape != (4,):
        raise ValueError(f"not a quaternion: {a!r}")
    return arr


def random_series(rng: np.random.Generator, lo: int, hi: int,
                  scale: float = 1.0) -> SliceLaurentSeries:
    """Standard normal coefficients on ``[lo, hi]``."""
    return SliceLaurentSeries(lo, scale * rng.standard_normal((hi - lo + 1, 4)))


def coeff_distance(f: SliceLaurentSeries, g: SliceLaurentSeries) -> float:
    """Largest coefficient-wise quaternion distance over the union of supports."""
    return float(np.max(qnorm((f - g).coeffs)))


def allclose(f: SliceLaurentSeries, g: SliceLaurentSeries, tol: float = SERIES_TOL) -> bool:
    return coeff_distance(f, g) <= tol


# -- evaluation ------------------------------------------------------------------

def stem(f: SliceLaurentSeries, z):
    """Stem pair ``(U, V)`` of ``f`` at complex points ``z``.

    For a point ``q = x + yI`` with ``z = x + iy`` the value is
    ``f(q) = U + I V``.  Both halves are Horner sums: the non-negative powers
    in ``z``, the negative ones in ``1/z``.
    """
    z = np.atleast_1d(np.asarray(z, dtype=complex))
    acc = np.zeros(z.shape + (4,), dtype=complex)
    zc = z[..., None]
    if f.n_max >= 0:
        pos = f.window(0, f.n_max)
        for n in range(f.n_max, -1, -1):
            acc = acc * zc + pos[n]
    if f.n_min < 0:
        if np.any(np.abs(z) <= EPS0):
            raise ZeroDivisionError("negative powers evaluated at q = 0")
        w = (1.0 / z)[..., None]
        neg_coeffs = f.window(f.n_min, -1)
        neg = np.zeros_like(acc)
        for a in neg_coeffs:
            neg = (neg + a) * w
        acc = acc + neg
    return acc.real, acc.imag


def _split_points(q):
    """Quaternion points (..., 4) -> complex slice coordinates and unit vectors."""
    q = np.asarray(q, dtype=float)
    v = q[..., 1:]
    y = np.sqrt(np.sum(v * v, axis=-1))
    units = np.zeros_like(v)
    units[..., 0] = 1.0
    off = y >= EPS0
    units[off] = v[off] / y[off, None]
    y = np.where(off, y, 0.0)
    return q[..., 0] + 1j * y, units


def evaluate_points(f: SliceLaurentSeries, q) -> np.ndarray:
    """Values of ``f`` at quaternion points given as an array (..., 4)."""
    z, units = _split_points(q)
    u, v = stem(f, z)
    return u + imag_times(units, v)


def evaluate(f: SliceLaurentSeries, q) -> Quaternion:
    return Quaternion.from_array(evaluate_points(f, _as_qarray(q))[0])


def evaluate_boundary(f: SliceLaurentSeries, t, units) -> np.ndarray:
    """Values at ``e^{t I}`` for broadcastable angles ``t`` and units (..., 3)."""
    t = np.asarray(t, dtype=float)
    u, v = stem(f, np.exp(1j * t))
    return u + imag_times(units, v)


# -- algebra ---------------------------------------------------------------------

def _qconvolve(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Convolution ``c_n = sum_k a_k b_{n-k}`` with Hamilton products."""
    cv = np.convolve
    aw, ax, ay, az = a.T
    bw, bx, by, bz = b.T
    return np.stack(
        [
            cv(aw, bw) - cv(ax, bx) - cv(ay, by) - cv(az, bz),
            cv(aw, bx) + cv(ax, bw) + cv(ay, bz) - cv(az, by),
            cv(aw, by) - cv(ax, bz) + cv(ay, bw) + cv(az, bx),
            cv(aw, bz) + cv(ax, by) - cv(ay, bx) + cv(az, bw),
        ],
        axis=-1,
    )


def star(f: SliceLaurentSeries, g: SliceLaurentSeries,
         max_degree: int | None = None) -> SliceLaurentSeries:
    """Slice product: ``(f*g)_n = sum_k a_k b_{n-k}``."""
    lo, hi = f.n_min + g.n_min, f.n_max + g.n_max
    _check_support(lo, hi, max_degree)
    return SliceLaurentSeries(lo, _qconvolve(f.coeffs, g.coeffs))


def conjugate(f: SliceLaurentSeries) -> SliceLaurentSeries:
    return SliceLaurentSeries(f.n_min, qconj(f.coeffs))


def tilde(f: SliceLaurentSeries, max_degree: int | None = None) -> SliceLaurentSeries:
    """``q -> f(conj q)``; on the boundary this reverses the coefficient index."""
    _check_support(-f.n_max, -f.n_min, max_degree)
    return SliceLaurentSeries(-f.n_max, f.coeffs[::-1])


def symmetrize(f: SliceLaurentSeries, max_degree: int | None = None,
               tol: float = SERIES_TOL) -> SliceLaurentSeries:
    """``f^c * f``, checked against ``f * f^c``."""
    fc = conjugate(f)
    left = star(fc, f, max_degree)
    right = star(f, fc, max_degree)
    scale = max(1.0, f.l2_norm() ** 2)
    if coeff_distance(left, right) > tol * scale:
        raise ArithmeticError("f^c*f and f*f^c disagree; symmetrization is ill-conditioned")
    return left


def t_map(f: SliceLaurentSeries, q) -> Quaternion:
    """``f(q)^{-1} q f(q)``: the sphere-preserving map in the product formula."""
    q = _as_qarray(q)
    return Quaternion.from_array(t_map_points(f, q[None])[0])


def t_map_points(f: SliceLaurentSeries, q, fq=None) -> np.ndarray:
    q = np.asarray(q, dtype=float)
    if fq is None:
        fq = evaluate_points(f, q)
    if np.any(qnorm(fq) <= EPS0):
        raise ZeroValue("f vanishes at a requested point; T is undefined there")
    return qmul(qmul(qinv(fq), q), fq)


def l2_inner(f: SliceLaurentSeries, g: SliceLaurentSeries) -> Quaternion:
    """``<f, g> = sum_n conj(b_n) a_n``."""
    lo, hi = max(f.n_min, g.n_min), min(f.n_max, g.n_max)
    if lo > hi:
        return Quaternion()
    a = f.window(lo, hi)
    b = g.window(lo, hi)
    return Quaternion.from_array(qmul(qconj(b), a).sum(axis=0))


def star_inverse(f: SliceLaurentSeries, out_support: tuple[int, int],
                 max_degree: int | None = None) -> SliceLaurentSeries:
    """Truncated star-reciprocal of ``f``.

    With ``m`` the lowest index of ``f`` carrying a non-negligible coefficient,
    the reciprocal is expanded as ``q^{-m}`` times a power series in ``q``
    obtained from the triangular system ``f * r = 1``.  The result is returned
    on ``out_support = (lo, hi)``; ``lo`` may not exceed ``-m``.  ``f * r``
    agrees with ``1`` on the indices ``0 .. hi + m``.
    """
    fs = symmetrize(f, max_degree)
    if fs.nonzero_support(EPS0) is None:
        raise NotInvertible("symmetrization vanishes at series level")
    span = f.nonzero_support(EPS0)
    m = span[0]
    lo, hi = out_support
    if lo > -m:
        raise ValueError(f"out_support must start at or below {-m}")
    if hi < -m:
        raise ValueError(f"out_support must end at or above {-m}")
    _check_support(lo, hi, max_degree)
    a = f.window(m, span[1])
    a0_inv = qinv(a[0])
    n_terms = hi + m + 1
    r = np.zeros((n_terms, 4))
    r[0] = a0_inv
    for n in range(1, n_terms):
        k = min(n, len(a) - 1)
        # sum_{j=1..k} a_j r_{n-j}
        s = qmul(a[1:k + 1], r[n - 1::-1][:k]).sum(axis=0)
        r[n] = -qmul(a0_inv, s)
    return SliceLaurentSeries(-m, r).restrict(lo, hi)


def star_inverse_pointwise(f: SliceLaurentSeries, q, max_degree: int | None = None):
    """``(f^s(q))^{-1} f^c(q)`` at points (..., 4)."""
    fs = evaluate_points(symmetrize(f, max_degree), q)
    if np.any(qnorm(fs) <= EPS0):
        raise ZeroValue("f^s vanishes at a requested point")
    return qmul(qinv(fs), evaluate_points(conjugate(f), q))


def alias(f: SliceLaurentSeries, period: int) -> SliceLaurentSeries:
    """Fold ``f`` onto the index window seen by a midpoint boundary grid.

    On the angles ``(m + 1/2) 2 pi / period`` the powers satisfy
    ``q^{n + period} = -q^n``, so index ``n + p*period`` contributes with sign
    ``(-1)^p`` to index ``n``.  The window is ``[-period//2, period - period//2 - 1]``.
    """
    if period < 1:
        raise ValueError("period must be positive")
    lo = -(period // 2)
    out = np.zeros((period, 4))
    idx = np.arange(f.n_min, f.n_max + 1)
    p, r = np.divmod(idx - lo, period)
    sign = np.where(p % 2 == 0, 1.0, -1.0)
    np.add.at(out, r, sign[:, None] * f.coeffs)
    return SliceLaurentSeries(lo, out)

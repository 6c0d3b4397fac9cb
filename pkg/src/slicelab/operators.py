"""Toeplitz models of multiplier operators ``M_phi f = phi * f``.

A ``QuaternionMatrix`` acts on coefficient vectors from the left,
``(M v)_i = sum_j M_ij v_j``, so it commutes with right scalar
multiplication.  Replacing each entry by its real 4x4 left-multiplication
matrix turns it into an ordinary real matrix ("real form") on which products,
transposes (= quaternionic adjoints) and spectral norms are computed.

Every operator can be built in one of two models:

* truncated: rows and columns are index intervals of Z; identities are
  checked by composing rectangular blocks whose codomains are sized so that
  nothing is cut off;
* periodic: the ``period`` indices seen by a midpoint grid, with the twisted
  wrap-around ``q^{n + period} = -q^n`` (see ``series.alias``).  Here
  ``M_q`` is unitary and everything is square.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .quaternions import qconj, qmul
from .series import SliceLaurentSeries, alias, conjugate, star, tilde

POWER_ITERATIONS = 50


def _left_blocks(q):
    """Left-multiplication matrices for an array of quaternions, shape (..., 4, 4)."""
    w, x, y, z = q[..., 0], q[..., 1], q[..., 2], q[..., 3]
    return np.stack(
        [
            np.stack([w, -x, -y, -z], -1),
            np.stack([x, w, -z, y], -1),
            np.stack([y, z, w, -x], -1),
            np.stack([z, -y, x, w], -1),
        ],
        -2,
    )


@dataclass(frozen=True)
class QuaternionMatrix:
    rows: tuple
    cols: tuple
    entries: np.ndarray
    truncated: bool = False
    period: int | None = None

    @property
    def shape(self):
        return self.entries.shape[:2]

    def real_form(self) -> np.ndarray:
        R, C = self.shape
        return _left_blocks(self.entries).transpose(0, 2, 1, 3).reshape(4 * R, 4 * C)

    @classmethod
    def from_real_form(cls, real, rows, cols, **kw) -> QuaternionMatrix:
        R, C = rows[1] - rows[0] + 1, cols[1] - cols[0] + 1
        blocks = np.asarray(real).reshape(R, 4, C, 4)
        # first column of L(q) is q itself
        return cls(rows, cols, np.ascontiguousarray(blocks[:, :, :, 0].transpose(0, 2, 1)), **kw)

    def apply(self, f: SliceLaurentSeries) -> SliceLaurentSeries:
        span = f.nonzero_support()
        if span is not None and (span[0] < self.cols[0] or span[1] > self.cols[1]):
            raise ValueError(f"vector support {span} outside columns {self.cols}")
        v = f.window(*self.cols)
        return SliceLaurentSeries(self.rows[0], qmul(self.entries, v[None]).sum(axis=1))

    def adjoint(self) -> QuaternionMatrix:
        return adjoint(self)

    def __matmul__(self, other: QuaternionMatrix) -> QuaternionMatrix:
        if self.cols != other.rows:
            raise ValueError(f"index ranges do not chain: {self.cols} vs {other.rows}")
        real = self.real_form() @ other.real_form()
        return QuaternionMatrix.from_real_form(
            real, self.rows, other.cols,
            truncated=self.truncated or other.truncated, period=self.period)

    def __sub__(self, other: QuaternionMatrix) -> QuaternionMatrix:
        if self.rows != other.rows or self.cols != other.cols:
            raise ValueError("index ranges differ")
        return QuaternionMatrix(self.rows, self.cols, self.entries - other.entries,
                                self.truncated or other.truncated, self.period)

    def embed_rows(self, rows) -> QuaternionMatrix:
        """Zero-pad to a larger row range."""
        if rows[0] > self.rows[0] or rows[1] < self.rows[1]:
            raise ValueError("embedding must enlarge the row range")
        out = np.zeros((rows[1] - rows[0] + 1, self.shape[1], 4))
        a = self.rows[0] - rows[0]
        out[a:a + self.shape[0]] = self.entries
        return QuaternionMatrix(rows, self.cols, out, self.truncated, self.period)

    def norm(self) -> float:
        """Spectral norm (quaternionic operator norm)."""
        if self.entries.size == 0:
            return 0.0
        return float(np.linalg.norm(self.real_form(), 2))


def identity(rng_) -> QuaternionMatrix:
    n = rng_[1] - rng_[0] + 1
    e = np.zeros((n, n, 4))
    e[np.arange(n), np.arange(n), 0] = 1.0
    return QuaternionMatrix(tuple(rng_), tuple(rng_), e)


def alias_window(period: int) -> tuple:
    lo = -(period // 2)
    return lo, lo + period - 1


def multiplier_matrix(phi: SliceLaurentSeries, domain, codomain=None,
                      period: int | None = None) -> QuaternionMatrix:
    """Matrix of ``f -> phi * f`` with entries ``M_ij = a_{i-j}``.

    In the truncated model the codomain defaults to ``domain + support(phi)``
    and ``truncated`` flags a codomain too small to hold every image.  With
    ``period`` the matrix is the twisted-circulant on the alias window and
    ``domain``/``codomain`` are ignored.
    """
    if period is not None:
        win = alias_window(period)
        c = alias(phi, period).coeffs
        idx = np.arange(win[0], win[1] + 1)
        diff = idx[:, None] - idx[None, :]
        p, r = np.divmod(diff - win[0], period)
        sign = np.where(p % 2 == 0, 1.0, -1.0)
        return QuaternionMatrix(win, win, sign[..., None] * c[r], period=period)
    domain = tuple(domain)
    if codomain is None:
        codomain = (domain[0] + phi.n_min, domain[1] + phi.n_max)
    codomain = tuple(codomain)
    rows = np.arange(codomain[0], codomain[1] + 1)
    cols = np.arange(domain[0], domain[1] + 1)
    diff = rows[:, None] - cols[None, :]
    inside = (diff >= phi.n_min) & (diff <= phi.n_max)
    entries = np.zeros(diff.shape + (4,))
    entries[inside] = phi.coeffs[diff[inside] - phi.n_min]
    span = phi.nonzero_support()
    truncated = span is not None and (
        domain[0] + span[0] < codomain[0] or domain[1] + span[1] > codomain[1])
    return QuaternionMatrix(codomain, domain, entries, truncated)


def shift_matrix(domain, k: int = 1, period: int | None = None) -> QuaternionMatrix:
    """``M_{q^k}``."""
    return multiplier_matrix(SliceLaurentSeries.monomial(k), domain, period=period)


def adjoint(M: QuaternionMatrix) -> QuaternionMatrix:
    return QuaternionMatrix(M.cols, M.rows, qconj(M.entries.transpose(1, 0, 2)),
                            M.truncated, M.period)


def operator_norm_estimate(M: QuaternionMatrix, iters: int = POWER_ITERATIONS,
                           seed: int = 0) -> float:
    """Power iteration on ``M^dagger M`` from a seeded start vector."""
    A = M.real_form()
    v = np.random.default_rng(seed).standard_normal(A.shape[1])
    v /= np.linalg.norm(v)
    est = 0.0
    for _ in range(iters):
        w = A.T @ (A @ v)
        nw = np.linalg.norm(w)
        if nw == 0.0:
            return 0.0
        v = w / nw
        est = np.sqrt(nw)
    return float(est)


def isometry_residual(phi: SliceLaurentSeries, domain) -> float:
    """``max_n | ||M e_n|| - 1 |`` plus ``||M^dagger M - Id||`` on ``domain``.

    The codomain is sized so that no image is cut off.
    """
    M = multiplier_matrix(phi, domain)
    col_norms = np.sqrt(np.sum(M.entries ** 2, axis=(0, 2)))
    gram = adjoint(M) @ M
    return float(np.max(np.abs(col_norms - 1.0))) + (gram - identity(M.cols)).norm()


def projection_parts(phi: SliceLaurentSeries, domain, period: int | None = None):
    """``(||M^2 - M||, ||M^dagger - M||)``.

    Truncated model: ``M^2`` is composed from blocks with full codomains and
    compared with ``M`` on the same ranges; self-adjointness is tested on the
    compression of ``M`` to ``domain``.
    """
    if period is not None:
        P = multiplier_matrix(phi, None, period=period)
        return (P @ P - P).norm(), (adjoint(P) - P).norm()
    domain = tuple(domain)
    A = multiplier_matrix(phi, domain)
    B = multiplier_matrix(phi, A.rows)
    M = multiplier_matrix(phi, domain, codomain=B.rows)
    C = multiplier_matrix(phi, domain, codomain=domain)
    return (B @ A - M).norm(), (adjoint(C) - C).norm()


def projection_residual(phi: SliceLaurentSeries, domain, period: int | None = None) -> float:
    """``||M^2 - M|| + ||M^dagger - M||``; see ``projection_parts``."""
    return float(sum(projection_parts(phi, domain, period)))


def shift_invariance_residual(phi: SliceLaurentSeries, domain,
                              period: int | None = None) -> float:
    """``||(Id - P) M_q P|| + ||(Id - P) M_q^{-1} P||`` with ``P = M_phi``."""
    if period is not None:
        P = multiplier_matrix(phi, None, period=period)
        S = shift_matrix(None, 1, period=period)
        Id = identity(P.rows)
        return ((Id - P) @ S @ P).norm() + ((Id - P) @ adjoint(S) @ P).norm()
    total = 0.0
    P = multiplier_matrix(phi, tuple(domain))
    for k in (1, -1):
        S = shift_matrix(P.rows, k)
        P2 = multiplier_matrix(phi, S.rows)
        SP = S @ P
        PSP = P2 @ SP
        rows = (min(SP.rows[0], PSP.rows[0]), max(SP.rows[1], PSP.rows[1]))
        total += (SP.embed_rows(rows) - PSP.embed_rows(rows)).norm()
    return total


def idempotent_symbol_residual(phi: SliceLaurentSeries, period: int | None = None) -> float:
    """Coefficient norm of ``tilde(phi) * phi^c - tilde(phi)``."""
    tp = tilde(phi)
    lhs = star(tp, conjugate(phi))
    if period is not None:
        return (alias(lhs, period) - alias(tp, period)).l2_norm()
    return (lhs - tp).l2_norm()

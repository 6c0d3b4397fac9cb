"""Shift-invariant subspaces of the Hardy space and their generators.

Everything is computed on finite coefficient windows ("ambient" intervals).
The span of a family is taken with right quaternionic scalars, matching the
right-linear structure of the inner product ``<f, g> = sum conj(b_n) a_n``.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .boundary import make_grid, unimodularity_residual
from .errors import (
    AmbientMismatch,
    DoublyInvariant,
    FactorizationResidual,
    PointTooCloseToBoundary,
    ZeroFunction,
)
from .operators import projection_parts, shift_invariance_residual, idempotent_symbol_residual
from .quaternions import EPS0, Quaternion, qconj, qmul, qnorm
from .series import (
    MAX_DEGREE,
    SliceLaurentSeries,
    conjugate,
    evaluate,
    star,
    star_inverse,
    tilde,
)

DROP_TOL = 1e-10
# Rank cut for shift families, relative to each candidate's norm.  Families of
# shifts of several generators are exactly rank deficient and their rounding
# floor sits near 1e-10, so the absolute default would admit noise directions.
RANK_TOL = 1e-8
WANDER_TOL = 1e-8
PHASE_TOL = 1e-8
CYCLIC_BELOW = 1e-6
NONCYCLIC_ABOVE = 0.1
BLASCHKE_MAX_MODULUS = 0.7
MIN_DEPTH = 64


@dataclass(frozen=True)
class SubspaceBasis:
    ambient: tuple
    matrix: np.ndarray  # (k, n, 4), rows are orthonormal vectors on ambient

    def __len__(self) -> int:
        return self.matrix.shape[0]

    @property
    def vectors(self) -> list:
        return [SliceLaurentSeries(self.ambient[0], row) for row in self.matrix]

    def gram(self) -> np.ndarray:
        """Quaternion Gram matrix ``G_ij = <u_j, u_i>``, shape (k, k, 4)."""
        U = self.matrix
        return qmul(qconj(U)[:, None], U[None, :]).sum(axis=2)

    def coefficients(self, v: np.ndarray) -> np.ndarray:
        """``<v, u_i>`` for a window vector ``v``, shape (k, 4)."""
        return qmul(qconj(self.matrix), v[None]).sum(axis=1)

    def combine(self, c: np.ndarray) -> np.ndarray:
        """``sum_i u_i c_i``."""
        return qmul(self.matrix, c[:, None]).sum(axis=0)


def _ambient_of(vectors) -> tuple:
    lo = min(v.n_min for v in vectors)
    hi = max(v.n_max for v in vectors)
    return lo, hi


def orthonormalize(vectors, ambient=None, drop_tol: float = DROP_TOL,
                   relative: bool = False) -> SubspaceBasis:
    """Right-linear Gram-Schmidt with one reorthogonalization pass.

    Each candidate is reduced as ``v <- v - sum u_i <v, u_i>`` twice against
    the accepted vectors.  Candidates whose remainder falls below
    ``drop_tol`` (times the candidate's own norm when ``relative``) are
    discarded, so the length of the result is the numerical rank of the family.
    """
    vectors = list(vectors)
    if ambient is None:
        if not vectors:
            raise ValueError("empty family needs an explicit ambient interval")
        ambient = _ambient_of(vectors)
    ambient = (int(ambient[0]), int(ambient[1]))
    n = ambient[1] - ambient[0] + 1
    accepted = np.zeros((0, n, 4))
    for f in vectors:
        span = f.nonzero_support()
        if span is not None and (span[0] < ambient[0] or span[1] > ambient[1]):
            raise AmbientMismatch(f"vector support {span} leaves ambient {ambient}")
        v = f.window(*ambient).copy()
        cut = drop_tol * float(np.sqrt(np.sum(v * v))) if relative else drop_tol
        for _ in range(2):
            if len(accepted):
                c = qmul(qconj(accepted), v[None]).sum(axis=1)
                v = v - qmul(accepted, c[:, None]).sum(axis=0)
        nv = float(np.sqrt(np.sum(v * v)))
        if nv < cut or nv == 0.0:
            continue
        accepted = np.concatenate([accepted, (v / nv)[None]], axis=0)
    return SubspaceBasis(ambient, accepted)


def _shifts(g: SliceLaurentSeries, k0: int, k1: int):
    return [g.shift(k, None) for k in range(k0, k1 + 1)]


def krylov_span(g: SliceLaurentSeries, depth: int) -> SubspaceBasis:
    """Orthonormal basis of ``span{q^n * g : 0 <= n <= depth}``."""
    if not g.is_hardy():
        raise ValueError("generator is not in H^2 (negative-index coefficients)")
    return orthonormalize(_shifts(g, 0, depth), ambient=(0, max(g.n_max, 0) + depth),
                          drop_tol=RANK_TOL, relative=True)


def project(f: SliceLaurentSeries, B: SubspaceBasis) -> SliceLaurentSeries:
    span = f.nonzero_support()
    if span is not None and (span[0] < B.ambient[0] or span[1] > B.ambient[1]):
        raise AmbientMismatch(f"support {span} not inside ambient {B.ambient}")
    if len(B) == 0:
        return SliceLaurentSeries(B.ambient[0], np.zeros((B.ambient[1] - B.ambient[0] + 1, 4)))
    v = f.window(*B.ambient)
    return SliceLaurentSeries(B.ambient[0], B.combine(B.coefficients(v)))


def cyclicity_residual(g: SliceLaurentSeries, depth: int) -> float:
    """``||1 - P 1||`` with ``P`` the projection onto ``krylov_span(g, depth)``."""
    if g.l2_norm() <= EPS0:
        raise ZeroFunction("cyclicity of the zero function is undefined")
    one = SliceLaurentSeries.constant(1.0)
    return (one - project(one, krylov_span(g, depth))).l2_norm()


def cyclicity_verdict(residual: float) -> str:
    if residual < CYCLIC_BELOW:
        return "cyclic"
    if residual > NONCYCLIC_ABOVE:
        return "non-cyclic"
    return "inconclusive"


def phase_normalize(phi: SliceLaurentSeries, tol: float = PHASE_TOL) -> SliceLaurentSeries:
    """Right-multiply by the unit making the lowest significant coefficient positive."""
    span = phi.nonzero_support(tol)
    if span is None:
        return phi
    a = phi.coeff_array(span[0])
    return SliceLaurentSeries(phi.n_min, qmul(phi.coeffs, qconj(a) / qnorm(a)))


def wandering_vector(generators, depth: int) -> SliceLaurentSeries:
    """Unit vector spanning ``K minus qK`` for ``K`` the shift span of the generators."""
    generators = list(generators)
    if not generators:
        raise ValueError("need at least one generator")
    if any(not g.is_hardy() for g in generators):
        raise ValueError("generators must lie in H^2")
    hi = max(max(g.n_max, 0) for g in generators) + depth + 1
    ambient = (0, hi)
    qK = orthonormalize(
        [s for g in generators for s in _shifts(g, 1, depth + 1)], ambient=ambient,
        drop_tol=RANK_TOL, relative=True)
    for v in generators:
        w = v - project(v, qK)
        nw = w.l2_norm()
        if nw > WANDER_TOL:
            return phase_normalize(SliceLaurentSeries(w.n_min, w.coeffs / nw)).restrict(*ambient)
    raise DoublyInvariant("no wandering direction: every generator lies in qK at this depth")


def blaschke_factor(a, n_terms: int = 128) -> SliceLaurentSeries:
    """Truncated Blaschke factor with its zero at ``a``.

    Built as ``(1 - q conj(a))^{-*} * (a - q)`` times the unit
    ``conj(a)/|a|`` (so the constant coefficient is ``|a|``); ``q`` when
    ``a = 0``.  The result checks its own zero and unimodularity before it is
    returned.
    """
    a = np.asarray(a.as_array() if isinstance(a, Quaternion) else a, dtype=float)
    r = float(qnorm(a))
    if r >= BLASCHKE_MAX_MODULUS:
        raise PointTooCloseToBoundary(f"|a| = {r:.3g} must stay below {BLASCHKE_MAX_MODULUS}")
    if r <= EPS0:
        return SliceLaurentSeries.monomial(1)
    one = np.array([1.0, 0.0, 0.0, 0.0])
    denom = SliceLaurentSeries(0, [one, -qconj(a)])
    numer = SliceLaurentSeries(0, [a, -one])
    B = star(star_inverse(denom, (0, n_terms - 1)), numer).restrict(0, n_terms - 1)
    B = SliceLaurentSeries(0, qmul(B.coeffs, qconj(a) / r))
    tail = max(1e-12, 10.0 * r ** (n_terms - 1))
    zero_err = evaluate(B, a).norm()
    unim = (star(tilde(B), conjugate(B), None) - SliceLaurentSeries.constant(1.0)).l2_norm()
    if zero_err > tail or unim > tail:
        raise ArithmeticError(
            f"Blaschke fixture failed self-check (zero {zero_err:.2e}, unimodular {unim:.2e})")
    return B


def blaschke_product(zeros, n_terms: int = 128) -> SliceLaurentSeries:
    out = SliceLaurentSeries.constant(1.0)
    for a in zeros:
        out = star(out, blaschke_factor(a, n_terms), None).restrict(0, n_terms - 1)
    return out


@dataclass
class FactorizationReport:
    phi: SliceLaurentSeries
    g: SliceLaurentSeries
    residuals: dict
    depth: int
    max_degree: int
    thresholds: dict = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return all(self.residuals[k] < self.thresholds[k] for k in self.thresholds)

    def to_dict(self) -> dict:
        return {
            "phi": self.phi.to_dict(),
            "g": self.g.to_dict(),
            "residuals": {k: float(v) for k, v in self.residuals.items()},
            "depth": int(self.depth),
            "max_degree": int(self.max_degree),
        }


def default_depth(f: SliceLaurentSeries, max_degree: int = MAX_DEGREE) -> int:
    """Four times the support width, at least ``MIN_DEPTH``, capped so the
    Krylov ambient stays within ``max_degree``."""
    width = f.n_max - f.n_min + 1
    return max(1, min(max(4 * width, MIN_DEPTH), max_degree - max(f.n_max, 0) - 1))


def inner_outer_factorize(f: SliceLaurentSeries, depth: int | None = None,
                          max_degree: int = MAX_DEGREE, tol: float = 1e-8,
                          grid=None) -> FactorizationReport:
    """Split ``f = phi * g`` with ``phi`` inner and ``g`` cyclic.

    ``phi`` is the wandering vector of the shift span of ``f``; ``g`` is the
    non-negative part of ``tilde(phi^c) * f``.  Raises
    ``FactorizationResidual`` (carrying the report) if a post-check fails.
    """
    if not f.is_hardy():
        raise ValueError("input is not in H^2 (negative-index coefficients)")
    if f.l2_norm() <= EPS0:
        raise ZeroFunction("cannot factorize the zero function")
    if depth is None:
        depth = default_depth(f, max_degree)
    phi = wandering_vector([f], depth).trim(EPS0)
    g = star(tilde(conjugate(phi)), f, None).restrict(0, max(f.n_max, 0)).trim(EPS0)
    grid = grid if grid is not None else make_grid(128, 256)
    residuals = {
        "reconstruction": (f - star(phi, g, None)).l2_norm(),
        "unimodularity": unimodularity_residual(phi, grid),
        "cyclicity": cyclicity_residual(g, depth),
    }
    thresholds = {"reconstruction": tol, "unimodularity": 1e-6, "cyclicity": CYCLIC_BELOW}
    report = FactorizationReport(phi, g, residuals, depth, max_degree, thresholds)
    if not report.passed:
        bad = ", ".join(f"{k}={residuals[k]:.2e}" for k in thresholds
                        if residuals[k] >= thresholds[k])
        raise FactorizationResidual(f"factorization post-checks failed: {bad}", report)
    return report


@dataclass(frozen=True)
class DoublyInvariantReport:
    idempotence: float
    self_adjointness: float
    symbol: float
    shift_invariance: float

    @property
    def projection(self) -> float:
        return self.idempotence + self.self_adjointness

    def passed(self, tol: float = 1e-9) -> bool:
        return max(self.projection, self.symbol, self.shift_invariance) < tol

    def to_dict(self) -> dict:
        return {
            "idempotence": self.idempotence,
            "self_adjointness": self.self_adjointness,
            "projection": self.projection,
            "symbol": self.symbol,
            "shift_invariance": self.shift_invariance,
        }


def doubly_invariant_projector(phi: SliceLaurentSeries, support=None,
                               period: int | None = None) -> DoublyInvariantReport:
    """Residuals certifying that ``M_phi`` projects onto a doubly invariant subspace.

    Pass ``period`` for idempotents represented on a boundary grid (see
    ``operators``); otherwise ``support`` is the truncated domain.
    """
    if period is None and support is None:
        support = phi.support
    idem, sa = projection_parts(phi, support, period)
    return DoublyInvariantReport(
        idempotence=float(idem),
        self_adjointness=float(sa),
        symbol=float(idempotent_symbol_residual(phi, period)),
        shift_invariance=float(shift_invariance_residual(phi, support, period)),
    )

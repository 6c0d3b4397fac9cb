"""Sampling the unit sphere boundary against the slice measure.

Boundary points are written ``e^{tI}`` with ``t`` in ``(0, pi)`` and ``I``
ranging over the whole sphere of imaginary units, so each non-real point is
hit exactly once.  A grid is the product of a midpoint rule in ``t`` and a
Fibonacci lattice on the sphere; node weights multiply to a probability
measure.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass

import numpy as np

from .errors import DegenerateUnits
from .quaternions import (
    EPS0,
    Quaternion,
    UnitImaginary,
    imag_times,
    inverse,
    qconj,
    qmul,
    qnorm,
)
from .series import (
    SliceLaurentSeries,
    conjugate,
    evaluate_boundary,
    stem,
    star,
    tilde,
)

GOLDEN_ANGLE = math.pi * (3.0 - math.sqrt(5.0))


def fibonacci_sphere(n: int) -> np.ndarray:
    """``n`` unit vectors on a Fibonacci spiral running from pole to pole.

    The first and last nodes are exactly ``+k`` and ``-k``.
    """
    if n < 2:
        raise ValueError("need at least two sphere nodes")
    k = np.arange(n)
    z = 1.0 - 2.0 * k / (n - 1)
    r = np.sqrt(np.clip(1.0 - z * z, 0.0, None))
    phi = k * GOLDEN_ANGLE
    return np.stack([r * np.cos(phi), r * np.sin(phi), z], axis=1)


@dataclass(frozen=True)
class BoundaryGrid:
    t_nodes: np.ndarray
    t_weights: np.ndarray
    sphere_nodes: np.ndarray
    sphere_weights: np.ndarray
    includes_reals: bool = False

    @property
    def n_t(self) -> int:
        return len(self.t_nodes)

    @property
    def n_sphere(self) -> int:
        return len(self.sphere_nodes)

    @property
    def size(self) -> int:
        return self.n_t * self.n_sphere

    @property
    def weights(self) -> np.ndarray:
        """Node weights, shape (n_t, n_sphere)."""
        return np.outer(self.t_weights, self.sphere_weights)

    @property
    def alias_period(self) -> int:
        """Index period under which series are indistinguishable on the nodes."""
        return 2 * self.n_t

    def points(self) -> np.ndarray:
        """Quaternion nodes, shape (n_t, n_sphere, 4), t-major."""
        c = np.cos(self.t_nodes)[:, None]
        s = np.sin(self.t_nodes)[:, None, None]
        out = np.empty((self.n_t, self.n_sphere, 4))
        out[..., 0] = c
        out[..., 1:] = s * self.sphere_nodes[None]
        return out


def make_grid(n_t: int, n_sphere: int) -> BoundaryGrid:
    if n_t < 2 or n_sphere < 2:
        raise ValueError("grid needs n_t >= 2 and n_sphere >= 2")
    t = (np.arange(n_t) + 0.5) * math.pi / n_t
    return BoundaryGrid(
        t_nodes=t,
        t_weights=np.full(n_t, 1.0 / n_t),
        sphere_nodes=fibonacci_sphere(n_sphere),
        sphere_weights=np.full(n_sphere, 1.0 / n_sphere),
    )


def evaluate_on_grid(f: SliceLaurentSeries, grid: BoundaryGrid) -> np.ndarray:
    """Values of ``f`` at every node, shape (n_t, n_sphere, 4)."""
    u, v = stem(f, np.exp(1j * grid.t_nodes))
    return u[:, None, :] + imag_times(grid.sphere_nodes[None, :, :], v[:, None, :])


def evaluate_on_mirror_grid(f: SliceLaurentSeries, grid: BoundaryGrid) -> np.ndarray:
    """Values at the conjugate nodes ``e^{-tI}``."""
    u, v = stem(f, np.exp(1j * grid.t_nodes))
    return u[:, None, :] - imag_times(grid.sphere_nodes[None, :, :], v[:, None, :])


def integrate(values, grid: BoundaryGrid) -> float:
    return float(np.sum(np.asarray(values) * grid.weights))


def representation(val_J: Quaternion, val_K: Quaternion, J: UnitImaginary,
                   K: UnitImaginary, I: UnitImaginary) -> Quaternion:
    """Value at ``x + yI`` of a slice function known at ``x + yJ`` and ``x + yK``."""
    diff = J.as_quaternion() - K.as_quaternion()
    if diff.norm() <= EPS0:
        raise DegenerateUnits("representation needs J != K")
    d = inverse(diff)
    Iq = I.as_quaternion()
    return (d * J + Iq * d) * val_J - (d * K + Iq * d) * val_K


def representation_symmetric(val_J: Quaternion, val_minus_J: Quaternion,
                             J: UnitImaginary, I: UnitImaginary) -> Quaternion:
    """The ``K = -J`` case: ``(1 - IJ)/2 f(x+yJ) + (1 + IJ)/2 f(x-yJ)``."""
    ij = I * J
    return ((1 - ij) / 2) * val_J + ((1 + ij) / 2) * val_minus_J


def slice_inner(f: SliceLaurentSeries, g: SliceLaurentSeries, I: UnitImaginary,
                n_theta: int) -> Quaternion:
    """Inner product as the mean of ``conj(g) f`` over the circle in the slice of ``I``."""
    reach = max(abs(f.n_min), abs(f.n_max), abs(g.n_min), abs(g.n_max))
    if n_theta <= 2 * reach:
        raise ValueError(f"n_theta={n_theta} under-resolves support reach {reach}")
    theta = 2.0 * math.pi * np.arange(n_theta) / n_theta
    fv = evaluate_boundary(f, theta, I.vector)
    gv = evaluate_boundary(g, theta, I.vector)
    return Quaternion.from_array(qmul(qconj(gv), fv).mean(axis=0))


def ess_sup_estimate(f: SliceLaurentSeries, grid: BoundaryGrid) -> float:
    """Largest modulus over the nodes: a lower bound for the essential sup."""
    return float(np.max(qnorm(evaluate_on_grid(f, grid))))


def unimodularity_residual(phi: SliceLaurentSeries, grid: BoundaryGrid,
                           max_degree: int | None = None) -> float:
    """Distance of ``phi`` from being unimodular, checked two ways.

    The larger of the nodal deviation ``max | |phi| - 1 |`` and the
    coefficient norm of ``tilde(phi) * phi^c - 1``.
    """
    nodal = float(np.max(np.abs(qnorm(evaluate_on_grid(phi, grid)) - 1.0)))
    prod = star(tilde(phi, max_degree), conjugate(phi), max_degree)
    coeff = (prod - SliceLaurentSeries.constant(1.0)).l2_norm()
    return max(nodal, coeff)


def modulophi_residual(phi: SliceLaurentSeries, grid: BoundaryGrid,
                       max_degree: int | None = None) -> float:
    """Nodal gap in ``|phi(e^{-tI})|^2 = Re(tilde(phi) * phi^c)(e^{tI})``."""
    lhs = qnorm(evaluate_on_mirror_grid(phi, grid)) ** 2
    prod = star(tilde(phi, max_degree), conjugate(phi), max_degree)
    rhs = evaluate_on_grid(prod, grid)[..., 0]
    return float(np.max(np.abs(lhs - rhs)))


def zero_set_fraction(f: SliceLaurentSeries, grid: BoundaryGrid, tol: float = 1e-6) -> float:
    """Measure (under the grid weights) of the nodes where ``|f| < tol``."""
    return integrate(qnorm(evaluate_on_grid(f, grid)) < tol, grid)


def sphere_spread(f: SliceLaurentSeries, grid: BoundaryGrid) -> float:
    """Largest variation of ``|f|`` across a single sphere ``e^{tS}``."""
    mod = qnorm(evaluate_on_grid(f, grid))
    return float(np.max(mod.max(axis=1) - mod.min(axis=1)))


TRACE_COLUMNS = ["t", "Ix", "Iy", "Iz", "fw", "fx", "fy", "fz", "abs"]


def trace_rows(f: SliceLaurentSeries, grid: BoundaryGrid):
    vals = evaluate_on_grid(f, grid)
    mods = qnorm(vals)
    for a, t in enumerate(grid.t_nodes):
        for b, unit in enumerate(grid.sphere_nodes):
            yield [float(t), *map(float, unit), *map(float, vals[a, b]), float(mods[a, b])]


def write_trace_csv(f: SliceLaurentSeries, grid: BoundaryGrid, fh) -> int:
    """Write one row per node (t-major) to an open text file; returns the row count."""
    writer = csv.writer(fh, lineterminator="\n")
    writer.writerow(TRACE_COLUMNS)
    n = 0
    for row in trace_rows(f, grid):
        writer.writerow([repr(v) for v in row])
        n += 1
    return n

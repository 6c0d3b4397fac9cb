"""Seeded property suites shared by the ``verify`` command and the test-suite.

Each check function returns a list of ``Check`` rows.  ``quick=True`` shrinks
sample counts so the command line stays responsive; the full counts are the
ones the acceptance tests run.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .boundary import (
    evaluate_on_grid,
    make_grid,
    modulophi_residual,
    representation,
    representation_symmetric,
)
from .idempotents import (
    build_idempotent,
    characteristic_spec,
    check_pair_structure,
    classify_sphere,
    ell_spec,
    rotating_spec,
    verify_idempotent,
)
from .operators import adjoint, isometry_residual, multiplier_matrix
from .quaternions import (
    UK,
    Quaternion,
    UnitImaginary,
    qmul,
    qnorm,
    random_unit_imaginary,
    random_units,
)
from .series import (
    SliceLaurentSeries,
    coeff_distance,
    conjugate,
    evaluate_points,
    l2_inner,
    random_series,
    star,
    star_inverse,
    symmetrize,
    t_map_points,
    tilde,
)
from .subspaces import (
    blaschke_factor,
    blaschke_product,
    cyclicity_residual,
    doubly_invariant_projector,
    inner_outer_factorize,
    phase_normalize,
    wandering_vector,
)


@dataclass(frozen=True)
class Check:
    name: str
    value: float
    threshold: float
    below: bool = True

    @property
    def passed(self) -> bool:
        if not np.isfinite(self.value):
            return False
        return self.value < self.threshold if self.below else self.value > self.threshold

    def line(self) -> str:
        rel = "<" if self.below else ">"
        status = "PASS" if self.passed else "FAIL"
        return f"{status}  {self.name:<44} {self.value:.3e} {rel} {self.threshold:.1e}"


def _random_support(rng, reach):
    lo, hi = sorted(int(v) for v in rng.integers(-reach, reach + 1, size=2))
    return lo, hi


def _unit(rng) -> np.ndarray:
    v = rng.standard_normal(4)
    return v / np.linalg.norm(v)


# -- fixtures ------------------------------------------------------------------

def unimodular_fixtures(rng, count: int = 20, n_terms: int = 128):
    """Half monomials times units, half truncated Blaschke factors with ``|a| <= 0.5``."""
    out = []
    for k in range(count):
        if k % 2 == 0:
            out.append(SliceLaurentSeries.monomial(int(rng.integers(-5, 6)), _unit(rng)))
        else:
            r = rng.uniform(0.1, 0.5)
            a = np.concatenate([[rng.uniform(-0.5, 0.5)], random_unit_imaginary(rng).vector])
            a = a * (r / np.linalg.norm(a))
            out.append(blaschke_factor(a, n_terms))
    return out


def non_unimodular_fixtures(rng, count: int = 20):
    out = [SliceLaurentSeries(0, [[0.5, 0, 0, 0], [0.5, 0, 0, 0]])]
    while len(out) < count:
        lo, hi = _random_support(rng, 4)
        f = random_series(rng, lo, max(hi, lo + 1))
        out.append(f / f.l2_norm())
    return out


def cyclic_fixtures(rng, count: int = 10, degree: int = 4):
    """Polynomials whose constant term dominates the rest in l1, so the
    reciprocal is a convergent power series."""
    out = []
    for _ in range(count):
        a0 = _unit(rng) * rng.uniform(1.0, 2.0)
        tail = rng.standard_normal((degree, 4))
        tail *= rng.uniform(0.1, 0.6) * np.linalg.norm(a0) / qnorm(tail).sum()
        out.append(SliceLaurentSeries(0, np.vstack([a0, tail])))
    return out


def inner_fixtures(rng, count: int, n_terms: int = 128):
    """Monomials times units, one- and two-factor Blaschke products, in turn."""
    out = []
    for k in range(count):
        kind = k % 3
        if kind == 0:
            out.append(SliceLaurentSeries.monomial(int(rng.integers(1, 4)), _unit(rng)))
        elif kind == 1:
            out.append(blaschke_factor(_ball_point(rng, 0.2, 0.5), n_terms))
        else:
            out.append(blaschke_product(
                [_ball_point(rng, 0.2, 0.5), _ball_point(rng, 0.2, 0.5)], n_terms))
    return out


def _ball_point(rng, rmin, rmax):
    v = rng.standard_normal(4)
    return v * (rng.uniform(rmin, rmax) / np.linalg.norm(v))


IDEMPOTENT_EXAMPLES = {
    "characteristic": lambda: characteristic_spec(math.pi / 4, 3 * math.pi / 4),
    "ell": lambda: ell_spec(UK),
    "cos-sin": rotating_spec,
}


# -- checks --------------------------------------------------------------------

def check_algebra(seed: int = 0, n_triples: int = 1000, reach: int = 16):
    rng = np.random.default_rng(seed)
    worst = dict(assoc=0.0, anti=0.0, norm=0.0, tt=0.0, tilde_hom=0.0)
    for _ in range(n_triples):
        f, g, h = (random_series(rng, *_random_support(rng, reach)) for _ in range(3))
        worst["assoc"] = max(worst["assoc"], coeff_distance(star(star(f, g), h), star(f, star(g, h))))
        worst["anti"] = max(worst["anti"], coeff_distance(
            conjugate(star(f, g)), star(conjugate(g), conjugate(f))))
        worst["norm"] = max(worst["norm"], abs(f.l2_norm() - conjugate(f).l2_norm()))
        worst["tt"] = max(worst["tt"], coeff_distance(tilde(tilde(f)), f))
        worst["tilde_hom"] = max(worst["tilde_hom"], coeff_distance(
            tilde(star(f, g)), star(tilde(f), tilde(g))))
    return [
        Check("star associativity", worst["assoc"], 1e-11),
        Check("(f*g)^c = g^c*f^c", worst["anti"], 1e-11),
        Check("||f|| = ||f^c||", worst["norm"], 1e-11),
        Check("tilde(tilde(f)) = f", worst["tt"], 1e-11),
        Check("tilde(f*g) = tilde(f)*tilde(g)", worst["tilde_hom"], 1e-11),
    ]


def check_pointwise(seed: int = 0, n_pairs: int = 200, n_nodes: int = 10_000, reach: int = 8):
    """``f*g(q) = f(q) g(T(q))`` at random boundary points with ``|f(q)| > 1e-6``."""
    rng = np.random.default_rng(seed)
    worst = 0.0
    for _ in range(n_pairs):
        f = random_series(rng, *_random_support(rng, reach))
        g = random_series(rng, *_random_support(rng, reach))
        t = rng.uniform(0.0, math.pi, n_nodes)
        units = random_units(rng, n_nodes)
        q = np.concatenate([np.cos(t)[:, None], np.sin(t)[:, None] * units], axis=1)
        fq = evaluate_points(f, q)
        keep = qnorm(fq) > 1e-6
        lhs = evaluate_points(star(f, g), q[keep])
        rhs = qmul(fq[keep], evaluate_points(g, t_map_points(f, q[keep], fq[keep])))
        err = float(np.max(qnorm(lhs - rhs))) / (1.0 + g.l1_norm())
        worst = max(worst, err)
    return [Check("f*g(q) = f(q) g(T(q)) / (1+||g||_1)", worst, 1e-9)]


def check_representation(seed: int = 0, n_series: int = 50, n_spheres: int = 40, reach: int = 8):
    rng = np.random.default_rng(seed)
    worst = worst_sym = 0.0
    for _ in range(n_series):
        f = random_series(rng, *_random_support(rng, reach))
        for _ in range(n_spheres):
            t = rng.uniform(0.0, math.pi)
            J, K, I = (random_unit_imaginary(rng) for _ in range(3))

            def at(U: UnitImaginary) -> Quaternion:
                p = np.concatenate([[math.cos(t)], math.sin(t) * U.vector])
                return Quaternion.from_array(evaluate_points(f, p[None])[0])

            direct = at(I)
            worst = max(worst, (representation(at(J), at(K), J, K, I) - direct).norm())
            worst_sym = max(worst_sym, (representation_symmetric(at(J), at(-J), J, I) - direct).norm())
    return [
        Check("representation formula (J, K)", worst, 1e-11),
        Check("representation formula (J, -J)", worst_sym, 1e-11),
    ]


def check_modulo(seed: int = 0, count: int = 20, grid_t: int = 128, grid_s: int = 256):
    """Unimodularity iff ``tilde(phi) * phi^c = 1``, plus the nodal identity."""
    rng = np.random.default_rng(seed)
    grid = make_grid(grid_t, grid_s)
    one = SliceLaurentSeries.constant(1.0)

    def coeff_res(phi):
        return (star(tilde(phi), conjugate(phi), None) - one).l2_norm()

    uni = unimodular_fixtures(rng, count)
    non = non_unimodular_fixtures(rng, count)
    return [
        Check("unimodular: ||tilde(phi)*phi^c - 1||", max(coeff_res(p) for p in uni), 1e-9),
        Check("non-unimodular: ||tilde(phi)*phi^c - 1||",
              min(coeff_res(p) for p in non), 1e-2, below=False),
        Check("|phi(e^{-tI})|^2 = Re(tilde(phi)*phi^c) nodewise",
              max(modulophi_residual(p, grid, None) for p in uni + non), 1e-9),
    ]


def check_adjoint(seed: int = 0, n_samples: int = 500, reach: int = 8):
    rng = np.random.default_rng(seed)
    worst_inner = worst_entry = 0.0
    for _ in range(n_samples):
        phi = random_series(rng, *_random_support(rng, reach))
        f = random_series(rng, *_random_support(rng, reach))
        M = multiplier_matrix(phi, f.support)
        g = random_series(rng, *_random_support(rng, reach)).restrict(*M.rows)
        Mt = multiplier_matrix(tilde(conjugate(phi)), M.rows, codomain=M.cols)
        lhs = l2_inner(M.apply(f), g)
        rhs = l2_inner(f, Mt.apply(g))
        worst_inner = max(worst_inner, (lhs - rhs).norm())
        worst_entry = max(worst_entry, float(np.max(np.abs(adjoint(M).entries - Mt.entries))))
    return [
        Check("<M f, g> = <f, M_{tilde(phi^c)} g>", worst_inner, 1e-11),
        Check("adjoint(M_phi) = M_{tilde(phi^c)} entrywise", worst_entry, 1e-12),
    ]


def check_isometry(seed: int = 0, count: int = 20, domain=(0, 40)):
    rng = np.random.default_rng(seed)
    uni = unimodular_fixtures(rng, count)
    non = non_unimodular_fixtures(rng, count)
    return [
        Check("isometry residual, unimodular", max(isometry_residual(p, domain) for p in uni), 1e-9),
        Check("isometry residual, non-unimodular",
              min(isometry_residual(p, domain) for p in non), 1e-2, below=False),
    ]


def _expected_pairs(name, t):
    if name == "ell":
        return -UK.vector, UK.vector
    if name == "cos-sin":
        u = np.array([math.cos(t), math.sin(t), 0.0])
        return u, -u
    return None


def check_idempotents(n_t: int = 128, n_sphere: int = 256, n_probe: int = 8):
    """The three standard examples: idempotence, sphere classification and the
    value opposite the zero."""
    grid = make_grid(n_t, n_sphere)
    rows = []
    probes = grid.t_nodes[np.linspace(0, n_t - 1, n_probe).astype(int)]
    for name, make in IDEMPOTENT_EXAMPLES.items():
        spec = make()
        f = build_idempotent(spec, n_t)
        rows.append(Check(f"{name}: f*f = f at grid resolution", verify_idempotent(f, grid), 1e-8))
        ang = 0.0
        tag_err = 0.0
        t22 = 0.0
        kj = a_one = 0.0
        for t in probes:
            b = classify_sphere(f, float(t))
            expect = spec.behavior_at(float(t))
            if b.tag != expect.tag:
                tag_err = 1.0
                continue
            if b.tag != "pair":
                continue
            J, K = b.J.vector, b.K.vector
            eJ, eK = _expected_pairs(name, float(t))
            ang = max(ang, math.acos(min(1.0, float(J @ eJ))), math.acos(min(1.0, float(K @ eK))))
            rep = check_pair_structure(f, float(t), period=grid.alias_period)
            t22 = max(t22, rep.residual_x, rep.residual_dot, rep.residual_equation)
            if rep.self_tilde_conjugate:
                kj = max(kj, float(np.linalg.norm(K + J)))
                a_one = max(a_one, rep.residual_a_one)
        rows.append(Check(f"{name}: sphere tags match", tag_err, 0.5))
        if name != "characteristic":
            rows.append(Check(f"{name}: (J, K) angular error", ang, 1e-6))
            rows.append(Check(f"{name}: x-1, <K,J>, aJ+Ja-2J", t22, 1e-8))
            rows.append(Check(f"{name}: K = -J and a = 1", max(kj, a_one), 1e-8))
    return rows


def check_doubly_invariant(n_t: int = 128):
    rows = []
    period = 2 * n_t
    for name, make in IDEMPOTENT_EXAMPLES.items():
        rep = doubly_invariant_projector(build_idempotent(make(), n_t), period=period)
        rows.append(Check(f"{name}: ||P^2 - P||", rep.idempotence, 1e-9))
        rows.append(Check(f"{name}: ||P^dagger - P||", rep.self_adjointness, 1e-9))
        rows.append(Check(f"{name}: two-sided shift invariance", rep.shift_invariance, 1e-9))
    q = doubly_invariant_projector(SliceLaurentSeries.monomial(1), (-16, 16))
    rows.append(Check("phi = q: projection residual", q.projection, 1.0 - 1e-12, below=False))
    return rows


def check_beurling(seed: int = 0, count: int = 20, depth: int = 96, n_terms: int = 128):
    rng = np.random.default_rng(seed)
    worst = 0.0
    for phi0 in inner_fixtures(rng, count, n_terms):
        m = int(rng.integers(1, 4))
        hs = cyclic_fixtures(rng, m, degree=3)
        gens = [star(phi0, h) for h in hs]
        phi = wandering_vector(gens, depth)
        worst = max(worst, coeff_distance(phi, phase_normalize(phi0)))
    return [Check("wandering vector recovers phi0 (coeff distance)", worst, 1e-6)]


def factorization_fixtures(rng):
    h2 = SliceLaurentSeries(0, [[1, 0, 0, 0], [0.5, 0, 0, 0]])
    h3 = SliceLaurentSeries(0, [[1, 0, 0, 0], [1 / 3, 0, 0, 0]])
    B2 = blaschke_product([[0, 0.4, 0, 0], [0, 0, 0.3, 0]])
    out = [
        (SliceLaurentSeries.monomial(1), h2),
        (SliceLaurentSeries.constant(1.0), h2),
        (B2, h3),
        (SliceLaurentSeries.monomial(2, _unit(rng)), cyclic_fixtures(rng, 1)[0]),
        (blaschke_factor([0, 0, 0, 0.5]), cyclic_fixtures(rng, 1, degree=2)[0]),
    ]
    return out


def check_factorization(seed: int = 0):
    rng = np.random.default_rng(seed)
    recon = unim = cyc = refac = 0.0
    for inner, outer in factorization_fixtures(rng):
        f = star(inner, outer, None).trim()
        rep = inner_outer_factorize(f)
        recon = max(recon, rep.residuals["reconstruction"])
        unim = max(unim, rep.residuals["unimodularity"])
        cyc = max(cyc, rep.residuals["cyclicity"])
        again = inner_outer_factorize(rep.g, depth=rep.depth)
        refac = max(refac, coeff_distance(again.phi, SliceLaurentSeries.constant(1.0)))
    return [
        Check("||f - phi*g||", recon, 1e-8),
        Check("unimodularity of phi", unim, 1e-6),
        Check("cyclicity residual of g", cyc, 1e-6),
        Check("refactorizing g gives phi' = 1", refac, 1e-6),
    ]


def check_cyclicity(seed: int = 0, count: int = 10, depth: int = 64):
    rng = np.random.default_rng(seed)
    gs = cyclic_fixtures(rng, count)
    inv_tail = 0.0
    for g in gs:
        r = star_inverse(g, (0, 4 * depth))
        inv_tail = max(inv_tail, float(np.max(qnorm(r.coeffs[-8:]))))
    non = [SliceLaurentSeries.monomial(1) + SliceLaurentSeries.monomial(2, 0.5)]
    non += [star(SliceLaurentSeries.monomial(1), h) for h in cyclic_fixtures(rng, 2)]
    non += [blaschke_factor(a) for a in ([0, 0.4, 0, 0], [0, 0, 0.3, 0], [0.2, 0, 0, 0.4])]
    return [
        Check("star-inverse of cyclic fixtures decays", inv_tail, 1e-12),
        Check("cyclicity residual, outer fixtures",
              max(cyclicity_residual(g, depth) for g in gs), 1e-6),
        Check("cyclicity residual, q*h and Blaschke",
              min(cyclicity_residual(g, depth) for g in non), 0.5, below=False),
    ]


def zero_fraction(f: SliceLaurentSeries, grid, tol: float = 1e-6) -> float:
    fs = symmetrize(f, None)
    return float(np.sum((qnorm(evaluate_on_grid(fs, grid)) < tol) * grid.weights))


def unit_fraction(phi: SliceLaurentSeries, grid, tol: float = 1e-6) -> float:
    fs = symmetrize(phi, None)
    return float(np.sum((np.abs(qnorm(evaluate_on_grid(fs, grid)) - 1.0) < tol) * grid.weights))


def check_zero_sets(seed: int = 0, coarse=(64, 128), fine=(256, 512)):
    rng = np.random.default_rng(seed)
    g0, g1 = make_grid(*coarse), make_grid(*fine)
    uni = unimodular_fixtures(rng, 6)
    hardy = [random_series(rng, 0, 6) for _ in range(4)]
    hardy.append(SliceLaurentSeries(0, [[1, 0, 0, 0], [1, 0, 0, 0]]))
    # q - e^{t* i} with t* on a coarse node: f^s vanishes on that whole sphere
    ts = float(g0.t_nodes[coarse[0] // 3])
    hardy.append(SliceLaurentSeries(0, [[-math.cos(ts), -math.sin(ts), 0, 0], [1, 0, 0, 0]]))
    increase = 0.0
    fine_frac = coarse_frac = 0.0
    for f in uni + hardy:
        a, b = zero_fraction(f, g0), zero_fraction(f, g1)
        increase = max(increase, b - a)
        fine_frac = max(fine_frac, b)
        coarse_frac = max(coarse_frac, a)
    return [
        Check("zero fraction at coarse grid (largest)", coarse_frac, 1.0),
        Check("zero fraction does not grow under refinement", increase, 1e-15),
        Check("zero fraction at fine grid", fine_frac, 0.01),
        Check("|phi^s| = 1 fraction, unimodular",
              min(unit_fraction(p, g1) for p in uni), 0.99, below=False),
    ]


def _quick(fn, **kw):
    return lambda seed, quick: fn(seed, **(kw if quick else {}))


SUITES = {
    "algebra": [
        _quick(check_algebra, n_triples=100),
        _quick(check_pointwise, n_pairs=20, n_nodes=1000),
        _quick(check_representation, n_series=10, n_spheres=10),
    ],
    "adjoint": [_quick(check_adjoint, n_samples=50)],
    "isometry": [
        _quick(check_isometry, count=6),
        _quick(check_modulo, count=6, grid_t=32, grid_s=64),
        _quick(check_zero_sets, coarse=(16, 32), fine=(64, 128)),
    ],
    "idempotent": [
        lambda seed, quick: check_idempotents(32 if quick else 128, 64 if quick else 256),
        lambda seed, quick: check_doubly_invariant(32 if quick else 128),
    ],
    "beurling": [
        _quick(check_beurling, count=3),
        _quick(check_cyclicity, count=3),
    ],
    "factorization": [lambda seed, quick: check_factorization(seed)],
}


def run_suite(name: str, seed: int = 0, quick: bool = False):
    if name not in SUITES:
        raise KeyError(name)
    rows = []
    for fn in SUITES[name]:
        rows.extend(fn(seed, quick))
    return rows

"""Acceptance suite: every top-level criterion at its stated tolerance.

Each test prints one PASS/FAIL line so the suite doubles as a human-readable
scorecard (run with pytest -s to see them).
"""

import time

import numpy as np
import pytest

from npp3.catalog import (
    einstein_branch,
    elliptic,
    flat_b0nonzero,
    flat_b0zero,
    grid_points,
    pullback_residuals,
    round_sphere,
    standard_flat,
)
from npp3.congruence import (
    empirical_optical_scalars,
    integrate_connecting,
)
from npp3.contact import ContactStructure, check_adapted, pseudohermitian, scalar_relation_residual
from npp3.frames import TriadField, commutator_residuals, optical_scalars_direct, spin_coefficients
from npp3.ricci import (
    SpinCoefficientField,
    identity_residual_values,
    project_curvature,
    ricci_from_spin_values,
)
from npp3.tensor import MetricField, OneFormField, curvature, lower_vector, metric_at

from conftest import random_perturbed_metric, random_unit_candidate


def _report(criterion: str, passed: bool, detail: str):
    print(f"{'PASS' if passed else 'FAIL'}  {criterion}: {detail}")
    assert passed, f"{criterion}: {detail}"


def _catalog():
    return [
        standard_flat(1.0),
        round_sphere(1.0),
        flat_b0zero(1.0, (0.0, 1.0)),
        flat_b0nonzero(1.0, (1.0,), (0.0, 1.0)),
        elliptic(1.0, (0.0,)),
    ]


def test_criterion_1_adaptedness_of_standard_example():
    """Standard flat structure adapted over an 11^3 grid in [-1, 1]^3."""
    ex = standard_flat(1.0)
    grid = grid_points(((-1, 1), (-1, 1), (-1, 1)), (11, 11, 11))
    bare_metric = MetricField(matrix=ex.metric.matrix)
    bare_alpha = OneFormField(components=ex.contact.alpha.components)
    fd_contact = ContactStructure(alpha=bare_alpha, lam=1.0, metric=bare_metric)

    start = time.perf_counter()
    analytic = max(check_adapted(ex.contact, p).max() for p in grid)
    fd = max(check_adapted(fd_contact, p).max() for p in grid)
    elapsed = time.perf_counter() - start

    ok = analytic < 1e-8 and fd < 1e-6 and elapsed < 5.0
    _report(
        "criterion 1 (adaptedness, standard example)",
        ok,
        f"analytic={analytic:.2e} (<1e-8), fd={fd:.2e} (<1e-6), {elapsed:.2f}s (<5s)",
    )


def test_criterion_2_reeb_congruence_properties():
    """Geodesic, divergence-free, constant-twist Reeb congruences + converse."""
    worst_geo = worst_div = worst_twist = worst_converse = 0.0
    for ex in (standard_flat(1.0), round_sphere(1.0)):
        pts = ex.grid((3, 3, 3))
        for p in pts:
            optics = optical_scalars_direct(ex.contact.reeb, ex.metric, p)
            worst_geo = max(worst_geo, optics.geodesic_residual)
            worst_div = max(worst_div, abs(optics.divergence))
            worst_twist = max(worst_twist, abs(optics.twist - ex.lam))

        base = pts[len(pts) // 2]
        lam_est = optical_scalars_direct(ex.contact.reeb, ex.metric, base).twist
        rec_form = OneFormField(
            components=lambda q, ex=ex: lower_vector(metric_at(ex.metric, q), ex.contact.reeb(q)),
            domain=ex.metric.domain,
        )
        candidates = [
            ContactStructure(alpha=rec_form, lam=lam_est, metric=ex.metric, orientation=o)
            for o in (1, -1)
        ]
        rec = min(candidates, key=lambda c: check_adapted(c, base).max())
        worst_converse = max(worst_converse, max(check_adapted(rec, p).max() for p in pts))

    ok = max(worst_geo, worst_div, worst_twist, worst_converse) < 1e-5
    _report(
        "criterion 2 (Reeb congruence properties)",
        ok,
        f"geodesic={worst_geo:.2e}, divergence={worst_div:.2e}, "
        f"twist={worst_twist:.2e}, converse={worst_converse:.2e} (<1e-5)",
    )


def test_criterion_3_branch_quantities():
    """Curvature/shear branch values and the classifier's negative-R exclusion."""
    rng = np.random.default_rng(21)

    sphere = round_sphere(1.0)
    p = sphere.sample_points(1, rng)[0]
    r_sphere = curvature(sphere.metric, p).scalar
    sigma_sphere = abs(spin_coefficients(sphere.reeb_triad(), p).sigma)

    flat = standard_flat(1.0)
    q = flat.sample_points(1, rng)[0]
    r_flat = curvature(flat.metric, q).scalar
    sigma_flat = abs(spin_coefficients(flat.reeb_triad(), q).sigma)

    worst_relation = 0.0
    for ex in _catalog():
        point = ex.sample_points(1, rng)[0]
        s = spin_coefficients(ex.reeb_triad(), point)
        scal = curvature(ex.metric, point).scalar
        worst_relation = max(worst_relation, abs(abs(s.sigma) ** 2 - (ex.lam**2 - scal / 6.0)))

    negatives_excluded = all(
        einstein_branch(lam, r).kind == "none"
        for lam in (0.5, 1.0, 3.0)
        for r in (-1e-6, -1.0, -6.0, -100.0)
    )

    ok = (
        abs(r_sphere - 6.0) < 1e-3
        and sigma_sphere < 1e-5
        and abs(r_flat) < 1e-3
        and abs(sigma_flat - 1.0) < 1e-4
        and worst_relation < 1e-4
        and negatives_excluded
    )
    _report(
        "criterion 3 (branch quantities)",
        ok,
        f"R_sphere={r_sphere:.6f} (6 +/- 1e-3), |sigma|_sphere={sigma_sphere:.2e} (<1e-5), "
        f"R_flat={r_flat:.2e} (0 +/- 1e-3), |sigma|_flat={sigma_flat:.8f} (1 +/- 1e-4), "
        f"relation={worst_relation:.2e} (<1e-4), negatives excluded={negatives_excluded}",
    )


def _oracle_test_matrix():
    """Catalog triads plus 20 random perturbed metrics, 5 points each."""
    rng = np.random.default_rng(4)
    cases = []
    for ex in _catalog():
        tri = ex.reeb_triad()
        cases.append((ex.metric, tri, ex.sample_points(5, rng)))
    for _ in range(20):
        g = random_perturbed_metric(rng)
        tri = TriadField.from_congruence(random_unit_candidate(rng), g)
        pts = [rng.uniform(-0.3, 0.3, size=3) for _ in range(5)]
        cases.append((g, tri, pts))
    return cases


@pytest.fixture(scope="module")
def oracle_matrix():
    return _oracle_test_matrix()


def test_criterion_4_oracle_equivalence(oracle_matrix):
    """Frame Ricci expressions against the projected coordinate curvature."""
    start = time.perf_counter()
    worst = 0.0
    for g, tri, pts in oracle_matrix:
        field = SpinCoefficientField(tri)
        for p in pts:
            eq = ricci_from_spin_values(field.coefficients(p), field.derivatives(p))
            proj = project_curvature(g, tri, p)
            worst = max(worst, float(np.max(np.abs(eq.as_array() - proj.as_array()))))
    elapsed = time.perf_counter() - start
    ok = worst < 1e-3 and elapsed < 60.0
    _report(
        "criterion 4 (frame Ricci vs oracle, no sign flips)",
        ok,
        f"max gap={worst:.2e} (<1e-3) over 125 configurations, {elapsed:.1f}s (<60s)",
    )


def test_criterion_5_identities_and_commutators(oracle_matrix):
    """First-order curvature identities and operator commutators."""
    worst_id = worst_comm = 0.0
    functions = [lambda x: x[0] + x[1] ** 2, lambda x: np.sin(x[0]) * x[2] + x[1]]
    for g, tri, pts in oracle_matrix:
        field = SpinCoefficientField(tri)
        for p in pts:
            i1, i2 = identity_residual_values(field.coefficients(p), field.derivatives(p))
            worst_id = max(worst_id, abs(i1), abs(i2))
        for p in pts[:2]:
            for f in functions:
                c1, c2 = commutator_residuals(f, tri, p)
                worst_comm = max(worst_comm, abs(c1), abs(c2))
    ok = worst_id < 1e-3 and worst_comm < 1e-3
    _report(
        "criterion 5 (identities and commutators)",
        ok,
        f"identities={worst_id:.2e}, commutators={worst_comm:.2e} (<1e-3)",
    )


def test_criterion_6_flat_pullbacks():
    """Flat families are contact isometric to the standard model."""
    rng = np.random.default_rng(12)
    worst = 0.0
    for f in [(0.0,), (0.0, 1.0), (1.0, 1.0)]:
        ex = flat_b0zero(1.0, f)
        res = pullback_residuals(ex, ex.sample_points(100, rng, require_isometry=True))
        worst = max(worst, res.metric, res.form)
    for d, e in [((1.0,), (0.0,)), ((1.0,), (0.0, 1.0)), ((0.0,), (1.0,))]:
        ex = flat_b0nonzero(1.0, d, e)
        res = pullback_residuals(ex, ex.sample_points(100, rng, require_isometry=True))
        worst = max(worst, res.metric, res.form)
    ok = worst < 1e-5
    _report(
        "criterion 6 (flat-family pullbacks)",
        ok,
        f"max metric/form residual={worst:.2e} (<1e-5) at 100 points x 6 parameter sets",
    )


def test_criterion_7_elliptic_pullbacks():
    """Elliptic family is contact isometric to the round sphere."""
    worst = 0.0
    points = 0
    for lam in (1.0, 2.0):
        for f in [(0.0,), (0.0, 1.0)]:
            ex = elliptic(lam, f)
            grid = [p for p in ex.grid((4, 4, 4)) if ex.isometry.admissible(p)]
            res = pullback_residuals(ex, grid)
            points += res.evaluated
            worst = max(worst, res.metric, res.form)
    ok = worst < 1e-5
    _report(
        "criterion 7 (elliptic pullbacks)",
        ok,
        f"max metric/form residual={worst:.2e} (<1e-5) on {points} interior grid points, "
        "lambda in {1,2}, f in {0,u}",
    )


def test_criterion_8_reduced_system_residuals():
    """Closed forms satisfy the reduced field equations analytically."""
    rng = np.random.default_rng(14)
    worst = 0.0
    cases = [
        flat_b0zero(1.0, (0.0,)),
        flat_b0zero(1.0, (0.0, 1.0)),
        flat_b0zero(1.0, (1.0, 1.0)),
        flat_b0nonzero(1.0, (1.0,), (0.0,)),
        flat_b0nonzero(1.0, (1.0,), (0.0, 1.0)),
        flat_b0nonzero(1.0, (0.0,), (1.0,)),
        elliptic(1.0, (0.0,)),
        elliptic(1.0, (0.0, 1.0)),
        elliptic(2.0, (0.0,)),
    ]
    for ex in cases:
        for p in ex.sample_points(10, rng):
            worst = max(worst, float(np.max(ex.reduced_residuals(p))))
    ok = worst < 1e-8
    _report(
        "criterion 8 (reduced-system residuals)",
        ok,
        f"max residual={worst:.2e} (<1e-8) incl. the conformal-factor equation and "
        "the first-order radial equation",
    )


def test_criterion_9_pseudohermitian_layer():
    """Torsion from shear, curvature cross-check, both corollary readings."""
    rng = np.random.default_rng(15)
    worst_rel = 0.0
    torsion_exact = True
    sphere_w = None
    for ex in _catalog():
        tri = ex.reeb_triad()
        field = SpinCoefficientField(tri)
        for p in ex.sample_points(2, rng):
            s = field.coefficients(p)
            data = pseudohermitian(tri, ex.lam, p, field=field)
            torsion_exact &= data.torsion == -np.conj(s.sigma)
            scal = curvature(ex.metric, p).scalar
            worst_rel = max(
                worst_rel, abs(scalar_relation_residual(scal, data.webster, s.sigma, ex.lam))
            )
            if ex.kind == "round-sphere" and sphere_w is None:
                sphere_w = (data.webster, scal)

    w_measured, r_sphere = sphere_w
    third = r_sphere / 3.0 + 1.0
    sixth = r_sphere / 6.0 + 1.0
    ok = torsion_exact and worst_rel < 1e-3 and abs(w_measured - sixth) < 1e-3
    _report(
        "criterion 9 (pseudohermitian layer)",
        ok,
        f"torsion exact={torsion_exact}, scalar-relation residual={worst_rel:.2e} (<1e-3); "
        f"sphere W={w_measured:.6f} vs readings R/(3 lam)+lam={third:.3f} and "
        f"R/(6 lam)+lam={sixth:.3f} (consistency with the scalar relation decides)",
    )


def test_criterion_10_congruence_ode():
    """Connecting equation vs closed forms; empirical bundles vs frame values."""
    worst_ode = 0.0
    from scipy.linalg import expm

    def closed_form(rho, sigma, zeta0, r):
        m = np.array(
            [
                [-rho.real - sigma.real, rho.imag - sigma.imag],
                [-rho.imag - sigma.imag, sigma.real - rho.real],
            ]
        )
        vec = expm(m * r) @ np.array([zeta0.real, zeta0.imag])
        return vec[0] + 1j * vec[1]

    for rho, sigma, zeta0 in [(1j, 0j, 1.0), (0.5 + 0j, 0j, 2.0), (0j, 0.3 + 0j, 1j), (0.2 + 0.7j, 0.1 - 0.2j, 1 + 1j)]:
        rs, zs = integrate_connecting(lambda r: rho, lambda r: sigma, zeta0, 10.0, 1e-3)
        for idx in (len(rs) // 2, len(rs) - 1):
            worst_ode = max(worst_ode, abs(zs[idx] - closed_form(rho, sigma, zeta0, rs[idx])))

    rng = np.random.default_rng(16)
    worst_bundle = 0.0
    for ex in _catalog():
        p = ex.sample_points(1, rng)[0]
        est = empirical_optical_scalars(ex.metric, ex.contact.reeb, p)
        s = spin_coefficients(ex.reeb_triad(), p)
        worst_bundle = max(
            worst_bundle,
            abs(est.divergence - (-s.rho.real)),
            abs(est.twist - abs(s.rho.imag)),
            abs(est.shear_modulus - abs(s.sigma)),
        )

    ok = worst_ode < 1e-8 and worst_bundle < 1e-3
    _report(
        "criterion 10 (congruence ODE layer)",
        ok,
        f"closed-form gap={worst_ode:.2e} (<1e-8), empirical-vs-frame={worst_bundle:.2e} (<1e-3)",
    )

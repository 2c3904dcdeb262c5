"""Triads, spin coefficients, optical scalars, directional operators."""

import numpy as np
import pytest

from npp3.catalog import round_sphere
from npp3.frames import (
    FrameDriftError,
    TriadField,
    commutator_residuals,
    congruence_coefficients,
    directional,
    gram_schmidt_frame,
    optical_scalars_direct,
    spin_coefficients,
)
from npp3.tensor import GeometryError, euclidean_metric

from conftest import random_perturbed_metric, random_unit_candidate

EUC = euclidean_metric()


def constant_triad(frame_rows):
    rows = np.asarray(frame_rows, dtype=float)
    return TriadField(metric=EUC, frame=lambda p: rows)


class TestGramSchmidt:
    def test_axis_candidate(self):
        fr = gram_schmidt_frame(lambda p: np.array([0.0, 0.0, 5.0]), EUC, [0, 0, 0])
        assert np.allclose(fr, [[0, 0, 1], [1, 0, 0], [0, 1, 0]])

    def test_degenerate_direction_skipped_and_sign_fixed(self):
        # candidate along y: the y coordinate vector projects to zero, and the
        # completion flips e2 to keep the frame right-handed
        fr = gram_schmidt_frame(lambda p: np.array([0.0, 1.0, 0.0]), EUC, [0, 0, 0])
        assert np.allclose(fr, [[0, 1, 0], [1, 0, 0], [0, 0, -1]])

    def test_round_sphere_orthonormality(self):
        ex = round_sphere(1.0)
        p = [0.9, 1.1, 0.4]
        fr = gram_schmidt_frame(ex.contact.reeb, ex.metric, p)
        gram = fr @ ex.metric(p) @ fr.T
        assert np.max(np.abs(gram - np.eye(3))) < 1e-10

    def test_zero_candidate_rejected(self):
        with pytest.raises(GeometryError):
            gram_schmidt_frame(lambda p: np.zeros(3), EUC, [0, 0, 0])

    def test_orientation_flag(self):
        plus = gram_schmidt_frame(lambda p: np.array([0.0, 0.0, 1.0]), EUC, [0, 0, 0], orientation=1)
        minus = gram_schmidt_frame(lambda p: np.array([0.0, 0.0, 1.0]), EUC, [0, 0, 0], orientation=-1)
        assert np.linalg.det(plus.T) > 0 > np.linalg.det(minus.T)


class TestSpinCoefficients:
    def test_constant_triad_all_zero(self):
        tri = constant_triad(np.eye(3))
        s = spin_coefficients(tri, [0.2, -0.1, 0.4])
        assert np.max(np.abs(s.gamma)) < 1e-12

    def test_standard_flat_values(self, examples):
        ex = examples["standard-flat"]
        s = spin_coefficients(ex.reeb_triad(), [0.3, -0.4, 0.25])
        assert abs(s.kappa) < 1e-6
        assert abs(s.rho.real) < 1e-6
        assert abs(abs(s.rho.imag) - 1.0) < 1e-6
        assert abs(abs(s.sigma) - 1.0) < 1e-6

    def test_round_sphere_values(self, examples):
        ex = examples["round-sphere"]
        s = spin_coefficients(ex.reeb_triad(), [1.2, 0.9, 0.5])
        assert abs(s.kappa) < 1e-6
        assert abs(s.rho.real) < 1e-6
        assert abs(abs(s.rho.imag) - 1.0) < 1e-6
        assert abs(s.sigma) < 1e-6

    def test_antisymmetry_residual_small(self, examples):
        ex = examples["flat-b0zero"]
        s = spin_coefficients(ex.reeb_triad(), [0.1, 0.3, -0.2])
        assert s.antisymmetry_residual < 1e-8
        table = s.gamma
        assert np.max(np.abs(table + table.transpose(1, 0, 2))) < 1e-14

    def test_named_equal_table_entries(self, examples):
        ex = examples["elliptic"]
        s = spin_coefficients(ex.reeb_triad(), [0.2, 0.5, 0.6])
        assert s.rho == s.gamma[1, 0, 2]
        assert s.sigma == s.gamma[1, 0, 1]
        assert s.tau == s.gamma[1, 2, 2]
        assert s.kappa == s.gamma[1, 0, 0]
        assert s.epsilon == s.gamma[1, 2, 0]

    def test_gauge_rotation(self, examples):
        ex = examples["standard-flat"]
        tri = ex.reeb_triad()
        p = [0.15, 0.6, -0.3]
        s0 = spin_coefficients(tri, p)
        for angle in (np.pi / 6, np.pi / 3):
            s1 = spin_coefficients(tri.rotated(angle), p)
            assert abs(s1.rho - s0.rho) < 1e-8
            assert abs(s1.sigma - np.exp(2j * angle) * s0.sigma) < 1e-8
            assert abs(abs(s1.sigma) - abs(s0.sigma)) < 1e-8

    def test_frame_drift_detected(self):
        skew = np.array([[1.0, 0.0, 0.0], [0.02, 1.0, 0.0], [0.0, 0.0, 1.0]])
        tri = constant_triad(skew)
        with pytest.raises(FrameDriftError):
            spin_coefficients(tri, [0.0, 0.0, 0.0])

    def test_congruence_coefficients_agree(self, examples, spot_points):
        for name in ("standard-flat", "round-sphere", "flat-b0zero", "elliptic"):
            ex = examples[name]
            tri = ex.reeb_triad()
            p = spot_points[name][0]
            s = spin_coefficients(tri, p)
            kappa, rho, sigma = congruence_coefficients(ex.contact.reeb, ex.metric, p, triad=tri)
            assert abs(kappa - s.kappa) < 1e-7
            assert abs(rho - s.rho) < 1e-7
            assert abs(sigma - s.sigma) < 1e-7


class TestOpticalScalars:
    def test_constant_field(self):
        out = optical_scalars_direct(lambda p: np.array([1.0, 0.0, 0.0]), EUC, [0.3, 0.3, 0.3])
        assert abs(out.divergence) < 1e-12
        assert abs(out.twist) < 1e-6
        assert abs(out.shear_modulus) < 1e-6

    def test_radial_field(self):
        def radial(p):
            return np.asarray(p) / np.linalg.norm(p)

        out = optical_scalars_direct(radial, EUC, [0.0, 0.0, 2.0])
        assert out.divergence == pytest.approx(0.5, abs=1e-8)
        assert out.twist < 1e-4
        assert out.shear_modulus < 1e-4
        assert out.geodesic_residual < 1e-8

    def test_standard_flat_reeb(self, examples):
        ex = examples["standard-flat"]
        out = optical_scalars_direct(ex.contact.reeb, ex.metric, [0.2, -0.6, 0.4])
        assert abs(out.divergence) < 1e-6
        assert out.twist == pytest.approx(1.0, abs=1e-6)
        assert out.shear_modulus == pytest.approx(1.0, abs=1e-6)

    def test_non_unit_field_rejected(self):
        with pytest.raises(GeometryError):
            optical_scalars_direct(lambda p: np.array([2.0, 0.0, 0.0]), EUC, [0, 0, 0])

    def test_twist_sign_convention_recorded(self, examples, spot_points):
        # both sign readings are measured rather than assumed: for frames
        # aligned with the structure's orientation the positive convention
        # Im(rho) = +lambda is the one that holds, on every example
        for name, ex in examples.items():
            p = spot_points[name][0]
            s = spin_coefficients(ex.reeb_triad(), p)
            res_plus = abs(s.rho.imag - ex.lam)
            res_minus = abs(s.rho.imag + ex.lam)
            assert res_plus < 1e-6, (name, res_plus)
            assert res_minus > ex.lam, (name, res_minus)

    def test_shear_phase_matches_frame_sigma(self, examples):
        ex = examples["standard-flat"]
        p = [0.2, -0.1, 0.35]
        s = spin_coefficients(ex.reeb_triad(), p)
        o = optical_scalars_direct(ex.contact.reeb, ex.metric, p)
        assert abs(np.exp(2j * o.shear_phase) - s.sigma / abs(s.sigma)) < 1e-6

    def test_direct_matches_spin(self, examples, spot_points):
        for name, ex in examples.items():
            p = spot_points[name][1]
            s = spin_coefficients(ex.reeb_triad(), p)
            o = optical_scalars_direct(ex.contact.reeb, ex.metric, p)
            assert abs(o.divergence - s.rho.real) < 1e-5
            assert abs(o.twist - abs(s.rho.imag)) < 1e-5
            assert abs(o.shear_modulus - abs(s.sigma)) < 1e-5


class TestDirectional:
    def test_constant_function(self, examples):
        tri = examples["standard-flat"].reeb_triad()
        out = directional(lambda p: 5.0, tri, [0.1, 0.1, 0.1])
        assert np.max(np.abs(out)) < 1e-10

    def test_height_function_at_origin(self):
        frame = np.array([[0.0, 1.0, 0.0], [1.0, 0.0, 0.0], [0.0, 0.0, -1.0]])
        tri = constant_triad(frame)
        df, delta_f, deltabar_f = directional(lambda p: p[2], tri, [0, 0, 0])
        assert abs(df) < 1e-10
        assert delta_f == pytest.approx(1j / np.sqrt(2), abs=1e-10)
        assert deltabar_f == pytest.approx(-1j / np.sqrt(2), abs=1e-10)

    def test_affine_parameter_duality(self, examples):
        # Z0 = d/dr on the congruence charts, so D r = 1
        ex = examples["flat-b0zero"]
        out = directional(lambda p: p[0], ex.gauge_frame, [0.2, 0.4, -0.1])
        assert out[0] == pytest.approx(1.0, abs=1e-10)

    def test_conjugation_for_real_functions(self, examples):
        ex = examples["elliptic"]
        out = directional(lambda p: p[1] ** 2 + p[2], ex.reeb_triad(), [0.1, 0.5, 0.7])
        assert abs(out[2] - np.conj(out[1])) < 1e-10


class TestCommutators:
    def test_constant_function(self, examples):
        tri = examples["standard-flat"].reeb_triad()
        c1, c2 = commutator_residuals(lambda p: 3.0, tri, [0.2, 0.2, 0.2])
        assert abs(c1) < 1e-10 and abs(c2) < 1e-10

    def test_standard_flat_polynomial(self, examples):
        tri = examples["standard-flat"].reeb_triad()
        c1, c2 = commutator_residuals(lambda p: p[0] + p[1] ** 2, tri, [0.1, 0.2, 0.3])
        assert abs(c1) < 1e-4 and abs(c2) < 1e-4

    def test_round_sphere_coordinate(self, examples):
        tri = examples["round-sphere"].reeb_triad()
        c1, c2 = commutator_residuals(lambda p: p[0], tri, [1.1, 0.9, 0.3])
        assert abs(c1) < 1e-4 and abs(c2) < 1e-4

    def test_random_polynomials_on_random_frames(self, rng):
        for _ in range(3):
            g = random_perturbed_metric(rng)
            tri = TriadField.from_congruence(random_unit_candidate(rng), g)
            coef = rng.uniform(-1, 1, size=7)

            def f(p):
                x, y, z = p
                return float(
                    coef
                    @ np.array([1, x, y * z, x * y, z**2, x * y * z, y**3])
                )

            p = rng.uniform(-0.3, 0.3, size=3)
            c1, c2 = commutator_residuals(f, tri, p)
            assert abs(c1) < 1e-3 and abs(c2) < 1e-3

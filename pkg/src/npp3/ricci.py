"""Frame components of the Ricci tensor from spin coefficients.

Implements the curvature expressions of the spin-coefficient formalism: the
five frame Ricci components and the scalar curvature as first directional
derivatives and quadratic combinations of kappa, rho, sigma, tau, epsilon,
plus the two first-order identities that follow from the symmetries of the
curvature tensor.  The direct coordinate curvature (tensor module) projected
onto the frame acts as the independent oracle for all of these.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .tensor import (
    DEFAULT_CONFIG,
    DiffConfig,
    MetricField,
    _as_point,
    curvature,
    partial_derivatives_refined,
)
from .frames import Z0, ZM, ZP, SpinCoefficients, TriadField, spin_coefficients

__all__ = [
    "SIGN_FLIPS",
    "FrameRicci",
    "SpinDerivatives",
    "SpinCoefficientField",
    "ricci_from_spin_values",
    "ricci_reduced_values",
    "identity_residual_values",
    "ricci_from_spin",
    "identity_residuals",
    "project_ricci",
    "trace_identity_residual",
    "geodesic_twist_residual",
    "TwistLemmaReport",
]

# Index order of named coefficients inside stacked arrays.
_KAPPA, _RHO, _SIGMA, _TAU, _EPSILON = range(5)

# Sign corrections required for oracle agreement of the curvature
# expressions, keyed by component and term.  Empty: the expressions written
# below match the projected coordinate curvature as they stand, verified on
# the example catalog and on random perturbed metrics with random frames.
SIGN_FLIPS: dict = {}


@dataclass(frozen=True)
class FrameRicci:
    """Ricci components in the complex frame; r00 and rpm are real in theory.

    Imaginary parts are kept so reality can be asserted rather than assumed.
    """

    r00: complex
    rpp: complex
    r0p: complex
    r0m: complex
    rpm: complex
    scalar: complex

    def as_array(self) -> np.ndarray:
        return np.array([self.r00, self.rpp, self.r0p, self.r0m, self.rpm, self.scalar])


@dataclass(frozen=True)
class SpinDerivatives:
    """Directional derivatives of the five named coefficients.

    Each field is a length-3 complex array ordered (D, delta, deltabar).
    Derivatives of conjugated coefficients follow from conj(delta f) =
    deltabar conj(f).
    """

    kappa: np.ndarray
    rho: np.ndarray
    sigma: np.ndarray
    tau: np.ndarray
    epsilon: np.ndarray


class SpinCoefficientField:
    """Spin coefficients as a field over the chart, differentiable by FD.

    Evaluation goes through the triad at each requested point; directional
    derivatives use the coarse coefficient step with one Richardson
    extrapolation, since every sample is itself finite-difference based.
    """

    def __init__(self, triad: TriadField, cfg: DiffConfig = DEFAULT_CONFIG):
        self.triad = triad
        self.cfg = cfg

    def coefficients(self, p) -> SpinCoefficients:
        return spin_coefficients(self.triad, p, self.cfg)

    def derivatives(self, p) -> SpinDerivatives:
        q = _as_point(p)

        def named(x):
            return spin_coefficients(self.triad, x, self.cfg).named()

        grid = partial_derivatives_refined(
            named, q, self.cfg, admissible=self.triad.metric.admissible
        )  # (i, coefficient)
        z = self.triad.complex_frame_at(q, self.cfg)
        dirs = z @ grid  # (direction, coefficient)
        return SpinDerivatives(
            kappa=dirs[:, _KAPPA],
            rho=dirs[:, _RHO],
            sigma=dirs[:, _SIGMA],
            tau=dirs[:, _TAU],
            epsilon=dirs[:, _EPSILON],
        )


def _conj_derivs(d: np.ndarray) -> np.ndarray:
    """Directional derivatives of the conjugate field: swaps delta <-> deltabar."""
    return np.array([np.conj(d[0]), np.conj(d[2]), np.conj(d[1])])


def ricci_from_spin_values(s: SpinCoefficients, ds: SpinDerivatives) -> FrameRicci:
    """Frame Ricci components from coefficient values and their derivatives."""
    k, r, sg, t, e = s.kappa, s.rho, s.sigma, s.tau, s.epsilon
    kb, rb, sgb, tb = np.conj(k), np.conj(r), np.conj(sg), np.conj(t)
    dk, dr, dsg, dt, de = ds.kappa, ds.rho, ds.sigma, ds.tau, ds.epsilon
    dkb, drb, dtb = _conj_derivs(dk), _conj_derivs(dr), _conj_derivs(dt)

    r00 = dr[0] + drb[0] - dk[2] - dkb[1] + t * k + tb * kb - 2 * k * kb - 2 * sg * sgb - r**2 - rb**2
    rpp = -dk[1] + dsg[0] - 2 * e * sg - tb * k - k**2 - sg * rb - r * sg
    r0p = -dsg[2] + dr[1] + 2 * t * sg + k * r - k * rb
    r0m = -de[2] + dt[0] + k * sgb - r * kb + e * t - e * kb + tb * sgb - t * r
    rpm = (
        -dk[2]
        + dr[0]
        + dt[1]
        + dtb[2]
        + e * r
        - e * rb
        - k * kb
        + k * t
        - r * rb
        - r**2
        - 2 * t * tb
    )
    half_r = (
        -2 * dkb[1]
        + 2 * drb[0]
        + dt[1]
        + dtb[2]
        - 2 * k * kb
        + 2 * kb * tb
        - 2 * rb**2
        - sg * sgb
        + e * r
        - e * rb
        - r * rb
        - 2 * t * tb
    )
    return FrameRicci(r00=r00, rpp=rpp, r0p=r0p, r0m=r0m, rpm=rpm, scalar=2 * half_r)


def ricci_reduced_values(s: SpinCoefficients, ds: SpinDerivatives) -> FrameRicci:
    """The same components in the geodesic, twist-aligned gauge.

    Valid whenever kappa = epsilon = 0 and rho is the constant imaginary
    twist; used to confirm that the general expressions collapse correctly.
    """
    r, sg, t = s.rho, s.sigma, s.tau
    sgb, tb = np.conj(sg), np.conj(t)
    dsg, dt = ds.sigma, ds.tau
    dtb = _conj_derivs(dt)

    r00 = -2 * sg * sgb - 2 * r**2
    rpp = dsg[0]
    r0p = -dsg[2] + 2 * t * sg
    r0m = dt[0] + tb * sgb - t * r
    rpm = dt[1] + dtb[2] - 2 * t * tb
    half_r = dt[1] + dtb[2] - r**2 - sg * sgb - 2 * t * tb
    return FrameRicci(r00=r00, rpp=rpp, r0p=r0p, r0m=r0m, rpm=rpm, scalar=2 * half_r)


def identity_residual_values(s: SpinCoefficients, ds: SpinDerivatives):
    """LHS - RHS of the two curvature-symmetry identities."""
    k, r, sg, t, e = s.kappa, s.rho, s.sigma, s.tau, s.epsilon
    kb, rb, sgb, tb = np.conj(k), np.conj(r), np.conj(sg), np.conj(t)
    dk, dr, dsg, dt, de = ds.kappa, ds.rho, ds.sigma, ds.tau, ds.epsilon
    dkb, drb, dsgb = _conj_derivs(dk), _conj_derivs(dr), _conj_derivs(dsg)

    i1 = (dr[0] - dk[2] + k * t - r**2) - (drb[0] - dkb[1] + kb * tb - rb**2)
    i2 = (dsgb[1] - drb[2] - tb * sgb - kb * rb) - (
        de[2] - dt[0] - k * sgb - e * t + e * kb + t * r
    )
    return complex(i1), complex(i2)


def ricci_from_spin(field: SpinCoefficientField, p) -> FrameRicci:
    return ricci_from_spin_values(field.coefficients(p), field.derivatives(p))


def identity_residuals(field: SpinCoefficientField, p):
    return identity_residual_values(field.coefficients(p), field.derivatives(p))


def project_ricci(ricci: np.ndarray, scalar: float, complex_frame: np.ndarray) -> FrameRicci:
    """Oracle projection R_mn = R_ij Z_m^i Z_n^j of a coordinate Ricci tensor."""
    z = np.asarray(complex_frame)
    proj = np.einsum("mi,nj,ij->mn", z, z, ricci.astype(complex))
    return FrameRicci(
        r00=proj[Z0, Z0],
        rpp=proj[ZP, ZP],
        r0p=proj[Z0, ZP],
        r0m=proj[Z0, ZM],
        rpm=proj[ZP, ZM],
        scalar=complex(scalar),
    )


def project_curvature(g: MetricField, triad: TriadField, p, cfg: DiffConfig = DEFAULT_CONFIG) -> FrameRicci:
    """Convenience oracle: coordinate curvature projected onto the triad."""
    curv = curvature(g, p, cfg)
    return project_ricci(curv.ricci, curv.scalar, triad.complex_frame_at(p, cfg))


def trace_identity_residual(fr: FrameRicci) -> complex:
    """R - (R00 + 2 R+-): zero iff the scalar expression traces the components."""
    return fr.scalar - (fr.r00 + 2.0 * fr.rpm)


class GeodesicInputError(ValueError):
    """The supplied congruence data is not geodesic."""


@dataclass(frozen=True)
class TwistLemmaReport:
    max_kappa: float
    twist_spread: float
    max_theta_nu: float
    violation: bool


def geodesic_twist_residual(
    samples: Sequence[SpinCoefficients],
    kappa_tol: float = 1e-5,
    twist_tol: float = 1e-5,
    residual_tol: float = 1e-5,
) -> TwistLemmaReport:
    """Check that constant twist forces zero divergence along a geodesic.

    Given coefficient samples along one congruence curve, requires
    |kappa| <= kappa_tol (geodesic input) and constant Im(rho); reports
    max |Re(rho) * Im(rho)|, which the first curvature identity forces to
    vanish for constant nonzero twist.
    """
    if not samples:
        raise ValueError("no samples along the curve")
    kappas = np.array([abs(s.kappa) for s in samples])
    if kappas.max() > kappa_tol:
        raise GeodesicInputError(
            f"not geodesic: max |kappa| = {kappas.max():.3e} exceeds {kappa_tol:.1e}"
        )
    twists = np.array([s.rho.imag for s in samples])
    spread = float(twists.max() - twists.min())
    theta_nu = np.array([abs(s.rho.real * s.rho.imag) for s in samples])
    return TwistLemmaReport(
        max_kappa=float(kappas.max()),
        twist_spread=spread,
        max_theta_nu=float(theta_nu.max()),
        violation=bool(spread <= twist_tol and theta_nu.max() > residual_tol),
    )

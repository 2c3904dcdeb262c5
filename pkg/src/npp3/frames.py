"""Orthonormal and complex triads, spin coefficients and optical scalars.

A triad field evaluates an orthonormal frame {e0, e1, e2} at every chart
point; the derived complex frame is Z+ = (e1 - i e2)/sqrt(2), Z- = conj(Z+).
Spin coefficients are the connection contractions

    gamma_mnp = nabla_j Z_m_i  Z_n^i  Z_p^j,   m, n, p in {0, +, -},

antisymmetric in the first index pair.  The five named scalars are

    kappa = gamma_+00   rho = gamma_+0-   sigma = gamma_+0+
    tau   = gamma_+--   epsilon = gamma_+-0.

Frames produced by Gram-Schmidt are re-derived at every stencil point used in
a derivative, never interpolated.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Optional, Union

import numpy as np

from .tensor import (
    DEFAULT_CONFIG,
    DiffConfig,
    GeometryError,
    MetricField,
    _as_point,
    christoffel,
    metric_at,
    partial_derivatives,
    partial_derivatives_refined,
)

__all__ = [
    "FrameDriftError",
    "TriadField",
    "SpinCoefficients",
    "OpticalScalars",
    "gram_schmidt_frame",
    "spin_coefficients",
    "congruence_coefficients",
    "optical_scalars_direct",
    "directional",
    "commutator_residuals",
]

# Complex-frame index order used throughout: 0 -> Z0, 1 -> Z+, 2 -> Z-.
Z0, ZP, ZM = 0, 1, 2


class FrameDriftError(GeometryError):
    """A frame stopped being orthonormal somewhere it was evaluated."""


def gram_schmidt_frame(
    candidate, g: MetricField, p, cfg: DiffConfig = DEFAULT_CONFIG, orientation: int = 1
) -> np.ndarray:
    """Orthonormal frame rows (e0, e1, e2) with e0 along the candidate vector.

    e1, e2 come from Gram-Schmidt on the coordinate basis vectors in order,
    skipping any that projects below 1e-10 in norm.  The frame is aligned
    with the chart orientation (orientation * det > 0) by flipping the sign
    of e2 if necessary.
    """
    q = _as_point(p)
    gmat = metric_at(g, q, cfg)
    v = np.asarray(candidate(q) if callable(candidate) else candidate, dtype=float).reshape(3)
    norm = np.sqrt(v @ gmat @ v)
    if norm < 1e-14:
        raise GeometryError(f"zero candidate vector at {q}")
    rows = [v / norm]
    for k in range(3):
        if len(rows) == 3:
            break
        w = np.eye(3)[k].astype(float)
        for e in rows:
            w = w - (w @ gmat @ e) * e
        norm = np.sqrt(max(w @ gmat @ w, 0.0))
        if norm < 1e-10:
            continue
        rows.append(w / norm)
    if len(rows) < 3:
        raise GeometryError(f"could not complete a frame at {q}")
    frame = np.array(rows)
    if orientation * np.linalg.det(frame.T) < 0.0:
        frame[2] = -frame[2]
    return frame


def _orthonormality_residual(frame: np.ndarray, gmat: np.ndarray) -> float:
    return float(np.max(np.abs(frame @ gmat @ frame.T - np.eye(3))))


@dataclass(frozen=True)
class TriadField:
    """Orthonormal frame field over a chart, with the derived complex frame.

    frame(p) returns the 3x3 array whose rows are e0, e1, e2 (contravariant
    components).  Construct either from a congruence candidate (Gram-Schmidt
    completion at every point) or from explicit frame evaluators.
    """

    metric: MetricField
    frame: Callable[[np.ndarray], np.ndarray]
    name: str = ""

    @classmethod
    def from_congruence(
        cls,
        candidate: Callable,
        g: MetricField,
        cfg: DiffConfig = DEFAULT_CONFIG,
        name: str = "",
        orientation: int = 1,
    ) -> "TriadField":
        return cls(
            metric=g,
            frame=lambda p: gram_schmidt_frame(candidate, g, p, cfg, orientation),
            name=name,
        )

    @classmethod
    def from_complex_field(
        cls, e0: Callable, zplus: Callable, g: MetricField, name: str = ""
    ) -> "TriadField":
        """Build from a real unit field e0 and a complex field with Z+ = (e1 - i e2)/sqrt(2)."""

        def frame(p):
            zp = np.asarray(zplus(_as_point(p)), dtype=complex).reshape(3)
            return np.array(
                [
                    np.asarray(e0(_as_point(p)), dtype=float).reshape(3),
                    np.sqrt(2.0) * zp.real,
                    -np.sqrt(2.0) * zp.imag,
                ]
            )

        return cls(metric=g, frame=frame, name=name)

    def frame_at(self, p, cfg: DiffConfig = DEFAULT_CONFIG, check: bool = True) -> np.ndarray:
        q = _as_point(p)
        fr = np.asarray(self.frame(q), dtype=float)
        if fr.shape != (3, 3):
            raise GeometryError(f"frame evaluator returned shape {fr.shape}")
        if check:
            res = _orthonormality_residual(fr, metric_at(self.metric, q, cfg))
            if res > cfg.frame_tol:
                raise FrameDriftError(f"frame drift {res:.3e} at {q} exceeds {cfg.frame_tol:.1e}")
        return fr

    def complex_frame_at(self, p, cfg: DiffConfig = DEFAULT_CONFIG, check: bool = True) -> np.ndarray:
        """Rows Z0, Z+, Z- (contravariant, complex)."""
        fr = self.frame_at(p, cfg, check)
        zp = (fr[1] - 1j * fr[2]) / np.sqrt(2.0)
        return np.array([fr[0].astype(complex), zp, zp.conj()])

    def coframe_at(self, p, cfg: DiffConfig = DEFAULT_CONFIG) -> np.ndarray:
        """Dual basis rows theta^0, theta^+, theta^- (covariant, complex)."""
        z = self.complex_frame_at(p, cfg)
        gmat = metric_at(self.metric, p, cfg)
        return np.array([z[Z0] @ gmat, z[ZM] @ gmat, z[ZP] @ gmat])

    def rotated(self, angle: Union[float, Callable[[np.ndarray], float]]) -> "TriadField":
        """Gauge rotation Z+ -> exp(i C) Z+ about e0; angle may vary over the chart."""

        def frame(p):
            fr = self.frame(_as_point(p))
            c = angle(_as_point(p)) if callable(angle) else angle
            e1 = np.cos(c) * fr[1] + np.sin(c) * fr[2]
            e2 = -np.sin(c) * fr[1] + np.cos(c) * fr[2]
            return np.array([fr[0], e1, e2])

        return TriadField(metric=self.metric, frame=frame, name=f"{self.name}+rot")


@dataclass(frozen=True)
class SpinCoefficients:
    """The five named complex spin coefficients plus the full gamma_mnp table."""

    kappa: complex
    rho: complex
    sigma: complex
    tau: complex
    epsilon: complex
    gamma: np.ndarray  # (3, 3, 3) complex, indices (m, n, p) over (0, +, -)
    antisymmetry_residual: float = 0.0

    def named(self) -> np.ndarray:
        return np.array([self.kappa, self.rho, self.sigma, self.tau, self.epsilon])


@dataclass(frozen=True)
class OpticalScalars:
    """Divergence, twist and shear of a congruence, from the gradient of e0."""

    divergence: float
    twist: float
    shear_modulus: float
    shear_phase: float
    geodesic_residual: float
    clamped: bool = False


def spin_coefficients(
    triad: TriadField, p, cfg: DiffConfig = DEFAULT_CONFIG
) -> SpinCoefficients:
    """Full spin-coefficient table of a triad at a point.

    The frame is re-evaluated (and its orthonormality checked) at every
    stencil point.  Antisymmetry in the first index pair is enforced on the
    computed table; the pre-enforcement residual is reported.
    """
    q = _as_point(p)
    g = triad.metric

    def lowered(x):
        z = triad.complex_frame_at(x, cfg)
        return z @ metric_at(g, x, cfg)

    dzl = partial_derivatives(lowered, q, cfg, admissible=g.admissible)  # (j, m, i)
    gam = christoffel(g, q, cfg)
    zl = lowered(q)
    z = triad.complex_frame_at(q, cfg)
    covd = dzl - np.einsum("kji,mk->jmi", gam, zl)
    table = np.einsum("jmi,ni,pj->mnp", covd, z, z)
    residual = float(np.max(np.abs(table + table.transpose(1, 0, 2))))
    table = 0.5 * (table - table.transpose(1, 0, 2))
    return SpinCoefficients(
        kappa=complex(table[ZP, Z0, Z0]),
        rho=complex(table[ZP, Z0, ZM]),
        sigma=complex(table[ZP, Z0, ZP]),
        tau=complex(table[ZP, ZM, ZM]),
        epsilon=complex(table[ZP, ZM, Z0]),
        gamma=table,
        antisymmetry_residual=residual,
    )


def _gradient_matrix(e0_field, g: MetricField, p, cfg: DiffConfig) -> np.ndarray:
    """A[i, j] = nabla_i e0_j for the lowered congruence field."""

    def lowered(x):
        return metric_at(g, x, cfg) @ np.asarray(e0_field(_as_point(x)), dtype=float).reshape(3)

    d = partial_derivatives(lowered, p, cfg, admissible=g.admissible)
    gam = christoffel(g, p, cfg)
    return d - np.einsum("kij,k->ij", gam, lowered(_as_point(p)))


def congruence_coefficients(
    e0_field, g: MetricField, p, cfg: DiffConfig = DEFAULT_CONFIG, triad: Optional[TriadField] = None
):
    """(kappa, rho, sigma) of a unit congruence from the gradient of e0 alone.

    Cheaper than the full table and independent of frame derivatives; the
    transverse frame only fixes phases.  Cross-checks spin_coefficients.
    """
    q = _as_point(p)
    gmat = metric_at(g, q, cfg)
    a = _gradient_matrix(e0_field, g, q, cfg)
    fr = triad.frame_at(q, cfg) if triad is not None else gram_schmidt_frame(e0_field, g, q, cfg)
    c = fr @ a @ fr.T  # C[a, b] = e_a^j e_b^i nabla_j e0_i
    rho = -0.5 * ((c[1, 1] + c[2, 2]) + 1j * (c[2, 1] - c[1, 2]))
    sigma = 0.5 * ((c[2, 2] - c[1, 1]) + 1j * (c[1, 2] + c[2, 1]))
    e0 = np.asarray(e0_field(q), dtype=float).reshape(3)
    acc = e0 @ (a @ np.linalg.inv(gmat))
    zp = (fr[1] - 1j * fr[2]) / np.sqrt(2.0)
    kappa = -complex(acc @ gmat @ zp)
    return kappa, rho, sigma


def optical_scalars_direct(
    e0_field, g: MetricField, p, cfg: DiffConfig = DEFAULT_CONFIG, clamp_tol: float = 1e-10
) -> OpticalScalars:
    """Divergence, twist and shear of a unit congruence from nabla e0.

    divergence = (1/2) nabla_i e0^i; twist and shear are the nonnegative
    roots of the antisymmetric and trace-free symmetric invariants of
    nabla e0 (normalisations pinned so a unit-twist congruence of an adapted
    contact structure reports twist = lambda and shear = lambda).  A radicand
    below -clamp_tol marks the result clamped.
    """
    q = _as_point(p)
    gmat = metric_at(g, q, cfg)
    ginv = np.linalg.inv(gmat)
    e0 = np.asarray(e0_field(q), dtype=float).reshape(3)
    unit_residual = abs(e0 @ gmat @ e0 - 1.0)
    if unit_residual > 1e-6:
        raise GeometryError(f"congruence field not unit at {q}: |g(e0,e0)-1| = {unit_residual:.2e}")

    a = _gradient_matrix(e0_field, g, q, cfg)
    araised = ginv @ a @ ginv
    div_full = float(np.einsum("ij,ij->", ginv, a))
    asym = 0.5 * (a - a.T)
    sym = 0.5 * (a + a.T)

    clamped = False
    tw2 = 2.0 * float(np.einsum("ij,ij->", asym, araised))
    sh2 = 0.5 * (float(np.einsum("ij,ij->", sym, araised)) - 0.5 * div_full**2)
    if tw2 < -clamp_tol or sh2 < -clamp_tol:
        clamped = True
    tw2 = max(tw2, 0.0)
    sh2 = max(sh2, 0.0)

    acc = e0 @ (a @ ginv)
    geodesic_residual = float(np.sqrt(max(acc @ gmat @ acc, 0.0)))

    fr = gram_schmidt_frame(e0_field, g, q, cfg)
    c = fr @ a @ fr.T
    sigma_c = 0.5 * ((c[2, 2] - c[1, 1]) + 1j * (c[1, 2] + c[2, 1]))
    return OpticalScalars(
        divergence=0.5 * div_full,
        twist=0.5 * np.sqrt(tw2),
        shear_modulus=float(np.sqrt(sh2)),
        shear_phase=0.5 * float(np.angle(sigma_c)),
        geodesic_residual=geodesic_residual,
        clamped=clamped,
    )


def directional(f: Callable, triad: TriadField, p, cfg: DiffConfig = DEFAULT_CONFIG) -> np.ndarray:
    """(D f, delta f, deltabar f): derivatives of a scalar field along Z0, Z+, Z-."""
    q = _as_point(p)
    d = partial_derivatives(lambda x: np.asarray(f(x)), q, cfg, admissible=triad.metric.admissible)
    z = triad.complex_frame_at(q, cfg)
    return z @ d.astype(complex)


def commutator_residuals(
    f: Callable,
    triad: TriadField,
    p,
    cfg: DiffConfig = DEFAULT_CONFIG,
    coeffs: Optional[SpinCoefficients] = None,
):
    """Residuals of the two frame commutation identities applied to f.

    c1 = (D delta - delta D) f - [(conj(rho) + eps) delta + sigma deltabar + kappa D] f
    c2 = (delta deltabar - deltabar delta) f
         - [conj(tau) deltabar - tau delta + (conj(rho) - rho) D] f

    Both vanish for any smooth f when the coefficients belong to the triad.
    """
    q = _as_point(p)
    s = coeffs if coeffs is not None else spin_coefficients(triad, q, cfg)
    first = directional(f, triad, q, cfg)

    grid = partial_derivatives_refined(
        lambda x: directional(f, triad, x, cfg), q, cfg, admissible=triad.metric.admissible
    )  # (i, n): d_i of n-th directional
    z = triad.complex_frame_at(q, cfg)
    second = z @ grid  # second[m, n] = Z_m-derivative of the n-th directional

    df, deltaf, deltabarf = first
    c1 = second[Z0, ZP] - second[ZP, Z0] - (
        (np.conj(s.rho) + s.epsilon) * deltaf + s.sigma * deltabarf + s.kappa * df
    )
    c2 = second[ZP, ZM] - second[ZM, ZP] - (
        np.conj(s.tau) * deltabarf - s.tau * deltaf + (np.conj(s.rho) - s.rho) * df
    )
    return complex(c1), complex(c2)

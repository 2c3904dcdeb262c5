"""Adapted contact structures, Reeb fields and the pseudohermitian layer.

A contact 1-form alpha is adapted to a metric g when |alpha|_g = 1 and
d alpha = 2 lambda (*alpha) for a positive constant lambda (orientation fixed
so lambda > 0).  The Reeb field of an adapted structure is the metric dual of
alpha; its integral curves are geodesic, divergence-free and of constant
twist lambda.  The pseudohermitian torsion of the associated CR structure is
minus the conjugate shear, and the Tanaka-Webster curvature is assembled from
directional derivatives of tau.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Dict, Optional

import numpy as np

from .tensor import (
    DEFAULT_CONFIG,
    DiffConfig,
    GeometryError,
    MetricField,
    OneFormField,
    _as_point,
    exterior_d,
    hodge_star_oneform,
    metric_at,
    raise_oneform,
)
from .frames import TriadField, optical_scalars_direct
from .ricci import SpinCoefficientField

__all__ = [
    "NotAdaptedError",
    "ContactStructure",
    "AdaptedResiduals",
    "PseudohermitianData",
    "ConstancyReport",
    "check_adapted",
    "reeb_field",
    "estimate_twist",
    "pseudohermitian",
    "scalar_relation_residual",
    "constancy_check",
]


class NotAdaptedError(GeometryError):
    """The contact form fails the adaptedness conditions at the given point."""


@dataclass(frozen=True)
class ContactStructure:
    """A unit 1-form field with its twist constant and the ambient metric.

    orientation records the sign of the chart volume form against which the
    adapted condition holds with lambda > 0; congruence-coordinate charts
    built around a left-handed map carry orientation -1.
    """

    alpha: OneFormField
    lam: float
    metric: MetricField
    orientation: int = 1

    def __post_init__(self):
        if not self.lam > 0.0:
            raise ValueError("twist constant lambda must be positive")
        if self.orientation not in (1, -1):
            raise ValueError("orientation must be +1 or -1")

    def reeb(self, p) -> np.ndarray:
        """Metric dual of alpha; equals the Reeb field when the structure is adapted."""
        q = _as_point(p)
        return raise_oneform(metric_at(self.metric, q), self.alpha(q))

    def reeb_triad(self, cfg: DiffConfig = DEFAULT_CONFIG, name: str = "") -> TriadField:
        return TriadField.from_congruence(
            self.reeb, self.metric, cfg, name=name, orientation=self.orientation
        )


@dataclass(frozen=True)
class AdaptedResiduals:
    form: float  # max component of d(alpha) - 2 lambda *alpha
    norm: float  # | |alpha|_g - 1 |

    def max(self) -> float:
        return max(self.form, self.norm)


def check_adapted(c: ContactStructure, p, cfg: DiffConfig = DEFAULT_CONFIG) -> AdaptedResiduals:
    """Pointwise residuals of d(alpha) = 2 lambda *alpha and |alpha| = 1."""
    q = _as_point(p)
    gmat = metric_at(c.metric, q, cfg)
    a = c.alpha(q)
    da = exterior_d(c.alpha, q, cfg)
    star = hodge_star_oneform(a, gmat, orientation=c.orientation)
    form = float(np.max(np.abs(da - 2.0 * c.lam * star)))
    norm = float(abs(np.sqrt(a @ np.linalg.solve(gmat, a)) - 1.0))
    return AdaptedResiduals(form=form, norm=norm)


def reeb_field(
    c: ContactStructure, p, cfg: DiffConfig = DEFAULT_CONFIG, tol: float = 1e-5
) -> np.ndarray:
    """The Reeb vector at p, with its defining properties verified.

    Raises NotAdaptedError when the adaptedness residuals exceed tol, and
    GeometryError when alpha(Z0) = 1 or d alpha(Z0, .) = 0 fail beyond tol.
    """
    q = _as_point(p)
    res = check_adapted(c, q, cfg)
    if res.max() > tol:
        raise NotAdaptedError(
            f"not adapted at {q}: form residual {res.form:.3e}, norm residual {res.norm:.3e}"
        )
    z0 = c.reeb(q)
    pairing = float(c.alpha(q) @ z0)
    da = exterior_d(c.alpha, q, cfg)
    contraction = float(np.max(np.abs(da @ z0)))
    if abs(pairing - 1.0) > tol or contraction > tol:
        raise GeometryError(
            f"Reeb verification failed at {q}: alpha(Z0)-1 = {pairing - 1.0:.3e}, "
            f"max |d alpha(Z0, .)| = {contraction:.3e}"
        )
    return z0


def estimate_twist(c: ContactStructure, p, cfg: DiffConfig = DEFAULT_CONFIG) -> float:
    """Twist of the Reeb congruence; estimates lambda for discovery workflows."""
    return optical_scalars_direct(c.reeb, c.metric, p, cfg).twist


@dataclass(frozen=True)
class PseudohermitianData:
    """Torsion, Tanaka-Webster curvature and connection coefficients.

    webster includes the frame-rotation completion (the i*epsilon term that a
    frame aligned with the congruence but rotating along it produces);
    rotation_term records that contribution so the fixed-gauge expression
    webster - rotation_term remains visible.  connection holds the 1-form
    coefficients (on theta^0, theta^+, theta^-).
    """

    torsion: complex
    webster: float
    rotation_term: float
    webster_imag: float
    connection: np.ndarray


def pseudohermitian(
    triad: TriadField,
    lam: float,
    p,
    cfg: DiffConfig = DEFAULT_CONFIG,
    field: Optional[SpinCoefficientField] = None,
) -> PseudohermitianData:
    """Pseudohermitian data of an adapted structure in the frame with Z0 = Reeb.

    torsion A = -conj(sigma); connection omega = (epsilon + conj(rho)) theta^0
    - conj(tau) theta^+ + tau theta^-; and

        2 lambda W = delta tau + deltabar conj(tau) - 2 tau conj(tau)
                     + 2 lambda^2 + 2 lambda i epsilon.

    The epsilon term vanishes in a frame that does not rotate along the
    congruence and completes the formula for any other orthonormal frame.
    """
    f = field if field is not None else SpinCoefficientField(triad, cfg)
    s = f.coefficients(p)
    ds = f.derivatives(p)
    dtau = ds.tau
    delta_tau = dtau[1]
    deltabar_taubar = np.conj(dtau[1])
    two_lam_w = (
        delta_tau
        + deltabar_taubar
        - 2.0 * s.tau * np.conj(s.tau)
        + 2.0 * lam**2
        + 2.0 * lam * 1j * s.epsilon
    )
    w = two_lam_w / (2.0 * lam)
    rotation = (1j * s.epsilon).real
    connection = np.array([s.epsilon + np.conj(s.rho), -np.conj(s.tau), s.tau])
    return PseudohermitianData(
        torsion=-np.conj(s.sigma),
        webster=float(w.real),
        rotation_term=float(rotation),
        webster_imag=float(w.imag),
        connection=connection,
    )


def scalar_relation_residual(scalar_curvature: float, webster: float, sigma, lam: float) -> float:
    """Residual of R/2 = 2 lambda W - lambda^2 - |sigma|^2."""
    return float(
        0.5 * scalar_curvature - 2.0 * lam * webster + lam**2 + abs(sigma) ** 2
    )


@dataclass(frozen=True)
class ConstancyReport:
    max_gradients: Dict[str, float]
    consistent: bool
    positivity_ok: Optional[bool]


def constancy_check(
    scalar_curvature: np.ndarray,
    webster: np.ndarray,
    torsion_modulus: np.ndarray,
    spacings,
    tol: float = 1e-5,
    factor: float = 10.0,
) -> ConstancyReport:
    """Grid-level constancy implication among R, W and |A|.

    If any two of the three have max gradient below tol, the third must stay
    below factor * tol.  When R > 0 on the whole grid, W must be positive
    everywhere as well.  Requires at least 8 grid points.
    """
    fields = {
        "scalar_curvature": np.asarray(scalar_curvature, dtype=float),
        "webster": np.asarray(webster, dtype=float),
        "torsion_modulus": np.asarray(torsion_modulus, dtype=float),
    }
    size = fields["scalar_curvature"].size
    if size < 8:
        raise ValueError(f"grid too small for constancy check: {size} < 8 points")

    spacings = [float(s) for s in np.atleast_1d(spacings)]
    grads = {}
    for name, arr in fields.items():
        axes_spacing = spacings if len(spacings) == arr.ndim else [spacings[0]] * arr.ndim
        if arr.ndim == 0 or max(arr.shape) < 2:
            raise ValueError("each grid axis needs at least 2 points")
        g = np.gradient(arr, *axes_spacing)
        if arr.ndim == 1:
            g = [g]
        norm = np.sqrt(sum(gi**2 for gi in g))
        grads[name] = float(np.max(norm))

    values = list(grads.values())
    consistent = True
    for hold_out in range(3):
        others = [values[i] for i in range(3) if i != hold_out]
        if all(v < tol for v in others) and values[hold_out] >= factor * tol:
            consistent = False

    positivity_ok: Optional[bool] = None
    if np.all(fields["scalar_curvature"] > 0.0):
        positivity_ok = bool(np.all(fields["webster"] > 0.0))

    return ConstancyReport(max_gradients=grads, consistent=consistent, positivity_ok=positivity_ok)

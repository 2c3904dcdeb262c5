"""Coordinate-chart tensor calculus on riemannian 3-manifolds.

Metric and 1-form fields are plain point evaluators with optional analytic
derivative hooks and an admissibility predicate for the chart domain.  All
derived quantities (Christoffel symbols, curvature, exterior derivative,
Hodge star, pullbacks) are computed pointwise; finite differences are used
wherever an analytic derivative is not supplied.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

__all__ = [
    "GeometryError",
    "DomainViolationError",
    "DegenerateMetricError",
    "DiffConfig",
    "MetricField",
    "OneFormField",
    "CurvatureAtPoint",
    "euclidean_metric",
    "metric_at",
    "partial_derivatives",
    "partial_derivatives_refined",
    "christoffel",
    "christoffel_derivatives",
    "curvature",
    "exterior_d",
    "hodge_star_oneform",
    "hodge_star_twoform",
    "jacobian",
    "pullback_metric",
    "pullback_oneform",
    "covd_oneform",
    "covariant_divergence",
    "metric_compatibility_residual",
    "raise_oneform",
    "lower_vector",
]


class GeometryError(Exception):
    """Base class for geometric evaluation failures."""


class DomainViolationError(GeometryError):
    """A point, or a finite-difference stencil around it, left the chart domain."""


class DegenerateMetricError(GeometryError):
    """Metric evaluation produced a matrix that is not positive-definite."""


# Permutation symbol with eps[0,1,2] = +1.
LEVI_CIVITA = np.zeros((3, 3, 3))
LEVI_CIVITA[0, 1, 2] = LEVI_CIVITA[1, 2, 0] = LEVI_CIVITA[2, 0, 1] = 1.0
LEVI_CIVITA[0, 2, 1] = LEVI_CIVITA[2, 1, 0] = LEVI_CIVITA[1, 0, 2] = -1.0

_STENCILS = {
    "central-2": ((-1, 1), (-0.5, 0.5)),
    "central-4": ((-2, -1, 1, 2), (1.0 / 12.0, -8.0 / 12.0, 8.0 / 12.0, -1.0 / 12.0)),
}


@dataclass(frozen=True)
class DiffConfig:
    """Numerical differentiation settings.

    scheme      -- "central-2" or "central-4".
    step        -- finite-difference step, scalar or per-coordinate triple.
    coeff_step  -- coarser step for differentiating quantities that are
                   themselves finite-difference results (spin-coefficient
                   fields and directional-derivative fields); one Richardson
                   extrapolation is applied on top of it.
    spd_rtol    -- eigenvalue threshold for the positive-definiteness check,
                   relative to the metric trace.
    frame_tol   -- orthonormality drift allowed at any stencil point.
    max_step_halvings -- how often a stencil may shrink near a domain
                   boundary before reporting a domain violation.
    """

    scheme: str = "central-2"
    step: float = 1e-5
    coeff_step: float = 1e-4
    spd_rtol: float = 1e-12
    frame_tol: float = 1e-8
    max_step_halvings: int = 4

    def steps(self) -> np.ndarray:
        h = np.broadcast_to(np.asarray(self.step, dtype=float), (3,)).copy()
        if np.any(h <= 0.0):
            raise ValueError("finite-difference step must be positive")
        return h

    def stencil(self):
        try:
            return _STENCILS[self.scheme]
        except KeyError:
            raise ValueError(f"unknown differentiation scheme {self.scheme!r}") from None


DEFAULT_CONFIG = DiffConfig()


def _as_point(p) -> np.ndarray:
    q = np.asarray(p, dtype=float).reshape(3)
    if not np.all(np.isfinite(q)):
        raise ValueError(f"point has non-finite coordinates: {q}")
    return q


@dataclass(frozen=True)
class MetricField:
    """Smooth map from chart points to symmetric positive-definite 3x3 matrices.

    d_matrix, if given, returns dg[i, a, b] = d_i g_ab; d2_matrix returns
    d2g[i, j, a, b] = d_i d_j g_ab.  domain is an admissibility predicate.
    """

    matrix: Callable[[np.ndarray], np.ndarray]
    d_matrix: Optional[Callable[[np.ndarray], np.ndarray]] = None
    d2_matrix: Optional[Callable[[np.ndarray], np.ndarray]] = None
    domain: Optional[Callable[[np.ndarray], bool]] = None
    name: str = ""

    def admissible(self, p) -> bool:
        return self.domain is None or bool(self.domain(_as_point(p)))

    def __call__(self, p) -> np.ndarray:
        q = _as_point(p)
        if not self.admissible(q):
            raise DomainViolationError(f"point {q} outside domain of metric {self.name!r}")
        g = np.asarray(self.matrix(q), dtype=float)
        if g.shape != (3, 3):
            raise GeometryError(f"metric evaluator returned shape {g.shape}")
        if np.max(np.abs(g - g.T)) > 1e-12 * (1.0 + np.max(np.abs(g))):
            raise GeometryError(f"metric evaluator not symmetric at {q}")
        return 0.5 * (g + g.T)


@dataclass(frozen=True)
class OneFormField:
    """Covariant 1-form field; d_components returns D[i, a] = d_i alpha_a."""

    components: Callable[[np.ndarray], np.ndarray]
    d_components: Optional[Callable[[np.ndarray], np.ndarray]] = None
    domain: Optional[Callable[[np.ndarray], bool]] = None
    name: str = ""

    def admissible(self, p) -> bool:
        return self.domain is None or bool(self.domain(_as_point(p)))

    def __call__(self, p) -> np.ndarray:
        q = _as_point(p)
        if not self.admissible(q):
            raise DomainViolationError(f"point {q} outside domain of 1-form {self.name!r}")
        return np.asarray(self.components(q), dtype=float).reshape(3)


@dataclass(frozen=True)
class CurvatureAtPoint:
    """Riemann (all indices down), Ricci and scalar curvature at one point."""

    riemann: np.ndarray  # R_ijkl
    ricci: np.ndarray    # R_ij
    scalar: float


def euclidean_metric() -> MetricField:
    return MetricField(
        matrix=lambda p: np.eye(3),
        d_matrix=lambda p: np.zeros((3, 3, 3)),
        d2_matrix=lambda p: np.zeros((3, 3, 3, 3)),
        name="euclidean",
    )


def spd_check(gmat: np.ndarray, p, rtol: float = DEFAULT_CONFIG.spd_rtol) -> None:
    """Raise DegenerateMetricError unless gmat is positive-definite."""
    eig = np.linalg.eigvalsh(gmat)
    if eig[0] <= rtol * abs(np.trace(gmat)):
        raise DegenerateMetricError(
            f"degenerate metric at {np.asarray(p)}: eigenvalues {eig}"
        )


def metric_at(g: MetricField, p, cfg: DiffConfig = DEFAULT_CONFIG) -> np.ndarray:
    """Evaluate the metric with the positive-definiteness guard."""
    gmat = g(p)
    spd_check(gmat, p, cfg.spd_rtol)
    return gmat


def partial_derivatives(
    fn: Callable[[np.ndarray], np.ndarray],
    p,
    cfg: DiffConfig = DEFAULT_CONFIG,
    admissible: Optional[Callable[[np.ndarray], bool]] = None,
    step: Optional[float] = None,
) -> np.ndarray:
    """Coordinate partials of a point function, stacked along a leading axis.

    Returns an array out[i, ...] = d_i fn(p).  Near a domain boundary the
    stencil for the offending coordinate is halved up to
    cfg.max_step_halvings times; one-sided differences are never used.
    """
    q = _as_point(p)
    offsets, weights = cfg.stencil()
    h = cfg.steps() if step is None else np.broadcast_to(float(step), (3,)).copy()
    if admissible is not None and not admissible(q):
        raise DomainViolationError(f"point {q} outside domain")

    rows = []
    for i in range(3):
        hi = h[i]
        for attempt in range(cfg.max_step_halvings + 1):
            points = [q + o * hi * np.eye(3)[i] for o in offsets]
            if admissible is None or all(admissible(x) for x in points):
                break
            hi *= 0.5
        else:
            bad = next(x for x in points if not admissible(x))
            raise DomainViolationError(
                f"stencil point {bad} outside domain while differentiating at {q}"
            )
        vals = [np.asarray(fn(x)) for x in points]
        rows.append(sum(w * v for w, v in zip(weights, vals)) / hi)
    return np.stack(rows, axis=0)


def partial_derivatives_refined(
    fn: Callable[[np.ndarray], np.ndarray],
    p,
    cfg: DiffConfig = DEFAULT_CONFIG,
    admissible: Optional[Callable[[np.ndarray], bool]] = None,
    step: Optional[float] = None,
) -> np.ndarray:
    """Central 2nd-order partials with one Richardson extrapolation step.

    Intended for fields that are expensive or themselves FD-based, where a
    coarse base step keeps noise amplification down.
    """
    h = cfg.coeff_step if step is None else float(step)
    base = DiffConfig(
        scheme="central-2",
        step=h,
        spd_rtol=cfg.spd_rtol,
        frame_tol=cfg.frame_tol,
        max_step_halvings=cfg.max_step_halvings,
    )
    coarse = partial_derivatives(fn, p, base, admissible)
    fine = partial_derivatives(fn, p, base, admissible, step=0.5 * h)
    return (4.0 * fine - coarse) / 3.0


def _metric_partials(g: MetricField, p, cfg: DiffConfig) -> np.ndarray:
    if g.d_matrix is not None:
        return np.asarray(g.d_matrix(_as_point(p)), dtype=float)
    return partial_derivatives(lambda q: metric_at(g, q, cfg), p, cfg, admissible=g.admissible)


def christoffel(g: MetricField, p, cfg: DiffConfig = DEFAULT_CONFIG) -> np.ndarray:
    """Christoffel symbols Gamma[i, j, k] = Gamma^i_jk of the Levi-Civita connection."""
    gmat = metric_at(g, p, cfg)
    dg = _metric_partials(g, p, cfg)
    ginv = np.linalg.inv(gmat)
    low = 0.5 * (np.einsum("jlk->ljk", dg) + np.einsum("klj->ljk", dg) - dg)
    gamma = np.einsum("il,ljk->ijk", ginv, low)
    return 0.5 * (gamma + gamma.transpose(0, 2, 1))


def christoffel_derivatives(g: MetricField, p, cfg: DiffConfig = DEFAULT_CONFIG) -> np.ndarray:
    """dGamma[l, i, j, k] = d_l Gamma^i_jk, analytic when second derivatives exist."""
    q = _as_point(p)
    if g.d2_matrix is not None and g.d_matrix is not None:
        gmat = metric_at(g, q, cfg)
        ginv = np.linalg.inv(gmat)
        dg = np.asarray(g.d_matrix(q), dtype=float)
        d2g = np.asarray(g.d2_matrix(q), dtype=float)
        low = 0.5 * (np.einsum("jmk->mjk", dg) + np.einsum("kmj->mjk", dg) - dg)
        dlow = 0.5 * (
            np.einsum("ljmk->lmjk", d2g) + np.einsum("lkmj->lmjk", d2g) - d2g
        )
        dginv = -np.einsum("ia,lab,bm->lim", ginv, dg, ginv)
        return np.einsum("lim,mjk->lijk", dginv, low) + np.einsum(
            "im,lmjk->lijk", ginv, dlow
        )
    return partial_derivatives(lambda x: christoffel(g, x, cfg), q, cfg, admissible=g.admissible)


def curvature(g: MetricField, p, cfg: DiffConfig = DEFAULT_CONFIG) -> CurvatureAtPoint:
    """Riemann/Ricci/scalar curvature; sign convention gives R > 0 on spheres."""
    gmat = metric_at(g, p, cfg)
    ginv = np.linalg.inv(gmat)
    gam = christoffel(g, p, cfg)
    dgam = christoffel_derivatives(g, p, cfg)
    # R^i_jkl = d_k Gamma^i_lj - d_l Gamma^i_kj + Gamma^i_ka Gamma^a_lj - Gamma^i_la Gamma^a_kj
    riem_up = (
        np.einsum("kilj->ijkl", dgam)
        - np.einsum("likj->ijkl", dgam)
        + np.einsum("ika,alj->ijkl", gam, gam)
        - np.einsum("ila,akj->ijkl", gam, gam)
    )
    riemann = np.einsum("im,mjkl->ijkl", gmat, riem_up)
    ricci = np.einsum("ijil->jl", riem_up)
    scalar = float(np.einsum("jl,jl->", ginv, ricci))
    return CurvatureAtPoint(riemann=riemann, ricci=ricci, scalar=scalar)


def exterior_d(alpha: OneFormField, p, cfg: DiffConfig = DEFAULT_CONFIG) -> np.ndarray:
    """Exterior derivative of a 1-form: (d alpha)_ij = d_i alpha_j - d_j alpha_i."""
    if alpha.d_components is not None:
        d = np.asarray(alpha.d_components(_as_point(p)), dtype=float)
    else:
        d = partial_derivatives(alpha, p, cfg, admissible=alpha.admissible)
    return d - d.T


def hodge_star_oneform(alpha_cov, gmat: np.ndarray, orientation: int = 1) -> np.ndarray:
    """(*alpha)_ij = sqrt(det g) eps_ijk g^kl alpha_l, with eps_123 = +orientation."""
    det = np.linalg.det(gmat)
    if det <= 0.0:
        raise DegenerateMetricError(f"non-positive metric determinant {det}")
    vec = np.linalg.solve(gmat, np.asarray(alpha_cov, dtype=float).reshape(3))
    return orientation * np.sqrt(det) * np.einsum("ijk,k->ij", LEVI_CIVITA, vec)


def hodge_star_twoform(omega: np.ndarray, gmat: np.ndarray, orientation: int = 1) -> np.ndarray:
    """(*omega)_i = 1/2 sqrt(det g) eps_ijk omega^jk for an antisymmetric omega_ij."""
    det = np.linalg.det(gmat)
    if det <= 0.0:
        raise DegenerateMetricError(f"non-positive metric determinant {det}")
    ginv = np.linalg.inv(gmat)
    up = ginv @ omega @ ginv
    return 0.5 * orientation * np.sqrt(det) * np.einsum("ijk,jk->i", LEVI_CIVITA, up)


def jacobian(
    phi: Callable[[np.ndarray], np.ndarray],
    p,
    cfg: DiffConfig = DEFAULT_CONFIG,
    admissible: Optional[Callable[[np.ndarray], bool]] = None,
) -> np.ndarray:
    """Numerical Jacobian J[i, a] = d phi^i / d x^a."""
    return partial_derivatives(lambda q: np.asarray(phi(q), dtype=float).reshape(3), p, cfg, admissible).T


def pullback_metric(
    phi: Callable[[np.ndarray], np.ndarray],
    g_target: MetricField,
    p,
    cfg: DiffConfig = DEFAULT_CONFIG,
    admissible: Optional[Callable[[np.ndarray], bool]] = None,
) -> np.ndarray:
    """(phi* g)_ab = g_ij(phi(p)) J^i_a J^j_b."""
    jac = jacobian(phi, p, cfg, admissible)
    if abs(np.linalg.det(jac)) < 1e-12:
        warnings.warn(f"singular jacobian of pullback map at {_as_point(p)}", stacklevel=2)
    image = np.asarray(phi(_as_point(p)), dtype=float).reshape(3)
    gmat = metric_at(g_target, image, cfg)
    return jac.T @ gmat @ jac


def pullback_oneform(
    phi: Callable[[np.ndarray], np.ndarray],
    alpha_target: OneFormField,
    p,
    cfg: DiffConfig = DEFAULT_CONFIG,
    admissible: Optional[Callable[[np.ndarray], bool]] = None,
) -> np.ndarray:
    """(phi* alpha)_a = alpha_i(phi(p)) J^i_a."""
    jac = jacobian(phi, p, cfg, admissible)
    image = np.asarray(phi(_as_point(p)), dtype=float).reshape(3)
    return jac.T @ alpha_target(image)


def covd_oneform(
    alpha: OneFormField, g: MetricField, p, cfg: DiffConfig = DEFAULT_CONFIG
) -> np.ndarray:
    """Covariant derivative A[i, j] = nabla_i alpha_j."""
    if alpha.d_components is not None:
        d = np.asarray(alpha.d_components(_as_point(p)), dtype=float)
    else:
        d = partial_derivatives(alpha, p, cfg, admissible=alpha.admissible)
    gam = christoffel(g, p, cfg)
    return d - np.einsum("kij,k->ij", gam, alpha(p))


def covariant_divergence(
    v: Callable[[np.ndarray], np.ndarray], g: MetricField, p, cfg: DiffConfig = DEFAULT_CONFIG
) -> float:
    """nabla_i v^i = d_i v^i + Gamma^i_ik v^k."""
    dv = partial_derivatives(lambda q: np.asarray(v(q), dtype=float).reshape(3), p, cfg, g.admissible)
    gam = christoffel(g, p, cfg)
    return float(np.trace(dv) + np.einsum("iik,k->", gam, np.asarray(v(_as_point(p)), dtype=float)))


def metric_compatibility_residual(g: MetricField, p, cfg: DiffConfig = DEFAULT_CONFIG) -> float:
    """max |nabla_l g_ab|; vanishes identically for the Levi-Civita connection."""
    dg = _metric_partials(g, p, cfg)
    gam = christoffel(g, p, cfg)
    gmat = metric_at(g, p, cfg)
    nabla = dg - np.einsum("mla,mb->lab", gam, gmat) - np.einsum("mlb,am->lab", gam, gmat)
    return float(np.max(np.abs(nabla)))


def raise_oneform(gmat: np.ndarray, alpha_cov) -> np.ndarray:
    """Metric dual vector of a covariant 1-form."""
    return np.linalg.solve(gmat, np.asarray(alpha_cov, dtype=float).reshape(3))


def lower_vector(gmat: np.ndarray, vec) -> np.ndarray:
    """Covariant components of a vector."""
    return gmat @ np.asarray(vec, dtype=float).reshape(3)

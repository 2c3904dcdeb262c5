"""The explicit adapted-contact families on constant-curvature 3-manifolds.

Five named examples: the standard flat structure on R^3, the round-sphere
structure in spherical chart coordinates, two flat families in congruence
coordinates (r, u, v) distinguished by a vanishing or non-vanishing twist
integration function b0, and the elliptic family.  Each example carries its
metric and contact form (with analytic first derivatives), a closed-form
twist-aligned frame where one exists, closed-form spin-coefficient data, the
contact isometry onto its standard model, and the residuals of the reduced
field equations its building blocks must satisfy.

Free functions are polynomials with coefficients in ascending degree;
antiderivatives of polynomials are exact, while the one trigonometric
integral in the flat b0 = 0 isometry uses adaptive quadrature.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Dict, Optional, Sequence, Tuple

import numpy as np
from numpy.polynomial import Polynomial
from scipy.integrate import quad

from .tensor import (
    DEFAULT_CONFIG,
    DiffConfig,
    DomainViolationError,
    MetricField,
    OneFormField,
    _as_point,
    pullback_metric,
    pullback_oneform,
)
from .frames import SpinCoefficients, TriadField
from .ricci import SpinDerivatives
from .contact import ContactStructure

__all__ = [
    "NamedExample",
    "IsometryStage",
    "IsometryMap",
    "BranchResult",
    "standard_flat",
    "round_sphere",
    "flat_b0zero",
    "flat_b0nonzero",
    "elliptic",
    "make_example",
    "EXAMPLE_BUILDERS",
    "einstein_branch",
    "hyperbolic_obstruction",
    "pullback_residuals",
    "stage_residuals",
    "grid_points",
]

SQ2 = np.sqrt(2.0)


def as_polynomial(coeffs) -> Polynomial:
    if isinstance(coeffs, Polynomial):
        return coeffs
    return Polynomial(np.atleast_1d(np.asarray(coeffs, dtype=float)))


@dataclass(frozen=True)
class IsometryStage:
    forward: Callable[[np.ndarray], np.ndarray]
    metric: MetricField
    form: OneFormField
    name: str


@dataclass(frozen=True)
class IsometryMap:
    """Composition of chart maps onto a standard model, kept stage by stage."""

    stages: Tuple[IsometryStage, ...]
    target_name: str
    domain: Optional[Callable[[np.ndarray], bool]] = None

    def forward(self, p) -> np.ndarray:
        q = _as_point(p)
        if self.domain is not None and not self.domain(q):
            raise DomainViolationError(f"point {q} outside isometry domain")
        for stage in self.stages:
            q = np.asarray(stage.forward(q), dtype=float).reshape(3)
        return q

    @property
    def target_metric(self) -> MetricField:
        return self.stages[-1].metric

    @property
    def target_form(self) -> OneFormField:
        return self.stages[-1].form

    def admissible(self, p) -> bool:
        if self.domain is not None and not self.domain(_as_point(p)):
            return False
        try:
            image = self.forward(p)
        except (DomainViolationError, FloatingPointError, ValueError):
            return False
        return bool(np.all(np.isfinite(image))) and self.target_metric.admissible(image)


@dataclass(frozen=True)
class NamedExample:
    """One explicit adapted contact structure with its verification data."""

    kind: str
    lam: float
    coordinates: Tuple[str, str, str]
    metric: MetricField
    contact: ContactStructure
    grid_ranges: Tuple[Tuple[float, float], ...]
    params: Dict[str, Polynomial] = field(default_factory=dict)
    gauge_frame: Optional[TriadField] = None
    spin_closed_form: Optional[Callable] = None  # p -> (SpinCoefficients, SpinDerivatives)
    isometry: Optional[IsometryMap] = None
    reduced_residuals: Optional[Callable[[np.ndarray], np.ndarray]] = None
    solution_data: Optional[Callable[[np.ndarray], Dict[str, complex]]] = None

    def reeb(self, p) -> np.ndarray:
        return self.contact.reeb(p)

    def reeb_triad(self, cfg: DiffConfig = DEFAULT_CONFIG) -> TriadField:
        return self.contact.reeb_triad(cfg, name=f"{self.kind}-reeb")

    def sample_points(self, n: int, rng: np.random.Generator, require_isometry: bool = False):
        """Uniform admissible samples from the example's chart box."""
        lo = np.array([a for a, _ in self.grid_ranges])
        hi = np.array([b for _, b in self.grid_ranges])
        out = []
        for _ in range(200 * n):
            p = lo + (hi - lo) * rng.random(3)
            if not self.metric.admissible(p):
                continue
            if require_isometry and self.isometry is not None and not self.isometry.admissible(p):
                continue
            out.append(p)
            if len(out) == n:
                return out
        raise RuntimeError(f"could not sample {n} admissible points for {self.kind}")

    def grid(self, counts=(5, 5, 5)):
        return grid_points(self.grid_ranges, counts, self.metric.admissible)


def grid_points(ranges, counts, admissible=None):
    axes = [np.linspace(a, b, int(n)) for (a, b), n in zip(ranges, counts)]
    mesh = np.stack(np.meshgrid(*axes, indexing="ij"), axis=-1).reshape(-1, 3)
    if admissible is None:
        return [p for p in mesh]
    return [p for p in mesh if admissible(p)]


def _constant_spin(lam: float):
    """Closed-form coefficients of the flat-family gauge: rho = i lam, sigma = lam."""
    zeros = np.zeros(3, dtype=complex)

    def data(p):
        s = SpinCoefficients(
            kappa=0j,
            rho=1j * lam,
            sigma=lam + 0j,
            tau=0j,
            epsilon=0j,
            gamma=np.zeros((3, 3, 3), dtype=complex),
        )
        ds = SpinDerivatives(kappa=zeros, rho=zeros, sigma=zeros, tau=zeros, epsilon=zeros)
        return s, ds

    return data


# ---------------------------------------------------------------------------
# standard flat structure on R^3
# ---------------------------------------------------------------------------


def standard_flat(lam: float = 1.0) -> NamedExample:
    lam = float(lam)

    gmetric = MetricField(
        matrix=lambda p: np.eye(3),
        d_matrix=lambda p: np.zeros((3, 3, 3)),
        d2_matrix=lambda p: np.zeros((3, 3, 3, 3)),
        name="standard-flat",
    )

    def alpha(p):
        return np.array([np.sin(2 * lam * p[2]), np.cos(2 * lam * p[2]), 0.0])

    def dalpha(p):
        d = np.zeros((3, 3))
        d[2, 0] = 2 * lam * np.cos(2 * lam * p[2])
        d[2, 1] = -2 * lam * np.sin(2 * lam * p[2])
        return d

    form = OneFormField(components=alpha, d_components=dalpha, name="standard-flat")
    contact = ContactStructure(alpha=form, lam=lam, metric=gmetric)

    def base_frame(p):
        c, s = np.cos(2 * lam * p[2]), np.sin(2 * lam * p[2])
        return np.array([[s, c, 0.0], [c, -s, 0.0], [0.0, 0.0, -1.0]])

    # quarter-turn gauge rotation makes sigma real and equal to lam
    gauge = TriadField(metric=gmetric, frame=base_frame, name="standard-flat-gauge").rotated(
        np.pi / 4.0
    )

    identity = IsometryMap(
        stages=(IsometryStage(lambda p: p, gmetric, form, "identity"),),
        target_name="standard flat model",
    )

    return NamedExample(
        kind="standard-flat",
        lam=lam,
        coordinates=("x", "y", "z"),
        metric=gmetric,
        contact=contact,
        grid_ranges=((-1.0, 1.0), (-1.0, 1.0), (-1.0, 1.0)),
        gauge_frame=gauge,
        spin_closed_form=_constant_spin(lam),
        isometry=identity,
    )


# ---------------------------------------------------------------------------
# round sphere of radius 1/lam in spherical chart coordinates
# ---------------------------------------------------------------------------


def round_sphere(lam: float = 1.0) -> NamedExample:
    lam = float(lam)
    il2 = 1.0 / lam**2

    def domain(p):
        return (
            1e-3 < p[0] < np.pi - 1e-3
            and 1e-3 < p[1] < np.pi - 1e-3
        )

    def matrix(p):
        sr, st = np.sin(p[0]), np.sin(p[1])
        return il2 * np.diag([1.0, sr**2, sr**2 * st**2])

    def d_matrix(p):
        sr, st = np.sin(p[0]), np.sin(p[1])
        s2r, s2t = np.sin(2 * p[0]), np.sin(2 * p[1])
        d = np.zeros((3, 3, 3))
        d[0, 1, 1] = il2 * s2r
        d[0, 2, 2] = il2 * s2r * st**2
        d[1, 2, 2] = il2 * sr**2 * s2t
        return d

    def d2_matrix(p):
        sr, st = np.sin(p[0]), np.sin(p[1])
        c2r, c2t = np.cos(2 * p[0]), np.cos(2 * p[1])
        s2r, s2t = np.sin(2 * p[0]), np.sin(2 * p[1])
        d2 = np.zeros((3, 3, 3, 3))
        d2[0, 0, 1, 1] = il2 * 2 * c2r
        d2[0, 0, 2, 2] = il2 * 2 * c2r * st**2
        d2[0, 1, 2, 2] = d2[1, 0, 2, 2] = il2 * s2r * s2t
        d2[1, 1, 2, 2] = il2 * sr**2 * 2 * c2t
        return d2

    gmetric = MetricField(matrix=matrix, d_matrix=d_matrix, d2_matrix=d2_matrix, domain=domain, name="round-sphere")

    def alpha(p):
        sr, cr = np.sin(p[0]), np.cos(p[0])
        st, ct = np.sin(p[1]), np.cos(p[1])
        return np.array([-ct, cr * sr * st, -(sr**2) * st**2]) / lam

    def dalpha(p):
        sr, cr = np.sin(p[0]), np.cos(p[0])
        st, ct = np.sin(p[1]), np.cos(p[1])
        d = np.zeros((3, 3))
        d[0, 1] = np.cos(2 * p[0]) * st / lam
        d[0, 2] = -np.sin(2 * p[0]) * st**2 / lam
        d[1, 0] = st / lam
        d[1, 1] = cr * sr * ct / lam
        d[1, 2] = -(sr**2) * np.sin(2 * p[1]) / lam
        return d

    form = OneFormField(components=alpha, d_components=dalpha, domain=domain, name="round-sphere")
    contact = ContactStructure(alpha=form, lam=lam, metric=gmetric)

    identity = IsometryMap(
        stages=(IsometryStage(lambda p: p, gmetric, form, "identity"),),
        target_name="round sphere model",
    )

    margin = 0.4
    return NamedExample(
        kind="round-sphere",
        lam=lam,
        coordinates=("rho", "theta", "phi"),
        metric=gmetric,
        contact=contact,
        grid_ranges=((margin, np.pi - margin), (margin, np.pi - margin), (0.0, 1.5)),
        isometry=identity,
    )


# ---------------------------------------------------------------------------
# flat family with b0 = 0: free function f(u)
# ---------------------------------------------------------------------------


def flat_b0zero(lam: float = 1.0, f=(0.0,)) -> NamedExample:
    lam = float(lam)
    fpoly = as_polynomial(f)
    fprime = fpoly.deriv()
    fsecond = fprime.deriv()

    def a0(u, v):
        return -(lam**2) * v + fpoly(u)

    def matrix(p):
        r, u, v = p
        a = a0(u, v)
        b = lam**2 * r**2 - lam * r + 0.5
        c = -0.5 * (2 * lam**2 * r - lam)
        return np.array([[1.0, -a, 0.0], [-a, b + a**2, c], [0.0, c, lam**2]])

    def d_matrix(p):
        r, u, v = p
        a = a0(u, v)
        fp = fprime(u)
        d = np.zeros((3, 3, 3))
        d[0, 1, 1] = 2 * lam**2 * r - lam
        d[0, 1, 2] = d[0, 2, 1] = -(lam**2)
        d[1, 0, 1] = d[1, 1, 0] = -fp
        d[1, 1, 1] = 2 * a * fp
        d[2, 0, 1] = d[2, 1, 0] = lam**2
        d[2, 1, 1] = -2 * lam**2 * a
        return d

    def d2_matrix(p):
        r, u, v = p
        a = a0(u, v)
        fp, fpp = fprime(u), fsecond(u)
        d2 = np.zeros((3, 3, 3, 3))
        d2[0, 0, 1, 1] = 2 * lam**2
        d2[1, 1, 0, 1] = d2[1, 1, 1, 0] = -fpp
        d2[1, 1, 1, 1] = 2 * (fp**2 + a * fpp)
        d2[1, 2, 1, 1] = d2[2, 1, 1, 1] = -2 * lam**2 * fp
        d2[2, 2, 1, 1] = 2 * lam**4
        return d2

    gmetric = MetricField(matrix=matrix, d_matrix=d_matrix, d2_matrix=d2_matrix, name="flat-b0zero")

    def alpha(p):
        return np.array([1.0, -a0(p[1], p[2]), 0.0])

    def dalpha(p):
        d = np.zeros((3, 3))
        d[1, 1] = -fprime(p[1])
        d[2, 1] = lam**2
        return d

    form = OneFormField(components=alpha, d_components=dalpha, name="flat-b0zero")
    contact = ContactStructure(alpha=form, lam=lam, metric=gmetric, orientation=-1)

    def zplus(p):
        r, u, v = p
        return np.array(
            [a0(u, v) * (1 - 1j), 1 - 1j, 1j / lam + (1 - 1j) * r], dtype=complex
        )

    gauge = TriadField.from_complex_field(lambda p: np.array([1.0, 0.0, 0.0]), zplus, gmetric, name="flat-b0zero-gauge")

    def cos_f_integral(u):
        val, _ = quad(lambda s: np.cos(lam * s) * fprime(s), 0.0, u, epsabs=1e-12, epsrel=1e-12)
        return val

    def sin_f_integral(u):
        val, _ = quad(lambda s: np.sin(lam * s) * fprime(s), 0.0, u, epsabs=1e-12, epsrel=1e-12)
        return val

    def forward(p):
        r, u, v = p
        shift = r - 1.0 / (2 * lam)
        swing = lam * v - fpoly(u) / lam
        su, cu = np.sin(lam * u), np.cos(lam * u)
        x = shift * su - swing * cu - cos_f_integral(u) / lam
        y = shift * cu + swing * su + sin_f_integral(u) / lam
        return np.array([x, y, 0.5 * u])

    target = standard_flat(lam)
    isometry = IsometryMap(
        stages=(IsometryStage(forward, target.metric, target.contact.alpha, "to-standard-flat"),),
        target_name="standard flat model",
    )

    def reduced(p):
        r, u, v = p
        omega = a0(u, v) * (1 - 1j)
        d_omega = np.array([0.0, fprime(u) * (1 - 1j), -(lam**2) * (1 - 1j)], dtype=complex)
        eta_u = 1 - 1j
        d_eta_u = np.zeros(3, dtype=complex)
        eta_v = 1j / lam + (1 - 1j) * r
        d_eta_v = np.array([1 - 1j, 0.0, 0.0], dtype=complex)
        return _flat_reduced_residuals(lam, omega, d_omega, eta_u, d_eta_u, eta_v, d_eta_v)

    def solution(p):
        r, u, v = p
        return {
            "a0": a0(u, v),
            "Omega": a0(u, v) * (1 - 1j),
            "eta_u": 1 - 1j,
            "eta_v": 1j / lam + (1 - 1j) * r,
        }

    return NamedExample(
        kind="flat-b0zero",
        lam=lam,
        coordinates=("r", "u", "v"),
        metric=gmetric,
        contact=contact,
        grid_ranges=((-0.8, 0.8), (-1.0, 1.0), (-1.0, 1.0)),
        params={"f": fpoly},
        gauge_frame=gauge,
        spin_closed_form=_constant_spin(lam),
        isometry=isometry,
        reduced_residuals=reduced,
        solution_data=solution,
    )


def _flat_reduced_residuals(lam, omega, d_omega, eta_u, d_eta_u, eta_v, d_eta_v):
    """Residuals of the reduced flat system for closed-form Omega and eta.

    D X = dX/dr; delta X = Omega dX/dr + eta^u dX/du + eta^v dX/dv.
    Equations: D Omega = -i lam Omega + lam conj(Omega) (same for eta^a),
    delta conj(Omega) - deltabar Omega = -2 i lam, and
    delta conj(eta^a) - deltabar eta^a = 0.
    """

    def delta(value_derivs):
        return omega * value_derivs[0] + eta_u * value_derivs[1] + eta_v * value_derivs[2]

    def deltabar(value_derivs):
        return (
            np.conj(omega) * value_derivs[0]
            + np.conj(eta_u) * value_derivs[1]
            + np.conj(eta_v) * value_derivs[2]
        )

    res = [
        d_omega[0] + 1j * lam * omega - lam * np.conj(omega),
        d_eta_u[0] + 1j * lam * eta_u - lam * np.conj(eta_u),
        d_eta_v[0] + 1j * lam * eta_v - lam * np.conj(eta_v),
        delta(np.conj(d_omega)) - deltabar(d_omega) + 2j * lam,
        delta(np.conj(d_eta_u)) - deltabar(d_eta_u),
        delta(np.conj(d_eta_v)) - deltabar(d_eta_v),
    ]
    return np.abs(np.array(res))


# ---------------------------------------------------------------------------
# flat family with b0 != 0: free functions D(v), E(v)
# ---------------------------------------------------------------------------


def flat_b0nonzero(lam: float = 1.0, d=(1.0,), e=(0.0,)) -> NamedExample:
    lam = float(lam)
    dpoly, epoly = as_polynomial(d), as_polynomial(e)
    if np.allclose(dpoly.coef, 0.0) and np.allclose(epoly.coef, 0.0):
        raise ValueError("D and E must not both vanish identically")
    dprime, eprime = dpoly.deriv(), epoly.deriv()
    dsecond, esecond = dprime.deriv(), eprime.deriv()
    dint, eint = dpoly.integ(), epoly.integ()

    def trig(p):
        u, v = p[1], p[2]
        su, cu = np.sin(lam * u), np.cos(lam * u)
        x = dpoly(v) * su + epoly(v) * cu   # 1/g of the construction
        n = dpoly(v) * cu - epoly(v) * su
        return x, n, su, cu

    def domain(p):
        # one connected component of {D sin + E cos != 0}; the chart orientation
        # flips across the zero locus, so an instance covers X > 0 only
        x, _, _, _ = trig(p)
        return x > 1e-3

    def matrix(p):
        r = p[0]
        x, n, _, _ = trig(p)
        b = lam**2 * r**2 - lam * r + 0.5
        c = -0.5 * x * (2 * lam**2 * r - lam)
        g22 = lam**2 * (dpoly(p[2]) ** 2 + epoly(p[2]) ** 2)
        return np.array([[1.0, 0.0, lam * n], [0.0, b, c], [lam * n, c, g22]])

    def d_matrix(p):
        r, u, v = p
        x, n, su, cu = trig(p)
        xu, nu = lam * n, -lam * x
        xv = dprime(v) * su + eprime(v) * cu
        nv = dprime(v) * cu - eprime(v) * su
        d = np.zeros((3, 3, 3))
        d[0, 1, 1] = 2 * lam**2 * r - lam
        d[0, 1, 2] = d[0, 2, 1] = -(lam**2) * x
        d[1, 0, 2] = d[1, 2, 0] = lam * nu
        d[1, 1, 2] = d[1, 2, 1] = -0.5 * xu * (2 * lam**2 * r - lam)
        d[2, 0, 2] = d[2, 2, 0] = lam * nv
        d[2, 1, 2] = d[2, 2, 1] = -0.5 * xv * (2 * lam**2 * r - lam)
        d[2, 2, 2] = 2 * lam**2 * (dpoly(v) * dprime(v) + epoly(v) * eprime(v))
        return d

    def d2_matrix(p):
        r, u, v = p
        x, n, su, cu = trig(p)
        xv = dprime(v) * su + eprime(v) * cu
        nv = dprime(v) * cu - eprime(v) * su
        xvv = dsecond(v) * su + esecond(v) * cu
        nvv = dsecond(v) * cu - esecond(v) * su
        slope = 2 * lam**2 * r - lam
        d2 = np.zeros((3, 3, 3, 3))

        def put(i, j, a, b, val):
            d2[i, j, a, b] = d2[i, j, b, a] = d2[j, i, a, b] = d2[j, i, b, a] = val

        put(0, 0, 1, 1, 2 * lam**2)
        put(0, 1, 1, 2, -(lam**3) * n)
        put(0, 2, 1, 2, -(lam**2) * xv)
        put(1, 1, 0, 2, -(lam**3) * n)
        put(1, 1, 1, 2, 0.5 * lam**2 * x * slope)
        put(1, 2, 0, 2, -(lam**2) * xv)
        put(1, 2, 1, 2, -0.5 * lam * nv * slope)
        put(2, 2, 0, 2, lam * nvv)
        put(2, 2, 1, 2, -0.5 * xvv * slope)
        d2[2, 2, 2, 2] = 2 * lam**2 * (
            dprime(v) ** 2 + dpoly(v) * dsecond(v) + eprime(v) ** 2 + epoly(v) * esecond(v)
        )
        return d2

    gmetric = MetricField(
        matrix=matrix, d_matrix=d_matrix, d2_matrix=d2_matrix, domain=domain, name="flat-b0nonzero"
    )

    def alpha(p):
        _, n, _, _ = trig(p)
        return np.array([1.0, 0.0, lam * n])

    def dalpha(p):
        x, _, su, cu = trig(p)
        nv = dprime(p[2]) * cu - eprime(p[2]) * su
        d = np.zeros((3, 3))
        d[1, 2] = -(lam**2) * x
        d[2, 2] = lam * nv
        return d

    form = OneFormField(components=alpha, d_components=dalpha, domain=domain, name="flat-b0nonzero")
    contact = ContactStructure(alpha=form, lam=lam, metric=gmetric, orientation=-1)

    def zplus(p):
        r = p[0]
        x, n, _, _ = trig(p)
        b0 = -lam * n / x
        phase = 1j / lam + (1 - 1j) * r
        return np.array([b0 * phase, 1 - 1j, phase / x], dtype=complex)

    gauge = TriadField.from_complex_field(lambda p: np.array([1.0, 0.0, 0.0]), zplus, gmetric, name="flat-b0nonzero-gauge")

    def forward(p):
        r, u, v = p
        shift = r - 1.0 / (2 * lam)
        return np.array(
            [
                shift * np.sin(lam * u) - lam * eint(v),
                shift * np.cos(lam * u) + lam * dint(v),
                0.5 * u,
            ]
        )

    target = standard_flat(lam)
    isometry = IsometryMap(
        stages=(IsometryStage(forward, target.metric, target.contact.alpha, "to-standard-flat"),),
        target_name="standard flat model",
        domain=domain,
    )

    def reduced(p):
        r, u, v = p
        x, n, su, cu = trig(p)
        xu, nu = lam * n, -lam * x
        xv = dprime(v) * su + eprime(v) * cu
        nv = dprime(v) * cu - eprime(v) * su
        b0 = -lam * n / x
        b0_u = -lam * (nu * x - n * xu) / x**2
        b0_v = -lam * (nv * x - n * xv) / x**2
        g_big = 1.0 / x
        g_u, g_v = -xu / x**2, -xv / x**2
        phase = 1j / lam + (1 - 1j) * r

        omega = b0 * phase
        d_omega = np.array([b0 * (1 - 1j), b0_u * phase, b0_v * phase], dtype=complex)
        eta_u = 1 - 1j
        d_eta_u = np.zeros(3, dtype=complex)
        eta_v = g_big * phase
        d_eta_v = np.array([g_big * (1 - 1j), g_u * phase, g_v * phase], dtype=complex)

        base = _flat_reduced_residuals(lam, omega, d_omega, eta_u, d_eta_u, eta_v, d_eta_v)
        extra = np.abs(np.array([b0_u - lam**2 - b0**2, b0 - g_u / g_big]))
        return np.concatenate([base, extra])

    def solution(p):
        r, u, v = p
        x, n, _, _ = trig(p)
        b0 = -lam * n / x
        phase = 1j / lam + (1 - 1j) * r
        return {
            "one_over_g": x,
            "b0": b0,
            "Omega": b0 * phase,
            "eta_u": 1 - 1j,
            "eta_v": phase / x,
        }

    return NamedExample(
        kind="flat-b0nonzero",
        lam=lam,
        coordinates=("r", "u", "v"),
        metric=gmetric,
        contact=contact,
        grid_ranges=((-0.8, 0.8), (-1.0, 1.0), (-1.0, 1.0)),
        params={"D": dpoly, "E": epoly},
        gauge_frame=gauge,
        spin_closed_form=_constant_spin(lam),
        isometry=isometry,
        reduced_residuals=reduced,
        solution_data=solution,
    )


# ---------------------------------------------------------------------------
# elliptic family: free function f(u)
# ---------------------------------------------------------------------------


def elliptic(lam: float = 1.0, f=(0.0,)) -> NamedExample:
    lam = float(lam)
    fpoly = as_polynomial(f)
    fprime = fpoly.deriv()
    fint = fpoly.integ()

    def aux(u, v):
        w2 = 1.0 + u**2
        w = np.sqrt(w2)
        s = 1.0 + u**2 + v**2
        t = np.arctan(v / w)
        return w2, w, s, t

    def omega0(u, v):
        w2, w, s, t = aux(u, v)
        return -(v / w2 + s * t / w**3 + fpoly(u) * s) / SQ2

    def omega0_v(u, v):
        w2, w, s, t = aux(u, v)
        return -(2.0 / w2 + 2.0 * v * t / w**3 + 2.0 * v * fpoly(u)) / SQ2

    def omega0_u(u, v):
        w2, w, s, t = aux(u, v)
        return -(
            -3.0 * u * v / w2**2
            - u * (w2 + 3.0 * v**2) * t / w**5
            + fprime(u) * s
            + 2.0 * u * fpoly(u)
        ) / SQ2

    def matrix(p):
        _, u, v = p
        s = 1.0 + u**2 + v**2
        om = omega0(u, v)
        g01 = -SQ2 * om / (lam * s)
        g11 = (2.0 * om**2 + 1.0) / (lam**2 * s**2)
        g22 = 1.0 / (lam**2 * s**2)
        return np.array([[1.0, g01, 0.0], [g01, g11, 0.0], [0.0, 0.0, g22]])

    def d_matrix(p):
        _, u, v = p
        s = 1.0 + u**2 + v**2
        om = omega0(u, v)
        d = np.zeros((3, 3, 3))
        for axis, (om_q, s_q) in ((1, (omega0_u(u, v), 2 * u)), (2, (omega0_v(u, v), 2 * v))):
            g01_q = -SQ2 * (om_q * s - om * s_q) / (lam * s**2)
            g11_q = (4.0 * om * om_q - (2.0 * om**2 + 1.0) * 2.0 * s_q / s) / (lam**2 * s**2)
            g22_q = -2.0 * s_q / (lam**2 * s**3)
            d[axis, 0, 1] = d[axis, 1, 0] = g01_q
            d[axis, 1, 1] = g11_q
            d[axis, 2, 2] = g22_q
        return d

    gmetric = MetricField(matrix=matrix, d_matrix=d_matrix, name="elliptic")

    def alpha(p):
        _, u, v = p
        s = 1.0 + u**2 + v**2
        return np.array([1.0, -SQ2 * omega0(u, v) / (lam * s), 0.0])

    def dalpha(p):
        d = np.zeros((3, 3))
        d[1:, :] = d_matrix(p)[1:, 0, :]
        return d

    form = OneFormField(components=alpha, d_components=dalpha, name="elliptic")
    contact = ContactStructure(alpha=form, lam=lam, metric=gmetric, orientation=-1)

    def p0(u, v):
        return lam * (1.0 + u**2 + v**2) / SQ2

    def zplus(p):
        r, u, v = p
        return np.exp(-1j * lam * r) * np.array(
            [omega0(u, v), p0(u, v), 1j * p0(u, v)], dtype=complex
        )

    gauge = TriadField.from_complex_field(lambda p: np.array([1.0, 0.0, 0.0]), zplus, gmetric, name="elliptic-gauge")

    def tau0(u, v):
        return SQ2 * lam * (u - 1j * v) - 1j * lam * omega0(u, v)

    def spin_closed(p):
        r, u, v = p
        phase = np.exp(1j * lam * r)
        tau = tau0(u, v) * phase
        tau_r = 1j * lam * tau
        tau_u = phase * (SQ2 * lam - 1j * lam * omega0_u(u, v))
        tau_v = phase * (-1j * SQ2 * lam - 1j * lam * omega0_v(u, v))
        zp = zplus(p)
        dtau_coords = np.array([tau_r, tau_u, tau_v])
        d_tau = np.array(
            [dtau_coords[0], zp @ dtau_coords, np.conj(zp) @ dtau_coords]
        )
        zeros = np.zeros(3, dtype=complex)
        s = SpinCoefficients(
            kappa=0j,
            rho=1j * lam,
            sigma=0j,
            tau=complex(tau),
            epsilon=0j,
            gamma=np.zeros((3, 3, 3), dtype=complex),
        )
        ds = SpinDerivatives(kappa=zeros, rho=zeros, sigma=zeros, tau=d_tau, epsilon=zeros)
        return s, ds

    def axis_clear(p):
        return np.hypot(p[1], p[2]) > 1e-3

    def stage1(p):
        r, u, v = p
        w = np.sqrt(1.0 + u**2)
        rho_t = lam * r + fint(u) + (u / w) * np.arctan(v / w)
        theta_t = np.arctan(np.hypot(u, v))
        phi_t = np.arctan2(v, u)
        return np.array([rho_t, theta_t, phi_t])

    def tilde_domain(q):
        return 1e-3 < q[1] < 0.5 * np.pi - 1e-3

    def tilde_matrix(q):
        s2 = np.sin(q[1]) ** 2
        return np.array([[1.0, 0.0, -s2], [0.0, 1.0, 0.0], [-s2, 0.0, s2]]) / lam**2

    def tilde_alpha(q):
        return np.array([1.0, 0.0, -np.sin(q[1]) ** 2]) / lam

    tilde_metric = MetricField(matrix=tilde_matrix, domain=tilde_domain, name="elliptic-intermediate")
    tilde_form = OneFormField(components=tilde_alpha, domain=tilde_domain, name="elliptic-intermediate")

    def stage2(q):
        # phi carries the opposite sign to the rho_t - phi_t reading: the
        # reflected branch is the one whose image form matches the round
        # model's contact display
        rho_t, theta_t, phi_t = q
        ct = np.cos(theta_t)
        rho = np.arccos(np.clip(ct * np.sin(rho_t), -1.0, 1.0))
        sr = np.sin(rho)
        theta = np.arccos(np.clip(ct * np.cos(rho_t) / sr, -1.0, 1.0))
        return np.array([rho, theta, phi_t - rho_t])

    target = round_sphere(lam)
    isometry = IsometryMap(
        stages=(
            IsometryStage(stage1, tilde_metric, tilde_form, "to-twisted-product"),
            IsometryStage(stage2, target.metric, target.contact.alpha, "to-round-sphere"),
        ),
        target_name="round sphere model",
        domain=axis_clear,
    )

    def reduced(p):
        _, u, v = p
        w2, w, s, t = aux(u, v)
        om = omega0(u, v)
        om_u, om_v = omega0_u(u, v), omega0_v(u, v)
        pp = p0(u, v)
        tz = tau0(u, v)
        tau_u = SQ2 * lam - 1j * lam * om_u
        tau_v = -1j * SQ2 * lam - 1j * lam * om_v
        dzb_tau = 0.5 * (tau_u + 1j * tau_v)
        fin1 = (
            2.0 * pp * (dzb_tau + np.conj(dzb_tau))
            + (om * tz - om * np.conj(tz)) * 1j * lam
            - 2.0 * tz * np.conj(tz)
            - 2.0 * lam**2
        )
        fin2 = (
            2.0 * pp * 1j * om_v
            + 2.0 * om**2 * lam * 1j
            - np.conj(tz) * om
            + tz * om
            + 2j * lam
        )
        fin3 = SQ2 * lam * (u + 1j * v) - np.conj(tz) + 1j * lam * om
        # dd bar of ln P0 from the analytic second derivatives of ln(1+u^2+v^2)
        dd_ln = 0.25 * ((2.0 * s - 4.0 * u**2) / s**2 + (2.0 * s - 4.0 * v**2) / s**2)
        liouville = 2.0 * pp**2 * dd_ln - lam**2
        ode = 0.5 * s * om_v - v * om + 1.0 / SQ2
        return np.abs(np.array([fin1, fin2, fin3, liouville, ode]))

    def solution(p):
        r, u, v = p
        return {
            "P0": p0(u, v),
            "Omega0": omega0(u, v),
            "tau0": tau0(u, v),
            "Omega": omega0(u, v) * np.exp(-1j * lam * r),
            "tau": tau0(u, v) * np.exp(1j * lam * r),
        }

    return NamedExample(
        kind="elliptic",
        lam=lam,
        coordinates=("r", "u", "v"),
        metric=gmetric,
        contact=contact,
        grid_ranges=((-0.5, 0.5), (0.15, 1.1), (0.15, 1.1)),
        params={"f": fpoly},
        gauge_frame=gauge,
        spin_closed_form=spin_closed,
        isometry=isometry,
        reduced_residuals=reduced,
        solution_data=solution,
    )


EXAMPLE_BUILDERS: Dict[str, Callable[..., NamedExample]] = {
    "standard-flat": standard_flat,
    "round-sphere": round_sphere,
    "flat-b0zero": flat_b0zero,
    "flat-b0nonzero": flat_b0nonzero,
    "elliptic": elliptic,
}


def make_example(name: str, lam: float = 1.0, f=None, d=None, e=None) -> NamedExample:
    """Build a named example from CLI-style parameters."""
    if name not in EXAMPLE_BUILDERS:
        raise KeyError(f"unknown example {name!r}; choose from {sorted(EXAMPLE_BUILDERS)}")
    if name == "flat-b0zero":
        return flat_b0zero(lam, f if f is not None else (0.0,))
    if name == "flat-b0nonzero":
        return flat_b0nonzero(lam, d if d is not None else (1.0,), e if e is not None else (0.0,))
    if name == "elliptic":
        return elliptic(lam, f if f is not None else (0.0,))
    return EXAMPLE_BUILDERS[name](lam)


# ---------------------------------------------------------------------------
# classifier and residual drivers
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class BranchResult:
    kind: str  # "elliptic" | "flat" | "none"
    sigma_abs: Optional[float]

    @property
    def admits_structure(self) -> bool:
        return self.kind in ("elliptic", "flat")


def einstein_branch(lam: float, scalar_curvature: float, rtol: float = 1e-9) -> BranchResult:
    """Classify which space form admits an adapted structure with twist lam.

    Elliptic iff R = 6 lam^2 (zero shear); flat iff R = 0 (shear lam); no
    solution otherwise, including every R < 0.  The would-be shear
    sqrt(lam^2 - R/6) is reported whenever its radicand is nonnegative.
    """
    if not lam > 0.0:
        raise ValueError("lambda must be positive")
    scale = 6.0 * lam**2
    radicand = lam**2 - scalar_curvature / 6.0
    sigma = float(np.sqrt(radicand)) if radicand >= 0.0 else None
    if abs(scalar_curvature - scale) <= rtol * scale:
        return BranchResult(kind="elliptic", sigma_abs=0.0)
    if abs(scalar_curvature) <= rtol * scale:
        return BranchResult(kind="flat", sigma_abs=float(lam))
    return BranchResult(kind="none", sigma_abs=sigma)


def hyperbolic_obstruction(lam: float, scalar_curvature: float) -> Dict[str, float]:
    """Irreducible residuals of the two reduced-system branches.

    With rho = i lam the zero-shear branch forces R = 6 lam^2 and the
    zero-tau branch forces R = 0; for R < 0 both residuals stay positive, so
    the reduced equations cannot close.
    """
    if not lam > 0.0:
        raise ValueError("lambda must be positive")
    return {
        "zero_shear_branch": abs(scalar_curvature - 6.0 * lam**2) / 6.0,
        "zero_tau_branch": abs(scalar_curvature) / 3.0,
    }


@dataclass(frozen=True)
class PullbackResiduals:
    metric: float
    form: float
    evaluated: int
    skipped: int


def pullback_residuals(
    example: NamedExample,
    points: Sequence[np.ndarray],
    cfg: DiffConfig = DEFAULT_CONFIG,
) -> PullbackResiduals:
    """Max pullback residuals of the target metric and contact form over points."""
    iso = example.isometry
    if iso is None:
        raise ValueError(f"{example.kind} has no isometry map")
    worst_metric = 0.0
    worst_form = 0.0
    used = 0
    skipped = 0
    for p in points:
        if not iso.admissible(p):
            skipped += 1
            continue
        gm = pullback_metric(iso.forward, iso.target_metric, p, cfg)
        fm = pullback_oneform(iso.forward, iso.target_form, p, cfg)
        worst_metric = max(worst_metric, float(np.max(np.abs(gm - example.metric(p)))))
        worst_form = max(worst_form, float(np.max(np.abs(fm - example.contact.alpha(p)))))
        used += 1
    if used == 0:
        raise DomainViolationError("no admissible points for the pullback check")
    return PullbackResiduals(metric=worst_metric, form=worst_form, evaluated=used, skipped=skipped)


def stage_residuals(
    example: NamedExample,
    points: Sequence[np.ndarray],
    cfg: DiffConfig = DEFAULT_CONFIG,
):
    """Per-stage pullback residuals; stage k pulls its target back to stage k-1."""
    iso = example.isometry
    if iso is None:
        raise ValueError(f"{example.kind} has no isometry map")
    sources = [(example.metric, example.contact.alpha)] + [
        (st.metric, st.form) for st in iso.stages[:-1]
    ]
    results = []
    for k, stage in enumerate(iso.stages):
        src_metric, src_form = sources[k]
        worst_metric = 0.0
        worst_form = 0.0
        used = 0
        for p in points:
            q = _as_point(p)
            for earlier in iso.stages[:k]:
                q = np.asarray(earlier.forward(q), dtype=float).reshape(3)
            image = np.asarray(stage.forward(q), dtype=float).reshape(3)
            if not (stage.metric.admissible(image) and src_metric.admissible(q)):
                continue
            gm = pullback_metric(stage.forward, stage.metric, q, cfg)
            fm = pullback_oneform(stage.forward, stage.form, q, cfg)
            worst_metric = max(worst_metric, float(np.max(np.abs(gm - src_metric(q)))))
            worst_form = max(worst_form, float(np.max(np.abs(fm - src_form(q)))))
            used += 1
        results.append(
            {"stage": stage.name, "metric": worst_metric, "form": worst_form, "points": used}
        )
    return results

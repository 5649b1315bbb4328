"""Jet-level geometry of immersed surfaces in the slope-metric 3-space.

Everything is built from a first-order jet z, the 3x2 matrix of ambient
partials of an immersion, and, where curvature enters, a symmetric
second-order jet. The induced area density is

    F(z) = 2*C**3 / (2*C**2 + E),   C = sqrt(det A),   A = z^T z,

where the anisotropy scalar

    E = b**2 * sum_k (z[k,0]*z[2,1] - z[k,1]*z[2,0])**2
      = b**2 * det(A) * (A^-1 quadratic form on the third ambient row)

measures how the tangent plane leans against the distinguished third
axis. The module provides closed-form first and second z-derivatives of
F, dual-number and finite-difference oracles for both, the contraction
whose vanishing characterizes minimal immersions, and its
cleared-denominator bracket (the polynomial form the PDE modules reduce
to explicit coefficients).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import dual
from .errors import DegenerateJetError, DegenerateTransversalError, DomainError

__all__ = [
    "ImmersionJet1",
    "ImmersionJet2",
    "AreaJetScalars",
    "gram",
    "e_scalar",
    "area_scalars",
    "area_integrand",
    "area_integrand_grad",
    "area_integrand_hess",
    "area_integrand_grad_dual",
    "area_integrand_hess_dual",
    "area_integrand_grad_central",
    "area_integrand_hess_central",
    "default_transversal",
    "mean_curvature_residual",
    "mean_curvature_bracket",
]

# 2x2 Levi-Civita array and the third ambient basis vector.
_EPS2 = np.array([[0.0, 1.0], [-1.0, 0.0]])
_E3 = np.array([0.0, 0.0, 1.0])

# Scale-aware degeneracy guard: det(A) <= DEGENERACY_FACTOR * trace(A)**2
# is treated as a failed immersion.
DEGENERACY_FACTOR = 1e-14


@dataclass(frozen=True)
class ImmersionJet1:
    """First-order jet: z[i, e] = d(phi^i)/d(x^e), i ambient, e surface.

    Operations that divide by the area scalar require rank(z) == 2,
    enforced there through the determinant guard, not at construction.
    """

    z: np.ndarray

    def __post_init__(self):
        z = np.array(self.z, dtype=float)
        if z.shape != (3, 2):
            raise DomainError(f"jet must be 3x2, got shape {z.shape}")
        if not np.all(np.isfinite(z)):
            raise DomainError("jet entries must be finite")
        z.setflags(write=False)
        object.__setattr__(self, "z", z)

    @classmethod
    def graph(cls, f1: float, f2: float) -> "ImmersionJet1":
        """Jet of the graph (x1, x2) -> (x1, x2, f) with gradient (f1, f2)."""
        return cls(np.array([[1.0, 0.0], [0.0, 1.0], [f1, f2]]))

    @classmethod
    def tilted(cls, f1: float, f2: float, frame_matrix) -> "ImmersionJet1":
        """Jet of a graph over the plane spanned by the frame's first two columns.

        The immersion is x1*m[:,0] + x2*m[:,1] + f*m[:,2], so the tangent
        columns are z[:, e] = m[:, e] + f_e * m[:, 2].
        """
        m = np.asarray(frame_matrix, dtype=float)
        return cls(m[:, :2] + np.outer(m[:, 2], [f1, f2]))


@dataclass(frozen=True)
class ImmersionJet2:
    """Second-order jet: second[i, e, h] = d2(phi^i)/d(x^e)d(x^h), symmetric in (e, h)."""

    second: np.ndarray

    def __post_init__(self):
        s = np.array(self.second, dtype=float)
        if s.shape != (3, 2, 2):
            raise DomainError(f"second-order jet must be 3x2x2, got shape {s.shape}")
        if not np.all(np.isfinite(s)):
            raise DomainError("second-order jet entries must be finite")
        if not np.array_equal(s[:, 0, 1], s[:, 1, 0]):
            raise DomainError("second-order jet must be exactly symmetric in (e, h)")
        s.setflags(write=False)
        object.__setattr__(self, "second", s)

    @classmethod
    def zero(cls) -> "ImmersionJet2":
        return cls(np.zeros((3, 2, 2)))

    @classmethod
    def graph(cls, h11: float, h12: float, h22: float) -> "ImmersionJet2":
        s = np.zeros((3, 2, 2))
        s[2] = [[h11, h12], [h12, h22]]
        return cls(s)

    @classmethod
    def tilted(cls, h11: float, h12: float, h22: float, frame_matrix) -> "ImmersionJet2":
        m = np.asarray(frame_matrix, dtype=float)
        hess = np.array([[h11, h12], [h12, h22]])
        return cls(np.einsum("i,eh->ieh", m[:, 2], hess))


@dataclass(frozen=True)
class AreaJetScalars:
    """Pointwise scalars of the area density at one jet."""

    gram: np.ndarray  # A = z^T z, symmetric positive definite
    area: float  # C = sqrt(det A) > 0
    anisotropy: float  # E >= 0
    integrand: float  # 2*area**3 / (2*area**2 + anisotropy)

    @property
    def anisotropy_ratio(self) -> float:
        """E / C**2, the dimensionless intermediate of the density formula."""
        return self.anisotropy / self.area**2


def gram(j: ImmersionJet1) -> np.ndarray:
    """Gram matrix A = z^T z of the jet columns (2x2, exactly symmetric)."""
    z = j.z
    # one off-diagonal dot product reused for both entries: bitwise symmetry
    a01 = float(z[:, 0] @ z[:, 1])
    return np.array(
        [[float(z[:, 0] @ z[:, 0]), a01], [a01, float(z[:, 1] @ z[:, 1])]]
    )


def _det2(a):
    return a[0, 0] * a[1, 1] - a[0, 1] * a[1, 0]


def _adj2(a):
    return np.array([[a[1, 1], -a[0, 1]], [-a[1, 0], a[0, 0]]])


def _require_nondegenerate(a) -> float:
    det = _det2(a)
    tr = a[0, 0] + a[1, 1]
    if det <= DEGENERACY_FACTOR * tr * tr:
        raise DegenerateJetError(
            f"gram determinant {det} fails the immersion guard "
            f"(threshold {DEGENERACY_FACTOR} * trace**2)"
        )
    return float(det)


def _d_vector(z):
    # d[k] = z[k,0]*z[2,1] - z[k,1]*z[2,0]; d[2] == 0 identically.
    return z[:, 0] * z[2, 1] - z[:, 1] * z[2, 0]


def e_scalar(j: ImmersionJet1, b: float) -> float:
    """Anisotropy scalar E >= 0.

    Computed as b**2 times the squared length of the cross pattern between
    the jet columns and the third ambient row; identical to
    b**2 * det(A) * A^{eps eta} z3_eps z3_eta.
    """
    d = _d_vector(j.z)
    return float(b * b * (d @ d))


def area_integrand(j: ImmersionJet1, b: float) -> float:
    """Area density F = 2*C**3/(2*C**2 + E); equals C when b = 0."""
    a = gram(j)
    det = _require_nondegenerate(a)
    c = math.sqrt(det)
    e = e_scalar(j, b)
    return 2.0 * det * c / (2.0 * det + e)


def area_scalars(j: ImmersionJet1, b: float) -> AreaJetScalars:
    """Bundle (A, C, E, F) for one jet."""
    a = gram(j)
    det = _require_nondegenerate(a)
    c = math.sqrt(det)
    e = e_scalar(j, b)
    return AreaJetScalars(gram=a, area=c, anisotropy=e, integrand=2.0 * det * c / (2.0 * det + e))


def _grad_det(z, adj):
    return 2.0 * z @ adj


def _grad_e(z, b):
    d = _d_vector(z)
    m1 = np.array([z[2, 1], -z[2, 0]])
    ztd = z.T @ d
    m2 = np.array([-ztd[1], ztd[0]])
    return 2.0 * b * b * (np.outer(d, m1) + np.outer(_E3, m2))


def _hess_det(z, adj):
    # Exact Hessian of det(z^T z) as a polynomial in the jet entries,
    # assembled so the (3,2,3,2) array is bitwise symmetric (no matmul:
    # fused multiply-adds would break one-ulp antisymmetry).
    u = np.column_stack([-z[:, 1], z[:, 0]])
    cross = np.outer(z[:, 0], z[:, 1])
    cross = cross - cross.T  # u @ z.T, exactly antisymmetric
    t1 = 2.0 * np.einsum("ij,he->iejh", np.eye(3), adj)
    t2 = -2.0 * np.einsum("ih,je->iejh", u, u)
    t3 = 2.0 * np.einsum("eh,ij->iejh", _EPS2, cross)
    return t1 + t2 + t3


def _hess_e(z, b):
    d = _d_vector(z)
    m1 = np.array([z[2, 1], -z[2, 0]])
    u = z @ _EPS2
    # dz[k, i, e] = d(d_k)/d(z[i, e])
    dz = np.einsum("ki,e->kie", np.eye(3), m1) + np.einsum("ke,i->kie", u, _E3)
    t1 = np.einsum("kie,kjh->iejh", dz, dz)
    t2 = np.einsum("i,eh,j->iejh", d, _EPS2, _E3) + np.einsum(
        "i,eh,j->iejh", _E3, -_EPS2, d
    )
    return 2.0 * b * b * (t1 + t2)


def area_integrand_grad(j: ImmersionJet1, b: float) -> np.ndarray:
    """Closed-form gradient dF/dz as a 3x2 array.

    Assembled from the adjugate expansion of det A and the quadratic
    expansion of E; cross-checked against the dual-number and
    finite-difference oracles in the test suite.
    """
    z = j.z
    a = gram(j)
    det = _require_nondegenerate(a)
    adj = _adj2(a)
    c = math.sqrt(det)
    e = e_scalar(j, b)
    den = 2.0 * det + e
    dc = (z @ adj) / c
    de = _grad_e(z, b)
    return ((4.0 * det * det + 6.0 * det * e) * dc - 2.0 * det * c * de) / den**2


def area_integrand_hess(j: ImmersionJet1, b: float) -> np.ndarray:
    """Closed-form Hessian d2F/dz2 as a 6x6 array, flat index 2*i + e.

    Exactly symmetric by construction. The coefficient of the dC x dC
    dyad is (12*C*E**2 - 8*C**3*E)/(2*C**2+E)**3, which is what exact
    differentiation of the gradient produces.
    """
    z = j.z
    a = gram(j)
    det = _require_nondegenerate(a)
    adj = _adj2(a)
    c = math.sqrt(det)
    e = e_scalar(j, b)
    den = 2.0 * det + e

    dc = (z @ adj) / c
    de = _grad_e(z, b)
    ddet = _grad_det(z, adj)
    hc = _hess_det(z, adj) / (2.0 * c) - np.einsum("ie,jh->iejh", ddet, ddet) / (
        4.0 * c * det
    )
    he = _hess_e(z, b)

    cc = np.einsum("ie,jh->iejh", dc, dc)
    ce = np.einsum("ie,jh->iejh", dc, de) + np.einsum("ie,jh->iejh", de, dc)
    ee = np.einsum("ie,jh->iejh", de, de)

    h = (
        (4.0 * det * det + 6.0 * det * e) / den**2 * hc
        - 2.0 * det * c / den**2 * he
        + (12.0 * c * e * e - 8.0 * det * c * e) / den**3 * cc
        + (4.0 * det * det - 6.0 * det * e) / den**3 * ce
        + 4.0 * det * c / den**3 * ee
    )
    return h.reshape(6, 6)


def _flat_area_fun(b):
    """Area density on the flat jet vector [z00, z01, z10, z11, z20, z21].

    Pure arithmetic plus dual.sqrt, so floats, numpy arrays and Duals all
    pass through; this is the oracle the closed forms are checked against.
    """

    def fun(v):
        a00 = v[0] * v[0] + v[2] * v[2] + v[4] * v[4]
        a11 = v[1] * v[1] + v[3] * v[3] + v[5] * v[5]
        a01 = v[0] * v[1] + v[2] * v[3] + v[4] * v[5]
        det = a00 * a11 - a01 * a01
        d0 = v[0] * v[5] - v[1] * v[4]
        d1 = v[2] * v[5] - v[3] * v[4]
        e = b * b * (d0 * d0 + d1 * d1)
        c = dual.sqrt(det)
        return 2.0 * det * c / (2.0 * det + e)

    return fun


def area_integrand_grad_dual(j: ImmersionJet1, b: float) -> np.ndarray:
    """Gradient of F by forward dual-number differentiation (oracle)."""
    return dual.gradient(_flat_area_fun(b), j.z.ravel()).reshape(3, 2)


def area_integrand_hess_dual(j: ImmersionJet1, b: float) -> np.ndarray:
    """Hessian of F by nested dual-number differentiation (oracle), 6x6."""
    return dual.hessian(_flat_area_fun(b), j.z.ravel())


def area_integrand_grad_central(j: ImmersionJet1, b: float, step: float = 1e-6) -> np.ndarray:
    """Gradient of F by central differences (secondary oracle)."""
    return dual.central_gradient(_flat_area_fun(b), j.z.ravel(), step).reshape(3, 2)


def area_integrand_hess_central(j: ImmersionJet1, b: float, step: float = 2.5e-4) -> np.ndarray:
    """Hessian of F by nested central differences (secondary oracle), 6x6."""
    return dual.central_hessian(_flat_area_fun(b), j.z.ravel(), step)


def default_transversal(j: ImmersionJet1) -> np.ndarray:
    """Euclidean cross product of the jet columns."""
    z = j.z
    return np.cross(z[:, 0], z[:, 1])


def _checked_transversal(j, v):
    if v is None:
        v = default_transversal(j)
    else:
        v = np.asarray(v, dtype=float)
        if v.shape != (3,):
            raise DomainError("transversal v must be a 3-vector")
    n = default_transversal(j)
    scale = float(np.linalg.norm(n) * np.linalg.norm(v))
    if abs(float(n @ v)) <= 1e-12 * max(scale, 1e-300):
        raise DegenerateTransversalError(
            "transversal vector lies in the tangent plane of the jet"
        )
    return v


def mean_curvature_residual(j1: ImmersionJet1, j2: ImmersionJet2, b: float, v=None) -> float:
    """Contraction d2F/dz2 : second-order jet against the transversal v.

    v defaults to the cross product of the jet columns; a tangential v is
    rejected. The immersion is minimal at this jet exactly when the value
    vanishes, and the value is linear in both j2 and v.
    """
    v = _checked_transversal(j1, v)
    h = area_integrand_hess(j1, b).reshape(3, 2, 3, 2)
    return float(np.einsum("iejh,jeh,i->", h, j2.second, v))


def mean_curvature_bracket(j1: ImmersionJet1, j2: ImmersionJet2, b: float, v=None) -> float:
    """Cleared-denominator form of the minimality contraction.

    Equals (2*C**2 + E)**3 / C times mean_curvature_residual, hence has
    the same zero set with a strictly positive, finite ratio. Assembled
    from its own polynomial coefficients rather than by rescaling the
    residual, so the two routes check each other.
    """
    v = _checked_transversal(j1, v)
    z = j1.z
    a = gram(j1)
    det = _require_nondegenerate(a)
    adj = _adj2(a)
    c = math.sqrt(det)
    e = e_scalar(j1, b)
    den = 2.0 * det + e

    dc = (z @ adj) / c
    de = _grad_e(z, b)
    hc2 = _hess_det(z, adj)  # Hessian of C**2 = det A
    he = _hess_e(z, b)

    t = (
        (2.0 * det + 3.0 * e) * den * hc2
        - 2.0 * det * den * he
        - 2.0 * (4.0 * det * det + 12.0 * det * e - 3.0 * e * e)
        * np.einsum("ie,jh->iejh", dc, dc)
        + c * (4.0 * det - 6.0 * e)
        * (np.einsum("ie,jh->iejh", dc, de) + np.einsum("ie,jh->iejh", de, dc))
        + 4.0 * det * np.einsum("ie,jh->iejh", de, de)
    )
    return float(np.einsum("iejh,jeh,i->", t, j2.second, v))

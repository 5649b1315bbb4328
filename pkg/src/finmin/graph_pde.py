"""Quasilinear minimal-graph equations over horizontal and tilted planes.

For a graph with gradient (f1, f2) and Hessian H over the plane spanned
by the first two columns of an orthogonal frame m, with k the last row
of m, w = k3 - k1*f1 - k2*f2, W^2 = 1 + f1^2 + f2^2 and

    S = (2 + b^2) * W^2 - b^2 * w^2,

minimality is equivalent to the vanishing of

    S*(S - 2 b^2 w^2) * (delta - f f^T / W^2) : H
      + 2 b^2 (S + 4 b^2 w^2) * W^2 * u^T H u,    u = k_12 + w * f / W^2.

This is the coefficient form validated against the jet module's generic
bracket (ratio exactly 2*W^2); the test suite asserts the equivalence on
random samples. The horizontal case is the frame k = (0, 0, 1), where S
reduces to T = 2*W^2 + b^2*(W^2 - 1) and u to f / W^2.

Dividing by the always-positive S*(S - 2 b^2 w^2) yields coefficients
a = (delta - f f^T/W^2) + R * W^2 * u u^T with

    R = 2 b^2 (S + 4 b^2 w^2) / (S * (S - 2 b^2 w^2)) >= 0,

an elliptic form bounded below by |xi|^2 / W^2 and above by (1 + C) times
the classical minimal-surface form, where C is estimated by the bound
sampler in this module.
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .errors import DomainError
from .jet import ImmersionJet1, ImmersionJet2

__all__ = [
    "GraphPoint",
    "TiltedFrame",
    "PdeCoefficients",
    "SamplerConfig",
    "graph_residual",
    "tilted_graph_residual",
    "ellipticity_coefficients",
    "mean_curvature_type_bound",
    "immersion_jets",
    "random_rotations",
]


@dataclass(frozen=True)
class GraphPoint:
    """Gradient and Hessian of a graph function at one point."""

    f1: float
    f2: float
    h11: float
    h12: float
    h22: float

    def __post_init__(self):
        for name in ("f1", "f2", "h11", "h12", "h22"):
            v = float(getattr(self, name))
            if not math.isfinite(v):
                raise DomainError(f"{name} must be finite")
            object.__setattr__(self, name, v)

    @property
    def w2(self) -> float:
        """W^2 = 1 + |grad f|^2 >= 1."""
        return 1.0 + self.f1 * self.f1 + self.f2 * self.f2


@dataclass(frozen=True)
class TiltedFrame:
    """Orthogonal 3x3 frame; columns span the base plane and graph direction.

    k, the last row, is the only part of the frame the residual
    coefficients depend on. Orthogonality is enforced to 1e-12.
    """

    m: np.ndarray

    def __post_init__(self):
        m = np.array(self.m, dtype=float)
        if m.shape != (3, 3):
            raise DomainError(f"frame must be 3x3, got shape {m.shape}")
        if np.max(np.abs(m @ m.T - np.eye(3))) > 1e-12:
            raise DomainError("frame matrix is not orthogonal to 1e-12")
        m.setflags(write=False)
        object.__setattr__(self, "m", m)

    @classmethod
    def identity(cls) -> "TiltedFrame":
        return cls(np.eye(3))

    @property
    def k(self) -> np.ndarray:
        """Last row of the frame; sum(k_i^2) = 1."""
        return self.m[2, :]


@dataclass(frozen=True)
class PdeCoefficients:
    """Normalized second-order coefficients and their auxiliary scalars."""

    a11: float
    a12: float
    a22: float
    W2: float
    w: float
    Sb: float
    Rb: float

    def quadratic_form(self, xi1: float, xi2: float) -> float:
        return (
            self.a11 * xi1 * xi1 + 2.0 * self.a12 * xi1 * xi2 + self.a22 * xi2 * xi2
        )


def _residual_terms(f1, f2, h11, h12, h22, k1, k2, k3, b):
    # Arithmetic only: works elementwise on numpy arrays and on Duals.
    w2 = 1.0 + f1 * f1 + f2 * f2
    w = k3 - k1 * f1 - k2 * f2
    b2 = b * b
    s = (2.0 + b2) * w2 - b2 * w * w
    hform = (h11 + h22) - (f1 * f1 * h11 + 2.0 * f1 * f2 * h12 + f2 * f2 * h22) / w2
    u1 = k1 + w * f1 / w2
    u2 = k2 + w * f2 / w2
    uform = u1 * u1 * h11 + 2.0 * u1 * u2 * h12 + u2 * u2 * h22
    return s * (s - 2.0 * b2 * w * w) * hform + 2.0 * b2 * (s + 4.0 * b2 * w * w) * w2 * uform


def graph_residual(gp: GraphPoint, b: float) -> float:
    """Minimal-graph residual over the horizontal plane; zero iff minimal.

    At b = 0 this is exactly 4*W^2 times the classical minimal-surface
    operator (1+f2^2)h11 - 2 f1 f2 h12 + (1+f1^2)h22.
    """
    return float(
        _residual_terms(gp.f1, gp.f2, gp.h11, gp.h12, gp.h22, 0.0, 0.0, 1.0, b)
    )


def tilted_graph_residual(gp: GraphPoint, frame: TiltedFrame, b: float) -> float:
    """Minimal-graph residual over the plane of an arbitrary orthogonal frame.

    With the identity frame this equals graph_residual exactly (same code
    path). Equals the jet bracket divided by 2*W^2 for right-handed
    frames; for det(m) = -1 the sign of the jet-side transversal flips
    but the zero set is unchanged.
    """
    k1, k2, k3 = frame.k
    return float(
        _residual_terms(gp.f1, gp.f2, gp.h11, gp.h12, gp.h22, k1, k2, k3, b)
    )


def ellipticity_coefficients(gp: GraphPoint, frame: TiltedFrame, b: float) -> PdeCoefficients:
    """Residual coefficients divided by the positive factor S*(S - 2 b^2 w^2).

    The divisor is strictly positive for all b in [0, 1) because
    w^2 <= W^2, so no admissibility beyond b < 1/2 is needed.
    """
    b = float(b)
    if not (0.0 <= b < 0.5):
        raise DomainError(f"b={b} outside [0, 0.5)")
    k1, k2, k3 = frame.k
    f1, f2 = gp.f1, gp.f2
    w2 = gp.w2
    w = k3 - k1 * f1 - k2 * f2
    b2 = b * b
    s = (2.0 + b2) * w2 - b2 * w * w
    rb = 2.0 * b2 * (s + 4.0 * b2 * w * w) / (s * (s - 2.0 * b2 * w * w))
    u1 = k1 + w * f1 / w2
    u2 = k2 + w * f2 / w2
    return PdeCoefficients(
        a11=1.0 - f1 * f1 / w2 + rb * w2 * u1 * u1,
        a12=-f1 * f2 / w2 + rb * w2 * u1 * u2,
        a22=1.0 - f2 * f2 / w2 + rb * w2 * u2 * u2,
        W2=w2,
        w=w,
        Sb=s,
        Rb=rb,
    )


@dataclass(frozen=True)
class SamplerConfig:
    """Grids used to estimate the mean-curvature-type constant."""

    t_max: float = 1e3
    t_nodes: int = 512
    angle_nodes: int = 256

    def t_grid(self) -> np.ndarray:
        if self.t_max == 0.0:
            return np.array([0.0])
        ts = np.logspace(-3.0, math.log10(self.t_max), self.t_nodes)
        return np.concatenate(([0.0], ts))


def _thread_count() -> int:
    try:
        return max(1, int(os.environ.get("FM_THREADS", "1")))
    except ValueError:
        return 1


def _bound_value(k12_norm, k3, t_abs, gamma, theta, b):
    """Quotient R * (W^2 |k12| cos(gamma) + w |t| cos(theta))^2 / (1 + |t|^2 sin^2(theta)).

    gamma is the angle between (k1, k2) and the probe direction, theta the
    angle between the gradient t and the probe direction. Vectorized over
    any broadcastable combination of arguments.
    """
    b2 = b * b
    w2 = 1.0 + t_abs * t_abs
    w = k3 - k12_norm * t_abs * np.cos(gamma - theta)
    s = (2.0 + b2) * w2 - b2 * w * w
    rb = 2.0 * b2 * (s + 4.0 * b2 * w * w) / (s * (s - 2.0 * b2 * w * w))
    num = (w2 * k12_norm * np.cos(gamma) + w * t_abs * np.cos(theta)) ** 2
    den = 1.0 + (t_abs * np.sin(theta)) ** 2
    return rb * num / den


def mean_curvature_type_bound(frame: TiltedFrame, b: float, config: SamplerConfig | None = None) -> float:
    """Sample maximum of the ellipticity excess quotient; a lower estimate
    of the mean-curvature-type constant for this frame and b.

    Dense grids over gradient magnitude (log-spaced plus zero) and the two
    angles; the angle grids contain the parallel and antiparallel
    directions exactly. An estimate, not a proof: the quotient is bounded
    by degree counting, and growing the horizon tenfold moves the value by
    well under a percent. Honors FM_THREADS for chunked evaluation with a
    deterministic max reduction.
    """
    b = float(b)
    if not (0.0 <= b < 0.5):
        raise DomainError(f"b={b} outside [0, 0.5)")
    config = config or SamplerConfig()
    k1, k2, k3 = frame.k
    k12 = math.hypot(k1, k2)
    gamma = np.linspace(0.0, 2.0 * math.pi, config.angle_nodes, endpoint=False)[:, None]
    theta = np.linspace(0.0, 2.0 * math.pi, config.angle_nodes, endpoint=False)[None, :]
    ts = config.t_grid()

    def chunk_max(chunk):
        best = 0.0
        for t in chunk:
            best = max(best, float(np.max(_bound_value(k12, k3, t, gamma, theta, b))))
        return best

    n_threads = _thread_count()
    if n_threads == 1:
        return chunk_max(ts)
    chunks = np.array_split(ts, n_threads * 4)
    with ThreadPoolExecutor(max_workers=n_threads) as pool:
        partial = list(pool.map(chunk_max, chunks))
    best = 0.0
    for v in partial:  # fixed order: bit-stable for any thread count
        best = max(best, v)
    return best


def immersion_jets(gp: GraphPoint, frame: TiltedFrame | None = None):
    """First and second order jets of the (possibly tilted) graph point."""
    if frame is None:
        return (
            ImmersionJet1.graph(gp.f1, gp.f2),
            ImmersionJet2.graph(gp.h11, gp.h12, gp.h22),
        )
    return (
        ImmersionJet1.tilted(gp.f1, gp.f2, frame.m),
        ImmersionJet2.tilted(gp.h11, gp.h12, gp.h22, frame.m),
    )


def random_rotations(rng: np.random.Generator, n: int) -> np.ndarray:
    """n uniformly random rotation matrices (det +1), shape (n, 3, 3).

    Quaternion construction: deterministic given the generator state,
    which keeps seeded CLI output byte-stable.
    """
    q = rng.normal(size=(n, 4))
    q /= np.linalg.norm(q, axis=1, keepdims=True)
    a, b, c, d = q[:, 0], q[:, 1], q[:, 2], q[:, 3]
    m = np.empty((n, 3, 3))
    m[:, 0, 0] = a * a + b * b - c * c - d * d
    m[:, 0, 1] = 2 * (b * c - a * d)
    m[:, 0, 2] = 2 * (b * d + a * c)
    m[:, 1, 0] = 2 * (b * c + a * d)
    m[:, 1, 1] = a * a - b * b + c * c - d * d
    m[:, 1, 2] = 2 * (c * d - a * b)
    m[:, 2, 0] = 2 * (b * d - a * c)
    m[:, 2, 1] = 2 * (c * d + a * b)
    m[:, 2, 2] = a * a - b * b - c * c + d * d
    return m

"""Minimal translation surfaces f(x1) + g(x2) over exact rationals.

With r = f'(x1)^2, s = g'(x2)^2, minimality reduces to the quasilinear
ODE pair lambda * f'' + mu * g'' = 0 with polynomial coefficients

    lambda = P1 * P2 * (1 + s) + X * r,    mu = P1 * P2 * (1 + r) + X * s,
    P1 = 2 + (2 + b^2) p,  P2 = 2(1 - b^2) + (2 + b^2) p,
    X  = 2 b^2 (2 + 4 b^2 + (2 + b^2) p),  p = r + s.

These expressions were obtained by expanding the jet-module bracket under
the translation substitutions; the test suite re-derives them against
that oracle. In the variables p = r + s, q = r - s the pair splits as
lambda = K(p) - L(p) q, mu = K(p) + L(p) q with deg K = 3, deg L = 2.
Whether K/L has derivative of absolute value one decides the existence of
nonplanar minimal translation surfaces: exactly at b = 0 one finds
K = (p + 2) L, so (K/L)' == 1, and for every b > 0 the separability
identities fail, leaving only planes.

All polynomial work is over fractions.Fraction, so every reported value
is exact.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Optional

from .errors import DomainError, PoleError

__all__ = [
    "TranslationPoint",
    "KLPolys",
    "CompatibilityReport",
    "lambda_mu",
    "translation_residual",
    "kl_polys",
    "kl_ratio_derivative",
    "compatibility_check",
]


@dataclass(frozen=True)
class TranslationPoint:
    """First and second derivatives of the two profiles at one point."""

    fp: float
    fpp: float
    gp: float
    gpp: float

    @property
    def r(self):
        return self.fp * self.fp

    @property
    def s(self):
        return self.gp * self.gp

    @property
    def p(self):
        return self.r + self.s

    @property
    def q(self):
        return self.r - self.s


def _lambda_mu_b2(r, s, b2):
    p = r + s
    lead = 2 + (2 + b2) * p
    tail = 2 * (1 - b2) + (2 + b2) * p
    extra = 2 * b2 * (2 + 4 * b2 + (2 + b2) * p)
    return lead * tail * (1 + s) + extra * r, lead * tail * (1 + r) + extra * s


def lambda_mu(r, s, b):
    """Coefficient pair (lambda, mu); swapping r and s swaps the pair.

    Exact when called with Fraction arguments; b enters through b*b only.
    Both coefficients are strictly positive on r, s >= 0, b in [0, 1/2).
    """
    return _lambda_mu_b2(r, s, b * b)


def translation_residual(tp: TranslationPoint, b):
    """lambda * f'' + mu * g''; zero exactly at minimal points."""
    lam, mu = lambda_mu(tp.r, tp.s, b)
    return lam * tp.fpp + mu * tp.gpp


# ---------------------------------------------------------------------------
# Dense polynomials over Fraction, coefficients in ascending order.


def _trim(c):
    c = list(c)
    while c and c[-1] == 0:
        c.pop()
    return c


def _add(a, b):
    n = max(len(a), len(b))
    return _trim([(a[i] if i < len(a) else 0) + (b[i] if i < len(b) else 0) for i in range(n)])


def _sub(a, b):
    n = max(len(a), len(b))
    return _trim([(a[i] if i < len(a) else 0) - (b[i] if i < len(b) else 0) for i in range(n)])


def _mul(a, b):
    if not a or not b:
        return []
    out = [Fraction(0)] * (len(a) + len(b) - 1)
    for i, ai in enumerate(a):
        for j, bj in enumerate(b):
            out[i + j] += ai * bj
    return _trim(out)


def _scale(a, c):
    return _trim([c * x for x in a])


def _deriv(a):
    return _trim([i * a[i] for i in range(1, len(a))])


def _eval(a, x):
    acc = Fraction(0)
    for c in reversed(a):
        acc = acc * x + c
    return acc


def _lagrange(xs, ys):
    """Exact interpolating polynomial through (xs, ys), ascending coeffs."""
    out = []
    for i, xi in enumerate(xs):
        basis = [Fraction(1)]
        denom = Fraction(1)
        for j, xj in enumerate(xs):
            if j == i:
                continue
            basis = _mul(basis, [-xj, Fraction(1)])
            denom *= xi - xj
        out = _add(out, _scale(basis, ys[i] / denom))
    return out


@dataclass(frozen=True)
class KLPolys:
    """Exact polynomial split lambda = K(p) - L(p) q, mu = K(p) + L(p) q."""

    b2: Fraction
    k_coeffs: tuple  # ascending, degree 3
    l_coeffs: tuple  # ascending, degree 2

    def k_at(self, p) -> Fraction:
        return _eval(self.k_coeffs, Fraction(p))

    def l_at(self, p) -> Fraction:
        return _eval(self.l_coeffs, Fraction(p))


def kl_polys(b2) -> KLPolys:
    """Exact K, L for one squared parameter, by interpolation from lambda_mu.

    K is read off on the diagonal q = 0 (where lambda = mu = K) at four
    nodes, L on the line q = 1 at three; the split is then re-verified at
    off-grid rational points.
    """
    b2 = Fraction(b2)
    if not (0 <= b2 < Fraction(1, 4)):
        raise DomainError(f"b^2={b2} outside [0, 1/4)")

    k_nodes = [Fraction(0), Fraction(2), Fraction(4), Fraction(6)]
    k_vals = []
    for p in k_nodes:
        lam, mu = _lambda_mu_b2(p / 2, p / 2, b2)
        assert lam == mu
        k_vals.append(lam)
    k = _lagrange(k_nodes, k_vals)

    l_nodes = [Fraction(1), Fraction(3), Fraction(5)]
    l_vals = []
    for p in l_nodes:
        lam, mu = _lambda_mu_b2((p + 1) / 2, (p - 1) / 2, b2)
        l_vals.append((mu - lam) / 2)
    l = _lagrange(l_nodes, l_vals)

    polys = KLPolys(b2=b2, k_coeffs=tuple(k), l_coeffs=tuple(l))
    for r, s in ((Fraction(3), Fraction(1, 2)), (Fraction(1, 3), Fraction(5))):
        lam, mu = _lambda_mu_b2(r, s, b2)
        p, q = r + s, r - s
        assert lam == polys.k_at(p) - polys.l_at(p) * q
        assert mu == polys.k_at(p) + polys.l_at(p) * q
    return polys


def kl_ratio_derivative(b2, p) -> Fraction:
    """Exact (K/L)'(p) = (K'L - KL')/L^2 at a rational p.

    L has positive coefficients on the admissible domain, so the pole
    guard cannot fire for p >= 0; it is kept for fidelity.
    """
    polys = kl_polys(b2)
    p = Fraction(p)
    lp = polys.l_at(p)
    if lp == 0:
        raise PoleError(f"L({p}) = 0")
    kd = _eval(_deriv(list(polys.k_coeffs)), p)
    ld = _eval(_deriv(list(polys.l_coeffs)), p)
    return (kd * lp - polys.k_at(p) * ld) / (lp * lp)


def _lowest_nonzero(coeffs) -> Optional[tuple]:
    for i, c in enumerate(coeffs):
        if c != 0:
            return (i, c)
    return None


def _reference_ratio_closed_form(b2: Fraction, p: Fraction) -> Fraction:
    # Circulating closed-form candidate for K/L; reported against the
    # exact ratio, never relied on.
    g = b2
    den = (2 + g) ** 2
    t = (4 - 16 * g) + p * (8 - 12 * g + 4 * g * g) + p * p * den
    return (
        p
        + Fraction(8 + 32 * g - 10 * g * g, 1) / den
        + (4 * g * g / t) * ((132 - 60 * g + 9 * g * g) * p / den + 2 * (66 - 21 * g) / den)
    )


@dataclass(frozen=True)
class CompatibilityReport:
    """Exact-arithmetic report on the separability of the translation ODE.

    separability/companion are the two polynomial identities whose joint
    vanishing is necessary for a nonplanar solution; each nonzero
    expression is summarized by its lowest-degree surviving coefficient.
    ratio_formula_matches records whether the circulating closed-form
    candidate for K/L reproduces the exact ratio at probe points.
    """

    b2: Fraction
    separability_zero: bool
    companion_zero: bool
    separability_lowest: Optional[tuple]
    companion_lowest: Optional[tuple]
    ratio_formula_matches: bool

    @property
    def admits_nonplanar(self) -> bool:
        return self.separability_zero and self.companion_zero


def compatibility_check(b2) -> CompatibilityReport:
    """Form K''L^3 - K L^2 L'' - 2 K'L'L^2 + 2 K L L'^2 and its companion
    -K''K^2 L + K^3 L'' - 2 K'K^2 L' + 2 K'^2 K L - 2 K L^3 exactly and
    report whether each vanishes identically. Both vanish iff b = 0.
    """
    polys = kl_polys(b2)
    k = list(polys.k_coeffs)
    l = list(polys.l_coeffs)
    kd, kdd = _deriv(k), _deriv(_deriv(k))
    ld, ldd = _deriv(l), _deriv(_deriv(l))

    l2 = _mul(l, l)
    l3 = _mul(l2, l)
    k2 = _mul(k, k)
    k3 = _mul(k2, k)

    separability = _sub(
        _sub(_mul(kdd, l3), _mul(k, _mul(l2, ldd))),
        _sub(_scale(_mul(kd, _mul(ld, l2)), 2), _scale(_mul(k, _mul(l, _mul(ld, ld))), 2)),
    )
    companion = _add(
        _sub(_mul(k3, ldd), _mul(kdd, _mul(k2, l))),
        _sub(
            _sub(_scale(_mul(_mul(kd, kd), _mul(k, l)), 2), _scale(_mul(kd, _mul(k2, ld)), 2)),
            _scale(_mul(k, l3), 2),
        ),
    )

    probes = [Fraction(0), Fraction(1), Fraction(2), Fraction(7, 3)]
    matches = all(
        polys.k_at(p) == polys.l_at(p) * _reference_ratio_closed_form(polys.b2, p)
        for p in probes
    )

    return CompatibilityReport(
        b2=polys.b2,
        separability_zero=not separability,
        companion_zero=not companion,
        separability_lowest=_lowest_nonzero(separability),
        companion_lowest=_lowest_nonzero(companion),
        ratio_formula_matches=matches,
    )

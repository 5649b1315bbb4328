import math
from fractions import Fraction

import numpy as np
import pytest

from finmin.errors import DomainError
from finmin.jet import ImmersionJet1, ImmersionJet2, mean_curvature_bracket
from finmin.translation import (
    TranslationPoint,
    compatibility_check,
    kl_polys,
    kl_ratio_derivative,
    lambda_mu,
    translation_residual,
)

RIGIDITY_B2 = [Fraction(1, 100), Fraction(4, 100), Fraction(9, 100), Fraction(16, 100), Fraction(24, 100)]
RIGIDITY_P = [Fraction(0), Fraction(1, 2), Fraction(1), Fraction(2), Fraction(5), Fraction(10)]


def _translation_jets(fp, fpp, gp, gpp):
    j1 = ImmersionJet1(np.array([[1.0, 0.0], [0.0, 1.0], [fp, gp]]))
    s = np.zeros((3, 2, 2))
    s[2, 0, 0] = fpp
    s[2, 1, 1] = gpp
    return j1, ImmersionJet2(s)


# ---------------------------------------------------------------------------
# lambda / mu


def test_swap_symmetry_exact():
    rng = np.random.default_rng(40)
    for _ in range(50):
        r = Fraction(int(rng.integers(0, 40)), int(rng.integers(1, 9)))
        s = Fraction(int(rng.integers(0, 40)), int(rng.integers(1, 9)))
        b = Fraction(int(rng.integers(0, 5)), 10)
        lam, mu = lambda_mu(r, s, b)
        lam2, mu2 = lambda_mu(s, r, b)
        assert lam == mu2 and mu == lam2


def test_origin_value_golden():
    lam, mu = lambda_mu(Fraction(0), Fraction(0), Fraction(0))
    assert lam == mu == 4


def test_b0_closed_pattern():
    # lambda = 4 (1+p)^2 (1+s) at b = 0.
    rng = np.random.default_rng(41)
    for _ in range(50):
        r = Fraction(int(rng.integers(0, 30)), 7)
        s = Fraction(int(rng.integers(0, 30)), 7)
        lam, mu = lambda_mu(r, s, Fraction(0))
        p = r + s
        assert lam == 4 * (1 + p) ** 2 * (1 + s)
        assert mu == 4 * (1 + p) ** 2 * (1 + r)


def test_golden_values_r1_s2():
    lam, mu = lambda_mu(Fraction(1), Fraction(2), Fraction(3, 10))
    assert lam == Fraction(2022663, 10000)
    assert mu == Fraction(1369154, 10000)
    assert lam > 0 and mu > 0 and lam != mu


def test_positivity():
    rng = np.random.default_rng(42)
    for _ in range(200):
        r, s = rng.uniform(0, 20, 2)
        b = rng.uniform(0.0, 0.5)
        lam, mu = lambda_mu(r, s, b)
        assert lam > 0 and mu > 0


# ---------------------------------------------------------------------------
# residual


def test_plane_residual_zero():
    tp = TranslationPoint(fp=1.5, fpp=0.0, gp=-0.7, gpp=0.0)
    for b in (0.0, 0.2, 0.45):
        assert translation_residual(tp, b) == 0.0


def test_scherk_translation_residual():
    x, y = 0.3, 0.4
    tp = TranslationPoint(
        fp=-math.tan(x),
        fpp=-1.0 / math.cos(x) ** 2,
        gp=math.tan(y),
        gpp=1.0 / math.cos(y) ** 2,
    )
    assert abs(translation_residual(tp, 0.0)) <= 1e-9
    assert abs(translation_residual(tp, 0.3)) > 1e-4


def test_b0_reduction_classical_translation_equation():
    rng = np.random.default_rng(43)
    for _ in range(100):
        fp, gp, fpp, gpp = rng.uniform(-2, 2, 4)
        tp = TranslationPoint(fp=fp, fpp=fpp, gp=gp, gpp=gpp)
        r, s = fp * fp, gp * gp
        factor = 4.0 * (1.0 + r + s) ** 2  # positive multiple
        classical = (1 + s) * fpp + (1 + r) * gpp
        assert translation_residual(tp, 0.0) == pytest.approx(
            factor * classical, rel=1e-12, abs=1e-12
        )


def test_residual_matches_jet_bracket():
    rng = np.random.default_rng(44)
    for _ in range(200):
        fp, gp, fpp, gpp = rng.uniform(-2, 2, 4)
        tp = TranslationPoint(fp=fp, fpp=fpp, gp=gp, gpp=gpp)
        j1, j2 = _translation_jets(fp, fpp, gp, gpp)
        for b in (0.0, 0.15, 0.3, 0.45):
            br = mean_curvature_bracket(j1, j2, b)
            res = translation_residual(tp, b)
            # ratio is exactly 2: simultaneous zero sets, positive ratio
            assert br == pytest.approx(2.0 * res, rel=1e-9, abs=1e-9)


# ---------------------------------------------------------------------------
# K / L polynomials


def test_kl_b0_coefficients():
    polys = kl_polys(0)
    assert polys.k_coeffs == (4, 10, 8, 2)
    assert polys.l_coeffs == (2, 4, 2)


def test_kl_b0_exact_division():
    # K = (p + 2) L with zero remainder at b = 0.
    polys = kl_polys(0)
    k, l = list(polys.k_coeffs), list(polys.l_coeffs)
    # multiply L by (p + 2) and compare coefficientwise
    prod = [2 * l[0], 2 * l[1] + l[0], 2 * l[2] + l[1], l[2]]
    assert prod == k


def test_kl_degrees():
    for b2 in [Fraction(0)] + RIGIDITY_B2:
        polys = kl_polys(b2)
        assert len(polys.k_coeffs) == 4
        assert len(polys.l_coeffs) == 3


def test_kl_constant_terms():
    # K(0) = 4 (1 - b^2); L(0) = 2 (1 - 2 b^2 - 2 b^4) from the bracket
    # oracle (a circulating printed variant has 2 (1 - 4 b^2) instead; the
    # decomposition identity below rules it out).
    for b2 in [Fraction(0)] + RIGIDITY_B2:
        polys = kl_polys(b2)
        assert polys.k_at(0) == 4 * (1 - b2)
        assert polys.l_at(0) == 2 * (1 - 2 * b2 - 2 * b2 * b2)


def test_decomposition_identity_exact():
    from finmin.translation import _lambda_mu_b2

    rng = np.random.default_rng(45)
    for b2 in [Fraction(0), Fraction(1, 100), Fraction(9, 100), Fraction(6, 25)]:
        polys = kl_polys(b2)
        for _ in range(20):
            r = Fraction(int(rng.integers(0, 60)), int(rng.integers(1, 11)))
            s = Fraction(int(rng.integers(0, 60)), int(rng.integers(1, 11)))
            p, q = r + s, r - s
            lam, mu = _lambda_mu_b2(r, s, b2)
            assert lam == polys.k_at(p) - polys.l_at(p) * q
            assert mu == polys.k_at(p) + polys.l_at(p) * q


def test_kl_domain():
    with pytest.raises(DomainError):
        kl_polys(Fraction(1, 4))
    with pytest.raises(DomainError):
        kl_polys(Fraction(-1, 100))


# ---------------------------------------------------------------------------
# rigidity criterion


def test_ratio_derivative_unit_at_b0():
    for p in (0, 1, 2, 5):
        assert kl_ratio_derivative(0, p) == 1


def test_ratio_derivative_never_unit_for_positive_b():
    for b2 in RIGIDITY_B2:
        for p in RIGIDITY_P:
            v = kl_ratio_derivative(b2, p)
            assert abs(v) != 1


def test_ratio_derivative_example_values():
    v = kl_ratio_derivative(Fraction(9, 100), 1)
    assert abs(v) != 1
    v = kl_ratio_derivative(Fraction(1, 100), 0)
    assert v != 1
    assert abs(float(v) - 1.0) < 0.2


def test_ratio_derivative_is_exact_fraction():
    v = kl_ratio_derivative(Fraction(1, 100), 0)
    assert isinstance(v, Fraction)
    assert v == Fraction(5328311, 5333378)  # frozen from the exact pipeline


# ---------------------------------------------------------------------------
# compatibility report


def test_compatibility_b0():
    rep = compatibility_check(0)
    assert rep.separability_zero and rep.companion_zero
    assert rep.admits_nonplanar
    assert rep.separability_lowest is None and rep.companion_lowest is None
    assert rep.ratio_formula_matches


@pytest.mark.parametrize("b2", [Fraction(1, 25), Fraction(1, 100), Fraction(24, 100)])
def test_compatibility_positive_b(b2):
    rep = compatibility_check(b2)
    assert not (rep.separability_zero and rep.companion_zero)
    assert not rep.admits_nonplanar
    # lowest-degree surviving coefficient is reported for each nonzero
    if not rep.separability_zero:
        deg, coeff = rep.separability_lowest
        assert coeff != 0 and deg >= 0
    if not rep.companion_zero:
        deg, coeff = rep.companion_lowest
        assert coeff != 0 and deg >= 0
    assert not rep.ratio_formula_matches

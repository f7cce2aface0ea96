from fractions import Fraction
from math import isqrt

import pytest

from siegelsign.errors import DomainError, PrecisionError, UndecidedError
from siegelsign.jacobi import (
    JacobiExpansion,
    b_coefficients,
    cohen_h,
    dump_jacobi,
    first_nonzero_taylor_index,
    jacobi_cusp_phi,
    jacobi_eisenstein,
    parse_jacobi,
    taylor_coefficient,
)
from siegelsign.series import eisenstein_qexp, newform_catalog


def hurwitz_class_number(N: int) -> Fraction:
    """Brute-force count of reduced positive definite forms of discriminant -N,
    forms equivalent to a(x^2+y^2) weighted 1/2 and to a(x^2+xy+y^2) weighted 1/3."""
    total = Fraction(0)
    for a in range(1, isqrt(N // 3) + 2):
        for b in range(-a + 1, a + 1):
            if (b * b + N) % (4 * a):
                continue
            c = (b * b + N) // (4 * a)
            if c < a or (c == a and b < 0):
                continue
            if a == b == c:
                total += Fraction(1, 3)
            elif b == 0 and a == c:
                total += Fraction(1, 2)
            else:
                total += 1
    return total


def test_cohen_h_examples():
    assert cohen_h(1, 0) == Fraction(-1, 12)
    assert cohen_h(1, 3) == Fraction(1, 3)
    assert cohen_h(1, 5) == 0
    assert cohen_h(1, 6) == 0


def test_cohen_h_matches_hurwitz_enumeration():
    for N in range(3, 400):
        if N % 4 in (0, 3):
            assert cohen_h(1, N) == hurwitz_class_number(N), N


def test_cohen_h_weight_five_halves_values():
    # H(2, N): 1/120, -1/12, -7/12 and -2/5 at N = 0, 1, 4, 5
    assert [cohen_h(2, n) for n in (0, 1, 4, 5)] == [
        Fraction(1, 120), Fraction(-1, 12), Fraction(-7, 12), Fraction(-2, 5)
    ]
    assert cohen_h(2, 2) == 0 and cohen_h(2, 3) == 0


def test_jacobi_eisenstein_examples():
    e41 = jacobi_eisenstein(4, 2)
    assert [e41[1, r] for r in (0, 1, 2)] == [126, 56, 1]
    assert e41[0, 0] == 1
    e61 = jacobi_eisenstein(6, 2)
    assert [e61[1, r] for r in (0, 1, 2)] == [-330, -88, 1]
    with pytest.raises(DomainError):
        jacobi_eisenstein(8, 2)


@pytest.mark.parametrize("k", [4, 6])
def test_eisenstein_z0_specialization(k):
    phi = jacobi_eisenstein(k, 20)
    e = eisenstein_qexp(k, 20)
    assert taylor_coefficient(phi, 0).coefficients() == e.coefficients()


def test_cusp_examples(phi10, phi12):
    assert (phi10[1, 0], phi10[1, 1]) == (-2, 1)
    assert (phi12[1, 0], phi12[1, 1]) == (10, 1)
    assert phi10[0, 0] == 0 and phi12[0, 0] == 0
    with pytest.raises(DomainError):
        jacobi_cusp_phi(8, 5)


def test_cusp_defining_combination_at_q1():
    e41, e61 = jacobi_eisenstein(4, 1), jacobi_eisenstein(6, 1)
    # phi_10 c(1,0) = (E6 E41 - E4 E61)(1,0) / 144 with E4 = 1 + 240q, E6 = 1 - 504q
    c10 = (e41[1, 0] - 504 * e41[0, 0] - e61[1, 0] - 240 * e61[0, 0]) / 144
    assert c10 == -2


@pytest.mark.parametrize("name", ["e41", "e61", "phi10", "phi12"])
def test_index_one_discriminant_dependence(name, phi10, phi12):
    phi = {"e41": jacobi_eisenstein(4, 60), "e61": jacobi_eisenstein(6, 60),
           "phi10": phi10, "phi12": phi12}[name]
    seen = {}
    for n, r in phi.keys():
        key = (4 * n - r * r, r % 2)
        seen.setdefault(key, phi[n, r])
        assert phi[n, r] == seen[key], (n, r)
        assert phi[n, r] == phi[n, -r]


def test_cusp_support_excludes_boundary(phi10):
    assert all(r * r < 4 * n for n, r in phi10.coeffs)


def test_z0_specialization_of_cusp_forms(phi10, phi12):
    delta = newform_catalog("12.1").qexp(40)
    assert taylor_coefficient(phi10.truncate(40), 0).is_zero()
    assert taylor_coefficient(phi12.truncate(40), 0).coefficients() == delta.scale(12).coefficients()


def test_taylor_examples(phi10, phi12):
    assert taylor_coefficient(phi12, 0)[1] == 12
    assert taylor_coefficient(phi10, 0).is_zero()
    assert taylor_coefficient(phi10, 1).is_zero()


@pytest.mark.parametrize("nu", [1, 3, 5, 7])
def test_odd_taylor_coefficients_vanish(nu, phi10, phi12):
    for phi in (phi10, phi12, jacobi_eisenstein(4, 30)):
        assert taylor_coefficient(phi.truncate(30), nu).is_zero()


def test_first_nonzero_index(phi10, phi12):
    r12 = first_nonzero_taylor_index(phi12)
    assert (r12.alpha, r12.i_alpha_sign, r12.alpha_bound) == (0, 1, 2)
    r10 = first_nonzero_taylor_index(phi10)
    assert (r10.alpha, r10.i_alpha_sign) == (2, -1)
    assert r10.chi_alpha_normalized[1] == 2
    assert r10.chi_alpha_normalized.weight == 12
    assert r10.alpha <= r10.alpha_bound


def test_chi2_of_phi10_is_multiple_of_delta(phi10):
    chi = first_nonzero_taylor_index(phi10).chi_alpha_normalized
    delta = newform_catalog("12.1").qexp(chi.precision)
    assert chi.coefficients() == delta.scale(chi[1]).coefficients()


def test_first_nonzero_index_errors():
    zero = JacobiExpansion(10, 1, 3, {}, True)
    with pytest.raises(DomainError):
        first_nonzero_taylor_index(zero)
    # odd in z: every even Taylor coefficient vanishes
    odd = JacobiExpansion(11, 1, 1, {(1, 1): Fraction(1), (1, -1): Fraction(-1)}, True)
    with pytest.raises(UndecidedError, match="undecidable"):
        first_nonzero_taylor_index(odd)


def test_b_coefficients_examples(phi10, phi12):
    assert b_coefficients(phi12, 0, 1) == [12]
    assert b_coefficients(phi10, 2, 1) == [2]
    assert b_coefficients(phi10, 0, 1) == [0]
    with pytest.raises(PrecisionError):
        b_coefficients(phi10, 0, phi10.precision + 1)


def test_jacobi_reads_beyond_precision():
    e = jacobi_eisenstein(4, 3)
    assert e[2, 5] == 0  # outside support, inside precision
    with pytest.raises(PrecisionError):
        e[4, 0]


def test_jacobi_dump_roundtrip(phi10):
    small = phi10.truncate(6)
    text = dump_jacobi(small)
    assert text.splitlines()[0] == "#jacobi k=10 m=1 precision=6"
    assert "1\t0\t-2" in text.splitlines()
    assert parse_jacobi(text) == small


def test_jacobi_support_validation():
    with pytest.raises(DomainError):
        JacobiExpansion(10, 1, 3, {(1, 2): Fraction(1)}, True)

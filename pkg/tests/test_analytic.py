import math
import random

import numpy as np
import pytest

from siegelsign.analytic import (
    BOUND_NAMES,
    BoundParams,
    ConvexityStrip,
    deligne_check,
    evaluate_bound,
    log_spaced_points,
    normalized_coeffs,
    partial_sums,
    rademacher_bound,
    rs_main_term_constant,
    rs_partial_sum,
    sign_change_windows,
    window_length,
    zeta_n_factor,
)
from siegelsign.errors import DomainError
from siegelsign.series import newform_catalog, catalog_labels

DELTA = newform_catalog("12.1")
LEVEL11 = newform_catalog("2.11")


def tau_oracle(up_to):
    """q prod (1 - q^n)^24 by repeated naive polynomial multiplication."""
    poly = [1] + [0] * up_to
    for n in range(1, up_to + 1):
        for _ in range(24):
            for i in range(up_to, n - 1, -1):
                poly[i] -= poly[i - n]
    return [0] + poly[:up_to]


def test_normalized_examples():
    lam = normalized_coeffs(DELTA, 10)
    assert lam[1] == 1.0 and lam[0] == 0.0
    assert lam[2] == pytest.approx(-24 / 2**5.5, rel=1e-15)
    assert lam[2] == pytest.approx(-0.53033, abs=1e-5)
    assert normalized_coeffs(LEVEL11, 5)[2] == pytest.approx(-math.sqrt(2), rel=1e-15)
    assert abs(lam[6]) <= 4


@pytest.mark.parametrize("label", catalog_labels())
def test_deligne_small_range(label):
    assert deligne_check(newform_catalog(label), 10_000) == []


def test_rs_square_raw_matches_direct_sum():
    tau = tau_oracle(10)
    oracle = math.fsum((tau[n] / n**5.5) ** 2 for n in range(1, 11))
    rep = rs_partial_sum(DELTA, 10, "square_raw")
    assert rep.value == pytest.approx(oracle, abs=1e-12)
    assert rep.raw_sum > 0


def test_rs_log_modes_match_direct_sum():
    tau = tau_oracle(30)
    lam = [0] + [tau[n] / n**5.5 for n in range(1, 31)]
    x = 30
    log1 = math.fsum(lam[n] ** 2 * math.log(x / n) for n in range(1, x + 1))
    lin = math.fsum(lam[n] * math.log(x / n) for n in range(1, x + 1))
    assert rs_partial_sum(DELTA, x, "square_log").value == pytest.approx(log1, abs=1e-12)
    assert rs_partial_sum(DELTA, x, "linear_log").value == pytest.approx(lin, abs=1e-12)
    assert rs_partial_sum(DELTA, x, "linear_raw").main_term == 0


def test_rs_at_one_and_ratio():
    assert rs_partial_sum(DELTA, 1, "square_log").value == 0
    for x in (3, 10, 100, 1000):
        r2 = rs_partial_sum(DELTA, x, "square_log2").value
        r1 = rs_partial_sum(DELTA, x, "square_log").value
        # termwise log(x/n) <= log x gives the upper end
        assert 1 < r2 / r1 < 2 * math.log(x)


def test_rs_ratio_below_one_at_two():
    # only n = 1 carries weight at x = 2, so the ratio is exactly log 2
    r2 = rs_partial_sum(DELTA, 2, "square_log2").value
    r1 = rs_partial_sum(DELTA, 2, "square_log").value
    assert r2 / r1 == pytest.approx(math.log(2))


def test_rs_monotone_and_log_bound():
    lam = normalized_coeffs(DELTA, 2000)
    prev = 0.0
    for x in range(1, 2001, 37):
        rep = partial_sums(lam, x, "square_raw")
        assert rep.raw_sum >= prev
        assert rep.smoothed_log <= math.log(x) * rep.raw_sum + 1e-12
        prev = rep.raw_sum


def test_rs_errors():
    with pytest.raises(DomainError):
        rs_partial_sum(DELTA, 10, "cube")
    with pytest.raises(DomainError):
        partial_sums(np.zeros(5), 10, "square_raw")


def test_report_dict_keys():
    d = rs_partial_sum(DELTA, 50, "square_log").to_dict()
    assert list(d) == ["x", "raw", "log", "log2", "main_term", "slope"]
    assert d["slope"] == pytest.approx(d["log"] / 50)


def test_main_term_constants():
    assert rs_main_term_constant(1) == pytest.approx(0.60793, abs=1e-5)
    assert rs_main_term_constant(2) == pytest.approx(0.40529, abs=1e-5)
    assert rs_main_term_constant(6) == pytest.approx(0.30396, abs=1e-5)
    with pytest.raises(DomainError):
        rs_main_term_constant(4)


def test_main_term_weights():
    x = 100
    assert rs_partial_sum(DELTA, x, "square_log2").main_term == pytest.approx(
        2 * rs_partial_sum(DELTA, x, "square_raw").main_term
    )


def test_rademacher_examples():
    const = ConvexityStrip(0, 1, 1, 1, 1, 0, 0)
    for s, t in [(0, 0), (0.3, 5), (1, -2)]:
        assert rademacher_bound(const, s, t) == 1
    assert rademacher_bound(ConvexityStrip(0, 1, 1, 4, 1, 0, 0), 0.5, 0) == 2
    assert rademacher_bound(ConvexityStrip(0, 1, 0.5, 1, 1, 2, 0), 0.5, 0) == pytest.approx(1)


def test_rademacher_edges():
    s = ConvexityStrip(-0.5, 1.5, 1, 3, 0.5, 1.5, 0.25)
    for t in (0, 1, 10):
        assert rademacher_bound(s, -0.5, t) == pytest.approx(3 * math.hypot(0.5, t) ** 1.5, rel=1e-12)
        assert rademacher_bound(s, 1.5, t) == pytest.approx(0.5 * math.hypot(2.5, t) ** 0.25, rel=1e-12)


def test_rademacher_errors():
    s = ConvexityStrip(0, 1, 1, 1, 1, 0, 0)
    with pytest.raises(DomainError):
        rademacher_bound(s, 1.01, 0)
    for bad in [(1, 0, 1, 1, 1, 0, 0), (0, 1, 0, 1, 1, 0, 0), (0, 1, 1, 1, 1, 0, 1), (0, 1, 1, 0, 1, 0, 0)]:
        with pytest.raises(DomainError):
            ConvexityStrip(*bad)


def test_rademacher_log_affine_random():
    rng = random.Random(7)
    for _ in range(50):
        a = rng.uniform(-2, 1)
        b = a + rng.uniform(0.1, 3)
        P = -a + rng.uniform(0.1, 3)
        alpha = rng.uniform(0, 3)
        s = ConvexityStrip(a, b, P, rng.uniform(0.1, 5), rng.uniform(0.1, 5), alpha, alpha)
        t = rng.uniform(-20, 20)
        s1, s2 = sorted(rng.uniform(a, b) for _ in range(2))
        mid = (s1 + s2) / 2
        lhs = math.log(rademacher_bound(s, mid, t))
        rhs = (math.log(rademacher_bound(s, s1, t)) + math.log(rademacher_bound(s, s2, t))) / 2
        # modulus varies with sigma, so subtract the alpha log|P + s| part
        mod = lambda x: alpha * math.log(math.hypot(P + x, t))
        assert lhs - mod(mid) == pytest.approx(rhs - (mod(s1) + mod(s2)) / 2, abs=1e-10)


def test_bound_examples():
    assert evaluate_bound("psi1", {"N": 1}).value == 1
    assert evaluate_bound("psi1", {"N": 2}).value == 15
    assert evaluate_bound("trace_t0_bound", {"k": 10, "N": 1}).value == pytest.approx(
        40 / (3 * math.sqrt(3) * math.pi)
    )
    assert evaluate_bound("phi_ell", {"ell": 100, "N": 6}).value == pytest.approx(
        math.log(600) ** 2 / (math.log(2) * math.log(3))
    )
    assert evaluate_bound("phi_ell", {"ell": 100, "N": 6}).value == pytest.approx(53.73, abs=0.01)


def test_psi2_branches():
    r = evaluate_bound("psi2", {"k": 12, "N": 1})
    assert r.branch == "power"
    L = math.log(12)
    level_factor = math.exp(math.log(2) / math.log(math.log(3)))
    assert r.value == pytest.approx(12**3 * L**10 * level_factor * 144 * L**16)
    assert evaluate_bound("psi2", {"k": 2, "N": 30030}).branch in ("product", "power")


def test_d_const_against_direct_formula():
    for k, N in [(12, 1), (10, 2), (24, 30)]:
        direct = 2 * math.pi**2 * (4 * math.pi) ** (k - 1) / math.factorial(k - 1)
        for p in (2, 3, 5):
            if N % p == 0:
                direct *= 1 + 1 / p
        assert evaluate_bound("d_const", {"k": k, "N": N}).value == pytest.approx(direct, rel=1e-12)


def test_thm_bounds_scale_with_constants():
    base = evaluate_bound("thm1_bound", {"k": 12, "N": 1}).value
    assert base == pytest.approx(12**5 * math.log(12) ** 26 * math.exp(math.log(2) / math.log(math.log(3))))
    zero = evaluate_bound("thm1_bound", {"k": 12, "N": 1}, BoundParams(c2=0)).value
    assert zero < base
    assert evaluate_bound("thm2_threshold", {"k": 12, "N": 1}).value > base
    assert evaluate_bound("nu_bound", {"N": 30}).value == pytest.approx(
        1.01 * math.log(30) / math.log(math.log(30))
    )


def test_bound_errors():
    with pytest.raises(DomainError):
        evaluate_bound("nope", {})
    with pytest.raises(DomainError):
        evaluate_bound("psi2", {"k": 1, "N": 1})
    with pytest.raises(DomainError):
        evaluate_bound("thm1_bound", {"k": 12, "N": 4})
    with pytest.raises(DomainError):
        evaluate_bound("psi1", {})
    with pytest.raises(DomainError):
        evaluate_bound("nu_bound", {"N": 2})
    with pytest.raises(DomainError):
        BoundParams(eps=0)
    with pytest.raises(DomainError):
        BoundParams.from_assignments(["c9=1"])
    assert BoundParams.from_assignments(["c2=0.5"]).c2 == 0.5
    assert len(BOUND_NAMES) == 8


def test_bound_csv_row():
    row = evaluate_bound("psi1", {"N": 2}).csv_row()
    assert row == "psi1,2,15,"


def test_zeta_n():
    z = zeta_n_factor(1, 2, 10**6)
    assert abs(z.value - math.pi**2 / 6) < 1e-4
    assert z.tail_bound == pytest.approx(1e-6)
    assert zeta_n_factor(2, 2, 10**6).value == pytest.approx(math.pi**2 / 8, abs=1e-4)
    assert zeta_n_factor(5, 3, 0).value == 1
    with pytest.raises(DomainError):
        zeta_n_factor(1, 1, 100)


def test_window_helpers():
    assert window_length(100) == math.ceil(100 ** (13 / 14))
    pts = log_spaced_points(100, 100_000, 40)
    assert len(pts) == 40 and pts[0] == 100 and pts[-1] == 100_000
    assert pts == sorted(pts)


def test_sign_windows_small():
    f = DELTA.qexp(2000)
    reports = sign_change_windows(f, [1, 10, 100, 1000])
    assert reports[0].x == 1 and reports[0].h == 1
    assert (reports[0].n_plus, reports[0].n_minus) == (None, 2)
    assert not reports[0].has_sign_change
    for rep in reports[1:]:
        assert rep.has_sign_change
        assert f[rep.n_plus] > 0 and f[rep.n_minus] < 0
        assert rep.x < min(rep.n_plus, rep.n_minus) and max(rep.n_plus, rep.n_minus) <= rep.x + rep.h
    with pytest.raises(DomainError):
        sign_change_windows(f, [1990])

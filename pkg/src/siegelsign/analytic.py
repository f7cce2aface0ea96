"""Floating-point diagnostics: normalized Hecke coefficients, Rankin-Selberg
partial sums, the Rademacher interpolation bound, and explicit bound formulas.

Everything here is binary64. Exact arithmetic stays in the algebraic modules;
sign decisions (``sign_change_windows``) read the exact integer coefficients.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass, fields
from typing import Iterable, Sequence

import numpy as np

from .errors import DomainError
from .numtheory import divisor_count_table, is_squarefree, prime_divisors, primes_upto
from .series import NewformSpec, QExpansion
from .siegel import TRACE_T0_CONSTANT, psi1

DELIGNE_TOLERANCE = 1e-9


def normalized_from_qexp(f: QExpansion, k: int, up_to: int | None = None) -> np.ndarray:
    """lam[n] = a(n) / n^((k-1)/2) for 1 <= n <= up_to; lam[0] is 0."""
    up_to = f.precision if up_to is None else up_to
    f = f.truncate(up_to)
    lam = np.zeros(up_to + 1)
    if up_to == 0:
        return lam
    den = f.denominator
    lam[1:] = [c / den for c in f.numerators[1:]]
    n = np.arange(1, up_to + 1, dtype=float)
    lam[1:] /= n ** ((k - 1) / 2)
    return lam


def normalized_coeffs(f: NewformSpec, up_to: int) -> np.ndarray:
    """Normalized coefficients lambda_f(n), indexed directly by n (entry 0 unused)."""
    return normalized_from_qexp(f.qexp(up_to), f.weight, up_to)


def deligne_check(f: NewformSpec, up_to: int) -> list[int]:
    """All n <= up_to with |lambda_f(n)| > tau(n) + 1e-9."""
    lam = normalized_coeffs(f, up_to)
    tau = divisor_count_table(up_to)
    bad = np.nonzero(np.abs(lam[1:]) > tau[1:] + DELIGNE_TOLERANCE)[0] + 1
    return [int(n) for n in bad]


def rs_main_term_constant(N: int) -> float:
    """(6 / pi^2) prod_{p | N} (1 + 1/p)^(-1)."""
    if not is_squarefree(N):
        raise DomainError(f"level {N} is not square-free")
    c = 6 / math.pi**2
    for p in prime_divisors(N):
        c /= 1 + 1 / p
    return c


_MODES = {
    # mode: (power of lambda, power of log(x/n), main-term multiplier)
    "square_raw": (2, 0, 1),
    "square_log": (2, 1, 1),
    "square_log2": (2, 2, 2),
    "linear_raw": (1, 0, 0),
    "linear_log": (1, 1, 0),
}


@dataclass(frozen=True)
class PartialSumReport:
    x: int
    mode: str
    raw_sum: float
    smoothed_log: float
    smoothed_log2: float
    main_term: float
    normalized_slope: float

    @property
    def value(self) -> float:
        """The sum selected by ``mode``."""
        j = _MODES[self.mode][1]
        return (self.raw_sum, self.smoothed_log, self.smoothed_log2)[j]

    def to_dict(self) -> dict:
        return {
            "x": self.x,
            "raw": self.raw_sum,
            "log": self.smoothed_log,
            "log2": self.smoothed_log2,
            "main_term": self.main_term,
            "slope": self.normalized_slope,
        }


def partial_sums(lam: np.ndarray, x: int, mode: str, level: int = 1) -> PartialSumReport:
    """Partial-sum report for precomputed normalized coefficients ``lam``."""
    if mode not in _MODES:
        raise DomainError(f"unknown partial-sum mode {mode!r}; known: {', '.join(_MODES)}")
    if x < 1:
        raise DomainError("x must be >= 1")
    if x >= len(lam):
        raise DomainError(f"need coefficients up to {x}, have {len(lam) - 1}")
    e, j, w = _MODES[mode]
    terms = lam[1 : x + 1] ** e
    logs = np.log(x / np.arange(1, x + 1, dtype=float))
    raw = float(np.sum(terms))
    log1 = float(np.sum(terms * logs))
    log2 = float(np.sum(terms * logs * logs))
    main = rs_main_term_constant(level) * x * w
    selected = (raw, log1, log2)[j]
    return PartialSumReport(x, mode, raw, log1, log2, main, selected / x)


def rs_partial_sum(f: NewformSpec, x: int, mode: str) -> PartialSumReport:
    """sum_{n <= x} lambda^e(n) log^j(x/n) with lambda(1) = 1 normalization.

    The stated main terms belong to the Petersson normalization, so only the
    slope (selected sum / x) is comparable across windows.
    """
    if mode not in _MODES:
        raise DomainError(f"unknown partial-sum mode {mode!r}; known: {', '.join(_MODES)}")
    return partial_sums(normalized_coeffs(f, max(x, 1)), x, mode, f.level)


@dataclass(frozen=True)
class ConvexityStrip:
    a: float
    b: float
    P: float
    E: float
    F: float
    alpha: float
    beta: float

    def __post_init__(self):
        if not self.a < self.b:
            raise DomainError("strip needs a < b")
        if not self.P + self.a > 0:
            raise DomainError("strip needs P + a > 0")
        if not (self.E > 0 and self.F > 0):
            raise DomainError("edge constants E, F must be positive")
        if not self.alpha >= self.beta:
            raise DomainError("strip needs alpha >= beta")


def rademacher_bound(strip: ConvexityStrip, sigma: float, t: float) -> float:
    """Interior bound (E|P+s|^alpha)^((b-sigma)/(b-a)) (F|P+s|^beta)^((sigma-a)/(b-a))."""
    a, b = strip.a, strip.b
    if not a <= sigma <= b:
        raise DomainError(f"sigma = {sigma} outside the strip [{a}, {b}]")
    modulus = math.hypot(strip.P + sigma, t)
    left = (b - sigma) / (b - a)
    right = (sigma - a) / (b - a)
    return (strip.E * modulus**strip.alpha) ** left * (strip.F * modulus**strip.beta) ** right


@dataclass(frozen=True)
class BoundParams:
    """Unspecified absolute constants of the explicit bounds, all defaulting to 1."""

    c1: float = 1.0
    c2: float = 1.0
    c3: float = 1.0
    c4: float = 1.0
    c5: float = 1.0
    c6: float = 1.0
    c7: float = 1.0
    c_prime: float = 1.0
    a1: float = 1.0
    a2: float = 1.0
    c_tilde: float = 1.0
    eps: float = 0.01

    def __post_init__(self):
        for f in fields(self):
            v = getattr(self, f.name)
            if not math.isfinite(v) or v < 0:
                raise DomainError(f"constant {f.name} must be finite and non-negative")
        if self.eps <= 0:
            raise DomainError("eps must be positive")

    @classmethod
    def from_assignments(cls, items: Iterable[str]) -> BoundParams:
        """Build from ``name=value`` strings, as given on the command line."""
        known = {f.name for f in fields(cls)}
        values = {}
        for item in items:
            name, sep, value = item.partition("=")
            if not sep or name not in known:
                raise DomainError(f"bad constant {item!r}; known: {', '.join(sorted(known))}")
            try:
                values[name] = float(value)
            except ValueError:
                raise DomainError(f"constant {name} needs a decimal value") from None
        return cls(**values)


@dataclass(frozen=True)
class BoundResult:
    name: str
    params: dict
    value: float
    branch: str = ""

    def csv_row(self) -> str:
        """``name,params...,value,branch`` with parameters in declaration order."""
        parts = [self.name] + [str(v) for v in self.params.values()]
        return ",".join(parts + [format(self.value, ".17g"), self.branch])

    def to_dict(self) -> dict:
        return asdict(self)


def _level_exponential(c: float, N: int) -> float:
    return math.exp(c * math.log(N + 1) / math.log(math.log(N + 2)))


def _need(params: dict, *names: str) -> list:
    missing = [n for n in names if params.get(n) is None]
    if missing:
        raise DomainError(f"missing parameter(s): {', '.join(missing)}")
    return [params[n] for n in names]


def _positive(**values):
    for name, v in values.items():
        if v <= 0:
            raise DomainError(f"{name} must be positive, got {v}")


def _squarefree(N: int):
    if not is_squarefree(N):
        raise DomainError(f"level {N} is not square-free")


def _log_product(value: float, N: int) -> float:
    """prod_{p | N} log(value) / log p."""
    out = 1.0
    for p in prime_divisors(N):
        out *= math.log(value) / math.log(p)
    return out


def _psi2(k: float, N: int, consts: BoundParams) -> tuple[float, str]:
    log_kn = math.log(k * N)
    product = _log_product(k * N, N)
    power = k**2 * math.sqrt(N) * log_kn**16
    branch = "product" if product > power else "power"
    value = (
        k**3 * N**4 * log_kn**10 * _level_exponential(consts.c1, N) * max(product, power)
    )
    return value, branch


def evaluate_bound(name: str, params: dict, consts: BoundParams | None = None) -> BoundResult:
    """Evaluate one of the explicit bound formulas in floating point.

    ``params`` holds the formula inputs (``k``, ``N``, ``ell``); unspecified
    absolute constants come from ``consts``.
    """
    consts = consts or BoundParams()
    branch = ""
    if name == "psi1":
        (N,) = _need(params, "N")
        _positive(N=N)
        used = {"N": N}
        value = float(psi1(N))
    elif name == "trace_t0_bound":
        k, N = _need(params, "k", "N")
        _positive(k=k, N=N)
        used = {"k": k, "N": N}
        value = TRACE_T0_CONSTANT * k * float(psi1(N))
    elif name == "psi2":
        k, N = _need(params, "k", "N")
        if k < 2:
            raise DomainError("psi2 needs k >= 2")
        _positive(N=N)
        _squarefree(N)
        used = {"k": k, "N": N}
        value, branch = _psi2(k, N, consts)
    elif name == "phi_ell":
        ell, N = _need(params, "ell", "N")
        _positive(ell=ell, N=N)
        _squarefree(N)
        if ell * N < 2:
            raise DomainError("phi_ell needs ell * N >= 2")
        used = {"ell": ell, "N": N}
        value = _log_product(ell * N, N)
    elif name == "d_const":
        k, N = _need(params, "k", "N")
        if k < 2:
            raise DomainError("d_const needs k >= 2")
        _positive(N=N)
        _squarefree(N)
        used = {"k": k, "N": N}
        # large k overflows (4 pi)^(k-1) on its own; combine in log space
        log_value = (
            math.log(2 * math.pi**2) + (k - 1) * math.log(4 * math.pi) - math.lgamma(k)
        )
        value = math.exp(log_value)
        for p in prime_divisors(N):
            value *= 1 + 1 / p
    elif name == "thm1_bound":
        k, N = _need(params, "k", "N")
        if k < 2:
            raise DomainError("thm1_bound needs k >= 2")
        _positive(N=N)
        _squarefree(N)
        used = {"k": k, "N": N}
        value = k**5 * math.log(k) ** 26 * N**19.5 * _level_exponential(consts.c2, N)
    elif name == "thm2_threshold":
        k, N = _need(params, "k", "N")
        if k < 2:
            raise DomainError("thm2_threshold needs k >= 2")
        _positive(N=N)
        _squarefree(N)
        used = {"k": k, "N": N}
        value = float(k) ** 42 * float(N) ** 84 * math.log(k) ** 80 * _level_exponential(
            consts.c7, N
        )
    elif name == "nu_bound":
        (N,) = _need(params, "N")
        if N < 3:
            raise DomainError("nu_bound needs N >= 3 so that log log N > 0")
        used = {"N": N}
        value = (1 + consts.eps) * math.log(N) / math.log(math.log(N))
    else:
        raise DomainError(f"unknown bound {name!r}; known: {', '.join(BOUND_NAMES)}")
    return BoundResult(name, used, value, branch)


BOUND_PARAMETERS = {
    "psi1": ("N",),
    "psi2": ("k", "N"),
    "phi_ell": ("ell", "N"),
    "d_const": ("k", "N"),
    "thm1_bound": ("k", "N"),
    "thm2_threshold": ("k", "N"),
    "nu_bound": ("N",),
    "trace_t0_bound": ("k", "N"),
}
BOUND_NAMES = tuple(BOUND_PARAMETERS)


@dataclass(frozen=True)
class ZetaNResult:
    value: float
    tail_bound: float


def zeta_n_factor(N: int, s: float, terms: int) -> ZetaNResult:
    """Truncated Euler product prod_{p <= terms, p !| N} (1 - p^-s)^-1.

    ``tail_bound`` bounds the omitted sum over p > terms of p^-s by the
    integral terms^(1-s) / (s - 1).
    """
    if s <= 1:
        raise DomainError("zeta_N is only evaluated for s > 1")
    primes = primes_upto(terms)
    bad = set(prime_divisors(N)) if N > 1 else set()
    if bad:
        primes = primes[~np.isin(primes, list(bad))]
    value = float(np.exp(-np.sum(np.log1p(-(primes.astype(float) ** -s)))))
    tail = max(terms, 1) ** (1 - s) / (s - 1)
    return ZetaNResult(value, tail)


@dataclass(frozen=True)
class WindowReport:
    x: int
    h: int
    n_plus: int | None
    n_minus: int | None

    @property
    def has_sign_change(self) -> bool:
        return self.n_plus is not None and self.n_minus is not None


def window_length(x: int, exponent: float = 13 / 14) -> int:
    return math.ceil(x**exponent)


def sign_change_windows(
    f: QExpansion, xs: Sequence[int], exponent: float = 13 / 14
) -> list[WindowReport]:
    """For each x, the first n in (x, x + ceil(x^exponent)] with a(n) > 0 and with a(n) < 0."""
    out = []
    nums = f.numerators
    for x in xs:
        h = window_length(x, exponent)
        if x + h > f.precision:
            raise DomainError(
                f"window ({x}, {x + h}] exceeds the stored precision {f.precision}"
            )
        n_plus = n_minus = None
        for n in range(x + 1, x + h + 1):
            c = nums[n]
            if c > 0 and n_plus is None:
                n_plus = n
            elif c < 0 and n_minus is None:
                n_minus = n
            if n_plus is not None and n_minus is not None:
                break
        out.append(WindowReport(x, h, n_plus, n_minus))
    return out


def log_spaced_points(lo: int, hi: int, count: int) -> list[int]:
    """``count`` integers spaced logarithmically from lo to hi inclusive."""
    return [int(round(v)) for v in np.geomspace(lo, hi, count)]

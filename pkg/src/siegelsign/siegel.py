"""Degree-two Siegel cusp form expansions, the Maass lift, and sign-change scanners.

Coefficients are indexed by half-integral matrices T = [[n, r/2], [r/2, m]]
and stored densely for every T with tr T <= trace_bound.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from math import gcd, isqrt
from typing import Iterator, Mapping, NamedTuple

from .errors import DomainError, PrecisionError, UndecidedError
from .jacobi import JacobiExpansion
from .numtheory import divisors, prime_divisors

TRACE_T0_CONSTANT = 4 / (3 * math.sqrt(3) * math.pi)


@dataclass(frozen=True, order=True)
class HalfIntMatrix:
    n: int
    r: int
    m: int

    def __post_init__(self):
        if self.n < 1 or self.m < 1 or 4 * self.n * self.m - self.r * self.r <= 0:
            raise DomainError(f"({self.n}, {self.r}, {self.m}) is not positive definite")

    @property
    def trace(self) -> int:
        return self.n + self.m

    @property
    def discriminant(self) -> int:
        return 4 * self.n * self.m - self.r * self.r

    def as_tuple(self) -> tuple[int, int, int]:
        return (self.n, self.r, self.m)


def _r_bound(n: int, m: int) -> int:
    """Largest r >= 0 with r^2 < 4nm."""
    return isqrt(4 * n * m - 1)


def enumerate_matrices(trace: int) -> list[HalfIntMatrix]:
    """All positive definite T of the given trace, ascending in n then r."""
    out = []
    for n in range(1, trace):
        m = trace - n
        top = _r_bound(n, m)
        out.extend(HalfIntMatrix(n, r, m) for r in range(-top, top + 1))
    return out


@dataclass(frozen=True, eq=False)
class SiegelExpansion:
    weight: int
    level: int
    trace_bound: int
    coeffs: Mapping[tuple[int, int, int], Fraction]

    def __getitem__(self, T) -> Fraction:
        n, r, m = T.as_tuple() if isinstance(T, HalfIntMatrix) else T
        if n + m > self.trace_bound:
            raise PrecisionError(
                f"a({n}, {r}, {m}) has trace {n + m} beyond the bound {self.trace_bound}"
            )
        if n < 1 or m < 1 or 4 * n * m <= r * r:
            raise DomainError(f"({n}, {r}, {m}) is not positive definite")
        return self.coeffs.get((n, r, m), Fraction(0))

    @classmethod
    def zero(cls, weight: int, trace_bound: int, level: int = 1) -> SiegelExpansion:
        return cls(weight, level, trace_bound, {})

    def matrices(self, lo: int = 2, hi: int | None = None) -> Iterator[HalfIntMatrix]:
        """Every T with lo <= tr T <= hi in trace order, then (n, r)."""
        hi = self.trace_bound if hi is None else hi
        for t in range(lo, hi + 1):
            yield from enumerate_matrices(t)

    def items(self) -> Iterator[tuple[HalfIntMatrix, Fraction]]:
        for T in self.matrices():
            yield T, self[T]

    def is_zero(self) -> bool:
        return not any(self.coeffs.values())

    def __repr__(self):
        return (
            f"SiegelExpansion(weight={self.weight}, level={self.level}, "
            f"trace_bound={self.trace_bound})"
        )


def required_jacobi_precision(trace_bound: int) -> int:
    """max n*m over n + m <= trace_bound."""
    return trace_bound * trace_bound // 4


def maass_lift(phi: JacobiExpansion, trace_bound: int) -> SiegelExpansion:
    """Maass (Saito-Kurokawa) lift a(n,r,m) = sum_{d | (n,r,m)} d^(k-1) c(nm/d^2, r/d)."""
    if phi.index != 1 or not phi.is_cusp:
        raise DomainError("the Maass lift takes an index-one Jacobi cusp form")
    need = required_jacobi_precision(trace_bound)
    if phi.precision < need:
        raise PrecisionError(
            f"Maass lift to trace {trace_bound} needs Jacobi precision {need}, "
            f"got {phi.precision}"
        )
    k = phi.weight
    coeffs = {}
    for t in range(2, trace_bound + 1):
        for n in range(1, t):
            m = t - n
            top = _r_bound(n, m)
            for r in range(-top, top + 1):
                total = Fraction(0)
                for d in divisors(gcd(gcd(n, r), m)):
                    total += d ** (k - 1) * phi[n * m // (d * d), r // d]
                coeffs[n, r, m] = total
    return SiegelExpansion(k, 1, trace_bound, coeffs)


def fourier_jacobi_slice(F: SiegelExpansion, m: int) -> JacobiExpansion:
    """phi_m(tau, z) with c(n, r) = a(n, r, m) for n <= trace_bound - m."""
    if m < 1:
        raise DomainError("Fourier-Jacobi index must be positive")
    if F.trace_bound < m + 1:
        raise PrecisionError(
            f"slice m = {m} needs trace_bound >= {m + 1}, have {F.trace_bound}"
        )
    precision = F.trace_bound - m
    coeffs = {}
    for n in range(1, precision + 1):
        top = _r_bound(n, m)
        for r in range(-top, top + 1):
            coeffs[n, r] = F[n, r, m]
    return JacobiExpansion(F.weight, m, precision, coeffs, True)


def psi1(N: int) -> Fraction:
    """Index [Gamma_2 : Gamma_0^(2)(N)] = N^3 prod_{p | N} (1 + 1/p)(1 + 1/p^2)."""
    if N < 1:
        raise DomainError("level must be positive")
    value = Fraction(N**3)
    for p in prime_divisors(N):
        value *= (1 + Fraction(1, p)) * (1 + Fraction(1, p * p))
    return value


def trace_t0_bound(k: int, N: int) -> float:
    return TRACE_T0_CONSTANT * k * float(psi1(N))


class MinimalTrace(NamedTuple):
    t0: HalfIntMatrix
    bound_ok: bool
    bound_value: float


def minimal_nonzero_trace(F: SiegelExpansion) -> MinimalTrace:
    for T in F.matrices():
        if F[T]:
            bound = trace_t0_bound(F.weight, F.level)
            return MinimalTrace(T, T.trace <= bound, bound)
    raise DomainError("no nonzero coefficient found")


def _check_interval(F: SiegelExpansion, lo: int, hi: int):
    if hi > F.trace_bound:
        raise PrecisionError(
            f"interval ({lo}, {hi}] exceeds the stored trace bound {F.trace_bound}"
        )


@dataclass(frozen=True)
class SignChangeReport:
    interval: tuple[int, int]
    t_plus: HalfIntMatrix | None
    t_minus: HalfIntMatrix | None
    positives: int
    negatives: int

    @property
    def counts(self) -> tuple[int, int]:
        return (self.positives, self.negatives)

    @property
    def has_sign_change(self) -> bool:
        return self.t_plus is not None and self.t_minus is not None

    def to_dict(self) -> dict:
        def mat(T):
            return None if T is None else list(T.as_tuple())

        return {
            "counts": {"negatives": self.negatives, "positives": self.positives},
            "interval": list(self.interval),
            "t_minus": mat(self.t_minus),
            "t_plus": mat(self.t_plus),
        }


def scan_signs(F: SiegelExpansion, x: int, h: int) -> SignChangeReport:
    """First positive and negative coefficients, and sign counts, for tr T in (x, x+h]."""
    if h < 0:
        raise DomainError("interval length must be non-negative")
    _check_interval(F, x, x + h)
    t_plus = t_minus = None
    pos = neg = 0
    for T in F.matrices(max(x + 1, 2), x + h):
        a = F[T]
        if a > 0:
            pos += 1
            t_plus = t_plus or T
        elif a < 0:
            neg += 1
            t_minus = t_minus or T
    return SignChangeReport((x, x + h), t_plus, t_minus, pos, neg)


class FirstSignChange(NamedTuple):
    t1: HalfIntMatrix
    t2: HalfIntMatrix
    max_trace: int


def first_sign_change(F: SiegelExpansion) -> FirstSignChange:
    """Minimal-trace T1 with a(T1) > 0 and T2 with a(T2) < 0."""
    if F.is_zero():
        raise DomainError("no nonzero coefficient found")
    t1 = t2 = None
    for T in F.matrices():
        a = F[T]
        if a > 0 and t1 is None:
            t1 = T
        elif a < 0 and t2 is None:
            t2 = T
        if t1 is not None and t2 is not None:
            return FirstSignChange(t1, t2, max(t1.trace, t2.trace))
    raise UndecidedError(
        f"only one sign occurs up to trace {F.trace_bound}: undecided at this truncation"
    )


class SignCounts(NamedTuple):
    positives: int
    negatives: int


def count_signs_interval(F: SiegelExpansion, x: int) -> SignCounts:
    """Numbers of T with tr T in (x, 2x] and a(T) > 0, respectively < 0."""
    report = scan_signs(F, x, x)
    return SignCounts(report.positives, report.negatives)


def dump_siegel(F: SiegelExpansion) -> str:
    lines = [f"#siegel k={F.weight} N={F.level} trace_bound={F.trace_bound}"]
    for T, a in F.items():
        lines.append(f"{T.n}\t{T.r}\t{T.m}\t{a}")
    return "\n".join(lines) + "\n"


def parse_siegel(text: str) -> SiegelExpansion:
    lines = text.splitlines()
    if not lines or not lines[0].startswith("#siegel "):
        raise DomainError("missing #siegel header")
    meta = dict(item.split("=", 1) for item in lines[0][8:].split())
    coeffs = {}
    for line in filter(None, lines[1:]):
        n, r, m, v = line.split("\t")
        coeffs[int(n), int(r), int(m)] = Fraction(v)
    return SiegelExpansion(int(meta["k"]), int(meta["N"]), int(meta["trace_bound"]), coeffs)

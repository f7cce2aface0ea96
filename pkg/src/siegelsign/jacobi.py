"""Jacobi forms of index one, their Taylor development in z, and B(n) sums."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from math import isqrt
from typing import Iterator, Mapping

from .errors import DomainError, PrecisionError, UndecidedError
from .numtheory import (
    bernoulli_number,
    divisors,
    fundamental_decomposition,
    generalized_bernoulli,
    kronecker,
    mobius,
    sigma,
)
from .series import QExpansion, eisenstein_qexp


@lru_cache(maxsize=None)
def cohen_h(r: int, N: int) -> Fraction:
    """Cohen's generalized class number H(r, N); H(1, N) is the Hurwitz class number."""
    if r < 1:
        raise DomainError(f"Cohen's function needs r >= 1, got {r}")
    if N < 0:
        return Fraction(0)
    if N == 0:
        return -bernoulli_number(2 * r) / (2 * r)
    disc = (-1) ** r * N
    if disc % 4 not in (0, 1):
        return Fraction(0)
    D, f = fundamental_decomposition(disc)
    l_value = -generalized_bernoulli(r, D) / r
    total = 0
    for d in divisors(f):
        mu = mobius(d)
        if mu:
            total += mu * kronecker(D, d) * d ** (r - 1) * sigma(f // d, 2 * r - 1)
    return l_value * total


def _r_range(n: int, m: int, boundary: bool) -> range:
    """All r with r^2 < 4nm, or r^2 <= 4nm when ``boundary``."""
    bound = 4 * n * m
    top = isqrt(bound)
    if not boundary and top * top == bound:
        top -= 1
    return range(-top, top + 1)


@dataclass(frozen=True, eq=False)
class JacobiExpansion:
    """Fourier coefficients c(n, r) of a Jacobi form for 0 <= n <= precision."""

    weight: int
    index: int
    precision: int
    coeffs: Mapping[tuple[int, int], Fraction]
    is_cusp: bool

    def __post_init__(self):
        if self.index < 1:
            raise DomainError("Jacobi index must be positive")
        for (n, r), _ in self.coeffs.items():
            if n > self.precision or not self._in_support(n, r):
                raise DomainError(f"key ({n}, {r}) outside the Jacobi support")

    def _in_support(self, n: int, r: int) -> bool:
        d = 4 * n * self.index - r * r
        return d > 0 or (d == 0 and not self.is_cusp)

    def __getitem__(self, key: tuple[int, int]) -> Fraction:
        n, r = key
        if n < 0 or n > self.precision:
            raise PrecisionError(
                f"c({n}, {r}) requested, Jacobi precision is {self.precision}"
            )
        return self.coeffs.get((n, r), Fraction(0))

    def __eq__(self, other):
        if not isinstance(other, JacobiExpansion):
            return NotImplemented
        return (
            (self.weight, self.index, self.precision) == (other.weight, other.index, other.precision)
            and self.nonzero_items() == other.nonzero_items()
        )

    def nonzero_items(self) -> dict[tuple[int, int], Fraction]:
        return {k: v for k, v in self.coeffs.items() if v}

    def keys(self) -> Iterator[tuple[int, int]]:
        """Support keys in ascending (n, r) order."""
        for n in range(self.precision + 1):
            for r in _r_range(n, self.index, not self.is_cusp):
                yield n, r

    def r_values(self, n: int) -> range:
        return _r_range(n, self.index, not self.is_cusp)

    def column(self, r: int) -> QExpansion:
        """The q-series n -> c(n, r) for fixed r."""
        return QExpansion.from_coefficients(
            [self[n, r] for n in range(self.precision + 1)]
        )

    def is_zero(self) -> bool:
        return not any(self.coeffs.values())

    def truncate(self, precision: int) -> JacobiExpansion:
        if precision > self.precision:
            raise PrecisionError(f"cannot extend precision {self.precision} to {precision}")
        return JacobiExpansion(
            self.weight,
            self.index,
            precision,
            {k: v for k, v in self.coeffs.items() if k[0] <= precision},
            self.is_cusp,
        )

    def __repr__(self):
        return (
            f"JacobiExpansion(weight={self.weight}, index={self.index}, "
            f"precision={self.precision}, cusp={self.is_cusp})"
        )


def jacobi_eisenstein(k: int, precision: int) -> JacobiExpansion:
    """Index-one Jacobi Eisenstein series E_{k,1} with c(0, 0) = 1."""
    if k not in (4, 6):
        raise DomainError(f"Jacobi Eisenstein series only for k in (4, 6), got {k}")
    norm = cohen_h(k - 1, 0)
    coeffs = {}
    for n in range(precision + 1):
        for r in _r_range(n, 1, True):
            coeffs[n, r] = cohen_h(k - 1, 4 * n - r * r) / norm
    return JacobiExpansion(k, 1, precision, coeffs, False)


def _times_elliptic(f: QExpansion, phi: JacobiExpansion) -> dict[tuple[int, int], Fraction]:
    """Coefficients of f(tau) * phi(tau, z), computed one r-column at a time."""
    out: dict[tuple[int, int], Fraction] = {}
    top = isqrt(4 * phi.precision * phi.index)
    f = f.truncate(phi.precision).with_metadata()
    for r in range(-top, top + 1):
        col = f * phi.column(r)
        for n, c in enumerate(col.coefficients()):
            if c:
                out[n, r] = c
    return out


def _combine(*terms: tuple[Fraction, dict]) -> dict[tuple[int, int], Fraction]:
    out: dict[tuple[int, int], Fraction] = {}
    for scalar, coeffs in terms:
        for key, v in coeffs.items():
            out[key] = out.get(key, Fraction(0)) + scalar * v
    return out


def jacobi_cusp_phi(k: int, precision: int) -> JacobiExpansion:
    """The index-one cusp forms phi_{10,1}, phi_{12,1} normalized by c(1, 1) = 1."""
    e4 = eisenstein_qexp(4, precision)
    e6 = eisenstein_qexp(6, precision)
    e41 = jacobi_eisenstein(4, precision)
    e61 = jacobi_eisenstein(6, precision)
    if k == 10:
        raw = _combine((Fraction(1, 144), _times_elliptic(e6, e41)),
                       (Fraction(-1, 144), _times_elliptic(e4, e61)))
    elif k == 12:
        raw = _combine((Fraction(1, 144), _times_elliptic(e4 * e4, e41)),
                       (Fraction(-1, 144), _times_elliptic(e6, e61)))
    else:
        raise DomainError(f"Jacobi cusp form only for k in (10, 12), got {k}")
    coeffs = {}
    for (n, r), v in raw.items():
        if 4 * n - r * r <= 0:
            if v:
                raise ArithmeticError(f"cusp combination left c({n},{r}) = {v}")
            continue
        coeffs[n, r] = v
    return JacobiExpansion(k, 1, precision, coeffs, True)


def taylor_coefficient(phi: JacobiExpansion, nu: int) -> QExpansion:
    """Normalized Taylor coefficient sum_n (sum_r c(n, r) r^nu) q^n.

    This is the z^nu coefficient of phi divided by (2 pi i)^nu / nu!.
    """
    if nu < 0:
        raise DomainError("Taylor index must be non-negative")
    coeffs = []
    for n in range(phi.precision + 1):
        coeffs.append(sum((phi[n, r] * r**nu for r in phi.r_values(n)), Fraction(0)))
    return QExpansion.from_coefficients(coeffs, weight=phi.weight if nu == 0 else None)


@dataclass(frozen=True)
class TaylorReport:
    alpha: int
    chi_alpha_normalized: QExpansion
    alpha_bound: int
    i_alpha_sign: int


def first_nonzero_taylor_index(phi: JacobiExpansion) -> TaylorReport:
    """Smallest even nu <= 2m whose normalized Taylor coefficient is nonzero."""
    if phi.is_zero():
        raise DomainError("the Jacobi form is zero to its stored precision")
    bound = 2 * phi.index
    for nu in range(0, bound + 1, 2):
        chi = taylor_coefficient(phi, nu)
        if not chi.is_zero():
            sign = 1 if nu % 4 == 0 else -1
            return TaylorReport(nu, chi.with_metadata(phi.weight + nu), bound, sign)
    raise UndecidedError(
        f"inconsistent input: all Taylor coefficients up to nu = {bound} vanish "
        f"at precision {phi.precision}; undecidable at this precision"
    )


def b_coefficients(phi: JacobiExpansion, nu: int, up_to: int) -> list[Fraction]:
    """[B~(1), ..., B~(up_to)] with B~(n) = sum_r c(n, r) r^nu."""
    if up_to > phi.precision:
        raise PrecisionError(
            f"B(n) requested up to {up_to}, Jacobi precision is {phi.precision}"
        )
    chi = taylor_coefficient(phi.truncate(up_to), nu)
    return chi.coefficients()[1:]


def dump_jacobi(phi: JacobiExpansion) -> str:
    lines = [f"#jacobi k={phi.weight} m={phi.index} precision={phi.precision}"]
    for n, r in phi.keys():
        lines.append(f"{n}\t{r}\t{phi[n, r]}")
    return "\n".join(lines) + "\n"


def parse_jacobi(text: str, is_cusp: bool = True) -> JacobiExpansion:
    lines = text.splitlines()
    if not lines or not lines[0].startswith("#jacobi "):
        raise DomainError("missing #jacobi header")
    meta = dict(item.split("=", 1) for item in lines[0][8:].split())
    coeffs = {}
    for line in filter(None, lines[1:]):
        n, r, v = line.split("\t")
        coeffs[int(n), int(r)] = Fraction(v)
    return JacobiExpansion(
        int(meta["k"]), int(meta["m"]), int(meta["precision"]), coeffs, is_cusp
    )

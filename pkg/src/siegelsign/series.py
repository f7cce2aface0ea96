"""Exact truncated q-expansions and a small catalog of elliptic modular forms.

A :class:`QExpansion` of precision ``P`` stores the coefficients of
``q**0 .. q**P`` as integer numerators over one common positive denominator.
Large products go through Kronecker substitution on GMP integers, which is
what makes 10**5-term eta products practical.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Mapping, Sequence

import gmpy2

from .errors import DomainError, PrecisionError
from .numtheory import bernoulli_number, is_squarefree, prime_divisors, sigma_table

_NAIVE_CUTOFF = 4096


def _naive_convolve(a: Sequence[int], b: Sequence[int], length: int) -> list[int]:
    out = [0] * length
    for i, x in enumerate(a[:length]):
        if x:
            for j, y in enumerate(b[: length - i]):
                out[i + j] += x * y
    return out


def _pack(coeffs: Sequence[int], nbytes: int) -> int:
    bits = 8 * nbytes
    mask = (1 << bits) - 1
    unsigned = b"".join((c & mask).to_bytes(nbytes, "little") for c in coeffs)
    flags = b"".join(
        (1 if c < 0 else 0).to_bytes(nbytes, "little") for c in coeffs
    )
    # two's-complement slots overshoot by 2**bits per negative entry, one slot up
    return int.from_bytes(unsigned, "little") - (
        int.from_bytes(flags, "little") << bits
    )


def _unpack(value: int, nbytes: int, count: int) -> list[int]:
    negative = value < 0
    if negative:
        value = -value
    raw = value.to_bytes(max(nbytes * count, (value.bit_length() + 7) // 8), "little")
    half = 1 << (8 * nbytes - 1)
    full = 1 << (8 * nbytes)
    out = []
    carry = 0
    for i in range(count):
        u = int.from_bytes(raw[i * nbytes : (i + 1) * nbytes], "little") + carry
        if u >= half:
            u -= full
            carry = 1
        else:
            carry = 0
        out.append(u)
    if negative:
        out = [-c for c in out]
    return out


def convolve(a: Sequence[int], b: Sequence[int], length: int) -> list[int]:
    """First ``length`` coefficients of the product of two integer polynomials."""
    a = list(a[:length])
    b = list(b[:length])
    if not a or not b:
        return [0] * length
    if len(a) * len(b) <= _NAIVE_CUTOFF:
        return _naive_convolve(a, b, length)
    bound = max(map(abs, a)) * max(map(abs, b)) * min(len(a), len(b))
    if bound == 0:
        return [0] * length
    nbytes = (bound.bit_length() + 2 + 7) // 8
    product = gmpy2.mpz(_pack(a, nbytes)) * gmpy2.mpz(_pack(b, nbytes))
    out = _unpack(int(product), nbytes, min(length, len(a) + len(b) - 1))
    return out + [0] * (length - len(out))


def _combine_level(a: int | None, b: int | None) -> int | None:
    if a is None or b is None:
        return None
    return math.lcm(a, b)


@dataclass(frozen=True)
class QExpansion:
    """Truncated series sum_{n=0}^{P} c_n q^n with exact rational c_n."""

    numerators: tuple[int, ...]
    denominator: int = 1
    weight: int | None = None
    level: int | None = None

    def __post_init__(self):
        if not self.numerators:
            raise DomainError("a q-expansion needs at least the constant term")
        if self.denominator == 0:
            raise DomainError("zero denominator")
        nums = tuple(int(c) for c in self.numerators)
        den = int(self.denominator)
        g = math.gcd(den, *nums)
        if den < 0:
            g = -g
        if g != 1:
            nums = tuple(c // g for c in nums)
            den //= g
        object.__setattr__(self, "numerators", nums)
        object.__setattr__(self, "denominator", den)

    @classmethod
    def from_coefficients(
        cls,
        coeffs: Iterable[int | Fraction],
        weight: int | None = None,
        level: int | None = None,
    ) -> QExpansion:
        fracs = [Fraction(c) for c in coeffs]
        den = math.lcm(*(c.denominator for c in fracs)) if fracs else 1
        return cls(
            tuple(c.numerator * (den // c.denominator) for c in fracs),
            den,
            weight,
            level,
        )

    @classmethod
    def constant(cls, value: int | Fraction, precision: int, weight=None, level=None):
        value = Fraction(value)
        return cls(
            (value.numerator,) + (0,) * precision, value.denominator, weight, level
        )

    @property
    def precision(self) -> int:
        return len(self.numerators) - 1

    def __getitem__(self, n: int) -> Fraction:
        if n < 0 or n > self.precision:
            raise PrecisionError(
                f"coefficient of q^{n} requested, precision is {self.precision}"
            )
        return Fraction(self.numerators[n], self.denominator)

    def coefficients(self) -> list[Fraction]:
        return [Fraction(c, self.denominator) for c in self.numerators]

    def is_integral(self) -> bool:
        return self.denominator == 1

    def is_zero(self) -> bool:
        return not any(self.numerators)

    def valuation(self) -> int | None:
        """Smallest exponent with a nonzero coefficient, None for the zero series."""
        for i, c in enumerate(self.numerators):
            if c:
                return i
        return None

    def same_coefficients(self, other: QExpansion) -> bool:
        """Exact coefficient equality on the common stored range."""
        p = min(self.precision, other.precision)
        return (
            self.truncate(p).numerators == other.truncate(p).numerators
            and self.truncate(p).denominator == other.truncate(p).denominator
        )

    def truncate(self, precision: int) -> QExpansion:
        if precision < 0:
            raise DomainError("precision must be >= 0")
        if precision > self.precision:
            raise PrecisionError(
                f"cannot extend precision {self.precision} to {precision}"
            )
        if precision == self.precision:
            return self
        return QExpansion(
            self.numerators[: precision + 1], self.denominator, self.weight, self.level
        )

    def with_metadata(self, weight=None, level=None) -> QExpansion:
        return QExpansion(self.numerators, self.denominator, weight, level)

    # arithmetic ------------------------------------------------------------

    def _addsub(self, other: QExpansion, sign: int) -> QExpansion:
        p = min(self.precision, other.precision)
        den = math.lcm(self.denominator, other.denominator)
        fa = den // self.denominator
        fb = sign * (den // other.denominator)
        nums = tuple(
            x * fa + y * fb
            for x, y in zip(self.numerators[: p + 1], other.numerators[: p + 1])
        )
        weight = self.weight if self.weight == other.weight else None
        return QExpansion(nums, den, weight, _combine_level(self.level, other.level))

    def __add__(self, other: QExpansion) -> QExpansion:
        return self._addsub(other, 1)

    def __sub__(self, other: QExpansion) -> QExpansion:
        return self._addsub(other, -1)

    def __neg__(self) -> QExpansion:
        return self.scale(-1)

    def scale(self, c: int | Fraction) -> QExpansion:
        c = Fraction(c)
        return QExpansion(
            tuple(x * c.numerator for x in self.numerators),
            self.denominator * c.denominator,
            self.weight,
            self.level,
        )

    def __mul__(self, other):
        if not isinstance(other, QExpansion):
            return self.scale(other)
        p = min(self.precision, other.precision)
        nums = convolve(self.numerators, other.numerators, p + 1)
        weight = (
            self.weight + other.weight
            if self.weight is not None and other.weight is not None
            else None
        )
        return QExpansion(
            tuple(nums),
            self.denominator * other.denominator,
            weight,
            _combine_level(self.level, other.level),
        )

    def __rmul__(self, other):
        return self.scale(other)

    def __pow__(self, e: int) -> QExpansion:
        if e < 0:
            raise DomainError("negative powers need inverse()")
        weight = self.weight * e if self.weight is not None else None
        result = QExpansion.constant(1, self.precision, weight, self.level)
        base = self
        while e:
            if e & 1:
                result = result * base
            e >>= 1
            if e:
                base = base * base
        return result.with_metadata(weight, self.level)

    def inverse(self) -> QExpansion:
        """Multiplicative inverse of a series with nonzero constant term (Newton)."""
        if self.numerators[0] == 0:
            raise DomainError("series with zero constant term is not invertible")
        c0 = Fraction(self.numerators[0], self.denominator)
        g = QExpansion.constant(1 / c0, 0)
        known = 0
        while known < self.precision:
            known = min(2 * known + 1, self.precision)
            f = self.truncate(known).with_metadata()
            g = QExpansion(g.numerators + (0,) * (known - g.precision), g.denominator)
            two = QExpansion.constant(2, known)
            g = g * (two - f * g)
        weight = -self.weight if self.weight is not None else None
        return g.with_metadata(weight, self.level)

    def __repr__(self):
        shown = ", ".join(str(c) for c in self.coefficients()[:8])
        more = ", ..." if self.precision >= 8 else ""
        return f"QExpansion([{shown}{more}], precision={self.precision})"


def qexp_arith(a: QExpansion, b, op: str) -> QExpansion:
    """Dispatch ``add``, ``sub``, ``mul``, ``scale`` (b rational) or ``pow`` (b int)."""
    if op == "add":
        return a + b
    if op == "sub":
        return a - b
    if op == "mul":
        return a * b
    if op == "scale":
        return a.scale(b)
    if op == "pow":
        return a**b
    raise DomainError(f"unknown q-expansion operation {op!r}")


def eisenstein_qexp(k: int, precision: int) -> QExpansion:
    """Level-one Eisenstein series of weight k normalized to constant term 1."""
    if k < 4 or k % 2:
        raise DomainError(f"Eisenstein series needs even weight >= 4, got {k}")
    factor = Fraction(-2 * k) / bernoulli_number(k)
    sig = sigma_table(precision, k - 1)
    return QExpansion.from_coefficients(
        [1] + [factor * s for s in sig[1:]], weight=k, level=1
    )


def euler_product(precision: int) -> list[int]:
    """Coefficients of prod_{n>=1} (1 - q^n) up to q^precision (pentagonal numbers)."""
    out = [0] * (precision + 1)
    out[0] = 1
    j = 1
    while True:
        p1 = j * (3 * j - 1) // 2
        if p1 > precision:
            break
        s = -1 if j % 2 else 1
        out[p1] += s
        p2 = j * (3 * j + 1) // 2
        if p2 <= precision:
            out[p2] += s
        j += 1
    return out


@dataclass(frozen=True)
class EtaQuotientSpec:
    """prod eta(d tau)^e with factors given as (d, e) pairs."""

    factors: tuple[tuple[int, int], ...] = ()

    def __post_init__(self):
        merged: dict[int, int] = {}
        for d, e in self.factors:
            if d < 1:
                raise DomainError(f"eta scale must be positive, got {d}")
            merged[d] = merged.get(d, 0) + e
        object.__setattr__(
            self, "factors", tuple(sorted((d, e) for d, e in merged.items() if e))
        )

    @property
    def leading_power(self) -> Fraction:
        return Fraction(sum(d * e for d, e in self.factors), 24)

    @property
    def weight(self) -> Fraction:
        return Fraction(sum(e for _, e in self.factors), 2)

    @classmethod
    def parse(cls, text: str) -> EtaQuotientSpec:
        """Parse ``"1^2,11^2"`` style specs (d^e, comma separated)."""
        factors = []
        for part in filter(None, (p.strip() for p in text.split(","))):
            d, sep, e = part.partition("^")
            try:
                factors.append((int(d), int(e) if sep else 1))
            except ValueError:
                raise DomainError(f"bad eta factor {part!r}") from None
        return cls(tuple(factors))

    def __str__(self):
        return ",".join(f"{d}^{e}" for d, e in self.factors)


def _dilate(coeffs: Sequence[int], d: int, precision: int) -> list[int]:
    out = [0] * (precision + 1)
    for i, c in enumerate(coeffs[: precision // d + 1]):
        out[i * d] = c
    return out


def eta_quotient(spec: EtaQuotientSpec, precision: int) -> QExpansion:
    """Exact q-expansion of an eta quotient with integral leading power."""
    lead = spec.leading_power
    if lead.denominator != 1 or lead < 0:
        raise DomainError(
            f"eta quotient {spec} has leading power {lead}, need a non-negative integer"
        )
    lead = int(lead)
    w = spec.weight
    weight = int(w) if w.denominator == 1 else None
    if lead > precision:
        return QExpansion((0,) * (precision + 1), 1, weight)
    body_prec = precision - lead
    base = QExpansion(tuple(euler_product(body_prec)))
    body = QExpansion.constant(1, body_prec)
    for d, e in spec.factors:
        part = base.truncate(body_prec // d)
        part = part ** abs(e) if e > 0 else (part ** abs(e)).inverse()
        dilated = QExpansion(tuple(_dilate(part.numerators, d, body_prec)), 1)
        body = body * dilated
    return QExpansion((0,) * lead + body.numerators, body.denominator, weight)


def v_operator(f: QExpansion, delta: int) -> QExpansion:
    """f(delta * tau): q^n -> q^(delta n), keeping the input precision."""
    if delta < 1:
        raise DomainError(f"V_delta needs delta >= 1, got {delta}")
    nums = _dilate(f.numerators, delta, f.precision)
    level = f.level * delta if f.level is not None else None
    return QExpansion(tuple(nums), f.denominator, f.weight, level)


def oldform_combination(
    f: QExpansion,
    k: int,
    d: int,
    N: int,
    signs: Mapping[int, int],
    precision: int | None = None,
) -> QExpansion:
    """f | prod_{p | N/d} (1 + eps_p p^{k/2} V_p), expanded over divisors of N/d."""
    if k % 2:
        raise DomainError("odd weight makes p^(k/2) irrational")
    if not is_squarefree(N):
        raise DomainError(f"level {N} is not square-free")
    if d < 1 or N % d:
        raise DomainError(f"{d} does not divide {N}")
    primes = prime_divisors(N // d)
    missing = [p for p in primes if p not in signs]
    if missing:
        raise DomainError(f"missing sign for primes {missing}")
    extra = sorted(set(signs) - set(primes))
    if extra:
        raise DomainError(f"signs given for primes {extra} not dividing N/d")
    if any(signs[p] not in (1, -1) for p in primes):
        raise DomainError("signs must be +1 or -1")
    if precision is not None:
        f = f.truncate(min(precision, f.precision))
    result = QExpansion((0,) * (f.precision + 1), 1)
    for mask in range(1 << len(primes)):
        delta, eps = 1, 1
        for i, p in enumerate(primes):
            if mask >> i & 1:
                delta *= p
                eps *= signs[p]
        term = v_operator(f, delta).scale(eps * delta ** (k // 2))
        result = result + term.with_metadata()
    return result.with_metadata(f.weight, N if f.weight is not None else None)


# newform catalog ---------------------------------------------------------

_CATALOG: dict[str, tuple[int, int, tuple[tuple[int, int], ...]]] = {
    "12.1": (12, 1, ((1, 24),)),
    "8.2": (8, 2, ((1, 8), (2, 8))),
    "6.3": (6, 3, ((1, 6), (3, 6))),
    "4.5": (4, 5, ((1, 4), (5, 4))),
    "2.11": (2, 11, ((1, 2), (11, 2))),
}

_expansion_cache: dict[str, QExpansion] = {}


@dataclass(frozen=True)
class NewformSpec:
    """A normalized newform of even weight and square-free level, given as an eta quotient."""

    weight: int
    level: int
    source: EtaQuotientSpec = field(compare=True)
    label: str = ""

    def __post_init__(self):
        if self.weight < 2 or self.weight % 2:
            raise DomainError(f"newform weight must be even and positive, got {self.weight}")
        if not is_squarefree(self.level):
            raise DomainError(f"level {self.level} is not square-free")

    def qexp(self, precision: int) -> QExpansion:
        """Exact coefficients a_f(0..precision); memoized by the largest precision seen."""
        key = f"{self.label}|{self.source}"
        cached = _expansion_cache.get(key)
        if cached is None or cached.precision < precision:
            cached = eta_quotient(self.source, precision).with_metadata(
                self.weight, self.level
            )
            _expansion_cache[key] = cached
        return cached.truncate(precision)


def catalog_labels() -> list[str]:
    return list(_CATALOG)


def newform_catalog(label: str) -> NewformSpec:
    """Look up a newform by ``"k.N"`` label."""
    if label not in _CATALOG:
        k, _, n = label.partition(".")
        if n.isdigit() and not is_squarefree(int(n)):
            raise DomainError(f"unknown newform {label!r}: level {n} is not square-free")
        raise DomainError(f"unknown newform {label!r}; known: {', '.join(_CATALOG)}")
    k, N, factors = _CATALOG[label]
    spec = NewformSpec(k, N, EtaQuotientSpec(factors), label)
    if spec.qexp(1)[1] != 1:
        raise DomainError(f"catalog entry {label} is not normalized")
    return spec


# coefficient cache file ----------------------------------------------------


def dump_qexp(f: QExpansion) -> str:
    weight = "unset" if f.weight is None else f.weight
    level = "unset" if f.level is None else f.level
    lines = [f"#qexp weight={weight} level={level} precision={f.precision}"]
    for n, c in enumerate(f.coefficients()):
        lines.append(f"{n}\t{c.numerator}/{c.denominator}")
    return "\n".join(lines) + "\n"


def parse_qexp(text: str) -> QExpansion:
    lines = text.splitlines()
    if not lines or not lines[0].startswith("#qexp "):
        raise DomainError("missing #qexp header")
    meta = dict(item.split("=", 1) for item in lines[0][6:].split())
    precision = int(meta["precision"])
    coeffs: list[Fraction] = []
    for expected, line in enumerate(filter(None, lines[1:])):
        n, value = line.split("\t")
        if int(n) != expected:
            raise DomainError(f"exponents out of order at line {expected + 2}")
        coeffs.append(Fraction(value))
    if len(coeffs) != precision + 1:
        raise DomainError(f"expected {precision + 1} coefficients, got {len(coeffs)}")

    def opt(key):
        return None if meta[key] == "unset" else int(meta[key])

    return QExpansion.from_coefficients(coeffs, opt("weight"), opt("level"))

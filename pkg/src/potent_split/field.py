"""Exact arithmetic in GF(p) and GF(p^m) for odd primes p.

An element of GF(p^m) = GF(p)[X]/(f) is a coefficient vector
(a_0, ..., a_{m-1}) of residues mod p, low-to-high.  Containers (matrices,
companion specs) store the packed integer code a_0 + a_1 p + ... + a_{m-1} p^{m-1},
which is a bijection onto [0, q).  The prime subfield is exactly the codes
in [0, p), so the integer t*1 has code t mod p.

Ordering by code is the "lexicographic over integer representatives" order
used for every enumeration in the package.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import Iterator, Sequence

from .errors import DivisionByZero, FieldMismatch, InvalidField, ParseError

# Smallest fields where the trace rejection direction is non-vacuous.
DEFAULT_MODULI: dict[tuple[int, int], tuple[int, ...]] = {
    (3, 2): (1, 0, 1),  # X^2 + 1
    (5, 2): (2, 0, 1),  # X^2 + 2
}


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    if n % 2 == 0:
        return n == 2
    d = 3
    while d * d <= n:
        if n % d == 0:
            return False
        d += 2
    return True


# -- polynomials over GF(p) as int lists, low-to-high, no trailing zeros --

def _trim(a: list[int]) -> list[int]:
    while a and a[-1] == 0:
        a.pop()
    return a


def _pmod(a: list[int], f: Sequence[int], p: int) -> list[int]:
    a = _trim([x % p for x in a])
    df = len(f) - 1
    inv_lead = pow(f[-1], -1, p)
    while len(a) - 1 >= df:
        c = a[-1] * inv_lead % p
        shift = len(a) - 1 - df
        for i, fi in enumerate(f):
            a[shift + i] = (a[shift + i] - c * fi) % p
        _trim(a)
    return a


def _pmul(a: Sequence[int], b: Sequence[int], p: int) -> list[int]:
    if not a or not b:
        return []
    out = [0] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if x:
            for j, y in enumerate(b):
                out[i + j] = (out[i + j] + x * y) % p
    return _trim(out)


def _psub(a: Sequence[int], b: Sequence[int], p: int) -> list[int]:
    n = max(len(a), len(b))
    out = [((a[i] if i < len(a) else 0) - (b[i] if i < len(b) else 0)) % p for i in range(n)]
    return _trim(out)


def _pgcd(a: list[int], b: list[int], p: int) -> list[int]:
    a, b = _trim(list(a)), _trim(list(b))
    while b:
        a, b = b, _pmod(a, b, p)
    if a:
        inv = pow(a[-1], -1, p)
        a = [x * inv % p for x in a]
    return a


def _ppowmod(base: list[int], e: int, f: Sequence[int], p: int) -> list[int]:
    result = [1]
    base = _pmod(base, f, p)
    while e:
        if e & 1:
            result = _pmod(_pmul(result, base, p), f, p)
        base = _pmod(_pmul(base, base, p), f, p)
        e >>= 1
    return result


def is_irreducible(modulus: Sequence[int], p: int) -> bool:
    """Irreducibility of a polynomial over GF(p) of degree >= 1.

    A reducible polynomial of degree m has a factor of degree d <= m/2, which
    divides X^{p^d} - X; so gcd(X^{p^i} - X, f) = 1 for all i <= m/2 suffices.
    """
    f = _trim([c % p for c in modulus])
    m = len(f) - 1
    if m < 1:
        return False
    if m == 1:
        return True
    x = [0, 1]
    xp = x
    for _ in range(1, m // 2 + 1):
        xp = _ppowmod(xp, p, f, p)
        if len(_pgcd(list(f), _psub(xp, x, p), p)) > 1:
            return False
    return True


@dataclass(frozen=True)
class FieldSpec:
    """The field GF(p^m), with `modulus` given low-to-high and monic."""

    p: int
    m: int = 1
    modulus: tuple[int, ...] | None = None
    q: int = field(init=False, repr=False, compare=False)

    def __post_init__(self) -> None:
        if not isinstance(self.p, int) or not is_prime(self.p) or self.p == 2:
            raise InvalidField(f"characteristic must be an odd prime, got {self.p}")
        if self.m < 1:
            raise InvalidField(f"extension degree must be >= 1, got {self.m}")
        if self.m == 1:
            if self.modulus is not None:
                raise InvalidField("a prime field takes no modulus")
        else:
            modulus = self.modulus
            if modulus is None:
                modulus = DEFAULT_MODULI.get((self.p, self.m))
                if modulus is None:
                    raise InvalidField(f"no default modulus for p={self.p} m={self.m}")
            modulus = tuple(int(c) for c in modulus)
            if len(modulus) != self.m + 1 or modulus[-1] != 1:
                raise InvalidField(f"modulus must be monic of degree {self.m}: {modulus}")
            if any(not 0 <= c < self.p for c in modulus):
                raise InvalidField(f"modulus coefficients must lie in [0, {self.p})")
            if not is_irreducible(modulus, self.p):
                raise InvalidField(f"modulus {modulus} is reducible over GF({self.p})")
            object.__setattr__(self, "modulus", modulus)
        object.__setattr__(self, "q", self.p ** self.m)

    # -- codes <-> coefficient vectors --

    def decode(self, x: int) -> tuple[int, ...]:
        p = self.p
        out = []
        for _ in range(self.m):
            x, r = divmod(x, p)
            out.append(r)
        return tuple(out)

    def encode(self, coeffs: Sequence[int]) -> int:
        if len(coeffs) != self.m:
            raise ValueError(f"expected {self.m} coefficients, got {len(coeffs)}")
        x = 0
        for c in reversed(coeffs):
            x = x * self.p + (c % self.p)
        return x

    # -- arithmetic on codes --

    def add(self, x: int, y: int) -> int:
        if self.m == 1:
            return (x + y) % self.p
        p = self.p
        return self.encode([(a + b) % p for a, b in zip(self.decode(x), self.decode(y))])

    def neg(self, x: int) -> int:
        if self.m == 1:
            return -x % self.p
        return self.encode([-a % self.p for a in self.decode(x)])

    def sub(self, x: int, y: int) -> int:
        if self.m == 1:
            return (x - y) % self.p
        p = self.p
        return self.encode([(a - b) % p for a, b in zip(self.decode(x), self.decode(y))])

    def mul(self, x: int, y: int) -> int:
        if self.m == 1:
            return x * y % self.p
        if x == 0 or y == 0:
            return 0
        prod = _pmod(_pmul(self.decode(x), self.decode(y), self.p), self.modulus, self.p)
        return self.encode(prod + [0] * (self.m - len(prod)))

    def pow(self, x: int, e: int) -> int:
        if e < 0:
            return self.pow(self.inv(x), -e)
        if self.m == 1:
            return pow(x, e, self.p)
        result, base = 1, x
        while e:
            if e & 1:
                result = self.mul(result, base)
            base = self.mul(base, base)
            e >>= 1
        return result

    def inv(self, x: int) -> int:
        if x == 0:
            raise DivisionByZero("inverse of zero")
        if self.m == 1:
            return pow(x, -1, self.p)
        return self.pow(x, self.q - 2)

    def div(self, x: int, y: int) -> int:
        return self.mul(x, self.inv(y))

    def dot(self, xs: Sequence[int], ys: Sequence[int]) -> int:
        if self.m == 1:
            return sum(a * b for a, b in zip(xs, ys)) % self.p
        acc = 0
        for a, b in zip(xs, ys):
            if a and b:
                acc = self.add(acc, self.mul(a, b))
        return acc

    # -- elements --

    def __call__(self, value: int | Sequence[int] | FieldElement) -> FieldElement:
        return FieldElement(self, self.code(value))

    def code(self, value: int | Sequence[int] | FieldElement) -> int:
        """Canonical code of an int (embedded as t*1), coefficient vector, or element."""
        if isinstance(value, FieldElement):
            if value.spec != self:
                raise FieldMismatch(f"element of {value.spec} used in {self}")
            return value.code
        if isinstance(value, int):
            return value % self.p
        return self.encode(list(value))

    @property
    def zero(self) -> FieldElement:
        return FieldElement(self, 0)

    @property
    def one(self) -> FieldElement:
        return FieldElement(self, 1)

    def int_embed(self, t: int) -> FieldElement:
        return FieldElement(self, t % self.p)

    def prime_subfield_index(self, x: int | FieldElement) -> int | None:
        code = x.code if isinstance(x, FieldElement) else x
        return code if code < self.p else None

    def elements(self) -> Iterator[FieldElement]:
        for c in range(self.q):
            yield FieldElement(self, c)

    # -- text syntax --

    def format(self, x: int) -> str:
        if self.m == 1:
            return str(x)
        return "[" + ",".join(str(c) for c in self.decode(x)) + "]"

    def parse(self, text: str) -> int:
        """Parse the element text syntax; entries must already be reduced."""
        text = text.strip()
        if self.m == 1:
            if not re.fullmatch(r"\d+", text):
                raise ParseError(f"bad element {text!r}")
            v = int(text)
            if v >= self.p:
                raise ParseError(f"element {v} not reduced mod {self.p}")
            return v
        m = re.fullmatch(r"\[\s*(\d+(?:\s*,\s*\d+)*)\s*\]", text)
        if not m:
            raise ParseError(f"bad element {text!r}")
        coeffs = [int(c) for c in m.group(1).split(",")]
        if len(coeffs) != self.m:
            raise ParseError(f"element {text!r} needs {self.m} coefficients")
        if any(c >= self.p for c in coeffs):
            raise ParseError(f"element {text!r} not reduced mod {self.p}")
        return self.encode(coeffs)

    def header(self) -> str:
        if self.m == 1:
            return f"field: p={self.p} m=1"
        return f"field: p={self.p} m={self.m} modulus=[{','.join(map(str, self.modulus))}]"

    def to_json(self) -> dict:
        return {"p": self.p, "m": self.m, "modulus": list(self.modulus) if self.modulus else None}

    @classmethod
    def from_json(cls, obj: dict) -> FieldSpec:
        modulus = obj.get("modulus")
        return cls(int(obj["p"]), int(obj.get("m", 1)), tuple(modulus) if modulus else None)

    def __str__(self) -> str:
        return f"GF({self.p})" if self.m == 1 else f"GF({self.p}^{self.m})"


@dataclass(frozen=True, slots=True)
class FieldElement:
    spec: FieldSpec
    code: int

    @property
    def coeffs(self) -> tuple[int, ...]:
        return self.spec.decode(self.code)

    def _other(self, other) -> int:
        if isinstance(other, FieldElement):
            if other.spec != self.spec:
                raise FieldMismatch(f"cannot combine {self.spec} and {other.spec}")
            return other.code
        if isinstance(other, int):
            return other % self.spec.p
        return NotImplemented

    def __add__(self, other):
        y = self._other(other)
        return NotImplemented if y is NotImplemented else FieldElement(self.spec, self.spec.add(self.code, y))

    __radd__ = __add__

    def __sub__(self, other):
        y = self._other(other)
        return NotImplemented if y is NotImplemented else FieldElement(self.spec, self.spec.sub(self.code, y))

    def __rsub__(self, other):
        y = self._other(other)
        return NotImplemented if y is NotImplemented else FieldElement(self.spec, self.spec.sub(y, self.code))

    def __mul__(self, other):
        y = self._other(other)
        return NotImplemented if y is NotImplemented else FieldElement(self.spec, self.spec.mul(self.code, y))

    __rmul__ = __mul__

    def __truediv__(self, other):
        y = self._other(other)
        if y is NotImplemented:
            return NotImplemented
        return FieldElement(self.spec, self.spec.div(self.code, y))

    def __rtruediv__(self, other):
        y = self._other(other)
        if y is NotImplemented:
            return NotImplemented
        return FieldElement(self.spec, self.spec.div(y, self.code))

    def __neg__(self):
        return FieldElement(self.spec, self.spec.neg(self.code))

    def __pow__(self, e: int):
        return FieldElement(self.spec, self.spec.pow(self.code, e))

    def inverse(self) -> FieldElement:
        return FieldElement(self.spec, self.spec.inv(self.code))

    def __bool__(self) -> bool:
        return self.code != 0

    def __str__(self) -> str:
        return self.spec.format(self.code)

    def __repr__(self) -> str:
        return f"FieldElement({self.spec}, {self.spec.format(self.code)})"


def arith(x: FieldElement, y: FieldElement, op: str) -> FieldElement:
    """Binary field operation by name: one of add, sub, mul, div."""
    if x.spec != y.spec:
        raise FieldMismatch(f"cannot combine {x.spec} and {y.spec}")
    try:
        fn = {"add": x.spec.add, "sub": x.spec.sub, "mul": x.spec.mul, "div": x.spec.div}[op]
    except KeyError:
        raise ValueError(f"unknown op {op!r}") from None
    return FieldElement(x.spec, fn(x.code, y.code))


def int_embed(spec: FieldSpec, t: int) -> FieldElement:
    return spec.int_embed(t)


def prime_subfield_index(x: FieldElement) -> int | None:
    """t in [0, p) with x = t*1, or None when x lies outside the prime subfield."""
    return x.spec.prime_subfield_index(x)


def parse_field_header(line: str) -> FieldSpec:
    """Parse ``field: p=<p> m=<m> modulus=[...]``."""
    m = re.fullmatch(
        r"\s*field:\s*p=(\d+)(?:\s+m=(\d+))?(?:\s+modulus=\[\s*([\d,\s]*)\])?\s*", line
    )
    if not m:
        raise ParseError(f"bad field header {line.strip()!r}")
    p = int(m.group(1))
    deg = int(m.group(2) or 1)
    modulus = None
    if m.group(3) is not None:
        modulus = tuple(int(c) for c in m.group(3).split(",") if c.strip())
    try:
        return FieldSpec(p, deg, modulus)
    except InvalidField as exc:
        raise ParseError(str(exc)) from exc

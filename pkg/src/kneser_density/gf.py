"""Finite fields GF(p^k) in a polynomial basis.

Elements are dense coefficient vectors ``(c_0, ..., c_{k-1})`` standing for
``c_0 + c_1 x + ... + c_{k-1} x^{k-1}`` modulo a fixed monic irreducible
polynomial.  Every element also has an integer code
``c_0 + c_1 p + ... + c_{k-1} p^{k-1}`` in ``range(q)`` which the projective
constructions use as an index.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property

MAX_ORDER = 1 << 16


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


def prime_power(q: int) -> tuple[int, int]:
    """Return ``(p, k)`` with ``q == p**k``; raise ValueError otherwise."""
    if q < 2:
        raise ValueError(f"{q} is not a prime power")
    p = next(d for d in range(2, q + 1) if q % d == 0)
    k, r = 0, q
    while r % p == 0:
        r //= p
        k += 1
    if r != 1:
        raise ValueError(f"{q} is not a prime power")
    return p, k


# --- polynomials over GF(p), low degree first --------------------------------

def _trim(a: list[int]) -> list[int]:
    while a and a[-1] == 0:
        a.pop()
    return a


def _polymod(a: list[int], m: list[int], p: int) -> list[int]:
    a = _trim(list(a))
    dm = len(m) - 1
    inv_lead = pow(m[-1], p - 2, p)
    while len(a) - 1 >= dm:
        c = (a[-1] * inv_lead) % p
        shift = len(a) - 1 - dm
        for i, mi in enumerate(m):
            a[shift + i] = (a[shift + i] - c * mi) % p
        _trim(a)
    return a


def _monic_polys(p: int, deg: int):
    # lexicographic by integer code of the lower coefficients
    for code in range(p**deg):
        coeffs = [(code // p**i) % p for i in range(deg)]
        yield coeffs + [1]


def is_irreducible(poly: list[int], p: int) -> bool:
    """Brute-force irreducibility: no monic factor of degree <= deg/2."""
    n = len(poly) - 1
    if n < 1:
        return False
    if n == 1:
        return True
    for d in range(1, n // 2 + 1):
        for f in _monic_polys(p, d):
            if not _polymod(poly, f, p):
                return False
    return True


# --- field -------------------------------------------------------------------

@dataclass(frozen=True)
class FieldSpec:
    p: int
    k: int
    modulus: tuple[int, ...]  # low degree first, monic, length k+1
    q: int = field(init=False)

    def __post_init__(self):
        if not is_prime(self.p):
            raise ValueError(f"p={self.p} is not prime")
        if self.k < 1:
            raise ValueError("extension degree must be >= 1")
        if len(self.modulus) != self.k + 1 or self.modulus[-1] != 1:
            raise ValueError("modulus must be monic of degree k")
        if not is_irreducible(list(self.modulus), self.p):
            raise ValueError("modulus is reducible")
        object.__setattr__(self, "q", self.p**self.k)
        if self.q > MAX_ORDER:
            raise ValueError(f"q={self.q} exceeds supported field size {MAX_ORDER}")

    def __repr__(self):
        return f"GF({self.p}^{self.k})"

    # element constructors
    def __call__(self, value) -> FieldElement:
        if isinstance(value, FieldElement):
            return value
        if isinstance(value, int):
            return self.from_int(value)
        coeffs = tuple(int(c) % self.p for c in value)
        if len(coeffs) != self.k:
            raise ValueError("wrong number of coefficients")
        return FieldElement(self, coeffs)

    def from_int(self, code: int) -> FieldElement:
        if not 0 <= code < self.q:
            # integers outside range(q) are read as prime-field residues
            code = code % self.p
        return FieldElement(self, tuple((code // self.p**i) % self.p for i in range(self.k)))

    @property
    def zero(self) -> FieldElement:
        return FieldElement(self, (0,) * self.k)

    @property
    def one(self) -> FieldElement:
        return self.from_int(1)

    @property
    def x(self) -> FieldElement:
        """The class of the indeterminate (for k = 1 this is a residue)."""
        if self.k == 1:
            return self.from_int(-self.modulus[0] % self.p)
        return self.from_int(self.p)

    def elements(self) -> list[FieldElement]:
        return [self.from_int(i) for i in range(self.q)]

    @cached_property
    def primitive_element(self) -> FieldElement:
        """Least element (by integer code) generating the multiplicative group."""
        n = self.q - 1
        primes = [d for d in range(2, n + 1) if n % d == 0 and is_prime(d)]
        for code in range(1, self.q):
            g = self.from_int(code)
            if all(g ** (n // r) != self.one for r in primes):
                return g
        raise AssertionError("no primitive element found")


def ff_make(p: int, k: int) -> FieldSpec:
    """GF(p^k) with the lexicographically least monic irreducible modulus."""
    if not is_prime(p):
        raise ValueError(f"p={p} is not prime")
    if k < 1:
        raise ValueError("extension degree must be >= 1")
    for poly in _monic_polys(p, k):
        if is_irreducible(poly, p):
            return FieldSpec(p, k, tuple(poly))
    raise AssertionError("unreachable: irreducibles exist in every degree")


def field_of_order(q: int) -> FieldSpec:
    return ff_make(*prime_power(q))


@dataclass(frozen=True)
class FieldElement:
    spec: FieldSpec
    coeffs: tuple[int, ...]

    def __int__(self):
        p = self.spec.p
        return sum(c * p**i for i, c in enumerate(self.coeffs))

    __index__ = __int__

    def __repr__(self):
        return f"{self.spec!r}<{int(self)}>"

    def __hash__(self):
        return hash((self.spec.p, self.spec.k, self.coeffs))

    def _coerce(self, other) -> FieldElement:
        if isinstance(other, FieldElement):
            if other.spec != self.spec:
                raise ValueError("elements of different fields")
            return other
        if isinstance(other, int):
            return self.spec.from_int(other % self.spec.p)
        return NotImplemented

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        p = self.spec.p
        return FieldElement(self.spec, tuple((a + b) % p for a, b in zip(self.coeffs, other.coeffs)))

    __radd__ = __add__

    def __neg__(self):
        p = self.spec.p
        return FieldElement(self.spec, tuple((-a) % p for a in self.coeffs))

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        spec = self.spec
        p, k = spec.p, spec.k
        prod = [0] * (2 * k - 1)
        for i, a in enumerate(self.coeffs):
            if a:
                for j, b in enumerate(other.coeffs):
                    prod[i + j] += a * b
        r = _polymod([c % p for c in prod], list(spec.modulus), p)
        return FieldElement(spec, tuple(r + [0] * (k - len(r))))

    __rmul__ = __mul__

    def __bool__(self):
        return any(self.coeffs)

    def __pow__(self, n: int):
        if n < 0:
            return self.inverse() ** (-n)
        result, base = self.spec.one, self
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    def inverse(self) -> FieldElement:
        if not self:
            raise ZeroDivisionError("inverse of zero in a finite field")
        return self ** (self.spec.q - 2)

    def __truediv__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self * other.inverse()

    def __rtruediv__(self, other):
        return self.inverse() * other


def ff_arith(spec: FieldSpec, op: str, *operands):
    """Dispatch form of the field operations: add, mul, inv, pow."""
    if op == "add":
        a, b = (spec(v) for v in operands)
        return a + b
    if op == "mul":
        a, b = (spec(v) for v in operands)
        return a * b
    if op == "inv":
        (a,) = operands
        return spec(a).inverse()
    if op == "pow":
        a, n = operands
        return spec(a) ** int(n)
    raise ValueError(f"unknown field operation {op!r}")


def ff_is_square(spec: FieldSpec, e: FieldElement) -> bool:
    """Euler's criterion; every element is a square in characteristic 2."""
    e = spec(e)
    if not e:
        raise ValueError("squareness of zero is undefined here")
    if spec.p == 2:
        return True
    return e ** ((spec.q - 1) // 2) == spec.one


def ff_frobenius(spec: FieldSpec, e: FieldElement, j: int) -> FieldElement:
    """Return e^(p^j) for 0 <= j <= k."""
    if not 0 <= j <= spec.k:
        raise ValueError("Frobenius power out of range")
    return spec(e) ** (spec.p**j)


def all_monic_irreducibles(p: int, k: int):
    """Every monic irreducible of degree k, in the order ff_make scans them."""
    return [poly for poly in _monic_polys(p, k) if is_irreducible(poly, p)]

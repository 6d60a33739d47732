"""Finite fields F_q, q = p^ell with p odd, and their characters.

Elements are represented in the polynomial basis 1, theta, ..., theta^(ell-1)
of F_p[theta]/(f) where f is the lexicographically smallest monic irreducible
polynomial of degree ell (coefficients compared constant term first).  The
canonical index of c_0 + c_1 theta + ... is sum c_i p^i.

The additive character chi(x) = zeta_p^Tr(x) takes values in Z[zeta_p]
(:class:`~quotdist.cyclotomic.Cyclotomic`) so every character sum is exact.
"""

from __future__ import annotations

import functools
import itertools
from functools import cached_property
from typing import Sequence

import numpy as np

from .cyclotomic import Cyclotomic
from .errors import DomainError, InvalidParameterError, ResourceError

# q x q lookup tables are only built up to this order.
TABLE_LIMIT = 2048


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    if n % 2 == 0:
        return n == 2
    f = 3
    while f * f <= n:
        if n % f == 0:
            return False
        f += 2
    return True


def _prime_factors(n: int) -> list[int]:
    out, f = [], 2
    while f * f <= n:
        if n % f == 0:
            out.append(f)
            while n % f == 0:
                n //= f
        f += 1
    if n > 1:
        out.append(n)
    return out


# -- polynomials over F_p as coefficient lists, constant term first -----------

def _trim(a: list[int]) -> list[int]:
    while a and a[-1] == 0:
        a.pop()
    return a


def _poly_mod(a: list[int], f: Sequence[int], p: int) -> list[int]:
    a = _trim([c % p for c in a])
    n = len(f) - 1
    inv_lead = pow(f[-1], -1, p)
    while len(a) - 1 >= n:
        c = a[-1] * inv_lead % p
        shift = len(a) - 1 - n
        for i, fc in enumerate(f):
            a[shift + i] = (a[shift + i] - c * fc) % p
        _trim(a)
    return a


def _poly_mulmod(a, b, f, p):
    if not a or not b:
        return []
    out = [0] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if x:
            for j, y in enumerate(b):
                out[i + j] += x * y
    return _poly_mod(out, f, p)


def _poly_powmod(a, e, f, p):
    result, base = [1], _poly_mod(list(a), f, p)
    while e:
        if e & 1:
            result = _poly_mulmod(result, base, f, p)
        base = _poly_mulmod(base, base, f, p)
        e >>= 1
    return result


def _poly_sub(a, b, p):
    n = max(len(a), len(b))
    a = list(a) + [0] * (n - len(a))
    b = list(b) + [0] * (n - len(b))
    return _trim([(x - y) % p for x, y in zip(a, b)])


def _poly_gcd(a, b, p):
    a, b = _trim([c % p for c in a]), _trim([c % p for c in b])
    while b:
        a, b = b, _poly_mod(a, b, p)
    return a


def is_irreducible(f: Sequence[int], p: int) -> bool:
    """Rabin's irreducibility test for a monic polynomial over F_p."""
    n = len(f) - 1
    if n < 1:
        return False
    if n == 1:
        return True
    x = [0, 1]
    if _poly_sub(_poly_powmod(x, p**n, f, p), x, p):
        return False
    for k in _prime_factors(n):
        h = _poly_sub(_poly_powmod(x, p ** (n // k), f, p), x, p)
        if len(_poly_gcd(f, h, p)) != 1:
            return False
    return True


def smallest_irreducible(p: int, ell: int) -> tuple[int, ...]:
    for low in itertools.product(range(p), repeat=ell):
        f = low + (1,)
        if is_irreducible(f, p):
            return f
    raise AssertionError(f"no irreducible polynomial of degree {ell} over F_{p}")


class FiniteField:
    """F_q with q = p^ell.  Immutable; obtain instances through :func:`make_field`."""

    def __init__(self, p: int, ell: int, modulus: tuple[int, ...]):
        self.p = p
        self.ell = ell
        self.q = p**ell
        self.modulus = modulus

    def __repr__(self):
        return f"FiniteField({self.spec_string()})"

    def __reduce__(self):
        return (make_field, (self.p, self.ell))

    def spec_string(self) -> str:
        return f"{self.p}^{self.ell}:" + ",".join(str(c) for c in self.modulus)

    # -- elements --------------------------------------------------------------

    def __call__(self, value) -> "FieldElement":
        if isinstance(value, FieldElement):
            if value.field is not self:
                raise ValueError("element belongs to a different field")
            return value
        if isinstance(value, (int, np.integer)):
            if not 0 <= value < self.q:
                raise ValueError(f"canonical index {value} outside [0, {self.q})")
            return FieldElement(self, int(value))
        if isinstance(value, (tuple, list)):
            return self.from_coeffs(value)
        raise TypeError(f"cannot build an element of {self} from {value!r}")

    def integer(self, n: int) -> "FieldElement":
        """The image of the integer n, i.e. n * 1 (lands in the prime subfield)."""
        return FieldElement(self, int(n) % self.p)

    def from_coeffs(self, coeffs: Sequence[int]) -> "FieldElement":
        if len(coeffs) > self.ell:
            raise ValueError(f"at most {self.ell} coefficients expected")
        idx = sum((int(c) % self.p) * self.p**i for i, c in enumerate(coeffs))
        return FieldElement(self, idx)

    def elements(self):
        return [FieldElement(self, i) for i in range(self.q)]

    def nonzero(self):
        return [FieldElement(self, i) for i in range(1, self.q)]

    @property
    def zero(self):
        return FieldElement(self, 0)

    @property
    def one(self):
        return FieldElement(self, 1)

    @property
    def theta(self):
        """The basis element theta (equal to 0 for prime fields, where modulus is theta)."""
        return FieldElement(self, 0 if self.ell == 1 else self.p)

    def digits(self, index: int) -> list[int]:
        p = self.p
        out = []
        for _ in range(self.ell):
            index, r = divmod(index, p)
            out.append(r)
        return out

    def index_of(self, digits: Sequence[int]) -> int:
        return sum(int(c) * self.p**i for i, c in enumerate(digits))

    # -- scalar index arithmetic ------------------------------------------------

    def add_index(self, a: int, b: int) -> int:
        if self.ell == 1:
            return (a + b) % self.p
        da, db = self.digits(a), self.digits(b)
        return self.index_of([(x + y) % self.p for x, y in zip(da, db)])

    def neg_index(self, a: int) -> int:
        if self.ell == 1:
            return (-a) % self.p
        return self.index_of([(-x) % self.p for x in self.digits(a)])

    def mul_index(self, a: int, b: int) -> int:
        if self.ell == 1:
            return a * b % self.p
        if "tables" in self.__dict__:
            return int(self.tables.mul[a, b])
        prod = _poly_mulmod(self.digits(a), self.digits(b), self.modulus, self.p)
        return self.index_of(prod)

    def pow_index(self, a: int, e: int) -> int:
        if e < 0:
            a, e = self.inv_index(a), -e
        result = 1
        while e:
            if e & 1:
                result = self.mul_index(result, a)
            a = self.mul_index(a, a)
            e >>= 1
        return result

    def inv_index(self, a: int) -> int:
        if a == 0:
            raise ZeroDivisionError("inverse of 0 in a finite field")
        if self.ell == 1:
            return pow(a, -1, self.p)
        return self.pow_index(a, self.q - 2)

    # -- per-element tables (size q) -------------------------------------------

    @cached_property
    def digit_table(self) -> np.ndarray:
        """(q, ell) array: digit_table[i] are the theta-coefficients of element i."""
        idx = np.arange(self.q, dtype=np.int64)
        return np.stack([(idx // self.p**k) % self.p for k in range(self.ell)], axis=1)

    @cached_property
    def _powers_of_p(self) -> np.ndarray:
        return np.array([self.p**k for k in range(self.ell)], dtype=np.int64)

    def _vmul_digits(self, da: np.ndarray, db: np.ndarray) -> np.ndarray:
        """Multiply elements given as broadcastable digit arrays (..., ell)."""
        p, ell, f = self.p, self.ell, self.modulus
        shape = np.broadcast_shapes(da.shape, db.shape)[:-1]
        prod = np.zeros(shape + (2 * ell - 1,), dtype=np.int64)
        for i in range(ell):
            for j in range(ell):
                prod[..., i + j] += da[..., i] * db[..., j]
        prod %= p
        for k in range(2 * ell - 2, ell - 1, -1):
            c = prod[..., k].copy()
            for i in range(ell + 1):
                prod[..., k - ell + i] -= c * f[i]
            prod %= p
        return prod[..., :ell]

    @cached_property
    def square_table(self) -> np.ndarray:
        d = self.digit_table
        return self._vmul_digits(d, d) @ self._powers_of_p

    @cached_property
    def trace_table(self) -> np.ndarray:
        """Absolute trace Tr: F_q -> F_p for every element index."""
        return (self.digit_table @ self._trace_of_basis) % self.p

    @cached_property
    def _trace_of_basis(self) -> np.ndarray:
        # Tr(theta^i) = sum_k theta^(i p^k); linear in the coefficients.
        out = []
        for i in range(self.ell):
            basis = self.pow_index(self.theta.index, i) if self.ell > 1 else 1
            total, x = 0, basis
            for _ in range(self.ell):
                total = self.add_index(total, x)
                x = self.pow_index(x, self.p)
            assert total < self.p, "trace must land in the prime field"
            out.append(total)
        return np.array(out, dtype=np.int64)

    @cached_property
    def eta_table(self) -> np.ndarray:
        """+1 on nonzero squares, -1 on non-squares, 0 at index 0 (sentinel only)."""
        eta = -np.ones(self.q, dtype=np.int64)
        eta[self.square_table] = 1
        eta[0] = 0
        return eta

    @cached_property
    def sqrt_table(self) -> np.ndarray:
        """A square root for each square (smallest index), -1 for non-squares."""
        out = -np.ones(self.q, dtype=np.int64)
        sq = self.square_table
        for x in range(self.q - 1, -1, -1):
            out[sq[x]] = x
        return out

    @cached_property
    def smallest_nonsquare(self) -> "FieldElement":
        return FieldElement(self, int(np.flatnonzero(self.eta_table == -1)[0]))

    # -- q x q tables for vectorized kernels -------------------------------------

    @cached_property
    def tables(self) -> "FieldTables":
        if self.q > TABLE_LIMIT:
            raise ResourceError(self.q * self.q, TABLE_LIMIT**2, f"lookup tables for F_{self.q}")
        return FieldTables(self)

    # -- characters -------------------------------------------------------------

    def trace(self, x) -> int:
        return int(self.trace_table[self(x).index])

    def chi(self, x) -> Cyclotomic:
        return Cyclotomic.zeta(self.p, self.trace(x))

    def eta(self, x) -> int:
        x = self(x)
        if x.index == 0:
            raise DomainError("eta(0) is undefined")
        return int(self.eta_table[x.index])

    def is_square(self, x) -> bool:
        """True for 0 and nonzero squares."""
        x = self(x)
        return x.index == 0 or self.eta_table[x.index] == 1

    def sqrt(self, x) -> "FieldElement":
        r = int(self.sqrt_table[self(x).index])
        if r < 0:
            raise DomainError(f"{x} is not a square")
        return FieldElement(self, r)

    def squares(self) -> frozenset:
        """(F_q)^2 including 0, as canonical indices."""
        return frozenset(int(i) for i in self.square_table)


class FieldTables:
    """Dense lookup tables (add, sub, mul, ...) for small fields."""

    def __init__(self, field: FiniteField):
        q, d = field.q, field.digit_table
        pw = field._powers_of_p
        if field.ell == 1:
            a = np.arange(q, dtype=np.int64)
            self.add = (a[:, None] + a[None, :]) % q
            self.mul = (a[:, None] * a[None, :]) % q
        else:
            self.add = ((d[:, None, :] + d[None, :, :]) % field.p) @ pw
            self.mul = field._vmul_digits(d[:, None, :], d[None, :, :]) @ pw
        self.neg = np.argmin(self.add, axis=1).astype(np.int64)
        self.sub = self.add[:, self.neg]
        inv = np.zeros(q, dtype=np.int64)
        rows, cols = np.nonzero(self.mul == 1)
        inv[rows] = cols
        self.inv = inv
        self.square = field.square_table
        self.trace = field.trace_table
        # trace_mul[a, b] = Tr(a * b); additive in each slot, so Tr(m . x) = sum_j trace_mul[m_j, x_j].
        self.trace_mul = self.trace[self.mul]


@functools.cache
def make_field(p: int, ell: int = 1) -> FiniteField:
    """The field F_{p^ell} with the deterministic modulus.

    For ell = 1 the modulus is theta (so theta = 0 and F_q is plain F_p).
    """
    if not isinstance(p, int) or not is_prime(p) or p == 2:
        raise InvalidParameterError(f"odd prime power required: p={p} is not an odd prime")
    if not isinstance(ell, int) or ell < 1:
        raise InvalidParameterError(f"exponent must be a positive integer, got {ell}")
    modulus = (0, 1) if ell == 1 else smallest_irreducible(p, ell)
    return FiniteField(p, ell, modulus)


def field_of_order(q: int) -> FiniteField:
    for p in range(3, q + 1, 2):
        if q % p == 0:
            ell, rest = 0, q
            while rest % p == 0:
                rest //= p
                ell += 1
            if rest == 1 and is_prime(p):
                return make_field(p, ell)
            break
    raise InvalidParameterError(f"odd prime power required, got q={q}")


def parse_field(text: str) -> FiniteField:
    """Accept "p^ell", "p^ell:modulus" (modulus must match the canonical one) or "q"."""
    text = text.strip()
    head, _, modulus = text.partition(":")
    try:
        if "^" in head:
            p, ell = (int(s) for s in head.split("^"))
            field = make_field(p, ell)
        else:
            field = field_of_order(int(head))
    except ValueError as exc:
        if isinstance(exc, InvalidParameterError):
            raise
        raise InvalidParameterError(f"cannot parse field spec {text!r}") from exc
    if modulus:
        given = tuple(int(c) for c in modulus.split(","))
        if given != field.modulus:
            raise InvalidParameterError(
                f"modulus {given} differs from the canonical modulus {field.modulus} of F_{field.q}"
            )
    return field


@functools.total_ordering
class FieldElement:
    __slots__ = ("field", "index")

    def __init__(self, field: FiniteField, index: int):
        self.field = field
        self.index = index

    def _other(self, other) -> int:
        if isinstance(other, FieldElement):
            if other.field is not self.field:
                raise ValueError("elements of different fields")
            return other.index
        if isinstance(other, (int, np.integer)):
            return int(other) % self.field.p
        return NotImplemented

    def __add__(self, other):
        return FieldElement(self.field, self.field.add_index(self.index, self._other(other)))

    __radd__ = __add__

    def __neg__(self):
        return FieldElement(self.field, self.field.neg_index(self.index))

    def __sub__(self, other):
        f = self.field
        return FieldElement(f, f.add_index(self.index, f.neg_index(self._other(other))))

    def __rsub__(self, other):
        return self.field.integer(other) - self

    def __mul__(self, other):
        return FieldElement(self.field, self.field.mul_index(self.index, self._other(other)))

    __rmul__ = __mul__

    def inv(self) -> "FieldElement":
        return FieldElement(self.field, self.field.inv_index(self.index))

    def __truediv__(self, other):
        return self * FieldElement(self.field, self._other(other)).inv()

    def __rtruediv__(self, other):
        return self.field.integer(other) * self.inv()

    def __pow__(self, e: int):
        return FieldElement(self.field, self.field.pow_index(self.index, e))

    def __eq__(self, other):
        if isinstance(other, FieldElement):
            return self.field is other.field and self.index == other.index
        if isinstance(other, (int, np.integer)):
            return self.index == int(other) % self.field.p
        return NotImplemented

    def __lt__(self, other):
        if not isinstance(other, FieldElement):
            return NotImplemented
        return self.index < other.index

    def __hash__(self):
        return hash(self.index)

    def __int__(self):
        return self.index

    __index__ = __int__

    def __bool__(self):
        return self.index != 0

    @property
    def coeffs(self) -> list[int]:
        return self.field.digits(self.index)

    def __repr__(self):
        return f"F{self.field.q}({self.index})"


# -- Gauss sums and the closed-form character sums ------------------------------

def gauss_sum(field: FiniteField) -> Cyclotomic:
    """G = sum_{t != 0} eta(t) chi(t), exactly."""
    counts = np.zeros(field.p, dtype=np.int64)
    np.add.at(counts, field.trace_table[1:], field.eta_table[1:].astype(np.int64))
    return Cyclotomic.from_exponent_counts(field.p, [int(c) for c in counts])


def completed_square_sum(a, b) -> Cyclotomic:
    """sum_{t in F_q} chi(a t^2 + b t) = eta(a) chi(b^2 / (-4a)) G, for a != 0."""
    field = a.field
    b = field(b)
    if not a:
        raise DomainError("completed-square formula needs a != 0")
    shift = field.chi(b * b / (-4 * a))
    return shift * gauss_sum(field) * field.eta(a)


def completed_square_sum_bruteforce(a, b) -> Cyclotomic:
    field = a.field
    b = field(b)
    total = Cyclotomic.zero(field.p)
    for t in field.elements():
        total = total + field.chi(a * t * t + b * t)
    return total


def eta_weighted_inverse_sum(b) -> Cyclotomic:
    """sum_{s != 0} eta(s) chi(b / s) = eta(b) G, for b != 0."""
    if not b:
        raise DomainError("the inverse-weighted sum needs b != 0")
    return gauss_sum(b.field) * b.field.eta(b)


def eta_weighted_inverse_sum_bruteforce(b) -> Cyclotomic:
    field = b.field
    total = Cyclotomic.zero(field.p)
    for s in field.nonzero():
        total = total + field.chi(b / s) * field.eta(s)
    return total

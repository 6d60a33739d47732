"""Exact arithmetic in the ring of cyclotomic integers Z[zeta_p], p an odd prime.

An element sum_k c_k zeta^k is stored in the power basis zeta^0, ..., zeta^(p-2).
The relation 1 + zeta + ... + zeta^(p-1) = 0 is used to eliminate zeta^(p-1),
which makes the representation canonical: two elements are equal iff their
coefficient tuples are equal.

Internally products are formed on length-p "redundant" vectors (exponents mod p)
and reduced with :func:`canonical`, which subtracts the top coefficient from all
others.
"""

from __future__ import annotations

import cmath
from typing import Iterable, Sequence

import numpy as np


def canonical(redundant: Sequence[int]) -> tuple[int, ...]:
    """Reduce a length-p coefficient vector (exponents 0..p-1) to the power basis."""
    top = int(redundant[-1])
    return tuple(int(c) - top for c in redundant[:-1])


def canonical_array(counts: np.ndarray) -> np.ndarray:
    """Vectorized :func:`canonical` over the last axis."""
    return counts[..., :-1] - counts[..., -1:]


class Cyclotomic:
    __slots__ = ("p", "coeffs")

    def __init__(self, p: int, coeffs: Iterable[int]):
        coeffs = tuple(int(c) for c in coeffs)
        if len(coeffs) != p - 1:
            raise ValueError(f"expected {p - 1} coefficients for Z[zeta_{p}], got {len(coeffs)}")
        self.p = p
        self.coeffs = coeffs

    # -- constructors ---------------------------------------------------------

    @classmethod
    def from_int(cls, p: int, n: int) -> "Cyclotomic":
        return cls(p, (n,) + (0,) * (p - 2))

    @classmethod
    def zero(cls, p: int) -> "Cyclotomic":
        return cls(p, (0,) * (p - 1))

    @classmethod
    def one(cls, p: int) -> "Cyclotomic":
        return cls.from_int(p, 1)

    @classmethod
    def zeta(cls, p: int, k: int = 1) -> "Cyclotomic":
        """zeta_p ** k."""
        vec = [0] * p
        vec[k % p] = 1
        return cls(p, canonical(vec))

    @classmethod
    def from_exponent_counts(cls, p: int, counts: Sequence[int]) -> "Cyclotomic":
        """sum_k counts[k] * zeta^k for a length-p vector of multiplicities."""
        if len(counts) != p:
            raise ValueError(f"expected {p} exponent counts, got {len(counts)}")
        return cls(p, canonical(counts))

    # -- ring structure --------------------------------------------------------

    def _coerce(self, other) -> "Cyclotomic":
        if isinstance(other, Cyclotomic):
            if other.p != self.p:
                raise ValueError(f"mixing Z[zeta_{self.p}] and Z[zeta_{other.p}]")
            return other
        if isinstance(other, (int, np.integer)):
            return Cyclotomic.from_int(self.p, int(other))
        return NotImplemented

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return Cyclotomic(self.p, (a + b for a, b in zip(self.coeffs, other.coeffs)))

    __radd__ = __add__

    def __neg__(self):
        return Cyclotomic(self.p, (-a for a in self.coeffs))

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return Cyclotomic(self.p, (a - b for a, b in zip(self.coeffs, other.coeffs)))

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, (int, np.integer)):
            k = int(other)
            return Cyclotomic(self.p, (k * a for a in self.coeffs))
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        p = self.p
        out = [0] * p
        for i, a in enumerate(self.coeffs):
            if a:
                for j, b in enumerate(other.coeffs):
                    if b:
                        out[(i + j) % p] += a * b
        return Cyclotomic(p, canonical(out))

    __rmul__ = __mul__

    def __pow__(self, e: int):
        if e < 0:
            raise ValueError("negative powers are not defined in Z[zeta_p]")
        result = Cyclotomic.one(self.p)
        base = self
        while e:
            if e & 1:
                result = result * base
            base = base * base
            e >>= 1
        return result

    def conj(self) -> "Cyclotomic":
        """Complex conjugation zeta^k -> zeta^(p-k)."""
        p = self.p
        out = [0] * p
        for k, a in enumerate(self.coeffs):
            out[(-k) % p] += a
        return Cyclotomic(p, canonical(out))

    def norm_squared(self) -> "Cyclotomic":
        """self * conj(self), i.e. |self|^2 as an element of Z[zeta_p]."""
        return self * self.conj()

    # -- inspection ------------------------------------------------------------

    def is_integer(self) -> bool:
        return not any(self.coeffs[1:])

    def to_int(self) -> int:
        if not self.is_integer():
            raise ValueError(f"{self!r} is not a rational integer")
        return self.coeffs[0]

    def to_complex(self) -> complex:
        """Display-only floating point rendering."""
        w = cmath.exp(2j * cmath.pi / self.p)
        return sum(c * w**k for k, c in enumerate(self.coeffs))

    def serialize(self) -> str:
        return f"{self.p}:" + ",".join(str(c) for c in self.coeffs)

    @classmethod
    def deserialize(cls, text: str) -> "Cyclotomic":
        p, _, body = text.partition(":")
        return cls(int(p), (int(c) for c in body.split(",")) if body else ())

    def __eq__(self, other):
        if isinstance(other, (int, np.integer)):
            return self.is_integer() and self.coeffs[0] == int(other)
        if isinstance(other, Cyclotomic):
            return self.p == other.p and self.coeffs == other.coeffs
        return NotImplemented

    def __hash__(self):
        if self.is_integer():
            return hash(self.coeffs[0])
        return hash((self.p, self.coeffs))

    def __repr__(self):
        if self.is_integer():
            return f"Cyclotomic({self.p}, {self.coeffs[0]})"
        terms = []
        for k, c in enumerate(self.coeffs):
            if c:
                terms.append(f"{c}" if k == 0 else f"{c}*z^{k}")
        return f"Cyclotomic({self.p}, " + " + ".join(terms or ["0"]) + ")"

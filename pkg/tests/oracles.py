"""Independent reference implementations used only by the tests.

Nothing here imports the arithmetic of the package under test: prime-field
work is plain modular integer arithmetic, extension fields go through sympy's
polynomials over GF(p), and cyclotomic values are reduced modulo the p-th
cyclotomic polynomial with sympy.
"""

from __future__ import annotations

import itertools

from sympy import GF, Poly, cyclotomic_poly, symbols

X, Z = symbols("x z")

QUADRUPLE_CAP = 12


# -- polynomials over F_p ----------------------------------------------------------

def monic_polys(p: int, ell: int):
    """Monic degree-ell polynomials as constant-term-first tuples, in lexicographic order."""
    for low in itertools.product(range(p), repeat=ell):
        yield tuple(low) + (1,)


def has_root(coeffs, p: int) -> bool:
    return any(sum(c * pow(x, i, p) for i, c in enumerate(coeffs)) % p == 0 for x in range(p))


def sympy_irreducible(coeffs, p: int) -> bool:
    return Poly(list(reversed(coeffs)), X, domain=GF(p)).is_irreducible


def smallest_irreducible(p: int, ell: int):
    for f in monic_polys(p, ell):
        if sympy_irreducible(f, p):
            return f
    raise AssertionError("no irreducible polynomial found")


def ext_mul(a, b, modulus, p: int):
    """Product of two constant-term-first coefficient vectors modulo ``modulus``."""
    dom = GF(p)
    pa = Poly(list(reversed(a)), X, domain=dom)
    pb = Poly(list(reversed(b)), X, domain=dom)
    pm = Poly(list(reversed(modulus)), X, domain=dom)
    r = (pa * pb).rem(pm)
    out = [int(c) % p for c in reversed(r.all_coeffs())]
    return tuple(out + [0] * (len(modulus) - 1 - len(out)))


def ext_trace(a, modulus, p: int) -> int:
    ell = len(modulus) - 1
    total = [0] * ell
    power = tuple(a)
    for _ in range(ell):
        total = [(u + v) % p for u, v in zip(total, power)]
        frob = (1,) + (0,) * (ell - 1)
        for _ in range(p):
            frob = ext_mul(frob, power, modulus, p)
        power = frob
    assert all(c == 0 for c in total[1:]), "trace must lie in F_p"
    return total[0]


def index_to_coeffs(index: int, p: int, ell: int):
    return tuple((index // p**i) % p for i in range(ell))


# -- cyclotomic reduction -------------------------------------------------------------

def reduce_cyclotomic(exponent_counts, p: int):
    """sum_k counts[k] z^k reduced modulo Phi_p(z), as power-basis coefficients (length p-1)."""
    poly = Poly(sum(int(c) * Z**k for k, c in enumerate(exponent_counts)), Z)
    r = poly.rem(Poly(cyclotomic_poly(p, Z), Z))
    coeffs = [int(c) for c in reversed(r.all_coeffs())]
    return tuple(coeffs + [0] * (p - 1 - len(coeffs)))


# -- prime-field brute force ------------------------------------------------------------

def quadratic(coeffs, x, p: int) -> int:
    return sum(c * v * v for c, v in zip(coeffs, x)) % p


def quadruple_counts(points, coeffs, p: int, r: int):
    """(M(r), W(r)) by enumerating all |E|^4 quadruples over a prime field."""
    assert len(points) <= QUADRUPLE_CAP
    M = W = 0
    for x, y, z, w in itertools.product(points, repeat=4):
        num = quadratic(coeffs, [(a - b) % p for a, b in zip(x, y)], p)
        den = quadratic(coeffs, [(a - b) % p for a, b in zip(z, w)], p)
        if num == r * den % p:
            M += 1
            if den:
                W += 1
    return M, W


def fourier_counts(points, m, p: int):
    """Exponent counts of sum_{x in S} zeta^(-m.x) over a prime field."""
    counts = [0] * p
    for x in points:
        counts[-sum(a * b for a, b in zip(m, x)) % p] += 1
    return counts


def eta_prime(x: int, p: int) -> int:
    x %= p
    assert x
    return 1 if pow(x, (p - 1) // 2, p) == 1 else -1

"""Point sets in F_q^n, degree-two varieties, and exact Fourier transforms.

With the normalization f^(m) = q^-n sum_x chi(-m.x) f(x), every transform is
returned scaled by q^n so that it lives in Z[zeta_p]:

    (q^n S^)(m) = sum_{x in S} chi(-m.x).

Brute-force transforms are computed by counting, for each frequency m, how many
x in S have Tr(-m.x) = k for k in F_p; that length-p count vector *is* the
cyclotomic value before reduction.  The closed forms return plain integers.

Points are indexed lexicographically with the first coordinate most significant:
index(x) = sum_j x_j q^(n-1-j), where x_j are canonical field indices.
"""

from __future__ import annotations

import functools
from pathlib import Path
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .cyclotomic import Cyclotomic, canonical_array
from .errors import DimensionMismatchError, DomainError, InternalConsistencyError, ResourceError
from .field import FieldElement, FiniteField
from .forms import DualForm, StandardForm, _diagonal_values

DEFAULT_BUDGET = 10**9
# rows of frequencies processed per numpy block in brute-force transforms
_CHUNK_ELEMENTS = 1 << 22


@functools.lru_cache(maxsize=32)
def all_points(q: int, n: int) -> np.ndarray:
    """(q^n, n) array of every point of F_q^n in canonical order (read-only)."""
    idx = np.arange(q**n, dtype=np.int64)
    pts = np.stack(np.unravel_index(idx, (q,) * n), axis=1).astype(np.int64)
    pts.setflags(write=False)
    return pts


def point_index(q: int, point: Sequence[int]) -> int:
    idx = 0
    for c in point:
        idx = idx * q + int(c)
    return idx


def _point_indices(q: int, pts: np.ndarray) -> np.ndarray:
    n = pts.shape[1]
    weights = q ** np.arange(n - 1, -1, -1, dtype=np.int64)
    return pts @ weights


class PointSet:
    """A subset of F_q^n stored as a membership mask over the q^n canonical indices."""

    __slots__ = ("field", "n", "mask", "_points", "__weakref__")

    def __init__(self, field: FiniteField, n: int, mask: np.ndarray):
        if n < 1:
            raise DimensionMismatchError("ambient dimension must be >= 1")
        mask = np.asarray(mask, dtype=bool)
        if mask.shape != (field.q**n,):
            raise DimensionMismatchError(f"mask of shape {mask.shape} for F_{field.q}^{n}")
        mask.setflags(write=False)
        self.field = field
        self.n = n
        self.mask = mask
        self._points = None

    @classmethod
    def from_points(cls, field: FiniteField, n: int, points: Iterable[Sequence]) -> "PointSet":
        mask = np.zeros(field.q**n, dtype=bool)
        for pt in points:
            pt = [int(field(c)) if not isinstance(c, FieldElement) else c.index for c in pt]
            if len(pt) != n:
                raise DimensionMismatchError(f"point {pt} is not in dimension {n}")
            mask[point_index(field.q, pt)] = True
        return cls(field, n, mask)

    @classmethod
    def from_indices(cls, field: FiniteField, n: int, indices: Iterable[int]) -> "PointSet":
        mask = np.zeros(field.q**n, dtype=bool)
        mask[np.asarray(list(indices), dtype=np.int64)] = True
        return cls(field, n, mask)

    @classmethod
    def full(cls, field: FiniteField, n: int) -> "PointSet":
        return cls(field, n, np.ones(field.q**n, dtype=bool))

    @classmethod
    def empty(cls, field: FiniteField, n: int) -> "PointSet":
        return cls(field, n, np.zeros(field.q**n, dtype=bool))

    @classmethod
    def origin(cls, field: FiniteField, n: int) -> "PointSet":
        mask = np.zeros(field.q**n, dtype=bool)
        mask[0] = True
        return cls(field, n, mask)

    @property
    def indices(self) -> np.ndarray:
        return np.flatnonzero(self.mask)

    @property
    def points(self) -> np.ndarray:
        """(|S|, n) array of canonical coordinates."""
        if self._points is None:
            pts = all_points(self.field.q, self.n)[self.mask]
            pts.setflags(write=False)
            self._points = pts
        return self._points

    def __len__(self):
        return int(self.mask.sum())

    cardinality = property(__len__)

    def __contains__(self, point) -> bool:
        pt = [c.index if isinstance(c, FieldElement) else int(c) for c in point]
        if len(pt) != self.n:
            return False
        return bool(self.mask[point_index(self.field.q, pt)])

    def __iter__(self):
        for row in self.points:
            yield tuple(int(c) for c in row)

    def __eq__(self, other):
        if not isinstance(other, PointSet):
            return NotImplemented
        return (self.field is other.field and self.n == other.n
                and bool(np.array_equal(self.mask, other.mask)))

    def __hash__(self):
        return hash((self.field.q, self.n, self.mask.tobytes()))

    def __repr__(self):
        return f"PointSet(F_{self.field.q}^{self.n}, |S|={len(self)})"

    def product(self, other: "PointSet") -> "PointSet":
        """Cartesian product S x T in F_q^(n+m)."""
        mask = np.outer(self.mask, other.mask).ravel()
        return PointSet(self.field, self.n + other.n, mask)

    def image(self, matrix) -> "PointSet":
        """{M x : x in S} for a d x d matrix of field elements."""
        from .forms import mat_vec

        f = self.field
        return PointSet.from_points(f, self.n, (
            [v.index for v in mat_vec(matrix, [f(c) for c in pt])] for pt in self))


# -- point-set files --------------------------------------------------------------

def read_point_set(path, field: FiniteField) -> PointSet:
    """Header "n q", then one point per line as n canonical indices."""
    rows = [ln.split() for ln in Path(path).read_text().splitlines() if ln.strip() and not ln.startswith("#")]
    if not rows or len(rows[0]) != 2:
        raise ValueError(f"point-set file {path}: expected a header line 'n q'")
    n, q = (int(v) for v in rows[0])
    if q != field.q:
        raise DimensionMismatchError(f"point-set file {path} is over F_{q}, configured field is F_{field.q}")
    pts = []
    for line in rows[1:]:
        if len(line) != n:
            raise DimensionMismatchError(f"point-set file {path}: point {line} does not have {n} coordinates")
        pts.append([int(v) for v in line])
    return PointSet.from_points(field, n, pts)


def write_point_set(path, S: PointSet) -> None:
    lines = [f"{S.n} {S.field.q}"] + [" ".join(str(int(c)) for c in pt) for pt in S.points]
    Path(path).write_text("\n".join(lines) + "\n")


# -- varieties -----------------------------------------------------------------

@dataclass(frozen=True)
class RatioSpec:
    """The ratio form Q(x) - r Q(x') on F_q^(2d) built from a standard form Q."""

    r: FieldElement
    form: StandardForm

    def __post_init__(self):
        if not self.r:
            raise DomainError("ratio r must be nonzero")

    @property
    def coeffs(self) -> tuple[FieldElement, ...]:
        a = self.form.coeffs
        return a + tuple(-(self.r * c) for c in a)

    @property
    def dual_coeffs(self) -> tuple[FieldElement, ...]:
        return tuple(c.inv() for c in self.coeffs)


def _check_coeffs(coeffs) -> tuple[int, ...]:
    idx = tuple(c.index if isinstance(c, FieldElement) else int(c) for c in coeffs)
    if not idx or any(c == 0 for c in idx):
        raise DomainError("diagonal variety needs all coefficients nonzero")
    return idx


@functools.lru_cache(maxsize=256)
def _level_set(field: FiniteField, coeffs: tuple[int, ...], t: int) -> PointSet:
    vals = _diagonal_values(field, coeffs, all_points(field.q, len(coeffs)))
    return PointSet(field, len(coeffs), vals == t)


def sphere(form, t=0) -> PointSet:
    """(S_Q)_t = {x : Q(x) = t} for a standard or dual form."""
    field = form.field
    t = field(t)
    return _level_set(field, form.coeff_indices, t.index)


def dual_sphere(form: StandardForm, t=0) -> PointSet:
    return sphere(form.dual(), t)


def diagonal_variety(field: FiniteField, a: Sequence) -> PointSet:
    """H_a = {x : sum a_j x_j^2 = 0}."""
    return _level_set(field, _check_coeffs(a), 0)


def dual_coefficients(field: FiniteField, a: Sequence) -> tuple[int, ...]:
    return tuple(field.inv_index(c) for c in _check_coeffs(a))


def dual_diagonal_variety(field: FiniteField, a: Sequence) -> PointSet:
    """H_{a*} = {m : sum a_j^-1 m_j^2 = 0}."""
    return _level_set(field, dual_coefficients(field, a), 0)


def product_variety(spec: RatioSpec) -> PointSet:
    """V_{Q_r} = {(x, x') : Q(x) - r Q(x') = 0} in F_q^(2d)."""
    return diagonal_variety(spec.form.field, spec.coeffs)


def dual_product_variety(spec: RatioSpec) -> PointSet:
    """V_{Q_r*} = {(m, m') : Q*(m) - r^-1 Q*(m') = 0}."""
    return diagonal_variety(spec.form.field, spec.dual_coeffs)


# -- Fourier transforms ---------------------------------------------------------

@dataclass(frozen=True)
class ScaledFourierValue:
    """q^scale * f^(m), an exact element of Z[zeta_p]."""

    value: Cyclotomic
    scale: int

    def as_complex(self) -> complex:
        return self.value.to_complex()


def _coerce_point(field: FiniteField, n: int, m) -> np.ndarray:
    pt = np.array([c.index if isinstance(c, FieldElement) else int(c) for c in m], dtype=np.int64)
    if pt.shape != (n,):
        raise DimensionMismatchError(f"frequency of length {len(pt)} in dimension {n}")
    return pt


def character_counts(field: FiniteField, points: np.ndarray, freqs: np.ndarray) -> np.ndarray:
    """counts[i, k] = #{x in points : Tr(-freqs[i] . x) = k}."""
    p = field.p
    tm = field.tables.trace_mul
    nf, npts = len(freqs), len(points)
    out = np.zeros((nf, p), dtype=np.int64)
    if npts == 0 or nf == 0:
        return out
    rows = max(1, _CHUNK_ELEMENTS // max(npts, 1))
    for start in range(0, nf, rows):
        block = freqs[start:start + rows]
        acc = np.zeros((len(block), npts), dtype=np.int64)
        for j in range(points.shape[1]):
            acc += tm[block[:, j][:, None], points[:, j][None, :]]
        acc = (-acc) % p
        acc += (p * np.arange(len(block), dtype=np.int64))[:, None]
        out[start:start + len(block)] = np.bincount(acc.ravel(), minlength=len(block) * p).reshape(-1, p)
    return out


def fourier_bruteforce(S: PointSet, m) -> ScaledFourierValue:
    """sum_{x in S} chi(-m.x), by direct summation."""
    pt = _coerce_point(S.field, S.n, m)
    counts = character_counts(S.field, S.points, pt[None, :])[0]
    return ScaledFourierValue(Cyclotomic.from_exponent_counts(S.field.p, counts), S.n)


class FourierTable:
    """The scaled transform of a point set at every frequency, kept as exponent counts."""

    def __init__(self, S: PointSet, counts: np.ndarray):
        self.set = S
        self.field = S.field
        self.n = S.n
        self.counts = counts

    def __len__(self):
        return len(self.counts)

    def value(self, m) -> ScaledFourierValue:
        if isinstance(m, (int, np.integer)):
            i = int(m)
        else:
            i = point_index(self.field.q, _coerce_point(self.field, self.n, m))
        return ScaledFourierValue(Cyclotomic.from_exponent_counts(self.field.p, self.counts[i]), self.n)

    def values(self) -> list[Cyclotomic]:
        p = self.field.p
        return [Cyclotomic(p, row) for row in self.canonical()]

    def canonical(self) -> np.ndarray:
        """(q^n, p-1) array of power-basis coefficients."""
        return canonical_array(self.counts)

    def norms(self) -> np.ndarray:
        """|(q^n S^)(m)|^2 as length-p exponent vectors (autocorrelation of the counts)."""
        c = self.counts
        p = self.field.p
        out = np.empty_like(c)
        for s in range(p):
            out[:, s] = (np.roll(c, -s, axis=1) * c).sum(axis=1)
        return out

    def plancherel_sum(self) -> Cyclotomic:
        """sum_m |(q^n S^)(m)|^2, which must equal q^n |S|."""
        return Cyclotomic.from_exponent_counts(self.field.p, [int(v) for v in self.norms().sum(axis=0)])


def check_budget(q: int, n: int, budget: int | None, what: str) -> None:
    budget = DEFAULT_BUDGET if budget is None else budget
    required = q ** (2 * n)
    if required > budget:
        raise ResourceError(required, budget, what)


def fourier_set_table(S: PointSet, budget: int | None = None) -> FourierTable:
    check_budget(S.field.q, S.n, budget, f"Fourier table on F_{S.field.q}^{S.n}")
    freqs = all_points(S.field.q, S.n)
    return FourierTable(S, character_counts(S.field, S.points, freqs))


# -- closed forms -------------------------------------------------------------------

def _product(field: FiniteField, coeffs: Sequence[int]) -> int:
    acc = 1
    for c in coeffs:
        acc = field.mul_index(acc, c)
    return acc


def _signed_eta(field: FiniteField, sign_exponent: int, value: int) -> int:
    """eta((-1)^sign_exponent * value)."""
    if sign_exponent % 2:
        value = field.neg_index(value)
    return int(field.eta_table[value])


def _scaled_int(field: FiniteField, n: int, value: int) -> ScaledFourierValue:
    return ScaledFourierValue(Cyclotomic.from_int(field.p, value), n)


def fourier_closed_H(field: FiniteField, a: Sequence, m, *, _sign: int = 1) -> ScaledFourierValue:
    """q^n H_a^(m) from the closed formula for diagonal homogeneous quadrics."""
    a = _check_coeffs(a)
    n, q = len(a), field.q
    m = _coerce_point(field, n, m)
    a_inv = dual_coefficients(field, a)
    dual_val = int(_diagonal_values(field, a_inv, m[None, :])[0])
    is_zero = not m.any()
    prod = _product(field, a)
    if n % 2 == 0:
        sign = _sign * _signed_eta(field, n // 2, prod)
        value = q ** (n - 1) * is_zero + sign * q ** (n // 2) * (dual_val == 0) - sign * q ** ((n - 2) // 2)
    elif dual_val == 0:
        value = q ** (n - 1) * is_zero
    else:
        sign = _sign * _signed_eta(field, (n + 3) // 2, prod)
        value = q ** ((n - 1) // 2) * sign * int(field.eta_table[dual_val])
    return _scaled_int(field, n, value)


def closed_H_table(field: FiniteField, a: Sequence, *, _sign: int = 1) -> np.ndarray:
    """q^n H_a^(m) for every m in canonical order (int64)."""
    a = _check_coeffs(a)
    n, q = len(a), field.q
    pts = all_points(q, n)
    dual_vals = _diagonal_values(field, dual_coefficients(field, a), pts)
    delta = np.zeros(q**n, dtype=np.int64)
    delta[0] = 1
    in_dual = (dual_vals == 0).astype(np.int64)
    prod = _product(field, a)
    if n % 2 == 0:
        sign = _sign * _signed_eta(field, n // 2, prod)
        return q ** (n - 1) * delta + sign * q ** (n // 2) * in_dual - sign * q ** ((n - 2) // 2)
    sign = _sign * _signed_eta(field, (n + 3) // 2, prod)
    off = q ** ((n - 1) // 2) * sign * field.eta_table[dual_vals]
    return np.where(in_dual == 1, q ** (n - 1) * delta, off)


def fourier_closed_VQr(spec: RatioSpec, M) -> ScaledFourierValue:
    """q^(2d) V_{Q_r}^(M) from the closed formula for the ratio variety."""
    field, d, q = spec.form.field, spec.form.dim, spec.form.field.q
    M = _coerce_point(field, 2 * d, M)
    in_dual = M.tolist() in dual_product_variety(spec)
    is_zero = not M.any()
    twist = 1 if d % 2 == 0 else field.eta(spec.r)
    value = q ** (2 * d - 1) * is_zero + twist * q**d * in_dual - twist * q ** (d - 1)
    return _scaled_int(field, 2 * d, value)


def closed_VQr_table(spec: RatioSpec) -> np.ndarray:
    field, d, q = spec.form.field, spec.form.dim, spec.form.field.q
    in_dual = dual_product_variety(spec).mask.astype(np.int64)
    delta = np.zeros(q ** (2 * d), dtype=np.int64)
    delta[0] = 1
    twist = 1 if d % 2 == 0 else field.eta(spec.r)
    return q ** (2 * d - 1) * delta + twist * q**d * in_dual - twist * q ** (d - 1)


def fourier_closed_sphere0(form: StandardForm, m) -> ScaledFourierValue:
    """q^d (S_Q)_0^(m) from the closed formula for the zero sphere of a standard form."""
    field, d, q = form.field, form.dim, form.field.q
    m = _coerce_point(field, d, m)
    dual_val = int(form.dual().values(m[None, :])[0])
    is_zero = not m.any()
    eta_eps = form.eta_epsilon()
    if d % 2 == 0:
        value = q ** (d - 1) * is_zero + q ** (d // 2) * eta_eps * (dual_val == 0) - q ** ((d - 2) // 2) * eta_eps
    elif dual_val == 0:
        value = q ** (d - 1) * is_zero
    else:
        value = q ** ((d - 1) // 2) * eta_eps * int(field.eta_table[dual_val])
    return _scaled_int(field, d, value)


def closed_sphere0_table(form: StandardForm) -> np.ndarray:
    field, d, q = form.field, form.dim, form.field.q
    dual_vals = form.dual().values(all_points(q, d))
    in_dual = (dual_vals == 0).astype(np.int64)
    delta = np.zeros(q**d, dtype=np.int64)
    delta[0] = 1
    eta_eps = form.eta_epsilon()
    if d % 2 == 0:
        return q ** (d - 1) * delta + q ** (d // 2) * eta_eps * in_dual - q ** ((d - 2) // 2) * eta_eps
    off = q ** ((d - 1) // 2) * eta_eps * field.eta_table[dual_vals]
    return np.where(in_dual == 1, q ** (d - 1) * delta, off)


def table_matches_integers(table: FourierTable, closed: np.ndarray) -> np.ndarray:
    """Boolean mask: brute-force value equals the integer closed form, per frequency."""
    canon = table.canonical()
    return (canon[:, 0] == closed) & ~canon[:, 1:].any(axis=1)


def mismatches(table: FourierTable, closed: np.ndarray) -> list[int]:
    return np.flatnonzero(~table_matches_integers(table, closed)).tolist()


def reduce_to_integer(counts: Sequence[int], p: int, what: str) -> int:
    """Exact value of a Galois-invariant sum given as length-p exponent counts."""
    value = Cyclotomic.from_exponent_counts(p, [int(c) for c in counts])
    if not value.is_integer():
        raise InternalConsistencyError(f"{what} did not reduce to an integer: {value!r}")
    return value.to_int()

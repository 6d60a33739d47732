"""Non-degenerate quadratic forms over F_q and their standard diagonal models.

Every non-degenerate form Q(x) = x^T A x is congruent to

    x_1^2 - x_2^2 + ... + x_{d-1}^2 - eps x_d^2        (d even)
    x_1^2 - x_2^2 + ... - x_{d-1}^2 + eps x_d^2        (d odd)

with eta((-1)^(d/2) eps) = eta(det A), resp. eta((-1)^((d-1)/2) eps) = eta(det A).
:func:`standardize` finds such a model together with the change of variables C
(Q(C y) equals the model evaluated at y).
"""

from __future__ import annotations

from dataclasses import dataclass, field as dc_field
from pathlib import Path
from typing import Sequence

import numpy as np

from .errors import DimensionMismatchError, DomainError, InvalidFormError
from .field import FieldElement, FiniteField

Matrix = tuple[tuple[FieldElement, ...], ...]


def _as_vector(field: FiniteField, x) -> list[FieldElement]:
    return [field(v) for v in x]


def determinant(matrix: Sequence[Sequence[FieldElement]]) -> FieldElement:
    """Determinant by Gaussian elimination over F_q."""
    rows = [list(r) for r in matrix]
    n = len(rows)
    if any(len(r) != n for r in rows):
        raise DimensionMismatchError("determinant of a non-square matrix")
    if n == 0:
        raise DimensionMismatchError("empty matrix")
    field = rows[0][0].field
    det = field.one
    for k in range(n):
        pivot = next((i for i in range(k, n) if rows[i][k]), None)
        if pivot is None:
            return field.zero
        if pivot != k:
            rows[k], rows[pivot] = rows[pivot], rows[k]
            det = -det
        det = det * rows[k][k]
        inv = rows[k][k].inv()
        for i in range(k + 1, n):
            f = rows[i][k] * inv
            if f:
                rows[i] = [a - f * b for a, b in zip(rows[i], rows[k])]
    return det


def matrix_inverse(matrix: Sequence[Sequence[FieldElement]]) -> Matrix:
    n = len(matrix)
    field = matrix[0][0].field
    aug = [list(r) + [field.one if i == j else field.zero for j in range(n)]
           for i, r in enumerate(matrix)]
    for k in range(n):
        pivot = next((i for i in range(k, n) if aug[i][k]), None)
        if pivot is None:
            raise ZeroDivisionError("singular matrix")
        aug[k], aug[pivot] = aug[pivot], aug[k]
        inv = aug[k][k].inv()
        aug[k] = [a * inv for a in aug[k]]
        for i in range(n):
            if i != k and aug[i][k]:
                f = aug[i][k]
                aug[i] = [a - f * b for a, b in zip(aug[i], aug[k])]
    return tuple(tuple(r[n:]) for r in aug)


def mat_vec(matrix: Sequence[Sequence[FieldElement]], x: Sequence[FieldElement]) -> list[FieldElement]:
    field = x[0].field
    out = []
    for row in matrix:
        acc = field.zero
        for a, b in zip(row, x):
            acc = acc + a * b
        out.append(acc)
    return out


def _identity(field: FiniteField, d: int) -> Matrix:
    return tuple(tuple(field.one if i == j else field.zero for j in range(d)) for i in range(d))


def _diagonal_values(field: FiniteField, coeffs: Sequence[int], points: np.ndarray) -> np.ndarray:
    """sum_j coeffs[j] * x_j^2 for every row x of ``points`` (canonical indices)."""
    t = field.tables
    total = np.zeros(points.shape[:-1], dtype=np.int64)
    for j, a in enumerate(coeffs):
        total = t.add[total, t.mul[a, t.square[points[..., j]]]]
    return total


@dataclass(frozen=True)
class QuadraticForm:
    """Q(x) = x^T A x for a symmetric non-singular A."""

    field: FiniteField
    matrix: Matrix

    def __post_init__(self):
        d = len(self.matrix)
        if d < 1 or any(len(r) != d for r in self.matrix):
            raise InvalidFormError("form matrix must be square and non-empty")
        for i in range(d):
            for j in range(i):
                if self.matrix[i][j] != self.matrix[j][i]:
                    raise InvalidFormError("form matrix must be symmetric")
        if not determinant(self.matrix):
            raise InvalidFormError("degenerate form: det(A) = 0")

    @classmethod
    def from_indices(cls, field: FiniteField, rows: Sequence[Sequence[int]]) -> "QuadraticForm":
        return cls(field, tuple(tuple(field(v) for v in r) for r in rows))

    @classmethod
    def euclidean(cls, field: FiniteField, d: int) -> "QuadraticForm":
        return cls(field, _identity(field, d))

    @property
    def dim(self) -> int:
        return len(self.matrix)

    def det(self) -> FieldElement:
        return determinant(self.matrix)

    def __call__(self, x) -> FieldElement:
        return evaluate(self, x)

    def values(self, points: np.ndarray) -> np.ndarray:
        """Vectorized evaluation over an (..., d) array of canonical indices."""
        t = self.field.tables
        total = np.zeros(points.shape[:-1], dtype=np.int64)
        for i in range(self.dim):
            for j in range(self.dim):
                a = self.matrix[i][j].index
                if a:
                    term = t.mul[a, t.mul[points[..., i], points[..., j]]]
                    total = t.add[total, term]
        return total


@dataclass(frozen=True)
class StandardForm:
    """Diagonal model (1, -1, ..., 1, -eps) (d even) or (1, -1, ..., -1, eps) (d odd).

    ``basis_change`` is the matrix C carrying the model back to the form it was
    derived from: original(C y) == self(y).
    """

    field: FiniteField
    dim: int
    epsilon: FieldElement
    basis_change: Matrix = dc_field(default=None, compare=False, repr=False)

    def __post_init__(self):
        if self.dim < 1:
            raise InvalidFormError("dimension must be positive")
        if not self.epsilon:
            raise InvalidFormError("epsilon must be nonzero")
        if self.basis_change is None:
            object.__setattr__(self, "basis_change", _identity(self.field, self.dim))

    @classmethod
    def make(cls, field: FiniteField, dim: int, epsilon=1) -> "StandardForm":
        eps = epsilon if isinstance(epsilon, FieldElement) else field(epsilon)
        return cls(field, dim, eps)

    @property
    def is_even(self) -> bool:
        return self.dim % 2 == 0

    @property
    def coeffs(self) -> tuple[FieldElement, ...]:
        f = self.field
        head = [f.one if i % 2 == 0 else -f.one for i in range(self.dim - 1)]
        last = -self.epsilon if self.is_even else self.epsilon
        return tuple(head + [last])

    @property
    def coeff_indices(self) -> tuple[int, ...]:
        return tuple(c.index for c in self.coeffs)

    def dual(self) -> "DualForm":
        return dual(self)

    def det(self) -> FieldElement:
        out = self.field.one
        for c in self.coeffs:
            out = out * c
        return out

    def __call__(self, x) -> FieldElement:
        return evaluate(self, x)

    def values(self, points: np.ndarray) -> np.ndarray:
        return _diagonal_values(self.field, self.coeff_indices, points)

    def eta_epsilon(self) -> int:
        return self.field.eta(self.epsilon)

    def describe(self) -> str:
        return f"standard:d={self.dim}:eps={self.epsilon.index}"


@dataclass(frozen=True)
class DualForm:
    """The dual model: coefficients are the entrywise inverses of the standard ones."""

    field: FiniteField
    coeffs: tuple[FieldElement, ...]

    @property
    def dim(self) -> int:
        return len(self.coeffs)

    @property
    def coeff_indices(self) -> tuple[int, ...]:
        return tuple(c.index for c in self.coeffs)

    def __call__(self, x) -> FieldElement:
        return evaluate(self, x)

    def values(self, points: np.ndarray) -> np.ndarray:
        return _diagonal_values(self.field, self.coeff_indices, points)


def dual(form: StandardForm) -> DualForm:
    return DualForm(form.field, tuple(c.inv() for c in form.coeffs))


def evaluate(form, x) -> FieldElement:
    """Exact value of a form at a single vector (indices or field elements)."""
    field = form.field
    x = _as_vector(field, x)
    if len(x) != form.dim:
        raise DimensionMismatchError(f"vector of length {len(x)} for a form of dimension {form.dim}")
    total = field.zero
    if isinstance(form, QuadraticForm):
        for i, row in enumerate(form.matrix):
            for j, a in enumerate(row):
                if a:
                    total = total + a * x[i] * x[j]
        return total
    for a, v in zip(form.coeffs, x):
        total = total + a * v * v
    return total


# -- standardization -----------------------------------------------------------

def _class_representative(field: FiniteField, value: FieldElement) -> FieldElement:
    """1 if ``value`` is a nonzero square, else the smallest-index non-square."""
    return field.one if field.eta(value) == 1 else field.smallest_nonsquare


def _represent(field: FiniteField, g1: FieldElement, g2: FieldElement, target: FieldElement):
    """(x, y) with g1 x^2 + g2 y^2 = target; exists for every target when g1 g2 != 0."""
    inv2 = g2.inv()
    for x in field.elements():
        rest = (target - g1 * x * x) * inv2
        if field.is_square(rest):
            return x, field.sqrt(rest)
    raise AssertionError("binary non-degenerate forms are universal over F_q")


def _congruence_diagonalize(form: QuadraticForm):
    """Symmetric row/column elimination.  Returns (diagonal, C) with C^T A C diagonal."""
    field, d = form.field, form.dim
    A = [list(r) for r in form.matrix]
    C = [list(r) for r in _identity(field, d)]

    def col_op(dst, src, factor):
        # column dst += factor * column src, applied as a congruence (rows too).
        for row in A:
            row[dst] = row[dst] + factor * row[src]
        A[dst] = [a + factor * b for a, b in zip(A[dst], A[src])]
        for row in C:
            row[dst] = row[dst] + factor * row[src]

    def swap(i, j):
        for row in A:
            row[i], row[j] = row[j], row[i]
        A[i], A[j] = A[j], A[i]
        for row in C:
            row[i], row[j] = row[j], row[i]

    for k in range(d):
        if not A[k][k]:
            j = next((j for j in range(k + 1, d) if A[j][j]), None)
            if j is not None:
                swap(k, j)
            else:
                j = next((j for j in range(k + 1, d) if A[k][j]), None)
                if j is None:
                    raise InvalidFormError("degenerate form: zero row in congruence reduction")
                # mix two coordinates: new pivot A[k][k] = 2 A[k][j] != 0
                col_op(k, j, field.one)
        inv = A[k][k].inv()
        for i in range(k + 1, d):
            if A[k][i]:
                col_op(i, k, -(A[k][i] * inv))
    return [A[i][i] for i in range(d)], C


def standardize(form: QuadraticForm) -> StandardForm:
    """Reduce ``form`` to its standard model; the change of variables is ``basis_change``."""
    field, d = form.field, form.dim
    g, C = _congruence_diagonalize(form)
    one = field.one

    def combine(i, j, x, y, w_i, w_j):
        # column i <- x c_i + y c_j ; column j <- w_i c_i + w_j c_j
        for row in C:
            ci, cj = row[i], row[j]
            row[i] = x * ci + y * cj
            row[j] = w_i * ci + w_j * cj

    # Fold the diagonal into 1, -1, 1, ... on the first d - 1 coordinates.
    for i in range(d - 1):
        target = one if i % 2 == 0 else -one
        if g[i] == target:
            continue
        x, y = _represent(field, g[i], g[i + 1], target)
        gi, gj = g[i], g[i + 1]
        # w = (-g_j y, g_i x) is orthogonal to v = (x, y) and independent of it.
        combine(i, i + 1, x, y, -(gj * y), gi * x)
        g[i], g[i + 1] = target, gi * gj * target

    last = g[d - 1]
    # Last coefficient is -eps (d even) or eps (d odd); eps picked from its square class.
    eps_class = -last if d % 2 == 0 else last
    eps = _class_representative(field, eps_class)
    target = -eps if d % 2 == 0 else eps
    s = field.sqrt(target / last)
    for row in C:
        row[d - 1] = row[d - 1] * s
    return StandardForm(field, d, eps, tuple(tuple(r) for r in C))


def discriminant_condition(form: StandardForm, det_a: FieldElement) -> bool:
    """eta((-1)^(d/2) eps) == eta(det A) for even d, eta((-1)^((d-1)/2) eps) == eta(det A) for odd d."""
    field, d = form.field, form.dim
    sign = (-1) ** (d // 2) if d % 2 == 0 else (-1) ** ((d - 1) // 2)
    return field.eta(form.epsilon * sign) == field.eta(det_a)


# -- text formats -------------------------------------------------------------------

def parse_form(text: str, field: FiniteField, dim: int | None = None):
    """Parse a form spec: "euclidean", "standard:eps=<k>", or a path to a form file.

    "euclidean" and "standard" need ``dim`` (or an inline ":d=<n>" component).
    A form file has a first line "d" and then d rows of d canonical indices.
    """
    text = text.strip()
    head, *parts = text.split(":")
    opts = {}
    for part in parts:
        key, sep, val = part.partition("=")
        if not sep:
            raise InvalidFormError(f"malformed form option {part!r}")
        opts[key.strip()] = int(val)
    if "d" in opts:
        if dim is not None and dim != opts["d"]:
            raise DimensionMismatchError(f"form dimension {opts['d']} != requested {dim}")
        dim = opts.pop("d")
    if head in ("euclidean", "standard"):
        if dim is None:
            raise InvalidFormError(f"form {text!r} needs a dimension")
        if head == "euclidean":
            if opts:
                raise InvalidFormError(f"unknown options for euclidean form: {sorted(opts)}")
            return QuadraticForm.euclidean(field, dim)
        unknown = set(opts) - {"eps"}
        if unknown:
            raise InvalidFormError(f"unknown options for standard form: {sorted(unknown)}")
        return StandardForm.make(field, dim, field(opts.get("eps", 1)))
    path = Path(text)
    if not path.exists():
        raise InvalidFormError(f"unknown form spec {text!r} (not a keyword or an existing file)")
    return read_form_file(path, field, dim)


def read_form_file(path, field: FiniteField, dim: int | None = None) -> QuadraticForm:
    lines = [ln.split() for ln in Path(path).read_text().splitlines() if ln.strip()]
    if not lines:
        raise InvalidFormError(f"empty form file {path}")
    if lines[0] == ["euclidean"]:
        if dim is None:
            raise InvalidFormError("euclidean form file needs a dimension")
        return QuadraticForm.euclidean(field, dim)
    d = int(lines[0][0])
    rows = [[int(v) for v in ln] for ln in lines[1:]]
    if len(rows) != d or any(len(r) != d for r in rows):
        raise InvalidFormError(f"form file {path}: expected {d} rows of {d} entries")
    if dim is not None and dim != d:
        raise DimensionMismatchError(f"form file has d={d}, requested {dim}")
    return QuadraticForm.from_indices(field, rows)


def write_form_file(path, form: QuadraticForm) -> None:
    lines = [str(form.dim)] + [" ".join(str(a.index) for a in row) for row in form.matrix]
    Path(path).write_text("\n".join(lines) + "\n")


def as_standard(form) -> StandardForm:
    if isinstance(form, StandardForm):
        return form
    if isinstance(form, QuadraticForm):
        return standardize(form)
    raise TypeError(f"expected a quadratic form, got {type(form).__name__}")


def require_theorem_dimension(form) -> None:
    if form.dim < 2:
        raise DomainError("the counting theorems need d >= 2")

"""Exact scalars and dense linear algebra over Q and small prime fields.

Everything here is exact: rationals are arbitrary-precision ``Fraction``
values, prime-field elements are ints reduced mod p.  All operations are
pure and deterministic; matrices are immutable after construction.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

MAX_PRIME = 97


class FieldMismatchError(ValueError):
    """Raised when operands from different ground fields are mixed."""


class DimensionMismatchError(ValueError):
    """Raised when matrix shapes do not line up."""


def _is_prime(p):
    if p < 2:
        return False
    d = 2
    while d * d <= p:
        if p % d == 0:
            return False
        d += 1
    return True


class Field:
    """A ground field: Q or F_p for a small prime p.

    Field objects are tiny singletons carrying the tag used in fixture
    files ("Q", "F2", "F3", ...) and the raw-value arithmetic.  Raw values
    are ``Fraction`` over Q and ``int`` in [0, p) over F_p.
    """

    tag: str
    char: int

    def zero(self):
        raise NotImplementedError

    def one(self):
        raise NotImplementedError

    def coerce(self, x):
        raise NotImplementedError

    def add(self, a, b):
        raise NotImplementedError

    def neg(self, a):
        raise NotImplementedError

    def mul(self, a, b):
        raise NotImplementedError

    def inv(self, a):
        raise NotImplementedError

    def sub(self, a, b):
        return self.add(a, self.neg(b))

    def div(self, a, b):
        return self.mul(a, self.inv(b))

    def parse(self, s):
        raise NotImplementedError

    def fmt(self, a):
        raise NotImplementedError

    def __repr__(self):
        return self.tag

    def __eq__(self, other):
        return isinstance(other, Field) and self.tag == other.tag

    def __hash__(self):
        return hash(self.tag)


class RationalField(Field):
    tag = "Q"
    char = 0

    def zero(self):
        return Fraction(0)

    def one(self):
        return Fraction(1)

    def coerce(self, x):
        if isinstance(x, Fraction):
            return x
        if isinstance(x, int):
            return Fraction(x)
        if isinstance(x, str):
            return self.parse(x)
        raise TypeError(f"cannot coerce {x!r} into Q")

    def add(self, a, b):
        return a + b

    def neg(self, a):
        return -a

    def mul(self, a, b):
        return a * b

    def inv(self, a):
        if a == 0:
            raise ZeroDivisionError("inverse of 0 in Q")
        return 1 / a

    def parse(self, s):
        return Fraction(s)

    def fmt(self, a):
        if a.denominator == 1:
            return str(a.numerator)
        return f"{a.numerator}/{a.denominator}"


class PrimeField(Field):
    def __init__(self, p):
        if not _is_prime(p) or p > MAX_PRIME:
            raise ValueError(f"unsupported prime field modulus {p}")
        self.p = p
        self.tag = f"F{p}"
        self.char = p

    def zero(self):
        return 0

    def one(self):
        return 1

    def coerce(self, x):
        if isinstance(x, int):
            return x % self.p
        if isinstance(x, Fraction):
            if x.denominator % self.p == 0:
                raise ZeroDivisionError(f"denominator not invertible mod {self.p}")
            return (x.numerator * pow(x.denominator, -1, self.p)) % self.p
        if isinstance(x, str):
            return self.parse(x)
        raise TypeError(f"cannot coerce {x!r} into {self.tag}")

    def add(self, a, b):
        return (a + b) % self.p

    def neg(self, a):
        return (-a) % self.p

    def mul(self, a, b):
        return (a * b) % self.p

    def inv(self, a):
        if a % self.p == 0:
            raise ZeroDivisionError(f"inverse of 0 in {self.tag}")
        return pow(a, -1, self.p)

    def parse(self, s):
        return int(s) % self.p

    def fmt(self, a):
        return str(a % self.p)


QQ = RationalField()
F2 = PrimeField(2)
F3 = PrimeField(3)

_FIELD_CACHE = {"Q": QQ, "F2": F2, "F3": F3}


def field_from_tag(tag):
    """Return the field for a serialized tag: "Q" | "F2" | "F3" | "F<p>"."""
    if tag in _FIELD_CACHE:
        return _FIELD_CACHE[tag]
    if tag.startswith("F"):
        fld = PrimeField(int(tag[1:]))
        _FIELD_CACHE[tag] = fld
        return fld
    raise ValueError(f"unknown field tag {tag!r}")


@dataclass(frozen=True)
class Scalar:
    """A field element tagged with its field, for API boundaries and fixtures."""

    field: Field
    value: object

    @staticmethod
    def of(field, x):
        return Scalar(field, field.coerce(x))

    def _check(self, other):
        if self.field != other.field:
            raise FieldMismatchError(f"{self.field} vs {other.field}")

    def __add__(self, other):
        self._check(other)
        return Scalar(self.field, self.field.add(self.value, other.value))

    def __sub__(self, other):
        self._check(other)
        return Scalar(self.field, self.field.sub(self.value, other.value))

    def __mul__(self, other):
        self._check(other)
        return Scalar(self.field, self.field.mul(self.value, other.value))

    def __truediv__(self, other):
        self._check(other)
        return Scalar(self.field, self.field.div(self.value, other.value))

    def __neg__(self):
        return Scalar(self.field, self.field.neg(self.value))

    def __str__(self):
        return self.field.fmt(self.value)


class Matrix:
    """Immutable dense matrix over one field; entries stored row-major."""

    __slots__ = ("field", "rows", "cols", "data")

    def __init__(self, field, rows, cols, data, _raw=False):
        if rows < 0 or cols < 0:
            raise DimensionMismatchError("negative matrix dimensions")
        self.field = field
        self.rows = rows
        self.cols = cols
        if _raw:
            self.data = data
        else:
            if len(data) != rows:
                raise DimensionMismatchError("row count mismatch")
            norm = []
            for r in data:
                if len(r) != cols:
                    raise DimensionMismatchError("column count mismatch")
                norm.append(tuple(field.coerce(x) for x in r))
            self.data = tuple(norm)

    # -- constructors -------------------------------------------------

    @staticmethod
    def zeros(field, rows, cols):
        z = field.zero()
        return Matrix(field, rows, cols, tuple((z,) * cols for _ in range(rows)), _raw=True)

    @staticmethod
    def identity(field, n):
        z, o = field.zero(), field.one()
        return Matrix(
            field, n, n,
            tuple(tuple(o if i == j else z for j in range(n)) for i in range(n)),
            _raw=True,
        )

    @staticmethod
    def from_rows(field, rows):
        return Matrix(field, len(rows), len(rows[0]) if rows else 0, rows)

    @staticmethod
    def column(field, entries):
        return Matrix(field, len(entries), 1, [[x] for x in entries])

    @staticmethod
    def from_columns(field, nrows, columns):
        return Matrix(field, nrows, len(columns),
                      [[columns[j][i] for j in range(len(columns))] for i in range(nrows)])

    # -- basic access -------------------------------------------------

    def __getitem__(self, ij):
        i, j = ij
        return self.data[i][j]

    def entry_scalar(self, i, j):
        return Scalar(self.field, self.data[i][j])

    def column_values(self, j):
        return [self.data[i][j] for i in range(self.rows)]

    def columns(self):
        return [self.column_values(j) for j in range(self.cols)]

    def is_zero(self):
        z = self.field.zero()
        return all(x == z for row in self.data for x in row)

    def __eq__(self, other):
        return (isinstance(other, Matrix) and self.field == other.field
                and self.rows == other.rows and self.cols == other.cols
                and self.data == other.data)

    def __hash__(self):
        return hash((self.field, self.rows, self.cols, self.data))

    def __repr__(self):
        body = "; ".join(" ".join(self.field.fmt(x) for x in row) for row in self.data)
        return f"Matrix<{self.field}:{self.rows}x{self.cols}|{body}>"

    # -- arithmetic ---------------------------------------------------

    def _check_field(self, other):
        if self.field != other.field:
            raise FieldMismatchError(f"{self.field} vs {other.field}")

    def __add__(self, other):
        self._check_field(other)
        if (self.rows, self.cols) != (other.rows, other.cols):
            raise DimensionMismatchError("add: shape mismatch")
        add = self.field.add
        return Matrix(self.field, self.rows, self.cols,
                      tuple(tuple(add(a, b) for a, b in zip(ra, rb))
                            for ra, rb in zip(self.data, other.data)), _raw=True)

    def __sub__(self, other):
        return self + (-other)

    def __neg__(self):
        neg = self.field.neg
        return Matrix(self.field, self.rows, self.cols,
                      tuple(tuple(neg(a) for a in row) for row in self.data), _raw=True)

    def scale(self, c):
        c = self.field.coerce(c)
        mul = self.field.mul
        return Matrix(self.field, self.rows, self.cols,
                      tuple(tuple(mul(c, a) for a in row) for row in self.data), _raw=True)

    def __mul__(self, other):
        self._check_field(other)
        if self.cols != other.rows:
            raise DimensionMismatchError(
                f"mul: {self.rows}x{self.cols} by {other.rows}x{other.cols}")
        f = self.field
        z = f.zero()
        add, mul = f.add, f.mul
        ocols = list(zip(*other.data)) if other.data else [()] * other.cols
        out = []
        for row in self.data:
            out_row = []
            for j in range(other.cols):
                col = ocols[j] if ocols else ()
                acc = z
                for a, b in zip(row, col):
                    if a != z and b != z:
                        acc = add(acc, mul(a, b))
                out_row.append(acc)
            out.append(tuple(out_row))
        return Matrix(f, self.rows, other.cols, tuple(out), _raw=True)

    def transpose(self):
        return Matrix(self.field, self.cols, self.rows,
                      tuple(zip(*self.data)) if self.data else tuple(() for _ in range(self.cols)),
                      _raw=True)

    def hstack(self, other):
        self._check_field(other)
        if self.rows != other.rows:
            raise DimensionMismatchError("hstack: row mismatch")
        return Matrix(self.field, self.rows, self.cols + other.cols,
                      tuple(ra + rb for ra, rb in zip(self.data, other.data)), _raw=True)

    def vstack(self, other):
        self._check_field(other)
        if self.cols != other.cols:
            raise DimensionMismatchError("vstack: col mismatch")
        return Matrix(self.field, self.rows + other.rows, self.cols,
                      self.data + other.data, _raw=True)

    def submatrix_columns(self, js):
        return Matrix(self.field, self.rows, len(js),
                      tuple(tuple(row[j] for j in js) for row in self.data), _raw=True)

    # -- elimination --------------------------------------------------

    def _rref(self, col_order=None):
        """Reduced row echelon form; returns (rows as lists, pivot column list)."""
        f = self.field
        z = f.zero()
        sub, mul = f.sub, f.mul
        m = [list(row) for row in self.data]
        order = list(range(self.cols)) if col_order is None else list(col_order)
        pivots = []
        r = 0
        for j in order:
            if r >= self.rows:
                break
            piv = None
            for i in range(r, self.rows):
                if m[i][j] != z:
                    piv = i
                    break
            if piv is None:
                continue
            m[r], m[piv] = m[piv], m[r]
            if m[r][j] != f.one():
                inv = f.inv(m[r][j])
                m[r] = [x if x == z else mul(inv, x) for x in m[r]]
            mr = m[r]
            for i in range(self.rows):
                if i != r and m[i][j] != z:
                    c = m[i][j]
                    mi = m[i]
                    m[i] = [a if b == z else sub(a, mul(c, b)) for a, b in zip(mi, mr)]
            pivots.append(j)
            r += 1
        return m, pivots

    def _forward_pivots(self, col_order=None):
        """Pivot columns of a forward (rank-only) elimination."""
        f = self.field
        z = f.zero()
        sub, mul = f.sub, f.mul
        m = [list(row) for row in self.data]
        order = list(range(self.cols)) if col_order is None else list(col_order)
        pivots = []
        r = 0
        nrows = self.rows
        for j in order:
            if r >= nrows:
                break
            piv = None
            for i in range(r, nrows):
                if m[i][j] != z:
                    piv = i
                    break
            if piv is None:
                continue
            m[r], m[piv] = m[piv], m[r]
            mr = m[r]
            pj = mr[j]
            for i in range(r + 1, nrows):
                if m[i][j] != z:
                    c = f.div(m[i][j], pj)
                    mi = m[i]
                    m[i] = [a if b == z else sub(a, mul(c, b)) for a, b in zip(mi, mr)]
            pivots.append(j)
            r += 1
        return pivots

    def rref(self):
        m, pivots = self._rref()
        return Matrix(self.field, self.rows, self.cols, m), tuple(pivots)

    def rank(self):
        return len(self._forward_pivots())

    def rank_reversed_order(self):
        """Rank via elimination in reversed column order (self-check path)."""
        return len(self._forward_pivots(col_order=range(self.cols - 1, -1, -1)))

    def kernel_basis(self):
        """Matrix whose columns are a basis of ker(self); cols = cols - rank."""
        f = self.field
        z, o = f.zero(), f.one()
        m, pivots = self._rref()
        pivset = set(pivots)
        free = [j for j in range(self.cols) if j not in pivset]
        cols = []
        for fj in free:
            v = [z] * self.cols
            v[fj] = o
            for r, pj in enumerate(pivots):
                v[pj] = f.neg(m[r][fj])
            cols.append(v)
        return Matrix.from_columns(f, self.cols, cols) if cols else Matrix.zeros(f, self.cols, 0)

    def image_basis(self):
        """Matrix whose columns are a basis of the column space."""
        return self.submatrix_columns(self._forward_pivots())

    def solve(self, b):
        """Solve self @ x = b for a column matrix b; None if inconsistent.

        With multiple RHS columns, solves them all simultaneously.
        """
        self._check_field(b)
        if b.rows != self.rows:
            raise DimensionMismatchError("solve: rhs row mismatch")
        f = self.field
        z = f.zero()
        aug = self.hstack(b)
        m, pivots = aug._rref(col_order=range(self.cols))
        sols = []
        for k in range(b.cols):
            x = [z] * self.cols
            for r, pj in enumerate(pivots):
                x[pj] = m[r][self.cols + k]
            sols.append(x)
        # consistency: rows with zero coefficient part must have zero rhs
        for r in range(len(pivots), self.rows):
            if any(m[r][j] != z for j in range(self.cols, self.cols + b.cols)):
                return None
        cand = Matrix.from_columns(f, self.cols, sols)
        return cand


def rank(m):
    return m.rank()


def kernel_basis(m):
    return m.kernel_basis()


def image_basis(m):
    return m.image_basis()


def solve(m, b):
    return m.solve(b)


@dataclass(frozen=True)
class QuotientData:
    """A surjection V -> V/span(W) with a chosen linear section.

    projection: (dim x v_dim), section: (v_dim x dim), projection*section = id.
    rep_indices[i] is the coordinate of V whose image is the i-th quotient
    basis vector (the section is the corresponding standard inclusion).
    """

    projection: Matrix
    section: Matrix
    dim: int
    rep_indices: tuple


def quotient_with_section(v_dim, w):
    """Quotient of k^v_dim by the span of the columns of w."""
    if w.rows != v_dim:
        raise DimensionMismatchError(f"quotient: relations live in dim {w.rows}, not {v_dim}")
    f = w.field
    z, o = f.zero(), f.one()
    rr, pivots = w.transpose()._rref()
    pivset = set(pivots)
    free = [j for j in range(v_dim) if j not in pivset]
    proj_rows = []
    for fi, qj in enumerate(free):
        row = [z] * v_dim
        row[qj] = o
        for r, pj in enumerate(pivots):
            row[pj] = f.neg(rr[r][qj])
        proj_rows.append(row)
    projection = Matrix(f, len(free), v_dim, proj_rows)
    sec_cols = []
    for qj in free:
        v = [z] * v_dim
        v[qj] = o
        sec_cols.append(v)
    section = Matrix.from_columns(f, v_dim, sec_cols) if sec_cols else Matrix.zeros(f, v_dim, 0)
    return QuotientData(projection, section, len(free), tuple(free))


def quotient_basis(v_dim, w):
    """Surjection k^v_dim -> quotient by span of columns of w: (projection, dim)."""
    qd = quotient_with_section(v_dim, w)
    return qd.projection, qd.dim

"""Number fields given by a monic polynomial and an ingested integral basis.

Elements are stored by their power-basis coordinates as Fractions and all
arithmetic on them is exact.  Complex embeddings are computed once per
precision with mpmath and cached on the field.

The same class serves the sextic CM field K and its cubic real subfield
K0, so ideal and class group code is shared between the two.
"""
from __future__ import annotations

import itertools
from fractions import Fraction
from functools import cached_property

import mpmath
import sympy

from . import linalg
from .errors import (
    BasisNotARing,
    DiscriminantMismatch,
    NotCM,
    NotTotallyImaginary,
    PolynomialReducible,
    PrecisionTooLow,
    ValidationError,
)

DEFAULT_PRECISION = 100


def _frac(s) -> Fraction:
    return Fraction(s) if not isinstance(s, Fraction) else s


def _polymulmod(a, b, f):
    """Product of coefficient lists (low degree first) modulo monic f."""
    n = len(f) - 1
    prod = [Fraction(0)] * (2 * n - 1)
    for i, x in enumerate(a):
        if x:
            for j, y in enumerate(b):
                if y:
                    prod[i + j] += x * y
    for k in range(2 * n - 2, n - 1, -1):
        c = prod[k]
        if c:
            for j in range(n):
                prod[k - n + j] -= c * f[j]
    return prod[:n]


class FieldElement:
    """Exact element of a number field, stored in power-basis coordinates."""

    __slots__ = ("field", "coords", "_zk")

    def __init__(self, field, coords):
        self.field = field
        self.coords = tuple(_frac(c) for c in coords)
        self._zk = None

    # construction helpers -------------------------------------------------
    @classmethod
    def from_zk(cls, field, zk):
        v = linalg.vecmat([_frac(c) for c in zk], field.basis)
        out = cls(field, v)
        out._zk = tuple(_frac(c) for c in zk)
        return out

    @property
    def zk(self):
        """Coordinates on the integral basis."""
        if self._zk is None:
            self._zk = tuple(linalg.vecmat(self.coords, self.field.basis_inv))
        return self._zk

    def is_integral(self):
        return all(c.denominator == 1 for c in self.zk)

    def is_rational(self):
        return not any(self.coords[1:])

    # arithmetic ------------------------------------------------------------
    def _coerce(self, other):
        if isinstance(other, FieldElement):
            if other.field is not self.field:
                raise ValidationError("elements of different fields")
            return other
        if isinstance(other, (int, Fraction)):
            return self.field(other)
        return NotImplemented

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return FieldElement(self.field, [a + b for a, b in zip(self.coords, other.coords)])

    __radd__ = __add__

    def __neg__(self):
        return FieldElement(self.field, [-a for a in self.coords])

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            return FieldElement(self.field, [a * other for a in self.coords])
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return FieldElement(self.field, _polymulmod(self.coords, other.coords, self.field.f))

    __rmul__ = __mul__

    def __truediv__(self, other):
        if isinstance(other, (int, Fraction)):
            return FieldElement(self.field, [a / other for a in self.coords])
        return self * self._coerce(other).inverse()

    def __rtruediv__(self, other):
        return self.inverse() * other

    def __pow__(self, k: int):
        if k < 0:
            return self.inverse() ** (-k)
        out = self.field(1)
        base = self
        while k:
            if k & 1:
                out = out * base
            base = base * base
            k >>= 1
        return out

    def __eq__(self, other):
        if isinstance(other, (int, Fraction)):
            other = self.field(other)
        if not isinstance(other, FieldElement):
            return NotImplemented
        return self.field is other.field and self.coords == other.coords

    def __hash__(self):
        return hash(self.coords)

    def __bool__(self):
        return any(self.coords)

    def __repr__(self):
        return f"FieldElement({[str(c) for c in self.coords]})"

    def mul_matrix(self):
        """Matrix (rows) of y -> self*y on the power basis."""
        n = self.field.degree
        rows = []
        p = list(self.coords)
        for _ in range(n):
            rows.append(p)
            p = _polymulmod(p, [Fraction(0), Fraction(1)] + [Fraction(0)] * (n - 2), self.field.f)
        return rows

    def inverse(self):
        if not self:
            raise ZeroDivisionError("inverse of zero")
        n = self.field.degree
        m = self.mul_matrix()
        e = [Fraction(1)] + [Fraction(0)] * (n - 1)
        # y * m = e  with y the coefficient vector of the inverse
        y = linalg.solve_fraction(linalg.transpose(m), e)
        return FieldElement(self.field, y)

    def norm(self) -> Fraction:
        return linalg.det_fraction(self.mul_matrix())

    def trace(self) -> Fraction:
        m = self.mul_matrix()
        return sum(m[i][i] for i in range(len(m)))

    def minpoly(self):
        """Minimal polynomial over Q, monic, coefficients low degree first."""
        n = self.field.degree
        powers = [self.field(1).coords]
        p = self.field(1)
        for d in range(1, n + 1):
            p = p * self
            # look for a relation among 1, x, ..., x^d
            rows = [list(c) for c in powers] + [list(p.coords)]
            ker = _rational_kernel(rows)
            if ker:
                rel = ker[0]
                lead = rel[-1]
                return [c / lead for c in rel]
            powers.append(p.coords)
        raise AssertionError("no minimal polynomial found")

    def conj(self):
        return self.field.conj(self)

    # numerics --------------------------------------------------------------
    def embeddings(self, precision=DEFAULT_PRECISION):
        return self.field.embed(self, precision)

    def float_embeddings(self):
        return self.field.embed_float(self)

    def to_json(self):
        return [str(c) for c in self.coords]


def _rational_kernel(rows):
    """Basis of {y : y * rows = 0} over Q (rows are Fraction vectors)."""
    den = linalg.common_denominator(rows)
    ints = [[int(x * den) for x in r] for r in rows]
    return [[Fraction(v) for v in k] for k in linalg.integer_kernel(ints)]


class NumberField:
    """Q[t]/(f) together with a validated integral basis.

    ``coeffs`` are the coefficients of f, constant term first, ending in 1.
    ``basis`` has one row per integral basis element, in power-basis
    coordinates.
    """

    def __init__(self, coeffs, basis=None, disc=None, label=None, require_cm=None):
        coeffs = [int(c) for c in coeffs]
        if coeffs[-1] != 1:
            raise ValidationError("defining polynomial must be monic")
        self.f = [Fraction(c) for c in coeffs]
        self.coeffs = coeffs
        self.degree = n = len(coeffs) - 1
        self.label = label
        t = sympy.Symbol("t")
        self._poly = sympy.Poly(list(reversed(coeffs)), t, domain="ZZ")
        if not self._poly.is_irreducible:
            raise PolynomialReducible(f"{self._poly.as_expr()} is reducible over Q")
        if basis is None:
            basis = linalg.identity(n)
        self.basis = [[_frac(x) for x in row] for row in basis]
        if len(self.basis) != n or any(len(r) != n for r in self.basis):
            raise ValidationError("integral basis must be an n x n matrix")
        if linalg.det_fraction(self.basis) == 0:
            raise ValidationError("integral basis is singular")
        self.basis_inv = linalg.inverse_fraction(self.basis)
        self._check_ring()
        tr = self.trace_matrix
        d = linalg.det_bareiss(tr)
        if disc is not None and int(disc) != d:
            raise DiscriminantMismatch(f"declared discriminant {disc}, basis gives {d}")
        self.disc = d
        self._emb_cache = {}
        self._float_cache = None

    def __call__(self, x):
        if isinstance(x, FieldElement):
            if x.field is not self:
                raise ValidationError("element of another field")
            return x
        if isinstance(x, (list, tuple)):
            return FieldElement(self, x)
        return FieldElement(self, [_frac(x)] + [Fraction(0)] * (self.degree - 1))

    def __repr__(self):
        return f"NumberField({self.label or self.coeffs})"

    @property
    def gen(self):
        return FieldElement(self, [0, 1] + [0] * (self.degree - 2))

    def zk_element(self, zk):
        return FieldElement.from_zk(self, zk)

    def basis_elements(self):
        n = self.degree
        return [self.zk_element([int(i == j) for j in range(n)]) for i in range(n)]

    # structure ----------------------------------------------------------------
    def _check_ring(self):
        n = self.degree
        elems = [FieldElement(self, r) for r in self.basis]
        table = [[None] * n for _ in range(n)]
        for i in range(n):
            for j in range(i, n):
                z = (elems[i] * elems[j]).zk
                if any(c.denominator != 1 for c in z):
                    raise BasisNotARing("basis is not closed under multiplication")
                table[i][j] = table[j][i] = [int(c) for c in z]
        one = FieldElement(self, [1] + [0] * (n - 1)).zk
        if any(c.denominator != 1 for c in one):
            raise BasisNotARing("basis lattice does not contain 1")
        self.one_zk = [int(c) for c in one]
        self.mult_table = table

    def zk_mul(self, x, y):
        """Product of two integral-basis coordinate vectors."""
        n = self.degree
        out = [0] * n
        T = self.mult_table
        for i in range(n):
            xi = x[i]
            if not xi:
                continue
            for j in range(n):
                yj = y[j]
                if yj:
                    c = xi * yj
                    row = T[i][j]
                    for k in range(n):
                        if row[k]:
                            out[k] += c * row[k]
        return out

    def zk_mul_matrix(self, x):
        """Rows: x * w_j in integral-basis coordinates."""
        n = self.degree
        rows = []
        for j in range(n):
            r = [0] * n
            for i in range(n):
                if x[i]:
                    for k, v in enumerate(self.mult_table[i][j]):
                        if v:
                            r[k] += x[i] * v
            rows.append(r)
        return rows

    def zk_norm(self, x) -> int:
        """Exact norm of an algebraic integer given by integral coordinates."""
        return linalg.det_bareiss(self.zk_mul_matrix(x))

    @cached_property
    def trace_vector(self):
        return [int(e.trace()) for e in self.basis_elements()]

    @cached_property
    def trace_matrix(self):
        n = self.degree
        tv = [int(FieldElement(self, r).trace()) for r in self.basis]
        return [[sum(tv[k] * self.mult_table[i][j][k] for k in range(n)) for j in range(n)] for i in range(n)]

    @cached_property
    def index(self) -> int:
        """[Z_K : Z[t]]."""
        return abs(int(1 / linalg.det_fraction(self.basis)))

    @cached_property
    def poly_disc(self) -> int:
        return int(sympy.discriminant(self._poly))

    @property
    def sympy_poly(self):
        return self._poly

    # embeddings --------------------------------------------------------------
    def roots(self, precision=DEFAULT_PRECISION):
        """Roots of f at ``precision`` digits in the fixed embedding order.

        Complex roots: those with positive imaginary part sorted by (re, im),
        each followed by its conjugate.  Real roots: ascending.
        """
        key = int(precision)
        if key in self._emb_cache:
            return self._emb_cache[key][0]
        dps = key + 20
        with mpmath.workdps(dps + 20):
            raw = mpmath.polyroots(list(reversed(self.coeffs)), maxsteps=400, extraprec=4 * dps)
            polished = []
            for r in raw:
                for _ in range(8):
                    fv, dv = mpmath.polyval(list(reversed(self.coeffs)), r, derivative=True)
                    r = r - fv / dv
                fv, dv = mpmath.polyval(list(reversed(self.coeffs)), r, derivative=True)
                if abs(fv / dv) > mpmath.mpf(10) ** (-(key + 10)):
                    raise PrecisionTooLow("root refinement did not converge")
                polished.append(r)
            tol = mpmath.mpf(10) ** (-(key + 5))
            reals = sorted(mpmath.re(r) for r in polished if abs(mpmath.im(r)) < tol)
            # round the sort keys so that ties (equal real parts are common)
            # are broken the same way at every precision
            scale = mpmath.mpf(10) ** 25
            upper = sorted(
                (r for r in polished if mpmath.im(r) >= tol),
                key=lambda z: (int(mpmath.nint(mpmath.re(z) * scale)), int(mpmath.nint(mpmath.im(z) * scale))),
            )
            ordered = [mpmath.mpc(r, 0) for r in reals]
            for r in upper:
                ordered += [r, mpmath.conj(r)]
            if len(ordered) != self.degree:
                raise PrecisionTooLow("could not separate the roots")
        with mpmath.workdps(dps):
            vals = [[+v for v in self._basis_values(r)] for r in ordered]
            ordered = [+r for r in ordered]
        self._emb_cache[key] = (ordered, vals)
        return ordered

    def _basis_values(self, r):
        n = self.degree
        pw = [mpmath.mpc(1)]
        for _ in range(n - 1):
            pw.append(pw[-1] * r)
        out = []
        for row in self.basis:
            s = mpmath.mpc(0)
            for c, p in zip(row, pw):
                if c:
                    s += mpmath.mpf(c.numerator) / c.denominator * p
            out.append(s)
        return out

    def basis_values(self, precision=DEFAULT_PRECISION):
        """Matrix V[k][i] = w_i(r_k)."""
        self.roots(precision)
        return self._emb_cache[int(precision)][1]

    @property
    def n_real(self):
        r = self.roots(30)
        return sum(1 for z in r if mpmath.im(z) == 0)

    def embed(self, x, precision=DEFAULT_PRECISION):
        V = self.basis_values(precision)
        zk = self(x).zk if not isinstance(x, (list, tuple)) else x
        with mpmath.workdps(int(precision) + 20):
            coeffs = [mpmath.mpf(c.numerator) / c.denominator if isinstance(c, Fraction) else mpmath.mpf(c) for c in zk]
            return [mpmath.fsum(c * v for c, v in zip(coeffs, row) if c) for row in V]

    @cached_property
    def float_basis_values(self):
        return [[complex(v) for v in row] for row in self.basis_values(30)]

    def embed_float(self, x):
        zk = self(x).zk if not isinstance(x, (list, tuple)) else x
        return [sum(float(c) * v for c, v in zip(zk, row) if c) for row in self.float_basis_values]

    def lift(self, values, precision=DEFAULT_PRECISION, den=1):
        """Integral-basis coordinates of the element with the given embedding
        values, assuming they are integers after scaling by ``den``.

        Returns a list of ints (numerators over ``den``) or None when the
        solution is not close to an integer vector.
        """
        V = self.basis_values(precision)
        with mpmath.workdps(int(precision) + 20):
            M = mpmath.matrix(V)
            b = mpmath.matrix([mpmath.mpc(v) for v in values])
            c = mpmath.lu_solve(M, b)
            out = []
            tol = mpmath.mpf(10) ** (-(int(precision) // 2))
            for k in range(self.degree):
                z = c[k] * den
                zi = int(mpmath.nint(mpmath.re(z)))
                if abs(z - zi) > tol:
                    return None
                out.append(zi)
        return out

    # Minkowski data ------------------------------------------------------------
    @cached_property
    def t2_gram(self):
        """Exact Gram matrix of sum_k |w(r_k)|^2 on the integral basis."""
        n = self.degree
        if self.n_real == n:
            return [list(r) for r in self.trace_matrix]
        rho = self.conj_matrix
        tv = self.trace_vector
        G = [[0] * n for _ in range(n)]
        for i in range(n):
            for j in range(n):
                p = self.zk_mul([int(i == k) for k in range(n)], rho[j])
                G[i][j] = sum(a * b for a, b in zip(p, tv))
        return G

    @cached_property
    def minkowski_bound(self) -> float:
        import math

        n = self.degree
        r2 = (n - self.n_real) // 2
        return (4 / math.pi) ** r2 * math.factorial(n) / n**n * math.sqrt(abs(self.disc))

    # complex conjugation --------------------------------------------------------
    @cached_property
    def conj_matrix(self):
        """Integer matrix whose rows are rho(w_i) on the integral basis."""
        n = self.degree
        if self.n_real == n:
            return linalg.identity(n)
        if self.n_real != 0:
            raise NotTotallyImaginary("field has real embeddings")
        prec = 60
        roots = self.roots(prec)
        with mpmath.workdps(prec + 20):
            vals = [mpmath.conj(r) for r in roots]
        # rho(t) is integral, so its coordinates on the integral basis are integers
        zk = self.lift(vals, prec)
        if zk is None:
            raise NotCM("complex conjugation is not a field automorphism")
        img = FieldElement.from_zk(self, zk)
        if _polyval_elem(self.f, img) != self(0) or img == self.gen:
            raise NotCM("complex conjugation is not a field automorphism")
        rows = []
        for row in self.basis:
            e = _polyval_elem(list(row), img)
            z = e.zk
            if any(c.denominator != 1 for c in z):
                raise NotCM("conjugation does not preserve the integral basis")
            rows.append([int(c) for c in z])
        # numeric cross-check on every embedding
        for i, r in enumerate(rows):
            a = self.embed_float(r)
            b = self.float_basis_values
            for k in range(n):
                if abs(a[k] - b[k][i].conjugate()) > 1e-8 * (1 + abs(a[k])):
                    raise NotCM("conjugation does not commute with the embeddings")
        return rows

    def conj(self, x):
        x = self(x)
        z = linalg.vecmat(x.zk, self.conj_matrix)
        return FieldElement.from_zk(self, z)

    def conj_zk(self, zk):
        return linalg.vecmat(zk, self.conj_matrix)

    @cached_property
    def conj_pairs(self):
        """Embedding index of the complex conjugate of each embedding."""
        roots = self.roots(30)
        out = []
        for z in roots:
            c = mpmath.conj(z)
            out.append(min(range(len(roots)), key=lambda k: abs(roots[k] - c)))
        return out

    # subfield -------------------------------------------------------------------
    @cached_property
    def real_subfield(self):
        return totally_real_subfield(self)

    @cached_property
    def different(self):
        return different_ideal(self)


def _polyval_elem(coeffs, x):
    """Evaluate the polynomial with given coefficients (low first) at x."""
    out = x.field(0)
    for c in reversed(coeffs):
        out = out * x + _frac(c)
    return out


class SubfieldModel:
    """The totally real cubic subfield K0 together with its embedding in K.

    ``k0`` is a NumberField of degree 3 whose integral basis consists of the
    rho-fixed part of Z_K; ``zk_matrix`` holds the images of that basis in
    the integral-basis coordinates of K.
    """

    def __init__(self, K, k0, gen_in_K, zk_matrix):
        self.K = K
        self.k0 = k0
        self.gen_in_K = gen_in_K
        self.zk_matrix = zk_matrix
        # coordinates of a K-element (integral basis) back on the K0 basis
        self._pivots = None
        self._place_map = None

    @property
    def polynomial(self):
        return self.k0.coeffs

    def to_K(self, x):
        """Image in K of a K0 element."""
        x = self.k0(x)
        return FieldElement.from_zk(self.K, linalg.vecmat(x.zk, self.zk_matrix))

    def from_K(self, x):
        """Preimage in K0 of a rho-fixed element of K."""
        x = self.K(x)
        if self.K.conj(x) != x:
            raise ValidationError("element is not in the real subfield")
        sol = _solve_rows(self.zk_matrix, list(x.zk))
        return FieldElement.from_zk(self.k0, sol)

    def relative_norm(self, x):
        x = self.K(x)
        return self.from_K(x * self.K.conj(x))

    def relative_trace(self, x):
        x = self.K(x)
        return self.from_K(x + self.K.conj(x))

    @property
    def place_map(self):
        """place_map[k] = index of the real place of K0 below embedding k of K."""
        if self._place_map is None:
            a = self.gen_in_K.float_embeddings()
            r = [float(mpmath.re(z)) for z in self.k0.roots(30)]
            self._place_map = [min(range(3), key=lambda j: abs(a[k].real - r[j])) for k in range(self.K.degree)]
        return self._place_map


def _solve_rows(rows, v):
    """Solve y * rows = v for y (rows has full row rank)."""
    m = len(rows)
    n = len(rows[0])
    # pick m independent columns
    for cols in itertools.combinations(range(n), m):
        sub = [[r[c] for c in cols] for r in rows]
        if linalg.det_fraction(sub) != 0:
            y = linalg.solve_fraction(linalg.transpose(sub), [v[c] for c in cols])
            if linalg.vecmat(y, rows) != [Fraction(x) for x in v]:
                raise ValidationError("vector not in the row span")
            return y
    raise ValidationError("rows are dependent")


def complex_conjugation(field: NumberField) -> FieldElement:
    """Image of the generator under complex conjugation."""
    field.conj_matrix
    return field.conj(field.gen)


def totally_real_subfield(field: NumberField) -> SubfieldModel:
    K = field
    n = K.degree
    if n % 2:
        raise NotCM("odd degree field is not CM")
    R = K.conj_matrix
    fixed = linalg.integer_kernel([[R[i][j] - (i == j) for j in range(n)] for i in range(n)])
    fixed = linalg.hnf(fixed)
    if len(fixed) != n // 2:
        raise NotCM("fixed field of conjugation has the wrong degree")
    a = K.gen
    ab = K.conj(a)
    cands = [a + ab, a * a, a * ab]
    cands += [FieldElement.from_zk(K, r) for r in fixed]
    cands += [FieldElement.from_zk(K, [x + y for x, y in zip(r, s)]) for r, s in itertools.combinations(fixed, 2)]
    gen = None
    for c in cands:
        if K.conj(c) != c:
            continue
        mp = c.minpoly()
        if len(mp) - 1 == n // 2:
            gen = c
            break
    if gen is None:
        raise NotCM("no generator of the real subfield found")
    mp = gen.minpoly()
    if any(x.denominator != 1 for x in mp):
        raise NotCM("real subfield generator is not integral")
    # express the fixed lattice in the power basis of gen
    m = n // 2
    pw = [K(1)]
    for _ in range(m - 1):
        pw.append(pw[-1] * gen)
    pw_zk = [list(p.zk) for p in pw]
    basis0 = [_solve_rows(pw_zk, [Fraction(x) for x in r]) for r in fixed]
    k0 = NumberField([int(x) for x in mp], basis0, label=(K.label + ".K0") if K.label else None)
    if k0.n_real != m:
        raise NotCM("real subfield is not totally real")
    return SubfieldModel(K, k0, gen, fixed)


def different_ideal(field: NumberField):
    from .ideals import Ideal

    return Ideal.codifferent(field).inverse()


def load_field_record(record: dict, require_cm=True) -> NumberField:
    """Validate a field record and build the model."""
    coeffs = [int(c) for c in record["coeffs"]]
    if len(coeffs) != 7 or coeffs[-1] != 1:
        raise ValidationError("expected a monic sextic")
    basis = [[Fraction(x) for x in row] for row in record["integral_basis"]]
    disc = int(record["disc"])
    K = NumberField(coeffs, basis, disc=None, label=record.get("label"))
    if K.n_real != 0:
        raise NotTotallyImaginary("defining polynomial has a real root")
    if K.disc != disc:
        raise DiscriminantMismatch(f"declared discriminant {disc}, basis gives {K.disc}")
    if require_cm:
        K.conj_matrix
        K.real_subfield
    return K

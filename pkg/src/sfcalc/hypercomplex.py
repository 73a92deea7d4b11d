"""Clifford algebra R_n (n <= 5) and quaternion arithmetic.

Multivectors store their 2**n real coefficients on basis blades e_A in
graded-lexicographic order (e_0 = 1 first, then e1..en, then e12, e13, ...).
A paravector is a multivector with no component of grade >= 2.

Products go through precomputed blade tables and the kernel backend in
:mod:`sfcalc._kernels`; ``left_regular_matrix(a)`` is the matrix of
``v -> a v`` in blade coordinates, ``right_regular_matrix(a)`` that of
``v -> v a``.
"""
from __future__ import annotations

import itertools
import math
from functools import lru_cache
from numbers import Real

import numpy as np

from . import _kernels
from .errors import DimensionError, InvalidUnitError, SingularScalarError

MAX_N = 5
TOL = 1e-12


@lru_cache(maxsize=None)
def blades(n):
    """Blade index tuples of R_n in graded-lexicographic order."""
    if not 0 <= n <= MAX_N:
        raise DimensionError(f"algebra parameter n must be in [0, {MAX_N}], got {n}")
    out = []
    for grade in range(n + 1):
        out.extend(itertools.combinations(range(1, n + 1), grade))
    return tuple(out)


def _mask(blade):
    m = 0
    for i in blade:
        m |= 1 << (i - 1)
    return m


def _blade_sign(a, b):
    """Sign of the product of basis blades with bitmasks a and b."""
    swaps = 0
    x = a >> 1
    while x:
        swaps += bin(x & b).count("1")
        x >>= 1
    # e_i e_i = -1 for every shared generator
    swaps += bin(a & b).count("1")
    return -1.0 if swaps & 1 else 1.0


@lru_cache(maxsize=None)
def product_tables(n):
    """``(idx, sign)`` with ``e_i e_j = sign[i, j] * e_{idx[i, j]}``."""
    bl = blades(n)
    masks = [_mask(b) for b in bl]
    where = {m: k for k, m in enumerate(masks)}
    m = len(bl)
    idx = np.empty((m, m), dtype=np.intp)
    sign = np.empty((m, m))
    for i, a in enumerate(masks):
        for j, b in enumerate(masks):
            idx[i, j] = where[a ^ b]
            sign[i, j] = _blade_sign(a, b)
    idx.setflags(write=False)
    sign.setflags(write=False)
    return idx, sign


@lru_cache(maxsize=None)
def _grades(n):
    g = np.array([len(b) for b in blades(n)])
    g.setflags(write=False)
    return g


@lru_cache(maxsize=None)
def _conj_signs(n):
    # Clifford conjugation: grade k picks up (-1)^(k(k+1)/2)
    g = _grades(n)
    s = np.where((g * (g + 1) // 2) % 2 == 1, -1.0, 1.0)
    s.setflags(write=False)
    return s


def _n_from_dim(m):
    n = int(round(math.log2(m))) if m > 0 else -1
    if n < 0 or 2**n != m or n > MAX_N:
        raise DimensionError(f"coefficient count {m} is not 2**n with n <= {MAX_N}")
    return n


class Multivector:
    """Element of the real Clifford algebra R_n.

    Instances are immutable; arithmetic returns new objects.
    """

    __slots__ = ("_c", "n")

    def __init__(self, coeffs, n=None):
        c = np.array(coeffs, dtype=float).reshape(-1)
        if n is None:
            n = _n_from_dim(c.size)
        elif c.size != 2**n or n > MAX_N:
            raise DimensionError(f"R_{n} needs {2**n} coefficients, got {c.size}")
        c.setflags(write=False)
        self._c = c
        self.n = n

    # -- constructors -------------------------------------------------
    @classmethod
    def scalar(cls, x, n):
        c = np.zeros(2**n)
        c[0] = x
        return cls(c, n)

    @classmethod
    def blade(cls, indices, n, coeff=1.0):
        key = tuple(sorted(indices))
        c = np.zeros(2**n)
        c[blades(n).index(key)] = coeff
        return cls(c, n)

    @classmethod
    def paravector(cls, parts):
        parts = np.asarray(parts, dtype=float).reshape(-1)
        n = parts.size - 1
        c = np.zeros(2**n)
        c[: n + 1] = parts
        return cls(c, n)

    def like(self, x):
        """Real number ``x`` as an element of the same algebra."""
        return Multivector.scalar(x, self.n)

    def from_coeffs(self, coeffs):
        return Multivector(coeffs, self.n)

    # -- views --------------------------------------------------------
    @property
    def coeffs(self):
        return self._c

    @property
    def dim(self):
        return self._c.size

    @property
    def re(self):
        return float(self._c[0])

    def vector_part(self):
        """Coefficients x1..xn of the grade-1 part."""
        return self._c[1 : self.n + 1].copy()

    def imag_norm(self):
        return float(np.linalg.norm(self._c[1 : self.n + 1]))

    def imag_unit(self):
        """``I_x`` for a paravector with nonzero imaginary part, else None."""
        v = self.imag_norm()
        if v == 0.0:
            return None
        c = np.zeros_like(self._c)
        c[1 : self.n + 1] = self._c[1 : self.n + 1] / v
        return Multivector(c, self.n)

    def grade(self, k):
        return Multivector(np.where(_grades(self.n) == k, self._c, 0.0), self.n)

    def is_paravector(self, tol=TOL):
        high = self._c[self.n + 1 :]
        return high.size == 0 or float(np.max(np.abs(high))) <= tol * max(1.0, self.norm())

    def is_real(self, tol=TOL):
        return float(np.max(np.abs(self._c[1:]), initial=0.0)) <= tol * max(1.0, abs(self.re))

    def sphere(self):
        """``(Re x, |x_|)``: the (n-1)-sphere ``[x]`` the paravector lies on."""
        return self.re, self.imag_norm()

    # -- algebra ------------------------------------------------------
    def norm2(self):
        return float(self._c @ self._c)

    def norm(self):
        return math.sqrt(self.norm2())

    __abs__ = norm

    def conj(self):
        """Clifford conjugation; on paravectors ``x0 - x_``."""
        return Multivector(self._c * _conj_signs(self.n), self.n)

    def inverse(self):
        """Inverse ``conj(x)/|x|^2``; defined for paravectors only."""
        if not self.is_paravector(1e-10):
            raise SingularScalarError("inverse is only provided for paravectors")
        r = self.norm2()
        if r == 0.0:
            raise SingularScalarError("cannot invert the zero paravector")
        return Multivector(self.conj()._c / r, self.n)

    def left_matrix(self):
        idx, sign = product_tables(self.n)
        return _kernels.left_matrix(self._c, idx, sign)

    def right_matrix(self):
        idx, sign = product_tables(self.n)
        return _kernels.right_matrix(self._c, idx, sign)

    def _coerce(self, other):
        if isinstance(other, Multivector):
            if other.n != self.n:
                raise DimensionError(f"R_{self.n} and R_{other.n} operands")
            return other
        if isinstance(other, Real):
            return Multivector.scalar(float(other), self.n)
        return NotImplemented

    def __add__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return Multivector(self._c + o._c, self.n)

    __radd__ = __add__

    def __sub__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return Multivector(self._c - o._c, self.n)

    def __rsub__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return Multivector(o._c - self._c, self.n)

    def __neg__(self):
        return Multivector(-self._c, self.n)

    def __mul__(self, other):
        if isinstance(other, Real):
            return Multivector(self._c * float(other), self.n)
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        idx, sign = product_tables(self.n)
        return Multivector(_kernels.geometric_product(self._c, o._c, idx, sign), self.n)

    def __rmul__(self, other):
        if isinstance(other, Real):
            return Multivector(self._c * float(other), self.n)
        return NotImplemented

    def __truediv__(self, other):
        if isinstance(other, Real):
            return Multivector(self._c / float(other), self.n)
        return NotImplemented

    def __pow__(self, m):
        if not isinstance(m, (int, np.integer)):
            return NotImplemented
        if m < 0:
            return self.inverse() ** (-m)
        out, base = self.like(1.0), self
        while m:
            if m & 1:
                out = out * base
            base = base * base
            m >>= 1
        return out

    def isclose(self, other, tol=TOL):
        o = self._coerce(other)
        scale = max(1.0, self.norm(), o.norm())
        return float(np.max(np.abs(self._c - o._c))) <= tol * scale

    def __eq__(self, other):
        o = self._coerce(other) if isinstance(other, (Multivector, Real)) else NotImplemented
        if o is NotImplemented:
            return NotImplemented
        return bool(np.array_equal(self._c, o._c))

    __hash__ = None

    def to_json(self):
        return [float(x) for x in self._c]

    @classmethod
    def from_json(cls, data):
        return cls(data)

    def __repr__(self):
        terms = []
        for b, x in zip(blades(self.n), self._c):
            if x != 0.0:
                name = "e" + "".join(map(str, b)) if b else ""
                terms.append(f"{x:+.6g}{name}")
        return "Multivector(" + (" ".join(terms) or "0") + f"; n={self.n})"


def paravector(*parts):
    """Paravector ``x0 + x1 e1 + ... + xn en`` (accepts one sequence too)."""
    if len(parts) == 1 and not isinstance(parts[0], Real):
        parts = parts[0]
    return Multivector.paravector(parts)


def basis_vector(i, n):
    return Multivector.blade((i,), n)


def clifford_mul(a, b):
    if not isinstance(a, Multivector) or not isinstance(b, Multivector):
        raise TypeError("clifford_mul expects two Multivectors")
    if a.n != b.n:
        raise DimensionError(f"cannot multiply R_{a.n} by R_{b.n}")
    return a * b


def conjugate(x):
    return x.conj()


def paravector_inverse(x):
    return x.inverse()


def sphere_of(x):
    return x.sphere()


def imaginary_unit(direction, normalize=False):
    """Unit 1-vector ``I = x1 e1 + ... + xn en`` in R_n, n = len(direction)."""
    d = np.asarray(direction, dtype=float).reshape(-1)
    r = float(np.linalg.norm(d))
    if normalize:
        if r == 0.0:
            raise InvalidUnitError("zero direction")
        d = d / r
    elif abs(r - 1.0) > TOL:
        raise InvalidUnitError(f"imaginary unit must have norm 1, got {r!r}")
    return Multivector.paravector(np.concatenate([[0.0], d]))


def check_unit(I):
    """Raise InvalidUnitError unless I is a purely imaginary unit (I^2 = -1)."""
    if isinstance(I, Quaternion):
        ok = I.w == 0.0 and abs(I.imag_norm() - 1.0) <= TOL
    else:
        ok = I.is_paravector(0.0) and I.re == 0.0 and abs(I.imag_norm() - 1.0) <= TOL
    if not ok:
        raise InvalidUnitError(f"{I!r} is not an imaginary unit")
    return I


def slice_point(u, v, I):
    """The point ``u + I v`` of the slice ``C_I``."""
    if v < 0:
        raise ValueError("v must be non-negative")
    check_unit(I)
    return I * float(v) + float(u)


def left_regular_matrix(a):
    return a.left_matrix()


def right_regular_matrix(a):
    return a.right_matrix()


def slice_exp(x):
    """``e^x`` for a paravector or quaternion, ``e^u (cos v + I_x sin v)``."""
    u, v = x.sphere()
    I = x.imag_unit()
    out = x.like(math.exp(u) * math.cos(v))
    if I is not None:
        out = out + I * (math.exp(u) * math.sin(v))
    return out


# -- quaternions ------------------------------------------------------

_QIDX = np.array([[0, 1, 2, 3], [1, 0, 3, 2], [2, 3, 0, 1], [3, 2, 1, 0]], dtype=np.intp)
_QSIGN = np.array(
    [[1, 1, 1, 1], [1, -1, 1, -1], [1, -1, -1, 1], [1, 1, -1, -1]], dtype=float
)
_QIDX.setflags(write=False)
_QSIGN.setflags(write=False)


class Quaternion:
    """Real quaternion ``w + x i + y j + z k`` with Hamilton's product."""

    __slots__ = ("_c",)
    n = None

    def __init__(self, w=0.0, x=0.0, y=0.0, z=0.0):
        c = np.array([w, x, y, z], dtype=float)
        c.setflags(write=False)
        self._c = c

    @classmethod
    def from_array(cls, c):
        c = np.asarray(c, dtype=float).reshape(-1)
        if c.size != 4:
            raise DimensionError("a quaternion has 4 coefficients")
        return cls(*c)

    def like(self, x):
        return Quaternion(float(x))

    def from_coeffs(self, coeffs):
        return Quaternion.from_array(coeffs)

    w = property(lambda self: float(self._c[0]))
    x = property(lambda self: float(self._c[1]))
    y = property(lambda self: float(self._c[2]))
    z = property(lambda self: float(self._c[3]))

    @property
    def coeffs(self):
        return self._c

    @property
    def dim(self):
        return 4

    @property
    def re(self):
        return float(self._c[0])

    def vector_part(self):
        return self._c[1:].copy()

    def imag_norm(self):
        return float(np.linalg.norm(self._c[1:]))

    def imag_unit(self):
        v = self.imag_norm()
        if v == 0.0:
            return None
        return Quaternion(0.0, *(self._c[1:] / v))

    def is_paravector(self, tol=TOL):
        return True

    def is_real(self, tol=TOL):
        return float(np.max(np.abs(self._c[1:]))) <= tol * max(1.0, abs(self.re))

    def sphere(self):
        return self.re, self.imag_norm()

    def norm2(self):
        return float(self._c @ self._c)

    def norm(self):
        return math.sqrt(self.norm2())

    __abs__ = norm

    def conj(self):
        return Quaternion(self._c[0], *(-self._c[1:]))

    def inverse(self):
        r = self.norm2()
        if r == 0.0:
            raise SingularScalarError("cannot invert the zero quaternion")
        return Quaternion.from_array(self.conj()._c / r)

    def left_matrix(self):
        w, x, y, z = self._c
        return np.array([[w, -x, -y, -z], [x, w, -z, y], [y, z, w, -x], [z, -y, x, w]])

    def right_matrix(self):
        w, x, y, z = self._c
        return np.array([[w, -x, -y, -z], [x, w, z, -y], [y, -z, w, x], [z, y, -x, w]])

    def _coerce(self, other):
        if isinstance(other, Quaternion):
            return other
        if isinstance(other, Real):
            return Quaternion(float(other))
        return NotImplemented

    def __add__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return Quaternion.from_array(self._c + o._c)

    __radd__ = __add__

    def __sub__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return Quaternion.from_array(self._c - o._c)

    def __rsub__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return Quaternion.from_array(o._c - self._c)

    def __neg__(self):
        return Quaternion.from_array(-self._c)

    def __mul__(self, other):
        if isinstance(other, Real):
            return Quaternion.from_array(self._c * float(other))
        if not isinstance(other, Quaternion):
            return NotImplemented
        a1, b1, c1, d1 = self._c
        a2, b2, c2, d2 = other._c
        return Quaternion(
            a1 * a2 - b1 * b2 - c1 * c2 - d1 * d2,
            a1 * b2 + b1 * a2 + c1 * d2 - d1 * c2,
            a1 * c2 - b1 * d2 + c1 * a2 + d1 * b2,
            a1 * d2 + b1 * c2 - c1 * b2 + d1 * a2,
        )

    def __rmul__(self, other):
        if isinstance(other, Real):
            return Quaternion.from_array(self._c * float(other))
        return NotImplemented

    def __truediv__(self, other):
        if isinstance(other, Real):
            return Quaternion.from_array(self._c / float(other))
        return NotImplemented

    def __pow__(self, m):
        if not isinstance(m, (int, np.integer)):
            return NotImplemented
        if m < 0:
            return self.inverse() ** (-m)
        out, base = Quaternion(1.0), self
        while m:
            if m & 1:
                out = out * base
            base = base * base
            m >>= 1
        return out

    def isclose(self, other, tol=TOL):
        o = self._coerce(other)
        scale = max(1.0, self.norm(), o.norm())
        return float(np.max(np.abs(self._c - o._c))) <= tol * scale

    def __eq__(self, other):
        o = self._coerce(other) if isinstance(other, (Quaternion, Real)) else NotImplemented
        if o is NotImplemented:
            return NotImplemented
        return bool(np.array_equal(self._c, o._c))

    __hash__ = None

    def to_json(self):
        return [float(x) for x in self._c]

    def __repr__(self):
        w, x, y, z = self._c
        return f"Quaternion({w:.6g}, {x:.6g}, {y:.6g}, {z:.6g})"


def quaternion_unit(direction, normalize=False):
    d = np.asarray(direction, dtype=float).reshape(3)
    r = float(np.linalg.norm(d))
    if normalize:
        if r == 0.0:
            raise InvalidUnitError("zero direction")
        d = d / r
    elif abs(r - 1.0) > TOL:
        raise InvalidUnitError(f"imaginary unit must have norm 1, got {r!r}")
    return Quaternion(0.0, *d)


def quaternion_tables():
    """Blade-style ``(idx, sign)`` tables for the basis (1, i, j, k)."""
    return _QIDX, _QSIGN

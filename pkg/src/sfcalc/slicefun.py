"""Slice hyperholomorphic functions: power series and intrinsic closed forms.

A function is either a power series with Clifford (or quaternion)
coefficients, written with powers of ``x`` on the left (``sum x^m a_m``,
left kind) or on the right (``sum a_m x^m``, right kind), or an intrinsic
function given by a complex stem ``phi`` with real Taylor coefficients,
evaluated slice-wise as ``f(u + I v) = Re phi(u+iv) + I Im phi(u+iv)``.
"""
from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

import numpy as np

from .errors import DomainError, InvalidUnitError, PreconditionError
from .hypercomplex import Multivector, Quaternion, check_unit

POLE_GUARD = 1e-6
FD_STEP = 1e-5
KINDS = ("left", "right", "intrinsic")

_STEMS = {"exp": cmath.exp, "sin": cmath.sin, "cos": cmath.cos}
_NP_STEMS = {"exp": np.exp, "sin": np.sin, "cos": np.cos}


def _is_real_coeff(a):
    if isinstance(a, (int, float, np.floating, np.integer)):
        return True
    return a.is_real(0.0)


def _real(a):
    return float(a) if isinstance(a, (int, float, np.floating, np.integer)) else a.re


@dataclass(frozen=True)
class SliceFunction:
    """Immutable description of a slice function.

    ``name`` is one of ``series``, ``exp``, ``sin``, ``cos``, ``polynomial``,
    ``rational`` or ``product``. ``coeffs`` holds series/polynomial
    coefficients (ascending), ``denominator`` the real denominator of a
    rational function and ``factors`` the two operands of a product.
    """

    kind: str
    name: str
    coeffs: tuple = ()
    denominator: tuple = ()
    factors: tuple = ()
    radius: float = math.inf

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"kind must be one of {KINDS}, got {self.kind!r}")
        if self.kind == "intrinsic" and self.name in ("series", "polynomial", "rational"):
            if not all(_is_real_coeff(a) for a in self.coeffs + self.denominator):
                raise PreconditionError("intrinsic functions need real coefficients")
        if self.name == "rational" and not any(float(b) != 0.0 for b in self.denominator):
            raise ValueError("zero denominator")

    # -- evaluation ---------------------------------------------------

    @property
    def poles(self):
        """Complex poles of the stem (rational functions only)."""
        if self.name == "rational":
            den = np.trim_zeros(np.array([float(b) for b in self.denominator]), "b")
            return tuple(complex(z) for z in np.roots(den[::-1])) if len(den) > 1 else ()
        if self.name == "product":
            return tuple(z for g in self.factors for z in g.poles)
        return ()

    def stem(self, z):
        """Complex stem ``phi(z)``; only defined for intrinsic functions."""
        if self.kind != "intrinsic":
            raise PreconditionError("only intrinsic functions have a complex stem")
        z = complex(z)
        if self.name in _STEMS:
            return _STEMS[self.name](z)
        if self.name in ("series", "polynomial"):
            return _horner([_real(a) for a in self.coeffs], z)
        if self.name == "rational":
            return _horner([float(a) for a in self.coeffs], z) / _horner(
                [float(b) for b in self.denominator], z
            )
        if self.name == "product":
            f, g = self.factors
            return f.stem(z) * g.stem(z)
        raise ValueError(f"unknown function {self.name!r}")

    def stem_array(self, z):
        """Vectorised stem over a complex array (intrinsic functions only)."""
        if self.kind != "intrinsic":
            raise PreconditionError("only intrinsic functions have a complex stem")
        z = np.asarray(z, dtype=complex)
        if self.name in _NP_STEMS:
            return _NP_STEMS[self.name](z)
        if self.name in ("series", "polynomial"):
            return np.polynomial.polynomial.polyval(z, [_real(a) for a in self.coeffs])
        if self.name == "rational":
            num = np.polynomial.polynomial.polyval(z, [float(a) for a in self.coeffs])
            return num / np.polynomial.polynomial.polyval(z, [float(b) for b in self.denominator])
        if self.name == "product":
            f, g = self.factors
            return f.stem_array(z) * g.stem_array(z)
        raise ValueError(f"unknown function {self.name!r}")

    def _guard(self, x):
        u, v = x.sphere()
        z = complex(u, v)
        for p in self.poles:
            if min(abs(z - p), abs(z.conjugate() - p)) < POLE_GUARD:
                raise DomainError(f"{x!r} is within {POLE_GUARD} of the pole {p}")
        if x.norm() >= self.radius:
            raise DomainError(f"|x| = {x.norm():.6g} outside the radius {self.radius}")

    def __call__(self, x):
        return evaluate(self, x)

    def with_kind(self, kind):
        return SliceFunction(kind, self.name, self.coeffs, self.denominator, self.factors, self.radius)

    # -- serialization ------------------------------------------------

    def to_json(self):
        if self.name == "series":
            return {
                "kind": self.kind,
                "series": [_coeff_json(a) for a in self.coeffs],
                **({"radius": self.radius} if math.isfinite(self.radius) else {}),
            }
        out = {"kind": self.kind, "named": self.name}
        if self.name == "polynomial":
            out["coeffs"] = [_real(a) for a in self.coeffs]
        elif self.name == "rational":
            out["numerator"] = [float(a) for a in self.coeffs]
            out["denominator"] = [float(b) for b in self.denominator]
        elif self.name == "product":
            out["factors"] = [g.to_json() for g in self.factors]
        return out

    @classmethod
    def from_json(cls, data):
        if not isinstance(data, dict):
            raise ValueError("function descriptor must be a JSON object")
        if "series" in data:
            coeffs = tuple(_coeff_from_json(c, data.get("algebra")) for c in data["series"])
            return cls(data.get("kind", "left"), "series", coeffs, radius=float(data.get("radius", math.inf)))
        name = data.get("named")
        kind = data.get("kind", "intrinsic")
        if name in _STEMS:
            return cls(kind, name)
        if name == "polynomial":
            return cls(kind, "polynomial", tuple(float(a) for a in data["coeffs"]))
        if name == "rational":
            return cls(
                kind,
                "rational",
                tuple(float(a) for a in data["numerator"]),
                tuple(float(b) for b in data["denominator"]),
            )
        if name == "product":
            f, g = (cls.from_json(x) for x in data["factors"])
            return pointwise_product(f, g)
        raise ValueError(f"unknown function descriptor {data!r}")


def _coeff_json(a):
    if isinstance(a, (int, float, np.floating, np.integer)):
        return [float(a)]
    return [float(c) for c in a.coeffs]


def _coeff_from_json(c, algebra=None):
    c = [float(x) for x in c]
    if len(c) == 1:
        return c[0]
    if algebra == "quaternion":
        return Quaternion(*c)
    return Multivector(c)


def _horner(coeffs, x):
    out = 0.0
    for a in reversed(coeffs):
        out = out * x + a
    return out


# -- constructors -------------------------------------------------------


def named(name):
    return SliceFunction("intrinsic", name)


def constant(c=1.0):
    return polynomial([c])


def identity():
    return polynomial([0.0, 1.0])


def polynomial(coeffs):
    """Intrinsic polynomial with real coefficients ``c_0 + c_1 x + ...``."""
    return SliceFunction("intrinsic", "polynomial", tuple(float(c) for c in coeffs))


def rational(numerator, denominator):
    """Intrinsic ``p(x) q(x)^{-1}`` with real ascending coefficient lists."""
    return SliceFunction(
        "intrinsic", "rational", tuple(float(c) for c in numerator), tuple(float(c) for c in denominator)
    )


def inverse_shift(a):
    """``(x - a)^{-1}`` for real ``a``."""
    return rational([1.0], [-float(a), 1.0])


def left_series(coeffs, radius=math.inf):
    """``sum_m x^m a_m``."""
    return SliceFunction("left", "series", tuple(coeffs), radius=radius)


def right_series(coeffs, radius=math.inf):
    """``sum_m a_m x^m``."""
    return SliceFunction("right", "series", tuple(coeffs), radius=radius)


# -- evaluation ---------------------------------------------------------


def _series_eval(coeffs, x, side):
    out = x.like(0.0)
    power = x.like(1.0)
    for a in coeffs:
        out = out + (power * a if side == "left" else a * power)
        power = power * x
    return out


def evaluate(f, x):
    """Value ``f(x)`` at a paravector (or quaternion) ``x``."""
    if callable(f) and not isinstance(f, SliceFunction):
        return f(x)
    f._guard(x)
    if f.kind == "intrinsic":
        u, v = x.sphere()
        w = f.stem(complex(u, v))
        I = x.imag_unit()
        if I is None:
            return x.like(w.real)
        return x.like(w.real) + I * w.imag
    if f.name == "series":
        return _series_eval(f.coeffs, x, f.kind)
    if f.name == "product":
        a, b = f.factors
        return evaluate(a, x) * evaluate(b, x)
    raise ValueError(f"cannot evaluate {f!r}")


eval_at = evaluate


def stem_parts(f, u, v, J):
    """``(alpha, beta)`` with ``f(u + I v) = alpha + I beta`` (left) or ``alpha + beta I`` (right).

    Computed from the two values of ``f`` on the slice ``C_J`` only.
    """
    check_unit(J)
    plus = evaluate(f, J * v + u)
    minus = evaluate(f, J * (-v) + u)
    alpha = (plus + minus) * 0.5
    diff = (minus - plus) * 0.5
    beta = diff * J if _side(f) == "right" else J * diff
    return alpha, beta


def _side(f):
    return getattr(f, "kind", "left") if getattr(f, "kind", "left") == "right" else "left"


def representation_formula_eval(f, x, J):
    """Reconstruct ``f(x)`` from ``f(u + Jv)`` and ``f(u - Jv)``."""
    if x.like(0.0).dim != J.dim:
        raise InvalidUnitError("J does not live in the algebra of x")
    u, v = x.sphere()
    alpha, beta = stem_parts(f, u, v, J)
    I = x.imag_unit()
    if I is None:
        return alpha
    return alpha + (beta * I if _side(f) == "right" else I * beta)


def stem_residual(f, I, samples, h=FD_STEP):
    """Largest ``|1/2 (d_u f_I + I d_v f_I)|`` over the sample points.

    The right kind uses ``d_v f_I I``. Central differences with step ``h``.
    """
    check_unit(I)
    right = _side(f) == "right"

    def fI(u, v):
        return evaluate(f, I * v + u)

    worst = 0.0
    for u, v in samples:
        du = (fI(u + h, v) - fI(u - h, v)) / (2 * h)
        dv = (fI(u, v + h) - fI(u, v - h)) / (2 * h)
        r = (du + (dv * I if right else I * dv)) * 0.5
        worst = max(worst, r.norm())
    return worst


def pointwise_product(f, g):
    """``fg`` for intrinsic ``f`` and left slice ``g``; the result is left slice."""
    if getattr(f, "kind", None) != "intrinsic":
        raise PreconditionError("the left factor of a pointwise product must be intrinsic")
    if g.kind == "right":
        raise PreconditionError("the right factor must be left slice hyperholomorphic")
    if f.name == "polynomial" and g.name == "series" and not f.poles:
        # real coefficients commute with powers of x: sum_{k,m} x^{k+m} c_k a_m
        out = [0.0] * (len(f.coeffs) + len(g.coeffs) - 1)
        for k, c in enumerate(f.coeffs):
            for m, a in enumerate(g.coeffs):
                out[k + m] = out[k + m] + a * c
        return SliceFunction("left", "series", tuple(out), radius=g.radius)
    if f.name == "polynomial" and g.name == "polynomial":
        return polynomial(np.polynomial.polynomial.polymul(f.coeffs, g.coeffs))
    kind = "intrinsic" if g.kind == "intrinsic" else "left"
    return SliceFunction(kind, "product", factors=(f, g))


# -- Cauchy kernels -----------------------------------------------------


def cauchy_kernel(s, x, side="left", form="I"):
    """Scalar Cauchy kernels ``S_L^{-1}(s, x)`` and ``S_R^{-1}(s, x)``.

    Form I (powers of x on the side matching the function):
    left ``-(x^2 - 2 s0 x + |s|^2)^{-1}(x - s̄)``,
    right ``-(x - s̄)(x^2 - 2 s0 x + |s|^2)^{-1}``.
    Form II (only s squared): left ``(s - x̄)(s^2 - 2 x0 s + |x|^2)^{-1}``,
    right ``(s^2 - 2 x0 s + |x|^2)^{-1}(s - x̄)``.
    """
    if form == "I":
        q = x * x - x * (2.0 * s.re) + s.norm2()
        _nonzero(q, s, x)
        a = x - s.conj()
        return -(q.inverse() * a) if side == "left" else -(a * q.inverse())
    if form == "II":
        q = s * s - s * (2.0 * x.re) + x.norm2()
        _nonzero(q, s, x)
        a = s - x.conj()
        return a * q.inverse() if side == "left" else q.inverse() * a
    raise ValueError(f"form must be 'I' or 'II', got {form!r}")


def _nonzero(q, s, x):
    if q.norm() <= 1e-14 * max(1.0, s.norm2(), x.norm2()):
        raise DomainError(f"x = {x!r} lies on the sphere of s = {s!r}")


def kernel_forms_gap(s, x):
    """Largest difference between forms I and II over both sides."""
    return max(
        (cauchy_kernel(s, x, side, "I") - cauchy_kernel(s, x, side, "II")).norm()
        for side in ("left", "right")
    )


def parse_function(text):
    """Short CLI descriptors: ``exp``, ``sin``, ``cos``, ``one``, ``x``, ``x^k``,
    ``poly:c0,c1,...``, ``inv:a`` for ``(x-a)^{-1}``, or an inline JSON object."""
    import json

    t = text.strip()
    if t.startswith("{"):
        return SliceFunction.from_json(json.loads(t))
    if t in _STEMS:
        return named(t)
    if t in ("one", "1"):
        return constant(1.0)
    if t == "x":
        return identity()
    if t.startswith("x^"):
        k = int(t[2:])
        if k < 0:
            raise ValueError("negative powers are not polynomials")
        return polynomial([0.0] * k + [1.0])
    if t.startswith("poly:"):
        return polynomial([float(c) for c in t[5:].split(",")])
    if t.startswith("inv:"):
        return inverse_shift(float(t[4:]))
    raise ValueError(f"unknown function descriptor {text!r}")

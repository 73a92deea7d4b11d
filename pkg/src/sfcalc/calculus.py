"""S-functional calculus by trapezoidal quadrature on circles in a slice.

Every integral has the shape ``(1/2pi) \\oint X(s) ds_I g(s)``; a contour
node contributes ``X(s_k)`` composed with the scalar ``w_k g(s_k)`` (or
``g(s_k) w_k`` for the right calculus), ``w_k`` being the node weight. The
error estimate compares the rule with its even-node subrule and adds a
rounding floor proportional to the conditioning of each resolvent.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.linalg import expm

from .errors import DivergenceError, DomainError, GeometryError, PreconditionError, UnsafeContourError
from .hypercomplex import check_unit, slice_exp
from .operator import _check, _Resolvents, lift, lift_basis, opnorm
from .slicefun import SliceFunction, cauchy_kernel, evaluate, identity, pointwise_product
from .spectrum import build_contour, enclosing_contour, s_spectrum

EPS = np.finfo(float).eps
UNSAFE_FRACTION = 0.1
GL_ORDER = 16


@dataclass
class CalculusResult:
    value: np.ndarray
    contour: object
    nodes: int
    err_estimate: float
    side: str = "left"
    margins: tuple = field(default=(), repr=False)

    def to_json(self):
        return {
            "value": self.value.tolist(),
            "err_estimate": self.err_estimate,
            "nodes": self.nodes,
            "side": self.side,
            "contour": self.contour.to_json() if self.contour is not None else None,
        }


def _side_ok(f, side):
    kind = getattr(f, "kind", side)
    return kind == "intrinsic" or kind == side


def contour_margins(spectrum, contour):
    """Distance from each spectral slice point to the contour curve."""
    return tuple(contour.min_distance(z) for sp in spectrum for z in sp.points)


def _check_geometry(spectrum, contour, enclose_all):
    margins = contour_margins(spectrum, contour)
    rmin = min(c.radius for c in contour.circles)
    if margins and min(margins) < UNSAFE_FRACTION * rmin:
        raise UnsafeContourError(
            f"spectrum within {min(margins):.3g} of the contour (needs {UNSAFE_FRACTION * rmin:.3g})",
            margins=margins,
        )
    if enclose_all:
        missed = [sp for sp in spectrum for z in sp.points if contour.winding(z) == 0]
        if missed:
            raise GeometryError(f"contour misses spectral spheres {missed}")
    return margins


def _check_regular(f, contour):
    for p in getattr(f, "poles", ()):
        if contour.winding(p) or contour.min_distance(p) < 1e-6:
            raise DomainError(f"pole {p} of f lies inside or on the contour")


CHUNK = 256


def _node_scalars(f, contour, side):
    """Coefficients of ``w_k f(s_k)`` (left) or ``f(s_k) w_k`` (right), one row per node."""
    I = contour.I
    if isinstance(f, SliceFunction) and f.kind == "intrinsic":
        # on C_I everything commutes: w_k f(s_k) is the complex product
        # of the weight and the stem, read back with i -> I
        _check_poles_off(f, contour)
        z = contour.complex_nodes()
        c = contour.complex_weights() * f.stem_array(z)
        one = np.zeros(I.dim)
        one[0] = 1.0
        return np.outer(c.real, one) + np.outer(c.imag, I.coeffs)
    rows = []
    for s, w in zip(contour.nodes, contour.weights):
        fs = evaluate(f, s)
        rows.append((w * fs if side == "left" else fs * w).coeffs)
    return np.array(rows)


def _check_poles_off(f, contour):
    z = contour.complex_nodes()
    for p in f.poles:
        if np.min(np.abs(z - p)) < 1e-6:
            raise DomainError(f"pole {p} of f lies on the contour")


def _integrate_many(T, contour, funcs, side, res=None):
    """Trapezoidal sums and halved-rule estimates for several functions.

    Resolvents are formed once per node and shared by all functions.
    """
    for f in funcs:
        if not _side_ok(f, side):
            raise PreconditionError(f"a {f.kind} function cannot be used with the {side} calculus")
    _check(T, contour.I)
    res = res or _Resolvents(T)
    basis = lift_basis(T)
    N = contour.nodes_per_circle
    K = len(contour)
    node_coeffs = np.array([s.coeffs for s in contour.nodes])
    scal = [_node_scalars(f, contour, side) for f in funcs]
    even_mask = (np.arange(K) % N) % 2 == 0
    m = T.size
    totals = [np.zeros((m, m)) for _ in funcs]
    evens = [np.zeros((m, m)) for _ in funcs]
    floors = [0.0] * len(funcs)
    # fixed chunking and ascending node order keep the sums reproducible
    for lo in range(0, K, CHUNK):
        hi = min(K, lo + CHUNK)
        S, cond = res.batch(node_coeffs[lo:hi], side)
        for i in range(len(funcs)):
            L = np.einsum("kb,bij->kij", scal[i][lo:hi], basis)
            terms = S @ L if side == "left" else L @ S
            totals[i] += terms.sum(axis=0)
            evens[i] += terms[even_mask[lo:hi]].sum(axis=0)
            floors[i] += float(np.dot(cond, np.abs(terms).max(axis=(1, 2))))
    scale = math.sqrt(m)
    return [
        (tot, opnorm(tot - 2.0 * ev) + EPS * scale * fl)
        for tot, ev, fl in zip(totals, evens, floors)
    ]


def _integrate_pointwise(T, contour, f, side):
    """Reference route: one LU-based resolvent and one scalar product per node."""
    res = _Resolvents(T)
    d = T.d
    total = np.zeros((T.size, T.size))
    for s, w in zip(contour.nodes, contour.weights):
        S, _ = res.resolvent(s, side)
        fs = evaluate(f, s)
        total += S @ lift(w * fs, d) if side == "left" else lift(fs * w, d) @ S
    return total


def _integrate(T, contour, f, side, res=None):
    return _integrate_many(T, contour, [f], side, res)[0]


def func_calc(f, T, contour, side="left", spectrum=None, enclose_all=True):
    """``f(T)`` by the left or right S-functional calculus on ``contour``."""
    spectrum = spectrum if spectrum is not None else s_spectrum(T)
    margins = _check_geometry(spectrum, contour, enclose_all)
    _check_regular(f, contour)
    value, est = _integrate(T, contour, f, side)
    return CalculusResult(value, contour, len(contour), est, side, margins)


def default_contour(T, I=None, nodes=512, radius=None, spectrum=None):
    """A circle about 0 of radius ``max |sphere| + 1`` in the slice of ``I``."""
    spectrum = spectrum if spectrum is not None else s_spectrum(T)
    I = I if I is not None else T.imaginary_units()[0]
    return enclosing_contour(spectrum, I, nodes, radius=radius)


def left_right_agreement(f, T, contour):
    """``(||f_L(T) - f_R(T)||, combined error estimate)`` for intrinsic ``f``."""
    if getattr(f, "kind", None) != "intrinsic":
        raise PreconditionError("left/right agreement needs an intrinsic function")
    a = func_calc(f, T, contour, "left")
    b = func_calc(f, T, contour, "right")
    return opnorm(a.value - b.value), a.err_estimate + b.err_estimate


def riesz_projector(T, spectrum, subset, I=None, nodes=512, radius=0.25):
    """Spectral projector onto the selected spheres and ``T`` restricted to them.

    Returns ``(P, T_part)`` where ``P`` integrates ``f = 1`` and ``T_part``
    integrates ``f(s) = s`` over circles around the selected spheres only.
    """
    I = I if I is not None else T.imaginary_units()[0]
    contour = build_contour(spectrum, subset, I, nodes, radius)
    _check_geometry(spectrum, contour, enclose_all=False)
    res = _Resolvents(T)
    one = SliceFunction("intrinsic", "polynomial", (1.0,))
    (P, _), (Tp, _) = _integrate_many(T, contour, [one, identity()], "left", res)
    return P, Tp


def projector_residuals(T, P, Tp):
    R = T.matrix
    return {
        "idempotent": opnorm(P @ P - P),
        "commutes": opnorm(R @ P - P @ R),
        "restriction": opnorm(Tp - R @ P),
    }


def _slice_points(x):
    u, v = x.sphere()
    return (complex(u, v), complex(u, -v))


def _check_inside(x, contour, what):
    for z in _slice_points(x):
        if contour.min_distance(z) < 1e-8:
            raise GeometryError(f"{what} {x!r} lies on the contour")
        if contour.winding(z) == 0:
            raise GeometryError(f"{what} {x!r} is not enclosed by the contour")


def lemma_integral(B, p, contour, f=None):
    """``(1/2pi) \\oint f(s) ds_I (s̄ B - B p)(p^2 - 2 s0 p + |s|^2)^{-1}``.

    Scalars act on the operator space through ``lift``; ``B p`` means
    ``v -> B(p v)``. Equals ``B`` when ``f`` is absent and ``v -> B(f(p) v)``
    for intrinsic ``f`` regular inside the contour.
    """
    B = np.asarray(B, dtype=float)
    check_unit(contour.I)
    if not p.is_paravector(1e-12):
        raise PreconditionError("p must be a paravector")
    _check_inside(p, contour, "p")
    if f is not None:
        if getattr(f, "kind", "intrinsic") != "intrinsic":
            raise PreconditionError("the composition integral needs an intrinsic f")
        _check_regular(f, contour)
    d = B.shape[0] // p.dim
    BLp = B @ lift(p, d)
    p2 = p * p
    total = np.zeros_like(B)
    for s, w in zip(contour.nodes, contour.weights):
        q = p2 - p * (2.0 * s.re) + s.norm2()
        a = w if f is None else evaluate(f, s) * w
        total += lift(a, d) @ (lift(s.conj(), d) @ B - BLp) @ lift(q.inverse(), d)
    return total


def product_rule_residual(f, g, T, I=None, nodes=512, radius=None):
    """``||(fg)(T) - f(T) g(T)||`` with ``g(T)`` on a circle of radius r and
    ``f(T)``, ``(fg)(T)`` on the concentric circle of radius 2r."""
    if getattr(f, "kind", None) != "intrinsic":
        raise PreconditionError("the product rule needs an intrinsic left factor")
    spectrum = s_spectrum(T)
    I = I if I is not None else T.imaginary_units()[0]
    r = radius if radius is not None else spectrum.max_modulus() + 1.0
    inner = enclosing_contour(spectrum, I, nodes, radius=r)
    outer = enclosing_contour(spectrum, I, nodes, radius=2.0 * r)
    fg = pointwise_product(f, g)
    lhs = func_calc(fg, T, outer, "left", spectrum)
    fT = func_calc(f, T, outer, "left", spectrum)
    gT = func_calc(g, T, inner, "left", spectrum)
    return opnorm(lhs.value - fT.value @ gT.value)


def laplace_resolvent(T, s, side="left", t_max=None, panels=None, order=GL_ORDER):
    """``\\int_0^inf e^{tT} e^{-ts} dt`` (left) or ``\\int_0^inf e^{-ts} e^{tT} dt`` (right).

    Composite Gauss-Legendre on ``[0, t_max]``. The factor ``e^{-t s0}`` is
    folded into the matrix exponential, ``e^{t(T - s0)}``, so the powers
    of the panel step stay bounded.
    """
    _check(T, s)
    norm = T.norm_bound()
    gap = s.re - norm
    if gap <= 0:
        raise DivergenceError(f"Re(s) = {s.re:.6g} must exceed the norm bound {norm:.6g}")
    if t_max is None:
        t_max = 40.0 / gap
    omega = s.imag_norm() + opnorm(T.matrix) + s.re
    if panels is None:
        panels = max(1, math.ceil(t_max * omega / 4.0))
    h = t_max / panels
    xi, wi = np.polynomial.legendre.leggauss(order)
    xi = 0.5 * (xi + 1.0)
    wi = 0.5 * h * wi
    d = T.d
    A = T.matrix - s.re * np.eye(T.size)
    step = expm(h * A)
    offsets = [expm(h * x * A) for x in xi]
    # only the oscillating part of e^{-ts} remains once e^{-t s0} is absorbed
    osc = s - s.re
    base = np.eye(T.size)
    total = np.zeros_like(base)
    for j in range(panels):
        for x, w, E in zip(xi, wi, offsets):
            t = (j + x) * h
            L = lift(slice_exp(osc * (-t)), d)
            M = base @ E
            total += w * (M @ L if side == "left" else L @ M)
        base = base @ step
    return total


def cauchy_eval(f, x, contour, side="left", form="II"):
    """``(1/2pi) \\oint S^{-1}(s, x) ds_I f(s)`` at a scalar ``x`` (right mirror on request)."""
    _check_inside(x, contour, "x")
    if not _side_ok(f, side):
        raise PreconditionError(f"a {f.kind} function cannot be used with the {side} formula")
    _check_regular(f, contour)
    out = x.like(0.0)
    for s, w in zip(contour.nodes, contour.weights):
        K = cauchy_kernel(s, x, side, form)
        fs = evaluate(f, s)
        out = out + (K * (w * fs) if side == "left" else (fs * w) * K)
    return out

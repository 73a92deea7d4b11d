"""Paravector operators on V_n = V (x) R_n and their S-resolvents.

A paravector operator ``T = T0 + e1 T1 + ... + en Tn`` with real d x d
components acts on ``v = sum_B v_B e_B`` by ``T(v) = sum_{j,B} T_j(v_B) e_j e_B``.
In blade-major coordinates (d entries per blade) its matrix is
``sum_j kron(L(e_j), T_j)`` where ``L`` is the left regular representation.

Scalar multiplication follows ``(a X)(v) = a X(v)`` and ``(X a)(v) = X(a v)``,
so ``a X = lift(a) @ X`` and ``X a = X @ lift(a)`` with
``lift(a) = kron(L(a), I_d)``. With this placement the left series
``sum T^m s^(-1-m)`` sums to ``-Q_s(T)(T - conj(s))``.

The quaternionic case is handled by :class:`QuaternionOperator`: a d x d
matrix with quaternion entries acting on H^d, using the same layout with
the basis (1, i, j, k) in place of the blades.
"""
from __future__ import annotations

import json
import math
import warnings
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np
from scipy.linalg import lapack

from .errors import (
    DimensionError,
    PreconditionError,
    SingularScalarError,
    SpectrumError,
)
from .hypercomplex import Multivector, Quaternion, basis_vector

RCOND_MIN = 1e-13
COMMUTE_TOL = 1e-12


def opnorm(X):
    """Spectral norm of an operator matrix."""
    return float(np.linalg.norm(X, 2))


def _kron_eye(M, d):
    # kron(M, I_d) without np.kron's generic overhead
    m = M.shape[0]
    out = np.zeros((m, d, m, d))
    for k in range(d):
        out[:, k, :, k] = M
    return out.reshape(m * d, m * d)


def lift(a, d):
    """Matrix of ``v -> a v`` on V_n (block-diagonal lift of ``L(a)``)."""
    return _kron_eye(a.left_matrix(), d)


def lift_right(a, d):
    """Matrix of ``v -> v a`` on V_n."""
    return _kron_eye(a.right_matrix(), d)


@dataclass(frozen=True, eq=False)
class ParavectorOperator:
    """``T = T0 + sum_j e_j T_j`` with real d x d components."""

    components: tuple
    n: int = field(init=False)
    d: int = field(init=False)

    def __post_init__(self):
        comps = [np.array(c, dtype=float) for c in self.components]
        if len(comps) < 2:
            raise DimensionError("need at least T0 and T1")
        d = comps[0].shape[0] if comps[0].ndim == 2 else -1
        for c in comps:
            if c.ndim != 2 or c.shape != (d, d):
                raise DimensionError("components must be square matrices of one size")
            c.setflags(write=False)
        object.__setattr__(self, "components", tuple(comps))
        object.__setattr__(self, "n", len(comps) - 1)
        object.__setattr__(self, "d", d)

    @property
    def algebra_dim(self):
        return 2**self.n

    @property
    def size(self):
        return self.d * 2**self.n

    def scalar(self, x):
        return Multivector.scalar(x, self.n)

    def make_scalar(self, parts):
        parts = np.asarray(parts, dtype=float)
        if parts.size != self.n + 1:
            raise DimensionError(f"paravector in R^{self.n + 1} needs {self.n + 1} parts")
        return Multivector.paravector(parts)

    def accepts(self, s):
        return isinstance(s, Multivector) and s.n == self.n

    def imaginary_units(self):
        return [basis_vector(j, self.n) for j in range(1, self.n + 1)]

    @cached_property
    def matrix(self):
        out = np.kron(np.eye(2**self.n), self.components[0])
        for j in range(1, self.n + 1):
            out += np.kron(basis_vector(j, self.n).left_matrix(), self.components[j])
        out.setflags(write=False)
        return out

    def norm_bound(self):
        """``sum_j ||T_j||_2``, the norm used in the series and compactness bounds."""
        return float(sum(np.linalg.norm(c, 2) for c in self.components))

    @cached_property
    def commuting(self):
        scale = max(1.0, max(np.linalg.norm(c, 2) for c in self.components)) ** 2
        for i, a in enumerate(self.components):
            for b in self.components[i + 1 :]:
                if np.linalg.norm(a @ b - b @ a, 2) > COMMUTE_TOL * scale:
                    return False
        return True

    def conjugate(self):
        """``T0 - sum_j e_j T_j``."""
        return ParavectorOperator((self.components[0],) + tuple(-c for c in self.components[1:]))

    def scaled(self, factor):
        return ParavectorOperator(tuple(factor * c for c in self.components))

    def to_json(self):
        return {"n": self.n, "d": self.d, "components": [c.tolist() for c in self.components]}

    @classmethod
    def from_json(cls, data):
        n, d = int(data["n"]), int(data["d"])
        comps = [np.asarray(c, dtype=float).reshape(d, d) for c in data["components"]]
        if len(comps) != n + 1:
            raise DimensionError(f"expected {n + 1} components, got {len(comps)}")
        return cls(tuple(comps))


@dataclass(frozen=True, eq=False)
class QuaternionOperator:
    """Right-linear operator on H^d: ``T = A0 + i A1 + j A2 + k A3``."""

    components: tuple
    d: int = field(init=False)
    n = None

    def __post_init__(self):
        comps = [np.array(c, dtype=float) for c in self.components]
        if len(comps) != 4:
            raise DimensionError("a quaternion matrix has 4 real components")
        d = comps[0].shape[0] if comps[0].ndim == 2 else -1
        for c in comps:
            if c.ndim != 2 or c.shape != (d, d):
                raise DimensionError("components must be square matrices of one size")
            c.setflags(write=False)
        object.__setattr__(self, "components", tuple(comps))
        object.__setattr__(self, "d", d)

    algebra_dim = 4

    @property
    def size(self):
        return 4 * self.d

    def scalar(self, x):
        return Quaternion(float(x))

    def make_scalar(self, parts):
        return Quaternion.from_array(parts)

    def accepts(self, s):
        return isinstance(s, Quaternion)

    def imaginary_units(self):
        return [Quaternion(0, 1, 0, 0), Quaternion(0, 0, 1, 0), Quaternion(0, 0, 0, 1)]

    @cached_property
    def matrix(self):
        units = [Quaternion(1.0)] + self.imaginary_units()
        out = sum(np.kron(u.left_matrix(), c) for u, c in zip(units, self.components))
        out.setflags(write=False)
        return out

    def norm_bound(self):
        return float(sum(np.linalg.norm(c, 2) for c in self.components))

    @cached_property
    def commuting(self):
        return False

    def scaled(self, factor):
        return QuaternionOperator(tuple(factor * c for c in self.components))

    def to_json(self):
        return {"kind": "quaternion", "d": self.d, "components": [c.tolist() for c in self.components]}

    @classmethod
    def from_json(cls, data):
        d = int(data["d"])
        return cls(tuple(np.asarray(c, dtype=float).reshape(d, d) for c in data["components"]))


def operator_from_json(data):
    if isinstance(data, str):
        data = json.loads(data)
    if data.get("kind") == "quaternion":
        return QuaternionOperator.from_json(data)
    return ParavectorOperator.from_json(data)


# -- random instances ----------------------------------------------------


def _rescale(comps, norm):
    if norm is None:
        return comps
    total = sum(np.linalg.norm(c, 2) for c in comps)
    return [c * (norm / total) for c in comps] if total > 0 else comps


def random_operator(n, d, seed, norm=None):
    """Entries uniform on [-1, 1]; optionally rescaled so ``norm_bound() == norm``."""
    rng = np.random.default_rng(seed)
    comps = list(rng.uniform(-1.0, 1.0, size=(n + 1, d, d)))
    return ParavectorOperator(tuple(_rescale(comps, norm)))


def random_orthogonal(d, rng):
    q, r = np.linalg.qr(rng.standard_normal((d, d)))
    return q * np.sign(np.diag(r))


def random_commuting_operator(n, d, seed):
    """Diagonal components conjugated by one shared random orthogonal matrix."""
    rng = np.random.default_rng(seed)
    q = random_orthogonal(d, rng)
    diags = rng.uniform(-1.0, 1.0, size=(n + 1, d))
    return ParavectorOperator(tuple(q @ np.diag(x) @ q.T for x in diags))


def random_two_group_operator(n, d, seed, center=1.5, spread=0.5):
    """Operator whose S-spectrum splits into groups around ``+center`` and ``-center``.

    Each diagonal block is ``(+-center) I + E`` with ``||E|| <= spread``; the
    result is conjugated by a random orthogonal matrix.
    """
    if d < 2:
        raise DimensionError("two spectral groups need d >= 2")
    rng = np.random.default_rng(seed)
    d1 = d // 2
    blocks = []
    for size, c in ((d1, center), (d - d1, -center)):
        comps = _rescale(list(rng.uniform(-1.0, 1.0, size=(n + 1, size, size))), spread)
        comps[0] = comps[0] + c * np.eye(size)
        blocks.append(comps)
    q = random_orthogonal(d, rng)
    comps = []
    for a, b in zip(*blocks):
        m = np.zeros((d, d))
        m[:d1, :d1] = a
        m[d1:, d1:] = b
        comps.append(q @ m @ q.T)
    return ParavectorOperator(tuple(comps))


def random_quaternion_operator(d, seed, norm=None):
    rng = np.random.default_rng(seed)
    comps = list(rng.uniform(-1.0, 1.0, size=(4, d, d)))
    return QuaternionOperator(tuple(_rescale(comps, norm)))


def random_scalar(T, rng, scale=1.0):
    """Random paravector (or quaternion) matching T's scalar algebra."""
    k = (T.n + 1) if T.n is not None else 4
    return T.make_scalar(rng.uniform(-scale, scale, size=k))


# -- core linear algebra ---------------------------------------------------


def rep_matrix(T):
    return T.matrix


def _check(T, *scalars):
    for s in scalars:
        if not T.accepts(s):
            raise DimensionError(f"scalar {s!r} does not match the operator's algebra")
        if not s.is_paravector(1e-10):
            raise PreconditionError(f"{s!r} is not a paravector")


def scalar_compose(X, a, side):
    """``a X`` (side="left") or ``X a`` (side="right") as matrices."""
    X = np.asarray(X)
    if X.ndim != 2 or X.shape[0] != X.shape[1] or X.shape[0] % a.dim:
        raise DimensionError(f"operator of shape {X.shape} cannot carry scalars of dim {a.dim}")
    L = lift(a, X.shape[0] // a.dim)
    if side == "left":
        return L @ X
    if side == "right":
        return X @ L
    raise ValueError(f"side must be 'left' or 'right', got {side!r}")


def _factor(M):
    """LU with partial pivoting plus a 1-norm reciprocal condition estimate."""
    lu, piv, info = lapack.dgetrf(M)
    if info < 0:
        raise ValueError("invalid argument to dgetrf")
    if info > 0:
        return lu, piv, 0.0
    anorm = float(np.abs(M).sum(axis=0).max())
    rcond, info = lapack.dgecon(lu, anorm, norm="1")
    return lu, piv, float(rcond)


def _lu_solve(lu, piv, B, trans=0):
    x, info = lapack.dgetrs(lu, piv, B, trans=trans)
    if info != 0:
        raise ValueError("dgetrs failed")
    return x


def q_matrix(T, s):
    """``T^2 - 2 Re(s) T + |s|^2 I``."""
    R = T.matrix
    return R @ R - 2.0 * s.re * R + s.norm2() * np.eye(T.size)


def q_condition(T, s):
    """2-norm condition number of ``T^2 - 2 Re(s) T + |s|^2 I``."""
    return float(np.linalg.cond(q_matrix(T, s)))


class _Resolvents:
    """Per-operator cache of ``T^2`` used when many resolvents are formed."""

    def __init__(self, T):
        self.T = T
        self.R = T.matrix
        self.R2 = self.R @ self.R
        self.eye = np.eye(T.size)

    def factor_q(self, s):
        qm = self.R2 - 2.0 * s.re * self.R + s.norm2() * self.eye
        lu, piv, rcond = _factor(qm)
        if rcond < RCOND_MIN:
            raise SpectrumError(
                f"s = {s!r} lies on the S-spectrum (rcond {rcond:.3g})", sphere=s.sphere()
            )
        return lu, piv, rcond

    def pseudo(self, s):
        lu, piv, _ = self.factor_q(s)
        return _lu_solve(lu, piv, self.eye)

    def resolvent(self, s, side):
        """Returns ``(S^{-1}(s,T), rcond)`` for the requested side."""
        lu, piv, rcond = self.factor_q(s)
        A = self.R - lift(s.conj(), self.T.d)
        if side == "left":
            return -_lu_solve(lu, piv, A), rcond
        if side == "right":
            # A Q = (Q^T A^T)^T and Q^T is solved with trans=1
            return -_lu_solve(lu, piv, np.ascontiguousarray(A.T), trans=1).T, rcond
        raise ValueError(f"side must be 'left' or 'right', got {side!r}")


    def batch(self, coeffs, side):
        """S-resolvents at many scalars at once.

        ``coeffs`` holds one scalar per row (grades 0 and 1 only). Returns
        the stacked resolvents and the exact 1-norm condition numbers of the
        pseudo-resolvent factors.
        """
        coeffs = np.asarray(coeffs, dtype=float)
        basis = lift_basis(self.T)
        s0 = coeffs[:, 0]
        mod2 = np.einsum("kb,kb->k", coeffs, coeffs)
        Q = self.R2[None] - 2.0 * s0[:, None, None] * self.R[None] + mod2[:, None, None] * self.eye[None]
        try:
            Qinv = np.linalg.inv(Q)
        except np.linalg.LinAlgError:
            k = next(i for i in range(len(Q)) if _factor(Q[i])[2] < RCOND_MIN)
            raise SpectrumError(f"node {k} lies on the S-spectrum") from None
        cond = np.abs(Q).sum(axis=1).max(axis=1) * np.abs(Qinv).sum(axis=1).max(axis=1)
        if not np.all(np.isfinite(cond)) or cond.max() > 1.0 / RCOND_MIN:
            k = int(np.argmax(np.where(np.isfinite(cond), cond, np.inf)))
            raise SpectrumError(f"node {k} lies on the S-spectrum (cond {cond[k]:.3g})")
        conj = coeffs.copy()
        conj[:, 1:] *= -1.0
        A = self.R[None] - np.einsum("kb,bij->kij", conj, basis)
        S = -(Qinv @ A) if side == "left" else -(A @ Qinv)
        return S, cond


def lift_basis(T):
    """Stack of ``lift(e_B)`` over the scalar basis, so ``lift(a) = sum_B a_B lift(e_B)``."""
    cached = T.__dict__.get("_lift_basis")
    if cached is None:
        one = T.scalar(0.0)
        eye = np.eye(one.dim)
        cached = np.stack([lift(one.from_coeffs(eye[b]), T.d) for b in range(one.dim)])
        cached.setflags(write=False)
        object.__setattr__(T, "_lift_basis", cached)
    return cached


def pseudo_resolvent(T, s):
    """``Q_s(T) = (T^2 - 2 Re(s) T + |s|^2 I)^{-1}`` by dense LU."""
    _check(T, s)
    return _Resolvents(T).pseudo(s)


def s_resolvent(T, s, side="left"):
    """Left ``-Q_s(T)(T - conj(s))`` or right ``-(T - conj(s))Q_s(T)`` S-resolvent."""
    _check(T, s)
    return _Resolvents(T).resolvent(s, side)[0]


def resolvent_series(T, s, m_max, side="left"):
    """Partial sum ``sum_{m<=m_max} T^m s^{-1-m}`` (left) or ``s^{-1-m} T^m`` (right)."""
    _check(T, s)
    if side not in ("left", "right"):
        raise ValueError(f"side must be 'left' or 'right', got {side!r}")
    if T.norm_bound() >= s.norm():
        warnings.warn("||T|| >= |s|: the resolvent series need not converge", RuntimeWarning)
    R = T.matrix
    sinv = s.inverse()
    power = np.eye(T.size)
    coeff = sinv
    total = np.zeros_like(power)
    for m in range(m_max + 1):
        L = lift(coeff, T.d)
        total += power @ L if side == "left" else L @ power
        power = power @ R
        coeff = coeff * sinv
    return total


def resolvent_equation_residuals(T, s):
    """Residuals of ``S_L s - T S_L = I`` and ``s S_R - S_R T = I``."""
    _check(T, s)
    res = _Resolvents(T)
    SL, _ = res.resolvent(s, "left")
    SR, _ = res.resolvent(s, "right")
    Ls = lift(s, T.d)
    left = opnorm(SL @ Ls - res.R @ SL - res.eye)
    right = opnorm(Ls @ SR - SR @ res.R - res.eye)
    return left, right


def _inverse_or_raise(q, what, scale=1.0):
    if q.norm() <= 1e-12 * max(1.0, scale):
        raise SingularScalarError(f"{what} vanishes: the two scalars lie on one sphere")
    return q.inverse()


def new_resolvent_rhs(T, s, p, form="I", _res=None):
    """Right-hand side of the two-sided resolvent equation for ``S_R(s) S_L(p)``.

    Form I:  ``[D p - conj(s) D] (p^2 - 2 s0 p + |s|^2)^{-1}``
    Form II: ``(s^2 - 2 p0 s + |p|^2)^{-1} [D conj(p) - s D]``
    with ``D = S_R(s,T) - S_L(p,T)``. Form II is the mirror image of form I
    (``p -> conj(p)``, ``conj(s) -> s``, scalar factor moved to the left);
    summing the resolvent series term by term fixes its overall sign.
    """
    _check(T, s, p)
    res = _res or _Resolvents(T)
    d = T.d
    D = res.resolvent(s, "right")[0] - res.resolvent(p, "left")[0]
    if form == "I":
        qi = _inverse_or_raise(p * p - 2.0 * s.re * p + s.norm2(), "p^2 - 2 s0 p + |s|^2")
        return (D @ lift(p, d) - lift(s.conj(), d) @ D) @ lift(qi, d)
    if form == "II":
        qi = _inverse_or_raise(s * s - 2.0 * p.re * s + p.norm2(), "s^2 - 2 p0 s + |p|^2")
        return lift(qi, d) @ (D @ lift(p.conj(), d) - lift(s, d) @ D)
    raise ValueError(f"form must be 'I' or 'II', got {form!r}")


def new_resolvent_residual(T, s, p, form="I"):
    """``||S_R(s,T) S_L(p,T) - rhs||`` for the chosen form of the new equation."""
    res = _Resolvents(T)
    rhs = new_resolvent_rhs(T, s, p, form, _res=res)
    lhs = res.resolvent(s, "right")[0] @ res.resolvent(p, "left")[0]
    return opnorm(lhs - rhs)


def new_resolvent_forms_gap(T, s, p):
    """``||rhs_I - rhs_II||``: the two forms must describe the same operator."""
    res = _Resolvents(T)
    return opnorm(new_resolvent_rhs(T, s, p, "I", res) - new_resolvent_rhs(T, s, p, "II", res))


def pseudo_commutation_residual(T, s, p):
    """``||(T - s̄)Q_s Q_p (T - p̄) - (T - s̄)Q_p Q_s (T - p̄)||``."""
    _check(T, s, p)
    res = _Resolvents(T)
    Qs, Qp = res.pseudo(s), res.pseudo(p)
    A = res.R - lift(s.conj(), T.d)
    B = res.R - lift(p.conj(), T.d)
    return opnorm(A @ Qs @ Qp @ B - A @ Qp @ Qs @ B)


def finite_sum_residual(A, s, p, m, side="left", form="I"):
    """Residual of the closed form of ``sum_{j<=m} p^j A s^{-1-j}``.

    ``side="right"`` checks ``sum_{j<=m} s^{-1-j} A p^j`` instead; for that
    side ``form="II"`` selects the variant written with
    ``(s^2 - 2 Re(p) s + |p|^2)^{-1}``.
    """
    A = np.asarray(A, dtype=float)
    if A.shape[0] % s.dim:
        raise DimensionError("operator size is not a multiple of the algebra dimension")
    if s.dim != p.dim:
        raise DimensionError("s and p live in different algebras")
    d = A.shape[0] // s.dim
    L = lambda a: lift(a, d)  # noqa: E731
    sinv = s.inverse()
    lhs = np.zeros_like(A)
    pj, sj = p.like(1.0), sinv
    for _ in range(m + 1):
        lhs += (L(pj) @ A @ L(sj)) if side == "left" else (L(sj) @ A @ L(pj))
        pj, sj = pj * p, sj * sinv
    # after the loop: pj = p^{m+1}, sj = s^{-2-m}
    s_tail = sj * s
    if side == "left":
        qi = _inverse_or_raise(p * p - 2.0 * s.re * p + s.norm2(), "p^2 - 2 Re(s) p + |s|^2")
        K = L(p) @ A - A @ L(s.conj())
        rhs = -L(qi) @ K + L(pj) @ L(qi) @ K @ L(s_tail)
    elif side == "right" and form == "I":
        qi = _inverse_or_raise(p * p - 2.0 * s.re * p + s.norm2(), "p^2 - 2 Re(s) p + |s|^2")
        K = A @ L(p) - L(s.conj()) @ A
        rhs = -K @ L(qi) + L(s_tail) @ K @ L(qi) @ L(pj)
    elif side == "right" and form == "II":
        qi = _inverse_or_raise(s * s - 2.0 * p.re * s + p.norm2(), "s^2 - 2 Re(p) s + |p|^2")
        K = L(s) @ A - A @ L(p.conj())
        rhs = L(qi) @ K - L(s_tail) @ L(qi) @ K @ L(pj)
    else:
        raise ValueError(f"unsupported side/form {side!r}/{form!r}")
    return opnorm(lhs - rhs)


def sc_resolvent(T, s, side="left"):
    """Commutative S_C-resolvent ``(s - T̄)(s^2 - s(T + T̄) + T T̄)^{-1}`` (left).

    The right version is ``(s^2 - s(T + T̄) + T T̄)^{-1}(s - T̄)``.
    """
    if not isinstance(T, ParavectorOperator) or not T.commuting:
        raise PreconditionError("the S_C-resolvent needs commuting components")
    _check(T, s)
    d = T.d
    R = T.matrix
    Rb = T.conjugate().matrix
    Ls = lift(s, d)
    K = lift(s * s, d) - Ls @ (R + Rb) + R @ Rb
    lu, piv, rcond = _factor(K)
    if rcond < RCOND_MIN:
        raise SpectrumError(f"s = {s!r} lies on the F-spectrum", sphere=s.sphere())
    A = Ls - Rb
    if side == "left":
        return _lu_solve(lu, piv, np.ascontiguousarray(A.T), trans=1).T
    if side == "right":
        return _lu_solve(lu, piv, A)
    raise ValueError(f"side must be 'left' or 'right', got {side!r}")


def spectral_margin(s, spheres):
    """Planar distance from ``[s]`` to the nearest spectral sphere ``(u, v)``."""
    u, v = s.sphere()
    if not spheres:
        return math.inf
    return min(math.hypot(u - a, v - b) for a, b in spheres)

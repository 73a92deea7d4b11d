"""Seeded identity suite: every resolvent, calculus and spectral identity as residual records.

Each instance draws its own generator from ``(seed, index)`` so records do
not depend on how many instances run before it. Residuals marked as
relative are divided by the condition number of the pseudo-resolvent
factors involved.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.linalg import expm

from . import calculus as calc
from . import operator as op
from . import slicefun as sf
from . import spectrum as spm
from .hypercomplex import basis_vector, imaginary_unit

DEFAULT_TOLERANCES = {
    "classical_left": 1e-9,
    "classical_right": 1e-9,
    "new_equation_I": 1e-9,
    "new_equation_II": 1e-9,
    "new_equation_forms": 1e-9,
    "pseudo_commutation": 1e-10,
    "series": 1e-10,
    "finite_sum": 1e-11,
    "kernel_forms": 1e-11,
    "sc_resolvent": 1e-9,
    "f_spectrum": 1e-8,
    "norm_bound": 1e-9,
    "calculus_one": 1e-10,
    "calculus_polynomial": 1e-8,
    "calculus_exp": 1e-7,
    "left_right": 1e-7,
    "lemma_B": 1e-9,
    "lemma_f": 1e-9,
    "projectors": 1e-8,
    "product_rule": 1e-7,
    "laplace": 1e-6,
    "slice_independence": 2.0,
    "cauchy_independence": 2e-9,
    "quaternion_classical": 1e-9,
    "quaternion_new_equation": 1e-9,
    "quaternion_pseudo_commutation": 1e-10,
    "quaternion_laplace": 1e-6,
}

# identities whose residual is compared against tolerance * scale rather than tolerance
RELATIVE = {
    "classical_left", "classical_right", "new_equation_I", "new_equation_II",
    "new_equation_forms", "pseudo_commutation", "sc_resolvent", "quaternion_classical",
    "quaternion_new_equation", "quaternion_pseudo_commutation", "slice_independence",
}

# relative identities whose scale is a pseudo-resolvent condition number
CONDITIONED = RELATIVE - {"slice_independence"}

SCALARS_PER_INSTANCE = 5
KERNEL_PAIRS = 50
MIN_MARGIN = 0.1


@dataclass(frozen=True)
class Instance:
    index: int
    seed: int
    n: int
    d: int


def instance_family(seed, count):
    """Instances with ``d`` in {2,3,4} and ``n`` in {1,2,3}, chosen per index."""
    out = []
    for k in range(count):
        rng = np.random.default_rng([seed, k])
        out.append(Instance(k, int(rng.integers(0, 2**31 - 1)), int(rng.integers(1, 4)), int(rng.integers(2, 5))))
    return out


def sample_scalar(T, rng, spheres, min_margin=MIN_MARGIN, scale=2.0, exclude=None):
    """Random paravector at planar distance >= ``min_margin`` from the spectrum (and from ``exclude``)."""
    avoid = list(spheres) + ([exclude.sphere()] if exclude is not None else [])
    for _ in range(1000):
        s = op.random_scalar(T, rng, scale)
        if op.spectral_margin(s, avoid) >= min_margin:
            return s
    raise RuntimeError("could not sample a scalar away from the spectrum")


class _Recorder:
    def __init__(self, instance, tolerances):
        self.instance = instance
        self.tol = tolerances
        self.records = []

    def add(self, name, residual, scale=1.0, s=None, p=None):
        """Record one residual; relative identities are judged against ``tolerance * scale``."""
        tol = self.tol[name] * (scale if name in RELATIVE else 1.0)
        residual = float(residual)
        self.records.append(
            {
                "instance": self.instance.index,
                "seed": self.instance.seed,
                "n": self.instance.n,
                "d": self.instance.d,
                "identity": name,
                "s": _coords(s),
                "p": _coords(p),
                "cond": float(scale) if name in CONDITIONED else None,
                "scale": float(scale) if name in RELATIVE else None,
                "residual": residual,
                "tolerance": float(tol),
                "pass": bool(residual <= tol),
            }
        )


def _coords(x):
    return None if x is None else [float(c) for c in x.coeffs]


def _resolvent_identities(rec, T, rng, prefix=""):
    spheres = spm.s_spectrum(T).pairs()
    # per identity: (residual, cond, s, p) of the worst residual/cond ratio
    worst = {k: (0.0, 1.0, None, None) for k in ("cl", "cr", "n1", "n2", "gap", "pc")}

    def keep(key, r, c, s, p=None):
        if r / c > worst[key][0] / worst[key][1]:
            worst[key] = (r, c, s, p)

    for _ in range(SCALARS_PER_INSTANCE):
        s = sample_scalar(T, rng, spheres)
        p = sample_scalar(T, rng, spheres, exclude=s)
        cs, cp = op.q_condition(T, s), op.q_condition(T, p)
        left, right = op.resolvent_equation_residuals(T, s)
        keep("cl", left, cs, s)
        keep("cr", right, cs, s)
        c = max(cs, cp)
        keep("n1", op.new_resolvent_residual(T, s, p, "I"), c, s, p)
        keep("n2", op.new_resolvent_residual(T, s, p, "II"), c, s, p)
        keep("gap", op.new_resolvent_forms_gap(T, s, p), c, s, p)
        keep("pc", op.pseudo_commutation_residual(T, s, p), c, s, p)
    if prefix:
        ratio = lambda x: x[0] / x[1]  # noqa: E731
        rec.add("quaternion_classical", *max((worst["cl"], worst["cr"]), key=ratio))
        rec.add("quaternion_new_equation", *max((worst["n1"], worst["n2"], worst["gap"]), key=ratio))
        rec.add("quaternion_pseudo_commutation", *worst["pc"])
        return
    rec.add("classical_left", *worst["cl"])
    rec.add("classical_right", *worst["cr"])
    rec.add("new_equation_I", *worst["n1"])
    rec.add("new_equation_II", *worst["n2"])
    rec.add("new_equation_forms", *worst["gap"])
    rec.add("pseudo_commutation", *worst["pc"])


def _laplace_residual(T, rng):
    s0 = 2.0 * T.norm_bound() + 0.25
    s = op.random_scalar(T, rng, 1.0) * 1.0
    s = s - s.re + s0
    return max(
        op.opnorm(calc.laplace_resolvent(T, s, side) - op.s_resolvent(T, s, side))
        for side in ("left", "right")
    )


def run_instance(inst, tolerances=None, nodes=512):
    tolerances = tolerances or DEFAULT_TOLERANCES
    rec = _Recorder(inst, tolerances)
    rng = np.random.default_rng([inst.seed, 1])
    n, d = inst.n, inst.d
    T = op.random_operator(n, d, inst.seed)
    R = T.matrix
    spec = spm.s_spectrum(T)

    _resolvent_identities(rec, T, rng)

    # series and finite sums
    s = op.random_scalar(T, rng, 1.0)
    s = s * (2.0 * T.norm_bound() / s.norm() * (1.0 + rng.uniform()))
    rec.add(
        "series",
        max(
            op.opnorm(op.resolvent_series(T, s, 100, side) - op.s_resolvent(T, s, side))
            for side in ("left", "right")
        ),
    )
    A = rng.uniform(-1.0, 1.0, (T.size, T.size))
    fs_worst = 0.0
    for _ in range(3):
        a = op.random_scalar(T, rng, 1.0)
        b = op.random_scalar(T, rng, 1.0)
        if op.spectral_margin(a, [b.sphere()]) < MIN_MARGIN:
            continue
        a = a * (1.0 / max(a.norm(), 0.5))
        for side, form in (("left", "I"), ("right", "I"), ("right", "II")):
            fs_worst = max(fs_worst, op.finite_sum_residual(A, a, b, 8, side, form))
    rec.add("finite_sum", fs_worst)

    # scalar kernels
    kw = 0.0
    for _ in range(KERNEL_PAIRS):
        x = op.random_scalar(T, rng, 1.0)
        y = op.random_scalar(T, rng, 1.0)
        if op.spectral_margin(x, [y.sphere()]) < 1e-3:
            continue
        kw = max(kw, sf.kernel_forms_gap(y, x))
    rec.add("kernel_forms", kw)

    # commuting companion: S_C versus S and F-spectrum versus S-spectrum
    C = op.random_commuting_operator(n, d, inst.seed)
    cspec = spm.s_spectrum(C)
    sc_worst = (0.0, 1.0, None)
    for _ in range(2):
        z = sample_scalar(C, rng, cspec.pairs())
        c = op.q_condition(C, z)
        for side in ("left", "right"):
            r = op.opnorm(op.sc_resolvent(C, z, side) - op.s_resolvent(C, z, side))
            if r / c > sc_worst[0] / sc_worst[1]:
                sc_worst = (r, c, z)
    rec.add("sc_resolvent", *sc_worst)
    rec.add("f_spectrum", spm.match_spectra(spm.f_spectrum(C), cspec))
    rec.add("norm_bound", max(0.0, spec.max_modulus() - T.norm_bound()))

    # functional calculus on an enclosing circle
    I = T.imaginary_units()[0]
    contour = calc.default_contour(T, I, nodes, spectrum=spec)
    one = calc.func_calc(sf.constant(1.0), T, contour, spectrum=spec)
    rec.add("calculus_one", op.opnorm(one.value - np.eye(T.size)))
    coeffs = rng.uniform(-1.0, 1.0, 7)
    poly = calc.func_calc(sf.polynomial(coeffs), T, contour, spectrum=spec)
    direct = sum(c * np.linalg.matrix_power(R, m) for m, c in enumerate(coeffs))
    rec.add("calculus_polynomial", op.opnorm(poly.value - direct))
    ex = calc.func_calc(sf.named("exp"), T, contour, spectrum=spec)
    rec.add("calculus_exp", op.opnorm(ex.value - expm(R)))
    exr = calc.func_calc(sf.named("exp"), T, contour, "right", spectrum=spec)
    rec.add("left_right", op.opnorm(ex.value - exr.value))

    # another unit, another radius
    J = imaginary_unit(rng.normal(size=n), normalize=True)
    other = calc.default_contour(T, J, nodes, radius=1.5 * contour.circles[0].radius, spectrum=spec)
    ex2 = calc.func_calc(sf.named("exp"), T, other, spectrum=spec)
    rec.add("slice_independence", op.opnorm(ex.value - ex2.value), ex.err_estimate + ex2.err_estimate)
    x = op.random_scalar(T, rng, 0.5)
    g = sf.left_series([op.random_scalar(T, rng, 1.0) for _ in range(3)])
    small = spm.circle_contour(I, 0.0, 2.0, nodes)
    rec.add(
        "cauchy_independence",
        (calc.cauchy_eval(g, x, small) - calc.cauchy_eval(g, x, other)).norm(),
    )

    # scalar-composition contour integrals
    B = rng.uniform(-1.0, 1.0, (T.size, T.size))
    p = op.random_scalar(T, rng, 0.5)
    circle = spm.circle_contour(I, 0.0, 1.5, nodes)
    rec.add("lemma_B", op.opnorm(calc.lemma_integral(B, p, circle) - B))
    lf = 0.0
    for f in (sf.polynomial([0.0, 0.0, 1.0]), sf.named("exp")):
        got = calc.lemma_integral(B, p, circle, f)
        lf = max(lf, op.opnorm(got - op.scalar_compose(B, f(p), "right")))
    rec.add("lemma_f", lf)

    # Riesz projectors on a two-group operator
    G = op.random_two_group_operator(n, d, inst.seed)
    gspec = spm.s_spectrum(G)
    groups = [[k for k, sp in enumerate(gspec) if sp.u < 0], [k for k, sp in enumerate(gspec) if sp.u > 0]]
    pr = 0.0
    Ps = []
    for sub in groups:
        P, Tp = calc.riesz_projector(G, gspec, sub, nodes=nodes)
        pr = max(pr, *calc.projector_residuals(G, P, Tp).values())
        Ps.append(P)
    pr = max(pr, op.opnorm(Ps[0] + Ps[1] - np.eye(G.size)))
    rec.add("projectors", pr)

    # product rule
    e_last = basis_vector(min(2, n), n)
    pairs = (
        (sf.identity(), sf.identity()),
        (sf.named("exp"), sf.left_series([basis_vector(1, n), 1.0])),
        (sf.polynomial([0.0, 0.0, 1.0]), sf.left_series([0.0, e_last])),
    )
    rec.add("product_rule", max(calc.product_rule_residual(f, g_, T, I, nodes) for f, g_ in pairs))

    rec.add("laplace", _laplace_residual(T, rng))

    # quaternionic mirror
    Q = op.random_quaternion_operator(4, inst.seed)
    _resolvent_identities(rec, Q, rng, prefix="quaternion")
    rec.add("quaternion_laplace", _laplace_residual(Q, rng))
    return rec.records


def run_suite(seed=42, instances=20, tolerances=None, nodes=512):
    """All records for ``instances`` instances drawn from ``seed``."""
    tol = dict(DEFAULT_TOLERANCES)
    if tolerances:
        tol.update(tolerances)
    records = []
    for inst in instance_family(seed, instances):
        records.extend(run_instance(inst, tol, nodes))
    return records


def uniform_tolerances(value):
    return {k: float(value) for k in DEFAULT_TOLERANCES}


__all__ = [
    "DEFAULT_TOLERANCES",
    "Instance",
    "instance_family",
    "run_instance",
    "run_suite",
    "sample_scalar",
    "uniform_tolerances",
]

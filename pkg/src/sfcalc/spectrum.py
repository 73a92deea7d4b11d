"""S-spectrum, F-spectrum and integration contours.

The S-spectrum is computed from the eigenvalues of the real matrix of T:
``T^2 - 2u T + (u^2 + v^2) I = (T - (u+iv))(T - (u-iv))``, so it fails to be
invertible exactly when ``u +- iv`` is an eigenvalue. Each eigenvalue
``a + ib`` therefore yields the sphere ``(a, |b|)``.
"""
from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import minimize

from .errors import NonSeparableError, NumericalFailure, PreconditionError
from .hypercomplex import check_unit
from .operator import ParavectorOperator, q_matrix

MERGE_TOL = 1e-8
SEPARATION_MIN = 1e-6


@dataclass(frozen=True)
class SpectralSphere:
    u: float
    v: float
    multiplicity: int = 1

    @property
    def points(self):
        """Slice points ``u +- iv`` as complex numbers (one point if v == 0)."""
        if self.v == 0.0:
            return (complex(self.u, 0.0),)
        return (complex(self.u, self.v), complex(self.u, -self.v))

    def modulus(self):
        return math.hypot(self.u, self.v)


@dataclass(frozen=True)
class Spectrum:
    spheres: tuple
    source: str = "S"

    def __post_init__(self):
        ordered = tuple(sorted(self.spheres, key=lambda sp: (sp.u, sp.v)))
        object.__setattr__(self, "spheres", ordered)

    def __len__(self):
        return len(self.spheres)

    def __iter__(self):
        return iter(self.spheres)

    def __getitem__(self, k):
        return self.spheres[k]

    def pairs(self):
        return [(sp.u, sp.v) for sp in self.spheres]

    def max_modulus(self):
        return max((sp.modulus() for sp in self.spheres), default=0.0)

    def to_json(self):
        return {
            "source": self.source,
            "spheres": [{"u": sp.u, "v": sp.v, "mult": sp.multiplicity} for sp in self.spheres],
        }

    @classmethod
    def from_json(cls, data):
        spheres = tuple(
            SpectralSphere(float(x["u"]), float(x["v"]), int(x.get("mult", 1)))
            for x in data["spheres"]
        )
        return cls(spheres, data.get("source", "S"))


def spheres_from_eigenvalues(eigs, tol=MERGE_TOL, source="S"):
    """Fold eigenvalues ``a + ib`` onto ``(a, |b|)`` and merge near-duplicates."""
    pts = sorted((float(z.real), abs(float(z.imag))) for z in np.asarray(eigs, dtype=complex))
    clusters = []  # [sum_u, sum_v, count]
    for u, v in pts:
        for c in clusters:
            cu, cv = c[0] / c[2], c[1] / c[2]
            if math.hypot(u - cu, v - cv) <= tol * max(1.0, math.hypot(cu, cv)):
                c[0] += u
                c[1] += v
                c[2] += 1
                break
        else:
            clusters.append([u, v, 1])
    spheres = []
    for su, sv, k in clusters:
        v = sv / k
        # conjugate pairs of a real eigenvalue split by rounding collapse to v = 0
        spheres.append(SpectralSphere(su / k, 0.0 if v <= tol else v, k))
    return Spectrum(tuple(spheres), source)


def _eigvals(M):
    try:
        return np.linalg.eigvals(M)
    except np.linalg.LinAlgError as exc:
        raise NumericalFailure(f"eigenvalue iteration failed: {exc}") from exc


def s_spectrum(T, tol=MERGE_TOL):
    """S-spectrum of T as a sorted list of spectral spheres."""
    return spheres_from_eigenvalues(_eigvals(T.matrix), tol, "S")


def q_singularity_margin(T, u, v):
    """Smallest singular value of ``T^2 - 2u T + (u^2 + v^2) I``."""
    R = T.matrix
    q = R @ R - 2.0 * u * R + (u * u + v * v) * np.eye(T.size)
    return float(np.linalg.svd(q, compute_uv=False)[-1])


def q_margin_at(T, s):
    """Same margin evaluated from a full scalar ``s`` (depends on ``[s]`` only)."""
    return float(np.linalg.svd(q_matrix(T, s), compute_uv=False)[-1])


def f_spectrum(T, tol=MERGE_TOL):
    """F-spectrum of a commuting tuple.

    With commuting components ``T + T̄ = 2 T0`` and ``T T̄ = sum_j T_j^2``, so
    ``s^2 - s(T + T̄) + T T̄`` is singular on ``C_I`` exactly at the roots of
    the quadratic pencil ``s^2 - 2 s T0 + M``. Those are the eigenvalues of
    its companion matrix.
    """
    if not isinstance(T, ParavectorOperator) or not T.commuting:
        raise PreconditionError("the F-spectrum needs commuting components")
    d = T.d
    M = sum(c @ c for c in T.components)
    comp = np.zeros((2 * d, 2 * d))
    comp[:d, d:] = np.eye(d)
    comp[d:, :d] = -M
    comp[d:, d:] = 2.0 * T.components[0]
    return spheres_from_eigenvalues(_eigvals(comp), tol, "F")


def match_spectra(a, b):
    """Largest distance from a sphere of one spectrum to the nearest of the other."""
    pa, pb = a.pairs(), b.pairs()
    if not pa or not pb:
        return math.inf
    d1 = max(min(math.hypot(u - x, v - y) for x, y in pb) for u, v in pa)
    d2 = max(min(math.hypot(u - x, v - y) for x, y in pa) for u, v in pb)
    return max(d1, d2)


def singularity_scan(T, resolution=50, threshold=1e-6, box=None):
    """Locate the zeros of the singularity margin without using eigenvalues.

    The margin is sampled on a ``resolution x resolution`` grid over
    ``[-R, R] x [0, R]``; every grid-local minimum is polished with
    Nelder-Mead. Returns the refined ``(u, v, margin)`` triples whose margin
    is below ``threshold``.
    """
    if box is None:
        r = 1.05 * T.norm_bound() + 0.1
        box = (-r, r, 0.0, r)
    u0, u1, v0, v1 = box
    us = np.linspace(u0, u1, resolution)
    vs = np.linspace(v0, v1, resolution)
    grid = np.array([[q_singularity_margin(T, u, v) for v in vs] for u in us])
    padded = np.pad(grid, 1, constant_values=np.inf)
    found = []
    fun = lambda x: q_singularity_margin(T, x[0], abs(x[1]))  # noqa: E731
    for i in range(resolution):
        for j in range(resolution):
            window = padded[i : i + 3, j : j + 3]
            if grid[i, j] > window.min():
                continue
            opt = minimize(
                fun,
                np.array([us[i], vs[j]]),
                method="Nelder-Mead",
                options={"xatol": 1e-12, "fatol": 1e-15, "maxiter": 4000},
            )
            if opt.fun < threshold:
                found.append((float(opt.x[0]), abs(float(opt.x[1])), float(opt.fun)))
    return found


# -- contours ------------------------------------------------------------


@dataclass(frozen=True)
class Circle:
    center: complex
    radius: float
    sphere: int = -1


@dataclass(frozen=True, eq=False)
class Contour:
    """Union of positively oriented circles in the slice ``C_I``.

    Node ``k`` sits at ``s_k = c + r e^{I theta_k}``; its weight
    ``w_k = r e^{I theta_k} / N`` already contains ``ds_I / (2 pi)``, so
    ``sum_k X(s_k) w_k f(s_k)`` approximates ``(1/2pi) \\oint X(s) ds_I f(s)``.
    """

    I: object
    circles: tuple
    nodes_per_circle: int
    nodes: tuple = field(init=False, repr=False)
    weights: tuple = field(init=False, repr=False)
    theta: np.ndarray = field(init=False, repr=False)
    circle_ids: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        check_unit(self.I)
        N = int(self.nodes_per_circle)
        if N < 2 or N % 2:
            raise ValueError("nodes_per_circle must be an even integer >= 2")
        th = 2.0 * np.pi * np.arange(N) / N
        nodes, weights, thetas, ids = [], [], [], []
        one = self.I.like(1.0)
        for k, c in enumerate(self.circles):
            for t in th:
                ct, st = c.radius * math.cos(t), c.radius * math.sin(t)
                nodes.append(one * (c.center.real + ct) + self.I * (c.center.imag + st))
                weights.append((one * ct + self.I * st) / N)
                thetas.append(t)
                ids.append(k)
        object.__setattr__(self, "nodes", tuple(nodes))
        object.__setattr__(self, "weights", tuple(weights))
        object.__setattr__(self, "theta", np.array(thetas))
        object.__setattr__(self, "circle_ids", np.array(ids))

    def __len__(self):
        return len(self.nodes)

    def complex_nodes(self):
        """Nodes as complex numbers, ``i`` standing for ``I``."""
        centers = np.array([c.center for c in self.circles])[self.circle_ids]
        return centers + self._radii() * np.exp(1j * self.theta)

    def complex_weights(self):
        return self._radii() * np.exp(1j * self.theta) / self.nodes_per_circle

    def _radii(self):
        return np.array([c.radius for c in self.circles])[self.circle_ids]

    def halved(self):
        return Contour(self.I, self.circles, self.nodes_per_circle // 2)

    def with_unit(self, I):
        return Contour(I, self.circles, self.nodes_per_circle)

    def winding(self, z):
        """Number of circles enclosing the complex point ``z``."""
        return sum(1 for c in self.circles if abs(z - c.center) < c.radius)

    def min_distance(self, z):
        """Distance from ``z`` to the contour curve."""
        return min(abs(abs(z - c.center) - c.radius) for c in self.circles)

    def to_csv(self):
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        dim_names = ["re"] + [f"x{k}" for k in range(1, len(self.I.vector_part()) + 1)]
        w.writerow(["circle_id", "theta"] + dim_names)
        for cid, t, s in zip(self.circle_ids, self.theta, self.nodes):
            parts = [s.re] + list(s.vector_part())
            w.writerow([int(cid), repr(float(t))] + [repr(float(x)) for x in parts])
        return buf.getvalue()

    def to_json(self):
        return {
            "I": self.I.to_json(),
            "nodes_per_circle": self.nodes_per_circle,
            "circles": [
                {"center": [c.center.real, c.center.imag], "radius": c.radius, "sphere": c.sphere}
                for c in self.circles
            ],
        }


def circle_contour(I, center=0.0, radius=1.0, nodes=512):
    """One circle centred on the real axis."""
    return Contour(I, (Circle(complex(center, 0.0), float(radius)),), nodes)


def enclosing_contour(spectrum, I, nodes=512, radius=None, margin=1.0):
    """One circle about 0 enclosing every sphere of ``spectrum``."""
    if radius is None:
        radius = spectrum.max_modulus() + margin
    return circle_contour(I, 0.0, radius, nodes)


def build_contour(spectrum, subset, I, nodes_per_circle=512, radius=0.25):
    """Circles around the slice points of the selected spheres.

    Every selected sphere ``(u, v)`` gets a circle around ``u + iv`` and one
    around ``u - iv`` (a single circle when ``v = 0``). The radius is the
    smaller of ``radius`` and a third of the distance from the centre to any
    other slice point of the spectrum, so circles never overlap and no
    foreign sphere is enclosed.
    """
    subset = sorted(set(int(k) for k in subset))
    if not subset:
        raise ValueError("subset must select at least one sphere")
    if subset[0] < 0 or subset[-1] >= len(spectrum):
        raise IndexError(f"sphere index out of range 0..{len(spectrum) - 1}")
    selected = set(subset)
    others = [z for k, sp in enumerate(spectrum) if k not in selected for z in sp.points]
    everything = [(k, z) for k, sp in enumerate(spectrum) for z in sp.points]
    circles = []
    for k in subset:
        for z in spectrum[k].points:
            if others:
                gap = min(abs(z - w) for w in others)
                if gap < SEPARATION_MIN:
                    raise NonSeparableError(
                        f"sphere {k} is within {gap:.3g} of a non-selected sphere"
                    )
            near = [abs(z - w) for j, w in everything if not (j == k and w == z)]
            r = min([radius] + [g / 3.0 for g in near])
            circles.append(Circle(z, r, k))
    return Contour(I, tuple(circles), nodes_per_circle)


def spectrum_to_json(spec):
    return json.dumps(spec.to_json(), sort_keys=True)

"""Model manifolds, their single coordinate charts and quadrature grids.

Each manifold is covered by one coordinate box.  Bounded axes get
Gauss-Legendre nodes (interior, so chart-degenerate loci such as the poles
of S^2 or the core circles of S^3 are never sampled) and periodic axes get
the uniform trapezoid rule, which is spectrally accurate for smooth
periodic integrands.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field

import numpy as np

from . import expr as ex
from .errors import InvalidResolution

TWO_PI = 2.0 * math.pi


class ManifoldId(str, enum.Enum):
    SPHERE3 = "s3"
    SPHERE2 = "s2"
    TORUS3 = "t3"
    TORUS2 = "t2"
    SOLID_TORUS = "solid-torus"
    DISK2 = "d2"

    @classmethod
    def parse(cls, text):
        return text if isinstance(text, cls) else cls(str(text).lower())


@dataclass(frozen=True)
class Axis:
    name: str
    lo: float
    hi: float
    periodic: bool


@dataclass(frozen=True)
class Chart:
    manifold: ManifoldId
    axes: tuple
    density: ex.Expr  # canonical volume density w.r.t. the coordinate box
    volume: float  # exact total volume

    @property
    def variables(self):
        return tuple(a.name for a in self.axes)

    @property
    def dim(self):
        return len(self.axes)


def _chart(mid, axes, density, volume):
    return Chart(mid, tuple(Axis(*a) for a in axes), ex.parse(density), volume)


CHARTS = {
    # alpha ^ d alpha in Hopf coordinates
    ManifoldId.SPHERE3: _chart(
        ManifoldId.SPHERE3,
        [("eta", 0.0, math.pi / 2, False), ("xi1", 0.0, TWO_PI, True), ("xi2", 0.0, TWO_PI, True)],
        "sin(2*eta)/(4*pi^2)",
        1.0,
    ),
    # area form of total area 1
    ManifoldId.SPHERE2: _chart(
        ManifoldId.SPHERE2,
        [("phi", 0.0, math.pi, False), ("psi", 0.0, TWO_PI, True)],
        "sin(phi)/(4*pi)",
        1.0,
    ),
    ManifoldId.TORUS3: _chart(
        ManifoldId.TORUS3,
        [("x", 0.0, TWO_PI, True), ("y", 0.0, TWO_PI, True), ("z", 0.0, TWO_PI, True)],
        "1",
        TWO_PI**3,
    ),
    ManifoldId.TORUS2: _chart(
        ManifoldId.TORUS2,
        [("x", 0.0, TWO_PI, True), ("y", 0.0, TWO_PI, True)],
        "1",
        TWO_PI**2,
    ),
    # omega ^ dt with omega = r dr ^ dtheta; t is not assumed periodic for F_t
    ManifoldId.SOLID_TORUS: _chart(
        ManifoldId.SOLID_TORUS,
        [("r", 0.0, 1.0, False), ("theta", 0.0, TWO_PI, True), ("t", 0.0, 1.0, False)],
        "r",
        math.pi,
    ),
    ManifoldId.DISK2: _chart(
        ManifoldId.DISK2,
        [("r", 0.0, 1.0, False), ("theta", 0.0, TWO_PI, True)],
        "r",
        math.pi,
    ),
}


def chart(manifold):
    return CHARTS[ManifoldId.parse(manifold)]


def axis_rule(axis, n):
    """1-D nodes and weights for one axis."""
    if n < 4:
        raise InvalidResolution(f"axis {axis.name}: resolution {n} < 4")
    length = axis.hi - axis.lo
    if axis.periodic:
        nodes = axis.lo + length * np.arange(n) / n
        weights = np.full(n, length / n)
    else:
        x, w = np.polynomial.legendre.leggauss(n)
        nodes = axis.lo + 0.5 * length * (x + 1.0)
        weights = 0.5 * length * w
    return nodes, weights


@dataclass(frozen=True, eq=False)
class ChartGrid:
    """Tensor-product quadrature grid on one chart.

    ``nodes`` holds one flat coordinate array per chart variable; the
    canonical volume density is stored pre-evaluated so that integrating a
    scalar is a single dot product.
    """

    manifold: ManifoldId
    shape: tuple
    axes: tuple  # 1-D node arrays
    nodes: tuple
    weights: np.ndarray
    density: np.ndarray
    env: dict = field(repr=False)

    @property
    def size(self):
        return int(np.prod(self.shape))

    @property
    def chart(self):
        return CHARTS[self.manifold]

    def summary(self):
        return {"manifold": self.manifold.value, "resolution": list(self.shape)}


def make_grid(manifold, resolution=32):
    """Tensor-product grid for ``manifold``; ``resolution`` is an int or per-axis tuple."""
    c = chart(manifold)
    if np.isscalar(resolution):
        resolution = (int(resolution),) * c.dim
    resolution = tuple(int(n) for n in resolution)
    if len(resolution) != c.dim:
        raise InvalidResolution(f"{c.manifold.value} needs {c.dim} resolutions, got {len(resolution)}")
    rules = [axis_rule(a, n) for a, n in zip(c.axes, resolution)]
    mesh = np.meshgrid(*[r[0] for r in rules], indexing="ij")
    wmesh = np.meshgrid(*[r[1] for r in rules], indexing="ij")
    nodes = tuple(m.ravel() for m in mesh)
    weights = np.prod([w.ravel() for w in wmesh], axis=0)
    env = dict(zip(c.variables, nodes))
    density = np.array(ex.evaluate_on(c.density, env, weights.shape))
    for arr in (*nodes, weights, density):
        arr.flags.writeable = False
    return ChartGrid(c.manifold, resolution, tuple(r[0] for r in rules), nodes, weights, density, env)


def total_volume(grid):
    return float(grid.weights @ grid.density)


def hopf_projection(eta, xi1, xi2):
    """Hopf map in coordinates: (eta, xi1, xi2) -> (phi, psi) = (2 eta, xi1 - xi2 mod 2 pi)."""
    eta = np.asarray(eta, dtype=float)
    phi = 2.0 * eta
    psi = np.mod(np.asarray(xi1, dtype=float) - np.asarray(xi2, dtype=float), TWO_PI)
    if phi.ndim == 0:
        return float(phi), float(psi)
    return phi, psi


def hopf_to_c2(eta, xi1, xi2):
    """Point of S^3 in C^2 for given Hopf coordinates."""
    return np.exp(1j * np.asarray(xi1)) * np.sin(eta), np.exp(1j * np.asarray(xi2)) * np.cos(eta)

"""Contact forms on S^3 and T^3, Reeb flows and strictly contact fields."""

from __future__ import annotations

import math

import numpy as np

from . import expr as ex
from .errors import ChartDegeneracy, ManifoldMismatch, NotBasic
from .forms import KForm, ScalarField, VectorField, exterior_derivative
from .manifolds import ManifoldId, chart

BASIC_TOL = 1e-9
REEB_PHASES = 32
MAX_CHECK_NODES = 4096


def contact_form(manifold):
    m = ManifoldId.parse(manifold)
    if m is ManifoldId.SPHERE3:
        return KForm.build(m, 1, {"xi1": "sin(eta)^2/(2*pi)", "xi2": "cos(eta)^2/(2*pi)"})
    if m is ManifoldId.TORUS3:
        return KForm.build(m, 1, {"x": "cos(z)", "y": "-sin(z)"})
    raise ManifoldMismatch(f"no contact form on {m.value}")


def reeb_field(manifold):
    m = ManifoldId.parse(manifold)
    if m is ManifoldId.SPHERE3:
        return VectorField(m, (ex.ZERO, ex.parse("2*pi"), ex.parse("2*pi")))
    if m is ManifoldId.TORUS3:
        return VectorField(m, (ex.parse("cos(z)"), ex.parse("-sin(z)"), ex.ZERO))
    raise ManifoldMismatch(f"no contact form on {m.value}")


def reeb_flow(manifold, coords, s):
    """Time-``s`` Reeb flow applied to coordinate arrays."""
    m = ManifoldId.parse(manifold)
    a, b, c = coords
    if m is ManifoldId.SPHERE3:
        return a, b + 2 * math.pi * s, c + 2 * math.pi * s
    if m is ManifoldId.TORUS3:
        return a + s * np.cos(c), b - s * np.sin(c), c
    raise ManifoldMismatch(f"no Reeb flow on {m.value}")


def _sample(grid):
    stride = max(1, grid.size // MAX_CHECK_NODES)
    return tuple(n[::stride] for n in grid.nodes)


def basic_defect(H, grid):
    """Largest change of H along sampled Reeb orbits through grid nodes."""
    m = grid.manifold
    pts = _sample(grid)
    names = chart(m).variables
    base = np.asarray(ex.evaluate_on(H.expr, dict(zip(names, pts)), pts[0].shape))
    # S^3 orbits close at s = 1; on T^3 sample one 2 pi stretch of the line
    period = 1.0 if m is ManifoldId.SPHERE3 else 2 * math.pi
    worst = 0.0
    for k in range(1, REEB_PHASES):
        moved = reeb_flow(m, pts, period * k / REEB_PHASES)
        vals = ex.evaluate_on(H.expr, dict(zip(names, moved)), pts[0].shape)
        worst = max(worst, float(np.max(np.abs(vals - base))))
    return worst / (1.0 + float(np.max(np.abs(base))))


def require_basic(H, grid, tol=BASIC_TOL):
    if H.manifold is not grid.manifold:
        raise ManifoldMismatch(f"{H.manifold.value} field on {grid.manifold.value} grid")
    defect = basic_defect(H, grid)
    if not defect <= tol:
        raise NotBasic(f"{H.expr} varies along Reeb orbits (defect {defect:.3g})")


def _frame_system(H, grid):
    m = grid.manifold
    alpha = contact_form(m)
    dalpha = exterior_derivative(alpha)
    a = alpha.values(grid)
    w = dalpha.values(grid)
    n = grid.size
    names = chart(m).variables
    dH = [np.array(ex.evaluate_on(ex.differentiate(H.expr, v), grid.env, (n,))) for v in names]
    A = np.zeros((n, 4, 3))
    for i in range(3):
        A[:, 0, i] = a[(i,)]
    # (iota_X dalpha)_j = sum_i X^i w_ij
    for (i, j), vals in w.items():
        A[:, 1 + j, i] += vals
        A[:, 1 + i, j] -= vals
    b = np.zeros((n, 4))
    b[:, 0] = H.values(grid)
    for j in range(3):
        b[:, 1 + j] = -dH[j]
    return A, b


def contact_vector_field(H, grid, check_basic=True):
    """Strictly contact field X_H tabulated at grid nodes.

    Solves alpha(X) = H and iota_X d alpha = -dH node by node (the system is
    4x3 and consistent for basic H; it is solved in the least-squares sense).
    """
    if check_basic:
        require_basic(H, grid)
    A, b = _frame_system(H, grid)
    AtA = np.einsum("nki,nkj->nij", A, A)
    Atb = np.einsum("nki,nk->ni", A, b)
    scale = np.einsum("nii->n", AtA) / 3.0
    det = np.linalg.det(AtA) / scale**3
    if np.any(~np.isfinite(det)) or np.min(np.abs(det)) < 1e-14:
        raise ChartDegeneracy(f"singular frame at {int(np.argmin(np.abs(det)))}")
    X = np.linalg.solve(AtA, Atb[..., None])[..., 0]
    for col in X.T:
        col.flags.writeable = False
    return VectorField(grid.manifold, tuple(X.T.copy()), grid=grid)


def contact_residual(X, H, grid):
    """max over nodes of |alpha(X) - H| and |iota_X d alpha + dH|."""
    A, b = _frame_system(H, grid)
    comps = np.stack(X.values(grid), axis=1)
    return float(np.max(np.abs(np.einsum("nki,ni->nk", A, comps) - b)))


def basic_scalar(manifold, text):
    return ScalarField.of(manifold, text)

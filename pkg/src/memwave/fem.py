"""Finite elements on the uniform unit interval / unit square.

Linear elements in 1d, bilinear tensor-product elements in 2d, homogeneous
Dirichlet boundary everywhere: boundary nodes carry no unknowns, so vectors
hold interior nodal values only.  2d interior nodes (i, j), 1 <= i, j <= M-1,
are flattened row-major with i slow, which makes the mass and stiffness
matrices Kronecker products of their 1d counterparts.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp

__all__ = [
    "Mesh",
    "DiscreteOperators",
    "assemble",
    "interpolate",
    "load_vector",
    "gradient_samples",
    "gradient_array",
]

# 3-point Gauss rule on [0, 1]; exact through polynomial degree 5
_GPTS = np.array([0.5 - np.sqrt(15.0) / 10.0, 0.5, 0.5 + np.sqrt(15.0) / 10.0])
_GWTS = np.array([5.0 / 18.0, 8.0 / 18.0, 5.0 / 18.0])


@dataclass(frozen=True)
class Mesh:
    """Uniform mesh of (0,1) (dim 1) or (0,1)^2 (dim 2) with M cells per axis."""

    dim: int
    m: int

    def __post_init__(self) -> None:
        if self.dim not in (1, 2):
            raise ValueError(f"dim must be 1 or 2, got {self.dim}")
        if self.m < 2:
            raise ValueError(f"m must be at least 2, got {self.m}")

    @property
    def h(self) -> float:
        return 1.0 / self.m

    @property
    def n_interior(self) -> int:
        return (self.m - 1) ** self.dim

    def interior_coords(self) -> np.ndarray:
        """Interior node coordinates along one axis."""
        return self.h * np.arange(1, self.m)


@dataclass(frozen=True, eq=False)
class DiscreteOperators:
    """Assembled mass and stiffness matrices on the interior nodes."""

    dim: int
    mass: sp.csr_matrix
    stiffness: sp.csr_matrix


def _mass_1d(m: int) -> sp.csr_matrix:
    h = 1.0 / m
    n = m - 1
    main = np.full(n, 4.0 * h / 6.0)
    off = np.full(n - 1, h / 6.0)
    return sp.diags([off, main, off], [-1, 0, 1], format="csr")


def _stiffness_1d(m: int) -> sp.csr_matrix:
    h = 1.0 / m
    n = m - 1
    main = np.full(n, 2.0 / h)
    off = np.full(n - 1, -1.0 / h)
    return sp.diags([off, main, off], [-1, 0, 1], format="csr")


def assemble(mesh: Mesh, lumped_mass: bool = False) -> DiscreteOperators:
    """Exact element integrals for linear (1d) / bilinear (2d) elements.

    With `lumped_mass` the mass matrix is replaced by its row-sum diagonal,
    which turns the scheme into its classical finite-difference counterpart;
    the 1d reference benchmarks are reproduced with lumping, so the 1d
    benchmark preset enables it.
    """
    mass1 = _mass_1d(mesh.m)
    stiff1 = _stiffness_1d(mesh.m)
    if mesh.dim == 1:
        mass, stiff = mass1, stiff1
    else:
        mass = sp.kron(mass1, mass1, format="csr")
        stiff = (sp.kron(stiff1, mass1) + sp.kron(mass1, stiff1)).tocsr()
    if lumped_mass:
        mass = sp.diags(np.asarray(mass.sum(axis=1)).ravel(), 0, format="csr")
    return DiscreteOperators(mesh.dim, mass, stiff)


def _broadcast_field(values, like: np.ndarray) -> np.ndarray:
    out = np.asarray(values, dtype=float)
    if out.shape != like.shape:
        out = np.broadcast_to(out, like.shape).astype(float)
    return out


def interpolate(mesh: Mesh, g) -> np.ndarray:
    """Nodal values of g at the interior nodes (boundary values are 0)."""
    xs = mesh.interior_coords()
    if mesh.dim == 1:
        return _broadcast_field(g(xs), xs).copy()
    gx, gy = np.meshgrid(xs, xs, indexing="ij")
    return _broadcast_field(g(gx, gy), gx).ravel().copy()


def load_vector(mesh: Mesh, f, t: float) -> np.ndarray:
    """Entries (f(., t), phi_j) for each interior basis function.

    Per-cell Gauss quadrature, exact through degree 5.  `f = None` means a
    zero forcing term and skips the quadrature entirely.
    """
    m, h = mesh.m, mesh.h
    if f is None:
        return np.zeros(mesh.n_interior)
    cells = h * np.arange(m)
    pts = cells[:, None] + h * _GPTS[None, :]  # (m, 3)
    if mesh.dim == 1:
        fv = _broadcast_field(f(pts, t), pts)
        w_lo = h * _GWTS * (1.0 - _GPTS)
        w_hi = h * _GWTS * _GPTS
        full = np.zeros(m + 1)
        full[:-1] += fv @ w_lo
        full[1:] += fv @ w_hi
        return full[1:m].copy()

    x4 = pts[:, :, None, None]
    y4 = pts[None, None, :, :]
    fv = _broadcast_field(f(x4, y4, t), np.broadcast_arrays(x4, y4)[0])
    w0 = _GWTS * (1.0 - _GPTS)
    w1 = _GWTS * _GPTS
    full = np.zeros((m + 1, m + 1))
    for a, wa in ((0, w0), (1, w1)):
        for b, wb in ((0, w0), (1, w1)):
            contrib = h * h * np.einsum("kqlr,q,r->kl", fv, wa, wb)
            full[a:m + a, b:m + b] += contrib
    return full[1:m, 1:m].ravel().copy()


def gradient_array(mesh: Mesh, u: np.ndarray) -> np.ndarray:
    """Backward-difference gradient samples at every interior node.

    1d: V_j = (U_j - U_{j-1}) / h, j = 1..M-1.
    2d: W_ij = sqrt(((U_ij - U_{i-1,j})/h)^2 + ((U_ij - U_{i,j-1})/h)^2),
    returned as an (M-1, M-1) array.  Boundary values enter as zeros.
    """
    m, h = mesh.m, mesh.h
    u = np.asarray(u, dtype=float)
    if u.size != mesh.n_interior:
        raise ValueError(f"state has {u.size} entries, expected {mesh.n_interior}")
    if mesh.dim == 1:
        padded = np.concatenate(([0.0], u))
        return np.diff(padded) / h
    full = np.zeros((m + 1, m + 1))
    full[1:m, 1:m] = u.reshape(m - 1, m - 1)
    dx = (full[1:m, 1:m] - full[0:m - 1, 1:m]) / h
    dy = (full[1:m, 1:m] - full[1:m, 0:m - 1]) / h
    return np.sqrt(dx * dx + dy * dy)


def gradient_samples(mesh: Mesh, u: np.ndarray, index) -> float:
    """Single gradient sample: index j in 1d, pair (i, j) in 2d."""
    grads = gradient_array(mesh, u)
    if mesh.dim == 1:
        j = int(index)
        if not 1 <= j <= mesh.m - 1:
            raise IndexError(f"node index {j} outside [1, {mesh.m - 1}]")
        return float(grads[j - 1])
    i, j = index
    if not (1 <= i <= mesh.m - 1 and 1 <= j <= mesh.m - 1):
        raise IndexError(f"node index {(i, j)} outside the interior range")
    return float(grads[i - 1, j - 1])

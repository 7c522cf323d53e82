"""Linearly implicit time stepping for the damped wave equation with memory.

Each step solves one symmetric positive definite system: the nonlinear
damping coefficient is evaluated at the known level n, the elastic and
memory terms are centered, and the accumulated memory enters through the
precomputed quadrature weights.  A second-order Taylor expansion supplies
the first step, with the initial acceleration recovered from the equation
itself at t = 0.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np
import scipy.sparse as sp
from scipy.linalg import LinAlgError, solveh_banded
from scipy.sparse.linalg import LinearOperator, cg

from .fem import DiscreteOperators, Mesh, assemble, interpolate, load_vector
from .kernel import KernelLike
from .quadweights import WeightTable, build_weight_table

__all__ = [
    "DampingSpec",
    "Problem",
    "SimulationHistory",
    "SolverError",
    "StepError",
    "damping_value",
    "taylor_start",
    "step",
    "run",
]

_DAMPING_KINDS = ("affine", "sqrt", "constant")


class SolverError(RuntimeError):
    """A linear solve failed or did not converge."""


class StepError(RuntimeError):
    """The step left the regime where the scheme is well defined."""


@dataclass(frozen=True)
class DampingSpec:
    """Nonlinear-nonlocal damping coefficient G(mu1*||u||^2 + mu2*||grad u||^2).

    kind 'affine'   : G(z) = 1 + z          (g0 = 1, Lipschitz bound 1)
    kind 'sqrt'     : G(z) = sqrt(1 + z)    (g0 = 1, Lipschitz bound 1/2)
    kind 'constant' : G(z) = constant       (g0 = constant, bound 0)

    mu1 weights the L2 norm, mu2 the gradient norm; they are nonnegative and
    not both zero.
    """

    kind: str
    mu1: float = 1.0
    mu2: float = 1.0
    constant: float = 1.0
    g0: float = field(init=False)
    lipschitz: float = field(init=False)

    def __post_init__(self) -> None:
        if self.kind not in _DAMPING_KINDS:
            raise ValueError(f"kind must be one of {_DAMPING_KINDS}, got {self.kind!r}")
        if self.mu1 < 0.0 or self.mu2 < 0.0:
            raise ValueError("damping weights must be nonnegative")
        if self.mu1 == 0.0 and self.mu2 == 0.0:
            raise ValueError("damping weights must not both vanish")
        if self.kind == "constant":
            if not self.constant > 0.0:
                raise ValueError(f"constant damping must be positive, got {self.constant}")
            g0, lip = self.constant, 0.0
        elif self.kind == "affine":
            g0, lip = 1.0, 1.0
        else:
            g0, lip = 1.0, 0.5
        object.__setattr__(self, "g0", g0)
        object.__setattr__(self, "lipschitz", lip)

    def value(self, z: float) -> float:
        """G(z) for z >= 0."""
        if z < 0.0:
            raise ValueError(f"damping argument must be nonnegative, got {z}")
        if self.kind == "constant":
            return self.constant
        if self.kind == "affine":
            return 1.0 + z
        return math.sqrt(1.0 + z)


@dataclass(frozen=True)
class Problem:
    """Initial data and forcing.

    u0, u1 : callables of the space coordinates (x) or (x, y)
    f      : callable of (x, t) or (x, y, t); None means zero forcing
    """

    u0: Callable
    u1: Callable
    f: Optional[Callable] = None


def damping_value(spec: DampingSpec, ops: DiscreteOperators, u: np.ndarray) -> float:
    """q = G(mu1 * u'Mu + mu2 * u'Au) for the current state vector."""
    z = spec.mu1 * float(u @ (ops.mass @ u)) + spec.mu2 * float(u @ (ops.stiffness @ u))
    q = spec.value(z)
    assert q >= spec.g0
    return q


def _solve_spd(dim: int, matrix: sp.csr_matrix, rhs: np.ndarray,
               x0: Optional[np.ndarray] = None, rtol: float = 1.0e-11) -> np.ndarray:
    """Direct banded Cholesky in 1d, Jacobi-preconditioned CG in 2d."""
    if not rhs.any():
        return np.zeros_like(rhs)
    if dim == 1:
        n = matrix.shape[0]
        ab = np.zeros((2, n))
        ab[0, 1:] = matrix.diagonal(1)
        ab[1] = matrix.diagonal()
        try:
            return solveh_banded(ab, rhs, lower=False)
        except LinAlgError as exc:
            raise SolverError(f"banded Cholesky failed: {exc}") from exc
    dinv = 1.0 / matrix.diagonal()
    precond = LinearOperator(matrix.shape, matvec=lambda r: dinv * r)
    x, info = cg(matrix, rhs, x0=x0, rtol=rtol, atol=0.0, maxiter=2000, M=precond)
    if info != 0:
        raise SolverError(f"conjugate gradient did not converge (info = {info})")
    return x


class SimulationHistory:
    """Trajectory U^0..U^n plus the cached stiffness-applied velocity terms.

    stiffness_diffs[p] holds A applied to the centered difference
    (U^{p+1} - U^{p-1}) / (2 tau) for p >= 1, and A applied to the discrete
    initial velocity for p = 0; the memory sum consumes these directly so no
    stiffness product is ever recomputed.
    """

    def __init__(self, mesh: Mesh, tau: float, mu0: float, u0_vec: np.ndarray,
                 u1h: np.ndarray, u2h: np.ndarray, stiffness: sp.csr_matrix,
                 capacity: int = 8):
        self.mesh = mesh
        self.tau = float(tau)
        self.mu0 = float(mu0)
        self.u1h = np.asarray(u1h, dtype=float)
        self.u2h = np.asarray(u2h, dtype=float)
        ndof = u0_vec.size
        cap = max(int(capacity), 1)
        self._stiff = stiffness
        self._states = np.zeros((cap + 1, ndof))
        self._adiffs = np.zeros((cap + 1, ndof))
        self._states[0] = u0_vec
        self._adiffs[0] = stiffness @ self.u1h
        self.stiff_u0 = stiffness @ np.asarray(u0_vec, dtype=float)
        self._count = 1

    @property
    def n_last(self) -> int:
        """Largest stored step index."""
        return self._count - 1

    @property
    def states(self) -> np.ndarray:
        """View of U^0..U^n, shape (n+1, ndof)."""
        return self._states[: self._count]

    @property
    def stiffness_diffs(self) -> np.ndarray:
        """View of the cached memory-sum vectors for p = 0..n-1."""
        return self._adiffs[: max(self._count - 1, 0)]

    def _grow(self) -> None:
        cap = 2 * (self._states.shape[0] - 1)
        states = np.zeros((cap + 1, self._states.shape[1]))
        adiffs = np.zeros((cap + 1, self._adiffs.shape[1]))
        states[: self._count] = self._states[: self._count]
        adiffs[: self._count] = self._adiffs[: self._count]
        self._states, self._adiffs = states, adiffs

    def push(self, state: np.ndarray) -> None:
        """Append U^{n+1} and cache its contribution to the memory sum."""
        if self._count >= self._states.shape[0]:
            self._grow()
        k = self._count
        self._states[k] = state
        if k >= 2:
            self._adiffs[k - 1] = self._stiff @ (
                (self._states[k] - self._states[k - 2]) / (2.0 * self.tau)
            )
        self._count += 1


def taylor_start(ops: DiscreteOperators, mesh: Mesh, problem: Problem,
                 damping: DampingSpec, tau: float):
    """Second-order start: U^1 = U^0 + tau*u1h + (tau^2/2)*u2h.

    The discrete initial acceleration u2h solves
    M u2h = -q(0) M u1h - A U^0 + F(0), i.e. the equation itself at t = 0
    with the memory term empty.
    """
    u0_vec = interpolate(mesh, problem.u0)
    u1h = interpolate(mesh, problem.u1)
    q0 = damping_value(damping, ops, u0_vec)
    rhs = -q0 * (ops.mass @ u1h) - ops.stiffness @ u0_vec + load_vector(mesh, problem.f, 0.0)
    u2h = _solve_spd(ops.dim, ops.mass, rhs, rtol=1.0e-12)
    u1_vec = u0_vec + tau * u1h + 0.5 * tau * tau * u2h
    return u0_vec, u1_vec, u1h, u2h


def step(history: SimulationHistory, ops: DiscreteOperators, table: WeightTable,
         damping: DampingSpec, problem: Problem, n: int) -> np.ndarray:
    """Advance from U^0..U^n to U^{n+1}; mutates and returns through history.

    The system matrix is
        S = (1/tau^2 + q_n/(2 tau)) M + (mu0/2 + w(n,n)/(2 tau)) A
    and the right-hand side collects the two known levels, the accumulated
    memory sum, the forcing, and the elastic contribution of the initial
    state carried by K(t_n).
    """
    if n != history.n_last:
        raise ValueError(f"history holds steps up to {history.n_last}, cannot step at n = {n}")
    if n < 1:
        raise ValueError("stepping starts at n = 1; use taylor_start first")
    if n > table.n_max:
        raise ValueError(f"weight table covers n <= {table.n_max}, got {n}")

    tau = history.tau
    mu0 = table.mu0
    states = history.states
    u_n, u_nm1 = states[n], states[n - 1]

    q_n = damping_value(damping, ops, u_n)
    w_nn = float(table.edge_right[n])
    elastic_coeff = 0.5 * mu0 + w_nn / (2.0 * tau)
    if elastic_coeff <= 0.0:
        raise StepError(
            f"elastic coefficient mu0/2 + w(n,n)/(2 tau) = {elastic_coeff} <= 0 "
            f"at step {n}; the scheme is outside its admissible regime"
        )

    matrix = (1.0 / tau**2 + q_n / (2.0 * tau)) * ops.mass + elastic_coeff * ops.stiffness

    coeff = table.coefficients(n)
    memory = coeff[:n] @ history.stiffness_diffs
    rhs = (
        (2.0 / tau**2) * (ops.mass @ u_n)
        - (1.0 / tau**2 - q_n / (2.0 * tau)) * (ops.mass @ u_nm1)
        - (0.5 * mu0 - w_nn / (2.0 * tau)) * (ops.stiffness @ u_nm1)
        - memory
        + load_vector(mesh=history.mesh, f=problem.f, t=n * tau)
        - float(table.k_values[n]) * history.stiff_u0
    )
    u_next = _solve_spd(ops.dim, matrix.tocsr(), rhs, x0=u_n.copy())
    history.push(u_next)
    return u_next


def run(problem: Problem, mesh: Mesh, tau: float, n_steps: int,
        kernel: Optional[KernelLike] = None, damping: Optional[DampingSpec] = None,
        ops: Optional[DiscreteOperators] = None,
        table: Optional[WeightTable] = None) -> SimulationHistory:
    """Full trajectory U^0..U^{n_steps}.

    Prebuilt operators and weight tables may be passed in so refinement
    ladders can share them; otherwise they are assembled here (the table
    then requires a kernel).
    """
    if n_steps < 1:
        raise ValueError(f"n_steps must be at least 1, got {n_steps}")
    if damping is None:
        raise ValueError("a damping spec is required")
    if ops is None:
        ops = assemble(mesh)
    if table is None:
        if kernel is None:
            raise ValueError("either a kernel or a prebuilt weight table is required")
        table = build_weight_table(kernel, tau, max(1, n_steps - 1))
    elif table.n_max < n_steps - 1:
        raise ValueError(
            f"weight table covers n <= {table.n_max}, need {n_steps - 1}"
        )
    if abs(table.tau - tau) > 1.0e-14 * max(1.0, tau):
        raise ValueError(f"table step {table.tau} does not match tau = {tau}")

    u0_vec, u1_vec, u1h, u2h = taylor_start(ops, mesh, problem, damping, tau)
    history = SimulationHistory(
        mesh, tau, table.mu0, u0_vec, u1h, u2h, ops.stiffness, capacity=n_steps
    )
    history.push(u1_vec)
    for n in range(1, n_steps):
        step(history, ops, table, damping, problem, n)
    return history

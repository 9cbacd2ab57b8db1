"""
Lindblad superoperators, steady states and time propagation.

Vectorization is column-stacking throughout: ``vec(X)[i + j*d] = X[i, j]``,
so ``vec(A X B) = (B^T ⊗ A) vec(X)``.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterator, Sequence

import numpy as np
import scipy.linalg as la
import scipy.sparse as sp
import scipy.sparse.linalg as spla
from scipy.integrate import DOP853

from .hilbert import DensityOperator, LayoutError, Operator, SpaceLayout

__all__ = [
    "SolverError",
    "DegenerateSteadyStateError",
    "ConvergenceError",
    "StiffnessError",
    "CollapseChannel",
    "Liouvillian",
    "vec",
    "unvec",
    "dissipator",
    "build_liouvillian",
    "steady_state",
    "steady_state_residual",
    "propagate",
    "evolve",
    "evolve_expect",
    "evolve_expect_many",
    "uniform_grid",
]

log = logging.getLogger(__name__)

HERMITIAN_TOL = 1e-10
DIRECT_MAX_DIM = 120  # Hilbert dim above which "auto" switches to GMRES
# DOP853 steps are capped at STABLE_STEP / ||L||: near the edge of the stability
# region the embedded error estimate misses slowly growing round-off modes
STABLE_STEP = 5.0


class SolverError(RuntimeError):
    """Base class for numerical failures."""


class DegenerateSteadyStateError(SolverError):
    """The Liouvillian kernel is more than one-dimensional."""


class ConvergenceError(SolverError):
    def __init__(self, message: str, residual: float):
        super().__init__(f"{message} (residual {residual:.3e})")
        self.residual = residual


class StiffnessError(SolverError):
    def __init__(self, t: float, message: str = ""):
        super().__init__(f"integration failed at t={t:.6g}: {message}")
        self.t = t


@dataclass(frozen=True)
class CollapseChannel:
    """Collapse operator with a non-negative rate, contributing ``rate * D(op)``."""

    op: Operator
    rate: float

    def __post_init__(self):
        if not self.rate >= 0:
            raise ValueError(f"collapse rate must be >= 0, got {self.rate}")


def vec(x: np.ndarray) -> np.ndarray:
    return np.asarray(x).reshape(-1, order="F")


def unvec(v: np.ndarray, d: int) -> np.ndarray:
    return np.asarray(v).reshape(d, d, order="F")


def _kron(a, b):
    return sp.kron(a, b, format="csr")


@dataclass(frozen=True, eq=False)
class Liouvillian:
    layout: SpaceLayout
    hamiltonian: Operator
    channels: tuple[CollapseChannel, ...]
    super_matrix: sp.csr_matrix = field(repr=False)

    @property
    def dim(self) -> int:
        return self.layout.total_dim

    def apply(self, rho) -> np.ndarray:
        """``L[rho]`` for a dense matrix (or :class:`DensityOperator`)."""
        m = rho.matrix if isinstance(rho, DensityOperator) else np.asarray(rho)
        return unvec(self.super_matrix @ vec(m), self.dim)

    @cached_property
    def _norm(self) -> float:
        return float(np.abs(self.super_matrix).sum(axis=1).max())

    def norm(self) -> float:
        """Induced infinity norm (max absolute row sum) of the super-matrix."""
        return self._norm

    def effective_hamiltonian(self) -> np.ndarray:
        """Dense ``H - (i/2) sum_k rate_k c_k^dag c_k``."""
        heff = self.hamiltonian.data.toarray()
        for ch in self.channels:
            c = ch.op.data
            heff = heff - 0.5j * ch.rate * (c.conj().T @ c).toarray()
        return heff

    @property
    def has_dissipation(self) -> bool:
        return any(ch.rate > 0 and ch.op.nnz for ch in self.channels)


def dissipator(op: Operator, rho) -> np.ndarray:
    """``O rho O^dag - (1/2) O^dag O rho - (1/2) rho O^dag O`` (dense result)."""
    if isinstance(rho, DensityOperator):
        if rho.layout != op.layout:
            raise LayoutError(f"{rho.layout} vs {op.layout}")
        m = rho.matrix
    else:
        m = np.asarray(rho, dtype=complex)
        if m.shape != op.shape:
            raise LayoutError(f"state shape {m.shape} vs operator shape {op.shape}")
    o = op.data
    od = o.conj().T
    odo = od @ o
    # sparse @ dense keeps the dense side; (m @ sparse) written as (sparse.T @ m.T).T
    return o @ (od.T @ m.T).T - 0.5 * (odo @ m) - 0.5 * (odo.T @ m.T).T


def build_liouvillian(H: Operator, channels: Sequence[CollapseChannel] = (),
                      check: bool = False, seed: int = 0) -> Liouvillian:
    """Assemble the column-stacked Lindblad super-matrix.

    With ``check=True`` the super-matrix action is compared against the direct
    commutator/dissipator formula on a random matrix.
    """
    herr = H.hermiticity_error()
    if herr > HERMITIAN_TOL:
        raise ValueError(f"Hamiltonian is not Hermitian (max|H - H^dag| = {herr:.3e})")
    channels = tuple(channels)
    for ch in channels:
        if ch.op.layout != H.layout:
            raise LayoutError(f"channel on {ch.op.layout}, Hamiltonian on {H.layout}")
    d = H.layout.total_dim
    eye = sp.identity(d, format="csr", dtype=complex)
    h = H.data
    M = -1j * (_kron(eye, h) - _kron(h.T, eye))
    for ch in channels:
        if ch.rate == 0 or ch.op.nnz == 0:
            continue
        c = ch.op.data
        cdc = (c.conj().T @ c).tocsr()
        M = M + ch.rate * (_kron(c.conj(), c) - 0.5 * _kron(eye, cdc) - 0.5 * _kron(cdc.T, eye))
    M = sp.csr_matrix(M)
    M.eliminate_zeros()
    L = Liouvillian(H.layout, H, channels, M)
    if check:
        rng = np.random.default_rng(seed)
        x = rng.normal(size=(d, d)) + 1j * rng.normal(size=(d, d))
        err = np.abs(L.apply(x) - _direct_action(H, channels, x)).max()
        scale = max(1.0, np.abs(x).max() * L.norm())
        if err > 1e-12 * scale:
            raise AssertionError(f"super-matrix action mismatch {err:.3e}")
    return L


def _direct_action(H: Operator, channels, x: np.ndarray) -> np.ndarray:
    h = H.toarray()
    out = -1j * (h @ x - x @ h)
    for ch in channels:
        out = out + ch.rate * dissipator(ch.op, x)
    return out


# -- steady state --------------------------------------------------------------

def steady_state_residual(L: Liouvillian, rho) -> float:
    """``||L[rho]||_inf / ||L||_inf`` (max-abs entry over induced norm)."""
    m = rho.matrix if isinstance(rho, DensityOperator) else rho
    return float(np.abs(L.super_matrix @ vec(m)).max() / max(L.norm(), 1e-300))


def steady_state(L: Liouvillian, method: str = "auto", tol: float = 1e-10,
                 check_degenerate: bool = True, gmres_restart: int = 100,
                 gmres_maxiter: int = 40) -> DensityOperator:
    """Unique steady state of ``L``.

    ``method`` is ``"direct"`` (sparse LU with one row replaced by the trace
    constraint), ``"iterative"`` (preconditioned GMRES) or ``"auto"``.
    A second, differently-pinned solve detects degenerate kernels.
    """
    if not L.has_dissipation:
        raise DegenerateSteadyStateError("no dissipative channel: steady state is not unique")
    d = L.dim
    if method == "auto":
        method = "direct" if d <= DIRECT_MAX_DIM else "iterative"
    if method == "direct":
        first = _solve_direct(L, 0)
        second = (lambda: _solve_direct(L, d * d - 1)) if check_degenerate else None
    elif method == "iterative":
        solver = _GmresSteadyState(L, gmres_restart, gmres_maxiter)
        first = solver.solve(np.eye(d) / d)
        second = (lambda: solver.solve(np.diag(np.linspace(1.0, 2.0, d)))) if check_degenerate else None
    else:
        raise ValueError(f"unknown method {method!r}")

    res = steady_state_residual(L, first)
    if res > tol:
        raise ConvergenceError("steady-state solve did not reach tolerance", res)
    if second is not None:
        other = second()
        gap = float(np.abs(first - other).max())
        if gap > 1e-6:
            raise DegenerateSteadyStateError(
                f"steady state depends on the pinning constraint (max difference {gap:.3e})")
    rho = first / np.trace(first)
    rho = 0.5 * (rho + rho.conj().T)
    return DensityOperator(L.layout, rho).check()


def _solve_direct(L: Liouvillian, row: int) -> np.ndarray:
    d = L.dim
    n = d * d
    keep = np.ones(n)
    keep[row] = 0.0
    diag_idx = np.arange(d) * (d + 1)
    trace_row = sp.csr_matrix((np.ones(d), (np.full(d, row), diag_idx)), shape=(n, n))
    A = (sp.diags(keep) @ L.super_matrix + trace_row).tocsc()
    rhs = np.zeros(n, dtype=complex)
    rhs[row] = 1.0
    try:
        lu = spla.splu(A)
    except RuntimeError as exc:
        raise DegenerateSteadyStateError(f"trace-pinned Liouvillian is singular: {exc}") from exc
    x = lu.solve(rhs)
    if not np.all(np.isfinite(x)):
        raise DegenerateSteadyStateError("non-finite steady-state solution")
    return unvec(x, d)


class _NoJumpInverse:
    """Exact inverse of ``X -> -i(H_eff X - X H_eff^dag)``.

    Uses an eigendecomposition of ``H_eff`` when it is well conditioned and a
    Schur form with a triangular Sylvester solve otherwise.
    """

    def __init__(self, heff: np.ndarray, cond_max: float = 1e8, shift_rel: float = 1e-6):
        self.d = heff.shape[0]
        lam, V = la.eig(heff)
        # undamped eigenvectors (dark states) make the no-jump generator
        # singular; a small uniform damping keeps the preconditioner finite
        scale = max(1.0, float(np.abs(lam).max(initial=0.0)))
        self.shift = 0.0
        if -lam.imag.max(initial=-1.0) < 1e-10 * scale:
            self.shift = shift_rel * scale
            lam = lam - 0.5j * self.shift
            heff = heff - 0.5j * self.shift * np.eye(self.d)
        cond = np.linalg.cond(V)
        if np.isfinite(cond) and cond < cond_max:
            self.mode = "eig"
            self.V = V
            self.Vh = V.conj().T
            self.Vi = la.inv(V)
            self.Vih = self.Vi.conj().T
            self.den = -1j * (lam[:, None] - lam.conj()[None, :])
        else:
            self.mode = "schur"
            self.T, self.Q = la.schur(heff, output="complex")
            self.Qh = self.Q.conj().T
        log.debug("no-jump preconditioner: %s (cond(V)=%.3g, shift=%g)", self.mode, cond,
                  self.shift)

    def __call__(self, y: np.ndarray) -> np.ndarray:
        Y = unvec(y, self.d)
        if self.mode == "eig":
            Z = (self.Vi @ Y @ self.Vih) / self.den
            X = self.V @ Z @ self.Vh
        else:
            # -i(T X - X T^H) = Y'  =>  T X - X T^H = i Y'
            C = 1j * (self.Qh @ Y @ self.Q)
            Xt, scale, info = la.lapack.ztrsyl(self.T, self.T, C, trana="N", tranb="C", isgn=-1)
            if info < 0:
                raise SolverError(f"ztrsyl failed (info={info})")
            X = self.Q @ (Xt / scale) @ self.Qh
        return vec(X)


class _GmresSteadyState:
    """Solve ``(L + u w^T) x = u`` with ``w = vec(I)``.

    Since ``w^T L = 0``, any solution has unit trace and lies in ker L. The
    preconditioner is the no-jump inverse updated by Sherman-Morrison.
    """

    def __init__(self, L: Liouvillian, restart: int, maxiter: int):
        self.L = L
        self.d = L.dim
        self.n = self.d * self.d
        self.w = vec(np.eye(self.d, dtype=complex))
        self.minv = _NoJumpInverse(L.effective_hamiltonian())
        self.restart = min(restart, self.n)
        self.maxiter = maxiter

    def solve(self, pin: np.ndarray) -> np.ndarray:
        u = vec(np.asarray(pin, dtype=complex))
        u = u / (self.w @ u)
        M, w = self.L.super_matrix, self.w
        A = spla.LinearOperator((self.n, self.n), matvec=lambda x: M @ x + u * (w @ x),
                                dtype=complex)
        mu = self.minv(u)
        s = 1.0 + w @ mu

        def precond(y):
            z = self.minv(y)
            return z - mu * ((w @ z) / s)

        P = spla.LinearOperator((self.n, self.n), matvec=precond, dtype=complex)
        count = [0]

        def cb(_):
            count[0] += 1

        # rtol below ~1e-12 stagnates at round-off and only costs iterations;
        # the true residual is checked by the caller
        x, info = spla.gmres(A, u, M=P, rtol=1e-12, atol=0.0,
                             restart=self.restart, maxiter=self.maxiter,
                             callback=cb, callback_type="pr_norm")
        log.debug("GMRES steady state: info=%d after %d inner iterations", info, count[0])
        if info < 0:
            raise SolverError(f"GMRES breakdown (info={info})")
        return unvec(x, self.d)


# -- time evolution -------------------------------------------------------------

def uniform_grid(t_max: float, step: float) -> np.ndarray:
    """``[0, step, ..., t_max]`` with the end point included."""
    n = int(round(t_max / step))
    if n < 1 or abs(n * step - t_max) > 1e-9 * max(1.0, t_max):
        raise ValueError(f"t_max={t_max} is not a multiple of step={step}")
    return np.linspace(0.0, n * step, n + 1)


def _check_grid(t_grid) -> np.ndarray:
    t = np.asarray(t_grid, dtype=float)
    if t.ndim != 1 or t.size == 0:
        raise ValueError("time grid must be a non-empty 1-D array")
    if t[0] != 0.0:
        raise ValueError("time grid must start at 0")
    if t.size > 1:
        dt = np.diff(t)
        if np.any(dt <= 0):
            raise ValueError("time grid must be strictly increasing")
        if np.abs(dt - dt.mean()).max() > 1e-9 * max(dt.mean(), 1.0):
            raise ValueError("time grid must be uniform")
    return t


def propagate(L: Liouvillian, x0, t_grid, rtol: float = 1e-8,
              atol: float = 1e-10) -> Iterator[tuple[int, np.ndarray]]:
    """Yield ``(k, vec(x(t_k)))`` for ``dx/dt = L x``.

    ``x0`` is any square matrix (not necessarily Hermitian). Uses adaptive
    DOP853 steps with dense output at the grid points, so no trajectory is
    stored.
    """
    for k, y in _propagate_block(L, [x0], t_grid, rtol, atol):
        yield k, y[:, 0]


def _as_matrix(x) -> np.ndarray:
    return x.matrix if isinstance(x, DensityOperator) else np.asarray(x, dtype=complex)


def _propagate_block(L: Liouvillian, x0s, t_grid, rtol, atol):
    """Propagate several initial matrices together; yields ``(k, Y)`` with
    ``Y[:, j] = vec(x_j(t_k))``. One sparse product per stage serves all
    columns, and the step size is shared."""
    t = _check_grid(t_grid)
    Y0 = np.column_stack([vec(_as_matrix(x)).astype(complex) for x in x0s])
    n, m = Y0.shape
    if n != L.dim ** 2:
        raise LayoutError(f"initial state has {n} entries, Liouville space has {L.dim ** 2}")
    yield 0, Y0
    if t.size == 1:
        return
    M = L.super_matrix
    if M.nnz == 0:
        for k in range(1, t.size):
            yield k, Y0
        return
    solver = DOP853(lambda _t, v: (M @ v.reshape(n, m)).ravel(), 0.0, Y0.ravel(), t[-1],
                    rtol=rtol, atol=atol, max_step=STABLE_STEP / L.norm())
    k = 1
    eps = 1e-12 * max(1.0, t[-1])
    while k < t.size:
        msg = solver.step()
        if solver.status == "failed":
            raise StiffnessError(solver.t, msg or "step failed")
        interp = solver.dense_output()
        while k < t.size and t[k] <= solver.t + eps:
            yield k, interp(min(t[k], solver.t)).reshape(n, m)
            k += 1


def evolve(L: Liouvillian, rho0, t_grid, rtol: float = 1e-8,
           atol: float = 1e-10) -> list[DensityOperator]:
    """States at every grid time (keeps the full trajectory in memory)."""
    d = L.dim
    return [DensityOperator(L.layout, unvec(v, d))
            for _, v in propagate(L, rho0, t_grid, rtol, atol)]


def evolve_expect(L: Liouvillian, x0, t_grid, ops: Sequence[Operator],
                  rtol: float = 1e-8, atol: float = 1e-10) -> np.ndarray:
    """``Tr(op x(t_k))`` for each operator, shape ``(len(ops), len(t_grid))``."""
    return evolve_expect_many(L, [x0], t_grid, ops, rtol, atol)[0]


def evolve_expect_many(L: Liouvillian, x0s: Sequence, t_grid, ops: Sequence[Operator],
                       rtol: float = 1e-8, atol: float = 1e-10) -> np.ndarray:
    """Batched :func:`evolve_expect`, shape ``(len(x0s), len(ops), len(t_grid))``.

    All initial matrices share one integration, which is cheaper than
    separate runs on large Liouville spaces.
    """
    t = _check_grid(t_grid)
    if len(x0s) == 0:
        raise ValueError("need at least one initial matrix")
    # Tr(A X) = vec(A^T) . vec(X)
    rows = np.array([vec(op.data.T.toarray()) for op in ops])
    out = np.empty((len(x0s), len(ops), t.size), dtype=complex)
    for k, Y in _propagate_block(L, x0s, t, rtol, atol):
        out[:, :, k] = (rows @ Y).T
    return out

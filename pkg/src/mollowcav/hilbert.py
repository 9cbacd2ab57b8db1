"""
Composite Hilbert spaces and sparse operators.

A :class:`SpaceLayout` fixes the ordered tensor factors of a composite space
(e.g. ``atom ⊗ red ⊗ blue``); :class:`Operator` pairs a CSR matrix with the
layout it acts on. Embedding follows the layout order, so the first factor is
the most significant index in the Kronecker product.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from numbers import Number
from typing import Iterable, Sequence

import numpy as np
import scipy.sparse as sp

__all__ = [
    "DROP_TOL",
    "LayoutError",
    "InvalidStateError",
    "SpaceLayout",
    "Operator",
    "DensityOperator",
    "annihilation",
    "number",
    "identity",
    "transition",
    "embed",
    "expectation",
    "basis_state",
    "maximally_mixed",
]

DROP_TOL = 1e-14


class LayoutError(ValueError):
    """Operands live on different or incompatible spaces."""


class InvalidStateError(ValueError):
    """A matrix fails the density-operator invariants."""


@dataclass(frozen=True)
class SpaceLayout:
    """Ordered list of ``(label, dim)`` tensor factors."""

    subsystems: tuple[tuple[str, int], ...]

    def __init__(self, subsystems: Iterable[tuple[str, int]]):
        subs = tuple((str(label), int(dim)) for label, dim in subsystems)
        if not subs:
            raise LayoutError("a layout needs at least one subsystem")
        labels = [s[0] for s in subs]
        if len(set(labels)) != len(labels):
            raise LayoutError(f"duplicate subsystem labels in {labels}")
        for label, dim in subs:
            if dim < 1:
                raise LayoutError(f"subsystem {label!r} has non-positive dim {dim}")
        object.__setattr__(self, "subsystems", subs)

    @classmethod
    def single(cls, label: str, dim: int) -> "SpaceLayout":
        return cls([(label, dim)])

    @property
    def labels(self) -> tuple[str, ...]:
        return tuple(s[0] for s in self.subsystems)

    @property
    def dims(self) -> tuple[int, ...]:
        return tuple(s[1] for s in self.subsystems)

    @property
    def total_dim(self) -> int:
        return int(np.prod(self.dims))

    def index(self, label: str) -> int:
        try:
            return self.labels.index(label)
        except ValueError:
            raise LayoutError(f"unknown subsystem {label!r}; have {self.labels}") from None

    def dim(self, label: str) -> int:
        return self.dims[self.index(label)]

    def __repr__(self) -> str:
        inner = " ⊗ ".join(f"{l}[{d}]" for l, d in self.subsystems)
        return f"SpaceLayout({inner})"


def _clean(mat) -> sp.csr_matrix:
    m = sp.csr_matrix(mat, dtype=complex)
    if m.nnz:
        m.data[np.abs(m.data) <= DROP_TOL] = 0.0
        m.eliminate_zeros()
    m.sort_indices()
    return m


class Operator:
    """Sparse complex matrix acting on a :class:`SpaceLayout`.

    Operators are treated as immutable; arithmetic returns new objects.
    """

    __slots__ = ("layout", "data")

    def __init__(self, layout: SpaceLayout, data):
        n = layout.total_dim
        mat = _clean(data)
        if mat.shape != (n, n):
            raise LayoutError(f"matrix shape {mat.shape} does not match {layout}")
        self.layout = layout
        self.data = mat

    # -- algebra ---------------------------------------------------------
    def _check(self, other: "Operator"):
        if not isinstance(other, Operator):
            return NotImplemented
        if other.layout != self.layout:
            raise LayoutError(f"{self.layout} vs {other.layout}")
        return None

    def __add__(self, other):
        if isinstance(other, Number) and other == 0:
            return self
        if self._check(other) is NotImplemented:
            return NotImplemented
        return Operator(self.layout, self.data + other.data)

    __radd__ = __add__

    def __sub__(self, other):
        if self._check(other) is NotImplemented:
            return NotImplemented
        return Operator(self.layout, self.data - other.data)

    def __neg__(self):
        return Operator(self.layout, -self.data)

    def __mul__(self, scalar):
        if not isinstance(scalar, Number):
            return NotImplemented
        return Operator(self.layout, self.data * scalar)

    __rmul__ = __mul__

    def __truediv__(self, scalar):
        if not isinstance(scalar, Number):
            return NotImplemented
        return Operator(self.layout, self.data / scalar)

    def __matmul__(self, other):
        if self._check(other) is NotImplemented:
            return NotImplemented
        return Operator(self.layout, self.data @ other.data)

    def dag(self) -> "Operator":
        return Operator(self.layout, self.data.conj().T)

    # -- inspection ------------------------------------------------------
    @property
    def shape(self) -> tuple[int, int]:
        return self.data.shape

    @property
    def nnz(self) -> int:
        return self.data.nnz

    def toarray(self) -> np.ndarray:
        return self.data.toarray()

    def hermiticity_error(self) -> float:
        diff = self.data - self.data.conj().T
        return float(np.abs(diff.data).max()) if diff.nnz else 0.0

    def is_hermitian(self, tol: float = 1e-10) -> bool:
        return self.hermiticity_error() <= tol

    def allclose(self, other: "Operator", atol: float = 0.0) -> bool:
        self._check(other)
        diff = self.data - other.data
        return (float(np.abs(diff.data).max()) if diff.nnz else 0.0) <= atol

    def __repr__(self) -> str:
        return f"Operator({self.layout}, nnz={self.nnz})"


@dataclass(frozen=True)
class DensityOperator:
    """Dense state matrix on a layout.

    Construction does not validate; call :meth:`check` (the solvers do).
    """

    layout: SpaceLayout
    matrix: np.ndarray = field(repr=False)

    def __post_init__(self):
        m = np.asarray(self.matrix, dtype=complex)
        n = self.layout.total_dim
        if m.shape != (n, n):
            raise LayoutError(f"state shape {m.shape} does not match {self.layout}")
        m.setflags(write=False)
        object.__setattr__(self, "matrix", m)

    def hermiticity_error(self) -> float:
        return float(np.abs(self.matrix - self.matrix.conj().T).max())

    def trace_error(self) -> float:
        return float(abs(np.trace(self.matrix) - 1.0))

    def min_eigenvalue(self) -> float:
        herm = 0.5 * (self.matrix + self.matrix.conj().T)
        return float(np.linalg.eigvalsh(herm).min())

    def check(self, herm_tol: float = 1e-10, trace_tol: float = 1e-10, eig_tol: float = 1e-8):
        """Raise :class:`InvalidStateError` if any density-operator invariant fails."""
        h = self.hermiticity_error()
        if h > herm_tol:
            raise InvalidStateError(f"not Hermitian: max|rho - rho^dag| = {h:.3e}")
        t = self.trace_error()
        if t > trace_tol:
            raise InvalidStateError(f"trace off by {t:.3e}")
        e = self.min_eigenvalue()
        if e < -eig_tol:
            raise InvalidStateError(f"negative eigenvalue {e:.3e}")
        return self

    def populations(self) -> np.ndarray:
        return np.real(np.diag(self.matrix)).copy()


# -- constructors ------------------------------------------------------------

def annihilation(n_max: int, label: str = "mode") -> Operator:
    """Lowering operator on the Fock basis ``{0, ..., n_max}``."""
    n_max = int(n_max)
    if n_max < 1:
        raise ValueError("n_max must be >= 1 (a single Fock state has no dynamics)")
    mat = sp.diags(np.sqrt(np.arange(1, n_max + 1, dtype=float)), 1, format="csr")
    return Operator(SpaceLayout.single(label, n_max + 1), mat)


def number(n_max: int, label: str = "mode") -> Operator:
    a = annihilation(n_max, label)
    return a.dag() @ a


def identity(layout: SpaceLayout) -> Operator:
    return Operator(layout, sp.identity(layout.total_dim, format="csr"))


def _local_matrix(op, dim: int) -> sp.csr_matrix:
    mat = op.data if isinstance(op, Operator) else sp.csr_matrix(op, dtype=complex)
    if mat.shape != (dim, dim):
        raise LayoutError(f"local operator shape {mat.shape} != ({dim}, {dim})")
    return mat


def embed(op, layout: SpaceLayout, label: str) -> Operator:
    """Kronecker-embed a single-subsystem operator into ``layout``.

    ``op`` may be an :class:`Operator` on a one-factor layout or any square
    matrix of the subsystem dimension.
    """
    k = layout.index(label)
    local = _local_matrix(op, layout.dims[k])
    left = int(np.prod(layout.dims[:k]))
    right = int(np.prod(layout.dims[k + 1:]))
    mat = local
    if left > 1:
        mat = sp.kron(sp.identity(left, format="csr"), mat, format="csr")
    if right > 1:
        mat = sp.kron(mat, sp.identity(right, format="csr"), format="csr")
    return Operator(layout, mat)


def transition(layout: SpaceLayout, subsystem_label: str, from_state: int,
               to_state: int) -> Operator:
    """``|to><from|`` on one subsystem, identity on the rest."""
    dim = layout.dim(subsystem_label)
    for s in (from_state, to_state):
        if not 0 <= int(s) < dim:
            raise IndexError(f"state {s} out of range for {subsystem_label!r} (dim {dim})")
    local = sp.csr_matrix(([1.0], ([int(to_state)], [int(from_state)])), shape=(dim, dim))
    return embed(local, layout, subsystem_label)


def basis_state(layout: SpaceLayout, indices: Sequence[int]) -> DensityOperator:
    """Pure product state ``|i1, i2, ...><i1, i2, ...|``."""
    if len(indices) != len(layout.dims):
        raise LayoutError("one index per subsystem required")
    flat = int(np.ravel_multi_index(tuple(int(i) for i in indices), layout.dims))
    rho = np.zeros((layout.total_dim, layout.total_dim), dtype=complex)
    rho[flat, flat] = 1.0
    return DensityOperator(layout, rho)


def maximally_mixed(layout: SpaceLayout) -> DensityOperator:
    n = layout.total_dim
    return DensityOperator(layout, np.eye(n, dtype=complex) / n)


def expectation(rho: DensityOperator, op: Operator) -> complex:
    """``Tr(op rho)`` as a complex number (the imaginary part is kept)."""
    if rho.layout != op.layout:
        raise LayoutError(f"{rho.layout} vs {op.layout}")
    # Tr(A rho) = sum_ij A_ij rho_ji
    a = op.data.tocoo()
    return complex(np.sum(a.data * rho.matrix[a.col, a.row]))

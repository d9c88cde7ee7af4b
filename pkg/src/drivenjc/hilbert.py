"""Operators and states on the truncated cavity (x) qubit Hilbert space.

The cavity keeps ``n_fock`` Fock levels |0>..|n_fock-1|; the qubit has the
two levels |g>, |e>.  Basis ordering is cavity-major: the joint state
|n> (x) |q> sits at index ``2*n + q`` with q = 0 for |g> and q = 1 for |e>.

Operators and state vectors are plain complex ndarrays.  Everything here is
immutable after construction and safe to share across threads or processes.
"""

import math
import warnings
from dataclasses import dataclass

import numpy as np

from .exceptions import DimensionError, TruncationWarning

N_QUBIT = 2


@dataclass(frozen=True)
class HilbertDims:
    """Dimensions of the joint space: ``n_fock`` cavity levels times a qubit."""

    n_fock: int
    n_qubit: int = N_QUBIT

    def __post_init__(self):
        if self.n_fock < 2:
            raise DimensionError(f"n_fock must be >= 2, got {self.n_fock}")
        if self.n_qubit != N_QUBIT:
            raise DimensionError(f"n_qubit is fixed at {N_QUBIT}, got {self.n_qubit}")

    @property
    def total(self) -> int:
        return self.n_fock * self.n_qubit

    def index(self, n: int, q: int) -> int:
        """Joint basis index of |n> (x) |q| (q = 0 ground, 1 excited)."""
        return self.n_qubit * n + q


def annihilation(n_fock: int) -> np.ndarray:
    """Photon annihilation operator: <m-1|a|m> = sqrt(m)."""
    if n_fock < 2:
        raise DimensionError(f"n_fock must be >= 2, got {n_fock}")
    return np.diag(np.sqrt(np.arange(1, n_fock, dtype=float)), 1).astype(complex)


def number(n_fock: int) -> np.ndarray:
    """Photon number operator a^dag a."""
    if n_fock < 2:
        raise DimensionError(f"n_fock must be >= 2, got {n_fock}")
    return np.diag(np.arange(n_fock, dtype=float)).astype(complex)


def qubit_ops() -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Qubit lowering, raising, and inversion operators.

    Returns (sigma_minus, sigma_plus, sigma_z) in the {|g>, |e>} basis, with
    sigma_z = 2 sigma_plus sigma_minus - 1, so sigma_z|g> = -|g>.
    """
    sm = np.array([[0, 1], [0, 0]], dtype=complex)
    sp = sm.conj().T
    sz = 2 * sp @ sm - np.eye(2, dtype=complex)
    return sm, sp, sz


def tensor_product(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Kronecker product of two square operators, first factor major."""
    a = np.asarray(a)
    b = np.asarray(b)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise DimensionError(f"first operand is not square: shape {a.shape}")
    if b.ndim != 2 or b.shape[0] != b.shape[1]:
        raise DimensionError(f"second operand is not square: shape {b.shape}")
    return np.kron(a, b)


def cavity_operator(op: np.ndarray, dims: HilbertDims) -> np.ndarray:
    """Promote a cavity-only operator to the joint space."""
    if op.shape != (dims.n_fock, dims.n_fock):
        raise DimensionError(
            f"cavity operator shape {op.shape} does not match n_fock={dims.n_fock}")
    return np.kron(op, np.eye(dims.n_qubit, dtype=complex))


def qubit_operator(op: np.ndarray, dims: HilbertDims) -> np.ndarray:
    """Promote a qubit-only operator to the joint space."""
    if op.shape != (dims.n_qubit, dims.n_qubit):
        raise DimensionError(f"qubit operator shape {op.shape} is not 2x2")
    return np.kron(np.eye(dims.n_fock, dtype=complex), op)


def fock_state(m: int, n_fock: int) -> np.ndarray:
    """Fock state |m> as a length-n_fock vector."""
    if not 0 <= m < n_fock:
        raise DimensionError(f"Fock index {m} outside truncation 0..{n_fock - 1}")
    vec = np.zeros(n_fock, dtype=complex)
    vec[m] = 1.0
    return vec


def coherent_state(alpha: complex, n_fock: int) -> np.ndarray:
    """Truncated coherent state |alpha>.

    Amplitudes c_m = exp(-|alpha|^2/2) alpha^m / sqrt(m!) for m < n_fock.
    The vector's norm is <= 1; the deficit 1 - ||psi||^2 is the truncation
    loss (see :func:`truncation_loss`).  Warns when |alpha|^2 > n_fock/2,
    where the Poisson bulk starts to brush the truncation edge.
    """
    if n_fock < 2:
        raise DimensionError(f"n_fock must be >= 2, got {n_fock}")
    alpha = complex(alpha)
    if abs(alpha) ** 2 > n_fock / 2:
        warnings.warn(
            f"|alpha|^2 = {abs(alpha)**2:.2f} exceeds n_fock/2 = {n_fock / 2}; "
            "coherent state is significantly truncated",
            TruncationWarning, stacklevel=2)
    amps = np.empty(n_fock, dtype=complex)
    amps[0] = math.exp(-abs(alpha) ** 2 / 2)
    for m in range(1, n_fock):
        amps[m] = amps[m - 1] * alpha / math.sqrt(m)
    return amps


def truncation_loss(alpha: complex, n_fock: int) -> float:
    """Probability weight of |alpha> beyond the retained Fock levels."""
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", TruncationWarning)
        amps = coherent_state(alpha, n_fock)
    return max(0.0, 1.0 - float(np.vdot(amps, amps).real))


def ground_state(dims: HilbertDims) -> np.ndarray:
    """Joint state |n=0> (x) |g>."""
    vec = np.zeros(dims.total, dtype=complex)
    vec[dims.index(0, 0)] = 1.0
    return vec

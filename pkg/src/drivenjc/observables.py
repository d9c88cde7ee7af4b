"""Expectation values, reduced states, entanglement entropy, photon statistics."""

from dataclasses import dataclass

import numpy as np

from .exceptions import DimensionError, DomainError, InvalidStateError

_CLIP_LIMIT = 1e-8  # eigenvalue clipping beyond this is an error, below is noise


def expectation(rho: np.ndarray, op: np.ndarray) -> complex:
    """Tr(rho op)."""
    rho = np.asarray(rho)
    op = np.asarray(op)
    if rho.shape != op.shape or rho.ndim != 2 or rho.shape[0] != rho.shape[1]:
        raise DimensionError(
            f"incompatible shapes: rho {rho.shape}, op {op.shape}")
    # Tr(AB) as an elementwise sum, avoids forming the product
    return complex(np.sum(rho.T * op))


def _split_joint(rho: np.ndarray):
    rho = np.asarray(rho)
    if rho.ndim != 2 or rho.shape[0] != rho.shape[1] or rho.shape[0] % 2:
        raise DimensionError(f"not a joint cavity-qubit matrix: shape {rho.shape}")
    n_fock = rho.shape[0] // 2
    return rho.reshape(n_fock, 2, n_fock, 2), n_fock


def partial_trace(rho: np.ndarray, keep: str) -> np.ndarray:
    """Reduced density matrix of the kept subsystem ('cavity' or 'qubit')."""
    blocks, _ = _split_joint(rho)
    if keep == "cavity":
        return blocks.trace(axis1=1, axis2=3)
    if keep == "qubit":
        return blocks.trace(axis1=0, axis2=2)
    raise ValueError(f"keep must be 'cavity' or 'qubit', got {keep!r}")


@dataclass(frozen=True)
class QubitReduced:
    """Reduced qubit state: occupations and the g-e coherence."""

    rho_gg: float
    rho_ee: float
    rho_ge: complex

    def __post_init__(self):
        tol = 1e-10
        if abs(self.rho_gg + self.rho_ee - 1.0) > tol:
            raise InvalidStateError(
                f"occupations sum to {self.rho_gg + self.rho_ee}, not 1")
        if not (-tol <= self.rho_gg <= 1 + tol and -tol <= self.rho_ee <= 1 + tol):
            raise InvalidStateError(
                f"occupations out of [0, 1]: {self.rho_gg}, {self.rho_ee}")
        if abs(self.rho_ge) ** 2 > self.rho_gg * self.rho_ee + tol:
            raise InvalidStateError(
                f"coherence |{self.rho_ge}|^2 exceeds rho_gg*rho_ee")

    @classmethod
    def from_matrix(cls, rho_q: np.ndarray) -> "QubitReduced":
        rho_q = np.asarray(rho_q)
        if rho_q.shape != (2, 2):
            raise DimensionError(f"qubit matrix must be 2x2, got {rho_q.shape}")
        return cls(rho_gg=float(rho_q[0, 0].real), rho_ee=float(rho_q[1, 1].real),
                   rho_ge=complex(rho_q[0, 1]))


def qubit_reduced(rho: np.ndarray) -> QubitReduced:
    """Trace out the cavity of a joint state."""
    return QubitReduced.from_matrix(partial_trace(rho, "qubit"))


def entanglement_entropy(rq: QubitReduced) -> float:
    """Von Neumann entropy of the reduced qubit state (natural log).

    Uses the closed-form eigenvalues
    lambda_{1,2} = (1 +- sqrt((rho_gg - rho_ee)^2 + 4 |rho_ge|^2)) / 2,
    clipped to [0, 1] to absorb 1e-10-level numerical noise.
    """
    root = np.sqrt((rq.rho_gg - rq.rho_ee) ** 2 + 4 * abs(rq.rho_ge) ** 2)
    lams = np.array([(1 + root) / 2, (1 - root) / 2])
    clipped = np.clip(lams, 0.0, 1.0)
    if np.max(np.abs(clipped - lams)) > _CLIP_LIMIT:
        raise InvalidStateError(f"qubit eigenvalues {lams} outside [0, 1]")
    out = 0.0
    for lam in clipped:
        if lam > 0.0:
            out -= lam * np.log(lam)
    return float(out)


def g2_zero(rho_c: np.ndarray) -> float:
    """Zero-delay photon autocorrelation <n(n-1)> / <n>^2.

    Takes a cavity-only density matrix (reduce joint states with
    :func:`partial_trace` first); only the photon-number populations enter.
    """
    rho_c = np.asarray(rho_c)
    if rho_c.ndim != 2 or rho_c.shape[0] != rho_c.shape[1]:
        raise DimensionError(f"not a density matrix: shape {rho_c.shape}")
    pops = np.real(np.diag(rho_c))
    m = np.arange(rho_c.shape[0])
    mean_n = float(np.dot(m, pops))
    if mean_n <= 1e-12:
        raise DomainError(f"g2(0) undefined: <n> = {mean_n:.2e}")
    return float(np.dot(m * (m - 1), pops)) / mean_n ** 2


def purity(rho: np.ndarray) -> float:
    """Tr(rho^2)."""
    rho = np.asarray(rho)
    return float(np.sum(rho * rho.T).real)

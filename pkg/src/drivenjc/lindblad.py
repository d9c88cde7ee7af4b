"""Liouvillian assembly and steady states of the driven qubit-cavity model.

The master equation in the frame rotating with the drive reads

    rho_dot = i dwc [ad a, rho] + i dwq [sp sm, rho]
              + g [ad sm - a sp, rho]
              - i [eps_d ad + conj(eps_d) a, rho]
              + kappa (2 a rho ad - rho ad a - ad a rho)
              + (gamma/2) (2 sm rho sp - rho sp sm - sp sm rho)

with dwc = omega_drive - omega_cavity and dwq = omega_drive - omega_qubit.
The drive enters through the Hamiltonian term eps_d ad + conj(eps_d) a, so
the weak-drive cavity amplitude is <a> = -i eps_d / (kappa - i dwc) and the
phase convention matches the mean-field solvers in :mod:`.semiclassical`.
Multiplying eps_d by a phase rotates every field distribution rigidly and
leaves all modulus observables unchanged.

Density matrices are column-vectorized, vec index = column * D + row, so
vec(A rho B) = kron(B.T, A) vec(rho).
"""

import struct
import warnings
from dataclasses import dataclass, replace

import numpy as np
import scipy.sparse as sp
import scipy.sparse.linalg as spla

from .exceptions import (ConvergenceError, DimensionError, DomainError,
                         InvalidStateError, MultiplicityError)
from .hilbert import HilbertDims, annihilation, qubit_ops

_LIOU_MAGIC = b"LIOU"


@dataclass(frozen=True)
class ModelParams:
    """Physical rates and detunings, all in one unit system (gamma = 1 here).

    kappa is the cavity half-width (photon loss rate 2*kappa), gamma the
    qubit spontaneous-emission rate, g the dipole coupling, eps_d the
    complex drive amplitude.
    """

    g: float
    kappa: float
    gamma: float
    delta_omega_c: float
    delta_omega_q: float
    eps_d: complex

    def __post_init__(self):
        if self.kappa <= 0:
            raise DomainError(f"kappa must be > 0, got {self.kappa}")
        if self.gamma < 0:
            raise DomainError(f"gamma must be >= 0, got {self.gamma}")
        if self.g < 0:
            raise DomainError(f"g must be >= 0, got {self.g}")

    @property
    def delta(self) -> float:
        """Qubit-cavity detuning |omega_c - omega_q|."""
        return abs(self.delta_omega_q - self.delta_omega_c)

    @property
    def cooperativity(self) -> float:
        """C = g^2 / (kappa * gamma)."""
        if self.gamma <= 0:
            raise DomainError("cooperativity undefined for gamma = 0")
        return self.g ** 2 / (self.kappa * self.gamma)

    @classmethod
    def dispersive(cls, g, kappa, gamma, delta, delta_omega_c, eps_d):
        """Build params with the qubit a distance ``delta`` below the cavity.

        This sign places the dressed cavity resonance at
        delta_omega_c = +g^2/delta, the convention used throughout the
        mean-field solvers (the qubit-ground dispersive shift pulls the
        cavity up).  A drive-frequency scan at fixed qubit-cavity detuning
        is a scan of delta_omega_c with this constructor.
        """
        if delta < 0:
            raise DomainError(f"delta must be >= 0, got {delta}")
        return cls(g=g, kappa=kappa, gamma=gamma, delta_omega_c=delta_omega_c,
                   delta_omega_q=delta_omega_c + delta, eps_d=eps_d)

    def with_drive(self, eps_d) -> "ModelParams":
        return replace(self, eps_d=eps_d)


@dataclass(frozen=True)
class Liouvillian:
    """Sparse superoperator on column-vectorized density matrices."""

    dims: HilbertDims
    matrix: sp.csr_matrix

    @property
    def size(self) -> int:
        return self.matrix.shape[0]


def _joint_ops(dims: HilbertDims):
    a_c = sp.csr_matrix(annihilation(dims.n_fock))
    sm_q, sp_q, _ = qubit_ops()
    eye_c = sp.identity(dims.n_fock, format="csr")
    eye_q = sp.identity(dims.n_qubit, format="csr")
    a = sp.kron(a_c, eye_q, format="csr")
    s_m = sp.kron(eye_c, sp.csr_matrix(sm_q), format="csr")
    return a, s_m


def build_liouvillian(p: ModelParams, dims: HilbertDims) -> Liouvillian:
    """Assemble the sparse Liouvillian of the master equation above."""
    a, s_m = _joint_ops(dims)
    ad = a.conj().T.tocsr()
    s_p = s_m.conj().T.tocsr()
    n_op = (ad @ a).tocsr()
    pe = (s_p @ s_m).tocsr()
    eye = sp.identity(dims.total, format="csr")

    # anti-Hermitian generator G of the commutator part: rho_dot ⊇ [G, rho]
    eps = complex(p.eps_d)
    G = (1j * p.delta_omega_c) * n_op \
        + (1j * p.delta_omega_q) * pe \
        + p.g * (ad @ s_m - a @ s_p) \
        + (-1j) * (eps * ad + np.conj(eps) * a)

    L = sp.kron(eye, G, format="csr") - sp.kron(G.T, eye, format="csr")
    L = L + p.kappa * (2 * sp.kron(a.conj(), a, format="csr")
                       - sp.kron(n_op.T, eye, format="csr")
                       - sp.kron(eye, n_op, format="csr"))
    if p.gamma > 0:
        L = L + (p.gamma / 2) * (2 * sp.kron(s_m.conj(), s_m, format="csr")
                                 - sp.kron(pe.T, eye, format="csr")
                                 - sp.kron(eye, pe, format="csr"))
    return Liouvillian(dims=dims, matrix=L.tocsr())


def vectorize(rho: np.ndarray) -> np.ndarray:
    """Column-stack a density matrix."""
    return np.asarray(rho).reshape(-1, order="F")


def unvectorize(vec: np.ndarray) -> np.ndarray:
    d = int(round(np.sqrt(vec.size)))
    if d * d != vec.size:
        raise DimensionError(f"vector of length {vec.size} is not a square matrix")
    return vec.reshape((d, d), order="F")


def residual_norm(L: Liouvillian, rho: np.ndarray) -> float:
    """2-norm of L applied to the vectorized density matrix."""
    rho = np.asarray(rho)
    d = L.dims.total
    if rho.shape != (d, d):
        raise DimensionError(f"rho shape {rho.shape} does not match dims {d}x{d}")
    return float(np.linalg.norm(L.matrix @ vectorize(rho)))


def check_density_matrix(rho: np.ndarray, herm_tol=1e-10, trace_tol=1e-10,
                         eig_floor=-1e-8, on_negative="warn") -> None:
    """Validate Hermiticity, unit trace, and positivity up to tolerances.

    Negativity below ``eig_floor`` warns by default; pass
    ``on_negative='raise'`` to escalate.
    """
    herm = float(np.max(np.abs(rho - rho.conj().T)))
    if herm > herm_tol:
        raise InvalidStateError(f"Hermiticity violation {herm:.2e} > {herm_tol:.0e}")
    tr = complex(np.trace(rho))
    if abs(tr - 1.0) > trace_tol:
        raise InvalidStateError(f"trace {tr} deviates from 1 beyond {trace_tol:.0e}")
    min_eig = float(np.linalg.eigvalsh(0.5 * (rho + rho.conj().T)).min())
    if min_eig < eig_floor:
        msg = f"minimum eigenvalue {min_eig:.2e} below floor {eig_floor:.0e}"
        if on_negative == "raise":
            raise InvalidStateError(msg)
        warnings.warn(msg, stacklevel=2)


def _trace_indices(d: int) -> np.ndarray:
    # vec indices of rho's diagonal under column stacking
    return np.arange(d) * (d + 1)


def _solve_trace_replaced(L: sp.csr_matrix, d: int):
    """Direct solve: replace one population row with the trace constraint.

    Trace preservation makes exactly the population rows (vec indices
    k*(d+1)) linearly dependent, so only one of those may be replaced.
    Among them the row with the largest |diagonal| is chosen (tie: lowest
    index), and the constraint row is scaled to the magnitude of L to keep
    the factorization balanced.
    """
    m = L.shape[0]
    tr_idx = _trace_indices(d)
    diag = np.abs(L.diagonal())
    row = int(tr_idx[int(np.argmax(diag[tr_idx]))])
    weight = float(diag.max()) or 1.0

    mask = np.ones(m)
    mask[row] = 0.0
    constraint = sp.coo_matrix(
        (np.full(d, weight), (np.full(d, row), tr_idx)), shape=(m, m))
    A = (sp.diags(mask) @ L + constraint).tocsc()
    b = np.zeros(m, dtype=complex)
    b[row] = weight

    lu = spla.splu(A)
    x = lu.solve(b)
    for _ in range(3):  # iterative refinement on the factored system
        r = b - A @ x
        if np.linalg.norm(r) <= 1e-14 * weight:
            break
        x = x + lu.solve(r)
    return x


def _solve_eigs(L: sp.csr_matrix, check_multiplicity: bool, tol_scale: float):
    """Fallback: smallest-magnitude eigenpair by shift-invert iteration."""
    m = L.shape[0]
    k = 2 if check_multiplicity else 1
    sigma = 1e-10 * tol_scale
    vals, vecs = spla.eigs(L.tocsc(), k=k, sigma=sigma, which="LM")
    order = np.argsort(np.abs(vals))
    if check_multiplicity and len(vals) > 1:
        second = abs(vals[order[1]])
        if second <= 1e-9 * tol_scale:
            raise MultiplicityError(
                f"steady-state null space is degenerate: second eigenvalue "
                f"magnitude {second:.2e} vs scale {tol_scale:.2e}")
    return vecs[:, order[0]]


def steady_state(L: Liouvillian, residual_tol: float = 1e-9,
                 ensure_unique: bool = False) -> np.ndarray:
    """Solve L vec(rho) = 0 for the trace-one steady-state density matrix.

    The returned matrix is Hermitized, trace-normalized, and satisfies
    ``residual_norm(L, rho) <= residual_tol``; otherwise a
    :class:`ConvergenceError` carrying the residual is raised.  With
    ``ensure_unique=True`` the null space is probed by shift-invert
    iteration and a degenerate kernel raises :class:`MultiplicityError`.
    """
    d = L.dims.total
    mat = L.matrix
    scale = float(np.abs(mat.diagonal()).max()) or 1.0

    if ensure_unique:
        _solve_eigs(mat, check_multiplicity=True, tol_scale=scale)

    def finish(x):
        rho = unvectorize(x)
        rho = 0.5 * (rho + rho.conj().T)
        tr = float(np.trace(rho).real)
        if abs(tr) < 1e-300:
            return None, np.inf
        rho = rho / tr
        return rho, residual_norm(L, rho)

    try:
        rho, res = finish(_solve_trace_replaced(mat, d))
    except RuntimeError:  # singular factorization
        rho, res = None, np.inf
    if rho is None or res > residual_tol:
        vec = _solve_eigs(mat, check_multiplicity=False, tol_scale=scale)
        rho2, res2 = finish(vec)
        if rho2 is not None and res2 < res:
            rho, res = rho2, res2
    if rho is None or res > residual_tol:
        raise ConvergenceError(
            f"steady-state residual {res:.3e} exceeds {residual_tol:.0e}",
            residual=res)
    check_density_matrix(rho)
    return rho


def mean_photon_number(rho: np.ndarray, dims: HilbertDims) -> float:
    """<ad a> from the joint density matrix (diagonal sum, no matmul)."""
    pops = np.real(np.diag(rho)).reshape(dims.n_fock, dims.n_qubit).sum(axis=1)
    return float(np.dot(np.arange(dims.n_fock), pops))


def default_start_n_fock(p: ModelParams) -> int:
    """Initial truncation guess for :func:`steady_state_auto`.

    Dispersive runs scale with the bright-branch photon number
    delta^2/(4 g^2); otherwise the linear-cavity drive estimate is used.
    """
    if p.g > 0 and p.delta > 0:
        n_scale = p.delta ** 2 / (4 * p.g ** 2)
        return max(20, int(np.ceil(8 * n_scale)))
    return max(20, int(np.ceil(4 * (abs(p.eps_d) / p.kappa) ** 2)))


def steady_state_auto(p: ModelParams, n_start: int | None = None,
                      rel_tol: float = 1e-3, max_n_fock: int = 1024,
                      residual_tol: float = 1e-9):
    """Steady state with truncation doubled until <ad a> is converged.

    Returns ``(rho, dims, history)`` where ``history`` is the list of
    (n_fock, mean_photon_number) pairs visited.  The accepted truncation N
    satisfies |n(2N) - n(N)| < rel_tol * max(n(N), 1e-12); the density
    matrix returned is the one computed at N.
    """
    n = n_start if n_start is not None else default_start_n_fock(p)
    n = max(2, int(n))
    history = []
    dims = HilbertDims(n)
    rho = steady_state(build_liouvillian(p, dims), residual_tol=residual_tol)
    history.append((n, mean_photon_number(rho, dims)))
    while True:
        n2 = 2 * history[-1][0]
        if n2 > max_n_fock:
            raise ConvergenceError(
                f"truncation not converged below n_fock={max_n_fock}: "
                f"history={history}")
        dims2 = HilbertDims(n2)
        rho2 = steady_state(build_liouvillian(p, dims2), residual_tol=residual_tol)
        n_prev = history[-1][1]
        n_curr = mean_photon_number(rho2, dims2)
        history.append((n2, n_curr))
        if abs(n_curr - n_prev) < rel_tol * max(abs(n_prev), 1e-12):
            return rho, dims, history
        rho, dims = rho2, dims2


def save_liouvillian(L: Liouvillian, path) -> None:
    """Dump the sparse matrix in a documented little-endian COO format.

    Layout: magic b'LIOU', uint32 version (1), uint64 matrix dimension,
    uint64 n_fock, uint64 nnz, then nnz records of
    (uint64 row, uint64 col, float64 real, float64 imag).
    """
    coo = L.matrix.tocoo()
    rec = np.empty(coo.nnz, dtype=np.dtype(
        [("row", "<u8"), ("col", "<u8"), ("re", "<f8"), ("im", "<f8")]))
    rec["row"] = coo.row
    rec["col"] = coo.col
    rec["re"] = coo.data.real
    rec["im"] = coo.data.imag
    with open(path, "wb") as fh:
        fh.write(_LIOU_MAGIC)
        fh.write(struct.pack("<IQQQ", 1, L.matrix.shape[0], L.dims.n_fock, coo.nnz))
        rec.tofile(fh)


def load_liouvillian(path) -> Liouvillian:
    """Read a matrix written by :func:`save_liouvillian`."""
    with open(path, "rb") as fh:
        if fh.read(4) != _LIOU_MAGIC:
            raise ValueError(f"{path}: not a Liouvillian dump")
        version, dim, n_fock, nnz = struct.unpack("<IQQQ", fh.read(28))
        if version != 1:
            raise ValueError(f"{path}: unsupported version {version}")
        rec = np.fromfile(fh, dtype=np.dtype(
            [("row", "<u8"), ("col", "<u8"), ("re", "<f8"), ("im", "<f8")]),
            count=nnz)
    mat = sp.coo_matrix(
        (rec["re"] + 1j * rec["im"], (rec["row"], rec["col"])),
        shape=(dim, dim)).tocsr()
    return Liouvillian(dims=HilbertDims(int(n_fock)), matrix=mat)

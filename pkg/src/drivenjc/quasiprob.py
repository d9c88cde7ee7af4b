"""Q and Wigner quasi-probability fields on a phase-space grid, plus
bimodality metrics extracted from them.

Grids live in the complex plane alpha = x + i y; field values are stored
as values[i, j] = f(x_i + i y_j).
"""

import hashlib
import json
import warnings
from dataclasses import dataclass

import numpy as np
from scipy.linalg import expm

from .exceptions import DimensionError, TruncationWarning

VACUUM_WIDTH = 0.5  # std of the vacuum Wigner Gaussian exp(-2|alpha|^2)
_GRID_CHUNK = 4096  # grid points processed per block, caps work-array memory


@dataclass(frozen=True)
class PhaseSpaceGrid:
    """Rectangular sampling of the phase plane."""

    x_min: float
    x_max: float
    y_min: float
    y_max: float
    nx: int = 201
    ny: int = 201

    def __post_init__(self):
        if self.nx < 2 or self.ny < 2:
            raise DimensionError(f"grid needs nx, ny >= 2, got {self.nx}, {self.ny}")
        for lo, hi, tag in ((self.x_min, self.x_max, "x"), (self.y_min, self.y_max, "y")):
            if not (np.isfinite(lo) and np.isfinite(hi)) or hi <= lo:
                raise DimensionError(f"invalid {tag} bounds [{lo}, {hi}]")

    @property
    def xs(self) -> np.ndarray:
        return np.linspace(self.x_min, self.x_max, self.nx)

    @property
    def ys(self) -> np.ndarray:
        return np.linspace(self.y_min, self.y_max, self.ny)

    def alphas(self) -> np.ndarray:
        """Complex sample points, shape (nx, ny)."""
        return self.xs[:, None] + 1j * self.ys[None, :]

    @property
    def cell(self) -> tuple[float, float]:
        return ((self.x_max - self.x_min) / (self.nx - 1),
                (self.y_max - self.y_min) / (self.ny - 1))

    @classmethod
    def square(cls, radius: float, n: int = 201) -> "PhaseSpaceGrid":
        return cls(-radius, radius, -radius, radius, n, n)


def auto_grid(max_alpha: float, n: int = 201) -> PhaseSpaceGrid:
    """Window sized to 1.5x the largest expected |alpha| plus 3 vacuum widths."""
    radius = 1.5 * float(max_alpha) + 3 * VACUUM_WIDTH
    return PhaseSpaceGrid.square(radius, n)


@dataclass(frozen=True)
class QuasiDistField:
    """A sampled Q or Wigner distribution."""

    grid: PhaseSpaceGrid
    values: np.ndarray
    kind: str  # "Q" or "W"

    def __post_init__(self):
        if self.kind not in ("Q", "W"):
            raise ValueError(f"kind must be 'Q' or 'W', got {self.kind!r}")
        if self.values.shape != (self.grid.nx, self.grid.ny):
            raise DimensionError(
                f"values shape {self.values.shape} does not match grid "
                f"({self.grid.nx}, {self.grid.ny})")

    def integral(self) -> float:
        """2-D trapezoid quadrature over the window."""
        dx, dy = self.grid.cell
        wx = np.full(self.grid.nx, dx)
        wx[[0, -1]] = dx / 2
        wy = np.full(self.grid.ny, dy)
        wy[[0, -1]] = dy / 2
        return float(wx @ self.values @ wy)


def _coherent_columns(n_fock: int, alphas: np.ndarray) -> np.ndarray:
    """Matrix of truncated coherent-state amplitudes, shape (n_fock, len(alphas))."""
    v = np.empty((n_fock, alphas.size), dtype=complex)
    v[0] = np.exp(-np.abs(alphas) ** 2 / 2)
    for m in range(1, n_fock):
        v[m] = v[m - 1] * alphas / np.sqrt(m)
    return v


def _check_cavity_input(rho_c, grid, n_fock):
    rho_c = np.asarray(rho_c)
    if rho_c.ndim != 2 or rho_c.shape[0] != rho_c.shape[1]:
        raise DimensionError(f"not a density matrix: shape {rho_c.shape}")
    if n_fock is not None and rho_c.shape[0] != n_fock:
        raise DimensionError(
            f"matrix dimension {rho_c.shape[0]} does not match the declared "
            f"cavity truncation n_fock={n_fock}; joint-space input must be "
            "reduced with observables.partial_trace first")
    corner = max(abs(grid.x_min), abs(grid.x_max)) ** 2 \
        + max(abs(grid.y_min), abs(grid.y_max)) ** 2
    if corner > rho_c.shape[0] / 2:
        warnings.warn(
            f"grid corner |alpha|^2 = {corner:.1f} exceeds n_fock/2 = "
            f"{rho_c.shape[0] / 2}; field values far out are truncation-limited",
            TruncationWarning, stacklevel=3)
    return rho_c


def q_function(rho_c: np.ndarray, grid: PhaseSpaceGrid,
               n_fock: int | None = None) -> QuasiDistField:
    """Husimi function Q(alpha) = <alpha| rho |alpha> / pi on the grid."""
    rho_c = _check_cavity_input(rho_c, grid, n_fock)
    al = grid.alphas().ravel()
    out = np.empty(al.size)
    for lo in range(0, al.size, _GRID_CHUNK):
        sl = slice(lo, lo + _GRID_CHUNK)
        v = _coherent_columns(rho_c.shape[0], al[sl])
        out[sl] = np.real(np.einsum("mp,mp->p", v.conj(), rho_c @ v)) / np.pi
    # clamp eigenvalue-noise negatives; anything larger is a genuine error
    out[(out < 0) & (out > -1e-10)] = 0.0
    return QuasiDistField(grid=grid, values=out.reshape(grid.nx, grid.ny), kind="Q")


def _wigner_block(rho_c: np.ndarray, alphas: np.ndarray) -> np.ndarray:
    """Exact Wigner of a Fock-basis matrix on a flat array of points.

    Ladder recursion over the displaced-state overlaps; each matrix element
    contributes its closed-form Wigner, so the result is exact for the
    truncated state at any alpha (no additional truncation error).
    """
    m_max = rho_c.shape[0]
    prev = np.empty((m_max, alphas.size), dtype=complex)
    cur = np.empty_like(prev)
    prev[0] = (2 / np.pi) * np.exp(-2 * np.abs(alphas) ** 2)
    for n in range(1, m_max):
        prev[n] = 2 * alphas * prev[n - 1] / np.sqrt(n)
    w = np.real(rho_c[0, 0]) * np.real(prev[0])
    for n in range(1, m_max):
        w = w + 2 * np.real(rho_c[0, n] * prev[n])
    for m in range(1, m_max):
        cur[m] = (2 * np.conj(alphas) * prev[m] - np.sqrt(m) * prev[m - 1]) / np.sqrt(m)
        w = w + np.real(rho_c[m, m] * cur[m])
        for n in range(m + 1, m_max):
            cur[n] = (2 * alphas * cur[n - 1] - np.sqrt(m) * prev[n - 1]) / np.sqrt(n)
            w = w + 2 * np.real(rho_c[m, n] * cur[n])
        prev, cur = cur, prev
    return w


def wigner_numeric(rho_c: np.ndarray, grid: PhaseSpaceGrid,
                   n_fock: int | None = None) -> QuasiDistField:
    """Wigner function of a cavity state, exact for the truncated matrix.

    Equal to (2/pi) Tr[D(-alpha) rho D(alpha) Pi] with displacement D and
    photon parity Pi, evaluated through the closed-form Fock-basis kernel;
    see :func:`wigner_displaced_parity` for the direct (slow) evaluation.
    """
    rho_c = _check_cavity_input(rho_c, grid, n_fock)
    al = grid.alphas().ravel()
    out = np.empty(al.size)
    chunk = max(1, min(_GRID_CHUNK, (_GRID_CHUNK * 64) // max(1, rho_c.shape[0])))
    for lo in range(0, al.size, chunk):
        sl = slice(lo, lo + chunk)
        out[sl] = _wigner_block(rho_c, al[sl])
    return QuasiDistField(grid=grid, values=out.reshape(grid.nx, grid.ny), kind="W")


def wigner_displaced_parity(rho_c: np.ndarray, alphas: np.ndarray) -> np.ndarray:
    """Reference Wigner evaluation: per-point matrix exponential.

    W(alpha) = (2/pi) Tr[D(-alpha) rho D(alpha) Pi], D built by expm in the
    truncated space.  Accurate only while 4|alpha|^2 is well inside the
    truncation; intended for cross-validation, not production fields.
    """
    rho_c = np.asarray(rho_c)
    n_fock = rho_c.shape[0]
    a = np.diag(np.sqrt(np.arange(1, n_fock, dtype=float)), 1).astype(complex)
    parity = np.diag((-1.0) ** np.arange(n_fock))
    flat = np.asarray(alphas).ravel()
    out = np.empty(flat.size)
    for k, al in enumerate(flat):
        d_op = expm(al * a.conj().T - np.conj(al) * a)
        out[k] = (2 / np.pi) * np.real(
            np.trace(d_op.conj().T @ rho_c @ d_op @ parity))
    return out.reshape(np.shape(alphas))


@dataclass(frozen=True)
class BimodalityMetrics:
    """Detected field peaks and the relative height difference."""

    peaks: list  # (x, y, height), sorted by height descending
    r: float | None  # (h1 - h2) / h1 for the two tallest, None if unimodal


def _refine_peak(values, i, j, xs, ys):
    """Quadratic sub-cell refinement of a local maximum on the 3x3 stencil."""
    x, y, h = xs[i], ys[j], values[i, j]
    dx = xs[1] - xs[0]
    dy = ys[1] - ys[0]
    num_x = values[i - 1, j] - values[i + 1, j]
    den_x = values[i - 1, j] - 2 * values[i, j] + values[i + 1, j]
    if den_x < 0:
        off = 0.5 * num_x / den_x
        off = float(np.clip(off, -0.5, 0.5))
        x += off * dx
        h -= 0.25 * num_x * off
    num_y = values[i, j - 1] - values[i, j + 1]
    den_y = values[i, j - 1] - 2 * values[i, j] + values[i, j + 1]
    if den_y < 0:
        off = 0.5 * num_y / den_y
        off = float(np.clip(off, -0.5, 0.5))
        y += off * dy
        h -= 0.25 * num_y * off
    return float(x), float(y), float(h)


def bimodality_metrics(field: QuasiDistField, floor: float = 0.01) -> BimodalityMetrics:
    """Locate interior local maxima and the peak-height ratio r = (h1-h2)/h1.

    A grid point is a peak if it strictly exceeds its 8 neighbours and its
    height clears ``floor`` times the global maximum; positions and heights
    are refined on the 3x3 stencil.  Boundary cells are excluded.
    """
    v = field.values
    if not np.all(np.isfinite(v)):
        raise ValueError("field contains non-finite values")
    xs, ys = field.grid.xs, field.grid.ys
    threshold = floor * float(v.max())
    inner = v[1:-1, 1:-1]
    mask = inner > threshold
    for di in (-1, 0, 1):
        for dj in (-1, 0, 1):
            if di == 0 and dj == 0:
                continue
            mask &= inner > v[1 + di:v.shape[0] - 1 + di, 1 + dj:v.shape[1] - 1 + dj]
    peaks = [_refine_peak(v, i + 1, j + 1, xs, ys) for i, j in zip(*np.nonzero(mask))]
    peaks.sort(key=lambda p: -p[2])
    r = None
    if len(peaks) >= 2:
        h1, h2 = peaks[0][2], peaks[1][2]
        r = (h1 - h2) / h1
    return BimodalityMetrics(peaks=peaks, r=r)


def _params_hash(params) -> str | None:
    if params is None:
        return None
    blob = json.dumps(params, sort_keys=True, default=str).encode()
    return hashlib.sha256(blob).hexdigest()


def save_field(field: QuasiDistField, path, params=None) -> None:
    """Write a field as CSV (x, y, value) plus a JSON sidecar header.

    The sidecar (same name, .json suffix) records the grid bounds, kind,
    and a SHA-256 hash of the generating parameters when given.
    """
    path = str(path)
    al = field.grid.alphas()
    with open(path, "w") as fh:
        fh.write("x,y,value\n")
        for i in range(field.grid.nx):
            for j in range(field.grid.ny):
                fh.write(f"{al[i, j].real:.17g},{al[i, j].imag:.17g},"
                         f"{field.values[i, j]:.17g}\n")
    header = {
        "kind": field.kind,
        "x_min": field.grid.x_min, "x_max": field.grid.x_max,
        "y_min": field.grid.y_min, "y_max": field.grid.y_max,
        "nx": field.grid.nx, "ny": field.grid.ny,
        "params_hash": _params_hash(params),
    }
    with open(_sidecar(path), "w") as fh:
        json.dump(header, fh, indent=1, sort_keys=True)
        fh.write("\n")


def _sidecar(path: str) -> str:
    return path[:-4] + ".json" if path.endswith(".csv") else path + ".json"


def load_field(path) -> QuasiDistField:
    """Read a field written by :func:`save_field` (values round-trip exactly)."""
    path = str(path)
    with open(_sidecar(path)) as fh:
        header = json.load(fh)
    grid = PhaseSpaceGrid(header["x_min"], header["x_max"], header["y_min"],
                          header["y_max"], header["nx"], header["ny"])
    data = np.loadtxt(path, delimiter=",", skiprows=1)
    values = data[:, 2].reshape(grid.nx, grid.ny)
    return QuasiDistField(grid=grid, values=values, kind=header["kind"])

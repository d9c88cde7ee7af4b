"""Mean-field and neoclassical steady-state branches of the driven model.

Each solver turns its amplitude fixed-point equation into a scalar equation
for n = |alpha|^2, brackets every root on a log-spaced scan, polishes by
bisection, and maps back to the complex amplitude.  Branch sets come with
an S-curve stability labeling: with three coexisting roots ordered by n the
middle one is the unstable branch (labels are heuristic for the resonance
solvers, which get 'unknown').
"""

import cmath
import warnings
from dataclasses import dataclass, field

import numpy as np

from .exceptions import ConvergenceError, DomainError
from .lindblad import ModelParams

_RESIDUAL_REL = 1e-9       # fixed-point residual bound |a - rhs| <= tol*(1+|a|)
_MERGE_REL = 1e-9          # fold-point duplicate merging
_SCAN_POINTS = 800


@dataclass(frozen=True)
class Branch:
    alpha: complex
    n: float
    stability: str = "unknown"   # stable | unstable | unknown
    label: str = ""              # extra tag, e.g. the resonance path sign


@dataclass(frozen=True)
class BranchSet:
    equation: str                # full | kerr | duffing | split_lorentzian | phase
    branches: list[Branch] = field(default_factory=list)

    def __len__(self):
        return len(self.branches)

    @property
    def ns(self) -> list[float]:
        return [b.n for b in self.branches]


@dataclass(frozen=True)
class PhaseBranch:
    """Above-threshold resonance branch: field amplitude and qubit vector."""

    alpha: complex
    nu: complex                 # <sigma_minus> = +-alpha/(2|alpha|)
    zeta: float = 0.0           # <sigma_z>, zero on the equator

    @property
    def n(self) -> float:
        return abs(self.alpha) ** 2


def n_scale(p: ModelParams) -> float:
    """Dispersive scale parameter delta^2 / (4 g^2).

    Plays the role of system size: the bright-branch photon number is of
    this order and fluctuations vanish as it grows.
    """
    if p.g <= 0:
        raise DomainError("n_scale undefined for g = 0")
    if p.delta <= 0:
        raise DomainError("n_scale undefined at resonance (delta = 0)")
    return p.delta ** 2 / (4 * p.g ** 2)


def _bisect(g_fun, lo, hi, g_lo):
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if mid == lo or mid == hi:
            break
        g_mid = g_fun(mid)
        if (g_mid > 0) == (g_lo > 0):
            lo, g_lo = mid, g_mid
        else:
            hi = mid
        if hi - lo <= 1e-12 * max(hi, 1e-300):
            break
    return 0.5 * (lo + hi)


def _scan_roots(g_fun, n_cap, n_floor=1e-14):
    """All positive roots of g_fun on (n_floor, n_cap] via sign-change scan."""
    if n_cap <= n_floor:
        return []
    grid = np.geomspace(n_floor, n_cap, _SCAN_POINTS)
    vals = np.array([g_fun(n) for n in grid])
    roots = []
    for i in np.nonzero(np.diff(np.sign(vals)) != 0)[0]:
        roots.append(_bisect(g_fun, grid[i], grid[i + 1], vals[i]))
    merged = []
    for r in sorted(roots):
        if merged and abs(r - merged[-1]) <= _MERGE_REL * max(abs(r), 1.0):
            continue
        merged.append(r)
    return merged


def _labelled(alphas_ns, equation):
    branches = sorted(alphas_ns, key=lambda t: t[1])
    if len(branches) == 3:
        labels = ["stable", "unstable", "stable"]
    elif len(branches) == 1:
        labels = ["stable"]
    else:
        labels = ["unknown"] * len(branches)
    return BranchSet(equation=equation, branches=[
        Branch(alpha=a, n=n, stability=s) for (a, n), s in zip(branches, labels)])


def _verify_residual(alpha, rhs_of_alpha):
    res = abs(alpha - rhs_of_alpha(alpha))
    bound = _RESIDUAL_REL * (1 + abs(alpha))
    if res > bound:
        raise ConvergenceError(
            f"branch residual {res:.3e} exceeds {bound:.3e}", residual=res)


def _n_cap(p: ModelParams) -> float:
    # |F(n)| >= kappa for every solver here, so roots satisfy n <= (|eps|/kappa)^2
    cap = 10 * (abs(p.eps_d) / p.kappa) ** 2
    if p.g > 0 and p.delta > 0:
        cap = max(cap, 10 * n_scale(p))
    return cap


def solve_full(p: ModelParams) -> BranchSet:
    """Steady-state amplitudes of the full semiclassical (Maxwell-Bloch) model.

    alpha = -i eps / F(n) with
    F(n) = kappa - i dwc + 2 g^2 / [(gamma - 2i dwq)(1 + 8 g^2 n/(gamma^2 + 4 dwq^2))].
    """
    if p.gamma <= 0:
        raise DomainError("solve_full requires gamma > 0")
    eps = abs(p.eps_d)
    k_t = p.kappa - 1j * p.delta_omega_c
    if p.g == 0 or eps == 0:
        alpha = -1j * p.eps_d / k_t
        return _labelled([(alpha, abs(alpha) ** 2)], "full")
    sat = p.gamma ** 2 + 4 * p.delta_omega_q ** 2
    qfac = p.gamma - 2j * p.delta_omega_q

    def f_of_n(n):
        return k_t + 2 * p.g ** 2 / (qfac * (1 + 8 * p.g ** 2 * n / sat))

    def g_fun(n):
        return n * abs(f_of_n(n)) ** 2 - eps ** 2

    # |F| <= |k_t| + 2g^2/|qfac| bounds every root from below
    f_max = abs(k_t) + 2 * p.g ** 2 / abs(qfac)
    roots = _scan_roots(g_fun, _n_cap(p), n_floor=0.1 * (eps / f_max) ** 2)
    if not roots:
        raise ConvergenceError(
            f"no semiclassical root bracketed for eps_d={p.eps_d} "
            f"(scan cap {_n_cap(p):.3e})")
    out = []
    for n in roots:
        alpha = -1j * p.eps_d / f_of_n(n)
        _verify_residual(alpha, lambda a: -1j * p.eps_d / f_of_n(abs(a) ** 2))
        out.append((alpha, abs(alpha) ** 2))
    return _labelled(out, "full")


def _kerr_detuning(p: ModelParams, n):
    g2d = p.g ** 2 / p.delta if p.g > 0 else 0.0
    if g2d == 0.0:
        return p.delta_omega_c
    return p.delta_omega_c - g2d / np.sqrt(1 + 4 * p.g ** 2 * n / p.delta ** 2)


def solve_kerr(p: ModelParams) -> BranchSet:
    """Neoclassical (Bloch-length-conserving) branches with the square-root
    saturable dispersive shift."""
    if p.delta <= 0 and p.g > 0:
        raise DomainError("solve_kerr requires delta > 0")
    eps = abs(p.eps_d)
    if eps == 0:
        return _labelled([(0j, 0.0)], "kerr")

    def g_fun(n):
        return n * (p.kappa ** 2 + _kerr_detuning(p, n) ** 2) - eps ** 2

    f_max = p.kappa + abs(p.delta_omega_c) + (p.g ** 2 / p.delta if p.g > 0 else 0.0)
    roots = _scan_roots(g_fun, _n_cap(p), n_floor=0.1 * (eps / f_max) ** 2)
    if not roots:
        raise ConvergenceError(f"no Kerr root bracketed for eps_d={p.eps_d}")
    out = []
    for n in roots:
        alpha = -1j * p.eps_d / (p.kappa - 1j * _kerr_detuning(p, n))
        _verify_residual(
            alpha,
            lambda a: -1j * p.eps_d / (p.kappa - 1j * _kerr_detuning(p, abs(a) ** 2)))
        out.append((alpha, abs(alpha) ** 2))
    return _labelled(out, "kerr")


def duffing_cubic_coefficients(p: ModelParams):
    """Coefficients (c3, c2, c1, c0) of the lowest-order expansion cubic
    B^2 n^3 + 2AB n^2 + (kappa^2 + A^2) n - eps^2 = 0."""
    if p.delta <= 0 or p.g <= 0:
        raise DomainError("Duffing expansion requires g > 0 and delta > 0")
    a_lin = p.delta_omega_c - p.g ** 2 / p.delta
    b_kerr = 2 * p.g ** 4 / p.delta ** 3
    return (b_kerr ** 2, 2 * a_lin * b_kerr,
            p.kappa ** 2 + a_lin ** 2, -abs(p.eps_d) ** 2)


def duffing_discriminant(p: ModelParams) -> float:
    """Discriminant of the Duffing cubic; sign flips exactly where the real
    root count changes between 1 and 3."""
    a, b, c, d = duffing_cubic_coefficients(p)
    return float(18 * a * b * c * d - 4 * b ** 3 * d + b ** 2 * c ** 2
                 - 4 * a * c ** 3 - 27 * a ** 2 * d ** 2)


def solve_duffing(p: ModelParams) -> BranchSet:
    """Lowest-order (cubic) Duffing branches, solved exactly."""
    if abs(p.eps_d) == 0:
        return _labelled([(0j, 0.0)], "duffing")
    coeffs = duffing_cubic_coefficients(p)
    a_lin = p.delta_omega_c - p.g ** 2 / p.delta
    b_kerr = 2 * p.g ** 4 / p.delta ** 3

    def g_fun(n):
        return n * (p.kappa ** 2 + (a_lin + b_kerr * n) ** 2) - abs(p.eps_d) ** 2

    def g_prime(n):
        det = a_lin + b_kerr * n
        return p.kappa ** 2 + det ** 2 + 2 * n * det * b_kerr

    roots = []
    for z in np.roots(coeffs):
        if abs(z.imag) > 1e-7 * max(1.0, abs(z)) or z.real <= 0:
            continue
        n = float(z.real)
        for _ in range(60):  # Newton polish of the cubic root
            step = g_fun(n) / g_prime(n)
            n -= step
            if abs(step) <= 1e-15 * max(n, 1e-300):
                break
        if n > 0:
            roots.append(n)
    merged = []
    for n in sorted(roots):
        if merged and abs(n - merged[-1]) <= _MERGE_REL * max(n, 1.0):
            continue
        merged.append(n)
    out = []
    for n in merged:
        alpha = -1j * p.eps_d / (p.kappa - 1j * (a_lin + b_kerr * n))
        _verify_residual(
            alpha,
            lambda a: -1j * p.eps_d / (p.kappa - 1j * (a_lin + b_kerr * abs(a) ** 2)))
        out.append((alpha, n))
    return _labelled(out, "duffing")


def solve_split_lorentzian(p: ModelParams) -> BranchSet:
    """Resonance response branches n (kappa^2 + (dwc -+ g/(2 sqrt(n)))^2) = eps^2.

    Both signs of the amplitude-dependent shift are scanned; each positive
    root becomes a branch labelled '+' or '-' according to the sign of the
    i g/(2|alpha|) term in its amplitude denominator.  A sign with no
    positive root simply contributes nothing.
    """
    if p.g <= 0:
        raise DomainError("split-Lorentzian response requires g > 0")
    eps = abs(p.eps_d)
    if eps == 0:
        return BranchSet(equation="split_lorentzian", branches=[])
    branches = []
    for sign in (+1.0, -1.0):
        def det(n, s=sign):
            return p.delta_omega_c - s * p.g / (2 * np.sqrt(n))

        def g_fun(n, s=sign):
            return n * (p.kappa ** 2 + det(n, s) ** 2) - eps ** 2

        for n in _scan_roots(g_fun, _n_cap(p), n_floor=1e-16):
            alpha = -1j * p.eps_d / (p.kappa - 1j * det(n, sign))
            _verify_residual(
                alpha,
                lambda a, s=sign: -1j * p.eps_d / (p.kappa - 1j * det(abs(a) ** 2, s)))
            branches.append(Branch(alpha=alpha, n=abs(alpha) ** 2,
                                   stability="unknown",
                                   label="+" if sign > 0 else "-"))
    branches.sort(key=lambda b: b.n)
    return BranchSet(equation="split_lorentzian", branches=branches)


def solve_phase_bistability(p: ModelParams) -> list[PhaseBranch]:
    """Neoclassical parity-broken pair above the resonance threshold.

    For eps_d beyond g/2 (at delta = 0, delta_omega_c = 0) the two branches
    alpha_+- = -i eps_d (kappa +- i g/(2|alpha|))^{-1} share the modulus
    |alpha|^2 = (eps_d^2 - g^2/4)/kappa^2 and carry the equatorial qubit
    vector nu = +-alpha/(2|alpha|), zeta = 0.  At or below threshold the
    list is empty.  A drive phase rotates both amplitudes rigidly.
    """
    if p.delta > 0 or p.delta_omega_c != 0:
        warnings.warn(
            "phase-bistability branches assume delta = 0 and delta_omega_c = 0; "
            f"got delta={p.delta}, delta_omega_c={p.delta_omega_c}",
            stacklevel=2)
    eps = abs(p.eps_d)
    if eps <= p.g / 2:
        return []
    phase = cmath.exp(1j * cmath.phase(complex(p.eps_d))) if eps else 1.0
    n = (eps ** 2 - p.g ** 2 / 4) / p.kappa ** 2
    mag = np.sqrt(n)
    out = []
    for sign in (+1.0, -1.0):
        alpha = -1j * eps / (p.kappa + sign * 1j * p.g / (2 * mag)) * phase
        nu = sign * alpha / (2 * abs(alpha))
        out.append(PhaseBranch(alpha=alpha, nu=nu, zeta=0.0))
    return out


def branch_rows(bs: BranchSet) -> list[tuple]:
    """CSV-ready rows: (equation tag, index, Re alpha, Im alpha, n, stability)."""
    rows = []
    for idx, b in enumerate(bs.branches):
        tag = bs.equation + b.label
        rows.append((tag, idx, b.alpha.real, b.alpha.imag, b.n, b.stability))
    return rows


def save_branches(branch_sets, path) -> None:
    """Write one or more branch sets as CSV."""
    if isinstance(branch_sets, BranchSet):
        branch_sets = [branch_sets]
    with open(path, "w") as fh:
        fh.write("equation,branch,re_alpha,im_alpha,n,stability\n")
        for bs in branch_sets:
            for tag, idx, re_a, im_a, n, stab in branch_rows(bs):
                fh.write(f"{tag},{idx},{re_a:.17g},{im_a:.17g},{n:.17g},{stab}\n")

"""Steady states of the master equation and the derived observables.

Checks the exactly solvable decoupled cavity against its closed form, then
solves a moderately coupled point and reports photon statistics, qubit
entropy, and the Liouvillian's trace-preservation structure.

Run:  python3 demos/02_steady_state_and_observables.py
"""

import tempfile

import numpy as np

from drivenjc import (HilbertDims, ModelParams, annihilation, build_liouvillian,
                      cavity_operator, entanglement_entropy, expectation,
                      g2_zero, load_liouvillian, mean_photon_number,
                      partial_trace, qubit_reduced, residual_norm,
                      save_liouvillian, steady_state, steady_state_auto)

print("=== decoupled cavity: closed-form check ===")
p_lin = ModelParams(g=0.0, kappa=1.0, gamma=0.2, delta_omega_c=0.8,
                    delta_omega_q=0.0, eps_d=0.9)
dims = HilbertDims(24)
liou = build_liouvillian(p_lin, dims)
rho = steady_state(liou)
mean_a = expectation(rho, cavity_operator(annihilation(24), dims))
target = -1j * p_lin.eps_d / (p_lin.kappa - 1j * p_lin.delta_omega_c)
print(f"<a>        = {mean_a:.10f}")
print(f"closed form= {target:.10f}   (weak-drive phase convention)")
print(f"g2(0)      = {g2_zero(partial_trace(rho, 'cavity')):.6f}  (coherent -> 1)")
print(f"residual   = {residual_norm(liou, rho):.2e}")

print("\n=== coupled qubit-cavity point ===")
p = ModelParams.dispersive(g=40.0, kappa=2.0, gamma=1.0, delta=160.0,
                           delta_omega_c=9.0, eps_d=6.0)
rho, dims, history = steady_state_auto(p, n_start=16)
print(f"adaptive truncation history (n_fock, <n>): {history}")
print(f"accepted n_fock = {dims.n_fock}")
rq = qubit_reduced(rho)
print(f"<n>   = {mean_photon_number(rho, dims):.6f}")
print(f"qubit occupations (gg, ee) = ({rq.rho_gg:.4f}, {rq.rho_ee:.4f})")
print(f"S_q   = {entanglement_entropy(rq):.6f}  (bounds: 0 .. ln 2 = {np.log(2):.4f})")
print(f"g2(0) = {g2_zero(partial_trace(rho, 'cavity')):.4f}")

print("\n=== Liouvillian dump round-trip ===")
liou = build_liouvillian(p, dims)
with tempfile.NamedTemporaryFile(suffix=".bin") as fh:
    save_liouvillian(liou, fh.name)
    back = load_liouvillian(fh.name)
    print(f"dimension {back.matrix.shape[0]}, nnz {back.matrix.nnz}, "
          f"identical: {(back.matrix != liou.matrix).nnz == 0}")

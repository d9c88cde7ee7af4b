"""Tour of the truncated cavity-qubit space: ladder algebra, qubit
operators, tensor products, and coherent states with their truncation loss.

Run:  python3 demos/01_operators_and_states.py
"""

import numpy as np

from drivenjc import (HilbertDims, annihilation, coherent_state, fock_state,
                      qubit_ops, tensor_product, truncation_loss)

n_fock = 12
a = annihilation(n_fock)
ad = a.conj().T

print("=== ladder algebra on the truncated cavity ===")
print(f"a |2>  ->  sqrt(2) |1>:  {np.allclose(a @ fock_state(2, n_fock), np.sqrt(2) * fock_state(1, n_fock))}")
comm = a @ ad - ad @ a
print(f"[a, a+] = 1 below the truncation edge: "
      f"{np.max(np.abs(comm[:-1, :-1] - np.eye(n_fock - 1))):.1e} deviation")
print(f"top-corner truncation artifact: [a, a+][{n_fock-1},{n_fock-1}] = "
      f"{comm[-1, -1].real:.0f} (expected -(n_fock-1) = {-(n_fock-1)})")

print("\n=== qubit operators ===")
sm, sp, sz = qubit_ops()
print("sigma_z = 2 sigma+ sigma- - 1 =", np.diag(sz).real, " (|g>, |e> order)")
print(f"sigma+ sigma- + sigma- sigma+ = identity: {np.allclose(sp @ sm + sm @ sp, np.eye(2))}")

print("\n=== joint space ===")
dims = HilbertDims(n_fock)
eye_joint = tensor_product(np.eye(n_fock), np.eye(2))
print(f"total dimension 2 * n_fock = {dims.total}; |n=3, e> sits at index "
      f"{dims.index(3, 1)}")
print(f"tensor product shape: {eye_joint.shape}")

print("\n=== coherent states and truncation ===")
alpha = 1.8
print(f"|alpha| = {alpha}: amplitude of a|alpha> vs alpha|alpha>:")
psi = coherent_state(alpha, 40)
err = np.linalg.norm(annihilation(40) @ psi - alpha * psi)
print(f"  eigenstate defect (n_fock=40): {err:.2e}")
print("truncation loss 1 - ||psi||^2 for |alpha|^2 = 3.24:")
for n in (6, 10, 16, 24, 40):
    print(f"  n_fock={n:3d}: {truncation_loss(alpha, n):.3e}")

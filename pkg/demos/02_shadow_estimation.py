"""Shadow estimation end to end: collect, estimate monomials, build a 1-RDM.

Run:  python demos/02_shadow_estimation.py
"""
import numpy as np

from matchgate_shadows import estimate, estimate_rdm, lambda_eigenvalue, sample_size
from matchgate_shadows._rng import derive_rng
from matchgate_shadows.shadows import collect_batch, true_expectation
from matchgate_shadows.statevec import random_state

n = 3
state = random_state(n, derive_rng(7, "demo-state"))
print(f"Random {n}-qubit pure state; estimating Majorana monomials.\n")

lam_inv = 1 / float(lambda_eigenvalue(1, n))
budget = sample_size(epsilon=0.1, delta=0.01, n_observables=15, var_bound=lam_inv)
print(f"Shot budget for eps=0.1, delta=0.01, M=15, var bound 1/lambda = {lam_inv}: {budget}")

shots = 50_000
for ensemble in ("two_angle", "optimal", "haar"):
    batch = collect_batch(state, ensemble, shots, seed=11)
    print(f"\n{ensemble}, {shots} shadows:")
    for mu in ((1, 2), (2, 5), (1, 2, 3, 4)):
        rep = estimate(batch, mu, method="median_of_means", batch_count=10)
        truth = true_expectation(state, mu)
        print(f"  gamma{mu}: estimate {rep.estimate:+.4f}   truth {truth:+.4f}")

batch = collect_batch(state, "two_angle", shots, seed=13)
rdm = estimate_rdm(batch, 1)
print("\nEstimated 1-RDM (Hermitian by construction):")
print(np.array_str(rdm.tensor, precision=3, suppress_small=True))
occupations = np.real(np.diag(rdm.tensor))
print(f"Mode occupations: {occupations.round(3)}  (trace {occupations.sum():.3f})")

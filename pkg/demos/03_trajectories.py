"""Closed-form trajectories and the counting estimate."""
import numpy as np

from girth_triples import counting_estimate, derivative_check, enumerate_obstructions, evaluate

for ell in (4, 6, 7, 8):
    cat = enumerate_obstructions(ell)
    qs = [evaluate(float(t), 1000, cat).q for t in np.linspace(0, 1 / 6, 5)]
    print(f"ell={ell}: q(t) at t=0..1/6: " + " ".join(f"{q:.4f}" for q in qs))

cat6 = enumerate_obstructions(6)
r = derivative_check(0.05, 1000, cat6)
print(f"q' by finite differences {r.q_prime_fd:.8f} vs -q*q_tilde {r.q_prime_pred:.8f}")
print(f"extension identity: {r.identity_lhs:.6e} vs {r.identity_rhs:.6e}")

for n in (100, 1000, 10000):
    est = counting_estimate(n, cat6)
    print(f"n={n}: log(N1/N2) numeric {est.log_ratio:.1f}, closed form {est.closed_form_log_ratio:.1f}")

"""
The parameter planner and the Strichartz-constant scan
======================================================

Resolve the experiment parameters (order, cutoff, horizon, window) from the
scaling recipe, and measure how the sextic level-sup norm grows with the
window size; its doubling exponents shrink, the signature of sub-polynomial
growth.
"""

from qnls import plan_parameters, strichartz_scan

plan = plan_parameters(eps=5e-2, nu=1.0, alpha=0.5, rho=0.8, kappa=1.0, c=1.0, k=1)
for field in ("upsilon", "alpha_nu", "r_star", "r", "gamma", "M", "T_eps",
              "eps_r", "eta_r", "feasible"):
    print(f"{field:>12}: {getattr(plan, field)}")

scan = strichartz_scan([1, 2, 4, 8], multistart=32)
print("\n  M   S(M) lower    S(M) l1-upper   dominant level")
for row in scan.rows:
    print(f"{row.M:3d}   {row.lower:10.6f}   {row.upper:13.2f}   {row.dominant_level}")
print("doubling exponents:", [round(e, 4) for e in scan.exponents])
print("monotone:", scan.monotone())

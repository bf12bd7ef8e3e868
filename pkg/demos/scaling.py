"""
How the two designers scale
===========================

Order-and-Design walks through pure profiles, which is cheap when a good
profile is designable early. Gradient descent on the entropy-regularized
equilibrium pays for a full equilibrium solve at every step. This times both
on growing traffic games and fits a line to log10 runtime.
"""

from reldesign.experiments import run_scalability, write_csv

rows, fits = run_scalability(range(2, 7), ("oad", "gd"), repeats=1, timeout=60,
                             gd={"max_steps": 50}, isolate=False)
print(write_csv(rows, fieldnames=["n", "algorithm", "median_runtime", "censored"]))
for alg, (slope, icpt) in fits.items():
    print(f"{alg}: log10(t) = {slope:.3f} n + {icpt:.3f}")

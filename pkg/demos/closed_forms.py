"""Tour of the closed-form accuracy model.

Prints the consistency probability phi for a few monitoring windows,
locates the band where it swings from ~0 to ~1, and shows that the
band's relative width depends on the process count alone.

Run:  python demos/closed_forms.py
"""

from psml import inflection_points, phi_point, uncertainty_ratio

N = 20
BETA = 0.01

print(f"Setup: {N} processes, per-tick predicate rate beta = {BETA}")
print()
print("phi(eps) = probability that a cut found by the asynchronous")
print("monitor is actually eps-consistent. 1 - phi is its false")
print("positive rate when the application needs window eps.")
print()
print(f"{'eps':>6}  {'phi':>10}  {'fpr':>10}")
for eps in (50, 100, 200, 400, 800, 1600):
    phi = phi_point(eps, N, BETA)
    print(f"{eps:>6}  {phi:>10.6f}  {1 - phi:>10.6f}")

p1, p2 = inflection_points(N, BETA)
print()
print(f"The curve turns twice, at eps = {p1:.1f} and eps = {p2:.1f}:")
print("below the first point the monitor is almost always wrong, above")
print("the second it is almost always right, and in between a small")
print("change of eps moves accuracy a lot (the hypersensitive band).")
print()
print("Band width relative to its position, for growing system sizes")
print("(note it barely shrinks -- the dependence is 1/ln n):")
for n in (5, 20, 100, 1000, 10**6):
    print(f"  n = {n:>8}: ratio = {uncertainty_ratio(n, BETA):.4f}")

"""Choosing the monitor's window for a target accuracy.

The monitor checks cuts against its own window eps_mon while the
application cares about eps_app. Too small a window hurts recall, too
large hurts precision. This script prints the admissible eps_mon range
for a 95% target across application windows, showing how the safe
range collapses when eps_app is small (hypersensitivity) and blows up
past the phase transition.

Run:  python demos/window_tuning.py
"""

from psml import admissible_eps_mon, phase_transition, precision, recall

N = 20
BETA = 0.01
ETA = 0.95

threshold = phase_transition(N, BETA, 1, ETA)
print(f"n = {N}, beta = {BETA}, target precision and recall >= {ETA}")
print(f"phase transition at eps_app = {threshold:.1f}")
print()
print(f"{'eps_app':>8}  {'admissible eps_mon':>22}  {'width':>8}")
for eps_app in (50, 100, 200, 400, 588, 600, 700):
    iv = admissible_eps_mon(eps_app, N, BETA, 1, ETA)
    if iv.unbounded_hi:
        span, width = f"[{iv.lo:.1f}, inf)", "inf"
    else:
        span, width = f"[{iv.lo:.1f}, {iv.hi:.1f}]", f"{iv.hi - iv.lo:.1f}"
    print(f"{eps_app:>8}  {span:>22}  {width:>8}")

print()
eps_app = 100
iv = admissible_eps_mon(eps_app, N, BETA, 1, ETA)
print(f"Sanity check at eps_app = {eps_app}: the endpoints hit the target")
print(f"  recall(eps_mon = {iv.lo:.3f})    = {recall(iv.lo, eps_app, N, BETA, 1):.6f}")
print(f"  precision(eps_mon = {iv.hi:.3f}) = {precision(iv.hi, eps_app, N, BETA, 1):.6f}")
print()
print("Below the transition the band is a sliver around eps_app, so the")
print("monitor must know the application's synchronization bound almost")
print("exactly; above it nearly any window at least eps_app works.")

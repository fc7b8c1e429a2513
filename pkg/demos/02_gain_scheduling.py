"""The time-varying gain: scaling function, rate ratio, and the stage cascade.

Prints the scaling function over one window, shows the guard clamp near the
window end, and lays out the inverted stage order of a three-stage cascade.
"""


import ptobs
from ptobs.gain import ScalingWindow, rate_ratio, varsigma

window = ScalingWindow(start=0.0, duration=0.2, exponent=2.01)

print("scaling function over the window [0, 0.2):")
for t in [0.0, 0.05, 0.1, 0.15, 0.19, 0.199, 0.2, 0.3]:
    print(f"  t = {t:5.3f}   varsigma = {varsigma(window, t):12.4f}"
          f"   ratio = {rate_ratio(window, t, guard=1e-3):10.2f}")
print()
print("the ratio h/(end - t) diverges at the window end; the guard clamps it:")
for guard in (1e-2, 1e-3, 1e-4):
    peak = rate_ratio(window, window.end - 1e-12, guard)
    print(f"  guard = {guard:g}  ->  peak ratio = {peak:.1f}")
print()

sched = ptobs.CascadeSchedule(t0=0.0, stage_durations=(0.2, 0.2, 0.2), exponent=2.01)
print("cascade windows run in inverted stage order (top state first):")
for k in range(sched.order, 0, -1):
    w = sched.window(k)
    print(f"  stage {k}: [{w.start:.1f}, {w.end:.1f})")
print(f"all stages closed by t* = {sched.t_star:.1f} s")
print()

print("per-stage gain ratios at a few instants:")
times = [0.0, 0.1, 0.25, 0.45, 0.7]
header = "  t      " + "".join(f"stage {k}   " for k in (1, 2, 3))
print(header)
for t in times:
    row = f"  {t:5.2f}  "
    for k in (1, 2, 3):
        row += f"{ptobs.stage_gain(sched, k, t, guard=1e-3):8.2f}  "
    print(row)
print("(zero before a stage's window opens and after it closes; the constant")
print(" part of the observer gain acts the whole time)")

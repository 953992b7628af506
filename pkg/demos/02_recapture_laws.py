"""Closed-form recapture laws: overlap of a packet with its time-shifted self.

The held packet returns with an arrival offset; the recapture amplitude
decays with the mean quanta and the trap phase accumulated over the offset.
Retuning the trap to a lower frequency before recapture flattens that decay
into a shallow quadratic in the speed ratio.
"""


from statelock.harness import default_schedule
from statelock.control_kinematics import arriving_times, predicted_fidelity
from statelock.oscillator_analytics import recapture_amplitude

sched = default_schedule(ratio=0.05, cycles=4)
times, diffs, max_diff = arriving_times(sched)
print("arrival times (relative):", [f"{t:.2f}" for t in times])
print(f"max arrival difference: {max_diff:.3f}")

print("\nworking-trap recapture vs retuned-trap recapture:")
print("  j   held trap     retuned trap")
for j in range(1, 5):
    r1 = predicted_fidelity(sched, j, regime=1)
    r2 = predicted_fidelity(sched, j, regime=2)
    print(f"  {j}   {r1:.6f}     {r2:.9f}")

print("\nexponential decay with mean quanta at fixed phase:")
for mean_n in (1.0, 4.0, 16.0):
    print(f"  mean quanta {mean_n:5.1f}: amplitude "
          f"{recapture_amplitude(mean_n, 1.0, 0.3):.4f}")

"""Trap-frequency ramps: squeeze content and full-transfer design.

A sudden retune squeezes; a slow ramp does not.  The full-transfer
condition (coherent packet in, coherent packet out, unit modulus) is
solvable exactly only on the squeeze-free branch, and the designer walks
the ramp family toward it.
"""

import math

from statelock.frequency_modulation import (
    ModulationProfile, design_modulation, integrate_bogoliubov,
    params_from_bogoliubov,
)
from statelock.oscillator_analytics import CoherentLabel

wc, w0 = 0.5, 2.0
print("squeeze magnitude r vs ramp duration (tanh ramp, shape 2):")
for tau in (2.0, 8.0, 32.0, 128.0):
    prof = ModulationProfile("smooth-ramp", wc, w0, tau, shape=2.0)
    sq = params_from_bogoliubov(integrate_bogoliubov(prof))
    print(f"  tau = {tau:6.1f}: r = {sq.r:.2e}, rotation {sq.phi_rot:.3f}")

sudden = params_from_bogoliubov(
    integrate_bogoliubov(ModulationProfile("sudden", wc, w0, 0.0)))
print(f"\nsudden jump: r = {sudden.r:.4f} "
      f"(= |ln(w0/wc)|/2 = {0.5 * math.log(w0 / wc):.4f})")

print("\nsearching the ramp family for a full transfer...")
res = design_modulation(wc, w0, CoherentLabel(1.0), gamma=0.3)
print(f"  duration {res.profile.duration:.2f}, leftover squeeze {res.squeeze.r:.2e}, "
      f"residual {res.residual:.2e}, feasible: {res.feasible}")

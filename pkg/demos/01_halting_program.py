"""Walk the halting program over a small prime's factor subspaces.

Every initial register value ends in the same locked output state; what
distinguishes the runs is only *when* the trigger fired, and those cycles
enumerate 1..m exactly once.
"""

from statelock.cyclic_group import GroupFactorization, build_subspace
from statelock.protocol_engine import Level, LockModel, run_program

p = 23
fact = GroupFactorization.of_prime(p)
print(f"p = {p}, generator g = {fact.g}, factors of p-1: {fact.factors}")

for k in range(1, fact.r + 1):
    sub = build_subspace(fact, k, "multiplicative")
    print(f"\nfactor subspace m = {sub.m}: values {sub.values}")
    for x0 in range(sub.m):
        res = run_program(sub, x0)
        prob = res.final.probability(Level.LOCKED, 1, sub.blank)
        print(f"  x0 = {x0}: trigger cycle {res.trigger_cycle}, "
              f"P(locked, 1, blank) = {prob:.3f}")

# an imperfect lock leaves a residue that the trigger can re-launch
sub = build_subspace(fact, 1, "multiplicative")
for eps in (0.0, 0.1, 0.3):
    lock = LockModel() if eps == 0 else LockModel(epsilon0=eps, mode="rotation_pulse")
    res = run_program(sub, 0, lock=lock)
    print(f"\nlock residue {eps}: correct-output probability "
          f"{res.locked_channel_probability(1, sub.blank):.4f}")

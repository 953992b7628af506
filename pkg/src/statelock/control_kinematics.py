"""Closed-form schedule arithmetic for the locked phase and the return.

Once a run triggers in cycle i, the packet leaves for the far well, is
slowed to the drift speed v0, parks until the program's last cycle ends,
and is then sped up to the common return speed v.  Positions at the end of
the program are spaced by v0 * cycle_period per cycle of trigger delay, so
return arrival times bunch by the time-compressing factor v0 / v.  All of
that is plain arithmetic, collected here and cross-checked elsewhere
against the grid simulation.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

from .oscillator_analytics import recapture_amplitude, recapture_probability_series


@dataclass(frozen=True)
class ScheduleConfig:
    """All timing and kinematics parameters of one protocol run.

    Durations partition one cycle:
    ``cycle_period = dt_branch + dt_swap + dt_raise + dt_trigger
    + scatter_window + dt_shift``.  Velocities: v_exit out of the
    scattering, v_drift after the braking sequence, v_return after the
    speed-up; v_drift <= v_exit <= v_return.  The braking sequence must fit
    inside the shift stage (decel_duration < dt_shift).
    """

    cycles: int                 # number of program cycles m_r
    cycle_period: float         # Delta T
    dt_branch: float            # branch-flip gate duration
    dt_swap: float              # symbol-swap gate duration
    dt_raise: float             # level-raise gate duration
    dt_trigger: float           # trigger-pulse duration
    scatter_window: float       # time for the packet to clear the barrier
    dt_shift: float             # conditional-shift gate duration
    decel_duration: float       # braking sequence length T_D
    accel_duration: float       # speed-up sequence length T_A
    v_exit: float               # speed entering the far well
    v_drift: float              # parked drift speed v0
    v_return: float             # speed after the speed-up
    omega_trap: float           # working trap frequency
    omega_capture: float        # retuned (slow) trap frequency
    energy_exit: float          # motional energy of the triggered packet
    mass: float = 1.0
    r2_ref: float = 0.0         # reference position right after braking
    packet_spread: float = 1.0  # wave-packet spread during the locked phase
    capture_quanta: float | None = None  # mean quanta in the retuned trap

    def __post_init__(self):
        stage_sum = (
            self.dt_branch + self.dt_swap + self.dt_raise + self.dt_trigger
            + self.scatter_window + self.dt_shift
        )
        if abs(stage_sum - self.cycle_period) > 1e-9 * max(1.0, self.cycle_period):
            raise ValueError(
                f"stage durations sum to {stage_sum}, not cycle_period={self.cycle_period}"
            )
        if not self.scatter_window < self.cycle_period - self.dt_trigger:
            raise ValueError("scatter_window must fit before the next trigger")
        if not (0 <= self.v_drift <= self.v_exit <= self.v_return):
            raise ValueError("need v_drift <= v_exit <= v_return")
        if not self.decel_duration < self.dt_shift:
            raise ValueError("braking sequence must fit inside the shift stage")
        if not self.omega_capture <= self.omega_trap:
            raise ValueError("retuned frequency must not exceed the working one")
        if self.cycles < 1 or self.cycle_period <= 0:
            raise ValueError("need cycles >= 1 and a positive cycle period")

    @property
    def ratio(self) -> float:
        """Time-compressing factor v0 / v."""
        return self.v_drift / self.v_return

    @property
    def trap_quanta(self) -> float:
        """Mean quanta of the triggered packet in the working trap."""
        return self.energy_exit / self.omega_trap

    @property
    def capture_quanta_default(self) -> float:
        """Mean quanta in the retuned trap; defaults to a second braking
        down to the same drift speed v0."""
        if self.capture_quanta is not None:
            return self.capture_quanta
        return 0.5 * self.mass * self.v_drift**2 / self.omega_capture


def end_positions(config: ScheduleConfig) -> tuple[list[float], dict[tuple[int, int], float]]:
    """Parked positions at the end of the last cycle, one per trigger cycle.

    Position for trigger cycle i is ``r2_ref + v0 * (t_end - t_mi - T_D)``;
    pairwise distances are ``v0 * (j - i) * cycle_period``, descending in i.
    """
    c = config
    t01 = c.dt_branch + c.dt_swap + c.dt_raise + c.dt_trigger
    t_end = c.cycles * c.cycle_period
    positions = []
    for i in range(1, c.cycles + 1):
        t_mi = t01 + (i - 1) * c.cycle_period + c.scatter_window
        positions.append(c.r2_ref + c.v_drift * (t_end - t_mi - c.decel_duration))
    distances = {
        (i, j): c.v_drift * (j - i) * c.cycle_period
        for i in range(1, c.cycles + 1)
        for j in range(i, c.cycles + 1)
    }
    return positions, distances


def arriving_times(config: ScheduleConfig) -> tuple[list[float], dict[tuple[int, int], float], float]:
    """Return arrival times relative to the earliest one.

    ``T_i = (i - 1) * cycle_period * v0 / v`` (the bouncing dead time and
    the common flight legs cancel in differences and are left to the
    simulation); differences ``(j - i) * cycle_period * v0 / v``; the
    maximum is ``(cycles - 1) * cycle_period * v0 / v``.
    """
    c = config
    times = [(i - 1) * c.cycle_period * c.ratio for i in range(1, c.cycles + 1)]
    diffs = {
        (i, j): (j - i) * c.cycle_period * c.ratio
        for i in range(1, c.cycles + 1)
        for j in range(i, c.cycles + 1)
    }
    return times, diffs, (c.cycles - 1) * c.cycle_period * c.ratio


def predicted_fidelity(config: ScheduleConfig, j: int, regime: int) -> float:
    """Recapture probability for a trigger in cycle j.

    Regime 1: working trap held, probability
    ``recapture_amplitude(trap_quanta, omega_trap, dT)**2`` at the arrival
    offset of cycle j.  Regime 2: second braking plus trap retune; the
    second-order series in the (small) capture-phase is returned, falling
    back to the exact exponential with a warning when the phase is not
    small against pi.
    """
    if not 1 <= j <= config.cycles:
        raise ValueError(f"cycle index {j} outside 1..{config.cycles}")
    if regime not in (1, 2):
        raise ValueError("regime must be 1 or 2")
    offset = (j - 1) * config.cycle_period * config.ratio
    if regime == 1:
        return recapture_amplitude(config.trap_quanta, config.omega_trap, offset) ** 2
    max_offset = (config.cycles - 1) * config.cycle_period * config.ratio
    if not max_offset * config.omega_capture < 0.1 * math.pi:
        warnings.warn(
            "capture phase not small against pi; returning the exact "
            "exponential instead of the quadratic series",
            stacklevel=2,
        )
        return recapture_amplitude(
            config.capture_quanta_default, config.omega_capture, offset
        ) ** 2
    if j == 1:
        return 1.0
    return recapture_probability_series(
        config.capture_quanta_default,
        config.omega_capture,
        config.cycle_period,
        j,
        config.ratio,
    )


def toy_estimate(omega_p: float, config: ScheduleConfig, j: int) -> float:
    """Rotation-pulse estimate 1 - [omega_p (j-1) cycle_period ratio]^2 / 4.

    A lock built from one near-quarter-turn rotation pulse of strength
    omega_p mistimes by the arrival offset; the quadratic estimate of the
    held probability follows.  Out-of-regime (negative estimate) raises.
    """
    if not 1 <= j <= config.cycles:
        raise ValueError(f"cycle index {j} outside 1..{config.cycles}")
    arg = omega_p * (j - 1) * config.cycle_period * config.ratio
    if arg * arg >= 4.0:
        raise ValueError("rotation-pulse estimate out of regime (below zero)")
    return 1.0 - 0.25 * arg * arg


def search_threshold(n: int, p_n: float, fidelity: float | None = None):
    """Threshold 1 - ln(p_n)/n a per-factor fidelity must exceed.

    With ``fidelity`` given, returns (threshold, fidelity > threshold).
    """
    if n < 1:
        raise ValueError("qubit count must be >= 1")
    if p_n < 1:
        raise ValueError("polynomial value must be >= 1")
    thr = 1.0 - math.log(p_n) / n
    if fidelity is None:
        return thr
    return thr, fidelity > thr

"""1D two-level wave-packet dynamics in the double-well holding field.

Split-operator spectral stepping of the Schroedinger equation for an atom
with two internal levels in a piecewise potential: a harmonic left well
whose right flank is clipped at the barrier height, a square barrier, a
flat-floored right well, and high confining pads standing in for the outer
hard walls.  Laser pulses enter as instantaneous unitary kicks, either
window-limited phase kicks in position space (with an optional internal
level swap, the net effect of a two-photon transfer) or momentum-band
block swaps (Doppler-selective pulses that act on one velocity class
only).

Units: hbar = 1; mass and the working trap frequency default to 1.  The
Gaussian convention is |psi(x)|^2 ~ exp(-(x-x0)^2 / sigma^2), so the ground
packet of a trap at frequency w has sigma = 1/sqrt(m w).

The full halting cycle is simulated by :func:`run_halting_cycle` against a
lab-time stage plan shared by every trigger cycle; see
:class:`CyclePlan`.  To keep the closed-form kinematics resolvable at desk
scale the default full-cycle geometry uses a heavy mass: packet shapes stay
frozen over a cycle, which is the regime the closed forms assume.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .control_kinematics import ScheduleConfig


@dataclass(frozen=True)
class Grid1D:
    """Uniform spatial grid with the matching spectral momentum grid."""

    x_min: float
    x_max: float
    n: int

    def __post_init__(self):
        if self.n < 256 or self.n & (self.n - 1):
            raise ValueError("n must be a power of two, at least 256")
        if self.x_max <= self.x_min:
            raise ValueError("empty grid")

    @property
    def dx(self) -> float:
        return (self.x_max - self.x_min) / self.n

    @property
    def x(self) -> np.ndarray:
        return self.x_min + self.dx * np.arange(self.n)

    @property
    def k(self) -> np.ndarray:
        return 2.0 * math.pi * np.fft.fftfreq(self.n, d=self.dx)

    @property
    def dk(self) -> float:
        return 2.0 * math.pi / (self.x_max - self.x_min)

    @property
    def k_max(self) -> float:
        return math.pi / self.dx


@dataclass(frozen=True)
class PotentialSpec:
    """Double-well geometry.

    Left well: harmonic with force constant K about ``center``, clipped at
    the barrier height on its right flank (the wall between well and
    barrier is exactly as high as the barrier).  Barrier: square, height
    ``barrier_height``, width ``barrier_width``, starting at the clip
    point.  Right well: flat floor at zero over ``right_len``.  Outer
    walls: confining pads of height pad_factor * barrier_height.
    """

    force_constant: float
    center: float
    barrier_height: float
    barrier_width: float
    right_len: float
    pad_factor: float = 1e4
    pad_width: float = 1.5

    def __post_init__(self):
        if min(self.force_constant, self.barrier_height, self.barrier_width,
               self.right_len) <= 0:
            raise ValueError("geometry lengths and heights must be positive")

    @property
    def clip_x(self) -> float:
        """Where the right flank reaches the barrier height."""
        return self.center + math.sqrt(2.0 * self.barrier_height / self.force_constant)

    @property
    def barrier_end(self) -> float:
        return self.clip_x + self.barrier_width

    @property
    def wall_x(self) -> float:
        return self.barrier_end + self.right_len

    @property
    def pad_height(self) -> float:
        return self.pad_factor * self.barrier_height


def build_potential(spec: PotentialSpec, grid: Grid1D) -> np.ndarray:
    """Sample the double-well on the grid."""
    if spec.wall_x + spec.pad_width > grid.x_max or spec.center < grid.x_min:
        raise ValueError("double-well geometry does not fit the grid")
    x = grid.x
    v = np.zeros_like(x)
    left = x < spec.clip_x
    v[left] = 0.5 * spec.force_constant * (x[left] - spec.center) ** 2
    v[left] = np.minimum(v[left], spec.pad_height)  # cap the rising flank
    barrier = (x >= spec.clip_x) & (x < spec.barrier_end)
    v[barrier] = spec.barrier_height
    # right floor stays zero up to the wall
    v[x >= spec.wall_x] = spec.pad_height
    v[x <= grid.x_min + spec.pad_width] = spec.pad_height
    return v


def harmonic_potential(
    grid: Grid1D, omega: float, center: float, mass: float, pad_height: float | None = None,
    pad_width: float = 1.5,
) -> np.ndarray:
    """Single harmonic well across the grid (used for sudden retunes)."""
    v = 0.5 * mass * omega**2 * (grid.x - center) ** 2
    if pad_height is not None:
        v = np.minimum(v, pad_height)
        v[grid.x >= grid.x_max - pad_width] = pad_height
        v[grid.x <= grid.x_min + pad_width] = pad_height
    return v


@dataclass
class SpinorWave:
    """Two-internal-level wavefunction on a grid."""

    grid: Grid1D
    components: np.ndarray  # shape (2, n)
    mass: float = 1.0

    def __post_init__(self):
        self.components = np.asarray(self.components, dtype=complex)
        if self.components.shape != (2, self.grid.n):
            raise ValueError("components must have shape (2, n)")

    @property
    def norm(self) -> float:
        return float(np.sum(np.abs(self.components) ** 2) * self.grid.dx)

    def density(self) -> np.ndarray:
        return np.sum(np.abs(self.components) ** 2, axis=0)

    def copy(self) -> "SpinorWave":
        return SpinorWave(self.grid, self.components.copy(), self.mass)


def init_gaussian(
    grid: Grid1D,
    x0: float,
    p0: float,
    sigma: float,
    level: int = 0,
    mass: float = 1.0,
) -> SpinorWave:
    """Normalized Gaussian packet on one internal level.

    |psi|^2 ~ exp(-(x-x0)^2 / sigma^2); mean momentum p0.  The support must
    clear the boundaries by at least five sigma.
    """
    if not (grid.x_min + 5 * sigma <= x0 <= grid.x_max - 5 * sigma):
        raise ValueError("packet support violates the five-sigma boundary margin")
    if sigma < 8 * grid.dx:
        raise ValueError("grid must resolve the packet width by at least 8 points")
    if level not in (0, 1):
        raise ValueError("level must be 0 or 1")
    x = grid.x
    psi = (math.pi * sigma**2) ** -0.25 * np.exp(
        -((x - x0) ** 2) / (2.0 * sigma**2) + 1j * p0 * x
    )
    comps = np.zeros((2, grid.n), dtype=complex)
    comps[level] = psi
    wave = SpinorWave(grid, comps, mass)
    wave.components /= math.sqrt(wave.norm)
    return wave


def stability_dt(grid: Grid1D, mass: float) -> float:
    """Largest step with kinetic phase per step below pi/4 at the grid edge."""
    return 0.25 * math.pi * 2.0 * mass / grid.k_max**2


def evolve(
    wave: SpinorWave,
    potential: np.ndarray,
    dt: float,
    steps: int,
    check_norm: bool = True,
) -> SpinorWave:
    """Strang-split spectral propagation for `steps` equal steps of dt.

    The potential acts identically on both internal levels (it couples to
    the center of mass only).  Norm is conserved to rounding; a drift
    beyond 1e-10 per 1e4 steps raises.
    """
    if steps == 0:
        return wave.copy()
    if dt > stability_dt(wave.grid, wave.mass) * (1 + 1e-12):
        raise ValueError(
            f"dt={dt} exceeds the kinetic-phase stability bound "
            f"{stability_dt(wave.grid, wave.mass):.3e}"
        )
    expV_half = np.exp(-0.5j * dt * potential)
    expV_full = expV_half * expV_half
    expK = np.exp(-0.5j * dt * wave.grid.k**2 / wave.mass)
    psi = wave.components.copy()
    norm0 = np.sum(np.abs(psi) ** 2)
    psi *= expV_half
    for step in range(steps):
        psi = np.fft.ifft(np.fft.fft(psi, axis=1) * expK, axis=1)
        psi *= expV_full if step < steps - 1 else expV_half
    if check_norm:
        drift = abs(np.sum(np.abs(psi) ** 2) / norm0 - 1.0)
        if drift > 1e-10 * max(1.0, steps / 1e4):
            raise RuntimeError(f"norm drifted by {drift:.2e} over {steps} steps")
    return SpinorWave(wave.grid, psi, wave.mass)


@dataclass(frozen=True)
class KickSpec:
    """Window-limited photon-recoil kick.

    Momentum transfer ``direction * momentum`` (direction +1 accelerates
    along +x, -1 brakes), applied to ``target_level`` inside
    ``window = (x_lo, x_hi)``; with ``level_swap`` the population moves to
    the other level (two-photon transfer), picking up the same recoil.
    """

    momentum: float
    direction: int
    target_level: int
    level_swap: bool = False
    window: tuple[float, float] = (-math.inf, math.inf)

    def __post_init__(self):
        if self.direction not in (-1, 1):
            raise ValueError("direction must be +1 or -1")
        if self.momentum < 0:
            raise ValueError("momentum must be >= 0")
        if self.target_level not in (0, 1):
            raise ValueError("target_level must be 0 or 1")


def apply_kick(wave: SpinorWave, kick: KickSpec) -> SpinorWave:
    """Apply the kick; exactly norm-preserving (pointwise unitary)."""
    x = wave.grid.x
    lo, hi = kick.window
    inside = (x >= lo) & (x <= hi)
    phase = np.exp(1j * kick.direction * kick.momentum * x[inside])
    out = wave.components.copy()
    t = kick.target_level
    if kick.level_swap:
        o = 1 - t
        moved_to_other = phase * wave.components[t, inside]
        moved_to_target = np.conj(phase) * wave.components[o, inside]
        out[o, inside] = moved_to_other
        out[t, inside] = moved_to_target
    else:
        out[t, inside] = phase * wave.components[t, inside]
    return SpinorWave(wave.grid, out, wave.mass)


def band_kick(
    wave: SpinorWave,
    delta_p: float,
    band_center: float,
    band_half_width: float,
    level: int | None = None,
) -> SpinorWave:
    """Momentum shift applied only to one velocity class.

    Spectral amplitudes with momentum in ``band_center +- band_half_width``
    are moved to momentum + delta_p (and the amplitudes sitting at the
    destination move back), a pointwise-unitary block swap in momentum
    space.  delta_p snaps to the nearest whole number of momentum bins.
    Models pulses that address a single Doppler class, sparing the rest.
    """
    shift_bins = round(delta_p / wave.grid.dk)
    if shift_bins == 0:
        return wave.copy()
    if 2.0 * band_half_width >= abs(shift_bins) * wave.grid.dk:
        raise ValueError("band wider than the shift; the block swap would overlap")
    k = wave.grid.k
    band = np.abs(k - band_center) <= band_half_width
    idx = np.nonzero(band)[0]
    dst = (idx + shift_bins) % wave.grid.n
    out = wave.components.copy()
    levels = (0, 1) if level is None else (level,)
    for lv in levels:
        spec = np.fft.fft(out[lv])
        moved = spec[idx].copy()
        spec[idx] = spec[dst]
        spec[dst] = moved
        out[lv] = np.fft.ifft(spec)
    return SpinorWave(wave.grid, out, wave.mass)


@dataclass(frozen=True)
class Measurements:
    norm: float
    x_mean: float
    p_mean: float
    energy: float | None
    p_left: float
    p_right: float
    spread: float
    overlap: complex | None


def measure(
    wave: SpinorWave,
    potential: np.ndarray | None = None,
    x_split: float | None = None,
    reference: SpinorWave | None = None,
) -> Measurements:
    """Norm, first moments, energy, left/right weights, spread, overlap.

    ``x_split`` defaults to the grid midpoint; ``spread`` is normalized so
    a fresh Gaussian of width sigma measures sigma.
    """
    g = wave.grid
    dx = g.dx
    dens = wave.density()
    norm = float(np.sum(dens) * dx)
    x_mean = float(np.sum(g.x * dens) * dx / norm)
    x2 = float(np.sum(g.x**2 * dens) * dx / norm)
    spread = math.sqrt(max(0.0, 2.0 * (x2 - x_mean**2)))

    spec = np.fft.fft(wave.components, axis=1)
    sdens = np.sum(np.abs(spec) ** 2, axis=0)
    p_mean = float(np.sum(g.k * sdens) / np.sum(sdens))
    energy = None
    if potential is not None:
        kin = float(np.sum(g.k**2 / (2 * wave.mass) * sdens) / np.sum(sdens))
        pot = float(np.sum(potential * dens) * dx / norm)
        energy = kin + pot

    split = 0.5 * (g.x_min + g.x_max) if x_split is None else x_split
    # the sample sitting on the split plane counts half to each side
    weights = np.where(g.x < split - 0.5 * dx, 1.0, 0.0)
    weights[np.abs(g.x - split) <= 0.5 * dx] = 0.5
    p_left = float(np.sum(dens * weights) * dx)
    p_right = norm - p_left

    overlap = None
    if reference is not None:
        overlap = complex(np.sum(np.conj(reference.components) * wave.components) * dx)
    return Measurements(norm, x_mean, p_mean, energy, p_left, p_right, spread, overlap)


# ----------------------------------------------------------------------
# barrier transmission

def square_barrier_transmission(E: float, V0: float, a: float, mass: float = 1.0) -> float:
    """Plane-wave transmission through a square barrier (analytic)."""
    if E <= 0:
        raise ValueError("energy must be positive")
    if V0 == 0:
        return 1.0
    if abs(E - V0) < 1e-12 * V0:
        return 1.0 / (1.0 + 0.5 * mass * V0 * a * a)
    if E < V0:
        beta = math.sqrt(2 * mass * (V0 - E))
        s = math.sinh(beta * a)
        return 1.0 / (1.0 + V0**2 * s * s / (4 * E * (V0 - E)))
    kp = math.sqrt(2 * mass * (E - V0))
    s = math.sin(kp * a)
    return 1.0 / (1.0 + V0**2 * s * s / (4 * E * (E - V0)))


def transmission_scan(
    E: float,
    V0: float,
    a: float,
    mass: float = 1.0,
    n: int = 2048,
    rel_bandwidth: float = 0.04,
) -> float:
    """Transmission probability from a quasi-monochromatic packet.

    A packet with momentum spread ``rel_bandwidth * k0`` scatters off the
    barrier; the energy-resolved transmission is read off as the ratio of
    the transmitted spectral density to the incident one at k0 (free
    propagation preserves spectral densities, so this removes the bias a
    total-probability estimate picks up from the packet's energy spread).
    """
    k0 = math.sqrt(2 * mass * E)
    sigma_k = rel_bandwidth * k0
    sigma_x = 1.0 / (math.sqrt(2.0) * sigma_k)
    if sigma_k * a > 4.0:
        raise ValueError("packet bandwidth too wide for the requested resolution")

    # barrier at [0, a]; launch 6 sigma to the left, room on both sides for
    # the reflected and transmitted packets to come to rest well separated
    start = 6.0 * sigma_x
    grid = Grid1D(-start - 7.0 * sigma_x - a, start + a + 7.0 * sigma_x, n)
    # sub-cell edge weighting keeps the effective barrier width at `a`
    # to second order in dx (plain masking quantizes it by a whole cell)
    lo_edges = grid.x - 0.5 * grid.dx
    hi_edges = grid.x + 0.5 * grid.dx
    overlap = np.clip(np.minimum(hi_edges, a) - np.maximum(lo_edges, 0.0), 0.0, grid.dx)
    v = V0 * overlap / grid.dx
    if grid.dx > sigma_x / 8:
        raise ValueError("grid too coarse for the packet width; raise n")
    if grid.k_max < k0 * 2.5:
        raise ValueError("momentum grid too small; raise n or bandwidth")

    wave = init_gaussian(grid, -start, k0, sigma_x, level=0, mass=mass)
    spec0 = np.abs(np.fft.fft(wave.components[0])) ** 2

    v_speed = k0 / mass
    t_total = (start + a + 6.0 * sigma_x) / v_speed
    dt_max = stability_dt(grid, mass)
    steps = int(math.ceil(t_total / dt_max))
    wave = evolve(wave, v, t_total / steps, steps)

    # transmitted part: beyond the barrier, tapered on over two sigma to
    # keep mask-edge spectral leakage out of the tiny transmitted signal
    taper_lo, taper_hi = a + 0.5 * sigma_x, a + 2.0 * sigma_x
    mask = np.clip((grid.x - taper_lo) / (taper_hi - taper_lo), 0.0, 1.0)
    mask = 0.5 - 0.5 * np.cos(math.pi * mask)
    spec_t = np.abs(np.fft.fft(mask * wave.components[0])) ** 2

    # parabolic interpolation of the log-ratio to the exact k0
    ratio = np.maximum(spec_t / np.maximum(spec0, 1e-300), 1e-300)
    i0 = int(np.argmin(np.abs(grid.k - k0)))
    ks = grid.k[[i0 - 1, i0, i0 + 1]]
    ys = np.log(ratio[[i0 - 1, i0, i0 + 1]])
    coef = np.polyfit(ks - k0, ys, 2)
    return float(math.exp(coef[2]))


# ----------------------------------------------------------------------
# the full halting cycle

@dataclass(frozen=True)
class LadderSpec:
    """A braking or speed-up pulse sequence: n_kicks equal recoil kicks
    spread over `duration`, walking the packet from p_start to p_end."""

    t_start: float          # lab time of the first kick
    duration: float
    p_start: float
    p_end: float
    n_kicks: int

    @property
    def step(self) -> float:
        return (self.p_end - self.p_start) / self.n_kicks

    def kick_times(self) -> np.ndarray:
        if self.n_kicks == 1:
            return np.array([self.t_start])
        return self.t_start + np.linspace(0.0, self.duration, self.n_kicks)


@dataclass(frozen=True)
class PotentialSwap:
    t: float
    label: str


@dataclass(frozen=True)
class CyclePlan:
    """Lab-time stage plan for one run set.

    A braking ladder is scheduled at every cycle's entry time; the
    speed-up ladder, the second braking ladder, the trap swap, and the
    snapshot are one-off events at common lab times.  In the run for
    trigger cycle i only braking ladder i is actually applied: the pulses
    of the other cycles act on nothing in that run by protocol design
    (a pulse schedule that also acted on the already-parked packet would
    re-launch it -- the same two-state unitarity conflict the lock faces,
    resolved physically by the pulses' selectivity and modelled here by
    firing each sequence in the run it serves).
    """

    schedule: ScheduleConfig
    geometry: PotentialSpec
    grid: Grid1D
    regime: int
    sigma_prep: float
    launch_x: float
    kick_window: tuple[float, float]
    decel_ladders: tuple[LadderSpec, ...]
    accel_ladder: LadderSpec
    second_decel: LadderSpec | None   # regime 2 only
    capture_swap: PotentialSwap | None
    capture_center: float
    snapshot_time: float
    detector_x: float                 # regime-1 arrival plane
    v_drift_eff: float
    v_capture_eff: float
    meas_interval: float


def build_cycle_plan(
    schedule: ScheduleConfig,
    regime: int = 2,
    sigma_prep: float = 3.5,
    grid: Grid1D | None = None,
    n_decel_kicks: int = 7,
    v_capture: float = 0.02,
    barrier_ratio: float = 80.0,
    barrier_width: float = 3.0,
    right_len: float = 32.0,
    brake2_x: float = 20.0,
) -> CyclePlan:
    """Derive grid, geometry, and the stage plan from a schedule.

    The packet launches from the left-well bottom with the full exit
    momentum (the trigger pulse shapes it: width sigma_prep, mean momentum
    m * v_exit).  Event times follow from closed-form kinematics, so every
    trigger cycle sees the same one-off events at the same lab times.

    ``barrier_ratio`` sets exit energy over barrier height and defaults
    high ("much higher than the barrier"): crossing the clipped flank
    rotates the packet in the well's phase space and smears its momentum
    by roughly barrier_height * sqrt(2 m / E), so a low barrier keeps the
    packet's momentum class narrow, which in turn keeps the free-spreading
    mismatch between trigger cycles below the recapture signal.
    """
    c = schedule
    m = c.mass
    v_exit = c.v_exit
    p_exit = m * v_exit

    spec = PotentialSpec(
        force_constant=m * c.omega_trap**2,
        center=0.0,
        barrier_height=c.energy_exit / barrier_ratio,
        barrier_width=barrier_width,
        right_len=right_len,
    )
    launch_x = spec.center
    if spec.clip_x - launch_x < 4.5 * sigma_prep:
        raise ValueError("left well too stiff: packet overlaps the barrier at launch")
    if grid is None:
        lo = launch_x - 6.5 * sigma_prep
        hi = spec.wall_x + 2.0
        dx_needed = math.pi / (1.3 * p_exit)
        n = 256
        while (hi - lo) / n > min(dx_needed, sigma_prep / 8):
            n *= 2
        grid = Grid1D(lo, hi, n)

    # outbound transit: harmonic stretch to the clip point, then the
    # barrier plateau at reduced speed, then the flat floor at v_exit
    v_barrier = math.sqrt(max(v_exit**2 - 2 * spec.barrier_height / m, 1e-12))
    t_flank = math.asin(
        min(1.0, math.sqrt(spec.barrier_height / c.energy_exit))
    ) / c.omega_trap
    t_cross = t_flank + spec.barrier_width / v_barrier
    if c.scatter_window < t_cross + 1.5 * sigma_prep / v_exit:
        raise ValueError(
            f"scatter_window {c.scatter_window} too short: the packet needs "
            f"about {t_cross + 1.5 * sigma_prep / v_exit:.1f} to clear the barrier"
        )

    def pos_after_entry(t_from_launch: float) -> float:
        """Mean position on the flat floor, before any kick."""
        return spec.barrier_end + v_exit * (t_from_launch - t_cross)

    # ladder pulses are spatially uniform ultra-broadband kicks: a finite
    # action zone would clip the packet tails at ratio-dependent depths and
    # strand slow coherent strays in the capture region
    window = (grid.x_min, grid.x_max)

    t01 = c.dt_branch + c.dt_swap + c.dt_raise + c.dt_trigger
    t_mr = c.cycles * c.cycle_period

    # braking ladder: exit momentum stepped down to the drift momentum
    p_drift = m * c.v_drift
    decel_ladders = tuple(
        LadderSpec(
            t_start=t01 + (i - 1) * c.cycle_period + c.scatter_window,
            duration=c.decel_duration,
            p_start=p_exit,
            p_end=p_drift,
            n_kicks=n_decel_kicks,
        )
        for i in range(1, c.cycles + 1)
    )
    v_drift_eff = p_drift / m

    def pos_at_brake_end() -> float:
        return pos_after_entry(c.scatter_window) + (v_exit + v_drift_eff) / 2 * c.decel_duration

    p_return = m * c.v_return
    accel = LadderSpec(
        t_start=t_mr,
        duration=c.accel_duration,
        p_start=p_drift,
        p_end=p_return,
        n_kicks=n_decel_kicks,
    )
    v_return_eff = c.v_return
    t_acc_end = t_mr + c.accel_duration

    def pos_at_acc_end(i: int) -> float:
        t_launch_i = t01 + (i - 1) * c.cycle_period
        drift = (t_mr - (t_launch_i + c.scatter_window + c.decel_duration)) * v_drift_eff
        return (
            pos_at_brake_end()
            + drift
            + (v_drift_eff + v_return_eff) / 2 * c.accel_duration
        )

    def bounce_time(i: int) -> float:
        return t_acc_end + (spec.wall_x - pos_at_acc_end(i)) / v_return_eff

    t_bounce_first = bounce_time(1)                # furthest right, bounces first
    t_bounce_last = bounce_time(c.cycles)

    def pos_returning(i: int, t: float) -> float:
        return spec.wall_x - v_return_eff * (t - bounce_time(i))

    second = None
    capture_swap = None
    capture_center = 0.0
    v_capture_out = 0.0
    if regime == 2:
        # brake the returning packets once the slowest has bounced and the
        # leading one reaches the braking region
        t_dec2 = max(
            t_bounce_first + (spec.wall_x - brake2_x) / v_return_eff,
            t_bounce_last + 2.0,
        )
        second = LadderSpec(
            t_start=t_dec2,
            duration=c.decel_duration,
            p_start=-p_return,
            p_end=-m * v_capture,
            n_kicks=n_decel_kicks,
        )
        v_cap_eff = -v_capture
        t_trap = t_dec2 + c.decel_duration + 4.0
        pos_dec2_end = (
            pos_returning(1, t_dec2)
            - (v_return_eff + v_capture) / 2 * c.decel_duration
        )
        capture_center = pos_dec2_end + v_cap_eff * (t_trap - (t_dec2 + c.decel_duration))
        capture_swap = PotentialSwap(t=t_trap, label="capture")
        snapshot_time = t_trap + 6.0
        v_capture_out = v_capture
        # the slammed trap must hold the orbit clear of walls and barrier
        ampl = v_capture_out / c.omega_capture
        margin = 4.5 * sigma_prep / math.sqrt(2.0)
        if capture_center + ampl + margin > spec.wall_x:
            raise ValueError("capture orbit reaches the far wall; lower v_capture")
        if capture_center - ampl - margin < grid.x_min + 2.0:
            raise ValueError("capture orbit reaches the left boundary")
    else:
        # regime 1: packets recross the barrier into the left well; leave
        # time for the slowest to reach the detector plane at the well bottom
        t_back = (spec.wall_x - spec.center) / v_return_eff + t_flank
        snapshot_time = t_bounce_last + t_back + 12.0

    return CyclePlan(
        schedule=c,
        geometry=spec,
        grid=grid,
        regime=regime,
        sigma_prep=sigma_prep,
        launch_x=launch_x,
        kick_window=window,
        decel_ladders=decel_ladders,
        accel_ladder=accel,
        second_decel=second,
        capture_swap=capture_swap,
        capture_center=capture_center,
        snapshot_time=snapshot_time,
        detector_x=spec.center,
        v_drift_eff=v_drift_eff,
        v_capture_eff=v_capture_out,
        meas_interval=max(0.5, c.cycle_period / 96.0),
    )


@dataclass
class TrajectoryRecord:
    """Outcome of one full-cycle run."""

    trigger_cycle: int
    arrival_time: float | None          # regime-1 detector crossing (lab time)
    snapshot: SpinorWave | None         # state at the common snapshot time
    snapshot_time: float
    recapture_overlap: float | None     # |<reference | this>| at the snapshot
    min_locked_p_right: float           # far-well weight during the locked phase
    samples: list[tuple[float, Measurements]] = field(default_factory=list)

    def sample_arrays(self):
        ts = np.array([t for t, _ in self.samples])
        xs = np.array([m.x_mean for _, m in self.samples])
        ps = np.array([m.p_mean for _, m in self.samples])
        return ts, xs, ps


def _window_kick(wave: SpinorWave, dp: float, window: tuple[float, float]) -> SpinorWave:
    """Recoil kick on both internal levels inside the action window."""
    direction = 1 if dp >= 0 else -1
    out = wave
    for level in (0, 1):
        out = apply_kick(
            out,
            KickSpec(
                momentum=abs(dp),
                direction=direction,
                target_level=level,
                window=window,
            ),
        )
    return out


def run_halting_cycle(
    plan: CyclePlan,
    trigger_cycle: int,
    reference: SpinorWave | None = None,
) -> TrajectoryRecord:
    """Simulate the locked phase and return for one trigger cycle.

    The packet launches from the left well at its cycle's trigger time with
    the exit momentum, scatters into the far well, is braked by its cycle's
    ladder, drifts, is sped up by the common ladder, bounces off the far
    wall and returns.  In regime 2 the second braking ladder and the sudden
    capture trap follow, and the state is snapshotted at the common lab
    time for the recapture-overlap comparison; in regime 1 the packet
    recrosses the barrier and the detector-plane crossing gives the arrival
    time.
    """
    c = plan.schedule
    if not 1 <= trigger_cycle <= c.cycles:
        raise ValueError(f"trigger cycle {trigger_cycle} outside 1..{c.cycles}")
    grid = plan.grid
    m = c.mass
    t01 = c.dt_branch + c.dt_swap + c.dt_raise + c.dt_trigger
    t_launch = t01 + (trigger_cycle - 1) * c.cycle_period

    v_dw = build_potential(plan.geometry, grid)
    v_now = v_dw

    wave = init_gaussian(
        grid, plan.launch_x, m * c.v_exit, plan.sigma_prep, level=1, mass=m
    )

    # events this run executes: its own braking ladder plus the one-off
    # common events (see CyclePlan for why the other ladders do not fire)
    events: list[tuple[float, str, object]] = []
    ladders = [plan.decel_ladders[trigger_cycle - 1], plan.accel_ladder]
    if plan.second_decel is not None:
        ladders.append(plan.second_decel)
    for lad in ladders:
        for t_k in lad.kick_times():
            events.append((t_k, "kick", lad.step))
    if plan.capture_swap is not None:
        events.append((plan.capture_swap.t, "swap", plan.capture_swap.label))
    events.append((plan.snapshot_time, "snapshot", None))
    events = sorted(
        (e for e in events if e[0] >= t_launch - 1e-12), key=lambda e: e[0]
    )

    dt_max = 0.9 * stability_dt(grid, m)
    t_now = t_launch
    samples: list[tuple[float, Measurements]] = []
    snapshot = None
    min_locked_pr = 1.0
    lock_start = t_launch + c.scatter_window + c.decel_duration
    lock_end = plan.accel_ladder.t_start

    def record(t):
        nonlocal min_locked_pr
        meas = measure(wave, potential=v_now, x_split=plan.geometry.clip_x)
        samples.append((t, meas))
        if lock_start <= t <= lock_end:
            min_locked_pr = min(min_locked_pr, meas.p_right)

    def advance(to_t):
        nonlocal wave, t_now
        while to_t - t_now > 1e-9:
            seg = min(plan.meas_interval, to_t - t_now)
            steps = max(1, int(math.ceil(seg / dt_max)))
            wave = evolve(wave, v_now, seg / steps, steps, check_norm=False)
            t_now += seg
            record(t_now)

    record(t_now)
    for t_e, kind, payload in events:
        advance(t_e)
        if kind == "kick":
            wave = _window_kick(wave, payload, plan.kick_window)
        elif kind == "swap" and payload == "capture":
            v_now = harmonic_potential(
                grid, c.omega_capture, plan.capture_center, m,
                pad_height=plan.geometry.pad_height,
            )
        elif kind == "snapshot":
            snapshot = wave.copy()

    drift = abs(wave.norm - 1.0)
    if drift > 1e-7:
        raise RuntimeError(f"norm drifted by {drift:.2e} over the full cycle")

    arrival = None
    if plan.regime == 1:
        arrival = _detector_crossing(samples, plan.detector_x, t_launch + c.scatter_window)

    overlap = None
    if reference is not None and snapshot is not None:
        overlap = abs(measure(snapshot, reference=reference).overlap)

    return TrajectoryRecord(
        trigger_cycle=trigger_cycle,
        arrival_time=arrival,
        snapshot=snapshot,
        snapshot_time=plan.snapshot_time,
        recapture_overlap=overlap,
        min_locked_p_right=min_locked_pr,
        samples=samples,
    )


def _detector_crossing(samples, x_det: float, after: float) -> float | None:
    """First leftward crossing of the detector plane, interpolated."""
    for (t0, m0), (t1, m1) in zip(samples, samples[1:]):
        if t0 < after:
            continue
        if m0.x_mean > x_det >= m1.x_mean and m0.p_mean < 0:
            f = (m0.x_mean - x_det) / (m0.x_mean - m1.x_mean)
            return t0 + f * (t1 - t0)
    return None


def halting_cycle_sweep(
    plan: CyclePlan, trigger_cycles: list[int] | None = None
) -> dict[int, TrajectoryRecord]:
    """Run several trigger cycles against one plan.

    The earliest requested cycle serves as the recapture reference: other
    records carry |<psi_ref | psi_j>| at the common snapshot time.
    """
    cycles = trigger_cycles or list(range(1, plan.schedule.cycles + 1))
    cycles = sorted(cycles)
    records: dict[int, TrajectoryRecord] = {}
    ref_record = run_halting_cycle(plan, cycles[0])
    if ref_record.snapshot is not None:
        ref_record.recapture_overlap = 1.0
    records[cycles[0]] = ref_record
    for j in cycles[1:]:
        records[j] = run_halting_cycle(plan, j, reference=ref_record.snapshot)
    return records

"""Exact statevector engine for the measurement-free halting program.

The composite system is (halting register) x (branch qubit) x (functional
register).  The halting register is a qudit:

* ``direct`` variant, 3 levels: IDLE, UNSTABLE, LOCKED.  The trigger maps
  IDLE <-> UNSTABLE directly when the functional register shows the blank.
* ``staged`` variant, 4 levels: IDLE, READY, UNSTABLE, LOCKED.  A
  level-raise (IDLE <-> READY on blank) followed by an unconditional
  excitation (READY <-> UNSTABLE) replaces the direct trigger; this is the
  form the atomic realization takes, where READY is the flagged internal
  state of the atom still sitting in its ground motional packet.

One program cycle applies, in order: branch flip (on the desired symbol),
symbol swap (desired <-> blank under IDLE), the trigger stage(s), the lock
step, and the conditional shift (cyclic step if the branch bit is 0).

Lock semantics
--------------
A single time-only unitary cannot both send UNSTABLE to LOCKED and hold
LOCKED fixed; that is exactly the two-state conflict quantified by
:func:`conflict_bound`.  The physical resolution is that "LOCKED" is a
family of states distinguished by position, one per entry time.  The engine
mirrors this: each cycle's lock step transfers UNSTABLE amplitude into a
fresh *parked channel* labelled by the cycle index, which later gates never
touch.  The whole run is therefore exactly norm-preserving, and the channel
label (reported in the trace as the trigger cycle) is what keeps distinct
inputs distinguishable even though every ideal run ends in the same
composite basis state (LOCKED, 1, blank).

:func:`make_gate` still exposes the lock as a matrix on the plain qudit
space: the unitary completion of the transfer, rotating UNSTABLE -> LOCKED
and LOCKED -> -UNSTABLE.  That matrix is what the commutation checks use.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum

import numpy as np

from .cyclic_group import FunctionalSubspace, apply_shift

_ATOL = 1e-12


class Level(Enum):
    """Halting-register levels."""

    IDLE = "idle"          # program running, register unflagged
    READY = "ready"        # flagged internal state, ground packet (staged only)
    UNSTABLE = "unstable"  # excited packet about to scatter out
    LOCKED = "locked"      # held in the far well until the program ends


class GateKind(Enum):
    BRANCH_FLIP = "branch_flip"        # flip branch bit iff symbol == desired
    SYMBOL_SWAP = "symbol_swap"        # desired <-> blank iff level == IDLE
    TRIGGER = "trigger"                # IDLE <-> UNSTABLE iff symbol == blank
    LEVEL_RAISE = "level_raise"        # IDLE <-> READY iff symbol == blank
    EXCITE = "excite"                  # READY <-> UNSTABLE, any symbol
    LOCK = "lock"                      # UNSTABLE -> LOCKED rotation
    SHIFT_IF_RUNNING = "shift_if_running"  # cyclic shift iff branch bit == 0


DIRECT_LEVELS = (Level.IDLE, Level.UNSTABLE, Level.LOCKED)
STAGED_LEVELS = (Level.IDLE, Level.READY, Level.UNSTABLE, Level.LOCKED)


@dataclass(frozen=True)
class LockModel:
    """Residual amplitude and phase of the per-cycle lock step.

    ``epsilon0`` is the amplitude left behind on UNSTABLE after one lock
    step; the transferred amplitude carries the phase ``exp(-i*gamma)``.
    ``ideal`` mode forces epsilon0 = 0.  ``rotation_pulse`` models the lock
    as a simple rotation slightly off a quarter turn, leaving a
    cos(theta) = epsilon0 residue.
    """

    epsilon0: float = 0.0
    gamma: float = 0.0
    mode: str = "ideal"

    def __post_init__(self):
        if self.mode not in ("ideal", "rotation_pulse"):
            raise ValueError(f"unknown lock mode {self.mode!r}")
        if not 0.0 <= self.epsilon0 <= 1.0:
            raise ValueError("epsilon0 must lie in [0, 1]")
        if self.mode == "ideal" and self.epsilon0 != 0.0:
            raise ValueError("ideal lock has epsilon0 = 0")

    @property
    def residual(self) -> float:
        return 0.0 if self.mode == "ideal" else self.epsilon0


@dataclass(frozen=True)
class CompositeSpace:
    """Basis bookkeeping for (level, branch, symbol) product states."""

    subspace: FunctionalSubspace
    variant: str = "direct"  # "direct" | "staged"

    def __post_init__(self):
        if self.variant not in ("direct", "staged"):
            raise ValueError(f"unknown variant {self.variant!r}")

    @property
    def levels(self) -> tuple[Level, ...]:
        return DIRECT_LEVELS if self.variant == "direct" else STAGED_LEVELS

    @property
    def symbols(self) -> tuple[int, ...]:
        return (self.subspace.blank,) + tuple(self.subspace.values)

    @property
    def dim(self) -> int:
        return len(self.levels) * 2 * len(self.symbols)

    def index(self, level: Level, branch: int, symbol: int) -> int:
        li = self.levels.index(level)
        si = self.symbols.index(symbol)
        return (li * 2 + branch) * len(self.symbols) + si

    def basis_state(self, level: Level, branch: int, symbol: int) -> np.ndarray:
        psi = np.zeros(self.dim, dtype=complex)
        psi[self.index(level, branch, symbol)] = 1.0
        return psi

    def labels(self) -> list[tuple[Level, int, int]]:
        return [
            (lv, b, s)
            for lv in self.levels
            for b in (0, 1)
            for s in self.symbols
        ]


@dataclass
class CompositeState:
    """Normalized amplitude vector over the composite basis."""

    space: CompositeSpace
    amplitudes: np.ndarray

    def __post_init__(self):
        self.amplitudes = np.asarray(self.amplitudes, dtype=complex)
        if self.amplitudes.shape != (self.space.dim,):
            raise ValueError("amplitude vector has wrong dimension")
        norm = np.linalg.norm(self.amplitudes)
        if abs(norm - 1.0) > _ATOL:
            raise ValueError(f"state norm {norm} deviates from 1 beyond 1e-12")

    def probability(self, level: Level, branch: int, symbol: int) -> float:
        return abs(self.amplitudes[self.space.index(level, branch, symbol)]) ** 2


def make_gate(kind: GateKind, space: CompositeSpace, lock: LockModel | None = None) -> np.ndarray:
    """Unitary matrix of one program gate on the composite space.

    Every kind yields a permutation matrix except LOCK, which is the
    rotation by (almost) a quarter turn in the UNSTABLE/LOCKED plane
    described by ``lock``.
    """
    if not isinstance(kind, GateKind):
        raise ValueError(f"unknown gate kind {kind!r}")
    sub = space.subspace
    levels, symbols = space.levels, space.symbols
    if kind in (GateKind.LEVEL_RAISE, GateKind.EXCITE) and space.variant != "staged":
        raise ValueError(f"{kind.value} exists only in the staged variant")
    if kind is GateKind.TRIGGER and space.variant != "direct":
        raise ValueError("the direct trigger exists only in the direct variant")

    dim = space.dim
    U = np.zeros((dim, dim), dtype=complex)

    if kind is GateKind.LOCK:
        lock = lock or LockModel()
        eps = lock.residual
        s = np.sqrt(max(0.0, 1.0 - eps * eps))
        ph = np.exp(-1j * lock.gamma)
        for b in (0, 1):
            for sym in symbols:
                iu = space.index(Level.UNSTABLE, b, sym)
                il = space.index(Level.LOCKED, b, sym)
                U[iu, iu] = eps
                U[il, iu] = s * ph
                U[iu, il] = -s * np.conj(ph)
                U[il, il] = eps
        for lv in levels:
            if lv in (Level.UNSTABLE, Level.LOCKED):
                continue
            for b in (0, 1):
                for sym in symbols:
                    i = space.index(lv, b, sym)
                    U[i, i] = 1.0
        return U

    # Permutation gates: map each basis label to its image.
    for lv in levels:
        for b in (0, 1):
            for sym in symbols:
                src = space.index(lv, b, sym)
                lv2, b2, sym2 = lv, b, sym
                if kind is GateKind.BRANCH_FLIP:
                    if sym == sub.desired:
                        b2 = 1 - b
                elif kind is GateKind.SYMBOL_SWAP:
                    if lv is Level.IDLE:
                        if sym == sub.desired:
                            sym2 = sub.blank
                        elif sym == sub.blank:
                            sym2 = sub.desired
                elif kind is GateKind.TRIGGER:
                    if sym == sub.blank:
                        if lv is Level.IDLE:
                            lv2 = Level.UNSTABLE
                        elif lv is Level.UNSTABLE:
                            lv2 = Level.IDLE
                elif kind is GateKind.LEVEL_RAISE:
                    if sym == sub.blank:
                        if lv is Level.IDLE:
                            lv2 = Level.READY
                        elif lv is Level.READY:
                            lv2 = Level.IDLE
                elif kind is GateKind.EXCITE:
                    if lv is Level.READY:
                        lv2 = Level.UNSTABLE
                    elif lv is Level.UNSTABLE:
                        lv2 = Level.READY
                elif kind is GateKind.SHIFT_IF_RUNNING:
                    if b == 0:
                        sym2 = apply_shift(sub, sym)
                dst = space.index(lv2, b2, sym2)
                U[dst, src] = 1.0
    return U


def _cycle_gates(space: CompositeSpace, lock: LockModel) -> list[np.ndarray]:
    """Gate matrices of one cycle, lock step excluded (it is handled apart)."""
    if space.variant == "direct":
        kinds = [GateKind.BRANCH_FLIP, GateKind.SYMBOL_SWAP, GateKind.TRIGGER]
    else:
        kinds = [
            GateKind.BRANCH_FLIP,
            GateKind.SYMBOL_SWAP,
            GateKind.LEVEL_RAISE,
            GateKind.EXCITE,
        ]
    return [make_gate(k, space, lock) for k in kinds]


@dataclass
class CycleRecord:
    cycle: int
    idle_branch0_prob: float   # weight still in (IDLE, 0) at the cycle boundary
    newly_parked_prob: float   # weight moved into this cycle's parked channel
    residual_unstable: float   # weight left on UNSTABLE after the lock step


@dataclass
class RunResult:
    space: CompositeSpace
    final: CompositeState
    trace: list[CycleRecord]
    trigger_cycle: int | None
    parked: dict[int, np.ndarray] = field(default_factory=dict)

    @property
    def locked_probability(self) -> float:
        """Total weight held across all parked (LOCKED) channels."""
        return float(sum(np.sum(np.abs(v) ** 2) for v in self.parked.values()))

    def locked_channel_probability(self, branch: int, symbol: int) -> float:
        """Weight of (LOCKED, branch, symbol) summed over entry cycles.

        Parked channels are mutually orthogonal (physically: packets at
        distinct positions), so probabilities add incoherently.
        """
        total = 0.0
        for v in self.parked.values():
            sub = self.space
            si = sub.symbols.index(symbol)
            total += abs(v[branch * len(sub.symbols) + si]) ** 2
        return total


def run_program(
    subspace: FunctionalSubspace,
    x0: int,
    variant: str = "direct",
    lock: LockModel | None = None,
) -> RunResult:
    """Run the full m-cycle halting program on initial index x0.

    The initial state is (IDLE, 0, f(x0)).  With an ideal lock the final
    state is the basis state (LOCKED, 1, blank) with unit amplitude for
    every x0, and the trace records the trigger cycle
    ``(x_f - x0) mod m + 1`` at which the amplitude was parked.
    """
    if not 0 <= x0 < subspace.m:
        raise ValueError(f"x0 = {x0} outside 0..{subspace.m - 1}")
    lock = lock or LockModel()
    space = CompositeSpace(subspace=subspace, variant=variant)
    gates = _cycle_gates(space, lock)
    shift = make_gate(GateKind.SHIFT_IF_RUNNING, space, lock)

    n_sym = len(space.symbols)
    psi = space.basis_state(Level.IDLE, 0, subspace.values[x0])
    unstable_rows = [
        space.index(Level.UNSTABLE, b, s) for b in (0, 1) for s in space.symbols
    ]
    eps = lock.residual
    s_amp = np.sqrt(max(0.0, 1.0 - eps * eps)) * np.exp(-1j * lock.gamma)

    parked: dict[int, np.ndarray] = {}
    trace: list[CycleRecord] = []
    trigger_cycle = None

    for cycle in range(1, subspace.m + 1):
        for U in gates:
            psi = U @ psi
        # lock step: park the UNSTABLE amplitude into this cycle's channel
        chan = np.zeros(2 * n_sym, dtype=complex)
        moved = 0.0
        for b in (0, 1):
            for si in range(n_sym):
                row = space.index(Level.UNSTABLE, b, space.symbols[si])
                amp = psi[row]
                if amp != 0.0:
                    chan[b * n_sym + si] = s_amp * amp
                    psi[row] = eps * amp
                    moved += abs(s_amp * amp) ** 2
        if moved > 0.0:
            parked[cycle] = chan
            if trigger_cycle is None:
                trigger_cycle = cycle
        psi = shift @ psi
        idle0 = float(
            sum(
                abs(psi[space.index(Level.IDLE, 0, s)]) ** 2
                for s in space.symbols
            )
        )
        resid = float(sum(abs(psi[r]) ** 2 for r in unstable_rows))
        trace.append(
            CycleRecord(
                cycle=cycle,
                idle_branch0_prob=idle0,
                newly_parked_prob=moved,
                residual_unstable=resid,
            )
        )

    # Fold parked channels back into the composite vector for reporting:
    # per-label magnitudes add in quadrature (channels are orthogonal), the
    # phase is taken from the first contributor.  Exact for the ideal
    # single-channel run; a probability profile otherwise.
    final_vec = psi.copy()
    for chan in parked.values():
        for b in (0, 1):
            for si in range(n_sym):
                row = space.index(Level.LOCKED, b, space.symbols[si])
                amp = chan[b * n_sym + si]
                # incoherent fold: preserve total weight per basis label
                final_vec[row] = np.sqrt(abs(final_vec[row]) ** 2 + abs(amp) ** 2) * (
                    np.exp(1j * np.angle(amp)) if final_vec[row] == 0 else np.exp(1j * np.angle(final_vec[row]))
                )
    final = CompositeState(space=space, amplitudes=final_vec / np.linalg.norm(final_vec))
    return RunResult(
        space=space, final=final, trace=trace, trigger_cycle=trigger_cycle, parked=parked
    )


def commutator_check(kind: GateKind, space: CompositeSpace, lock: LockModel | None = None) -> float:
    """Max-norm of the commutator between a gate and the lock matrix."""
    A = make_gate(kind, space, lock)
    L = make_gate(GateKind.LOCK, space, lock)
    return float(np.max(np.abs(A @ L - L @ A)))


def conflict_bound(U: np.ndarray, c1: np.ndarray, c2: np.ndarray) -> tuple[float, float]:
    """Transfer weights (|<c2|U|c1>|^2, |<c2|U|c2>|^2) of a unitary.

    For orthonormal c1, c2 these always satisfy p1 + p2 <= 1: no single
    unitary can send both states onto c2.  Raises if U is not unitary or
    the states are not orthonormal.
    """
    U = np.asarray(U, dtype=complex)
    n = U.shape[0]
    if U.shape != (n, n) or np.max(np.abs(U.conj().T @ U - np.eye(n))) > 1e-10:
        raise ValueError("U is not unitary")
    c1 = np.asarray(c1, dtype=complex)
    c2 = np.asarray(c2, dtype=complex)
    for c in (c1, c2):
        if abs(np.linalg.norm(c) - 1.0) > 1e-10:
            raise ValueError("control states must be normalized")
    if abs(np.vdot(c1, c2)) > 1e-10:
        raise ValueError("control states must be orthogonal")
    p1 = abs(np.vdot(c2, U @ c1)) ** 2
    p2 = abs(np.vdot(c2, U @ c2)) ** 2
    return float(p1), float(p2)

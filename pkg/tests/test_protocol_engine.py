import numpy as np
import pytest

from statelock.cyclic_group import FunctionalSubspace, GroupFactorization, build_subspace
from statelock.protocol_engine import (
    CompositeSpace,
    GateKind,
    Level,
    LockModel,
    commutator_check,
    conflict_bound,
    make_gate,
    run_program,
)

SUB_M3 = FunctionalSubspace("multiplicative", 3, (1, 2, 4))  # p=7, g=3, M=2
SUB_ADD = FunctionalSubspace("additive", 3, (0, 1, 2))


def random_unitary(rng, n):
    z = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
    q, r = np.linalg.qr(z)
    return q * (np.diag(r) / np.abs(np.diag(r)))


@pytest.mark.parametrize("variant", ["direct", "staged"])
@pytest.mark.parametrize("sub", [SUB_M3, SUB_ADD])
def test_every_gate_is_unitary(variant, sub):
    space = CompositeSpace(subspace=sub, variant=variant)
    kinds = [GateKind.BRANCH_FLIP, GateKind.SYMBOL_SWAP, GateKind.LOCK, GateKind.SHIFT_IF_RUNNING]
    kinds += [GateKind.TRIGGER] if variant == "direct" else [GateKind.LEVEL_RAISE, GateKind.EXCITE]
    for kind in kinds:
        U = make_gate(kind, space, LockModel(epsilon0=0.3, mode="rotation_pulse", gamma=0.7))
        err = np.max(np.abs(U.conj().T @ U - np.eye(space.dim)))
        assert err < 1e-12, kind


class TestGateActions:
    def setup_method(self):
        self.space = CompositeSpace(subspace=SUB_M3, variant="direct")

    def _maps(self, kind, src, dst):
        U = make_gate(kind, self.space)
        out = U @ self.space.basis_state(*src)
        assert abs(np.vdot(self.space.basis_state(*dst), out)) == pytest.approx(1.0)

    def test_branch_flip_on_desired(self):
        self._maps(GateKind.BRANCH_FLIP, (Level.IDLE, 0, 1), (Level.IDLE, 1, 1))

    def test_branch_flip_elsewhere_identity(self):
        self._maps(GateKind.BRANCH_FLIP, (Level.IDLE, 0, 2), (Level.IDLE, 0, 2))

    def test_trigger_ignores_locked(self):
        self._maps(GateKind.TRIGGER, (Level.LOCKED, 0, 0), (Level.LOCKED, 0, 0))

    def test_trigger_on_blank(self):
        self._maps(GateKind.TRIGGER, (Level.IDLE, 1, 0), (Level.UNSTABLE, 1, 0))

    def test_symbol_swap_under_idle(self):
        self._maps(GateKind.SYMBOL_SWAP, (Level.IDLE, 1, 1), (Level.IDLE, 1, 0))
        self._maps(GateKind.SYMBOL_SWAP, (Level.IDLE, 1, 0), (Level.IDLE, 1, 1))

    def test_symbol_swap_inert_off_idle(self):
        self._maps(GateKind.SYMBOL_SWAP, (Level.UNSTABLE, 1, 1), (Level.UNSTABLE, 1, 1))

    def test_unknown_kind_rejected(self):
        with pytest.raises(ValueError):
            make_gate("not-a-gate", self.space)


class TestRunProgram:
    def test_p7_trigger_cycles(self):
        # hand-traced: x_f indexes value 1, cycles are (x_f - x0) mod 3 + 1
        expected = {0: 1, 1: 3, 2: 2}
        for x0, cyc in expected.items():
            res = run_program(SUB_M3, x0)
            assert res.trigger_cycle == cyc
            assert res.final.probability(Level.LOCKED, 1, SUB_M3.blank) == pytest.approx(1.0, abs=1e-14)

    def test_additive_immediate_match(self):
        res = run_program(SUB_ADD, 0)
        assert res.trigger_cycle == 1
        # the additive blank is the extra symbol m
        assert res.final.probability(Level.LOCKED, 1, SUB_ADD.blank) == pytest.approx(1.0, abs=1e-14)

    @pytest.mark.parametrize("variant", ["direct", "staged"])
    @pytest.mark.parametrize("p", [7, 11, 23])
    def test_constant_output_bijective_cycles(self, variant, p):
        fact = GroupFactorization.of_prime(p)
        for k in range(1, fact.r + 1):
            sub = build_subspace(fact, k, "multiplicative")
            cycles = []
            for x0 in range(sub.m):
                res = run_program(sub, x0, variant=variant)
                assert res.final.probability(Level.LOCKED, 1, sub.blank) == pytest.approx(1.0, abs=1e-14)
                cycles.append(res.trigger_cycle)
            assert sorted(cycles) == list(range(1, sub.m + 1))

    def test_idle_until_trigger(self):
        # (halting, branch) stays exactly (IDLE, 0) at every boundary before the trigger
        for x0 in range(3):
            res = run_program(SUB_M3, x0)
            for rec in res.trace:
                if rec.cycle < res.trigger_cycle:
                    assert rec.idle_branch0_prob == pytest.approx(1.0, abs=1e-14)
                else:
                    assert rec.idle_branch0_prob == pytest.approx(0.0, abs=1e-14)

    def test_imperfect_lock_leaves_deficit(self):
        eps = 0.05
        lock = LockModel(epsilon0=eps, mode="rotation_pulse")
        res = run_program(SUB_M3, 1, lock=lock)
        p_good = res.locked_channel_probability(1, SUB_M3.blank)
        assert p_good == pytest.approx(1.0 - eps**2, abs=1e-12)
        assert p_good < 1.0

    def test_norm_is_conserved_with_residuals(self):
        lock = LockModel(epsilon0=0.4, mode="rotation_pulse", gamma=1.1)
        res = run_program(SUB_M3, 2, lock=lock)
        circulating = 1.0 - res.locked_probability
        # parked weight plus whatever never parked accounts for everything
        assert 0.0 <= circulating < 1.0
        total = res.locked_probability + circulating
        assert total == pytest.approx(1.0, abs=1e-12)

    def test_x0_out_of_range(self):
        with pytest.raises(ValueError):
            run_program(SUB_M3, 3)


class TestCommutators:
    @pytest.mark.parametrize("variant,kind", [
        ("direct", GateKind.BRANCH_FLIP),
        ("direct", GateKind.SHIFT_IF_RUNNING),
        ("direct", GateKind.SYMBOL_SWAP),
        ("staged", GateKind.LEVEL_RAISE),
    ])
    def test_lock_commutes(self, variant, kind):
        space = CompositeSpace(subspace=SUB_M3, variant=variant)
        assert commutator_check(kind, space) < 1e-14

    def test_trigger_does_not_commute(self):
        space = CompositeSpace(subspace=SUB_M3, variant="direct")
        assert commutator_check(GateKind.TRIGGER, space) > 0.1

    def test_excite_does_not_commute(self):
        space = CompositeSpace(subspace=SUB_M3, variant="staged")
        assert commutator_check(GateKind.EXCITE, space) > 0.1


class TestConflictBound:
    def test_identity(self):
        c1 = np.array([1, 0, 0], dtype=complex)
        c2 = np.array([0, 1, 0], dtype=complex)
        assert conflict_bound(np.eye(3), c1, c2) == (0.0, 1.0)

    def test_swap(self):
        c1 = np.array([1, 0, 0], dtype=complex)
        c2 = np.array([0, 1, 0], dtype=complex)
        U = np.eye(3, dtype=complex)[:, [1, 0, 2]]
        p1, p2 = conflict_bound(U, c1, c2)
        assert (p1, p2) == (1.0, 0.0)

    def test_random_sweep(self):
        rng = np.random.default_rng(2024)
        for _ in range(200):
            n = rng.integers(2, 9)
            U = random_unitary(rng, n)
            c1 = np.zeros(n, dtype=complex)
            c2 = np.zeros(n, dtype=complex)
            c1[0], c2[1] = 1.0, 1.0
            p1, p2 = conflict_bound(U, c1, c2)
            assert p1 + p2 <= 1.0 + 1e-12

    def test_rejects_non_unitary(self):
        c1 = np.array([1, 0], dtype=complex)
        c2 = np.array([0, 1], dtype=complex)
        with pytest.raises(ValueError):
            conflict_bound(np.array([[1, 1], [0, 1]]), c1, c2)

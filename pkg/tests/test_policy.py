import math
from dataclasses import dataclass

import numpy as np
import pytest

from qmapgen.policy import (
    ATTACK_POLE,
    DEFEND_POLE,
    EXPLORE_POLE,
    PayoffTable,
    Tactic,
    defeat_rotation,
    feedback_directive,
    payoffs,
    rotate_vector,
    select_action,
    synthesize_rotation,
    war_gate,
)
from qmapgen.qsim import (
    AxisAngle,
    BlochVector,
    CouplingMap,
    PauliAxis,
    apply_1q,
    apply_cz,
    bloch_vector,
    expect,
    init_network,
)
from qmapgen.tomography import exact_snapshot

from helpers import random_unit_bloch

P = PauliAxis
S3 = 1.0 / math.sqrt(3.0)


@dataclass
class FakeStats:
    area: int
    frontier: int
    lost: int
    gained: int


def rotate_to(state, q, vec):
    axis = np.cross([0.0, 0.0, 1.0], vec)
    nrm = float(np.linalg.norm(axis))
    if nrm > 1e-12:
        apply_1q(state, q, AxisAngle(tuple(axis / nrm), math.atan2(nrm, vec[2])))
    return state


class TestPayoffs:
    def test_product_state_rows(self):
        st = init_network(2, CouplingMap.path(2), BlochVector(0, 0, 1))
        rotate_to(st, 0, (1.0, 0.0, 0.0))
        snap = exact_snapshot(st, [(0, 1)])
        table = payoffs(snap, {0: {1}, 1: {0}})
        # <X_0> = 1 and <X_0 Z_1> = 1; the other two correlations vanish
        assert table.entries[(0, 1, P.X)] == pytest.approx(2.0, abs=1e-9)
        assert table.entries[(1, 0, P.Z)] == pytest.approx(2.0, abs=1e-9)
        assert table.entries[(0, 1, P.Y)] == pytest.approx(0.0, abs=1e-9)

    def test_war_pair_rows(self):
        st = init_network(2, CouplingMap.path(2), BlochVector(1, 0, 0))
        apply_cz(st, 0, 1)
        snap = exact_snapshot(st, [(0, 1)])
        table = payoffs(snap, {0: {1}, 1: {0}})
        assert table.entries[(0, 1, P.X)] == pytest.approx(1.0, abs=1e-9)
        assert table.entries[(0, 1, P.Z)] == pytest.approx(1.0, abs=1e-9)
        # <YY> = +1 for this state (it is the product of its XZ and ZX
        # stabilizers), so the explore row ties rather than dropping to -1
        assert table.entries[(0, 1, P.Y)] == pytest.approx(1.0, abs=1e-9)

    def test_fresh_even_rows(self):
        st = init_network(2, CouplingMap.path(2), BlochVector(S3, S3, S3))
        snap = exact_snapshot(st, [(0, 1)])
        table = payoffs(snap, {0: {1}, 1: {0}})
        for p in P:
            assert table.entries[(0, 1, p)] == pytest.approx(S3 + 1.0, abs=1e-9)

    def test_no_neighbours_uses_singles(self):
        st = init_network(2, CouplingMap.path(2), BlochVector(S3, S3, S3))
        snap = exact_snapshot(st, [])
        table = payoffs(snap, {0: set(), 1: set()})
        for p in P:
            assert table.entries[(0, None, p)] == pytest.approx(S3, abs=1e-9)

    def test_missing_pair_is_hard_error(self):
        st = init_network(3, CouplingMap.path(3), BlochVector(0, 0, 1))
        snap = exact_snapshot(st, [(0, 1)])
        with pytest.raises(LookupError, match="missing pair"):
            payoffs(snap, {0: {2}})

    def test_linearity_preserves_argmax(self):
        st = init_network(2, CouplingMap.path(2), BlochVector(S3, S3, S3))
        rotate_to(st, 0, (0.2, 0.4, 0.8))
        snap = exact_snapshot(st, [(0, 1)])
        table = payoffs(snap, {0: {1}})
        scaled = exact_snapshot(st, [(0, 1)])
        lam = 3.5
        scaled.singles[0] = BlochVector(*(lam * c for c in scaled.singles[0]))
        for key in list(scaled.correlations):
            scaled.correlations[key] *= lam
        table2 = payoffs(scaled, {0: {1}})
        for key in table.entries:
            assert table2.entries[key] == pytest.approx(
                lam * table.entries[key], abs=1e-9
            )
        feas = {Tactic.defend(1), Tactic.attack(1), Tactic.explore()}
        assert select_action(0, table, feas) == select_action(0, table2, feas)

    def test_rows_serialization_order(self):
        table = PayoffTable(
            {
                (1, 0, P.Z): 0.5,
                (0, 1, P.X): 1.0,
                (0, None, P.Y): 0.2,
                (0, 1, P.Y): 0.1,
            }
        )
        assert [row[:3] for row in table.rows()] == [
            (0, None, "Y"),
            (0, 1, "X"),
            (0, 1, "Y"),
            (1, 0, "Z"),
        ]


from helpers import oracle_select_action as oracle_select


class TestSelectAction:
    def test_dominant_attack(self):
        table = PayoffTable(
            {
                (0, 1, P.X): 0.5,
                (0, 1, P.Y): 0.1,
                (0, 1, P.Z): 2.0,
            }
        )
        feas = {Tactic.defend(1), Tactic.attack(1), Tactic.explore()}
        assert select_action(0, table, feas) == Tactic.attack(1)

    def test_all_equal_defends_lowest_neighbour(self):
        entries = {}
        for k in (1, 2):
            for p in P:
                entries[(0, k, p)] = 1.5
        feas = {
            Tactic.defend(1),
            Tactic.defend(2),
            Tactic.attack(1),
            Tactic.attack(2),
            Tactic.explore(),
        }
        assert select_action(0, PayoffTable(entries), feas) == Tactic.defend(1)

    def test_infeasible_argmax_falls_back(self):
        table = PayoffTable(
            {
                (0, 1, P.Y): 3.0,  # explore dominates but is infeasible
                (0, 1, P.X): 2.0,
                (0, 1, P.Z): 1.0,
            }
        )
        feas = {Tactic.defend(1), Tactic.attack(1)}
        assert select_action(0, table, feas) == Tactic.defend(1)

    def test_empty_feasible_set_rejected(self):
        with pytest.raises(ValueError):
            select_action(0, PayoffTable({}), set())

    def test_matches_oracle_on_random_tables(self):
        rng = np.random.default_rng(41)
        values = [-1.0, 0.0, 0.5, 1.0, 1.5]  # coarse grid forces ties
        for _ in range(300):
            ks = sorted(
                rng.choice(range(1, 6), size=rng.integers(1, 4), replace=False)
            )
            entries = {}
            for k in ks:
                for p in P:
                    entries[(0, int(k), p)] = (
                        float(rng.choice(values))
                        if rng.random() < 0.7
                        else float(rng.normal())
                    )
            table = PayoffTable(entries)
            pool = [Tactic.explore()]
            for k in ks:
                pool.extend([Tactic.defend(int(k)), Tactic.attack(int(k))])
            size = int(rng.integers(1, len(pool) + 1))
            feasible = set(
                pool[i] for i in rng.choice(len(pool), size=size, replace=False)
            )
            want = oracle_select(0, table, feasible)
            if want is None:
                with pytest.raises(LookupError):
                    select_action(0, table, feasible)
            else:
                assert select_action(0, table, feasible) == want


class TestSynthesizeRotation:
    def test_full_quarter_turn(self):
        gate = synthesize_rotation((0, 0, 1), (1, 0, 0), 1.0)
        assert gate.axis == pytest.approx((0, 1, 0), abs=1e-12)
        assert gate.angle == pytest.approx(math.pi / 2, abs=1e-12)
        assert rotate_vector((0, 0, 1), gate) == pytest.approx(
            (1, 0, 0), abs=1e-12
        )

    def test_half_fraction(self):
        gate = synthesize_rotation((0, 0, 1), (1, 0, 0), 0.5)
        assert rotate_vector((0, 0, 1), gate) == pytest.approx(
            (math.sqrt(2) / 2, 0, math.sqrt(2) / 2), abs=1e-12
        )

    def test_short_vector_reaches_rescaled_target(self):
        gate = synthesize_rotation((0, 0, 0.5), (1, 0, 0), 1.0)
        assert rotate_vector((0, 0, 0.5), gate) == pytest.approx(
            (0.5, 0, 0), abs=1e-12
        )

    def test_zero_fraction_is_identity(self):
        gate = synthesize_rotation((0.3, 0.1, 0.2), (0, 1, 0), 0.0)
        assert gate.angle == 0.0

    def test_degenerate_current_is_identity(self):
        gate = synthesize_rotation((1e-9, 0, 0), (0, 1, 0), 1.0)
        assert gate.angle == 0.0

    def test_antiparallel_uses_fixed_perpendicular(self):
        gate = synthesize_rotation((0, 0, 1), (0, 0, -1), 1.0)
        assert rotate_vector((0, 0, 1), gate) == pytest.approx(
            (0, 0, -1), abs=1e-12
        )
        gate_x = synthesize_rotation((1, 0, 0), (-1, 0, 0), 1.0)
        assert rotate_vector((1, 0, 0), gate_x) == pytest.approx(
            (-1, 0, 0), abs=1e-12
        )

    def test_norm_preserved_on_random_inputs(self):
        rng = np.random.default_rng(43)
        for _ in range(2000):
            cur = rng.normal(size=3) * rng.uniform(0.05, 1.0)
            tgt = random_unit_bloch(rng)
            frac = float(rng.uniform(0, 1))
            out = rotate_vector(cur, synthesize_rotation(cur, tgt, frac))
            assert float(np.linalg.norm(out)) == pytest.approx(
                float(np.linalg.norm(cur)), abs=1e-9
            )

    def test_fraction_composition(self):
        rng = np.random.default_rng(47)
        for _ in range(200):
            cur = np.asarray(random_unit_bloch(rng)) * rng.uniform(0.1, 1.0)
            tgt = random_unit_bloch(rng)
            frac = float(rng.uniform(0.05, 0.95))
            mid = rotate_vector(cur, synthesize_rotation(cur, tgt, frac))
            end = rotate_vector(mid, synthesize_rotation(mid, tgt, 1.0))
            want = np.asarray(tgt) * float(np.linalg.norm(cur))
            assert end == pytest.approx(want, abs=1e-9)


class TestFeedbackDirective:
    def test_frontier_wins_quarter_to_explore(self):
        d = feedback_directive(2, FakeStats(100, 10, 3, 5), r=5)
        assert d.target == EXPLORE_POLE
        assert d.fraction == 0.25
        assert d.nation == 2

    def test_losses_drive_defence(self):
        d = feedback_directive(0, FakeStats(100, 1, 30, 5), r=5)
        assert d.target == DEFEND_POLE
        assert d.fraction == pytest.approx(30 / (math.pi * 25), abs=1e-12)

    def test_gains_drive_attack_with_clamp(self):
        d = feedback_directive(0, FakeStats(100, 1, 5, 100), r=5)
        assert d.target == ATTACK_POLE
        assert d.fraction == 1.0

    def test_all_zero_is_none(self):
        assert feedback_directive(0, FakeStats(100, 0, 0, 0), r=5) is None

    def test_negative_rejected(self):
        with pytest.raises(ValueError):
            feedback_directive(0, FakeStats(100, -1, 0, 0), r=5)

    def test_tie_precedence_follows_listing_order(self):
        d = feedback_directive(0, FakeStats(100, 7, 7, 7), r=5)
        assert d.target == EXPLORE_POLE
        d = feedback_directive(0, FakeStats(100, 2, 7, 7), r=5)
        assert d.target == DEFEND_POLE


class TestWarGate:
    def test_fresh_pair_reaches_target(self):
        st = init_network(2, CouplingMap.path(2), BlochVector(0, 0, 1))
        snap = exact_snapshot(st, [(0, 1)])
        war_gate(st, snap, 0, 1)
        assert expect(st, [(P.X, 0), (P.Z, 1)]) == pytest.approx(1.0, abs=1e-9)
        assert expect(st, [(P.Z, 0), (P.X, 1)]) == pytest.approx(1.0, abs=1e-9)

    def test_already_at_x_pole_is_cz_alone(self):
        st = init_network(2, CouplingMap.path(2), BlochVector(1, 0, 0))
        snap = exact_snapshot(st, [(0, 1)])
        reference = st.copy()
        apply_cz(reference, 0, 1)
        war_gate(st, snap, 0, 1)
        np.testing.assert_allclose(st.amplitudes, reference.amplitudes, atol=1e-12)

    def test_entangled_party_improves_but_misses_target(self):
        cm = CouplingMap.from_edges(3, [(0, 1), (0, 2)])
        st = init_network(3, cm, BlochVector(0, 0, 1))
        apply_1q(st, 0, AxisAngle((0, 1, 0), 1.1))
        apply_1q(st, 2, AxisAngle((0, 1, 0), math.pi / 2))
        apply_cz(st, 0, 2)
        assert bloch_vector(st, 0).norm() < 0.999
        pre = expect(st, [(P.X, 0), (P.Z, 1)])
        snap = exact_snapshot(st, [(0, 1)])
        war_gate(st, snap, 0, 1)
        post = expect(st, [(P.X, 0), (P.Z, 1)])
        assert post < 1.0 - 1e-6
        assert post > pre

    def test_non_edge_refused(self):
        cm = CouplingMap.from_edges(3, [(0, 1), (1, 2)])
        st = init_network(3, cm, BlochVector(0, 0, 1))
        snap = exact_snapshot(st, [(0, 2)])
        with pytest.raises(Exception, match="coupling violation"):
            war_gate(st, snap, 0, 2)

    def test_payoff_floor_from_random_product_states(self):
        rng = np.random.default_rng(53)
        for _ in range(30):
            st = init_network(2, CouplingMap.path(2), BlochVector(0, 0, 1))
            rotate_to(st, 0, random_unit_bloch(rng))
            rotate_to(st, 1, random_unit_bloch(rng))
            snap = exact_snapshot(st, [(0, 1)])
            war_gate(st, snap, 0, 1)
            after = exact_snapshot(st, [(0, 1)])
            table = payoffs(after, {0: {1}})
            assert table.entries[(0, 1, P.X)] >= 1.0 - 1e-9
            assert table.entries[(0, 1, P.Z)] >= 1.0 - 1e-9


class TestDefeatRotation:
    def test_pole_to_pole(self):
        st = init_network(1, CouplingMap(1, frozenset()), BlochVector(0, 0, 1))
        defeat_rotation(st, 0)
        assert bloch_vector(st, 0) == pytest.approx((1, 0, 0), abs=1e-9)

    def test_already_defensive_unchanged(self):
        st = init_network(1, CouplingMap(1, frozenset()), BlochVector(1, 0, 0))
        before = st.amplitudes.copy()
        defeat_rotation(st, 0)
        np.testing.assert_allclose(st.amplitudes, before, atol=1e-12)

    def test_entangled_norm_restriction(self):
        st = init_network(2, CouplingMap.path(2), BlochVector(0, 0, 1))
        apply_1q(st, 0, AxisAngle((0, 1, 0), 0.9))
        apply_1q(st, 1, AxisAngle((0, 1, 0), math.pi / 2))
        apply_cz(st, 0, 1)
        norm0 = bloch_vector(st, 0).norm()
        defeat_rotation(st, 0)
        assert bloch_vector(st, 0) == pytest.approx((norm0, 0, 0), abs=1e-9)

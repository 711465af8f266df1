"""Closed-form quantities: window schedule, frame timings, PER, lock
probability.

Frozen expected values were computed with exact rational arithmetic
(fractions.Fraction) over the default PHY attributes; the independent
oracles are re-evaluated inline where cheap.
"""

import math
from fractions import Fraction

import pytest

from wban_csma import (
    DEFAULT_PHY,
    DEFAULT_UP_TABLE,
    InfeasiblePhaseError,
    Mechanism,
    PhyMacConfig,
    Scenario,
    StageRangeError,
    UserPriorityParams,
    ValidationError,
    control_frame_duration,
    cw_schedule,
    data_frame_duration,
    exchange_durations,
    lock_probability,
    mean_backoff,
    packet_error_rate,
    validate_feasible,
    window_schedule,
)

UP0 = DEFAULT_UP_TABLE[0]
UP5 = DEFAULT_UP_TABLE[5]
UP7 = DEFAULT_UP_TABLE[7]

# hand-evaluated doubling schedules for every default priority row
EXPECTED_SCHEDULES = {
    0: (16, 16, 32, 32, 64, 64, 64, 64),
    1: (16, 16, 32, 32, 32, 32, 32, 32),
    2: (8, 8, 16, 16, 32, 32, 32, 32),
    3: (8, 8, 16, 16, 16, 16, 16, 16),
    4: (4, 4, 8, 8, 16, 16, 16, 16),
    5: (4, 4, 8, 8, 8, 8, 8, 8),
    6: (2, 2, 4, 4, 8, 8, 8, 8),
    7: (1, 1, 2, 4, 4, 4, 4, 4),
}


class TestWindowSchedule:
    def test_examples(self):
        assert cw_schedule(UP7, 0) == 1
        assert cw_schedule(UP7, 2) == 2
        assert cw_schedule(UP0, 7) == 64
        assert cw_schedule(UP5, 1) == 4

    @pytest.mark.parametrize("i", range(8))
    def test_full_schedules(self, i):
        assert window_schedule(DEFAULT_UP_TABLE[i]) == EXPECTED_SCHEDULES[i]

    @pytest.mark.parametrize("i", range(8))
    def test_nondecreasing_and_capped(self, i):
        up = DEFAULT_UP_TABLE[i]
        ws = window_schedule(up)
        assert all(b >= a for a, b in zip(ws, ws[1:]))
        for j in range(up.m + 1, up.max_stage + 1):
            assert ws[j] == up.cw_max

    @pytest.mark.parametrize("i", range(7))
    def test_window_at_stage_m_reaches_cap(self, i):
        # holds for UP0..UP6; the UP7 row has cw_max = 4 above the stage-m
        # window 2, so the cap branch jumps there (see its schedule above)
        up = DEFAULT_UP_TABLE[i]
        assert cw_schedule(up, up.m) == up.cw_max
        assert up.cw_max == up.cw_min * 2 ** (up.m // 2)

    def test_stage_out_of_range(self):
        with pytest.raises(StageRangeError):
            cw_schedule(UP7, 8)
        with pytest.raises(StageRangeError):
            cw_schedule(UP7, -1)


class TestMeanBackoff:
    def test_up7(self):
        assert mean_backoff(UP7) == pytest.approx(2.0)

    def test_up0(self):
        assert mean_backoff(UP0) == pytest.approx(22.5)

    def test_constant_window(self):
        up = UserPriorityParams(3, 16, 16, 0, 7)
        assert mean_backoff(up) == pytest.approx((16 + 1) / 2)

    def test_oracle_all_rows(self):
        for up in DEFAULT_UP_TABLE:
            expect = sum((w + 1) / 2 for w in EXPECTED_SCHEDULES[up.priority]) / 8
            assert mean_backoff(up) == pytest.approx(expect)


def _duration_oracle(preamble, phy_hdr, body_bits):
    """Exact rational air time in seconds."""
    return float(
        Fraction(preamble, 600_000)
        + Fraction(phy_hdr, Fraction(919, 10) * 1000)
        + Fraction(body_bits, Fraction(9714, 10) * 1000)
    )


class TestFrameDurations:
    def test_control_frame(self):
        expect = _duration_oracle(90, 31, 72)
        assert control_frame_duration(DEFAULT_PHY) == pytest.approx(expect, rel=1e-12)
        assert expect == pytest.approx(561.443e-6, abs=1e-9)

    def test_data_frame_100_bytes(self):
        expect = _duration_oracle(90, 31, 872)
        assert data_frame_duration(DEFAULT_PHY, 100) == pytest.approx(expect, rel=1e-12)
        assert expect == pytest.approx(1384.997e-6, abs=1e-9)

    def test_zero_bits(self):
        phy = PhyMacConfig(
            preamble_bits=0,
            phy_header_bits=0,
            mac_header_bits=0,
            fcs_bits=0,
            ctrl_frame_bits=0,
        )
        assert data_frame_duration(phy, 0) == 0.0

    def test_doubling_psdu_rate_halves_body_term(self):
        fast = PhyMacConfig(psdu_rate=2 * 971.4e3)
        assert control_frame_duration(fast) == pytest.approx(524.3830908935714e-6, rel=1e-12)

    def test_affine_in_payload(self):
        slope = 8 / DEFAULT_PHY.psdu_rate
        base = data_frame_duration(DEFAULT_PHY, 0)
        for payload in (1, 13, 100, 255):
            assert data_frame_duration(DEFAULT_PHY, payload) == pytest.approx(
                base + slope * payload, rel=1e-12
            )


class TestPacketErrorRate:
    def test_perfect_channel(self):
        assert packet_error_rate(0.0, Mechanism.BASIC, DEFAULT_PHY, 100) == 0.0

    def test_fully_corrupt(self):
        assert packet_error_rate(1.0, Mechanism.RTS_CTS, DEFAULT_PHY, 100) == 1.0

    def test_basic_100_bytes(self):
        # 1186 exposed bits; high-precision oracle value
        assert packet_error_rate(2e-5, Mechanism.BASIC, DEFAULT_PHY, 100) == pytest.approx(
            0.02344112361226802, rel=1e-9
        )

    def test_monotone_in_ber_and_payload(self):
        bers = [0.0, 1e-6, 1e-5, 1e-4, 1e-3, 1e-2]
        pers = [packet_error_rate(b, Mechanism.BASIC, DEFAULT_PHY, 100) for b in bers]
        assert all(q >= p for p, q in zip(pers, pers[1:]))
        payloads = [0, 10, 50, 150, 255]
        pers = [packet_error_rate(1e-4, Mechanism.RTS_CTS, DEFAULT_PHY, p) for p in payloads]
        assert all(q >= p for p, q in zip(pers, pers[1:]))

    def test_rtscts_at_least_basic(self):
        for ber in (1e-6, 1e-4, 1e-2):
            for payload in (0, 100, 250):
                assert packet_error_rate(
                    ber, Mechanism.RTS_CTS, DEFAULT_PHY, payload
                ) >= packet_error_rate(ber, Mechanism.BASIC, DEFAULT_PHY, payload)

    def test_domain_error(self):
        with pytest.raises(ValidationError):
            packet_error_rate(1.5, Mechanism.BASIC, DEFAULT_PHY, 100)


class TestExchangeDurations:
    def test_basic_outcomes_coincide(self):
        d = exchange_durations(DEFAULT_PHY, Mechanism.BASIC, 100)
        assert d.t_succ == d.t_coll == d.t_error
        assert d.t_succ == pytest.approx(2023.4396427712893e-6, rel=1e-12)
        assert d.l_succ_slots == 17

    def test_rtscts_collision_cheaper(self):
        d = exchange_durations(DEFAULT_PHY, Mechanism.RTS_CTS, 100)
        assert d.t_coll < d.t_succ == d.t_error
        assert d.t_coll == pytest.approx(1199.8860088408796e-6, rel=1e-12)
        assert d.l_succ_slots == 27

    def test_invariants_fuzz(self):
        for mech in Mechanism:
            for payload in (0, 1, 50, 100, 200, 260):
                d = exchange_durations(DEFAULT_PHY, mech, payload)
                assert d.t_error == d.t_succ
                assert d.t_coll <= d.t_succ
                assert d.l_succ_slots == math.ceil(round(d.t_succ / DEFAULT_PHY.csma_slot, 9))


class TestLockProbability:
    def test_vanishes_for_long_phase(self):
        assert lock_probability(UP7, 0, 10**9, 17, 2.0) == pytest.approx(0.0, abs=1e-6)

    def test_up7_example(self):
        assert lock_probability(UP7, 800, 6400, 17, 2.0) == pytest.approx(1 / 6381)

    def test_lower_priority_uses_both_phases(self):
        assert lock_probability(UP0, 800, 6400, 17, 22.5) == pytest.approx(
            1 / (800 + 6400 - 17 - 22.5)
        )

    def test_zero_denominator(self):
        with pytest.raises(InfeasiblePhaseError):
            lock_probability(UP7, 800, 19, 17, 2.0)

    def test_bounded(self):
        for rap in (20, 25, 50, 1000, 100000):
            p = lock_probability(UP7, 0, rap, 17, 2.0)
            assert 0.0 <= p <= 1.0


class TestScenarioValidation:
    def test_ber_outside_range(self):
        with pytest.raises(ValidationError, match=r"ber outside \[0,1\]"):
            Scenario(node_counts=(2,) * 8, ber=1.5)

    def test_too_many_nodes(self):
        with pytest.raises(ValidationError, match="64"):
            Scenario(node_counts=(9,) * 8)

    def test_zero_rap_rejected(self):
        with pytest.raises(ValidationError):
            Scenario(node_counts=(2,) * 8, rap1_len=0.0)

    def test_odd_m_rejected(self):
        with pytest.raises(ValidationError):
            UserPriorityParams(0, 16, 64, 3, 4)

    def test_ctrl_bits_must_be_consistent(self):
        with pytest.raises(ValidationError):
            PhyMacConfig(ctrl_frame_bits=200)

    def test_infeasible_phase(self):
        scenario = Scenario(node_counts=(2,) * 8, eap1_len=0.0, rap1_len=0.003)
        with pytest.raises(InfeasiblePhaseError):
            validate_feasible(scenario)

    def test_phase_slot_floor(self):
        scenario = Scenario(node_counts=(2,) * 8, eap1_len=0.1, rap1_len=0.8)
        assert scenario.eap_slots == 800
        assert scenario.rap_slots == 6400

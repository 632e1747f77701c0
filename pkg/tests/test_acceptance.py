"""Acceptance suite: one test per criterion, each printing a pass/fail line.

Run with ``pytest -s tests/test_acceptance.py`` to see the per-criterion lines.
"""

import time
from contextlib import contextmanager

import numpy as np
import pytest

from commat import (
    CommMatrix,
    Scenario,
    bloch_basis,
    build_frame,
    certify_info_completeness,
    choi_distance,
    comm_matrix,
    comm_matrix_with_channel,
    completely_depolarizing_channel,
    construct_indistinguishable_pair,
    detect_unitality,
    eb_certificate,
    eb_example,
    information_storability,
    amplitude_damping_channel,
    iterate_channel,
    measure_and_prepare_channel,
    noisy_antidist,
    numerical_rank,
    reconstruct_channel,
    robustness_gap,
    self_test,
    sic_qubit,
    span_dims,
    state_from_bloch,
    trine_qubit,
    unitary_channel,
    validate_povm,
)
from commat.fixtures import eb_example_expected_c
from commat.sampling import random_channel, random_mixed_state, random_povm


@contextmanager
def criterion(num, limit_seconds, description):
    start = time.perf_counter()
    try:
        yield
    except Exception:
        print(f"criterion {num:2d} FAIL        ({description})")
        raise
    elapsed = time.perf_counter() - start
    assert elapsed < limit_seconds, (
        f"criterion {num} exceeded its {limit_seconds}s budget: {elapsed:.1f}s"
    )
    print(f"criterion {num:2d} PASS {elapsed:6.2f}s ({description})")


def test_criterion_1_fixture_reproduction():
    with criterion(1, 1.0, "fixture reproduction"):
        sic_states, sic_povm = sic_qubit()
        d4 = noisy_antidist(4, 0.5).entries
        assert np.abs(comm_matrix(sic_states, sic_povm).entries - d4).max() <= 1e-12

        trine_states, trine_povm = trine_qubit()
        d3 = noisy_antidist(3, 1 / 3).entries
        assert np.abs(comm_matrix(trine_states, trine_povm).entries - d3).max() <= 1e-12

        states, povm, channel, a_exp, b_exp, cprime_exp = eb_example()
        c = comm_matrix(states, povm)
        assert np.abs(c.entries - eb_example_expected_c()).max() <= 1e-12
        cprime = comm_matrix_with_channel(Scenario(states=states, povm=povm, channel=channel))
        assert np.abs(cprime.entries - cprime_exp).max() <= 1e-12
        # rank of C pinned by the two-sided bound of its implementation
        report = certify_info_completeness(c, 2, (states, povm))
        assert report.lower_bound == report.upper_bound == 4
        assert report.rank == 4
        assert np.linalg.matrix_rank(a_exp) == 3
        assert np.linalg.matrix_rank(b_exp) == 2
        assert numerical_rank(cprime) == 1


def test_criterion_2_certification_values():
    with criterion(2, 1.0, "rank and storability values"):
        d4 = noisy_antidist(4, 0.5)
        assert abs(information_storability(d4) - 2.0) <= 1e-12
        assert numerical_rank(d4) == 4
        d3 = noisy_antidist(3, 1 / 3)
        assert abs(information_storability(d3) - 2.0) <= 1e-12
        assert numerical_rank(d3) == 3
        flat = CommMatrix(entries=np.full((2, 2), 0.5))
        assert numerical_rank(flat) == 1


def test_criterion_3_self_test():
    with criterion(3, 30.0, "self-test of the tetrahedral matrix"):
        cert = self_test(noisy_antidist(4, 0.5), 2, restarts=32)
        assert cert.passes
        assert np.abs(cert.weights - 0.5).max() <= 1e-10
        overlaps = cert.overlap_matrix()
        off_diagonal = overlaps[~np.eye(4, dtype=bool)]
        assert np.abs(off_diagonal - 1 / 3).max() <= 1e-6


def test_criterion_4_tomography_round_trip():
    with criterion(4, 60.0, "tomography round trips (100 qubit + 20 qutrit)"):
        basis2 = bloch_basis(2)
        states, povm = sic_qubit()
        frame = build_frame(states, povm, basis2, basis2)
        rng = np.random.default_rng(20240401)
        for _ in range(100):
            ch = random_channel(basis2, basis2, rng)
            cprime = comm_matrix_with_channel(Scenario(states=states, povm=povm, channel=ch))
            rec = reconstruct_channel(frame, cprime)
            assert np.linalg.norm(rec.choi - ch.choi) <= 1e-8

        basis3 = bloch_basis(3)
        qutrit_states = [random_mixed_state(basis3, rng) for _ in range(9)]
        qutrit_povm = random_povm(basis3, rng, 9)
        frame3 = build_frame(qutrit_states, qutrit_povm, basis3, basis3)
        for _ in range(20):
            ch = random_channel(basis3, basis3, rng)
            cprime = comm_matrix_with_channel(
                Scenario(states=qutrit_states, povm=qutrit_povm, channel=ch)
            )
            rec = reconstruct_channel(frame3, cprime)
            assert np.linalg.norm(rec.choi - ch.choi) <= 1e-8


def test_criterion_5_rank_bound_suite():
    with criterion(5, 60.0, "rank bounds on 200 random scenarios"):
        rng = np.random.default_rng(20240402)
        violations = 0
        for _ in range(200):
            d = int(rng.integers(2, 4))
            basis = bloch_basis(d)
            n_states = int(rng.integers(1, d * d + 3))
            n_outcomes = int(rng.integers(2, d * d + 3))
            states = [random_mixed_state(basis, rng) for _ in range(n_states)]
            povm = random_povm(basis, rng, n_outcomes)
            c = comm_matrix(states, povm)
            dim_s, dim_m, dim_int = span_dims(states, povm)
            rank = numerical_rank(c)
            if not dim_int <= rank <= min(dim_s, dim_m):
                violations += 1
            if information_storability(c) > d + 1e-9:
                violations += 1
        assert violations == 0


def test_criterion_6_counterexample_soundness():
    with criterion(6, 60.0, "indistinguishable pairs on 50 incomplete set-ups"):
        rng = np.random.default_rng(20240403)
        for trial in range(50):
            d = int(rng.integers(2, 4))
            basis = bloch_basis(d)
            states_incomplete = trial % 2 == 0
            if states_incomplete:
                n_states = int(rng.integers(2, d * d))
                states = [random_mixed_state(basis, rng) for _ in range(n_states)]
                povm = random_povm(basis, rng, d * d + 1)
            else:
                states = [random_mixed_state(basis, rng) for _ in range(d * d + 1)]
                povm = random_povm(basis, rng, 2)
            pair = construct_indistinguishable_pair(states, povm)
            assert pair.phi1.is_cptp() and pair.phi2.is_cptp()
            c1 = comm_matrix_with_channel(Scenario(states=states, povm=povm, channel=pair.phi1))
            c2 = comm_matrix_with_channel(Scenario(states=states, povm=povm, channel=pair.phi2))
            assert np.abs(c1.entries - c2.entries).max() <= 1e-12
            assert choi_distance(pair.phi1, pair.phi2) >= 1e-6
            if pair.case_tag == "states-incomplete":
                for lam in range(2, 6):
                    cl1 = comm_matrix_with_channel(
                        Scenario(states=states, povm=povm, channel=pair.phi1, repeat=lam)
                    )
                    cl2 = comm_matrix_with_channel(
                        Scenario(states=states, povm=povm, channel=pair.phi2, repeat=lam)
                    )
                    assert np.abs(cl1.entries - c1.entries).max() <= 1e-10
                    assert np.abs(cl1.entries - cl2.entries).max() <= 1e-12


def test_criterion_7_unitality_detection():
    with criterion(7, 5.0, "unitality detection"):
        basis = bloch_basis(2)
        states, povm = sic_qubit()
        c = comm_matrix(states, povm)
        c0 = comm_matrix_with_channel(
            Scenario(states=states, povm=povm, channel=completely_depolarizing_channel(basis))
        )
        sz = unitary_channel(basis, np.diag([1.0, -1.0]).astype(complex))
        cp = comm_matrix_with_channel(Scenario(states=states, povm=povm, channel=sz))
        assert detect_unitality(c, c0, cp, 2, povm_complete=True).verdict == "unital"

        contraction = measure_and_prepare_channel(
            validate_povm([np.eye(2)]),
            [state_from_bloch(basis, np.array([0.0, 0.0, 1.0]))],
        )
        cp2 = comm_matrix_with_channel(Scenario(states=states, povm=povm, channel=contraction))
        assert detect_unitality(c, c0, cp2, 2, povm_complete=True).verdict == "non-unital"

        damping = amplitude_damping_channel(basis, 0.3)
        cp3 = comm_matrix_with_channel(Scenario(states=states, povm=povm, channel=damping))
        assert detect_unitality(c, c0, cp3, 2, povm_complete=True).verdict == "non-unital"

        axis_states = tuple(
            state_from_bloch(basis, r)
            for r in (np.eye(3)[2], np.eye(3)[0], np.eye(3)[1])
        )
        ca = comm_matrix(axis_states, povm)
        ca0 = comm_matrix_with_channel(
            Scenario(states=axis_states, povm=povm, channel=completely_depolarizing_channel(basis))
        )
        cap = comm_matrix_with_channel(Scenario(states=axis_states, povm=povm, channel=sz))
        verdict = detect_unitality(ca, ca0, cap, 2, povm_complete=True)
        assert verdict.verdict == "undecidable"
        assert verdict.setup_unital_differentiating is True


def test_criterion_8_eb_certification():
    with criterion(8, 120.0, "entanglement-breaking certification"):
        states, povm, channel, _, _, _ = eb_example()
        c = comm_matrix(states, povm)
        cprime = comm_matrix_with_channel(Scenario(states=states, povm=povm, channel=channel))
        cert = eb_certificate(c, cprime, 2, l_max=4, realization=channel.mp_realization)
        assert cert.verdict == "certified-EB-implementable"
        assert cert.inner_dim == 4
        assert cert.residual <= 1e-8
        rank_cprime = numerical_rank(cprime)
        rank_a = np.linalg.matrix_rank(cert.factor_a)
        rank_b = np.linalg.matrix_rank(cert.factor_b)
        assert rank_cprime == 1
        assert min(rank_a, rank_b) == 2
        assert max(rank_a, rank_b) == 3
        assert rank_cprime < min(rank_a, rank_b)  # first inequality strict
        assert max(rank_a, rank_b) < cert.inner_dim  # second inequality strict

        basis = bloch_basis(2)
        sic_states, sic_povm = sic_qubit()
        c_sic = comm_matrix(sic_states, sic_povm)
        cp_dep = comm_matrix_with_channel(
            Scenario(states=sic_states, povm=sic_povm, channel=completely_depolarizing_channel(basis))
        )
        cert_dep = eb_certificate(c_sic, cp_dep, 2, l_max=4, restarts=4)
        assert cert_dep.verdict == "certified-EB-implementable"
        assert cert_dep.inner_dim == 1

        cert_id = eb_certificate(c_sic, c_sic, 2, l_max=4, restarts=8)
        assert cert_id.verdict == "no-certificate-found"
        assert cert_id.residual > 1e-8
        assert cert_id.restarts == 8
        assert "non-exhaustive" in cert_id.note


def test_criterion_9_robustness_remark():
    with criterion(9, 5.0, "robustness of the self-test under noise"):
        states, povm = sic_qubit()
        noisy = validate_povm(
            [0.99 * e + 0.01 * np.trace(e).real * np.eye(2) / 2 for e in povm.effects]
        )
        report = robustness_gap(Scenario(states=states, povm=noisy))
        assert report.epsilon > 0
        assert report.per_effect_tail.sum() <= report.epsilon + 1e-10
        assert report.rob1_holds and report.rob2_holds


def test_criterion_10_desk_scale_note():
    with criterion(10, 1.0, "desk-scale coverage note"):
        # no large-scale experiments exist to replicate: the quantitative
        # content (ball radii, example matrices, rank/storability values,
        # rank inequalities) is reproduced exactly by criteria 1-9, and the
        # remaining general statements are exercised by the property suites
        # in criteria 4-9.
        assert True

"""Monotone coupling: pathwise domination and the coupled estimator."""

import pytest

from ruinlab import coupled_pair, coupled_run
from ruinlab.backend import kernels


def test_coupled_pair_hand_cases():
    # p1 = 0.2, p2 = 0.4: promotion probability is 0.25
    assert coupled_pair(0.2, 0.4, 0.1, 0.9) == (1, 1)
    assert coupled_pair(0.2, 0.4, 0.3, 0.1) == (-1, 1)
    assert coupled_pair(0.2, 0.4, 0.3, 0.5) == (-1, -1)


def test_coupled_pair_never_downgrades():
    # the p2 outcome can never be a loss when the p1 outcome is a win
    for u1 in (0.01, 0.19, 0.21, 0.9):
        for u2 in (0.01, 0.5, 0.99):
            xi1, xi2 = coupled_pair(0.2, 0.4, u1, u2)
            assert not (xi1 == 1 and xi2 == -1)


def test_coupled_pair_rejects_misordered():
    with pytest.raises(ValueError):
        coupled_pair(0.4, 0.2, 0.5, 0.5)
    with pytest.raises(ValueError):
        coupled_run(3, 0.4, 0.2, 10, 10, seed=0)


def test_equal_probabilities_collapse():
    for u1 in (0.1, 0.5, 0.9):
        xi1, xi2 = coupled_pair(0.3, 0.3, u1, 0.7)
        assert xi1 == xi2


def test_no_domination_violations():
    r = coupled_run(3, 0.2, 0.4, 60, 2000, seed=46)
    assert r["domination_violations"] == 0
    assert r["doomed_frac_hi"] >= r["doomed_frac_lo"]
    assert abs(r["f_diff_estimate"] - (r["doomed_frac_hi"] - r["doomed_frac_lo"])) < 1e-12


def test_coupled_doom_times_ordered():
    # pathwise, the richer-p walk dooms no later than the poorer one
    for i in range(200):
        viol, d1, d2 = kernels.coupled_path(3, 1, 0.2, 0.4, 60, 46, i)
        assert viol == 0
        if d1 >= 0:
            assert 0 <= d2 <= d1


def test_threads_do_not_change_results():
    a = coupled_run(3, 0.1, 0.3, 50, 1500, seed=2, threads=1)
    b = coupled_run(3, 0.1, 0.3, 50, 1500, seed=2, threads=4)
    assert a == b

"""Exact path simulation: scripted paths, closed form, MC drivers."""

import pytest

from ruinlab import (
    DyadicRational,
    PathState,
    Stream,
    generalized_run,
    init_path,
    mc_eventual,
    mc_ruin_by_n,
    run_path,
    step,
    threshold_scan,
    verify_closed_form,
)
from ruinlab.backend import kernels
from ruinlab.errors import ExponentCapExceeded


class FakeRng:
    """Scripted uniform source matching the Stream interface."""

    def __init__(self, us):
        self.us = list(us)
        self.i = 0

    def u01(self):
        self.i += 1
        return self.us.pop(0)


def D(m, e=0):
    return DyadicRational(m, e)


def test_init_path():
    s = init_path(3)
    assert s.n == 0 and s.W == D(3) and s.B == D(1)
    assert s.level == 0 and s.partial == D(0)
    assert s.doomed_at is None and s.ruined_at is None
    # at or below 2 the game is lost before it starts
    assert init_path(2).doomed_at == 0
    assert init_path("3/2").doomed_at == 0


def test_step_win_from_3():
    s = step(init_path(3), 1)
    assert s.W == D(4) and s.B == D(2) and s.level == 1
    assert s.partial == D(1)
    # W = 4 = 2B: the next-bet wall is hit exactly
    assert s.doomed_at == 1
    assert s.ruined_at is None


def test_step_loss_from_3():
    s = step(init_path(3), -1)
    assert s.W == D(2) and s.B == D(1, -1) and s.level == -1
    assert s.partial == D(0)
    assert s.doomed_at is None


def test_scripted_ruin():
    # 3 -> win 4 -> win 6 -> loss 2 -> loss 0: ruin at step 4
    s = init_path(3)
    for xi in (1, 1, -1, -1):
        s = step(s, xi)
    assert s.W == D(0)
    assert s.doomed_at == 1
    assert s.ruined_at == 4
    with pytest.raises(ValueError):
        step(s, -1)


def test_step_rejects_bad_xi():
    with pytest.raises(ValueError):
        step(init_path(3), 0)


def test_run_path_scripted():
    # p = 1/2: u < 0.5 wins. loss, win, win dooms at step 3 (W = 3.5
    # against a next bet of 2); the trailing losses then ruin at 6
    out = run_path(3, 0.5, 10, FakeRng([0.9, 0.1, 0.1] + [0.9] * 7))
    assert out.doomed_at == 3
    assert out.ruined_at == 6
    assert out.final.n == 6
    out = run_path(3, 0.5, 2, FakeRng([0.9, 0.9]))
    assert out.doomed_at is None and out.ruined_at is None


def test_run_path_stops_at_ruin():
    out = run_path(3, 0.5, 100, FakeRng([0.1, 0.1, 0.9, 0.9] + [0.9] * 96))
    assert out.ruined_at == 4
    assert out.final.n == 4


def test_exponent_cap_on_deep_loss_run():
    with pytest.raises(ExponentCapExceeded):
        run_path(3, 0.0, 5000, Stream(0, 0))


def test_closed_form_invariant():
    r = verify_closed_form(3, 0.3, 60, 100, seed=7)
    assert r["paths"] == 100
    assert r["steps_checked"] > 0
    verify_closed_form("9/4", 0.45, 40, 50, seed=8)


def test_mc_ruin_by_n_matches_kernel_counts():
    r = mc_ruin_by_n(3, 0.3, 20, 2000, seed=42)
    doomed = sum(
        1 for i in range(2000) if kernels.doom_path(3, 1, 0.3, 20, 42, i) >= 0
    )
    assert r["doomed"] == doomed
    assert r["estimate"] == doomed / 2000
    assert r["samples"] == 2000
    lo, hi = r["ci95"]
    assert lo < r["estimate"] < hi


def test_threads_do_not_change_results():
    a = mc_ruin_by_n(3, 0.3, 15, 3000, seed=5, threads=1)
    b = mc_ruin_by_n(3, 0.3, 15, 3000, seed=5, threads=4)
    assert a == b
    c = mc_eventual(3, 0.5, 200, 2000, seed=5, threads=1)
    d = mc_eventual(3, 0.5, 200, 2000, seed=5, threads=3)
    assert c == d


def test_mc_eventual_fractions():
    r = mc_eventual(3, 0.5, 300, 2000, seed=9)
    assert r["doomed_frac"] + r["censored_frac"] <= 1.0 + 1e-12
    assert r["ruined_frac"] <= r["doomed_frac"]
    assert r["samples"] == 2000


def test_generalized_rho2_matches_exact_kernel():
    for i in range(50):
        assert generalized_run(3, 0.3, 2.0, 50, 11, i) == kernels.doom_path(
            3, 1, 0.3, 50, 11, i
        )


def test_generalized_rejects_bad_rho():
    with pytest.raises(ValueError):
        generalized_run(3, 0.3, 1.0, 10, 0)


def test_threshold_scan_monotone_in_x():
    rows = threshold_scan(3.0, 0.3, [1.4, 1.6, 2.0], 200, 2000, seed=45)
    fracs = [r["doomed_frac"] for r in rows]
    assert fracs[0] >= fracs[1] >= fracs[2]
    assert rows[0]["x"] == 1.4

"""Path simulation of the doubling/halving gamble.

The strategy: wealth W_n = W_{n-1} + xi_n B_n with bet B_{n+1} =
B_n * 2^{xi_n}, from W_0 = x and B_1 = 1. Everything stays dyadic, so
PathState carries exact DyadicRational wealth, bet, and the partial sum

    partial_n = sum_{i<=n, xi_i=+1} 2^(S_{i-1}),   S_n = sum xi_i,

which determines doom: the path is doomed (ruin has become certain)
exactly when partial >= x - 2, equivalently W <= 2B.

PathState/step/run_path are the exact reference implementation; the
mc_* drivers run the same protocol through the backend kernels (path i
of seed s draws from rng.Stream(s, i), one uniform per gamble), so a
kernel path can always be replayed exactly in the reference.
"""
from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from fractions import Fraction

from .backend import kernels
from .dyadic import DyadicRational, get_exponent_cap
from .errors import AmbiguousDigit, BlockCapExceeded, VerificationFailed
from .rng import Stream
from .stepfn import parse_x

_ZERO = DyadicRational(0)
_ONE = DyadicRational(1)

DEFAULT_STEP_CAP = 1 << 20
TAIL_MARGIN = 20
DEFAULT_GUARD_BITS = 32


@dataclass(frozen=True)
class PathState:
    """Exact state after n gambles. B is the next bet B_{n+1}, level is
    S_n, and doomed_at/ruined_at are first hitting steps (None if not
    yet hit)."""

    n: int
    W: DyadicRational
    B: DyadicRational
    level: int
    partial: DyadicRational
    doomed_at: int | None
    ruined_at: int | None


def init_path(x) -> PathState:
    x = parse_x(x)
    doomed = 0 if x <= DyadicRational(2) else None
    return PathState(0, x, _ONE, 0, _ZERO, doomed, None)


def step(s: PathState, xi: int) -> PathState:
    """One gamble with outcome xi in {+1, -1}. Pure: returns a new state."""
    if xi not in (1, -1):
        raise ValueError(f"xi must be +1 or -1, got {xi}")
    if s.ruined_at is not None:
        raise ValueError("cannot step a ruined path")
    n = s.n + 1
    if xi == 1:
        W = s.W + s.B
        partial = s.partial + DyadicRational(1, s.level)
        B = s.B.double()
        level = s.level + 1
    else:
        W = s.W - s.B
        partial = s.partial
        B = s.B.halve()
        level = s.level - 1
    doomed_at = s.doomed_at
    if doomed_at is None and W <= B + B:
        doomed_at = n
    ruined_at = n if W <= _ZERO else None
    return PathState(n, W, B, level, partial, doomed_at, ruined_at)


@dataclass(frozen=True)
class PathOutcome:
    final: PathState
    doomed_at: int | None
    ruined_at: int | None


def run_path(x, p: float, horizon: int, rng: Stream) -> PathOutcome:
    """Exact-state reference path; stops at ruin or the horizon."""
    s = init_path(x)
    for _ in range(horizon):
        s = step(s, 1 if rng.u01() < p else -1)
        if s.ruined_at is not None:
            break
    return PathOutcome(s, s.doomed_at, s.ruined_at)


# -- Monte Carlo drivers -------------------------------------------------

def _x_ratio(x):
    fr = parse_x(x).as_fraction()
    if fr <= 0:
        raise ValueError("starting fortune must be positive")
    return fr.numerator, fr.denominator


def _parallel_sum(worker, samples: int, threads: int):
    """Sum worker(lo, hi) over a partition of range(samples). The
    partition does not affect results (streams are indexed), only
    scheduling."""
    if threads <= 1:
        return worker(0, samples)
    chunks = []
    size = (samples + threads - 1) // threads
    with ThreadPoolExecutor(max_workers=threads) as ex:
        for lo in range(0, samples, size):
            chunks.append(ex.submit(worker, lo, min(lo + size, samples)))
        out = None
        for c in chunks:
            r = c.result()
            out = r if out is None else tuple(a + b for a, b in zip(out, r))
    return out


def mc_ruin_by_n(x, p: float, n: int, samples: int, seed: int, threads: int = 1) -> dict:
    """Estimate f_n(x, p) = P(doomed within n steps) with a binomial
    stderr and a 95% normal interval."""
    num, den = _x_ratio(x)

    def worker(lo, hi):
        c = 0
        for i in range(lo, hi):
            if kernels.doom_path(num, den, p, n, seed, i) >= 0:
                c += 1
        return (c,)

    (doomed,) = _parallel_sum(worker, samples, threads)
    est = doomed / samples
    se = math.sqrt(est * (1.0 - est) / samples)
    return {
        "estimate": est,
        "stderr": se,
        "ci95": (est - 1.96 * se, est + 1.96 * se),
        "samples": samples,
        "doomed": doomed,
    }


def mc_eventual(x, p: float, horizon: int, samples: int, seed: int, threads: int = 1) -> dict:
    """Fractions of paths doomed, actually ruined (W <= 0), and censored
    (neither) within the horizon."""
    num, den = _x_ratio(x)
    cap = get_exponent_cap()

    def worker(lo, hi):
        d = r = 0
        for i in range(lo, hi):
            doom, ruin = kernels.eventual_path(num, den, p, horizon, seed, i, cap)
            if doom >= 0:
                d += 1
            if ruin >= 0:
                r += 1
        return d, r

    doomed, ruined = _parallel_sum(worker, samples, threads)
    return {
        "doomed_frac": doomed / samples,
        "ruined_frac": ruined / samples,
        "censored_frac": (samples - doomed) / samples,
        "samples": samples,
    }


def verify_closed_form(x, p: float, steps: int, samples: int, seed: int) -> dict:
    """Replay exact paths checking W - 2B = x - 2 - partial and
    B = 2^level at every step, bit-exact. Raises VerificationFailed on
    the first mismatch."""
    x = parse_x(x)
    target = x - DyadicRational(2)
    checked = 0
    for i in range(samples):
        rng = Stream(seed, i)
        s = init_path(x)
        for _ in range(steps):
            s = step(s, 1 if rng.u01() < p else -1)
            lhs = s.W - (s.B + s.B)
            rhs = target - s.partial
            if lhs != rhs or s.B != DyadicRational(1, s.level):
                raise VerificationFailed(
                    f"closed form broken at path {i} step {s.n}: "
                    f"W-2B={lhs.serialize()} vs {rhs.serialize()}"
                )
            checked += 1
            if s.ruined_at is not None:
                break
    return {"paths": samples, "steps_checked": checked}


# -- block / digit sampling ----------------------------------------------

@dataclass(frozen=True)
class BlockSample:
    """Blocks A_0..A_{J} of the limit partial sum, their closing times
    tau_1..tau_{J+1} (hitting times of levels -1, -2, ...), and the
    exact partial sum sum A_i 2^-i they encode."""

    blocks: list
    taus: list

    @property
    def partial(self) -> DyadicRational:
        acc = _ZERO
        for i, a in enumerate(self.blocks):
            acc = acc + DyadicRational(a, -i)
        return acc


def sample_blocks(p: float, count: int, rng: Stream, step_cap: int = DEFAULT_STEP_CAP) -> BlockSample:
    """First `count` blocks of a fresh path. Raises BlockCapExceeded if
    the walk does not cross enough new minima within step_cap gambles
    (bulk callers count those as discards)."""
    blocks = []
    taus = []
    level = 0
    floor_i = 0
    acc = 0
    steps = 0
    while len(blocks) < count:
        steps += 1
        if steps > step_cap:
            raise BlockCapExceeded(f"needed more than {step_cap} steps for {count} blocks")
        if rng.u01() < p:
            acc += 1 << (level + floor_i)
            level += 1
        else:
            level -= 1
            if level == -(floor_i + 1):
                blocks.append(acc)
                taus.append(rng.i)
                acc = 0
                floor_i += 1
    return BlockSample(blocks, taus)


def digit_from_blocks(blocks, k: int, margin: int = TAIL_MARGIN):
    """First k bits floor(2^k S) mod 2^k from leading blocks of
    S = sum A_n 2^-n, or None when the unseen tail could still carry.

    With J+1 blocks the tail is < 2^-(J-margin) w.h.p. once margin
    covers the block sizes, so the digit is resolved iff adding that
    much cannot change floor(2^k S): scaled to integers, V = sum A_n
    2^(J-n) and the test is (V << k) mod 2^J < 2^J - 2^(k+margin).
    """
    J = len(blocks) - 1
    V = 0
    for n, a in enumerate(blocks):
        V += a << (J - n)
    num = V << k
    rem = num & ((1 << J) - 1)
    if rem < (1 << J) - (1 << (k + margin)):
        return (num >> J) % (1 << k)
    return None


def z_from_blocks(blocks, j: int, k: int, margin: int = TAIL_MARGIN):
    """Z_j = floor(2^k sum_{n>=j} A_n 2^-(n-j)), or None if unresolved.

    The Z_j satisfy Z_j = 2^k A_j + floor(Z_{j+1} / 2) wherever resolved.
    """
    sub = blocks[j:]
    J = len(sub) - 1
    V = 0
    for n, a in enumerate(sub):
        V += a << (J - n)
    num = V << k
    rem = num & ((1 << J) - 1)
    if rem < (1 << J) - (1 << (k + margin)):
        return num >> J
    return None


def digit_sample(
    p: float,
    k: int,
    rng: Stream,
    guard_bits: int = DEFAULT_GUARD_BITS,
    margin: int = TAIL_MARGIN,
    step_cap: int = DEFAULT_STEP_CAP,
) -> int:
    """One draw of the leading-k-bit digit of S under win probability p.

    Samples k + guard_bits + 1 blocks; if the carry test is still
    ambiguous, extends once with the same number of fresh blocks (the
    blocks are i.i.d., so extension just sharpens the same draw) and
    raises AmbiguousDigit if that still does not settle it.
    """
    nblocks = k + guard_bits + 1
    bs = sample_blocks(p, nblocks, rng, step_cap)
    d = digit_from_blocks(bs.blocks, k, margin)
    if d is None:
        ext = sample_blocks(p, nblocks, rng, step_cap)
        d = digit_from_blocks(bs.blocks + ext.blocks, k, margin)
    if d is None:
        raise AmbiguousDigit(f"digit unresolved after {2 * nblocks} blocks")
    return d


@dataclass(frozen=True)
class ZChainSample:
    blocks: list
    z: list  # Z_0..Z_{j_max}, entries None where unresolved


def z_chain(
    p: float,
    k: int,
    j_max: int,
    rng: Stream,
    margin: int = TAIL_MARGIN,
    step_cap: int = DEFAULT_STEP_CAP,
) -> ZChainSample:
    """Sample one path's Z_0..Z_{j_max} (the shifted-tail integer parts
    feeding digit j). Enough extra blocks are drawn that resolution
    failures are ~2^-40 rare."""
    nblocks = j_max + k + margin + 40
    bs = sample_blocks(p, nblocks, rng, step_cap)
    zs = [z_from_blocks(bs.blocks, j, k, margin) for j in range(j_max + 1)]
    return ZChainSample(bs.blocks, zs)


def verify_block_sums(p: float, count: int, samples: int, seed: int, step_cap: int = DEFAULT_STEP_CAP) -> dict:
    """Check, per path, that the block decomposition reproduces the raw
    partial sum bit-exactly: sum A_i 2^-i at the last closing time must
    equal sum_{wins so far} 2^(S_{i-1}) replayed step by step."""
    checked = 0
    capped = 0
    for i in range(samples):
        rng = Stream(seed, i)
        try:
            bs = sample_blocks(p, count, rng, step_cap)
        except BlockCapExceeded:
            capped += 1
            continue
        replay = Stream(seed, i)
        acc = _ZERO
        level = 0
        for _ in range(bs.taus[-1]):
            if replay.u01() < p:
                acc = acc + DyadicRational(1, level)
                level += 1
            else:
                level -= 1
        if bs.partial != acc:
            raise VerificationFailed(
                f"block sum mismatch on path {i}: {bs.partial.serialize()} "
                f"vs {acc.serialize()}"
            )
        checked += 1
    return {"paths": samples, "checked": checked, "capped": capped}


def verify_z_chain(
    p: float, k: int, j_max: int, samples: int, seed: int, margin: int = TAIL_MARGIN
) -> dict:
    """Check the digit recursion Z_j = 2^k A_j + floor(Z_{j+1}/2) on
    sampled paths at every resolved site. Raises VerificationFailed on
    any violation; reports how many sites resolved."""
    sites = 0
    resolved = 0
    for i in range(samples):
        zc = z_chain(p, k, j_max, Stream(seed, i), margin)
        for j in range(j_max):
            sites += 1
            zj, zj1 = zc.z[j], zc.z[j + 1]
            if zj is None or zj1 is None:
                continue
            resolved += 1
            if zj != (zc.blocks[j] << k) + (zj1 >> 1):
                raise VerificationFailed(
                    f"digit recursion broken on path {i} at j={j}: "
                    f"Z_j={zj} A_j={zc.blocks[j]} Z_(j+1)={zj1}"
                )
    return {"paths": samples, "sites": sites, "resolved": resolved}


# -- coupling --------------------------------------------------------------

def coupled_pair(p1: float, p2: float, u1: float, u2: float):
    """Monotone-coupled signs for p1 <= p2 from two shared uniforms.

    The first uniform decides the p1 outcome; the second promotes a
    p1-loss to a p2-win with probability (p2 - p1)/(1 - p1), so the p2
    path wins whenever the p1 path does.
    """
    if not p1 <= p2:
        raise ValueError("coupling needs p1 <= p2")
    xi1 = 1 if u1 < p1 else -1
    xi2 = 1 if (xi1 == 1 or u2 < (p2 - p1) / (1.0 - p1)) else -1
    return xi1, xi2


def coupled_run(x, p1: float, p2: float, horizon: int, samples: int, seed: int, threads: int = 1) -> dict:
    """Run coupled pairs, counting partial-sum domination violations
    (exact check every step; should be zero) and estimating
    f_horizon(x, p2) - f_horizon(x, p1) from the coupled difference."""
    if not p1 <= p2:
        raise ValueError("coupling needs p1 <= p2")
    num, den = _x_ratio(x)

    def worker(lo, hi):
        v = d1c = d2c = 0
        for i in range(lo, hi):
            viol, d1, d2 = kernels.coupled_path(num, den, p1, p2, horizon, seed, i)
            if viol:
                v += 1
            if d1 >= 0:
                d1c += 1
            if d2 >= 0:
                d2c += 1
        return v, d1c, d2c

    viols, d1c, d2c = _parallel_sum(worker, samples, threads)
    return {
        "domination_violations": viols,
        "f_diff_estimate": (d2c - d1c) / samples,
        "doomed_frac_lo": d1c / samples,
        "doomed_frac_hi": d2c / samples,
        "samples": samples,
    }


# -- generalized multiplier -------------------------------------------------

def generalized_run(x, p: float, rho: float, horizon: int, seed: int, stream: int = 0) -> int:
    """Steps until doom under the rho rule (win (Y+1)/rho, loss
    rho(Y-1), doom at Y <= rho/(rho-1)), or -1 if censored.

    rho = 2 is the doubling strategy itself and runs through the exact
    integer kernel; other rho use double precision.
    """
    if rho <= 1.0:
        raise ValueError("need rho > 1")
    if rho == 2.0:
        num, den = _x_ratio(x)
        return kernels.doom_path(num, den, p, horizon, seed, stream)
    return kernels.rho_path(float(rho), p, float(x), horizon, seed, stream)


def threshold_scan(
    rho: float, p: float, xs, horizon: int, samples: int, seed: int, threads: int = 1
) -> list:
    """Doom fraction at each starting fortune in xs (one row per x).

    Every x reuses the same stream ids (common random numbers), so the
    scan is monotone in x up to the coupling of doom times.
    """
    rows = []
    for x in xs:
        def worker(lo, hi, x=x):
            c = 0
            for i in range(lo, hi):
                if generalized_run(x, p, rho, horizon, seed, i) >= 0:
                    c += 1
            return (c,)

        (c,) = _parallel_sum(worker, samples, threads)
        rows.append({"x": float(x), "doomed_frac": c / samples, "samples": samples})
    return rows


def post_doom_ruin(p: float, samples: int, post_steps: int, seed: int, doom_horizon: int = 100, threads: int = 1) -> dict:
    """From x = 3: of paths doomed within doom_horizon, the fraction
    whose wealth actually hits <= 0 within post_steps further gambles."""

    def worker(lo, hi):
        d = r = 0
        for i in range(lo, hi):
            doomed, reached = kernels.post_doom_path(p, doom_horizon, post_steps, seed, i)
            d += doomed
            r += reached
        return d, r

    doomed, reached = _parallel_sum(worker, samples, threads)
    return {
        "doomed": doomed,
        "reached_ruin": reached,
        "frac": reached / doomed if doomed else float("nan"),
        "samples": samples,
    }

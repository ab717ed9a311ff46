"""Pure-Python simulation kernels.

Per-path inner loops, written against primitive arguments only so the
compiled extension in _kernels.pyx can mirror them function for
function. The RNG is inlined (counter-based splitmix64, identical to
rng.Stream): path `stream` under `seed` draws u_i from counter i,
starting just above `i0`, and every gamble consumes exactly one
uniform. Kernels return the final counter where callers may need to
continue the same stream.

Partial sums sum 1{win} 2^(S_{i-1}) are kept as exact integers
(acc, scale) with value acc * 2^-scale, and wealth as wm * 2^we with
bets 2^be, so doom and ruin tests are bit-exact at any depth.
"""
from __future__ import annotations

from .errors import ExponentCapExceeded

KERNEL_IMPL = "pure"

GOLD = 0x9E3779B97F4A7C15
MASK = (1 << 64) - 1
INV53 = 1.0 / (1 << 53)


def _mix64(z):
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & MASK
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & MASK
    return z ^ (z >> 31)


def _base(seed, stream):
    return _mix64(_mix64(seed & MASK) ^ ((stream * GOLD + 1) & MASK))


def doom_path(x_num, x_den, p, horizon, seed, stream):
    """First step at which the partial sum reaches x - 2, or -1.

    Stops drawing at doom, so the cost of a doomed path is its doom
    time. x may be any positive rational here.
    """
    thr = x_num - 2 * x_den
    if thr <= 0:
        return 0
    base = _base(seed, stream)
    acc = 0
    scale = 0
    level = 0
    for n in range(1, horizon + 1):
        if (_mix64((base + n * GOLD) & MASK) >> 11) * INV53 < p:
            s = level
            if s >= -scale:
                acc += 1 << (s + scale)
            else:
                sh = -s - scale
                acc = (acc << sh) + 1
                scale += sh
            level += 1
            if acc * x_den >= thr << scale:
                return n
        else:
            level -= 1
    return -1


def eventual_path(x_num, x_den, p, horizon, seed, stream, exp_cap):
    """(doom step, ruin step), each -1 if not reached by the horizon.

    Tracks exact wealth wm * 2^we with bet 2^be, so x_den must be a
    power of two. Stops at ruin (wealth <= 0); doom always precedes it.
    """
    d = x_den.bit_length() - 1
    if (1 << d) != x_den:
        raise ValueError("eventual_path needs a dyadic starting point")
    base = _base(seed, stream)
    wm, we = x_num, -d
    be = 0
    thr = x_num - 2 * x_den
    acc = 0
    scale = 0
    level = 0
    doom = 0 if thr <= 0 else -1
    ruin = -1
    for n in range(1, horizon + 1):
        win = (_mix64((base + n * GOLD) & MASK) >> 11) * INV53 < p
        ce = we if we < be else be
        wm = (wm << (we - ce)) + ((1 << (be - ce)) if win else -(1 << (be - ce)))
        we = ce
        if win:
            be += 1
            s = level
            if s >= -scale:
                acc += 1 << (s + scale)
            else:
                sh = -s - scale
                acc = (acc << sh) + 1
                scale += sh
            level += 1
            if doom < 0 and acc * x_den >= thr << scale:
                doom = n
        else:
            be -= 1
            level -= 1
        if we < -exp_cap or be < -exp_cap or be > exp_cap:
            raise ExponentCapExceeded(f"bet/wealth exponent left +/-{exp_cap} at step {n}")
        if ruin < 0 and wm <= 0:
            ruin = n
            break
    return doom, ruin


def coupled_path(x_num, x_den, p1, p2, horizon, seed, stream):
    """One monotone-coupled pair, p1 <= p2.

    Both components consume the same two uniforms per step: the first
    decides the p1 sign, the second upgrades a p1-loss to a p2-win with
    probability (p2 - p1)/(1 - p1). Returns (domination_violated,
    doom step of path 1, doom step of path 2).
    """
    base = _base(seed, stream)
    acc1 = acc2 = 0
    sc1 = sc2 = 0
    lvl1 = lvl2 = 0
    d1 = d2 = -1
    r = (p2 - p1) / (1.0 - p1)
    thr = x_num - 2 * x_den
    viol = False
    i = 0
    for n in range(1, horizon + 1):
        i += 1
        u1 = (_mix64((base + i * GOLD) & MASK) >> 11) * INV53
        i += 1
        u2 = (_mix64((base + i * GOLD) & MASK) >> 11) * INV53
        xi1 = u1 < p1
        xi2 = xi1 or (u2 < r)
        if xi1:
            s = lvl1
            if s >= -sc1:
                acc1 += 1 << (s + sc1)
            else:
                sh = -s - sc1
                acc1 = (acc1 << sh) + 1
                sc1 += sh
            lvl1 += 1
            if d1 < 0 and acc1 * x_den >= thr << sc1:
                d1 = n
        else:
            lvl1 -= 1
        if xi2:
            s = lvl2
            if s >= -sc2:
                acc2 += 1 << (s + sc2)
            else:
                sh = -s - sc2
                acc2 = (acc2 << sh) + 1
                sc2 += sh
            lvl2 += 1
            if d2 < 0 and acc2 * x_den >= thr << sc2:
                d2 = n
        else:
            lvl2 -= 1
        if sc1 >= sc2:
            if acc1 > acc2 << (sc1 - sc2):
                viol = True
        else:
            if acc1 << (sc2 - sc1) > acc2:
                viol = True
    return viol, d1, d2


def sample_blocks(p, count, step_cap, seed, stream, i0=0):
    """Blocks A_0..A_{count-1} of the limit sum, with their closing times.

    Block i collects win contributions 2^(S_{n-1}+i) between the hitting
    times of levels -i and -(i+1); A_i is an exact integer. Returns
    (blocks, taus, draws_consumed) or (None, None, draws_consumed) when
    step_cap is exhausted. Pass i0 to continue a partly consumed stream.
    """
    base = _base(seed, stream)
    blocks = []
    taus = []
    level = 0
    floor_i = 0
    acc = 0
    i = i0
    steps = 0
    while len(blocks) < count:
        steps += 1
        if steps > step_cap:
            return None, None, i
        i += 1
        if (_mix64((base + i * GOLD) & MASK) >> 11) * INV53 < p:
            acc += 1 << (level + floor_i)
            level += 1
        else:
            level -= 1
            if level == -(floor_i + 1):
                blocks.append(acc)
                taus.append(i)
                acc = 0
                floor_i += 1
    return blocks, taus, i


def post_doom_path(p, doom_horizon, post_steps, seed, stream):
    """From x = 3: (doomed within doom_horizon, hit W <= 0 within
    post_steps after doom), both 0/1."""
    base = _base(seed, stream)
    wm, we = 3, 0
    be = 0
    acc = 0
    scale = 0
    level = 0
    doom_n = -1
    i = 0
    for n in range(1, doom_horizon + 1):
        i += 1
        win = (_mix64((base + i * GOLD) & MASK) >> 11) * INV53 < p
        ce = we if we < be else be
        wm = (wm << (we - ce)) + ((1 << (be - ce)) if win else -(1 << (be - ce)))
        we = ce
        be += 1 if win else -1
        if win:
            s = level
            if s >= -scale:
                acc += 1 << (s + scale)
            else:
                sh = -s - scale
                acc = (acc << sh) + 1
                scale += sh
            level += 1
            if acc >= 1 << scale:  # partial >= x - 2 = 1
                doom_n = n
                break
        else:
            level -= 1
    if doom_n < 0:
        return 0, 0
    hit = wm <= 0
    for _ in range(post_steps):
        if hit:
            break
        i += 1
        win = (_mix64((base + i * GOLD) & MASK) >> 11) * INV53 < p
        ce = we if we < be else be
        wm = (wm << (we - ce)) + ((1 << (be - ce)) if win else -(1 << (be - ce)))
        we = ce
        be += 1 if win else -1
        if wm <= 0:
            hit = True
    return 1, 1 if hit else 0


def rho_path(rho, p, x, horizon, seed, stream):
    """Doom time under the rho-fold rule (win (y+1)/rho, loss
    rho*(y-1)), doom when y <= rho/(rho-1). Double precision."""
    base = _base(seed, stream)
    thr = rho / (rho - 1.0)
    y = x
    for n in range(1, horizon + 1):
        if y <= thr:
            return n - 1
        if (_mix64((base + n * GOLD) & MASK) >> 11) * INV53 < p:
            y = (y + 1.0) / rho
        else:
            y = rho * (y - 1.0)
    return -1

# cython: language_level=3, boundscheck=False, wraparound=False
"""Compiled simulation kernels.

Function-for-function mirror of _kernels_py with identical signatures
and bit-identical outputs: the splitmix64 generator, the level
bookkeeping, and the double-precision comparisons run at C speed, while
partial sums and wealth stay exact Python integers (they can exceed any
fixed width). Parity with the pure backend is enforced by tests.
"""

from .errors import ExponentCapExceeded

KERNEL_IMPL = "cython"

cdef unsigned long long GOLD = 0x9E3779B97F4A7C15ULL
cdef double INV53 = 1.0 / 9007199254740992.0  # 2^-53

# Python int unit for shifts: C literals would shift in (masked) int
# width, but these exponents routinely exceed 63
cdef object ONE = 1


cdef inline unsigned long long _mix64(unsigned long long z) nogil:
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL
    return z ^ (z >> 31)


cdef inline unsigned long long _stream_base_ull(unsigned long long seed, unsigned long long stream) nogil:
    return _mix64(_mix64(seed) ^ (stream * GOLD + 1ULL))


cdef unsigned long long _stream_base(object seed, object stream):
    # mask arbitrary Python ints down to the 64-bit lane the generator
    # works in (same as the pure backend)
    return _stream_base_ull(seed & 0xFFFFFFFFFFFFFFFF, stream & 0xFFFFFFFFFFFFFFFF)


cdef inline double _u01(unsigned long long base, unsigned long long i) nogil:
    return <double> (_mix64(base + i * GOLD) >> 11) * INV53


def doom_path(x_num, x_den, double p, long horizon, seed, stream):
    """First step at which the partial sum reaches x - 2, or -1."""
    thr = x_num - 2 * x_den
    if thr <= 0:
        return 0
    cdef unsigned long long base = _stream_base(seed, stream)
    cdef long n, level = 0, scale = 0, s, sh
    acc = 0
    for n in range(1, horizon + 1):
        if _u01(base, <unsigned long long> n) < p:
            s = level
            if s >= -scale:
                acc += ONE << (s + scale)
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


def eventual_path(x_num, x_den, double p, long horizon, seed, stream, exp_cap):
    """(doom step, ruin step), each -1 if not reached by the horizon."""
    cdef long d = x_den.bit_length() - 1
    if (ONE << d) != x_den:
        raise ValueError("eventual_path needs a dyadic starting point")
    cdef unsigned long long base = _stream_base(seed, stream)
    cdef long cap = exp_cap
    cdef long n, we = -d, be = 0, ce, level = 0, scale = 0, s, sh
    cdef long doom = -1, ruin = -1
    cdef bint win
    wm = x_num
    thr = x_num - 2 * x_den
    if thr <= 0:
        doom = 0
    acc = 0
    for n in range(1, horizon + 1):
        win = _u01(base, <unsigned long long> n) < p
        ce = we if we < be else be
        wm = (wm << (we - ce)) + ((ONE << (be - ce)) if win else -(ONE << (be - ce)))
        we = ce
        if win:
            be += 1
            s = level
            if s >= -scale:
                acc += ONE << (s + scale)
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
        if we < -cap or be < -cap or be > cap:
            raise ExponentCapExceeded(f"bet/wealth exponent left +/-{cap} at step {n}")
        if ruin < 0 and wm <= 0:
            ruin = n
            break
    return doom, ruin


def coupled_path(x_num, x_den, double p1, double p2, long horizon, seed, stream):
    """One monotone-coupled pair, p1 <= p2: (violated, doom1, doom2)."""
    cdef unsigned long long base = _stream_base(seed, stream)
    cdef long n, lvl1 = 0, lvl2 = 0, sc1 = 0, sc2 = 0, s, sh
    cdef long d1 = -1, d2 = -1
    cdef unsigned long long i = 0
    cdef double r = (p2 - p1) / (1.0 - p1)
    cdef double u1, u2
    cdef bint xi1, xi2, viol = False
    acc1 = 0
    acc2 = 0
    thr = x_num - 2 * x_den
    for n in range(1, horizon + 1):
        i += 1
        u1 = _u01(base, i)
        i += 1
        u2 = _u01(base, i)
        xi1 = u1 < p1
        xi2 = xi1 or (u2 < r)
        if xi1:
            s = lvl1
            if s >= -sc1:
                acc1 += ONE << (s + sc1)
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
                acc2 += ONE << (s + sc2)
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


def sample_blocks(double p, long count, long step_cap, seed, stream, i0=0):
    """(blocks, taus, draws consumed), or (None, None, draws) on cap."""
    cdef unsigned long long base = _stream_base(seed, stream)
    cdef unsigned long long i = i0
    cdef long level = 0, floor_i = 0, steps = 0
    blocks = []
    taus = []
    acc = 0
    while len(blocks) < count:
        steps += 1
        if steps > step_cap:
            return None, None, i
        i += 1
        if _u01(base, i) < p:
            acc += ONE << (level + floor_i)
            level += 1
        else:
            level -= 1
            if level == -(floor_i + 1):
                blocks.append(acc)
                taus.append(i)
                acc = 0
                floor_i += 1
    return blocks, taus, i


def post_doom_path(double p, long doom_horizon, long post_steps, seed, stream):
    """From x = 3: (doomed within doom_horizon, hit W <= 0 after)."""
    cdef unsigned long long base = _stream_base(seed, stream)
    cdef unsigned long long i = 0
    cdef long n, m, we = 0, be = 0, ce, level = 0, scale = 0, s, sh
    cdef long doom_n = -1
    cdef bint win, hit
    wm = 3
    acc = 0
    for n in range(1, doom_horizon + 1):
        i += 1
        win = _u01(base, i) < p
        ce = we if we < be else be
        wm = (wm << (we - ce)) + ((ONE << (be - ce)) if win else -(ONE << (be - ce)))
        we = ce
        be += 1 if win else -1
        if win:
            s = level
            if s >= -scale:
                acc += ONE << (s + scale)
            else:
                sh = -s - scale
                acc = (acc << sh) + 1
                scale += sh
            level += 1
            if acc >= ONE << scale:  # partial >= x - 2 = 1
                doom_n = n
                break
        else:
            level -= 1
    if doom_n < 0:
        return 0, 0
    hit = wm <= 0
    for m in range(post_steps):
        if hit:
            break
        i += 1
        win = _u01(base, i) < p
        ce = we if we < be else be
        wm = (wm << (we - ce)) + ((ONE << (be - ce)) if win else -(ONE << (be - ce)))
        we = ce
        be += 1 if win else -1
        if wm <= 0:
            hit = True
    return 1, 1 if hit else 0


def rho_path(double rho, double p, double x, long horizon, seed, stream):
    """Doom time under the rho rule, or -1. Double precision."""
    cdef unsigned long long base = _stream_base(seed, stream)
    cdef double thr = rho / (rho - 1.0)
    cdef double y = x
    cdef long n
    for n in range(1, horizon + 1):
        if y <= thr:
            return n - 1
        if _u01(base, <unsigned long long> n) < p:
            y = (y + 1.0) / rho
        else:
            y = rho * (y - 1.0)
    return -1

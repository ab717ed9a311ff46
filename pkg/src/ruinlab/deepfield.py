"""Certified deep-horizon evaluation on the log scale.

Writing y for the normalized fortune and t = log2(y - 2), one gamble
maps t to

    win:  t' = t + log2(1 - 2^-t) - 1   (absorbing, f = 1, when t <= 0)
    loss: t' = t + 1

which is an exact +1 shift and a contractive nonlinear map. On a
uniform t-grid the loss shift is an integer index move, and rounding
the win image down (up) to a grid point under the monotone-decreasing
profile D_n(t) = f_n(2 + 2^t) gives an upper (lower) envelope, so value
iteration on the grid carries certified two-sided brackets of every
f_n simultaneously, at any depth, in fixed memory.

The grid alone loses resolution near t = 0; the hybrid evaluator fixes
that by evolving the exact alive measure of t-states forward a few
dozen steps (no grid, float keys, exact weights) and closing the tail
against the envelopes, with certified error = sum of mass times local
envelope width.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

LO, HI = -40.0, 40.0
FORWARD_STEPS = 28


class EnvelopeGrid:
    """Monotone value iteration with two-sided rounding envelopes.

    After n calls to step(), DL and DU bracket D_n(t) = f_n(2 + 2^t) at
    every grid point. Brackets are valid for each n separately (the
    scheme is monotone, so rounding errors never cross).
    """

    def __init__(self, p: float, invh: int, upper: bool = True, lo: float = LO, hi: float = HI):
        self.p, self.q, self.invh = p, 1.0 - p, invh
        self.lo, self.hi = lo, hi
        N = int(round((hi - lo) * invh)) + 1
        self.N = N
        t = lo + np.arange(N) / invh
        self.t = t
        with np.errstate(divide="ignore", invalid="ignore"):
            tp = t + np.log2(-np.expm1(-t * math.log(2.0))) - 1.0
        self.i0 = int(np.searchsorted(t, 0.0, side="right"))  # first idx with t > 0
        iu = np.searchsorted(t, tp, side="left")
        idn = iu - 1
        ok = (iu >= 0) & (iu < N)
        exact = np.zeros(N, bool)
        exact[ok] = np.abs(t[np.clip(iu, 0, N - 1)[ok]] - tp[ok]) < 1e-12
        idn[exact] = iu[exact]
        # Out-of-range win images form two contiguous bands. Only cells
        # with t > 0 count: the t <= 0 rows have NaN images (their win
        # absorbs at f = 1 and step() overwrites them), and NaN sorts
        # past the array end, so an unrestricted sum would misread the
        # whole absorbed prefix as a top band.
        self.n_oob_up = int(np.sum(iu[self.i0 :] >= N))   # top suffix, image beyond hi
        self.n_oob_dn = int(np.sum((idn < 0) & (t > 0)))  # just above t=0, image below lo
        self.iu = np.clip(iu, 0, N - 1).astype(np.int64)
        self.idn = np.clip(idn, 0, N - 1).astype(np.int64)
        self.K = int(round(invh))
        # stationary upper value at the top edge: (p/q)^hi when p < q
        self.top = (p / self.q) ** hi if p < self.q else 1.0
        self.DL = np.zeros(N)
        self.upper = upper
        if upper:
            self.DU = np.zeros(N)
        self.n = 0
        self._wl = np.empty(N)
        self._ll = np.empty(N)
        if upper:
            self._wu = np.empty(N)
            self._lu = np.empty(N)

    def step(self, m: int = 1):
        p, q, K, N, i0 = self.p, self.q, self.K, self.N, self.i0
        for _ in range(m):
            wl = self._wl
            np.take(self.DL, self.iu, out=wl)
            wl[:i0] = 1.0  # win from t <= 0 absorbs at f = 1
            if self.n_oob_up:
                wl[N - self.n_oob_up :] = 0.0
            ll = self._ll
            ll[: N - K] = self.DL[K:]
            ll[N - K :] = 0.0
            newL = p * wl
            newL += q * ll
            if self.upper:
                wu = self._wu
                np.take(self.DU, self.idn, out=wu)
                wu[:i0] = 1.0
                if self.n_oob_dn:
                    wu[i0 : i0 + self.n_oob_dn] = 1.0
                if self.n_oob_up:
                    wu[N - self.n_oob_up :] = self.top
                lu = self._lu
                lu[: N - K] = self.DU[K:]
                lu[N - K :] = self.top
                newU = p * wu
                newU += q * lu
                self.DU = newU
            self.DL = newL
            self.n += 1

    def read(self, x: float, lower: bool = True) -> float:
        """Bracket of f_n(x) at the grid's current depth n."""
        if x <= 2.0:
            return 1.0
        tx = math.log2(x - 2.0)
        if tx <= self.lo:
            return float(self.DL[0]) if lower else 1.0
        if tx >= self.hi:
            return 0.0 if lower else self.top
        pos = (tx - self.lo) * self.invh
        if lower:
            return float(self.DL[int(math.ceil(pos - 1e-9))])
        return float(self.DU[int(math.floor(pos + 1e-9))])

    def bracket(self, x: float):
        return self.read(x, True), self.read(x, False)

    def mid(self, x: float) -> float:
        if x <= 2.0:
            return 1.0
        return 0.5 * (self.read(x, True) + self.read(x, False))

    def sharp(self, x: float) -> float:
        """One exact recursion step off the grid; sharper near t = 0."""
        if x <= 2.0:
            return 1.0
        return self.p * self.mid((x + 1.0) / 2.0) + self.q * self.mid(2.0 * x - 2.0)


def forward_measure(x: float, p: float, steps: int):
    """Exact alive measure after `steps` gambles from fortune x.

    Returns (absorbed, ts, ws): mass already certain to be doomed, and
    the distinct alive t-states with their probabilities. Weights are
    exact up to double rounding; no truncation is applied.
    """
    q = 1.0 - p
    ts = np.array([math.log2(x - 2.0)])
    ws = np.array([1.0])
    absorbed = 0.0
    for _ in range(steps):
        doom = ts <= 0.0
        absorbed += p * ws[doom].sum()
        tw = ts[~doom]
        with np.errstate(divide="ignore"):
            twin = tw + np.log2(-np.expm1(-tw * math.log(2.0))) - 1.0
        # Wins can land exactly on t = j (fortune 2 + 2^j, j integer);
        # float rounding leaves +/-ulp fuzz there which the exact +1
        # loss shifts later carry across the doom boundary t = 0, where
        # a wrong sign misroutes that doom mass. Snapping to the
        # integer is exact while the fortune's denominator bits plus
        # `steps` stay below ~32 (every caller here); past that the
        # snapped states sit within 2^-32 of the lattice and the error
        # is bounded by their mass times (1-p)^32.
        r = np.round(twin)
        snap = np.abs(twin - r) < 1e-10
        twin[snap] = r[snap]
        new_t = np.concatenate([twin, ts + 1.0])
        new_w = np.concatenate([p * ws[~doom], q * ws])
        ts, inv = np.unique(new_t, return_inverse=True)
        ws = np.zeros(len(ts))
        np.add.at(ws, inv, new_w)
    return absorbed, ts, ws


@dataclass(frozen=True)
class HybridValue:
    """Certified estimate of f_n(x): value is the bracket midpoint, and
    |value - f_n(x)| <= err."""

    value: float
    err: float
    lower: float
    upper: float
    n: int
    states: int


def hybrid_eval(x: float, p: float, field: EnvelopeGrid, forward_steps: int = FORWARD_STEPS) -> HybridValue:
    """Bracket f_n(x) for n = forward_steps + field.n.

    Decomposes f_n(x) = absorbed + sum_i w_i f_{field.n}(y_i) over the
    exact alive measure, then reads the envelope at each y_i.
    """
    if x <= 2.0:
        return HybridValue(1.0, 0.0, 1.0, 1.0, forward_steps + field.n, 0)
    absorbed, ts, ws = forward_measure(x, p, forward_steps)
    lo, hi, invh = field.lo, field.hi, field.invh
    DL = field.DL
    DU = field.DU
    pos = (ts - lo) * invh
    il = np.ceil(pos - 1e-9).astype(np.int64).clip(0, field.N - 1)
    iu = np.floor(pos + 1e-9).astype(np.int64).clip(0, field.N - 1)
    dl = DL[il]
    du = DU[iu]
    below = ts <= lo
    dl[below], du[below] = DL[0], 1.0
    above = ts >= hi
    dl[above], du[above] = 0.0, field.top
    lower = absorbed + float(ws @ dl)
    upper = absorbed + float(ws @ du)
    return HybridValue(
        0.5 * (lower + upper),
        0.5 * (upper - lower),
        lower,
        upper,
        forward_steps + field.n,
        len(ts),
    )

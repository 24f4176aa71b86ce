"""Numba-compiled kernel implementations.

Compiled twin of :mod:`cpsched.backend.pure`; the two are held
bit-identical by ``tests/test_backends.py``.  All slot masks and RNG words
are uint64 so overflow wraps exactly like the masked arithmetic on the
pure side.  Loop indices stay int64 and are cast explicitly wherever they
feed a shift.

Every kernel carries an explicit signature: beyond compiling eagerly, this
makes the dispatcher coerce plain Python ints at the call boundary instead
of specializing an int64 variant whose mixed signed/unsigned arithmetic
would silently promote to float64.
"""

from __future__ import annotations

import math

import numpy as np
from numba import njit

BACKEND_NAME = "numba"

_U0 = np.uint64(0)
_U1 = np.uint64(1)
_GOLDEN = np.uint64(0x9E3779B97F4A7C15)
_MIX_A = np.uint64(0xBF58476D1CE4E5B9)
_MIX_B = np.uint64(0x94D049BB133111EB)
_SH30 = np.uint64(30)
_SH27 = np.uint64(27)
_SH31 = np.uint64(31)
_SH11 = np.uint64(11)
_INV_2_53 = 1.0 / 9007199254740992.0  # 2**-53


# ---------------------------------------------------------------------------
# random draws


@njit("UniTuple(uint64, 2)(uint64)", cache=True)
def rng_next(state):
    state = state + _GOLDEN
    z = state
    z = (z ^ (z >> _SH30)) * _MIX_A
    z = (z ^ (z >> _SH27)) * _MIX_B
    z = z ^ (z >> _SH31)
    return z, state


@njit("Tuple((float64, uint64))(uint64)", cache=True)
def rng_uniform(state):
    u, state = rng_next(state)
    return float(u >> _SH11) * _INV_2_53, state


@njit("Tuple((int64, uint64))(int64, uint64)", cache=True)
def rng_below(n, state):
    u, state = rng_next(state)
    return np.int64(u % np.uint64(n)), state


# ---------------------------------------------------------------------------
# slot-mask primitives


@njit("int64(uint64)", cache=True)
def popcount(mask):
    c = 0
    m = mask
    while m != _U0:
        m &= m - _U1
        c += 1
    return c


@njit("boolean(uint64, uint64, int64)", cache=True)
def l_covers(alloc_mask, gen_mask, latency):
    avail = alloc_mask
    m = gen_mask
    s = 1
    while m != _U0:
        if (m & _U1) != _U0:
            hi = s + latency
            if hi > 64:
                hi = 64
            u = s
            found = _U0
            while u <= hi:
                b = _U1 << np.uint64(u - 1)
                if (avail & b) != _U0:
                    found = b
                    break
                u += 1
            if found == _U0:
                return False
            avail ^= found
        m >>= _U1
        s += 1
    return True


@njit("boolean(uint64, uint64, int64)", cache=True)
def l_covers_exhaustive(alloc_mask, gen_mask, latency):
    packets = np.empty(64, np.int64)
    cnt = 0
    m = gen_mask
    s = 1
    while m != _U0:
        if (m & _U1) != _U0:
            packets[cnt] = s
            cnt += 1
        m >>= _U1
        s += 1
    if cnt == 0:
        return True
    pos = np.zeros(cnt, np.int64)
    used = _U0
    depth = 0
    while True:
        g = packets[depth]
        u = pos[depth] + 1 if pos[depth] != 0 else g
        hi = g + latency
        if hi > 64:
            hi = 64
        ok = False
        while u <= hi:
            b = _U1 << np.uint64(u - 1)
            if (alloc_mask & b) != _U0 and (used & b) == _U0:
                ok = True
                break
            u += 1
        if not ok:
            pos[depth] = 0
            depth -= 1
            if depth < 0:
                return False
            used ^= _U1 << np.uint64(pos[depth] - 1)
        else:
            pos[depth] = u
            used |= _U1 << np.uint64(u - 1)
            if depth == cnt - 1:
                return True
            depth += 1


@njit("int64(int64, int64)", cache=True)
def count_l_cover_mismatches(num_slots, latency):
    lim = 1 << num_slots
    bad = 0
    for a in range(lim):
        am = np.uint64(a)
        for g in range(lim):
            gm = np.uint64(g)
            if l_covers(am, gm, latency) != l_covers_exhaustive(am, gm, latency):
                bad += 1
    return bad


# ---------------------------------------------------------------------------
# predictor / prediction-set kernels


@njit("Tuple((uint64[:], float64[:]))(uint64, int64, float64, float64, int64, int64)", cache=True)
def transition_support(state_mask, num_slots, p_plus, p_minus, g_min, g_max):
    g = state_mask
    card = popcount(g)
    masks = np.empty(num_slots + 1, np.uint64)
    probs = np.empty(num_slots + 1, np.float64)
    p_stay = 1.0 - p_plus - p_minus
    if card == g_max:
        p_stay += p_plus
    if card == g_min:
        p_stay += p_minus
    n = 0
    if p_stay > 0.0:
        masks[n] = g
        probs[n] = p_stay
        n += 1
    if card > g_min and p_minus > 0.0:
        p_rem = p_minus / card
        for s in range(1, num_slots + 1):
            b = _U1 << np.uint64(s - 1)
            if (g & b) != _U0:
                masks[n] = g ^ b
                probs[n] = p_rem
                n += 1
    if card < g_max and p_plus > 0.0:
        p_add = p_plus / (num_slots - card)
        for s in range(1, num_slots + 1):
            b = _U1 << np.uint64(s - 1)
            if (g & b) == _U0:
                masks[n] = g | b
                probs[n] = p_add
                n += 1
    return masks[:n], probs[:n]


@njit("Tuple((int64, float64))(uint64[:], float64[:], float64)", cache=True)
def select_prefix(masks, probs, alpha_f):
    n = len(masks)
    for i in range(1, n):  # insertion sort; n <= S + 1 and the key is total
        mk = masks[i]
        pk = probs[i]
        j = i - 1
        while j >= 0 and (probs[j] < pk or (probs[j] == pk and masks[j] > mk)):
            masks[j + 1] = masks[j]
            probs[j + 1] = probs[j]
            j -= 1
        masks[j + 1] = mk
        probs[j + 1] = pk
    target = 1.0 - alpha_f
    covered = 0.0
    k = 0
    while k < n and covered < target:
        covered += probs[k]
        k += 1
    return k, covered


@njit("uint64(uint64[:], int64, int64)", cache=True)
def greedy_allocate(pattern_masks, latency, num_slots):
    n = len(pattern_masks)
    work = pattern_masks.copy()
    alloc = _U0
    for s in range(num_slots, 0, -1):
        sbit = _U1 << np.uint64(s - 1)
        hit = False
        for i in range(n):
            if (work[i] & sbit) != _U0:
                hit = True
                break
        if not hit:
            continue
        alloc |= sbit
        lo = s - latency
        if lo < 1:
            lo = 1
        for i in range(n):
            for b in range(s, lo - 1, -1):
                bb = _U1 << np.uint64(b - 1)
                if (work[i] & bb) != _U0:
                    work[i] ^= bb
                    break
    return alloc


# ---------------------------------------------------------------------------
# calibration map


@njit("float64(float64)", cache=True)
def stretching(theta):
    t = theta
    if t < 0.0:
        t = 0.0
    elif t > 1.0:
        t = 1.0
    return 0.5 * (1.0 + math.sin(math.pi * (t - 0.5)))


@njit("float64(float64)", cache=True)
def stretching_inverse(alpha):
    return 0.5 + math.asin(2.0 * alpha - 1.0) / math.pi


# ---------------------------------------------------------------------------
# traffic process


@njit("UniTuple(uint64, 2)(int64, int64, uint64)", cache=True)
def traffic_init(num_slots, g_min, state):
    mask = _U0
    for i in range(g_min):
        k, state = rng_below(num_slots - i, state)
        seen = 0
        for s in range(1, num_slots + 1):
            b = _U1 << np.uint64(s - 1)
            if (mask & b) != _U0:
                continue
            if seen == k:
                mask |= b
                break
            seen += 1
    return mask, state


@njit("UniTuple(uint64, 2)(uint64, int64, float64, float64, int64, int64, uint64)", cache=True)
def traffic_step(cur_mask, num_slots, p_plus, p_minus, g_min, g_max, state):
    cur = cur_mask
    card = popcount(cur)
    u, state = rng_uniform(state)
    if u < p_plus:
        nxt = card + 1
    elif u < p_plus + p_minus:
        nxt = card - 1
    else:
        nxt = card
    if nxt < g_min:
        nxt = g_min
    elif nxt > g_max:
        nxt = g_max
    if nxt > card:
        k, state = rng_below(num_slots - card, state)
        seen = 0
        for s in range(1, num_slots + 1):
            b = _U1 << np.uint64(s - 1)
            if (cur & b) != _U0:
                continue
            if seen == k:
                cur |= b
                break
            seen += 1
    elif nxt < card:
        k, state = rng_below(card, state)
        seen = 0
        for s in range(1, num_slots + 1):
            b = _U1 << np.uint64(s - 1)
            if (cur & b) == _U0:
                continue
            if seen == k:
                cur ^= b
                break
            seen += 1
    return cur, state


# ---------------------------------------------------------------------------
# full per-frame loop


@njit("Tuple((uint64[:], uint64[:], uint8[:], uint8[:], float64[:], float64[:], float64))(int64, int64, float64, float64, int64, float64, float64, int64, int64, float64, float64, boolean, float64, uint64)", cache=True)
def simulate(num_slots, latency, alpha, gamma_step, frames,
             p_plus, p_minus, g_min, g_max, ph_plus, ph_minus,
             use_cp, theta_init, traffic_seed):
    gen = np.empty(frames, np.uint64)
    alloc_arr = np.empty(frames, np.uint64)
    rel = np.empty(frames, np.uint8)
    usize = np.empty(frames, np.uint8)
    alphas = np.empty(frames, np.float64)
    thetas = np.empty(frames, np.float64)

    state = traffic_seed
    cur, state = traffic_init(num_slots, g_min, state)
    pstate = cur  # predictor's last observed pattern
    theta = theta_init
    for f in range(frames):
        a_f = stretching(theta) if use_cp else alpha
        masks, probs = transition_support(
            pstate, num_slots, ph_plus, ph_minus, g_min, g_max)
        k, _ = select_prefix(masks, probs, a_f)
        alloc = greedy_allocate(masks[:k], latency, num_slots)
        cur, state = traffic_step(
            cur, num_slots, p_plus, p_minus, g_min, g_max, state)
        r = 1 if l_covers(alloc, cur, latency) else 0
        gen[f] = cur
        alloc_arr[f] = alloc
        rel[f] = r
        usize[f] = popcount(alloc)
        alphas[f] = a_f
        thetas[f] = theta
        if use_cp:
            theta = theta + gamma_step * (r - (1.0 - alpha))
        pstate = cur
    return gen, alloc_arr, rel, usize, alphas, thetas, theta

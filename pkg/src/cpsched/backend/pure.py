"""Pure-Python kernel implementations.

This is the fallback twin of :mod:`cpsched.backend.jit`.  Every function
here must stay bit-for-bit interchangeable with its compiled counterpart;
``tests/test_backends.py`` holds the pair to byte-identical outputs, so any
change to one side has to be mirrored on the other.

Slot subsets are 64-bit masks with slot ``i`` stored in bit ``i - 1``.
"""

from __future__ import annotations

import math

import numpy as np

from .._rng import rng_next

BACKEND_NAME = "python"

_INV_2_53 = 1.0 / 9007199254740992.0  # 2**-53


# ---------------------------------------------------------------------------
# random draws


def rng_uniform(state):
    """Uniform float64 in [0, 1) from the top 53 bits of one draw."""
    u, state = rng_next(int(state))
    return (u >> 11) * _INV_2_53, state


def rng_below(n, state):
    """Uniform index in [0, n); modulo bias is < 2**-57 for n <= 64."""
    u, state = rng_next(int(state))
    return u % n, state


# ---------------------------------------------------------------------------
# slot-mask primitives


def popcount(mask) -> int:
    return int(mask).bit_count()


def l_covers(alloc_mask, gen_mask, latency) -> bool:
    """Greedy earliest-slot matching of packets to allocated slots.

    Packets are scanned in increasing slot order and each one takes the
    smallest still-free allocated slot in ``[g, g + latency]``.  For
    windows of uniform length this greedy rule is exact (equivalent to the
    exhaustive search in :func:`l_covers_exhaustive`).
    """
    avail = int(alloc_mask)
    m = int(gen_mask)
    s = 1
    while m:
        if m & 1:
            hi = s + latency
            if hi > 64:
                hi = 64
            u = s
            while u <= hi and not (avail >> (u - 1)) & 1:
                u += 1
            if u > hi:
                return False
            avail ^= 1 << (u - 1)
        m >>= 1
        s += 1
    return True


def l_covers_exhaustive(alloc_mask, gen_mask, latency) -> bool:
    """Depth-first search over all injective packet-to-slot assignments."""
    alloc = int(alloc_mask)
    m = int(gen_mask)
    packets = []
    s = 1
    while m:
        if m & 1:
            packets.append(s)
        m >>= 1
        s += 1
    cnt = len(packets)
    if cnt == 0:
        return True
    pos = [0] * cnt  # slot currently assigned at each depth, 0 = none yet
    used = 0
    depth = 0
    while True:
        g = packets[depth]
        u = pos[depth] + 1 if pos[depth] else g
        hi = g + latency
        if hi > 64:
            hi = 64
        while u <= hi:
            b = 1 << (u - 1)
            if alloc & b and not used & b:
                break
            u += 1
        if u > hi:
            pos[depth] = 0
            depth -= 1
            if depth < 0:
                return False
            used ^= 1 << (pos[depth] - 1)
        else:
            pos[depth] = u
            used |= 1 << (u - 1)
            if depth == cnt - 1:
                return True
            depth += 1


def count_l_cover_mismatches(num_slots, latency) -> int:
    """Disagreements between greedy and exhaustive matching over every
    (allocation, generation) pair at the given frame size.  Exponential in
    ``num_slots``; intended for small frames only."""
    lim = 1 << num_slots
    bad = 0
    for a in range(lim):
        for g in range(lim):
            if l_covers(a, g, latency) != l_covers_exhaustive(a, g, latency):
                bad += 1
    return bad


# ---------------------------------------------------------------------------
# predictor / prediction-set kernels


def transition_support(state_mask, num_slots, p_plus, p_minus, g_min, g_max):
    """Support of the one-step cardinality-walk transition from a pattern.

    Emits (masks, probs) with the stay pattern first, then single-slot
    removals (ascending removed slot), then single-slot additions
    (ascending added slot).  Branches clipped at the cardinality bounds
    fold into the stay mass; zero-probability entries are omitted.
    """
    g = int(state_mask)
    card = g.bit_count()
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
            b = 1 << (s - 1)
            if g & b:
                masks[n] = g ^ b
                probs[n] = p_rem
                n += 1
    if card < g_max and p_plus > 0.0:
        p_add = p_plus / (num_slots - card)
        for s in range(1, num_slots + 1):
            b = 1 << (s - 1)
            if not g & b:
                masks[n] = g | b
                probs[n] = p_add
                n += 1
    return masks[:n], probs[:n]


def select_prefix(masks, probs, alpha_f):
    """Sort the support by (probability desc, mask asc) in place and return
    ``(k, covered)`` for the shortest prefix with covered >= 1 - alpha_f.

    ``k == len(masks)`` with covered still short of the target means the
    whole support cannot reach the requested mass (caller flags it).
    """
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


def greedy_allocate(pattern_masks, latency, num_slots):
    """Backward greedy slot allocation.

    Scans slots from high to low; any slot still present in a working
    pattern is allocated, and each working pattern then drops its latest
    packet reachable from that slot (within ``latency``).  The result
    covers every input pattern.
    """
    n = len(pattern_masks)
    work = [int(pattern_masks[i]) for i in range(n)]
    alloc = 0
    for s in range(num_slots, 0, -1):
        sbit = 1 << (s - 1)
        hit = False
        for i in range(n):
            if work[i] & sbit:
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
                bb = 1 << (b - 1)
                if work[i] & bb:
                    work[i] ^= bb
                    break
    return alloc


# ---------------------------------------------------------------------------
# calibration map


def stretching(theta):
    t = theta
    if t < 0.0:
        t = 0.0
    elif t > 1.0:
        t = 1.0
    return 0.5 * (1.0 + math.sin(math.pi * (t - 0.5)))


def stretching_inverse(alpha):
    return 0.5 + math.asin(2.0 * alpha - 1.0) / math.pi


# ---------------------------------------------------------------------------
# traffic process


def traffic_init(num_slots, g_min, state):
    """Uniformly random pattern of cardinality g_min: repeated uniform picks
    over the ascending free-slot list (uniform over subsets by symmetry)."""
    state = int(state)
    mask = 0
    for i in range(g_min):
        k, state = rng_below(num_slots - i, state)
        seen = 0
        for s in range(1, num_slots + 1):
            b = 1 << (s - 1)
            if mask & b:
                continue
            if seen == k:
                mask |= b
                break
            seen += 1
    return mask, state


def traffic_step(cur_mask, num_slots, p_plus, p_minus, g_min, g_max, state):
    """One step of the cardinality walk.

    Consumes one uniform for the walk direction and one index draw only
    when the clipped cardinality actually changes; an unchanged cardinality
    keeps the pattern itself unchanged.
    """
    cur = int(cur_mask)
    state = int(state)
    card = cur.bit_count()
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
            b = 1 << (s - 1)
            if cur & b:
                continue
            if seen == k:
                cur |= b
                break
            seen += 1
    elif nxt < card:
        k, state = rng_below(card, state)
        seen = 0
        for s in range(1, num_slots + 1):
            b = 1 << (s - 1)
            if not cur & b:
                continue
            if seen == k:
                cur ^= b
                break
            seen += 1
    return cur, state


# ---------------------------------------------------------------------------
# full per-frame loop


def simulate(num_slots, latency, alpha, gamma_step, frames,
             p_plus, p_minus, g_min, g_max, ph_plus, ph_minus,
             use_cp, theta_init, traffic_seed):
    """Run the frame loop and return per-frame arrays.

    Order within a frame: form the prediction from the last observed
    pattern, allocate, then draw the frame's traffic, score it, and update
    the threshold.  Returns ``(gen, alloc, rel, usize, alphas, thetas,
    theta_final)`` where ``thetas[f]`` is the threshold that produced frame
    ``f``'s target and ``theta_final`` the value after the last update.
    """
    gen = np.empty(frames, np.uint64)
    alloc_arr = np.empty(frames, np.uint64)
    rel = np.empty(frames, np.uint8)
    usize = np.empty(frames, np.uint8)
    alphas = np.empty(frames, np.float64)
    thetas = np.empty(frames, np.float64)

    state = int(traffic_seed)
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

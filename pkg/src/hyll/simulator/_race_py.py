"""Pure-Python race kernel; the compiled ``_race`` module mirrors it bit for bit.

Generator: xorshift64* (shifts 12, 25, 27; multiplier 0x2545F4914F6CDD1D),
seeded through one SplitMix64 step so that any 64-bit seed, including 0,
gives a nonzero state.  A uniform on (0, 1) is ``((x >> 11) + 0.5) * 2**-53``.
"""
import math

MASK = (1 << 64) - 1
MULT = 0x2545F4914F6CDD1D
GOLDEN = 0x9E3779B97F4A7C15
BACKEND = "python"


def splitmix64(x):
    x = (x + GOLDEN) & MASK
    z = x
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & MASK
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & MASK
    return z ^ (z >> 31)


def seed_state(seed):
    s = splitmix64(seed & MASK)
    return s or GOLDEN


def next_u64(state):
    x = state
    x ^= x >> 12
    x ^= (x << 25) & MASK
    x ^= x >> 27
    return x, (x * MULT) & MASK


def uniform(state):
    state, out = next_u64(state)
    return state, ((out >> 11) + 0.5) * (1.0 / 9007199254740992.0)


def race_once(props, state):
    """Pick an index with probability proportional to its propensity and an
    exponential delay with the total rate.  Returns (index, delay, state)."""
    total = 0.0
    for p in props:
        total += p
    if not total > 0.0:
        raise ValueError("total propensity must be positive")
    state, u = uniform(state)
    delay = -math.log(u) / total
    state, v = uniform(state)
    target = v * total
    acc = 0.0
    n = len(props)
    for i in range(n):
        acc += props[i]
        if target < acc:
            return i, delay, state
    return n - 1, delay, state


def race_batch(props, n, state):
    """``n`` independent races; returns (counts, sum of delays, state)."""
    counts = [0] * len(props)
    dsum = 0.0
    for _ in range(n):
        i, d, state = race_once(props, state)
        counts[i] += 1
        dsum += d
    return counts, dsum, state

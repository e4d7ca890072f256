# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled race kernel; same stream and arithmetic as ``_race_py``."""
from libc.math cimport log
from libc.stdint cimport uint64_t

BACKEND = "cython"

cdef uint64_t MULT = 0x2545F4914F6CDD1DULL
cdef uint64_t GOLDEN = 0x9E3779B97F4A7C15ULL


cdef inline uint64_t _splitmix(uint64_t x):
    cdef uint64_t z = x + GOLDEN
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL
    return z ^ (z >> 31)


def splitmix64(x):
    return _splitmix(<uint64_t>(x & 0xFFFFFFFFFFFFFFFF))


def seed_state(seed):
    cdef uint64_t s = _splitmix(<uint64_t>(seed & 0xFFFFFFFFFFFFFFFF))
    return s if s != 0 else GOLDEN


cdef inline double _uniform(uint64_t *state):
    cdef uint64_t x = state[0]
    x ^= x >> 12
    x ^= x << 25
    x ^= x >> 27
    state[0] = x
    return (<double>((x * MULT) >> 11) + 0.5) * (1.0 / 9007199254740992.0)


def next_u64(state):
    cdef uint64_t x = state
    x ^= x >> 12
    x ^= x << 25
    x ^= x >> 27
    return x, x * MULT


def uniform(state):
    cdef uint64_t s = state
    cdef double u = _uniform(&s)
    return s, u


cdef inline int _race(double *props, int n, double total, uint64_t *state, double *delay):
    cdef double u = _uniform(state)
    delay[0] = -log(u) / total
    cdef double target = _uniform(state) * total
    cdef double acc = 0.0
    cdef int i
    for i in range(n):
        acc += props[i]
        if target < acc:
            return i
    return n - 1


def race_once(props, state):
    cdef int n = len(props)
    cdef double[64] buf
    if n > 64:
        from ._race_py import race_once as slow
        return slow(props, state)
    cdef double total = 0.0
    cdef int i
    for i in range(n):
        buf[i] = props[i]
        total += buf[i]
    if not total > 0.0:
        raise ValueError("total propensity must be positive")
    cdef uint64_t s = state
    cdef double d
    i = _race(buf, n, total, &s, &d)
    return i, d, s


def race_batch(props, long n, state):
    cdef int m = len(props)
    if m > 64:
        from ._race_py import race_batch as slow
        return slow(props, n, state)
    cdef double[64] buf
    cdef long[64] counts
    cdef double total = 0.0
    cdef int i
    for i in range(m):
        buf[i] = props[i]
        counts[i] = 0
        total += buf[i]
    if not total > 0.0:
        raise ValueError("total propensity must be positive")
    cdef uint64_t s = state
    cdef double d, dsum = 0.0
    cdef long k
    for k in range(n):
        i = _race(buf, m, total, &s, &d)
        counts[i] += 1
        dsum += d
    return [counts[i] for i in range(m)], dsum, s

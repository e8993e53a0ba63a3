# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled Levenshtein alignment kernel.

Bit-identical to ``_align_py`` (same DP, same backtrace tie-break:
diagonal, then insertion, then deletion); just fast enough for
corpus-scale word- and character-level scoring.
"""

from libc.stdlib cimport free, malloc

BACKEND = "cython"


def align_counts(ref, hyp):
    """Return (substitutions, deletions, insertions) for a minimum-cost
    unit-weight alignment of two integer sequences."""
    cdef Py_ssize_t n = len(ref)
    cdef Py_ssize_t m = len(hyp)
    if n == 0:
        return (0, 0, m)
    if m == 0:
        return (0, n, 0)

    cdef Py_ssize_t width = m + 1
    cdef int *dist = <int *>malloc((n + 1) * width * sizeof(int))
    cdef int *r = <int *>malloc(n * sizeof(int))
    cdef int *h = <int *>malloc(m * sizeof(int))
    if dist == NULL or r == NULL or h == NULL:
        free(dist); free(r); free(h)
        raise MemoryError()

    cdef Py_ssize_t i, j
    cdef int ri, sub, ins, dele, best, here
    cdef int subs = 0, dels = 0, inss = 0
    try:
        for i in range(n):
            r[i] = ref[i]
        for j in range(m):
            h[j] = hyp[j]

        for j in range(width):
            dist[j] = <int>j
        for i in range(1, n + 1):
            dist[i * width] = <int>i
            ri = r[i - 1]
            for j in range(1, width):
                sub = dist[(i - 1) * width + j - 1] + (0 if ri == h[j - 1] else 1)
                ins = dist[i * width + j - 1] + 1
                dele = dist[(i - 1) * width + j] + 1
                best = sub
                if ins < best:
                    best = ins
                if dele < best:
                    best = dele
                dist[i * width + j] = best

        i = n
        j = m
        while i > 0 or j > 0:
            here = dist[i * width + j]
            if i > 0 and j > 0:
                if here == dist[(i - 1) * width + j - 1] + (0 if r[i - 1] == h[j - 1] else 1):
                    if r[i - 1] != h[j - 1]:
                        subs += 1
                    i -= 1
                    j -= 1
                    continue
            if j > 0 and here == dist[i * width + j - 1] + 1:
                inss += 1
                j -= 1
                continue
            dels += 1
            i -= 1
    finally:
        free(dist)
        free(r)
        free(h)
    return (subs, dels, inss)

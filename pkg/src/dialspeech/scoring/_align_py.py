"""Pure-Python Levenshtein alignment kernel.

Fallback for environments without the compiled extension; must produce
bit-identical results to ``_align_cy`` (same DP, same backtrace
tie-break: diagonal, then insertion, then deletion).
"""

from __future__ import annotations

BACKEND = "python"


def align_counts(ref: list[int], hyp: list[int]) -> tuple[int, int, int]:
    """Return (substitutions, deletions, insertions) for a minimum-cost
    unit-weight alignment of two integer sequences."""
    n = len(ref)
    m = len(hyp)
    if n == 0:
        return (0, 0, m)
    if m == 0:
        return (0, n, 0)

    width = m + 1
    # Flat DP table of edit costs; dist[i*width + j] aligns ref[:i] / hyp[:j].
    dist = [0] * ((n + 1) * width)
    for j in range(1, width):
        dist[j] = j
    for i in range(1, n + 1):
        row = i * width
        prev = row - width
        dist[row] = i
        ri = ref[i - 1]
        for j in range(1, width):
            sub = dist[prev + j - 1] + (0 if ri == hyp[j - 1] else 1)
            ins = dist[row + j - 1] + 1
            dele = dist[prev + j] + 1
            best = sub
            if ins < best:
                best = ins
            if dele < best:
                best = dele
            dist[row + j] = best

    subs = dels = inss = 0
    i, j = n, m
    while i > 0 or j > 0:
        here = dist[i * width + j]
        if i > 0 and j > 0:
            diag = dist[(i - 1) * width + j - 1]
            if here == diag + (0 if ref[i - 1] == hyp[j - 1] else 1):
                if ref[i - 1] != hyp[j - 1]:
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
    return (subs, dels, inss)

"""Permutation combinatorics for symmetric-group actions.

Permutations are tuples p of length n with p[i] = destination of slot i
(0-indexed).  Composition is function composition: compose(q, p) applies
p first.
"""

from __future__ import annotations

from itertools import permutations as _permutations


def identity(n):
    return tuple(range(n))


def compose(q, p):
    """q after p."""
    return tuple(q[p[i]] for i in range(len(p)))


def inverse(p):
    out = [0] * len(p)
    for i, v in enumerate(p):
        out[v] = i
    return tuple(out)


def transposition(n, i):
    """Adjacent transposition swapping slots i-1 and i (1-indexed i)."""
    p = list(range(n))
    p[i - 1], p[i] = p[i], p[i - 1]
    return tuple(p)


def all_permutations(n):
    """All of Sigma_n in lexicographic one-line order."""
    return [tuple(p) for p in _permutations(range(n))]


def adjacent_factorization(p):
    """Indices i (1-indexed) with p = s_{i_m} o ... o s_{i_1} (i_1 applied first).

    Produced by selection sort on the arrangement, so an element never moves
    past another of the same relative order; for block permutations no swap
    crosses a block boundary.
    """
    n = len(p)
    # arrangement[pos] = original slot currently at pos; target = p^{-1}
    target = list(inverse(p))
    current = list(range(n))
    swaps = []
    for pos in range(n):
        q = current.index(target[pos])
        while q > pos:
            swaps.append(q)  # swap positions q-1, q  -> generator s_q (1-indexed)
            current[q - 1], current[q] = current[q], current[q - 1]
            q -= 1
    return swaps


def shuffle_for_subset(n, subset):
    """The (a, n-a)-shuffle sending block-1 slots onto the sorted subset.

    subset is the set of destinations of the first ``len(subset)`` slots;
    the remaining slots go to the sorted complement.
    """
    first = sorted(subset)
    rest = sorted(set(range(n)) - set(subset))
    dest = first + rest
    return tuple(dest)


def subsets_colex(n, sizes=None):
    """All subsets of range(n) (optionally restricted by size) in colex order."""
    out = []
    for mask in range(1 << n):
        d = frozenset(i for i in range(n) if mask >> i & 1)
        if sizes is None or len(d) in sizes:
            out.append(d)
    return out


def size_subsets_lex(n, a):
    """Size-a subsets of range(n) as sorted tuples in lex order."""
    from itertools import combinations
    return [tuple(c) for c in combinations(range(n), a)]

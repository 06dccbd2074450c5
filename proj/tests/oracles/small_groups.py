"""Brute-force reference values for the small-group unit tests.

Matrices are tuples of row bitmasks (bit j of row i is entry (i, j)); a CNOT c->t adds row c
into row t. Run with python3; the printed values are frozen in tests/test_bounds.cpp.
"""
from collections import Counter, deque
from itertools import product
from math import comb, factorial


def layers(n):
    """Every set of disjoint oriented pairs on n wires."""
    out = []

    def rec(w, busy, cur):
        while w < n and w in busy:
            w += 1
        if w >= n:
            out.append(tuple(cur))
            return
        rec(w + 1, busy | {w}, cur)
        for v in range(w + 1, n):
            if v in busy:
                continue
            for g in ((w, v), (v, w)):
                rec(w + 1, busy | {w, v}, cur + [g])

    rec(0, frozenset(), [])
    return out


def apply(m, layer):
    rows = list(m)
    for c, t in layer:
        rows[t] ^= m[c]
    return tuple(rows)


def rank(rows):
    rows, r = list(rows), 0
    for bit in range(max(len(rows), 1)):
        piv = next((i for i in range(r, len(rows)) if rows[i] >> bit & 1), None)
        if piv is None:
            continue
        rows[r], rows[piv] = rows[piv], rows[r]
        for i in range(len(rows)):
            if i != r and rows[i] >> bit & 1:
                rows[i] ^= rows[r]
        r += 1
    return r


def bfs(n):
    ident = tuple(1 << i for i in range(n))
    dist = {ident: 0}
    q = deque([ident])
    ls = layers(n)
    while q:
        x = q.popleft()
        for l in ls:
            y = apply(x, l)
            if y not in dist:
                dist[y] = dist[x] + 1
                q.append(y)
    return dist


def gl_brute(n):
    return sum(1 for rows in product(range(1 << n), repeat=n) if rank(rows) == n)


def layer_formula(N):
    return sum(comb(N, 2 * t) * factorial(2 * t) // factorial(t) for t in range(N // 2 + 1))


def gl_formula(n):
    p = 1
    for i in range(n):
        p *= (1 << n) - (1 << i)
    return p


def counting(n, m):
    g, l, d, r = gl_formula(n), layer_formula(n + m), 0, 1
    while r < g:
        r *= l
        d += 1
    return d


if __name__ == "__main__":
    print("gl_brute", [gl_brute(n) for n in range(1, 4)])
    print("gl_formula", [gl_formula(n) for n in range(1, 7)])
    print("layer_brute", [len(layers(N)) for N in range(1, 8)])
    print("counting", {n: counting(n, 0) for n in (1, 2, 3, 4, 5, 8, 16, 64)})
    print("counting_m", {(n, m): counting(n, m) for n, m in ((4, 4), (8, 8), (16, 48))})
    for n in (2, 3, 4):
        d = bfs(n)
        print("bfs_hist", n, sorted(Counter(d.values()).items()))
    d3 = bfs(3)
    print("lower_ones_3", d3[(0b001, 0b011, 0b111)])
    d4 = bfs(4)
    print("lower_ones_4", d4[(0b0001, 0b0011, 0b0111, 0b1111)])
    print("reverse_4", d4[(0b1000, 0b0100, 0b0010, 0b0001)])

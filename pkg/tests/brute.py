"""Brute-force group helpers used only as test oracles.

Everything here works on the multiplication table of a PHyperGroup, with
no use of the closed forms under test.
"""

import itertools


class SubgroupIndex:
    """Memoized subgroup generation on a multiplication table.

    Subgroups get small integer ids; join(h, g) is the id of <H, g>.
    """

    def __init__(self, table):
        self.T = table
        self.order = len(table)
        self.sets = [frozenset([0])]
        self.gens = [()]
        self.ids = {self.sets[0]: 0}
        self.memo = {}

    def join(self, h: int, g: int) -> int:
        key = (h, g)
        hit = self.memo.get(key)
        if hit is not None:
            return hit
        H = self.sets[h]
        if g in H:
            self.memo[key] = h
            return h
        gens = self.gens[h] + (g,)
        seen = set(H)
        frontier = list(H)
        T = self.T
        while frontier:
            nxt = []
            for x in frontier:
                row = T[x]
                for s in gens:
                    y = row[s]
                    if y not in seen:
                        seen.add(y)
                        nxt.append(y)
            frontier = nxt
        fs = frozenset(seen)
        out = self.ids.get(fs)
        if out is None:
            out = len(self.sets)
            self.sets.append(fs)
            self.gens.append(gens)
            self.ids[fs] = out
        self.memo[key] = out
        return out

    def size(self, h: int) -> int:
        return len(self.sets[h])

    def subsets_generating(self, k: int):
        """Yield (subset, generates G) for every k-subset of G, in combinations order."""
        full = self.order

        def rec(start, h, chosen):
            if len(chosen) == k:
                yield tuple(chosen), len(self.sets[h]) == full
                return
            for g in range(start, full - (k - len(chosen)) + 1):
                chosen.append(g)
                yield from rec(g + 1, self.join(h, g), chosen)
                chosen.pop()

        yield from rec(0, 0, [])


def inverses(table):
    return [row.index(0) for row in table]


def orders(table):
    out = []
    for g in range(len(table)):
        k, x = 1, g
        while x != 0:
            x = table[x][g]
            k += 1
        out.append(k)
    return out


def min_generating_size(table) -> int:
    """Smallest k with a generating k-subset, by breadth over subgroups."""
    idx = SubgroupIndex(table)
    n = idx.order
    if n == 1:
        return 0
    level = {0}
    k = 0
    while True:
        k += 1
        nxt = set()
        for h in level:
            for g in range(n):
                j = idx.join(h, g)
                if idx.size(j) == n:
                    return k
                nxt.add(j)
        level = nxt


def all_pairs(n):
    return itertools.product(range(n), repeat=2)

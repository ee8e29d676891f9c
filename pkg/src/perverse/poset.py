"""The poset of Goresky-MacPherson n-perversities.

A perversity of rank n is a tuple p = (p(0), ..., p(n)) with
p(0) = p(1) = p(2) = 0 and p(i) <= p(i+1) <= p(i) + 1.  Perversities are
plain int tuples; Poset(n) carries the enumeration, the partial order,
the partial sum/difference operations and duality.
"""

import itertools


def zero_perversity(n):
    return (0,) * (n + 1)


def top_perversity(n):
    "the top perversity t(i) = i - 2 for i >= 2"
    return tuple(max(i - 2, 0) for i in range(n + 1))


def is_perversity(v, n):
    if len(v) != n + 1:
        return False
    if any(v[i] != 0 for i in range(min(3, n + 1))):
        return False
    return all(v[i] <= v[i + 1] <= v[i] + 1 for i in range(n))


def leq(p, q):
    return all(a <= b for a, b in zip(p, q))


class Poset:
    def __init__(self, n):
        assert n >= 0
        self.n = n
        self.zero = zero_perversity(n)
        self.top = top_perversity(n)
        self.elements = self._enumerate()
        self.index = {p: i for i, p in enumerate(self.elements)}
        self._covers = None

    def _enumerate(self):
        "all GM perversities: one binary step choice at each i in 4..n... (3..n)"
        n = self.n
        if n < 3:
            return [zero_perversity(n)]
        out = []
        for steps in itertools.product((0, 1), repeat=n - 2):
            v = [0, 0, 0]
            for s in steps:
                v.append(v[-1] + s)
            out.append(tuple(v))
        out.sort()
        return out

    def __len__(self):
        return len(self.elements)

    def __contains__(self, p):
        return p in self.index

    def leq(self, p, q):
        return leq(p, q)

    def meet(self, p, q):
        v = tuple(min(a, b) for a, b in zip(p, q))
        assert v in self.index
        return v

    def join(self, p, q):
        v = tuple(max(a, b) for a, b in zip(p, q))
        assert v in self.index
        return v

    def oplus(self, p, q):
        """smallest perversity >= p + q (pointwise); None when p + q exceeds top"""
        s = [a + b for a, b in zip(p, q)]
        if any(a > b for a, b in zip(s, self.top)):
            return None
        for i in range(1, len(s)):
            if s[i] < s[i - 1]:
                s[i] = s[i - 1]
        for i in range(len(s) - 2, -1, -1):
            if s[i] < s[i + 1] - 1:
                s[i] = s[i + 1] - 1
        v = tuple(s)
        assert v in self.index, v
        return v

    def ominus(self, q, p):
        """largest perversity <= q - p (pointwise); None unless p <= q"""
        if not leq(p, q):
            return None
        s = [b - a for a, b in zip(p, q)]
        for i in range(len(s) - 2, -1, -1):
            if s[i] > s[i + 1]:
                s[i] = s[i + 1]
        for i in range(1, len(s)):
            if s[i] > s[i - 1] + 1:
                s[i] = s[i - 1] + 1
        v = tuple(s)
        assert v in self.index, v
        return v

    def oplus_bruteforce(self, p, q):
        s = tuple(a + b for a, b in zip(p, q))
        cands = [r for r in self.elements if leq(s, r)]
        if not cands:
            return None
        mins = [m for m in cands if all(leq(m, c) for c in cands)]
        assert len(mins) == 1
        return mins[0]

    def ominus_bruteforce(self, q, p):
        if not leq(p, q):
            return None
        s = tuple(b - a for a, b in zip(p, q))
        cands = [r for r in self.elements if leq(r, s)]
        maxes = [m for m in cands if all(leq(c, m) for c in cands)]
        assert len(maxes) == 1
        return maxes[0]

    def dual(self, p):
        "complementary perversity t - p; exact pointwise difference"
        v = tuple(t - a for t, a in zip(self.top, p))
        assert v in self.index
        return v

    def covers(self):
        "list of covering pairs (p, q), p covered by q"
        if self._covers is None:
            out = []
            els = self.elements
            for p in els:
                for q in els:
                    if p == q or not leq(p, q):
                        continue
                    if any(r != p and r != q and leq(p, r) and leq(r, q)
                           for r in els):
                        continue
                    out.append((p, q))
            self._covers = out
        return self._covers

    def up_set(self, p):
        return [q for q in self.elements if leq(p, q)]

    def down_set(self, p):
        return [q for q in self.elements if leq(q, p)]

    def path_up(self, p, q):
        "a chain p = r0 < r1 < ... < rk = q through covering steps"
        assert leq(p, q)
        path = [p]
        cur = p
        while cur != q:
            nxt = None
            for (a, b) in self.covers():
                if a == cur and leq(b, q):
                    nxt = b
                    break
            assert nxt is not None
            path.append(nxt)
            cur = nxt
        return path


def perversity_sum_leq_top(poset, p, q):
    return all(a + b <= t for a, b, t in zip(p, q, poset.top))


def parse_perversity(text, n):
    "parse '0,0,0,1,2' into a validated perversity tuple"
    v = tuple(int(x) for x in text.replace(" ", "").split(","))
    if not is_perversity(v, n):
        raise ValueError("not a valid rank-%d perversity: %r" % (n, text))
    return v

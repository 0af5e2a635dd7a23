"""Append-only Fenwick (binary indexed) tree for weighted sampling."""


class FenwickTree:
    """
    Prefix sums over a growing list of nonnegative weights.

    ``append`` and ``find`` are O(log n). Indices are 0-based at the API;
    the internal tree is 1-based.
    """

    def __init__(self, weights=()):
        self._tree = [0.0]
        self._weights = []
        for w in weights:
            self.append(w)

    def __len__(self):
        return len(self._weights)

    def append(self, w):
        if w < 0:
            raise ValueError(f"weights must be nonnegative, got {w}")
        tree = self._tree
        i = len(tree)
        # node i covers (i - lowbit(i), i]; its children already hold the
        # partial sums for (i - lowbit(i), i - 1]
        s = w
        j = i - 1
        stop = i - (i & -i)
        while j > stop:
            s += tree[j]
            j -= j & -j
        tree.append(s)
        self._weights.append(w)

    def add(self, index, delta):
        self._weights[index] += delta
        tree = self._tree
        i = index + 1
        n = len(tree)
        while i < n:
            tree[i] += delta
            i += i & -i

    def weight(self, index):
        return self._weights[index]

    def prefix(self, count):
        """Sum of the first ``count`` weights."""
        tree = self._tree
        s = 0.0
        i = count
        while i > 0:
            s += tree[i]
            i -= i & -i
        return s

    def total(self):
        return self.prefix(len(self._weights))

    def find(self, target):
        """
        Smallest index whose inclusive prefix sum exceeds ``target``.

        With ``target = u * total()`` and u uniform on [0, 1) this returns
        index i with probability weight(i) / total(). Zero-weight entries are
        never returned.
        """
        tree = self._tree
        n = len(tree) - 1
        pos = 0
        step = 1 << (n.bit_length() - 1) if n else 0
        while step:
            nxt = pos + step
            if nxt <= n and tree[nxt] <= target:
                target -= tree[nxt]
                pos = nxt
            step >>= 1
        if pos >= n:
            # rounding pushed target past the total; take the last live entry
            pos = n - 1
            while pos > 0 and self._weights[pos] <= 0:
                pos -= 1
        return pos

"""Sparse exact linear algebra over a field.

Vectors are dicts mapping hashable, mutually comparable labels to nonzero
field elements. The tracker keeps an inter-reduced spanning set and, for
every stored row, the combination of inserted originals that produced it,
so dependencies come out as ready-made certificates.
"""


def _addmul(dst, src, c):
    if not c:
        return
    for k, val in src.items():
        s = dst.get(k)
        s = val * c if s is None else s + val * c
        if s:
            dst[k] = s
        elif k in dst:
            del dst[k]


class SpanTracker:
    __slots__ = ("rows",)

    def __init__(self):
        self.rows = []  # (pivot, vector, combo); vector[pivot] = 1

    def reduce(self, vec, combo=None):
        """Residual of vec modulo the rows.

        Invariant: vec = residual + sum(combo[k] * original_k).
        """
        v = dict(vec)
        c = {} if combo is None else dict(combo)
        for pivot, row, rcombo in self.rows:
            coeff = v.get(pivot)
            if coeff:
                _addmul(v, row, -coeff)
                _addmul(c, rcombo, coeff)
        return v, c

    def insert(self, vec, tag):
        """Add an original vector under the given label.

        Returns None if it enlarges the span, else the dependency
        certificate: a dict c with vec = sum(c[k] * original_k).
        """
        v, c = self.reduce(vec)
        if not v:
            return c
        pivot = min(v)
        inv = v[pivot].inverse()
        v = {k: val * inv for k, val in v.items()}
        rcombo = {k: -(val * inv) for k, val in c.items() if val}
        prev = rcombo.get(tag)
        rcombo[tag] = inv if prev is None else prev + inv
        if not rcombo[tag]:
            del rcombo[tag]
        # keep stored rows clear of the new pivot
        for _, row, combo in self.rows:
            coeff = row.get(pivot)
            if coeff:
                _addmul(row, v, -coeff)
                _addmul(combo, rcombo, -coeff)
        self.rows.append((pivot, v, rcombo))
        return None

    def rank(self):
        return len(self.rows)


def kernel_basis(vectors):
    """Combinations summing to zero; one per dependency, indexed like vectors."""
    tracker = SpanTracker()
    kernel = []
    for i, vec in enumerate(vectors):
        cert = tracker.insert(vec, i)
        if cert is not None:
            rel = {k: -val for k, val in cert.items()}
            prev = rel.get(i)
            rel[i] = 1 if prev is None else prev + 1
            kernel.append(rel)
    return kernel


def solve_span(vectors, target):
    """Dict c with target = sum(c[i] * vectors[i]), or None."""
    tracker = SpanTracker()
    for i, vec in enumerate(vectors):
        tracker.insert(vec, i)
    residual, combo = tracker.reduce(target)
    if residual:
        return None
    return combo

"""Independent reference implementations used to cross-check the library.

Everything here is deliberately written in plain Python (lists, loops,
``math``) with no shared code paths with the package under test, so an
agreement between the two is meaningful evidence rather than a tautology.
"""

from __future__ import annotations

import math

REJECT = -1


def classify_oracle(train_rows, train_labels, x, k, active, n_classes,
                    reject_ties=False):
    """Compute-all / sort / vote nearest-neighbour reference.

    ``active`` is the list of feature indices entering the metric.  Distance
    ties fall back to ascending sample index; vote ties go to the class whose
    voting neighbours have the smallest summed distance, then to the smaller
    class id (or to REJECT when ``reject_ties``).
    """
    d2 = []
    for row in train_rows:
        s = 0.0
        for j in active:
            diff = float(row[j]) - float(x[j])
            s += diff * diff
        d2.append(s)
    order = sorted(range(len(train_rows)), key=lambda i: (d2[i], i))[:k]
    counts = [0] * n_classes
    dist_sums = [0.0] * n_classes
    for i in order:
        c = int(train_labels[i])
        counts[c] += 1
        dist_sums[c] += math.sqrt(d2[i])
    top = max(counts)
    tied = [c for c in range(n_classes) if counts[c] == top]
    if len(tied) == 1:
        return tied[0]
    if reject_ties:
        return REJECT
    return min(tied, key=lambda c: (dist_sums[c], c))


def hits_oracle(train_rows, train_labels, test_rows, test_labels, k, active,
                n_classes):
    """Number of correctly classified test rows under the reference voter."""
    hits = 0
    for row, actual in zip(test_rows, test_labels):
        if classify_oracle(train_rows, train_labels, row, k, active, n_classes) == int(actual):
            hits += 1
    return hits


def exhaustive_oracle(train_rows, train_labels, test_rows, test_labels,
                      n_features, alpha, beta, k, n_classes):
    """Best feature subset by brute force over all 2^L - 1 candidates.

    Returns (bit tuple, fitness, hits, nf) with the same tie rules the
    library documents: higher fitness, then fewer features, then the
    lexicographically smaller bit tuple.
    """
    best = None
    for m in range(1, 1 << n_features):
        active = [j for j in range(n_features) if (m >> j) & 1]
        hits = hits_oracle(train_rows, train_labels, test_rows, test_labels,
                           k, active, n_classes)
        nf = len(active)
        fit = alpha * hits - beta * nf
        bits = tuple((m >> j) & 1 for j in range(n_features))
        key = (-fit, nf, bits)
        if best is None or key < best[0]:
            best = (key, bits, fit, hits, nf)
    return best[1], best[2], best[3], best[4]

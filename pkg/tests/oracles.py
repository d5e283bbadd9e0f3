"""Independent brute-force reference implementations used only by tests.

Deliberately naive: plain float arithmetic, set operations, no shared code
with the package internals they check.
"""


def brute_force_errant(hyp_edits, corpus, beta=0.5):
    """(P, R, F-beta) via exhaustive per-sentence annotator choice."""
    beta2 = beta * beta

    def prf(tp, fp, fn):
        p = tp / (tp + fp) if tp + fp else 1.0
        r = tp / (tp + fn) if tp + fn else 1.0
        f = (1 + beta2) * p * r / (beta2 * p + r) if beta2 * p + r else 0.0
        return p, r, f

    total_tp = total_fp = total_fn = 0
    for edits, sent in zip(hyp_edits, corpus, strict=True):
        hyp_keys = {(e.start, e.end, e.replacement) for e in edits}
        best = None
        annotators = dict(sent.edits_by_annotator) or {-1: ()}
        for ann, ref in sorted(annotators.items()):
            ref_keys = {(e.start, e.end, e.replacement) for e in ref}
            tp = len(hyp_keys & ref_keys)
            fp = len(hyp_keys - ref_keys)
            fn = len(ref_keys - hyp_keys)
            rank = (prf(tp, fp, fn)[2], tp, -ann)
            if best is None or rank > best[0]:
                best = (rank, (tp, fp, fn))
        total_tp += best[1][0]
        total_fp += best[1][1]
        total_fn += best[1][2]
    return prf(total_tp, total_fp, total_fn)


def brute_force_spearman(x, y):
    """Spearman rho: average ranks, then the textbook Pearson formula."""

    def ranks(values):
        order = sorted(range(len(values)), key=lambda i: values[i])
        result = [0.0] * len(values)
        i = 0
        while i < len(order):
            j = i
            while j + 1 < len(order) and values[order[j + 1]] == values[order[i]]:
                j += 1
            mean_rank = (i + j) / 2 + 1
            for k in range(i, j + 1):
                result[order[k]] = mean_rank
            i = j + 1
        return result

    rx, ry = ranks(list(x)), ranks(list(y))
    n = len(rx)
    mx, my = sum(rx) / n, sum(ry) / n
    cov = sum((a - mx) * (b - my) for a, b in zip(rx, ry))
    vx = sum((a - mx) ** 2 for a in rx)
    vy = sum((b - my) ** 2 for b in ry)
    return cov / (vx * vy) ** 0.5


def brute_force_kappa(labels_a, labels_b):
    """Cohen's kappa via an explicit confusion matrix."""
    labels = sorted(set(labels_a) | set(labels_b))
    index = {lab: i for i, lab in enumerate(labels)}
    k = len(labels)
    matrix = [[0] * k for _ in range(k)]
    for a, b in zip(labels_a, labels_b, strict=True):
        matrix[index[a]][index[b]] += 1
    n = len(labels_a)
    observed = sum(matrix[i][i] for i in range(k)) / n
    expected = sum(
        (sum(matrix[i]) / n) * (sum(row[i] for row in matrix) / n) for i in range(k)
    )
    if expected == 1.0:
        return 1.0
    return (observed - expected) / (1 - expected)

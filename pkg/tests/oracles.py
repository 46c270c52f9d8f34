"""Deliberately naive reference implementations used as test oracles."""

import math


def naive_bleu(hyps, refs, max_n=4):
    """BLEU with n-gram counting by explicit list scans (no hashing, no Counter)."""
    matches = [0] * max_n
    totals = [0] * max_n
    c = r = 0
    for hyp, ref in zip(hyps, refs):
        c += len(hyp)
        r += len(ref)
        for n in range(1, max_n + 1):
            hyp_grams = [list(hyp[k:k + n]) for k in range(len(hyp) - n + 1)]
            ref_grams = [list(ref[k:k + n]) for k in range(len(ref) - n + 1)]
            totals[n - 1] += len(hyp_grams)
            done = []
            for g in hyp_grams:
                if g in done:
                    continue
                done.append(g)
                in_hyp = sum(1 for h in hyp_grams if h == g)
                in_ref = sum(1 for x in ref_grams if x == g)
                matches[n - 1] += min(in_hyp, in_ref)
    if c == 0 or any(m == 0 for m in matches) or any(t == 0 for t in totals):
        return 0.0
    bp = 1.0 if c >= r else math.exp(1 - r / c)
    return bp * math.exp(sum(math.log(m / t) for m, t in zip(matches, totals)) / max_n)


def direct_kappa(labels, categories):
    """Randolph's kappa from a category-count table."""
    n_items, n = len(labels), len(labels[0])
    k = len(categories)
    table = [[row.count(c) for c in categories] for row in labels]
    p_o = sum(sum(x * x for x in row) - n for row in table) / (n_items * n * (n - 1))
    return (p_o - 1 / k) / (1 - 1 / k)


def contains_brute(hay, needle):
    hay_s = "\x00" + "\x00".join(hay) + "\x00"
    return ("\x00" + "\x00".join(needle) + "\x00") in hay_s

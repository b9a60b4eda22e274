"""Independent numerical oracles shared by the test suite.

These deliberately avoid the library's own inequality logic: they clasify
series behavior from raw partial sums so schedule verdicts can be checked
against numerics rather than against the same symbolic reduction twice.
"""

import numpy as np


def dyadic_series_verdict(summand, t_min=1, t_max=2**20 - 1, ratio_threshold=0.99):
    """Classify sum over t >= t_min of summand(t) as divergent/convergent.

    Sums complete dyadic blocks [2^k, 2^{k+1}) of the exact summand values
    (about 10^6 terms in total) and inspects the trailing block ratio: a
    power-law tail t^-q gives block ratio 2^(1-q), so ratios near or above
    1 mean q <= 1 (divergence, including the harmonic boundary q = 1) and
    clearly smaller ratios mean convergence.  The threshold separates the
    triples exercised here by a wide margin; it is not a universal test
    for adversarially near-boundary exponents.
    """
    blocks = []
    k = 0
    while 2 ** (k + 1) - 1 <= t_max:
        lo = max(2**k, t_min)
        hi = 2 ** (k + 1) - 1
        if lo <= hi:
            t = np.arange(lo, hi + 1, dtype=float)
            blocks.append(float(np.sum(summand(t))))
        k += 1
    if len(blocks) < 2:
        raise ValueError("need at least two dyadic blocks")
    ratio = blocks[-1] / blocks[-2]
    return "divergent" if ratio >= ratio_threshold else "convergent"


def solve_2x2(a11, a12, a21, a22, b1, b2):
    """Cramer's-rule solve of a 2x2 linear system (hand-check oracle)."""
    det = a11 * a22 - a12 * a21
    if abs(det) < 1e-300:
        raise ZeroDivisionError("singular system")
    return ((b1 * a22 - b2 * a12) / det, (a11 * b2 - a21 * b1) / det)

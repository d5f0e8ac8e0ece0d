"""Upper envelope of one-dimensional lines.

segment_max_lines computes the breakpoints of the pointwise maximum of r
lines over an interval [L, U] in O(r log r): lines are visited in order
of decreasing height at L, and a stack of (breakpoint, active line)
tuples is maintained, popping segments that the incoming line dominates.
The resulting sorted breakpoint lists drive the exact line searches.
"""

from bisect import bisect_right

import numpy as np


class LineSet:
    """Slopes and offsets of r lines, value(eta) = offsets + eta * slopes."""

    def __init__(self, slopes, offsets):
        a = np.asarray(slopes, dtype=float)
        b = np.asarray(offsets, dtype=float)
        if a.ndim != 1 or a.shape != b.shape or a.size == 0:
            raise ValueError("slopes and offsets must be equal-length non-empty 1-d arrays")
        if not (np.isfinite(a).all() and np.isfinite(b).all()):
            raise ValueError("slopes and offsets must be finite")
        self.slopes = a
        self.offsets = b

    def __len__(self):
        return self.slopes.size


def segment_max_lines(lines, lower, upper):
    """Breakpoints and active-line indices of max_p(b_p + eta a_p) on [lower, upper].

    Returns a list of (eta, line_index) tuples with strictly increasing
    eta, starting at eta = lower; line_index is active on
    [eta_j, eta_{j+1}).  upper may be inf.
    """
    if not (0.0 <= lower < upper):
        raise ValueError(f"need 0 <= lower < upper, got [{lower}, {upper}]")
    a = lines.slopes.tolist()
    b = lines.offsets.tolist()
    r = len(a)
    heights = lines.offsets + lower * lines.slopes
    # Decreasing height at eta = lower; ties put the steeper line first,
    # then the lower index, so the bottom of the stack carries the
    # right-derivative of the envelope at lower.
    order = np.lexsort((np.arange(r), -lines.slopes, -heights))

    stack = [(lower, int(order[0]))]
    for qi in range(1, r):
        q = int(order[qi])
        aq = a[q]
        bq = b[q]
        crossing = None
        while stack:
            eta_top, top = stack[-1]
            denom = a[top] - aq
            if denom == 0.0:
                # Parallel with equal or lower height: q never surfaces.
                crossing = None
                break
            crossing = (bq - b[top]) / denom
            if (lower < crossing <= eta_top) or (crossing == lower and aq > a[top]):
                stack.pop()
                continue
            break
        if not stack:
            # q dominates the whole interval after tie-popping at lower.
            stack.append((lower, q))
            continue
        if crossing is None:
            continue
        eta_top, top = stack[-1]
        if (lower < crossing <= upper) or (crossing == lower and aq > a[top]):
            stack.append((crossing, q))
    return stack


def envelope_value(stack, lines, eta):
    """Value and active line index of the segmented envelope at eta."""
    lo = stack[0][0]
    if not lo <= eta:
        raise ValueError(f"eta={eta} below the segmented interval start {lo}")
    pos = bisect_right(stack, (eta, len(lines))) - 1
    idx = stack[pos][1]
    return lines.offsets[idx] + eta * lines.slopes[idx], idx


def naive_envelope(lines, lower, upper):
    """O(r^2) reference envelope: repeated earliest-overtake sweep.

    Kept deliberately independent of segment_max_lines so the two can be
    checked against each other.
    """
    if not (0.0 <= lower < upper):
        raise ValueError(f"need 0 <= lower < upper, got [{lower}, {upper}]")
    a = lines.slopes
    b = lines.offsets
    heights = b + lower * a
    top = heights == heights.max()
    cur = int(np.flatnonzero(top)[np.argmax(a[top])])
    out = [(lower, cur)]
    eta = lower
    while True:
        steeper = a > a[cur]
        if not steeper.any():
            break
        with np.errstate(divide="ignore", invalid="ignore"):
            cross = (b[cur] - b) / (a - a[cur])
        cross[~steeper] = np.inf
        cross[cross <= eta] = np.inf
        nxt = cross.min()
        if not nxt <= upper:
            break
        winners = np.flatnonzero(cross == nxt)
        cur = int(winners[np.argmax(a[winners])])
        eta = float(nxt)
        out.append((eta, cur))
    return out

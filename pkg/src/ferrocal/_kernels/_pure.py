"""Pure-numpy implementations of the hot kernels.

Semantics are identical to the compiled versions in ``_native.pyx``; the
protocol sweep exploits the idempotence of deterministic-threshold pulses
(repeating an identical pulse changes nothing), which the compiled kernel
instead replays literally.
"""

import numpy as np


def protocol_sweep(vth_reset, vth_write, down, reset_amp, reset_count, write_count, vp_grid):
    """March the write protocol across a voltage grid.

    For each grid amplitude: apply ``reset_count`` reset pulses (clear the
    ``down`` flag wherever vth_reset <= reset_amp), then ``write_count``
    write pulses (set ``down`` wherever vth_write <= V_p), then record the
    down fraction. ``down`` (uint8) is updated in place and carries over
    between grid points exactly as the physical protocol does.
    """
    frac = np.empty(len(vp_grid), dtype=np.float64)
    resettable = vth_reset <= reset_amp
    n = len(down)
    for g, vp in enumerate(vp_grid):
        if reset_count > 0:
            down[resettable] = 0
        if write_count > 0:
            down[vth_write <= vp] = 1
        frac[g] = np.count_nonzero(down) / n
    return frac


def monotone_keep_mask(values, margin, accept_equal):
    """Greedy scan keeping values that rise by at least ``margin``.

    A value is kept when value - last_kept > margin, or == margin if
    ``accept_equal``. The first value is always kept.
    """
    n = len(values)
    keep = np.zeros(n, dtype=bool)
    if n == 0:
        return keep
    keep[0] = True
    if margin == 0.0:
        # last kept value == running max of everything seen, so the scan
        # vectorizes as a prefix-max comparison
        runmax = np.maximum.accumulate(values)
        if accept_equal:
            keep[1:] = values[1:] >= runmax[:-1]
        else:
            keep[1:] = values[1:] > runmax[:-1]
        return keep
    last = values[0]
    for i in range(1, n):
        d = values[i] - last
        if d > margin or (accept_equal and d == margin):
            keep[i] = True
            last = values[i]
    return keep

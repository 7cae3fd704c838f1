"""Pure-Python sampling kernels.

Reference implementation of the two hot loops, and the fallback when the
compiled ``_ckernels`` extension is unavailable. ``_ckernels.pyx`` mirrors
this file statement for statement: same uniform draws in the same order, same
floating-point expressions. Keep the two in sync.

Conventions shared by both backends
-----------------------------------
* Every uniform comes from ``rng.random()`` (``next_double`` on the bit
  generator at C level).
* A move with log acceptance ratio ``lr`` is accepted iff ``log(u) < lr``
  for a fresh uniform ``u``; the uniform is drawn even when ``lr >= 0``.
* Pairs are close iff ``dx*dx + dy*dy <= r*r``. ``r <= 0`` disables the
  interaction (Poisson case).
"""
import math

import numpy as np

NAME = "python"


def _accept(u, lr):
    if lr == -math.inf:
        return False
    return u == 0.0 or math.log(u) < lr


def _neighbours(xs, ys, n, x, y, r2):
    dx = xs[:n] - x
    dy = ys[:n] - y
    return int(np.count_nonzero(dx * dx + dy * dy <= r2))


def mh_run(xs, ys, n, steps, log_beta, log_gamma, r, window, birth_p, rng):
    """Run ``steps`` birth/death transitions in place.

    ``xs``/``ys`` hold the pattern in their first ``n`` slots and must have
    room for ``n + steps`` points. Deaths swap the last point into the freed
    slot. Returns ``(n, pair_delta)``: the new count and the change in the
    number of close pairs.
    """
    x0, x1, y0, y1 = window
    w = x1 - x0
    h = y1 - y0
    log_area = math.log(w * h)
    log_q = math.log(birth_p) - math.log(1.0 - birth_p)
    interacting = r > 0.0
    r2 = r * r
    pair_delta = 0
    random = rng.random
    for _ in range(steps):
        if random() < birth_p:
            ux = x0 + w * random()
            uy = y0 + h * random()
            k = _neighbours(xs, ys, n, ux, uy, r2) if interacting else 0
            lr = log_beta + log_gamma * k + log_area - math.log(n + 1) - log_q
            if _accept(random(), lr):
                xs[n] = ux
                ys[n] = uy
                n += 1
                pair_delta += k
        elif n > 0:
            idx = int(random() * n)
            if idx >= n:
                idx = n - 1
            if interacting:
                # the point itself is at distance 0 and is counted once
                k = _neighbours(xs, ys, n, xs[idx], ys[idx], r2) - 1
            else:
                k = 0
            lr = math.log(n) + log_q - (log_beta + log_gamma * k) - log_area
            if _accept(random(), lr):
                n -= 1
                xs[idx] = xs[n]
                ys[idx] = ys[n]
                pair_delta -= k
    return n, pair_delta


def shadow_inner(theta, delta, data_stats, aux_stats, lower, upper, m, temperature, ball, rng):
    """``m`` tempered shadow proposals with the auxiliary statistics held fixed.

    ``theta`` is updated in place. Returns the number of accepted proposals.
    """
    dim = theta.shape[0]
    th = theta.tolist()
    dl = delta.tolist()
    diff = [float(data_stats[i]) - float(aux_stats[i]) for i in range(dim)]
    lo = lower.tolist()
    hi = upper.tolist()
    psi = [0.0] * dim
    random = rng.random
    accepted = 0
    for _ in range(m):
        if ball:
            while True:
                ss = 0.0
                for i in range(dim):
                    v = 2.0 * random() - 1.0
                    psi[i] = v
                    ss += v * v
                if ss <= 1.0:
                    break
            for i in range(dim):
                psi[i] = th[i] + 0.5 * dl[i] * psi[i]
        else:
            for i in range(dim):
                psi[i] = th[i] + dl[i] * (random() - 0.5)
        inside = True
        lr = 0.0
        for i in range(dim):
            if psi[i] < lo[i] or psi[i] > hi[i]:
                inside = False
            lr += (psi[i] - th[i]) * diff[i]
        u = random()
        if inside and _accept(u, lr / temperature):
            for i in range(dim):
                th[i] = psi[i]
            accepted += 1
    theta[:] = th
    return accepted

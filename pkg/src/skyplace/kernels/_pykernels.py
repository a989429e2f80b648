"""Pure-numpy kernels; same contract as the compiled ``_ckernels`` module."""
from __future__ import annotations

import numpy as np

LN2 = np.log(2.0)


def link_gains(bs_xyh, ref_los, ref_nlos, exp_los, exp_nlos, ue_xyh,
               alpha, beta, gamma_env):
    """LoS probability and per-condition linear gains for every BS/user pair.

    ``bs_xyh`` is ``(B, 3)``, ``ue_xyh`` is ``(K, 3)``; ``exp_los``/``exp_nlos``
    are the exponents already evaluated at each BS altitude. Returns three
    ``(B, K)`` arrays ``(pr_los, g_los, g_nlos)``.
    """
    bs = np.ascontiguousarray(bs_xyh, dtype=np.float64)
    ue = np.ascontiguousarray(ue_xyh, dtype=np.float64)
    dx = bs[:, 0:1] - ue[None, :, 0]
    dy = bs[:, 1:2] - ue[None, :, 1]
    dh = bs[:, 2:3] - ue[None, :, 2]
    r2 = dx * dx + dy * dy
    r = np.sqrt(r2)
    d = np.sqrt(r2 + dh * dh)

    scale = np.sqrt(alpha * beta)
    n_max = np.floor(r * scale / 1000.0 - 1.0)
    two_g2 = 2.0 * gamma_env * gamma_env
    hb = bs[:, 2:3]
    pr = np.ones_like(r)
    top = int(n_max.max()) if n_max.size else -1
    for n in range(top + 1):
        hn = hb - (n + 0.5) * dh / (n + 1)
        factor = 1.0 - np.exp(-(hn * hn) / two_g2)
        pr = np.where(n <= n_max, pr * factor, pr)

    logd = np.log10(d)
    l_los = ref_los[:, None] + 10.0 * exp_los[:, None] * logd
    l_nlos = ref_nlos[:, None] + 10.0 * exp_nlos[:, None] * logd
    return pr, np.power(10.0, -l_los / 10.0), np.power(10.0, -l_nlos / 10.0)


def network_step(rx, load_est, demand, noise, bandwidth):
    """Association, SINR, rate, load and capacity enforcement for one timestep.

    ``rx`` is the ``(B, K)`` matrix of received powers ``p_b * g_bk`` (W).
    Users pick ``argmax_b rx[b, k] * (1 - load_est[b])`` (lowest index on
    ties). Each BS then drops its users with the largest time fraction
    ``demand / rate`` until the remaining load is at most one.

    Returns ``(serving, rate, dropped, load, offered_load, served_demand,
    served_rate, n_assoc, n_dropped)``.
    """
    rx = np.ascontiguousarray(rx, dtype=np.float64)
    n_bs, n_ue = rx.shape
    load = np.zeros(n_bs)
    offered = np.zeros(n_bs)
    n_assoc = np.zeros(n_bs, dtype=np.int64)
    n_dropped = np.zeros(n_bs, dtype=np.int64)
    if n_ue == 0:
        return (np.zeros(0, dtype=np.int64), np.zeros(0), np.zeros(0, dtype=bool),
                load, offered, np.zeros(n_bs), np.zeros(n_bs), n_assoc, n_dropped)

    score = rx * (1.0 - load_est)[:, None]
    serving = np.argmax(score, axis=0).astype(np.int64)
    cols = np.arange(n_ue)
    signal = rx[serving, cols]
    masked = rx.copy()
    masked[serving, cols] = 0.0
    interference = masked[0].copy()
    for b in range(1, n_bs):
        interference += masked[b]
    sinr = signal / (interference + noise)
    rate = bandwidth * np.log1p(sinr) / LN2
    with np.errstate(divide="ignore"):
        frac = np.where(rate > 0, demand / np.where(rate > 0, rate, 1.0), np.inf)

    dropped = np.zeros(n_ue, dtype=bool)
    for b in range(n_bs):
        users = np.flatnonzero(serving == b)
        n_assoc[b] = users.size
        if users.size == 0:
            continue
        # descending fraction, ascending user index on ties
        order = np.lexsort((users, -frac[users]))
        f_sorted = frac[users][order]
        tail = np.cumsum(f_sorted[::-1])[::-1]
        n_drop = int(np.argmax(np.append(tail, 0.0) <= 1.0))
        offered[b] = tail[0]
        load[b] = tail[n_drop] if n_drop < users.size else 0.0
        dropped[users[order[:n_drop]]] = True
        n_dropped[b] = n_drop

    kept = ~dropped
    served_demand = np.bincount(serving[kept], weights=demand[kept], minlength=n_bs)
    served_rate = np.bincount(serving[kept], weights=rate[kept], minlength=n_bs)
    return (serving, rate, dropped, load, offered, served_demand, served_rate,
            n_assoc, n_dropped)

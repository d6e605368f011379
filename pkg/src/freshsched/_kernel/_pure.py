"""Pure-Python simulation kernel, the fallback for the compiled loop.

Semantics are defined by the trace engine in ``freshsched.engine``; this
kernel replays the same per-slot mechanics without building audit
records, accumulating only metric sums. The compiled Cython kernel in
``_simloop.pyx`` is a line-for-line twin; the test suite checks all
three against each other.
"""

from __future__ import annotations

PENDING = -(1 << 60)  # sentinel arrival: sample not sensed yet


def simulate_metrics(
    policy_code: int,
    horizon: int,
    channel_on,          # uint8 array, length >= horizon
    c_table,             # int64 (M, K) with K > max sample index
    d_table,             # int64 (M, K)
    initial_age,         # int64 (M,)
    policy_u,            # float64, length >= horizon
    beta: float,
    k_const: float,
    active_count_out=None,   # optional int64 (horizon,) per-slot active counts
    crit_latency_out=None,   # optional int64 (horizon,) hard-critical latency, -1 if none
):
    """Run one replication; return raw metric sums.

    Returns (sum_util, sum_age, sum_lat, drop_count, served_count,
    sum_delta, sum_delta_sq, invariant_violations, censored_sum,
    censored_count).
    """
    m = c_table.shape[0]
    simple_util = beta == 1.0 and k_const == 1.0

    k = [1] * m
    a = [PENDING] * m
    c_prev = [int(c_table[i, 0]) for i in range(m)]
    d = [0] * m
    h = [int(initial_age[i]) for i in range(m)]
    dropped = [False] * m
    for i in range(m):
        if h[i] >= c_prev[i] + 1:
            a[i] = c_prev[i] + 1 - h[i]
            d[i] = int(d_table[i, 1])

    sum_util = 0.0
    sum_age = 0
    sum_lat = 0
    drop_count = 0
    served_count = 0
    sum_delta = 0
    sum_delta_sq = 0
    violations = 0
    censored_sum = 0
    censored_n = 0

    for t in range(1, horizon + 1):
        ch = channel_on[t - 1] != 0

        # sensing: actuation finished, fix arrival and deadline
        for i in range(m):
            if not dropped[i] and a[i] == PENDING and h[i] >= c_prev[i] + 1:
                a[i] = t - 1
                d[i] = int(d_table[i, k[i]])

        # conflict avoidance
        hard = -1
        hard_lat = -1
        n_crit = 0
        for i in range(m):
            if dropped[i] or a[i] == PENDING:
                continue
            if a[i] + d[i] - t == 0:
                n_crit += 1
                if ch:
                    lat = t - 1 - a[i]
                    if hard < 0 or lat < hard_lat:
                        if hard >= 0:
                            d[hard] += 1  # previous best is graced
                        hard = i
                        hard_lat = lat
                    else:
                        d[i] += 1
                else:
                    d[i] += 1

        # per-slot accumulation and structural audits
        n_active = 0
        n_crit_post = 0
        for i in range(m):
            sum_age += h[i]
            if a[i] == PENDING:
                continue
            lat = t - 1 - a[i]
            sum_lat += lat
            lax = a[i] + d[i] - t
            if (lax < 0) != (h[i] >= 1 + c_prev[i] + d[i]):
                violations += 1
            if not dropped[i] and lax >= 0:
                n_active += 1
                if lax == 0:
                    n_crit_post += 1
                if h[i] != 1 + c_prev[i] + lat:
                    violations += 1
                if simple_util:
                    sum_util += 1.0 / (lat + 1)
                else:
                    sum_util += k_const * (lat + 1.0) ** -beta
            if t == horizon:
                censored_sum += lat + 1
                censored_n += 1
        if n_crit_post > (1 if ch else 0):
            violations += 1
        if active_count_out is not None:
            active_count_out[t - 1] = n_active
        if crit_latency_out is not None:
            crit_latency_out[t - 1] = hard_lat if hard >= 0 else -1

        # scheduling decision over the active set
        dec = -1
        if policy_code == 0 and hard >= 0:  # hlf-d serves the hard critical
            dec = hard
        elif policy_code == 4:
            n = 0
            for i in range(m):
                if not dropped[i] and a[i] != PENDING and a[i] + d[i] - t >= 0:
                    n += 1
            if n > 0:
                pick = int(policy_u[t - 1] * n)
                if pick == n:
                    pick = n - 1
                for i in range(m):
                    if not dropped[i] and a[i] != PENDING and a[i] + d[i] - t >= 0:
                        if pick == 0:
                            dec = i
                            break
                        pick -= 1
        else:
            best_lat = -1
            best_dl = 0
            best_arr = 0
            for i in range(m):
                if dropped[i] or a[i] == PENDING or a[i] + d[i] - t < 0:
                    continue
                lat = t - 1 - a[i]
                if policy_code in (0, 1):      # highest latency first
                    if dec < 0 or lat > best_lat:
                        dec = i
                        best_lat = lat
                elif policy_code == 2:          # earliest deadline, then arrival
                    dl = a[i] + d[i]
                    if dec < 0 or dl < best_dl or (dl == best_dl and a[i] < best_arr):
                        dec = i
                        best_dl = dl
                        best_arr = a[i]
                else:                           # least laxity == earliest deadline at common t
                    dl = a[i] + d[i]
                    if dec < 0 or dl < best_dl:
                        dec = i
                        best_dl = dl

        # service, drop, age evolution
        if ch and dec >= 0:
            delta = t - a[dec]
            served_count += 1
            sum_delta += delta
            sum_delta_sq += delta * delta
            c_prev[dec] = int(c_table[dec, k[dec]])
            k[dec] += 1
            a[dec] = PENDING
            d[dec] = 0
            if hard >= 0 and hard != dec:
                dropped[hard] = True
                drop_count += 1
            for i in range(m):
                h[i] = 1 if i == dec else h[i] + 1
        else:
            if ch and hard >= 0:  # idle decision with a hard critical present
                dropped[hard] = True
                drop_count += 1
            for i in range(m):
                h[i] += 1

    return (
        sum_util, sum_age, sum_lat, drop_count, served_count,
        sum_delta, sum_delta_sq, violations, censored_sum, censored_n,
    )

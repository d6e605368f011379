# cython: boundscheck=False, wraparound=False, cdivision=True, language_level=3
"""Compiled simulation kernel. Twin of ``_pure.simulate_metrics``."""

import numpy as np
cimport numpy as cnp

cnp.import_array()

cdef long long PENDING = -(<long long>1 << 60)


def simulate_metrics(
    int policy_code,
    int horizon,
    cnp.uint8_t[::1] channel_on,
    long long[:, ::1] c_table,
    long long[:, ::1] d_table,
    long long[::1] initial_age,
    double[::1] policy_u,
    double beta,
    double k_const,
    active_count_out=None,
    crit_latency_out=None,
):
    cdef int m = c_table.shape[0]
    cdef bint simple_util = beta == 1.0 and k_const == 1.0

    cdef long long[::1] k = np.ones(m, dtype=np.int64)
    cdef long long[::1] a = np.full(m, PENDING, dtype=np.int64)
    cdef long long[::1] c_prev = np.empty(m, dtype=np.int64)
    cdef long long[::1] d = np.zeros(m, dtype=np.int64)
    cdef long long[::1] h = np.empty(m, dtype=np.int64)
    cdef cnp.uint8_t[::1] dropped = np.zeros(m, dtype=np.uint8)

    cdef long long[::1] ac_out
    cdef long long[::1] cl_out
    cdef bint want_ac = active_count_out is not None
    cdef bint want_cl = crit_latency_out is not None
    if want_ac:
        ac_out = active_count_out
    if want_cl:
        cl_out = crit_latency_out

    cdef int i, t, dec, hard, n, pick
    cdef long long lat, lax, hard_lat, dl, best_lat, best_dl, best_arr, delta
    cdef bint ch
    cdef int n_crit_post, n_active

    cdef double sum_util = 0.0
    cdef long long sum_age = 0
    cdef long long sum_lat = 0
    cdef long long drop_count = 0
    cdef long long served_count = 0
    cdef long long sum_delta = 0
    cdef long long sum_delta_sq = 0
    cdef long long violations = 0
    cdef long long censored_sum = 0
    cdef long long censored_n = 0

    for i in range(m):
        c_prev[i] = c_table[i, 0]
        h[i] = initial_age[i]
        if h[i] >= c_prev[i] + 1:
            a[i] = c_prev[i] + 1 - h[i]
            d[i] = d_table[i, 1]

    for t in range(1, horizon + 1):
        ch = channel_on[t - 1] != 0

        # sensing: actuation finished, fix arrival and deadline
        for i in range(m):
            if not dropped[i] and a[i] == PENDING and h[i] >= c_prev[i] + 1:
                a[i] = t - 1
                d[i] = d_table[i, k[i]]

        # conflict avoidance
        hard = -1
        hard_lat = -1
        for i in range(m):
            if dropped[i] or a[i] == PENDING:
                continue
            if a[i] + d[i] - t == 0:
                if ch:
                    lat = t - 1 - a[i]
                    if hard < 0 or lat < hard_lat:
                        if hard >= 0:
                            d[hard] += 1
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
        if want_ac:
            ac_out[t - 1] = n_active
        if want_cl:
            cl_out[t - 1] = hard_lat if hard >= 0 else -1

        # scheduling decision over the active set
        dec = -1
        if policy_code == 0 and hard >= 0:
            dec = hard
        elif policy_code == 4:
            n = 0
            for i in range(m):
                if not dropped[i] and a[i] != PENDING and a[i] + d[i] - t >= 0:
                    n += 1
            if n > 0:
                pick = <int>(policy_u[t - 1] * n)
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
                if policy_code == 0 or policy_code == 1:
                    if dec < 0 or lat > best_lat:
                        dec = i
                        best_lat = lat
                elif policy_code == 2:
                    dl = a[i] + d[i]
                    if dec < 0 or dl < best_dl or (dl == best_dl and a[i] < best_arr):
                        dec = i
                        best_dl = dl
                        best_arr = a[i]
                else:
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
            c_prev[dec] = c_table[dec, k[dec]]
            k[dec] += 1
            a[dec] = PENDING
            d[dec] = 0
            if hard >= 0 and hard != dec:
                dropped[hard] = 1
                drop_count += 1
            for i in range(m):
                if i == dec:
                    h[i] = 1
                else:
                    h[i] += 1
        else:
            if ch and hard >= 0:
                dropped[hard] = 1
                drop_count += 1
            for i in range(m):
                h[i] += 1

    return (
        sum_util, sum_age, sum_lat, drop_count, served_count,
        sum_delta, sum_delta_sq, violations, censored_sum, censored_n,
    )

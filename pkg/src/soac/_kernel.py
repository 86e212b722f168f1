"""Compiled trajectory stepper.

Single-threaded, strict IEEE order (no fastmath), so a trajectory is a pure
function of its inputs regardless of how many trajectories run in parallel.
Operation order matches dynamics.rhs/dynamics.step exactly; tests compare
the two paths element for element.

The digital solution check runs against every canonical row (dropped inert
rows included) but only when the rounded assignment changed since the last
check; integer circuits are checked in exact int64 arithmetic, float
circuits are screened here and confirmed exactly by the caller.
"""

from __future__ import annotations

import numpy as np
from numba import njit

STATUS_BUDGET = 1
STATUS_SOLVED = 0


@njit(cache=True, nogil=True)
def run_steps(
    gate_indptr,
    term_var,
    term_coef,
    term_coef_over_l,
    term_abs_over_l,
    gate_b,
    gate_m,
    check_indptr,
    check_var,
    check_coef,
    check_rhs,
    v,
    xs,
    xl,
    prev_bits,
    t_start,
    step_start,
    step_end,
    check_every,
    alpha,
    beta,
    gamma,
    delta,
    epsilon,
    zeta,
    xl_max,
    dt,
    dv_max,
    first_call,
    store_trace,
    trace_step,
    trace_t,
    trace_maxc,
    trace_violated,
):
    n = v.shape[0]
    m = gate_b.shape[0]
    n_rows = check_rhs.shape[0]

    c_arr = np.empty(m, dtype=np.float64)
    dv = np.empty(n, dtype=np.float64)
    cur_bits = np.empty(n, dtype=np.int64)

    peak_maxc = 0.0
    maxc = 0.0
    violated = 0
    n_samples = 0
    status = STATUS_BUDGET
    step = step_start
    t = t_start

    # violation pass at the current state
    maxc = 0.0
    violated = 0
    for g in range(m):
        r = 0.0
        for k in range(gate_indptr[g], gate_indptr[g + 1]):
            r += term_coef[k] * (0.5 * (v[term_var[k]] + 1.0))
        c = (r - gate_b[g]) / gate_m[g]
        if c < 0.0:
            c = 0.0
        elif c > 1.0:
            c = 1.0
        c_arr[g] = c
        if c > maxc:
            maxc = c
        if c > 0.0:
            violated += 1
    if maxc > peak_maxc:
        peak_maxc = maxc

    if first_call:
        if store_trace:
            trace_step[n_samples] = step
            trace_t[n_samples] = t
            trace_maxc[n_samples] = maxc
            trace_violated[n_samples] = violated
            n_samples += 1
        # unconditional check at step 0 (the changed-bits gate would never
        # fire on an n == 0 circuit)
        for j in range(n):
            bit = 1 if v[j] >= 0.0 else 0
            cur_bits[j] = bit
            prev_bits[j] = bit
        feasible = True
        for i in range(n_rows):
            s = check_rhs[i] - check_rhs[i]  # typed zero
            for k in range(check_indptr[i], check_indptr[i + 1]):
                s += check_coef[k] * cur_bits[check_var[k]]
            if s > check_rhs[i]:
                feasible = False
                break
        if feasible:
            return STATUS_SOLVED, step, t, peak_maxc, maxc, violated, n_samples

    while step < step_end:
        # derivative + update, consuming c_arr for the current state
        for j in range(n):
            dv[j] = 0.0
        for g in range(m):
            gm = xl[g] * xs[g] * c_arr[g]
            rm = (1.0 + zeta * xl[g]) * (1.0 - xs[g])
            for k in range(gate_indptr[g], gate_indptr[g + 1]):
                j = term_var[k]
                sigma = 1.0 if v[j] >= 0.0 else -1.0
                rail = 0.5 * (sigma - v[j])
                dv[j] += (-term_coef_over_l[k]) * gm + term_abs_over_l[k] * rm * rail
        for j in range(n):
            d = dt * dv[j]
            if d > dv_max:
                d = dv_max
            elif d < -dv_max:
                d = -dv_max
            w = v[j] + d
            if w > 1.0:
                w = 1.0
            elif w < -1.0:
                w = -1.0
            v[j] = w
        for g in range(m):
            x = xs[g] + dt * (beta * (xs[g] + epsilon) * (c_arr[g] - gamma))
            if x > 1.0:
                x = 1.0
            elif x < 0.0:
                x = 0.0
            xs[g] = x
            y = xl[g] + dt * (alpha * (c_arr[g] - delta))
            if y > xl_max:
                y = xl_max
            elif y < 1.0:
                y = 1.0
            xl[g] = y
        step += 1
        t += dt

        # violation pass at the new state (feeds the next derivative pass)
        maxc = 0.0
        violated = 0
        for g in range(m):
            r = 0.0
            for k in range(gate_indptr[g], gate_indptr[g + 1]):
                r += term_coef[k] * (0.5 * (v[term_var[k]] + 1.0))
            c = (r - gate_b[g]) / gate_m[g]
            if c < 0.0:
                c = 0.0
            elif c > 1.0:
                c = 1.0
            c_arr[g] = c
            if c > maxc:
                maxc = c
            if c > 0.0:
                violated += 1
        if maxc > peak_maxc:
            peak_maxc = maxc

        if step % check_every == 0:
            if store_trace:
                trace_step[n_samples] = step
                trace_t[n_samples] = t
                trace_maxc[n_samples] = maxc
                trace_violated[n_samples] = violated
                n_samples += 1
            changed = False
            for j in range(n):
                bit = 1 if v[j] >= 0.0 else 0
                cur_bits[j] = bit
                if bit != prev_bits[j]:
                    changed = True
            if changed:
                for j in range(n):
                    prev_bits[j] = cur_bits[j]
                feasible = True
                for i in range(n_rows):
                    s = check_rhs[i] - check_rhs[i]
                    for k in range(check_indptr[i], check_indptr[i + 1]):
                        s += check_coef[k] * cur_bits[check_var[k]]
                    if s > check_rhs[i]:
                        feasible = False
                        break
                if feasible:
                    status = STATUS_SOLVED
                    break

    return status, step, t, peak_maxc, maxc, violated, n_samples

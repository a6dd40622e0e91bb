"""numba kernels shared by the Hamiltonian, S^+ and RDM routines.

Configurations travel through the kernels as (hi, lo) halves so that digit
reads and index lookups hit only the small per-half tables of SectorBasis.
"""

import numba
import numpy as np


@numba.njit(inline="always")
def _digit(site, split, lo, hi, lo_digits, hi_digits):
    if site < split:
        return np.int64(lo_digits[lo, site])
    return np.int64(hi_digits[hi, site - split])


@numba.njit(parallel=True, cache=True)
def apply_pairs(states, lo_size, split, lo_rank, hi_offset, lo_digits, hi_digits,
                d, site_i, site_j, diag, start, d_lo, d_hi, val, x, out):
    """out = H x for H a sum of two-site terms given as flattened column lists.

    For pair b and local column a = d*digit_i + digit_j, ``diag[b*d*d + a]`` is
    the diagonal entry and ``start[col]:start[col+1]`` indexes its off-diagonal
    entries, each stored as a value plus the shifts it applies to (lo, hi).
    Gather form: every output row is written by one iteration only, which
    relies on every pair matrix being symmetric.
    """
    n = states.size
    nb = site_i.size
    dd = d * d
    for r in numba.prange(n):
        c = states[r]
        hi = c // lo_size
        lo = c - hi * lo_size
        acc = 0.0
        offd = 0.0
        for b in range(nb):
            i = site_i[b]
            j = site_j[b]
            di = lo_digits[lo, i] if i < split else hi_digits[hi, i - split]
            dj = lo_digits[lo, j] if j < split else hi_digits[hi, j - split]
            col = b * dd + di * d + dj
            acc += diag[col]
            for k in range(start[col], start[col + 1]):
                offd += val[k] * x[hi_offset[hi + d_hi[k]] + lo_rank[lo + d_lo[k]]]
        out[r] = acc * x[r] + offd


@numba.njit(cache=True)
def csr_row_counts(states, lo_size, split, lo_rank, hi_offset, lo_digits, hi_digits,
                   d, site_i, site_j, diag, start, d_lo, d_hi, val, counts):
    n = states.size
    nb = site_i.size
    dd = d * d
    for r in range(n):
        c = states[r]
        hi = c // lo_size
        lo = c - hi * lo_size
        cnt = 1
        for b in range(nb):
            i = site_i[b]
            j = site_j[b]
            di = lo_digits[lo, i] if i < split else hi_digits[hi, i - split]
            dj = lo_digits[lo, j] if j < split else hi_digits[hi, j - split]
            col = b * dd + di * d + dj
            cnt += start[col + 1] - start[col]
        counts[r] = cnt


@numba.njit(cache=True)
def csr_fill(states, lo_size, split, lo_rank, hi_offset, lo_digits, hi_digits,
             d, site_i, site_j, diag, start, d_lo, d_hi, val, indptr, indices, data):
    """Same traversal as apply_pairs, recording entries instead of summing.

    The diagonal goes first in each row; off-diagonal entries from different
    pairs never collide because each flips a different pair of digits.
    """
    n = states.size
    nb = site_i.size
    dd = d * d
    for r in range(n):
        c = states[r]
        hi = c // lo_size
        lo = c - hi * lo_size
        p = indptr[r]
        q = p + 1
        acc = 0.0
        for b in range(nb):
            i = site_i[b]
            j = site_j[b]
            di = lo_digits[lo, i] if i < split else hi_digits[hi, i - split]
            dj = lo_digits[lo, j] if j < split else hi_digits[hi, j - split]
            col = b * dd + di * d + dj
            acc += diag[col]
            for k in range(start[col], start[col + 1]):
                indices[q] = hi_offset[hi + d_hi[k]] + lo_rank[lo + d_lo[k]]
                data[q] = val[k]
                q += 1
        indices[p] = r
        data[p] = acc


@numba.njit(cache=True)
def apply_raising(states, lo_size, split, lo_digits, hi_digits, d, half_pow, length, amp,
                  x, t_lo_rank, t_hi_offset, out):
    """out += S^+_total x, landing in the sector one step up.

    amp[digit] is the local raising matrix element from ``digit`` to ``digit + 1``.
    """
    for r in range(states.size):
        xr = x[r]
        if xr == 0.0:
            continue
        c = states[r]
        hi = c // lo_size
        lo = c - hi * lo_size
        for j in range(length):
            dj = _digit(j, split, lo, hi, lo_digits, hi_digits)
            if dj == d - 1:
                continue
            if j < split:
                idx = t_hi_offset[hi] + t_lo_rank[lo + half_pow[j]]
            else:
                idx = t_hi_offset[hi + half_pow[j]] + t_lo_rank[lo]
            out[idx] += amp[dj] * xr


@numba.njit(cache=True)
def pair_rdm(states, lo_size, split, lo_rank, hi_offset, lo_digits, hi_digits,
             d, half_pow, site_a, site_b, x, rho):
    """rho[(a,b),(a',b')] += sum_env x(a,b,env) x(a',b',env).

    Inside a fixed S^z sector only pairs with a + b == a' + b' share an
    environment, so partners are reached by shifting the two digits.
    """
    for r in range(states.size):
        xr = x[r]
        if xr == 0.0:
            continue
        c = states[r]
        hi = c // lo_size
        lo = c - hi * lo_size
        a = _digit(site_a, split, lo, hi, lo_digits, hi_digits)
        b = _digit(site_b, split, lo, hi, lo_digits, hi_digits)
        s = a + b
        row = a * d + b
        for a2 in range(d):
            b2 = s - a2
            if b2 < 0 or b2 >= d:
                continue
            if a2 == a:
                rho[row, row] += xr * xr
                continue
            l2 = lo
            h2 = hi
            if site_a < split:
                l2 += (a2 - a) * half_pow[site_a]
            else:
                h2 += (a2 - a) * half_pow[site_a]
            if site_b < split:
                l2 += (b2 - b) * half_pow[site_b]
            else:
                h2 += (b2 - b) * half_pow[site_b]
            rho[row, a2 * d + b2] += xr * x[hi_offset[h2] + lo_rank[l2]]

"""Hot numeric kernels: cut diagonals, statevector layer updates, brute force.

Two interchangeable implementations exist for every kernel: numba-jitted
loops (used by default when numba is importable) and pure-numpy array code.
Set ``QAOABENCH_DISABLE_NUMBA=1`` in the environment before import to force
the numpy path.  ``BACKEND`` reports which one is active; the ``*_numpy``
functions stay importable either way so the two paths can be compared
directly (see benchmarks/kernel_bench.py).

State layout is little-endian: qubit ``q`` is bit ``q`` of the basis index.
Edge arrays are int64 with shape (m, 2), u < v per row.
"""

import os

import numpy as np


def _numba_disabled() -> bool:
    return os.environ.get("QAOABENCH_DISABLE_NUMBA", "").strip().lower() in (
        "1", "true", "yes", "on",
    )


# ---------------------------------------------------------------------------
# pure-numpy implementations
# ---------------------------------------------------------------------------

def cut_diagonal_numpy(n, edges):
    """Vector of cut sizes, entry z = number of edges cut by bitstring z."""
    size = 1 << n
    out = np.zeros(size, dtype=np.int32)
    if edges.shape[0]:
        z = np.arange(size, dtype=np.int64)
        for k in range(edges.shape[0]):
            out += (((z >> edges[k, 0]) ^ (z >> edges[k, 1])) & 1).astype(np.int32)
    return out


def apply_phase_numpy(amps, cuts, table):
    """In-place amps[z] *= table[cuts[z]] (diagonal cost-phase layer)."""
    amps *= table[cuts]


def apply_mixer_numpy(amps, n, cos_b, msin_b):
    """In-place single-qubit rotation on every qubit.

    Pairs (a_z0, a_z1) differing in bit q map to
    (cos_b*a_z0 + msin_b*a_z1, msin_b*a_z0 + cos_b*a_z1)
    where msin_b = -1j*sin(beta).
    """
    for q in range(n):
        view = amps.reshape(-1, 2, 1 << q)
        a0 = view[:, 0, :].copy()
        a1 = view[:, 1, :]
        view[:, 0, :] = cos_b * a0 + msin_b * a1
        view[:, 1, :] = msin_b * a0 + cos_b * a1


def bruteforce_numpy(n, edges, chunk=1 << 18):
    """Best cut over z in [0, 2^(n-1)); the complement covers the rest.

    Returns (value, z) with the lowest-z tie-break.  Restricting to the
    lower half keeps the top vertex in partition 0, so the returned z is
    also the smaller member of its complement pair.
    """
    half = 1 << (n - 1)
    best = -1
    best_z = 0
    for lo in range(0, half, chunk):
        z = np.arange(lo, min(lo + chunk, half), dtype=np.int64)
        c = np.zeros(z.size, dtype=np.int32)
        for k in range(edges.shape[0]):
            c += (((z >> edges[k, 0]) ^ (z >> edges[k, 1])) & 1).astype(np.int32)
        k = int(np.argmax(c))
        if int(c[k]) > best:
            best = int(c[k])
            best_z = int(z[k])
    return best, best_z


# ---------------------------------------------------------------------------
# numba implementations (same semantics, loop form)
# ---------------------------------------------------------------------------

HAVE_NUMBA = False
if not _numba_disabled():
    try:
        from numba import njit
        HAVE_NUMBA = True
    except ImportError:  # pragma: no cover - depends on environment
        pass

if HAVE_NUMBA:

    @njit(cache=True)
    def cut_diagonal_numba(n, edges):
        size = 1 << n
        out = np.zeros(size, dtype=np.int32)
        for k in range(edges.shape[0]):
            i = edges[k, 0]
            j = edges[k, 1]
            for z in range(size):
                out[z] += ((z >> i) ^ (z >> j)) & 1
        return out

    @njit(cache=True)
    def apply_phase_numba(amps, cuts, table):
        for z in range(amps.size):
            amps[z] *= table[cuts[z]]

    @njit(cache=True)
    def apply_mixer_numba(amps, n, cos_b, msin_b):
        size = amps.size
        for q in range(n):
            step = 1 << q
            period = step << 1
            for base in range(0, size, period):
                for lo in range(base, base + step):
                    a0 = amps[lo]
                    a1 = amps[lo + step]
                    amps[lo] = cos_b * a0 + msin_b * a1
                    amps[lo + step] = msin_b * a0 + cos_b * a1

    @njit(cache=True)
    def bruteforce_numba(n, edges):
        half = 1 << (n - 1)
        m = edges.shape[0]
        best = -1
        best_z = 0
        for z in range(half):
            c = 0
            for k in range(m):
                c += ((z >> edges[k, 0]) ^ (z >> edges[k, 1])) & 1
            if c > best:
                best = c
                best_z = z
        return best, best_z

    cut_diagonal = cut_diagonal_numba
    apply_phase = apply_phase_numba
    apply_mixer = apply_mixer_numba
    bruteforce_best = bruteforce_numba
    BACKEND = "numba"
else:
    cut_diagonal = cut_diagonal_numpy
    apply_phase = apply_phase_numpy
    apply_mixer = apply_mixer_numpy
    bruteforce_best = bruteforce_numpy
    BACKEND = "numpy"

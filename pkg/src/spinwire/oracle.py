"""Dense full-Hilbert-space reference for small chains.

Everything here scales as 2^N and exists to validate the polynomial
engines: populations, reduced states, and out-of-time-order correlators
computed with no structure assumptions beyond Hermiticity.  Chains are
capped at 12 sites.

Basis convention: site j maps to bit position (n - j), i.e. site 1 is
the most significant bit, and a set bit means the site is excited.
"""

from functools import lru_cache

import numpy as np
from scipy.linalg import eigh

MAX_DENSE_SITES = 12


def _check_size(n):
    if n > MAX_DENSE_SITES:
        raise ValueError(
            f"dense reference capped at {MAX_DENSE_SITES} sites, got n={n}"
        )


def _bit(site, n):
    return 1 << (n - site)


def build_hamiltonian(spec):
    """Full 2^N spin Hamiltonian as a real symmetric dense matrix.

    H = omega sum_j sigma^z_j + sum_k J_k (x x + y y) on neighbours;
    the exchange term hops an excitation across bond k with matrix
    element 2 J_k.
    """
    n = spec.n_sites
    _check_size(n)
    dim = 1 << n
    occupation = np.array([i.bit_count() for i in range(dim)])
    h = np.zeros((dim, dim))
    h[np.arange(dim), np.arange(dim)] = spec.omega * (2.0 * occupation - n)
    couplings = spec.couplings()
    for k in range(n - 1):
        hi = _bit(k + 1, n)
        lo = _bit(k + 2, n)
        for i in range(dim):
            if (i & hi) and not (i & lo):
                j = i ^ hi ^ lo
                h[i, j] += 2.0 * couplings[k]
                h[j, i] += 2.0 * couplings[k]
    return h


@lru_cache(maxsize=32)
def _spectrum(spec):
    values, vectors = eigh(build_hamiltonian(spec))
    return values, vectors


def full_propagator(spec, t):
    """exp(-i H t) on the full Hilbert space."""
    values, vectors = _spectrum(spec)
    return (vectors * np.exp(-1j * values * t)) @ vectors.T


def embed_x_state(x, n):
    """rho_X (sites 1, 2) tensored with the vacuum on sites 3..n."""
    _check_size(n)
    if n < 2:
        raise ValueError(f"need at least two sites, got n={n}")
    dim = 1 << n
    b1, b2 = _bit(1, n), _bit(2, n)
    i00, i01, i10, i11 = 0, b2, b1, b1 | b2
    rho = np.zeros((dim, dim), dtype=complex)
    rho[i11, i11] = x.a
    rho[i10, i10] = x.b
    rho[i01, i01] = x.c
    rho[i00, i00] = x.d
    rho[i10, i01] = complex(x.z)
    rho[i01, i10] = np.conj(complex(x.z))
    rho[i11, i00] = complex(x.w)
    rho[i00, i11] = np.conj(complex(x.w))
    return rho


def product_state(populations):
    """Diagonal product state from per-site excitation probabilities."""
    populations = np.asarray(populations, dtype=float)
    n = populations.shape[0]
    _check_size(n)
    dim = 1 << n
    diag = np.ones(dim)
    for j in range(n):
        mask = np.array([(i >> (n - 1 - j)) & 1 for i in range(dim)], dtype=bool)
        diag *= np.where(mask, populations[j], 1.0 - populations[j])
    return np.diag(diag).astype(complex)


def maximally_mixed(n):
    _check_size(n)
    dim = 1 << n
    return np.eye(dim, dtype=complex) / dim


def dense_oracle(spec, x, t):
    """Exact rho(t) for an X state launched on sites (1, 2)."""
    rho0 = embed_x_state(x, spec.n_sites)
    u = full_propagator(spec, t)
    return u @ rho0 @ u.conj().T


def site_population(rho, site, n):
    """Tr[rho n_site]."""
    dim = rho.shape[0]
    mask = _bit(site, n)
    idx = np.array([i for i in range(dim) if i & mask])
    return float(np.real(np.sum(rho[idx, idx])))


def reduced_site_state(rho, site, n):
    """Reduced 2x2 density matrix of one site, basis (|1>, |0>)."""
    dim = rho.shape[0]
    mask = _bit(site, n)
    excited = np.array([i for i in range(dim) if i & mask])
    ground = excited ^ mask
    p = np.real(np.sum(rho[excited, excited]))
    coherence = np.sum(rho[excited, ground])
    return np.array(
        [[p, coherence], [np.conj(coherence), 1.0 - p]], dtype=complex
    )


def sigma_z_diagonal(site, n):
    """sigma^z_site as a diagonal vector over the full basis."""
    dim = 1 << n
    mask = _bit(site, n)
    return np.array([1.0 if i & mask else -1.0 for i in range(dim)])


def otoc_dense(spec, rho, x, y, t):
    """C(x, y, t) = 2 - 2 Re Tr[rho W(t) V W(t) V] with W, V Pauli-z.

    W(t) is the Heisenberg operator exp(iHt) sigma^z_x exp(-iHt),
    assembled explicitly; nothing here assumes number conservation.
    """
    n = spec.n_sites
    _check_size(n)
    if not (1 <= x <= n and 1 <= y <= n):
        raise ValueError(f"sites ({x}, {y}) out of range 1..{n}")
    u = full_propagator(spec, t)
    szx = sigma_z_diagonal(x, n)
    szy = sigma_z_diagonal(y, n)
    w = u.conj().T @ (szx[:, None] * u)
    m = w * szy[None, :]
    f = np.trace(rho @ m @ m)
    return float(2.0 - 2.0 * np.real(f))

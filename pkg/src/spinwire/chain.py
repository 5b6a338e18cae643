"""Chain geometry and two-site initial states.

The model is an open XX chain of ``n`` qubits with uniform on-site
splitting ``omega`` and nearest-neighbour exchange couplings ``J_k``,

    H = omega * sum_j sigma^z_j
        + sum_k J_k (sigma^x_k sigma^x_{k+1} + sigma^y_k sigma^y_{k+1}),

in units with hbar = 1, energies in units of the coupling scale J and
times in 1/J.  Two coupling profiles are built in: the staggered
"perfect-transfer" profile, which maps site 1 to site N exactly at the
transfer period, and a flat profile normalised so that a single bond
hops with amplitude J.

Initial data live on the first two sites: an X-shaped two-qubit density
matrix (diagonal plus the two anti-diagonal coherences) tensored with
the vacuum on the rest of the chain.
"""

from dataclasses import dataclass, field

import numpy as np

#: absolute slack applied to all state-validity checks
_ATOL = 1e-12


def make_pst_couplings(n, j_scale=1.0):
    """Coupling sequence that gives perfect state transfer.

    The couplings follow the parabolic profile
    ``J_k = (lam/4) * sqrt(k (n - k))`` with ``lam = 4 j_scale / n``,
    so the strongest bond (mid-chain) approaches ``j_scale / 2`` and the
    single-particle spectrum is an equispaced ladder with spacing
    ``lam``.  Transfer from site 1 to site n completes at
    ``t = pi / lam = n pi / (4 j_scale)``.

    Parameters
    ----------
    n : int
        Number of sites, at least 2.
    j_scale : float
        Overall coupling scale J > 0.

    Returns
    -------
    ndarray, shape (n - 1,)
    """
    if n < 2:
        raise ValueError(f"need at least two sites, got n={n}")
    if j_scale <= 0:
        raise ValueError(f"coupling scale must be positive, got {j_scale}")
    k = np.arange(1, n)
    lam = 4.0 * j_scale / n
    return lam / 4.0 * np.sqrt(k * (n - k))


def make_uniform_couplings(n, j_scale=1.0):
    """Flat coupling sequence, normalised to single-bond hopping J.

    Every bond carries ``J_k = j_scale / 2`` so the hopping matrix
    element ``2 J_k`` equals ``j_scale`` and the ballistic front of a
    flat chain moves at speed ``2 j_scale`` sites per unit time.
    """
    if n < 2:
        raise ValueError(f"need at least two sites, got n={n}")
    if j_scale <= 0:
        raise ValueError(f"coupling scale must be positive, got {j_scale}")
    return np.full(n - 1, j_scale / 2.0)


@dataclass(frozen=True)
class ChainSpec:
    """Static description of the chain.

    Attributes
    ----------
    n_sites : int
        Chain length, >= 2.
    omega : float
        On-site splitting, >= 0.  Populations are insensitive to it.
    j_scale : float
        Coupling scale J > 0.
    profile : str or sequence
        ``"pst"``, ``"uniform"``, or an explicit sequence of n-1
        positive couplings.
    """

    n_sites: int
    omega: float = 1.0
    j_scale: float = 1.0
    profile: object = "pst"

    def __post_init__(self):
        if self.n_sites < 2:
            raise ValueError(f"need at least two sites, got {self.n_sites}")
        if self.omega < 0:
            raise ValueError(f"on-site splitting must be >= 0, got {self.omega}")
        if self.j_scale <= 0:
            raise ValueError(f"coupling scale must be positive, got {self.j_scale}")
        if isinstance(self.profile, str):
            if self.profile not in ("pst", "uniform"):
                raise ValueError(
                    f"unknown coupling profile {self.profile!r}; "
                    "expected 'pst', 'uniform', or an explicit sequence"
                )
        else:
            js = np.asarray(self.profile, dtype=float)
            if js.shape != (self.n_sites - 1,):
                raise ValueError(
                    f"explicit profile needs {self.n_sites - 1} couplings, "
                    f"got shape {js.shape}"
                )
            if np.any(js <= 0):
                raise ValueError("explicit couplings must all be positive")
            object.__setattr__(self, "profile", tuple(js))

    def couplings(self):
        """Bond couplings J_1 .. J_{n-1} as an ndarray."""
        if self.profile == "pst":
            return make_pst_couplings(self.n_sites, self.j_scale)
        if self.profile == "uniform":
            return make_uniform_couplings(self.n_sites, self.j_scale)
        return np.asarray(self.profile, dtype=float)

    def transfer_period(self):
        """Nominal transfer window ``n pi / (4 J)``.

        For the perfect-transfer profile this is the exact arrival time
        of an excitation launched at site 1; for other profiles it just
        sets a convenient time scale for grids and reports.
        """
        return self.n_sites * np.pi / (4.0 * self.j_scale)


@dataclass(frozen=True)
class XState:
    """Two-qubit X-state on the first two sites.

    In the ordered basis (|11>, |10>, |01>, |00>) the density matrix is

        [[a, 0, 0, w],
         [0, b, z, 0],
         [0, z*, c, 0],
         [w*, 0, 0, d]]

    so ``z = <10|rho|01>`` is the single-excitation coherence and ``w``
    the two-excitation one.  Sign convention: a purely imaginary
    ``z = +i alpha`` with alpha > 0 accelerates transfer toward the far
    end of the chain (checked against the exact many-body propagator).
    """

    a: float
    b: float
    c: float
    d: float
    w: complex = 0.0
    z: complex = 0.0

    def __post_init__(self):
        probs = (self.a, self.b, self.c, self.d)
        if any(p < -_ATOL for p in probs):
            raise ValueError(f"negative population in {probs}")
        tr = sum(probs)
        if abs(tr - 1.0) > _ATOL:
            raise ValueError(f"populations must sum to 1, got {tr}")
        if abs(self.z) > np.sqrt(max(self.b * self.c, 0.0)) + _ATOL:
            raise ValueError(
                f"|z|={abs(self.z):.6g} exceeds sqrt(b c)="
                f"{np.sqrt(max(self.b * self.c, 0.0)):.6g}; state not positive"
            )
        if abs(self.w) > np.sqrt(max(self.a * self.d, 0.0)) + _ATOL:
            raise ValueError(
                f"|w|={abs(self.w):.6g} exceeds sqrt(a d)="
                f"{np.sqrt(max(self.a * self.d, 0.0)):.6g}; state not positive"
            )

    @property
    def sender_population(self):
        """Excitation probability of site 1, p_1 = a + b."""
        return self.a + self.b

    @property
    def partner_population(self):
        """Excitation probability of site 2, p_2 = a + c."""
        return self.a + self.c

    def marginal(self, site):
        """Reduced 2x2 density matrix of site 1 or 2, basis (|1>, |0>)."""
        if site == 1:
            p = self.sender_population
        elif site == 2:
            p = self.partner_population
        else:
            raise ValueError(f"state lives on sites 1 and 2, got {site}")
        return np.array([[p, 0.0], [0.0, 1.0 - p]])

    def as_matrix(self):
        """Dense 4x4 density matrix in the basis (|11>, |10>, |01>, |00>)."""
        z, w = complex(self.z), complex(self.w)
        return np.array(
            [
                [self.a, 0, 0, w],
                [0, self.b, z, 0],
                [0, np.conj(z), self.c, 0],
                [np.conj(w), 0, 0, self.d],
            ],
            dtype=complex,
        )


def thermal_population(beta, omega):
    """Excited-state weight of one qubit at inverse temperature beta.

    p = exp(-beta omega) / (2 cosh(beta omega)), computed in a form
    stable for large |beta|.

    >>> round(thermal_population(1.0, 1.0), 4)
    0.1192
    """
    # p = 1 / (1 + exp(2 beta omega)); negative beta describes inversion
    x = 2.0 * beta * omega
    if x > 700.0:
        return 0.0
    if x < -700.0:
        return 1.0
    return 1.0 / (1.0 + np.exp(x))


def make_thermal_correlated(beta, omega, alpha):
    """Thermal product marginals plus an imaginary exchange coherence.

    Both qubits carry the thermal excitation weight ``p`` of
    :func:`thermal_population`; the coherence is ``z = i alpha``.  The
    populations are chosen so the marginals are *bit-exact* thermal:
    ``b = c = p (1 - p)``, ``a = p - b``, ``d = (1 - p) - c``.

    Positivity bounds alpha: ``|alpha| <= p (1 - p)``, which equals
    ``1 / (4 cosh^2(beta omega))`` and is 1/4 at infinite temperature.
    """
    p = thermal_population(beta, omega)
    bound = p * (1.0 - p)
    if abs(alpha) > bound + _ATOL:
        raise ValueError(
            f"|alpha|={abs(alpha):.6g} exceeds the positivity bound "
            f"p(1-p)={bound:.6g} at beta={beta}"
        )
    b = bound
    return XState(a=p - b, b=b, c=b, d=(1.0 - p) - b, w=0.0, z=1j * alpha)


def make_one_excitation_x(b, c, alpha):
    """Single-excitation sector state: no vacuum or doubly excited weight.

    rho = b |10><10| + c |01><01| + (i alpha |10><01| + h.c.), with
    b + c = 1 and |alpha| <= sqrt(b c).
    """
    if b < -_ATOL or c < -_ATOL:
        raise ValueError(f"populations must be >= 0, got b={b}, c={c}")
    if abs(b + c - 1.0) > _ATOL:
        raise ValueError(f"single-excitation weights must sum to 1, got {b + c}")
    return XState(a=0.0, b=b, c=c, d=0.0, w=0.0, z=1j * alpha)


_BELL_TABLE = {
    "phi+": dict(a=0.5, b=0.0, c=0.0, d=0.5, w=0.5, z=0.0),
    "phi-": dict(a=0.5, b=0.0, c=0.0, d=0.5, w=-0.5, z=0.0),
    "psi+": dict(a=0.0, b=0.5, c=0.5, d=0.0, w=0.0, z=0.5),
    "psi-": dict(a=0.0, b=0.5, c=0.5, d=0.0, w=0.0, z=-0.5),
}


def make_bell(kind):
    """One of the four Bell states as an XState.

    ``kind`` is one of ``"phi+", "phi-", "psi+", "psi-"``.  The phi pair
    carries the two-excitation coherence w = +-1/2, the psi pair the
    exchange coherence z = +-1/2; all four have maximally mixed
    marginals.
    """
    try:
        return XState(**_BELL_TABLE[kind])
    except KeyError:
        raise ValueError(
            f"unknown Bell state {kind!r}; expected one of {sorted(_BELL_TABLE)}"
        ) from None

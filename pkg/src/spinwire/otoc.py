"""Out-of-time-order correlators and wavefront statistics.

All engines compute ``C(x, y, t) = 2 - 2 Re F`` with
``F = <W(t) V W(t) V>``, ``W = sigma^z_x``, ``V = sigma^z_y``.  Because
sigma^z strings preserve excitation number, F splits over excitation
sectors and each sector reduces to single-particle propagator algebra:

* ``otoc_sector`` -- exact for any X state launched at sites (1, 2),
  polynomial cost in chain length (vacuum contributes 1, the
  one-excitation block is a 2x2 trace, the doubly excited component is
  an antisymmetric two-particle amplitude).
* ``otoc_infinite_temperature`` -- exact for the maximally mixed (or
  uniform-filling product) average, via Wick contraction of the
  8-point fermionic correlator.
* ``otoc_brute_force`` -- dense 2^N evaluation, the oracle the other
  two are validated against.
"""

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from . import oracle
from .chain import ChainSpec, XState
from .dynamics import eigensystem, propagator_columns

_ATOL = 1e-12


@dataclass
class SectorState:
    """Excitation-sector decomposition of an X state at sites (1, 2).

    ``vacuum_weight`` is the no-excitation probability d,
    ``one_exc_block`` the 2x2 Hermitian block [[b, z], [z*, c]] on the
    site-(1,2) single-excitation amplitudes, and ``pair_weight`` the
    probability a of both sites excited.  The cross-sector coherence w
    is dropped on construction: number-preserving observables like the
    sigma^z OTOC cannot see it.
    """

    vacuum_weight: float
    one_exc_block: np.ndarray
    pair_weight: float

    def __post_init__(self):
        block = np.asarray(self.one_exc_block, dtype=complex)
        if block.shape != (2, 2):
            raise ValueError(f"one-excitation block must be 2x2, got {block.shape}")
        if np.max(np.abs(block - block.conj().T)) > _ATOL:
            raise ValueError("one-excitation block must be Hermitian")
        if min(self.vacuum_weight, self.pair_weight) < -_ATOL:
            raise ValueError("sector weights must be nonnegative")
        total = self.vacuum_weight + self.pair_weight + np.real(np.trace(block))
        if abs(total - 1.0) > _ATOL:
            raise ValueError(f"sector weights must sum to 1, got {total}")
        if np.min(np.linalg.eigvalsh(block)) < -_ATOL:
            raise ValueError("one-excitation block must be positive semidefinite")
        self.one_exc_block = block

    @classmethod
    def from_x_state(cls, x):
        block = np.array(
            [[x.b, complex(x.z)], [np.conj(complex(x.z)), x.c]], dtype=complex
        )
        return cls(vacuum_weight=x.d, one_exc_block=block, pair_weight=x.a)


@dataclass
class OtocProfile:
    """C(x, y, t) over every site x at fixed probe site y and time t."""

    sites: np.ndarray
    values: np.ndarray
    y: int
    t: float


def _as_sector_state(state):
    if isinstance(state, SectorState):
        return state
    if isinstance(state, XState):
        return SectorState.from_x_state(state)
    raise TypeError(f"expected SectorState or XState, got {type(state).__name__}")


def _check_sites(n, x, y):
    if not (1 <= x <= n and 1 <= y <= n):
        raise ValueError(f"sites ({x}, {y}) out of range 1..{n}")


def _sector_f(v, state, y):
    """F for one X-state average, given the propagator column v = U(t) e_x."""
    n = v.shape[0]
    iy = y - 1

    def a_op(w):
        return 2.0 * v * (v.conj() @ w) - w

    def b_op(w):
        r = -w
        r[iy] = w[iy]
        return r

    columns = []
    for m in (0, 1):
        e = np.zeros(n, dtype=complex)
        e[m] = 1.0
        columns.append(a_op(b_op(a_op(b_op(e)))))

    block = state.one_exc_block
    one = (
        block[0, 0] * columns[0][0]
        + block[0, 1] * columns[0][1]
        + block[1, 0] * columns[1][0]
        + block[1, 1] * columns[1][1]
    )

    pair = 0.0
    if state.pair_weight != 0.0:
        psi = np.zeros((n, n), dtype=complex)
        psi[0, 1] = 1.0
        psi[1, 0] = -1.0

        def a2(ps):
            return 2.0 * (np.outer(v, v.conj() @ ps) + np.outer(ps @ v.conj(), v)) - ps

        def b2(ps):
            r = -ps
            r[iy, :] += 2.0 * ps[iy, :]
            r[:, iy] += 2.0 * ps[:, iy]
            return r

        pair = a2(b2(a2(b2(psi))))[0, 1]

    return state.vacuum_weight + one + state.pair_weight * pair


def otoc_sector(spec, state, x, y, t, es=None):
    """Exact C(x, y, t) for an X-state average, polynomial in N."""
    n = spec.n_sites
    _check_sites(n, x, y)
    state = _as_sector_state(state)
    if es is None:
        es = eigensystem(spec)
    v = propagator_columns(es, x, t)[:, 0]
    f = _sector_f(v, state, y)
    c = 2.0 - 2.0 * float(np.real(f))
    return float(np.clip(c, 0.0, 4.0))


def otoc_profile(spec, state, y, t, es=None):
    """C(x, y, t) over all x, reusing one eigensystem factorization."""
    n = spec.n_sites
    _check_sites(n, y, y)
    state = _as_sector_state(state)
    if es is None:
        es = eigensystem(spec)
    values = np.empty(n)
    for x in range(1, n + 1):
        v = propagator_columns(es, x, t)[:, 0]
        f = _sector_f(v, state, y)
        values[x - 1] = np.clip(2.0 - 2.0 * np.real(f), 0.0, 4.0)
    return OtocProfile(sites=np.arange(1, n + 1), values=values, y=y, t=float(t))


def _matchings(indices):
    """All perfect matchings of an index tuple with permutation signs."""
    if not indices:
        yield (), 1
        return
    first = indices[0]
    for k in range(1, len(indices)):
        partner = indices[k]
        rest = indices[1:k] + indices[k + 1 :]
        sign = -1 if (k - 1) % 2 else 1
        for pairs, s in _matchings(rest):
            yield ((first, partner),) + pairs, sign * s


@lru_cache(maxsize=16)
def _wick_polynomial(population):
    """Coefficients of F as a polynomial in (g, conj(g)).

    g is the single-particle propagator element between the probe sites,
    ``g = U(t)[x-1, y-1]``.  Expanding each sigma^z as 2 c^dag c - 1
    turns F into a sum of up-to-8-point fermionic correlators of a
    number-conserving Gaussian state with uniform filling
    ``population``; every correlator Wick-decomposes into perfect
    matchings with contractions

        <c^dag(u) c(v)>  = population * g(u, v)
        <c(u) c^dag(v)>  = (1 - population) * conj(g(u, v))

    where g(u, v) is 1 for equal labels, g for (x, t) -> (y, 0), and
    conj(g) the other way.  The matching enumeration (105 terms for the
    8-point function) is done symbolically once per filling and cached;
    engines then evaluate the returned exponent -> coefficient map.
    """
    p = float(population)
    labels = ("x", "y", "x", "y")

    def contraction(op_a, op_b):
        dag_a, la = op_a
        dag_b, lb = op_b
        if dag_a == dag_b:
            return None
        if dag_a:
            weight = p
            if la == lb:
                key = (0, 0)
            elif (la, lb) == ("x", "y"):
                key = (1, 0)
            else:
                key = (0, 1)
        else:
            weight = 1.0 - p
            if la == lb:
                key = (0, 0)
            elif (la, lb) == ("x", "y"):
                key = (0, 1)
            else:
                key = (1, 0)
        return {key: weight}

    total = {}
    for subset in range(16):
        members = [i for i in range(4) if subset & (1 << i)]
        weight = (2.0 ** len(members)) * ((-1.0) ** (4 - len(members)))
        ops = []
        for i in members:
            ops.append((True, labels[i]))
            ops.append((False, labels[i]))
        if not ops:
            total[(0, 0)] = total.get((0, 0), 0.0) + weight
            continue
        for pairs, sign in _matchings(tuple(range(len(ops)))):
            term = {(0, 0): float(sign)}
            for ia, ib in pairs:
                factor = contraction(ops[ia], ops[ib])
                if factor is None:
                    term = None
                    break
                new = {}
                for (m1, n1), c1 in term.items():
                    for (m2, n2), c2 in factor.items():
                        key = (m1 + m2, n1 + n2)
                        new[key] = new.get(key, 0.0) + c1 * c2
                term = new
            if term is None:
                continue
            for key, coeff in term.items():
                total[key] = total.get(key, 0.0) + weight * coeff
    return {key: coeff for key, coeff in total.items() if abs(coeff) > 1e-14}


def _evaluate_wick(g, population):
    poly = _wick_polynomial(population)
    f = np.zeros_like(np.asarray(g, dtype=complex))
    for (m, mb), coeff in poly.items():
        f = f + coeff * np.asarray(g) ** m * np.conj(g) ** mb
    return 2.0 - 2.0 * np.real(f)


def otoc_infinite_temperature(spec, x, y, t, population=0.5, es=None):
    """C(x, y, t) for the uniform-filling (default maximally mixed) average."""
    n = spec.n_sites
    _check_sites(n, x, y)
    if es is None:
        es = eigensystem(spec)
    g = propagator_columns(es, y, t)[x - 1, 0]
    c = float(_evaluate_wick(g, population))
    return float(np.clip(c, 0.0, 4.0))


def infinite_temperature_profile(spec, y, t, population=0.5, es=None):
    """Maximally-mixed C(x, y, t) over all x at once (vectorized)."""
    n = spec.n_sites
    _check_sites(n, y, y)
    if es is None:
        es = eigensystem(spec)
    g = propagator_columns(es, y, t)[:, 0]
    values = np.clip(_evaluate_wick(g, population), 0.0, 4.0)
    return OtocProfile(sites=np.arange(1, n + 1), values=values, y=y, t=float(t))


def otoc_brute_force(spec, state, x, y, t):
    """Dense 2^N evaluation; the oracle for the polynomial engines.

    ``state`` may be a full density matrix, an XState, or a
    SectorState (re-embedded with w = 0).  Chains above
    ``oracle.MAX_DENSE_SITES`` sites are refused.
    """
    n = spec.n_sites
    if isinstance(state, XState):
        rho = oracle.embed_x_state(state, n)
    elif isinstance(state, SectorState):
        oracle._check_size(n)
        dim = 1 << n
        b1, b2 = 1 << (n - 1), 1 << (n - 2)
        rho = np.zeros((dim, dim), dtype=complex)
        rho[0, 0] = state.vacuum_weight
        block = state.one_exc_block
        rho[b1, b1] = block[0, 0]
        rho[b1, b2] = block[0, 1]
        rho[b2, b1] = block[1, 0]
        rho[b2, b2] = block[1, 1]
        rho[b1 | b2, b1 | b2] = state.pair_weight
    else:
        rho = np.asarray(state, dtype=complex)
        if rho.shape != (1 << n, 1 << n):
            raise ValueError(
                f"density matrix shape {rho.shape} does not match n={n}"
            )
    return oracle.otoc_dense(spec, rho, x, y, t)


def mean_position(profile):
    """Correlator-weighted mean site, sum(x C) / sum(C)."""
    total = float(np.sum(profile.values))
    if total <= 0.0:
        raise ValueError("mean position undefined: correlator profile sums to zero")
    return float(np.sum(profile.sites * profile.values) / total)


@dataclass(frozen=True)
class SymmetryReport:
    """Worst-case violations of the two lattice relations over a grid.

    mirror_defect: max |C(x, y, t) - C(N+1-x, N+1-y, t - period)|
    time_reversal_defect: max |C(x, y, t) - C(x, y, period - t)|
    """

    mirror_defect: float
    time_reversal_defect: float
    period: float


def check_symmetries(spec, state, ys=None, times=None, period=None):
    """Measure mirror and time-reversal defects of the OTOC.

    ``state=None`` probes the maximally mixed average (Wick engine);
    otherwise an X/Sector state average (sector engine).  The mirror
    relation holds exactly for the perfect-transfer chain whenever the
    average is reflection symmetric (use ``period = 2 tau`` for the full
    revival of stationary averages) or the probe site sits at the chain
    center (``period = tau``); plain time reversal additionally requires
    a symmetric stationary average, and correlated initial states break
    it.  Away from the perfect-transfer profile neither relation is
    expected to hold.
    """
    n = spec.n_sites
    tau = spec.transfer_period()
    if period is None:
        period = 2.0 * tau if state is None else tau
    if ys is None:
        ys = [max(1, (n + 1) // 2)]
    if times is None:
        times = np.linspace(0.15, 0.85, 5) * period
    es = eigensystem(spec)

    if state is None:
        def profile(y, t):
            return infinite_temperature_profile(spec, y, t, es=es).values
    else:
        sector = _as_sector_state(state)

        def profile(y, t):
            return otoc_profile(spec, sector, y, t, es=es).values

    mirror = 0.0
    reversal = 0.0
    for y in ys:
        _check_sites(n, y, y)
        for t in np.atleast_1d(times):
            base = profile(y, float(t))
            mirrored = profile(n + 1 - y, float(t) - period)[::-1]
            reversed_ = profile(y, period - float(t))
            mirror = max(mirror, float(np.max(np.abs(base - mirrored))))
            reversal = max(reversal, float(np.max(np.abs(base - reversed_))))
    return SymmetryReport(
        mirror_defect=mirror, time_reversal_defect=reversal, period=float(period)
    )


def front_speed(
    spec,
    engine="wick",
    y=None,
    threshold=0.05,
    state=None,
    t_max=None,
    n_times=400,
    fit_start=4,
    fit_stop=None,
):
    """Ballistic front speed from threshold first-crossing times.

    For each site beyond the probe ``y``, records the first time
    ``C(x, y, t)`` exceeds ``threshold`` on a uniform grid, then fits
    site against crossing time by least squares over the window
    ``y + fit_start .. fit_stop`` (default: just under half the
    remaining chain, where the front of the staggered-coupling chain is
    still linear).  Returns the slope in sites per unit time.
    """
    n = spec.n_sites
    if threshold <= 0:
        raise ValueError(f"threshold must be positive, got {threshold}")
    if y is None:
        y = max(1, n // 2)
    _check_sites(n, y, y)
    if engine not in ("wick", "sector"):
        raise ValueError(f"unknown front-speed engine {engine!r}")
    if engine == "sector" and state is None:
        raise ValueError("sector engine needs an initial state")
    if t_max is None:
        t_max = 0.5 * spec.transfer_period()
    if fit_stop is None:
        fit_stop = y + max(10, int(0.45 * (n - y)))
    es = eigensystem(spec)

    times = np.linspace(0.0, t_max, n_times)
    first_crossing = np.full(n, np.nan)
    for t in times:
        if engine == "wick":
            values = infinite_temperature_profile(spec, y, float(t), es=es).values
        else:
            values = otoc_profile(spec, _as_sector_state(state), y, float(t), es=es).values
        fresh = (values > threshold) & np.isnan(first_crossing)
        first_crossing[fresh] = t

    sites = np.arange(1, n + 1)
    window = (sites > y + fit_start) & (sites <= fit_stop) & ~np.isnan(first_crossing)
    if np.count_nonzero(window) < 3:
        raise RuntimeError(
            "too few threshold crossings inside the fit window for a front fit"
        )
    slope = np.polyfit(first_crossing[window], sites[window], 1)[0]
    return float(slope)

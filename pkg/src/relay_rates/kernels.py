"""Hot numeric kernels with a numba path and a pure-numpy fallback.

The backend is chosen once at import time from ``RELAY_RATES_BACKEND``
(``numba`` or ``numpy``; default ``numba`` when it is importable). Both
implementations of every loop kernel stay importable as ``*_numba`` /
``*_numpy`` so tests and the benchmark can compare them directly.

Scalar building blocks (band terms, the two-cut combination, the
triangle max-min) are written once with numpy ufuncs so the same function
object works elementwise on arrays and compiles under ``njit``.
"""

from __future__ import annotations

import math
import os
import types

import numpy as np

# the bundled TBB is too old for numba; pick a layer that always works
os.environ.setdefault("NUMBA_THREADING_LAYER", "workqueue")

try:
    import numba

    HAVE_NUMBA = True
except ImportError:  # pragma: no cover - numba is a declared dependency
    numba = None
    HAVE_NUMBA = False

_requested = os.environ.get("RELAY_RATES_BACKEND", "numba").strip().lower()
if _requested not in ("numba", "numpy"):
    raise ImportError(f"RELAY_RATES_BACKEND must be 'numba' or 'numpy', got {_requested!r}")
BACKEND = "numba" if (_requested == "numba" and HAVE_NUMBA) else "numpy"

TIE_TOL = 1e-12
INV_2LN2 = 0.5 / math.log(2.0)


# ---------------------------------------------------------------------------
# scalar / elementwise building blocks


def cap(x):
    return np.log1p(x) * INV_2LN2


def band_terms(M, Ps, Pr, ps_af, pr_af):
    """Per-band rate terms of one superposition band.

    Returns ``(af, bc_df, mac_df)``: the AF message rate, the DF rate the
    relays can decode on top of the AF layer, and the DF rate the
    destination decodes first (AF layer treated as noise). All per unit
    band fraction.
    """
    a = ps_af
    r = pr_af
    d = np.maximum(Ps - a, 0.0)
    q = np.maximum(Pr - r, 0.0)
    mr = M * r
    den_af = mr + a + 1.0
    m2ra = M * M * r * a
    af = cap(m2ra / den_af)
    bc = cap(d / (a + 1.0))
    mac = cap(M * M * q * (a + 1.0) / (m2ra + den_af))
    return af, bc, mac


def eq25_value(a1, a2, b1, b2, af1, bc1, mac1, af2, bc2, mac2, c_bc, c_mac):
    """AF sum plus the min of the two DF cuts (``c_bc = C(Ps)``, ``c_mac = C(M^2 Pr)``)."""
    return a1 * af1 + a2 * af2 + np.minimum(
        a1 * bc1 + a2 * bc2 + b1 * c_bc, a1 * mac1 + a2 * mac2 + b2 * c_mac
    )


def source_power(s, Ps):
    """Map a capacity coordinate ``s`` in [0, 1] to AF source power (uniform in ``C(ps_af)``)."""
    return np.expm1(s * np.log1p(Ps))


def relay_power(t, M, Pr):
    """Map ``t`` in [0, 1] to AF relay power (uniform in ``C(M^2 pr_af)``)."""
    m2 = M * M
    return np.expm1(t * np.log1p(m2 * Pr)) / m2


def source_coord(ps_af, Ps):
    return np.log1p(ps_af) / np.log1p(Ps)


def relay_coord(pr_af, M, Pr):
    m2 = M * M
    return np.log1p(m2 * pr_af) / np.log1p(m2 * Pr)


def triangle_maxmin(f1a, f1b, f1c, f2a, f2b, f2c, sa, sb, sc):
    """Maximize ``min(f1, f2)`` over a triangle where both are affine.

    Inputs are the two functions at the three vertices and a per-vertex
    "superposition mass" used to break ties (smaller wins). The optimum
    is at a vertex or where ``f1 = f2`` crosses an edge. Returns
    ``(value, wa, wb, wc, mass)`` with barycentric weights.
    """
    best = -np.inf
    bw = (0.0, 0.0, 0.0)
    bs = np.inf
    f1 = (f1a, f1b, f1c)
    f2 = (f2a, f2b, f2c)
    sv = (sa, sb, sc)
    # pass 1: value
    for k in range(3):
        v = min(f1[k], f2[k])
        if v > best:
            best = v
    for i in range(3):
        for j in range(i + 1, 3):
            di = f1[i] - f2[i]
            dj = f1[j] - f2[j]
            if di * dj < 0.0:
                t = di / (di - dj)
                v = f1[i] + t * (f1[j] - f1[i])
                if v > best:
                    best = v
    # pass 2: least superposition mass among near-ties, first in order
    for k in range(3):
        v = min(f1[k], f2[k])
        if v >= best - TIE_TOL and sv[k] < bs - TIE_TOL:
            bs = sv[k]
            w = [0.0, 0.0, 0.0]
            w[k] = 1.0
            bw = (w[0], w[1], w[2])
    for i in range(3):
        for j in range(i + 1, 3):
            di = f1[i] - f2[i]
            dj = f1[j] - f2[j]
            if di * dj < 0.0:
                t = di / (di - dj)
                v = f1[i] + t * (f1[j] - f1[i])
                s = (1.0 - t) * sv[i] + t * sv[j]
                if v >= best - TIE_TOL and s < bs - TIE_TOL:
                    bs = s
                    w = [0.0, 0.0, 0.0]
                    w[i] = 1.0 - t
                    w[j] = t
                    bw = (w[0], w[1], w[2])
    return best, bw[0], bw[1], bw[2], bs


def _triangle_maxmin_numpy(f1, f2, sv):
    """Vectorized triangle max-min. ``f1``, ``f2``: (N, 3); ``sv``: (3,) or (N, 3)."""
    f1 = np.asarray(f1, dtype=float)
    f2 = np.asarray(f2, dtype=float)
    n = f1.shape[0]
    sv = np.broadcast_to(np.asarray(sv, dtype=float), (n, 3))
    vals = np.full((n, 6), -np.inf)
    mass = np.full((n, 6), np.inf)
    weights = np.zeros((n, 6, 3))
    for k in range(3):
        vals[:, k] = np.minimum(f1[:, k], f2[:, k])
        mass[:, k] = sv[:, k]
        weights[:, k, k] = 1.0
    col = 3
    for i in range(3):
        for j in range(i + 1, 3):
            di = f1[:, i] - f2[:, i]
            dj = f1[:, j] - f2[:, j]
            ok = di * dj < 0.0
            with np.errstate(divide="ignore", invalid="ignore"):
                t = np.where(ok, di / np.where(ok, di - dj, 1.0), 0.0)
            v = f1[:, i] + t * (f1[:, j] - f1[:, i])
            vals[:, col] = np.where(ok, v, -np.inf)
            mass[:, col] = np.where(ok, (1.0 - t) * sv[:, i] + t * sv[:, j], np.inf)
            weights[:, col, i] = 1.0 - t
            weights[:, col, j] = t
            col += 1
    best = vals.max(axis=1)
    pick = _first_min_mass(vals, mass, best)
    rows = np.arange(n)
    return best, weights[rows, pick], mass[rows, pick]


def _first_min_mass(vals, mass, best):
    """Index replicating the sequential rule: scan in order, accept a
    near-tie only if its mass is smaller than the running mass by > tol."""
    n, k = vals.shape
    pick = np.zeros(n, dtype=np.int64)
    run = np.full(n, np.inf)
    for c in range(k):
        take = (vals[:, c] >= best - TIE_TOL) & (mass[:, c] < run - TIE_TOL)
        pick = np.where(take, c, pick)
        run = np.where(take, mass[:, c], run)
    return pick


# ---------------------------------------------------------------------------
# Pareto pruning and exact pair search over a pool of candidate bands


def pareto_front(u, v):
    """Indices of bands not dominated in (u, v); stable, deterministic order."""
    order = np.argsort(-u, kind="mergesort")
    keep = np.empty(order.shape[0], dtype=np.int64)
    n = 0
    vmax = -np.inf
    for k in range(order.shape[0]):
        idx = order[k]
        if v[idx] > vmax:
            keep[n] = idx
            n += 1
            vmax = v[idx]
    return keep[:n]


def best_pair_py(u, v, front, A, B, g):
    """Best two-band allocation over the candidate pool.

    Each band contributes ``(u, v)`` per unit superposition fraction to the
    (BC, MAC) cut on top of the all-DF baseline ``(A, B)``; the total
    superposition fraction is at most ``g``. Returns
    ``(value, i, j, w_i, w_j)`` with the alpha fractions ``g * w``.
    ``i = j = -1`` means the pure-DF vertex won.
    """
    best = min(A, B)
    n = front.shape[0]
    for a in range(n):
        i = front[a]
        for b in range(a, n):
            j = front[b]
            val, w0, w1, w2, s = triangle_maxmin(
                A, A + g * u[i], A + g * u[j], B, B + g * v[i], B + g * v[j], 0.0, g, g
            )
            if val > best:
                best = val
    bi = -1
    bj = -1
    bw1 = 0.0
    bw2 = 0.0
    bs = 0.0 if min(A, B) >= best - TIE_TOL else np.inf
    for a in range(n):
        i = front[a]
        for b in range(a, n):
            j = front[b]
            val, w0, w1, w2, s = triangle_maxmin(
                A, A + g * u[i], A + g * u[j], B, B + g * v[i], B + g * v[j], 0.0, g, g
            )
            if val >= best - TIE_TOL and s < bs - TIE_TOL:
                bs = s
                bi = i
                bj = j
                bw1 = w1
                bw2 = w2
    return best, bi, bj, bw1, bw2


def best_pair_numpy(u, v, front, A, B, g):
    n = front.shape[0]
    ia, ib = np.triu_indices(n)
    i = front[ia]
    j = front[ib]
    m = i.shape[0]
    f1 = np.column_stack([np.full(m, A), A + g * u[i], A + g * u[j]])
    f2 = np.column_stack([np.full(m, B), B + g * v[i], B + g * v[j]])
    val, w, mass = _triangle_maxmin_numpy(f1, f2, np.array([0.0, g, g]))
    base = min(A, B)
    best = max(base, val.max()) if m else base
    bs = 0.0 if base >= best - TIE_TOL else np.inf
    take = -1
    for c in np.flatnonzero(val >= best - TIE_TOL):
        if mass[c] < bs - TIE_TOL:
            bs = mass[c]
            take = c
    if take < 0:
        return best, -1, -1, 0.0, 0.0
    return best, int(i[take]), int(j[take]), float(w[take, 1]), float(w[take, 2])


def pair_value(M, Ps, Pr, rho, s1, t1, s2, t2):
    """Exact inner optimum for two bands given in capacity coordinates.

    Coordinates are clipped to [0, 1]. Returns ``(value, w1, w2)``.
    """
    c1 = cap(Ps)
    c2 = cap(M * M * Pr)
    g = min(rho, 1.0)
    A = rho * c1
    B = c2
    a1 = source_power(min(max(s1, 0.0), 1.0), Ps)
    r1 = relay_power(min(max(t1, 0.0), 1.0), M, Pr)
    a2 = source_power(min(max(s2, 0.0), 1.0), Ps)
    r2 = relay_power(min(max(t2, 0.0), 1.0), M, Pr)
    af1, bc1, mac1 = band_terms(M, Ps, Pr, a1, r1)
    af2, bc2, mac2 = band_terms(M, Ps, Pr, a2, r2)
    u1 = af1 + bc1 - c1
    v1 = af1 + mac1 - c2
    u2 = af2 + bc2 - c1
    v2 = af2 + mac2 - c2
    val, w0, w1, w2, mass = triangle_maxmin(
        A, A + g * u1, A + g * u2, B, B + g * v1, B + g * v2, 0.0, g, g
    )
    return val, w1, w2


# ---------------------------------------------------------------------------
# batched single-band triangle solve (half-duplex patterns)


def triangle_batch_py(f1, f2, sv):
    n = f1.shape[0]
    val = np.empty(n)
    w = np.empty((n, 3))
    mass = np.empty(n)
    for k in range(n):
        r = triangle_maxmin(f1[k, 0], f1[k, 1], f1[k, 2], f2[k, 0], f2[k, 1], f2[k, 2],
                            sv[0], sv[1], sv[2])
        val[k] = r[0]
        w[k, 0] = r[1]
        w[k, 1] = r[2]
        w[k, 2] = r[3]
        mass[k] = r[4]
    return val, w, mass


def triangle_batch_numpy(f1, f2, sv):
    return _triangle_maxmin_numpy(f1, f2, sv)


# ---------------------------------------------------------------------------
# coarse CADF value for many channel instances at once (time-sharing search)


def witness_powers(M, Ps, Pr, rho):
    """AF source/relay powers of the single-band allocation that provably
    beats RF (requires ``Ps > 1``).

    For ``rho <= 1`` the source spends ``Ps^rho - 1`` on AF and the relay
    amplifies only. For ``rho > 1`` the source is all-AF and the relay
    splits its power so that the relayed DF layer exactly matches what the
    extra BC dimensions carry. Returns ``(-1, -1)`` when ``Ps <= 1`` and
    ``(Ps, 0)`` when the MAC hop cannot keep up with even the extra BC
    dimensions (all-DF is then capacity achieving).
    """
    if Ps <= 1.0:
        return -1.0, -1.0
    if rho <= 1.0:
        return Ps**rho - 1.0, Pr
    k = math.expm1((rho - 1.0) * math.log1p(Ps))
    m2 = M * M
    if k >= m2 * Pr:
        return Ps, 0.0
    # P' solves the equalization; the relay's actual AF power is P'(Ps+1)/Ps
    p_prime = (m2 * Pr - k) * Ps / (m2 * (Ps + 1.0) + k * m2 * Ps + k * M)
    return Ps, min(p_prime * (Ps + 1.0) / Ps, Pr)


def cadf_batch_py(M, Ps, Pr, rho, s_nodes, t_nodes):
    n = Ps.shape[0]
    ks = s_nodes.shape[0]
    kt = t_nodes.shape[0]
    nb = ks * kt + 2
    out = np.empty(n)
    for k in numba_prange(n):
        ps = Ps[k]
        pr = Pr[k]
        rh = rho[k]
        c1 = cap(ps)
        c2 = cap(M * M * pr)
        g = min(rh, 1.0)
        A = rh * c1
        B = c2
        u = np.empty(nb)
        v = np.empty(nb)
        m = 0
        for a_ in range(ks):
            a = source_power(s_nodes[a_], ps)
            for b_ in range(kt):
                r = relay_power(t_nodes[b_], M, pr)
                af, bc, mac = band_terms(M, ps, pr, a, r)
                u[m] = af + bc - c1
                v[m] = af + mac - c2
                m += 1
        # pure AF and the RF-beating witness
        af, bc, mac = band_terms(M, ps, pr, ps, pr)
        u[m] = af + bc - c1
        v[m] = af + mac - c2
        m += 1
        wa, wr = witness_powers(M, ps, pr, rh)
        if wa >= 0.0:
            af, bc, mac = band_terms(M, ps, pr, wa, wr)
            u[m] = af + bc - c1
            v[m] = af + mac - c2
            m += 1
        uu = u[:m]
        vv = v[:m]
        front = pareto_front(uu, vv)
        out[k] = best_pair_py(uu, vv, front, A, B, g)[0]
    return out


def cadf_batch_numpy(M, Ps, Pr, rho, s_nodes, t_nodes):
    Ps = np.asarray(Ps, dtype=float)
    Pr = np.asarray(Pr, dtype=float)
    rho = np.asarray(rho, dtype=float)
    S, T = np.meshgrid(s_nodes, t_nodes, indexing="ij")
    S = S.ravel()
    T = T.ravel()
    out = np.empty(Ps.shape[0])
    for k in range(Ps.shape[0]):
        ps, pr, rh = Ps[k], Pr[k], rho[k]
        a = np.append(source_power(S, ps), ps)
        r = np.append(relay_power(T, M, pr), pr)
        wa, wr = witness_powers(M, ps, pr, rh)
        if wa >= 0.0:
            a = np.append(a, wa)
            r = np.append(r, wr)
        af, bc, mac = band_terms(M, ps, pr, a, r)
        c1 = cap(ps)
        c2 = cap(M * M * pr)
        u = af + bc - c1
        v = af + mac - c2
        front = pareto_front_numpy(u, v)
        out[k] = best_pair_numpy(u, v, front, rh * c1, c2, min(rh, 1.0))[0]
    return out


def pareto_front_numpy(u, v):
    order = np.argsort(-u, kind="mergesort")
    vs = v[order]
    prev = np.concatenate(([-np.inf], np.maximum.accumulate(vs)[:-1]))
    return order[vs > prev]


# ---------------------------------------------------------------------------
# exhaustive lattice maximization (validation oracle)


def lattice_max_py(af, bc, mac, a1, a2, b1, b2, c_bc, c_mac):
    """Max of the two-band objective over every (band, band, alpha) lattice point.

    ``af``/``bc``/``mac`` hold band terms for the power-split lattice;
    ``a1``..``b2`` enumerate feasible bandwidth points. Returns
    ``(value, i, j, k)``.
    """
    nbands = af.shape[0]
    nal = a1.shape[0]
    best = -np.inf
    bi = 0
    bj = 0
    bk = 0
    for i in range(nbands):
        for j in range(nbands):
            for k in range(nal):
                val = eq25_value(a1[k], a2[k], b1[k], b2[k], af[i], bc[i], mac[i],
                                 af[j], bc[j], mac[j], c_bc, c_mac)
                if val > best:
                    best = val
                    bi = i
                    bj = j
                    bk = k
    return best, bi, bj, bk


def lattice_max_numpy(af, bc, mac, a1, a2, b1, b2, c_bc, c_mac):
    best = -np.inf
    arg = (0, 0, 0)
    A1 = a1[None, :]
    A2 = a2[None, :]
    B1 = b1[None, :]
    B2 = b2[None, :]
    for i in range(af.shape[0]):
        val = eq25_value(A1, A2, B1, B2, af[i], bc[i], mac[i],
                         af[:, None], bc[:, None], mac[:, None], c_bc, c_mac)
        flat = int(np.argmax(val))
        if val.flat[flat] > best:
            best = float(val.flat[flat])
            j, k = np.unravel_index(flat, val.shape)
            arg = (i, int(j), int(k))
    return best, arg[0], arg[1], arg[2]


# ---------------------------------------------------------------------------
# backend wiring
#
# Jitted copies are built from the same code objects in a private globals
# namespace, so inside compiled code every helper resolves to its compiled
# twin while the module-level names stay plain numpy.

numba_prange = range

_JITTED = (
    "cap",
    "band_terms",
    "eq25_value",
    "source_power",
    "relay_power",
    "triangle_maxmin",
    "pair_value",
    "witness_powers",
    "pareto_front",
    "best_pair_py",
    "triangle_batch_py",
    "lattice_max_py",
    "cadf_batch_py",
)


def _build_numba():
    ns = dict(globals())
    ns["numba_prange"] = numba.prange
    out = {}
    for name in _JITTED:
        f = globals()[name]
        clone = types.FunctionType(f.__code__, ns, f.__name__, f.__defaults__, f.__closure__)
        clone.__qualname__ = f.__qualname__
        opts = dict(cache=True, nogil=True)
        if name == "cadf_batch_py":
            opts["parallel"] = True
        ns[name] = out[name] = numba.njit(**opts)(clone)
    return out


if HAVE_NUMBA:
    _nb = _build_numba()
    pareto_front_numba = _nb["pareto_front"]
    best_pair_numba = _nb["best_pair_py"]
    triangle_batch_numba = _nb["triangle_batch_py"]
    lattice_max_numba = _nb["lattice_max_py"]
    cadf_batch_numba = _nb["cadf_batch_py"]
    band_terms_numba = _nb["band_terms"]
    pair_value_numba = _nb["pair_value"]
    eq25_value_numba = _nb["eq25_value"]
else:  # pragma: no cover
    pareto_front_numba = best_pair_numba = triangle_batch_numba = None
    lattice_max_numba = cadf_batch_numba = band_terms_numba = eq25_value_numba = None
    pair_value_numba = None

pair_value_py = pair_value

pareto_front_py = pareto_front

if BACKEND == "numba":
    pareto_front = pareto_front_numba
    best_pair = best_pair_numba
    triangle_batch = triangle_batch_numba
    cadf_batch = cadf_batch_numba
    lattice_max = lattice_max_numba
    pair_value = pair_value_numba
else:
    pareto_front = pareto_front_numpy
    best_pair = best_pair_numpy
    triangle_batch = triangle_batch_numpy
    cadf_batch = cadf_batch_numpy
    lattice_max = lattice_max_numpy

"""Root counting on the torus or a subinterval.

Three counters live here:

* ``count_certified`` -- adaptive subdivision with mean-value-theorem
  exclusion using the coefficient bounds on |p'| and |p''|.
* ``count_fast`` -- cyclic sign changes on an FFT grid (a lower bound).
* ``count_screened`` / ``screened_counts`` -- grid values of p, p', p'' plus
  cubic Hermite error bounds decide almost every grid cell; the rest are
  subdivided.  This is the counter used by Monte Carlo sweeps.

Sign convention: an exact zero is read as +0 everywhere.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .trigpoly import (
    TWO_PI,
    TrigPoly,
    batch_eval_grid,
    coefficient_bound,
    complex_coeffs,
    derivative_coeffs,
    eval_grid,
    evaluate,
    evaluate_derivatives,
    horner_many,
    sup_norm_bound,
)

MIN_WIDTH = 2.0**-40 * TWO_PI


@dataclass
class CertifiedCount:
    count: int
    certified: bool
    roots: list[tuple[float, float]] = field(default_factory=list)
    ambiguous: list[tuple[float, float]] = field(default_factory=list)
    evals_used: int = 0

    def to_dict(self) -> dict:
        return {
            "count": int(self.count),
            "certified": bool(self.certified),
            "roots": [[float(lo), float(hi)] for lo, hi in self.roots],
            "ambiguous": [[float(lo), float(hi)] for lo, hi in self.ambiguous],
            "evals_used": int(self.evals_used),
        }


def parse_domain(domain):
    """Return (is_torus, lo, hi) for None/'torus', 'half', 'negative' or (lo, hi)."""
    if domain is None or domain == "torus":
        return True, -math.pi, math.pi
    if domain == "half":
        return False, 0.0, math.pi
    if domain == "negative":
        return False, -math.pi, 0.0
    lo, hi = (float(v) for v in domain)
    if not (math.isfinite(lo) and math.isfinite(hi)) or not lo < hi:
        raise ValueError(f"empty or invalid domain ({lo}, {hi})")
    if hi - lo > TWO_PI:
        raise ValueError("a subinterval of the torus has length at most 2*pi")
    return False, lo, hi


def _positive(v):
    return np.asarray(v) >= 0.0


def special_values(a, b) -> tuple[np.ndarray, np.ndarray]:
    """P(0) and P(pi) = P(-pi) for coefficient rows, correctly rounded.

    At these angles cos kx = +-1 and sin kx = 0, so the values are plain
    signed sums of the a_k.  Summing them exactly makes a true zero (which
    discrete laws such as Rademacher produce with positive probability)
    come out as exactly 0.0, read as +0 by every counter.
    """
    a = np.atleast_2d(np.asarray(a, dtype=np.float64))
    n = a.shape[1]
    alt = np.where(np.arange(1, n + 1) % 2 == 0, 1.0, -1.0)
    at0 = np.array([math.fsum(row) for row in a]) / math.sqrt(n)
    atpi = np.array([math.fsum(row) for row in a * alt]) / math.sqrt(n)
    return at0, atpi


def rational_zeros(a, b, angles) -> np.ndarray:
    """Exact zero test at angles pi * r for integer coefficient rows.

    ``angles`` holds fractions r whose denominator divides 4 or 6.  There
    2 cos kx and 2 sin kx are integers or integer multiples of a single
    surd (sqrt 2 or sqrt 3), so sqrt(n) P(pi r) = (A + B sqrt d) / 2 with
    integers A, B, and it vanishes exactly when A = B = 0.  Returns a
    boolean array of shape (rows, len(angles)).
    """
    a = np.atleast_2d(np.rint(a).astype(np.int64))
    b = np.atleast_2d(np.rint(b).astype(np.int64))
    k = np.arange(1, a.shape[1] + 1)
    out = np.zeros((a.shape[0], len(angles)), dtype=bool)
    for j, r in enumerate(angles):
        r = Fraction(r)
        if 6 % r.denominator and 4 % r.denominator:
            raise ValueError(f"no exact evaluation at pi*{r}")
        surd = math.sqrt(3.0) if 6 % r.denominator == 0 else math.sqrt(2.0)
        ang = math.pi * ((k * r.numerator) % (2 * r.denominator)) / r.denominator
        parts = []
        for f in (np.cos(ang), np.sin(ang)):
            f2 = 2.0 * f
            is_int = np.abs(f2 - np.rint(f2)) < 1e-9
            parts.append((np.where(is_int, np.rint(f2), 0).astype(np.int64),
                          np.where(is_int, 0, np.rint(f2 / surd)).astype(np.int64)))
        (rc, sc), (rs, ss) = parts
        out[:, j] = (a @ rc + b @ rs == 0) & (a @ sc + b @ ss == 0)
    return out


def _grid_rational_zeros(a, b, K: int, V0: np.ndarray) -> None:
    """Set V0 to exactly 0.0 at grid points where an integer-coefficient row
    vanishes at a multiple of pi/6 or pi/4 (in place)."""
    ints = np.nonzero(np.all(a == np.rint(a), axis=1) & np.all(b == np.rint(b), axis=1))[0]
    if not ints.size:
        return
    idx = [i for i in range(K) if (12 * i) % K == 0 or (8 * i) % K == 0]
    z = rational_zeros(a[ints], b[ints], [Fraction(2 * i, K) - 1 for i in idx])
    sub = V0[ints][:, idx]
    sub[z] = 0.0
    V0[np.ix_(ints, idx)] = sub


def _trusted_sign(v, tol):
    """Signs below the evaluation error floor are unreliable, except exact
    zeros, which only arise from the exactly evaluated special angles."""
    v = np.asarray(v)
    return (np.abs(v) > tol) | (v == 0.0)


def _pin_special(p: TrigPoly, x: np.ndarray, vals: np.ndarray):
    """Values at x in {0, +-pi} replaced by their exactly summed versions,
    and the mask of replaced entries."""
    zero, edge = x == 0.0, np.abs(x) == math.pi
    if np.any(zero) or np.any(edge):
        at0, atpi = special_values(p.cos_coeffs, p.sin_coeffs)
        vals = np.where(zero, at0[0], np.where(edge, atpi[0], vals))
    return vals, zero | edge


def count_certified(p: TrigPoly, domain=None, budget: int | None = None,
                    min_width: float = MIN_WIDTH) -> CertifiedCount:
    """Certified count of sign-change roots of p on ``domain``.

    A cell of width h with midpoint value v is root free when
    |v| > sup|p'| h/2.  When the endpoint signs differ and
    |p'(mid)| > sup|p''| h/2, p is monotone on the cell and the cell holds
    exactly one root.  Same-sign monotone cells are also root free.  Endpoint
    signs are only relied on when the value clears the rounding floor (or is
    one of the exactly summed values at 0 and pi).  Anything else is halved;
    cells narrower than ``min_width`` are reported ambiguous.
    """
    n = p.degree
    torus, lo, hi = parse_domain(domain)
    if budget is None:
        budget = 4096 * n
    if budget < 16 * n:
        raise ValueError("budget must be at least 16n evaluations")
    L1 = sup_norm_bound(p, 1)
    L2 = sup_norm_bound(p, 2)
    tol0 = 1e-13 * coefficient_bound(p, 0)
    tol1 = 1e-13 * L1

    n0 = max(8, 4 * n)
    edges = lo + (hi - lo) * np.arange(n0 + 1) / n0
    if torus:
        vals, exact = _pin_special(p, edges[:-1], evaluate_derivatives(p, edges[:-1], (0,))[0])
        vals, exact = np.append(vals, vals[0]), np.append(exact, exact[0])
        evals = n0
    else:
        vals, exact = _pin_special(p, edges, evaluate_derivatives(p, edges, (0,))[0])
        evals = n0 + 1
    trust = _trusted_sign(vals, tol0) | exact

    clo, chi = edges[:-1], edges[1:]
    flo, fhi = vals[:-1], vals[1:]
    tlo, thi = trust[:-1], trust[1:]
    brackets: list[tuple[float, float]] = []
    ambiguous = []  # (lo, hi, p(lo), p(hi), trusted lo, trusted hi)
    exhausted = False
    while clo.size:
        if evals + 2 * clo.size > budget:
            exhausted = True
            ambiguous.extend(zip(clo.tolist(), chi.tolist(), flo.tolist(), fhi.tolist(),
                                 tlo.tolist(), thi.tolist()))
            break
        mid = 0.5 * (clo + chi)
        fm, dm = evaluate_derivatives(p, mid, (0, 1))
        evals += 2 * clo.size
        h = chi - clo
        change = _positive(flo) != _positive(fhi)
        both = tlo & thi
        root_free = np.abs(fm) > L1 * h / 2 + tol0
        mono = np.abs(dm) > L2 * h / 2 + tol1
        clear = ~change & (root_free | (mono & both))
        one = change & mono & both
        if np.any(one):
            brackets.extend(zip(clo[one].tolist(), chi[one].tolist()))
        split = ~(clear | one)
        tiny = split & (h / 2 < min_width)
        if np.any(tiny):
            ambiguous.extend(zip(clo[tiny].tolist(), chi[tiny].tolist(), flo[tiny].tolist(),
                                 fhi[tiny].tolist(), tlo[tiny].tolist(), thi[tiny].tolist()))
            split &= ~tiny
        m = mid[split]
        tm = _trusted_sign(fm[split], tol0)
        clo, chi = np.concatenate([clo[split], m]), np.concatenate([m, chi[split]])
        f_m = fm[split]
        flo, fhi = np.concatenate([flo[split], f_m]), np.concatenate([f_m, fhi[split]])
        tlo, thi = np.concatenate([tlo[split], tm]), np.concatenate([tm, thi[split]])

    brackets.sort()
    ambiguous.sort()
    # Runs of touching unresolved cells are merged.  A run whose end values
    # are trustworthy and on which p' is certified nonzero holds exactly the
    # sign change between its ends (this resolves roots sitting on a cell
    # edge, where the computed sign is noise); any other run is ambiguous and
    # contributes at most one sign change to the best-effort count.
    runs = []
    for lo_, hi_, f_lo, f_hi, t_lo, t_hi in ambiguous:
        if runs and runs[-1][1] == lo_:
            runs[-1][1], runs[-1][3], runs[-1][5] = hi_, f_hi, t_hi
        else:
            runs.append([lo_, hi_, f_lo, f_hi, t_lo, t_hi])
    if torus and len(runs) > 1 and runs[0][0] == lo and runs[-1][1] == hi:
        first = runs.pop(0)
        runs[-1][1] = first[1] + TWO_PI
        runs[-1][3], runs[-1][5] = first[3], first[5]
    amb = []
    count = len(brackets)
    for lo_, hi_, f_lo, f_hi, t_lo, t_hi in runs:
        changed = bool(_positive(f_lo) != _positive(f_hi))
        if t_lo and t_hi and not exhausted:
            c = 0.5 * (lo_ + hi_)
            d = evaluate_derivatives(p, [c], (1,))[0][0]
            evals += 1
            if abs(d) > L2 * (hi_ - lo_) / 2 + tol1:
                if changed:
                    brackets.append((lo_, hi_) if hi_ <= hi else (lo_ - TWO_PI, hi_ - TWO_PI))
                count += changed
                continue
        amb.append((lo_, hi_) if hi_ <= hi else (lo_ - TWO_PI, hi_ - TWO_PI))
        count += changed
    brackets.sort()
    return CertifiedCount(int(count), not amb, brackets, amb, evals)


def _sign_changes(vals: np.ndarray, cyclic: bool = True) -> np.ndarray:
    s = vals >= 0.0
    if cyclic:
        return np.sum(s != np.roll(s, 1, axis=-1), axis=-1)
    return np.sum(s[..., 1:] != s[..., :-1], axis=-1)


def count_fast(p: TrigPoly, K: int | None = None) -> int:
    """Cyclic sign changes of p on a K-point grid; never exceeds the true count."""
    n = p.degree
    K = 8 * n if K is None else int(K)
    if K < 8 * n:
        raise ValueError(f"count_fast needs K >= 8n = {8 * n}")
    return int(_sign_changes(eval_grid(p, K)))


def refine_root(p: TrigPoly, bracket, tol: float = 1e-12) -> float:
    """Bisection to ``tol`` followed by one guarded Newton step."""
    lo, hi = (float(v) for v in bracket)
    if not lo < hi:
        raise ValueError("bracket must satisfy lo < hi")
    flo, fhi = evaluate(p, lo), evaluate(p, hi)
    if flo == 0.0:
        return lo
    if fhi == 0.0:
        return hi
    if (flo > 0) == (fhi > 0):
        raise ValueError(f"invalid bracket: p({lo})={flo}, p({hi})={fhi} have the same sign")
    while hi - lo > 0.25 * tol:
        mid = 0.5 * (lo + hi)
        if mid <= lo or mid >= hi:
            break
        fm = evaluate(p, mid)
        if fm == 0.0:
            return mid
        if (fm > 0) == (flo > 0):
            lo, flo = mid, fm
        else:
            hi = mid
    x = 0.5 * (lo + hi)
    fx, dx = evaluate_derivatives(p, [x], (0, 1))[:, 0]
    if dx != 0.0:
        xn = x - fx / dx
        if lo <= xn <= hi and abs(evaluate(p, xn)) < abs(evaluate(p, x)):
            return float(xn)
    return float(x)


def refine_roots(p: TrigPoly, brackets, tol: float = 1e-12) -> np.ndarray:
    """Vectorized bisection of many sign-change brackets at once."""
    br = np.asarray(brackets, dtype=np.float64).reshape(-1, 2)
    lo, hi = br[:, 0].copy(), br[:, 1].copy()
    if lo.size == 0:
        return lo
    if np.any(lo >= hi):
        raise ValueError("brackets must satisfy lo < hi")
    c = complex_coeffs(p)[None, :]
    pos_lo = _positive(horner_many(c, lo)[0])
    while True:
        width = hi - lo
        if np.all(width <= 0.25 * tol):
            break
        mid = 0.5 * (lo + hi)
        pos_mid = _positive(horner_many(c, mid)[0])
        same = pos_mid == pos_lo
        lo = np.where(same, mid, lo)
        hi = np.where(same, hi, mid)
        if np.all((hi - lo) >= width):
            break
    return 0.5 * (lo + hi)


# --------------------------------------------------------------------------
# Hermite-screened counting
# --------------------------------------------------------------------------

def _cubic_min(sign, f0, c1, c2, c3):
    """min over t in [0,1] of sign * (f0 + c1 t + c2 t^2 + c3 t^3)."""
    def H(t):
        return sign * (((c3 * t + c2) * t + c1) * t + f0)

    best = np.minimum(H(0.0), H(1.0))
    a, b, c = 3.0 * c3, 2.0 * c2, c1
    with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
        disc = b * b - 4.0 * a * c
        real = disc >= 0
        sq = np.sqrt(np.where(real, disc, 0.0))
        q = -0.5 * (b + np.where(b >= 0, sq, -sq))
        for r in (q / a, c / q):
            r = np.where(real & np.isfinite(r), r, 0.0)
            best = np.minimum(best, H(np.clip(r, 0.0, 1.0)))
    return best


def _hermite_mono(d0, d1, s0, s1, h, e_d):
    """(certified |p'| > 0 on the cell, sign of p') from the Hermite bound on p'."""
    sd = np.where(d0 >= 0, 1.0, -1.0)
    g1 = h * s0
    g2 = -3.0 * d0 - 2.0 * h * s0 + 3.0 * d1 - h * s1
    g3 = 2.0 * d0 + h * s0 - 2.0 * d1 + h * s1
    mono = ((d0 >= 0) == (d1 >= 0)) & (_cubic_min(sd, d0, g1, g2, g3) > e_d)
    return mono, sd


def _hermite_status(f0, f1, d0, d1, s0, s1, h, e_p, e_d, t0, t1):
    """Per-cell root count from endpoint data: 0, 1, or -1 (undecided).

    p is within e_p of its cubic Hermite interpolant on the cell, p' within
    e_d of the interpolant built from (p', p'').  The sign of an endpoint
    value is used only where t0 / t1 mark it as trustworthy.
    """
    sp = np.where(f0 >= 0, 1.0, -1.0)
    change = (f0 >= 0) != (f1 >= 0)
    trusted = t0 & t1
    c1 = h * d0
    c2 = -3.0 * f0 - 2.0 * h * d0 + 3.0 * f1 - h * d1
    c3 = 2.0 * f0 + h * d0 - 2.0 * f1 + h * d1
    no_root = ~change & (_cubic_min(sp, f0, c1, c2, c3) > e_p)
    mono, _ = _hermite_mono(d0, d1, s0, s1, h, e_d)
    status = np.full(f0.shape, -1, dtype=np.int64)
    status[no_root | (~change & mono & trusted)] = 0
    status[change & mono & trusted] = 1
    return status


def _complex_rows(a: np.ndarray, b: np.ndarray, orders=(0, 1, 2)) -> np.ndarray:
    """(n, len(orders), T) complex coefficients, normalization included."""
    n = a.shape[-1]
    rows = []
    for m in orders:
        da, db = derivative_coeffs(a, b, m)
        rows.append((da - 1j * db) / math.sqrt(n))
    return np.ascontiguousarray(np.stack(rows).transpose(2, 0, 1))


def _eval_rows(coef_t: np.ndarray, owner: np.ndarray, x: np.ndarray) -> np.ndarray:
    """Evaluate, at point x[i], the polynomial of trial owner[i]; returns (r, P)."""
    z = np.exp(1j * x)
    acc = np.zeros((coef_t.shape[1], x.size), dtype=np.complex128)
    for k in range(coef_t.shape[0] - 1, -1, -1):
        acc += coef_t[k][:, owner]
        acc *= z
    return acc.real


def screened_counts(a: np.ndarray, b: np.ndarray, K: int | None = None, domain=None,
                    subdiv: int = 8, min_width: float = MIN_WIDTH):
    """Certified counts for a batch of coefficient rows.

    Returns (counts, certified) arrays of length T.  ``domain`` is None/'torus',
    'half' ([0, pi]) or 'negative' ([-pi, 0)); K must be even and > pi n.
    """
    a = np.atleast_2d(a)
    b = np.atleast_2d(b)
    T, n = a.shape
    K = 12 * n if K is None else int(K)
    if K % 2 or K <= math.pi * n or K < 2 * n + 2:
        raise ValueError("screened counting needs an even K > pi*n")
    V0 = batch_eval_grid(a, b, K, 0)
    V0[:, K // 2], V0[:, 0] = special_values(a, b)
    _grid_rational_zeros(a, b, K, V0)
    V1 = batch_eval_grid(a, b, K, 1)
    V2 = batch_eval_grid(a, b, K, 2)
    h = TWO_PI / K

    k = np.arange(1, n + 1)
    U0 = (np.abs(a) + np.abs(b)).sum(axis=1) / math.sqrt(n)
    S0 = np.minimum(U0, np.abs(V0).max(axis=1) / (1.0 - math.pi * n / K))
    tol = 1e-11 * U0 + 1e-300
    M4 = np.minimum(S0 * float(n) ** 4, (k**4 * (np.abs(a) + np.abs(b))).sum(1) / math.sqrt(n))
    M5 = np.minimum(S0 * float(n) ** 5, (k**5 * (np.abs(a) + np.abs(b))).sum(1) / math.sqrt(n))

    if domain is None or domain == "torus":
        cells = np.arange(K)
    elif domain == "half":
        cells = np.arange(K // 2, K)
    elif domain == "negative":
        cells = np.arange(K // 2)
    else:
        raise ValueError("screened counting supports torus, half or negative domains")
    nxt = (cells + 1) % K

    # A grid value below the rounding floor has an unreliable sign.  That is
    # harmless when p is monotone in one direction across both neighbouring
    # cells (the two cells then hold one root between them whichever sign is
    # read), and the values at 0 and pi are exact.
    mono, sd = _hermite_mono(V1, np.roll(V1, -1, axis=1), V2, np.roll(V2, -1, axis=1), h,
                             (M5 * h**4 / 384.0 + n * tol)[:, None])
    # Only a lone unreliable point qualifies: the far ends of both cells
    # must carry reliable signs, or a run of noisy signs inside a monotone
    # stretch would count spurious changes.
    dirs = np.where(mono, sd, 0)
    vt = _trusted_sign(V0, tol[:, None])
    vt[:, [0, K // 2]] = True
    through = ((dirs != 0) & (dirs == np.roll(dirs, 1, axis=1))
               & np.roll(vt, 1, axis=1) & np.roll(vt, -1, axis=1))
    trust = vt | through
    e_p = (M4 * h**4 / 384.0 + tol)[:, None]
    e_d = (M5 * h**4 / 384.0 + n * tol)[:, None]
    status = _hermite_status(V0[:, cells], V0[:, nxt], V1[:, cells], V1[:, nxt], V2[:, cells], V2[:, nxt],
                             h, e_p, e_d, trust[:, cells], trust[:, nxt])
    counts = np.sum(status == 1, axis=1)
    certified = np.ones(T, dtype=bool)

    owner, cj = np.nonzero(status == -1)
    if owner.size:
        coef_t = _complex_rows(a, b)
        x0 = -math.pi + h * cells[cj]
        e0 = np.stack([V0[owner, cells[cj]], V1[owner, cells[cj]], V2[owner, cells[cj]]])
        e1 = np.stack([V0[owner, nxt[cj]], V1[owner, nxt[cj]], V2[owner, nxt[cj]]])
        t0, t1 = trust[owner, cells[cj]], trust[owner, nxt[cj]]
        v0, v1 = vt[owner, cells[cj]], vt[owner, nxt[cj]]
        # direction of the cells just outside each unresolved cell, and
        # whether their far ends carry reliable signs
        ldir, rdir = dirs[owner, (cells[cj] - 1) % K], dirs[owner, nxt[cj]]
        lfar, rfar = vt[owner, (cells[cj] - 1) % K], vt[owner, (nxt[cj] + 1) % K]
        width = h
        while owner.size:
            sub = width / subdiv
            if sub < min_width:
                certified[np.unique(owner)] = False
                # best effort: sign changes between reliable endpoints only
                np.add.at(counts, owner, ((e0[0] >= 0) != (e1[0] >= 0)) & t0 & t1)
                break
            t = np.arange(1, subdiv) * sub
            pts = (x0[:, None] + t[None, :]).reshape(-1)
            vals = _eval_rows(coef_t, np.repeat(owner, subdiv - 1), pts)
            vals = vals.reshape(3, owner.size, subdiv - 1)
            full = np.concatenate([e0[:, :, None], vals, e1[:, :, None]], axis=2)
            vv = np.concatenate([v0[:, None], _trusted_sign(vals[0], tol[owner][:, None]), v1[:, None]], axis=1)
            tr = np.concatenate([t0[:, None], vv[:, 1:-1], t1[:, None]], axis=1)
            lo_v, hi_v = full[:, :, :-1], full[:, :, 1:]
            e_p = (M4[owner] * sub**4 / 384.0 + tol[owner])[:, None]
            e_d = (M5[owner] * sub**4 / 384.0 + n * tol[owner])[:, None]
            mo, sdir = _hermite_mono(lo_v[1], hi_v[1], lo_v[2], hi_v[2], sub, e_d)
            dd = np.where(mo, sdir, 0)
            left = np.concatenate([ldir[:, None], dd[:, :-1]], axis=1)
            right = np.concatenate([dd[:, 1:], rdir[:, None]], axis=1)
            farl = np.concatenate([lfar[:, None], vv[:, :-2]], axis=1)
            farr = np.concatenate([vv[:, 2:], rfar[:, None]], axis=1)
            tl = tr[:, :-1] | ((dd != 0) & (dd == left) & farl & vv[:, 1:])
            tr_r = tr[:, 1:] | ((dd != 0) & (dd == right) & vv[:, :-1] & farr)
            st = _hermite_status(lo_v[0], hi_v[0], lo_v[1], hi_v[1], lo_v[2], hi_v[2], sub, e_p, e_d,
                                 tl, tr_r)
            np.add.at(counts, owner, np.sum(st == 1, axis=1))
            ci, si = np.nonzero(st == -1)
            owner = owner[ci]
            x0 = x0[ci] + si * sub
            e0 = lo_v[:, ci, si]
            e1 = hi_v[:, ci, si]
            t0, t1 = tl[ci, si], tr_r[ci, si]
            v0, v1 = vv[ci, si], vv[ci, si + 1]
            ldir, rdir = left[ci, si], right[ci, si]
            lfar, rfar = farl[ci, si], farr[ci, si]
            width = sub
    return counts, certified


def count_screened(p: TrigPoly, K: int | None = None, domain=None) -> tuple[int, bool]:
    c, ok = screened_counts(p.cos_coeffs[None, :], p.sin_coeffs[None, :], K, domain)
    return int(c[0]), bool(ok[0])


# --------------------------------------------------------------------------
# Small-set scanning: {x : |p(x)| <= level and |p'(x)| <= slope}
# --------------------------------------------------------------------------

CLEAR, FULL, WITNESS, UNKNOWN = 0, 1, 2, 3


class SmallSetScanner:
    """Classifies cells against the closed set B = {|p| <= level, |p'| <= slope}.

    Second-order Taylor bounds around each cell midpoint, with rigorous sup
    bounds on |p''| and |p'''|, give CLEAR (cell misses B), FULL (cell inside
    B), WITNESS (midpoint in B) or UNKNOWN.
    """

    def __init__(self, p: TrigPoly, level: float, slope: float):
        self.p = p
        self.level = float(level)
        self.slope = float(slope)
        self.L2 = sup_norm_bound(p, 2)
        self.L3 = sup_norm_bound(p, 3)
        self.tol = 1e-12 * coefficient_bound(p, 0)
        self.evals = 0

    def status(self, lo: np.ndarray, hi: np.ndarray):
        mid = 0.5 * (lo + hi)
        r = 0.5 * (hi - lo)
        f0, f1, f2 = np.abs(evaluate_derivatives(self.p, mid, (0, 1, 2)))
        self.evals += 3 * mid.size
        tol, tol1 = self.tol, self.tol * self.p.degree
        p_lo = f0 - f1 * r - 0.5 * self.L2 * r * r
        p_hi = f0 + f1 * r + 0.5 * self.L2 * r * r
        d_lo = f1 - f2 * r - 0.5 * self.L3 * r * r
        d_hi = f1 + f2 * r + 0.5 * self.L3 * r * r
        st = np.full(mid.shape, UNKNOWN, dtype=np.int8)
        st[(f0 <= self.level - tol) & (f1 <= self.slope - tol1)] = WITNESS
        st[(p_hi <= self.level - tol) & (d_hi <= self.slope - tol1)] = FULL
        st[(p_lo > self.level + tol) | (d_lo > self.slope + tol1)] = CLEAR
        return st, mid

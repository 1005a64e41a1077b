"""Independent reference implementations used to check the package.

Everything here recomputes from raw event prefixes with plain Python data
structures (sets, reversed scans, role tables), deliberately avoiding the
package's incremental state and vectorized paths so agreement is evidence,
not tautology.
"""
from __future__ import annotations

import math


def brute_pshift(prev, cand, group=None):
    """Role-table participation-shift classifier."""
    if prev is None:
        return "none"
    a, b = prev
    s, r = cand
    if group is not None and b == group:
        if r == group:
            recv = "0"
        elif r == a:
            recv = "A"
        else:
            recv = "Y"
        if s == a:
            return "none" if recv == "0" else "A0-AY"
        return {"0": "A0-X0", "A": "A0-XA", "Y": "A0-XY"}[recv]
    send = "B" if s == b else ("A" if s == a else "X")
    if r == a:
        recv = "A"
    elif r == b:
        recv = "B"
    elif group is not None and r == group:
        recv = "0"
    else:
        recv = "Y"
    table = {
        ("B", "A"): "AB-BA",
        ("B", "0"): "AB-B0",
        ("B", "Y"): "AB-BY",
        ("A", "B"): "none",
        ("A", "0"): "AB-A0",
        ("A", "Y"): "AB-AY",
        ("X", "A"): "AB-XA",
        ("X", "B"): "AB-XB",
        ("X", "0"): "AB-X0",
        ("X", "Y"): "AB-XY",
    }
    return table[(send, recv)]


def _outdeg(prefix, a):
    return sum(1 for s, _ in prefix if s == a)


def _indeg(prefix, a):
    return sum(1 for _, r in prefix if r == a)


def _count(prefix, s, r):
    return sum(1 for ev in prefix if ev == (s, r))


def _edges(prefix):
    return set(prefix)


def _recent_senders_to(prefix, a):
    out = []
    for s, r in reversed(prefix):
        if r == a and s not in out:
            out.append(s)
    return out


def _recent_targets_of(prefix, a):
    out = []
    for s, r in reversed(prefix):
        if s == a and r not in out:
            out.append(r)
    return out


def brute_stat(name, prefix, n, s, r, cov=None, group=None):
    """Value(s) of one effect for candidate (s, r) after the given prefix.

    Returns a list (multi-parameter effects expand in place). ``cov`` is a
    dict with optional keys snd/rec/inter/event holding nested lists.
    """
    m = len(prefix)
    if name == "NIDSnd":
        return [_indeg(prefix, s) / m if m else 0.0]
    if name == "NIDRec":
        return [_indeg(prefix, r) / m if m else 0.0]
    if name == "NODSnd":
        return [_outdeg(prefix, s) / m if m else 0.0]
    if name == "NODRec":
        return [_outdeg(prefix, r) / m if m else 0.0]
    if name == "NTDegSnd":
        return [(_indeg(prefix, s) + _outdeg(prefix, s)) / (2 * m) if m else 0.0]
    if name == "NTDegRec":
        return [(_indeg(prefix, r) + _outdeg(prefix, r)) / (2 * m) if m else 0.0]
    if name == "FrPSndSnd":
        d = _outdeg(prefix, s)
        return [_count(prefix, s, r) / d if d else 0.0]
    if name == "FrRecSnd":
        d = _indeg(prefix, s)
        return [_count(prefix, r, s) / d if d else 0.0]
    if name == "RRecSnd":
        lst = _recent_senders_to(prefix, s)
        return [1.0 / (lst.index(r) + 1) if r in lst else 0.0]
    if name == "RSndSnd":
        lst = _recent_targets_of(prefix, s)
        return [1.0 / (lst.index(r) + 1) if r in lst else 0.0]
    if name == "OTPSnd":
        e = _edges(prefix)
        return [float(sum(1 for k in range(n) if (s, k) in e and (k, r) in e))]
    if name == "ITPSnd":
        e = _edges(prefix)
        return [float(sum(1 for k in range(n) if (r, k) in e and (k, s) in e))]
    if name == "OSPSnd":
        e = _edges(prefix)
        return [float(sum(1 for k in range(n) if (s, k) in e and (r, k) in e))]
    if name == "ISPSnd":
        e = _edges(prefix)
        return [float(sum(1 for k in range(n) if (k, s) in e and (k, r) in e))]
    if name == "CovSnd":
        return [float(v) for v in cov["snd"][s]]
    if name == "CovRec":
        return [float(v) for v in cov["rec"][r]]
    if name == "CovInt":
        return [float(x) + float(y) for x, y in zip(cov["inter"][s], cov["inter"][r])]
    if name == "CovEvent":
        return [float(sl[s][r]) for sl in cov["event"]]
    if name == "FESnd":
        return [1.0 if s == i else 0.0 for i in range(n)]
    if name == "FERec":
        return [1.0 if r == i else 0.0 for i in range(n)]
    if name == "FEInt":
        return [(1.0 if s == i else 0.0) + (1.0 if r == i else 0.0) for i in range(n)]
    if name.startswith("PS"):
        prev = prefix[-1] if prefix else None
        return [1.0 if brute_pshift(prev, (s, r), group) == name[2:] else 0.0]
    raise KeyError(name)


def brute_vector(entries, prefix, n, s, r, cov=None, group=None):
    out = []
    for name in entries:
        out.extend(brute_stat(name, prefix, n, s, r, cov, group))
    return out


def support(n):
    return [(s, r) for s in range(n) for r in range(n) if s != r]


def enum_ordinal_loglik(events, n, entries, theta, cov=None, group=None):
    """Ordinal log likelihood by direct per-step multinomial enumeration."""
    total = 0.0
    for i, (s_obs, r_obs) in enumerate(events):
        prefix = list(events[:i])
        weights = {}
        for s, r in support(n):
            u = brute_vector(entries, prefix, n, s, r, cov, group)
            weights[(s, r)] = math.exp(sum(t * v for t, v in zip(theta, u)))
        z = sum(weights.values())
        total += math.log(weights[(s_obs, r_obs)] / z)
    return total


def enum_temporal_loglik(times, events, n, entries, theta, horizon, cov=None, group=None):
    """Exact-time log likelihood from first principles (product of densities)."""
    total = 0.0
    prev_t = 0.0
    for i, (s_obs, r_obs) in enumerate(events):
        prefix = list(events[:i])
        lam = {}
        for s, r in support(n):
            u = brute_vector(entries, prefix, n, s, r, cov, group)
            lam[(s, r)] = math.exp(sum(t * v for t, v in zip(theta, u)))
        big = sum(lam.values())
        dt = times[i] - prev_t
        total += math.log(lam[(s_obs, r_obs)]) - dt * big
        prev_t = times[i]
    prefix = list(events)
    big = 0.0
    for s, r in support(n):
        u = brute_vector(entries, prefix, n, s, r, cov, group)
        big += math.exp(sum(t * v for t, v in zip(theta, u)))
    total -= (horizon - prev_t) * big
    return total


def fd_gradient(fun, theta, h=1e-5):
    """Central finite differences of a scalar function."""
    grad = []
    for j in range(len(theta)):
        step = h * max(1.0, abs(theta[j]))
        up = list(theta)
        dn = list(theta)
        up[j] += step
        dn[j] -= step
        grad.append((fun(up) - fun(dn)) / (2.0 * step))
    return grad

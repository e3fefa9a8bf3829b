"""Shared helpers for the threshold-calibration oracles.

Everything here is an independent reference route: direct matrix assembly
with numpy plus dense eigensolves. The C++ library must agree with these
semantics; the scripts exist to calibrate and freeze the numeric thresholds
used by the acceptance suite (tests/acceptance).
"""

import numpy as np


def value_to_index(values, lower, inc, n):
    """Nearest-state index, ties toward the lower index, clamped."""
    x = (np.asarray(values) - lower) / inc
    idx = np.ceil(x - 0.5).astype(np.int64)
    return np.clip(idx, 0, n - 1)


def simulate_binomial_paths(rng, n_paths, horizon, s0=1.0, up=1.1, down=0.9, p_up=0.5):
    draws = rng.random((n_paths, horizon)) < p_up
    steps = np.where(draws, up, down)
    vals = np.empty((n_paths, horizon + 1))
    vals[:, 0] = s0
    vals[:, 1:] = s0 * np.cumprod(steps, axis=1)
    return vals


def simulate_gbm_paths(rng, n_paths, horizon, s0, mu, sigma, dt=1.0, plus_half_var=True):
    z = rng.standard_normal((n_paths, horizon))
    sgn = 1.0 if plus_half_var else -1.0
    log_steps = (mu + sgn * 0.5 * sigma * sigma) * dt + sigma * np.sqrt(dt) * z
    vals = np.empty((n_paths, horizon + 1))
    vals[:, 0] = s0
    vals[:, 1:] = s0 * np.exp(np.cumsum(log_steps, axis=1))
    return vals


def count_transitions(idx_paths, n):
    """All intertemporal transitions of an (N, T+1) index array."""
    counts = np.zeros((n, n), dtype=np.int64)
    np.add.at(counts, (idx_paths[:, :-1].ravel(), idx_paths[:, 1:].ravel()), 1)
    return counts


def restrict_normalize(counts):
    """Row-normalize; drop fully-untouched states; self-loop entered-never-exited."""
    rowsum = counts.sum(axis=1)
    colsum = counts.sum(axis=0)
    keep = np.where((rowsum > 0) | (colsum > 0))[0]
    sub = counts[np.ix_(keep, keep)].astype(float)
    rs = sub.sum(axis=1)
    probs = np.zeros_like(sub)
    for r in range(len(keep)):
        if rs[r] > 0:
            probs[r] = sub[r] / rs[r]
        else:
            probs[r, r] = 1.0
    return probs, keep


def stationary_eigen(probs, tie_tol=1e-10, imag_tol=1e-9, sign_tol=1e-9):
    """Left dominant eigenvector; uniform mixture over an admissible degenerate basis.

    Returns (pi, n_candidates) or (None, 0) when no admissible eigenvector exists.
    """
    lam, vecs = np.linalg.eig(probs.T)
    mods = np.abs(lam)
    lmax = mods.max()
    cands = []
    for i in np.where(mods >= lmax - tie_tol)[0]:
        if abs(lam[i].imag) > imag_tol:
            continue
        v = vecs[:, i]
        if np.max(np.abs(v.imag)) > imag_tol * np.max(np.abs(v)):
            continue
        v = v.real
        if v.sum() < 0:
            v = -v
        vmax = np.max(np.abs(v))
        if vmax == 0 or v.min() < -sign_tol * vmax:
            continue
        v = np.clip(v, 0.0, None)
        cands.append(v / v.sum())
    if not cands:
        return None, 0
    cands.sort(key=lambda a: tuple(a))
    pi = np.mean(cands, axis=0)
    return pi / pi.sum(), len(cands)


def stationary_svd(probs, tie_tol=1e-10, sign_tol=1e-9):
    """Leading right singular vector of the transposed system, sign-flipped.

    Degenerate leading singular values use the same admissible-mixture
    tie-break as the eigen route.
    """
    _, s, vh = np.linalg.svd(probs.T)
    smax = s.max()
    cands = []
    mixed = False
    for i in np.where(s >= smax - tie_tol)[0]:
        v = vh[i]
        if v.sum() < 0:
            v = -v
        vmax = np.max(np.abs(v))
        if vmax == 0:
            continue
        if v.min() < -sign_tol * vmax:
            if len(cands) == 0 and i == 0:
                mixed = True  # dominant vector itself is mixed-sign: keep it, flagged
            else:
                continue
        v = np.clip(v, 0.0, None)
        cands.append(v / v.sum())
    if not cands:
        v = np.clip(vh[0] if vh[0].sum() >= 0 else -vh[0], 0.0, None)
        return v / v.sum(), True
    cands.sort(key=lambda a: tuple(a))
    pi = np.mean(cands, axis=0)
    return pi / pi.sum(), mixed


def embed(pi, keep, n):
    full = np.zeros(n)
    full[keep] = pi
    return full


def rms_distance(p, q):
    d = np.asarray(p) - np.asarray(q)
    return float(np.sqrt(np.mean(d * d)))


def wasserstein1(p, q, inc):
    cdf = np.cumsum(np.asarray(p) - np.asarray(q))
    return float(inc * np.sum(np.abs(cdf[:-1])))


def snapshot_schedule(n_total, per_decade=24):
    pts = list(range(1, min(n_total, 1000) + 1))
    k = 1
    while True:
        v = round(1000 * 10 ** (k / per_decade))
        if v >= n_total:
            break
        if v > pts[-1]:
            pts.append(v)
        k += 1
    if pts[-1] != n_total:
        pts.append(n_total)
    return pts

"""Pure-Python root continuation kernel (fallback for ``_ctrack``).

Both kernels implement the same algorithm: at each path point the fibre
polynomial ``eta^n + a_1(z) eta^(n-1) + ... + a_n(z)`` is re-solved by
Aberth-Ehrlich iteration warm-started from the previous roots, and the new
roots are matched to the old ones by nearest neighbour with a factor-2
uniqueness margin.  Steps that fail are bisected up to ``max_depth`` times.
"""

import math

OK = 0
AMBIGUOUS = 1
NO_CONVERGENCE = 2
COLLISION = 3

_MAXITER = 100
_NOISE = 16 * 2.220446049250313e-16


def _fibre(coeffs, z):
    # coeffs[i][j]: coefficient of z^j in a_{i+1}; result is monic in eta, descending
    out = [1.0 + 0j]
    for row in coeffs:
        acc = 0j
        for c in reversed(row):
            acc = acc * z + c
        out.append(acc)
    return out


def _aberth(c, w):
    n = len(w)
    for _ in range(_MAXITER):
        worst = 0.0
        for i in range(n):
            x = w[i]
            p = c[0]
            dp = 0j
            ax = abs(x)
            mag = abs(c[0])
            for k in range(1, n + 1):
                dp = dp * x + p
                p = p * x + c[k]
                mag = mag * ax + abs(c[k])
            # residual at rounding level: x is a root as far as doubles can tell
            if abs(p) <= _NOISE * mag:
                continue
            if dp == 0:
                ratio = p
            else:
                ratio = p / dp
            s = 0j
            for j in range(n):
                if j != i:
                    d = x - w[j]
                    if d != 0:
                        s += 1.0 / d
            denom = 1.0 - ratio * s
            corr = ratio / denom if denom != 0 else ratio
            w[i] = x - corr
            err = abs(corr) / (1.0 + abs(w[i]))
            if err > worst:
                worst = err
        if worst <= 1e-14:
            return True
    return False


def _match(prev, new):
    n = len(prev)
    perm = [-1] * n
    used = [False] * n
    for i in range(n):
        best = math.inf
        second = math.inf
        arg = -1
        for j in range(n):
            d = abs(new[j] - prev[i])
            if d < best:
                second = best
                best = d
                arg = j
            elif d < second:
                second = d
        if n > 1 and not second >= 2.0 * best:
            return None
        if used[arg]:
            return None
        used[arg] = True
        perm[i] = arg
    return perm


def _min_gap(w):
    n = len(w)
    gap = math.inf
    for i in range(n):
        for j in range(i + 1, n):
            d = abs(w[i] - w[j])
            if d < gap:
                gap = d
    return gap


def _step(coeffs, z0, z1, roots, depth, max_depth, gap_tol, stats):
    c = _fibre(coeffs, z1)
    w = list(roots)
    converged = _aberth(c, w)
    perm = _match(roots, w) if converged else None
    if perm is not None:
        gap = _min_gap(w)
        if gap < stats[1]:
            stats[1] = gap
        if gap < gap_tol:
            return None, COLLISION
        stats[0] += 1
        return [w[perm[i]] for i in range(len(w))], OK
    if depth >= max_depth:
        return None, (AMBIGUOUS if converged else NO_CONVERGENCE)
    mid = 0.5 * (z0 + z1)
    half, status = _step(coeffs, z0, mid, roots, depth + 1, max_depth, gap_tol, stats)
    if status != OK:
        return None, status
    return _step(coeffs, mid, z1, half, depth + 1, max_depth, gap_tol, stats)


def track_path(coeffs, path, roots0, gap_tol=1e-9, max_depth=12):
    """Continue ``roots0`` (valid at ``path[0]``) along the polyline ``path``.

    Returns ``(roots, status, min_gap, steps)`` where ``roots[i]`` is the
    continuation of ``roots0[i]``.
    """
    coeffs = [[complex(x) for x in row] for row in coeffs]
    roots = [complex(r) for r in roots0]
    path = [complex(p) for p in path]
    stats = [0, _min_gap(roots) if len(roots) > 1 else math.inf]
    for k in range(1, len(path)):
        roots, status = _step(coeffs, path[k - 1], path[k], roots, 0, max_depth, gap_tol, stats)
        if status != OK:
            return None, status, stats[1], stats[0]
    return roots, OK, stats[1], stats[0]

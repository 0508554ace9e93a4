"""Integer formula evaluators: section spaces, moduli and base dimensions,
spectral genera and 2-torsion counts."""

import re

from .errors import DomainError

_GROUP_RE = re.compile(r"^\s*(GL|SL|SO|Sp)\s*\(\s*(\d+)\s*\)\s*$", re.IGNORECASE)


def parse_group(tag):
    """Parse ``"GL(n)"``, ``"SL(n)"``, ``"SO(m)"`` or ``"Sp(2m)"`` into ``(family, size)``."""
    if isinstance(tag, (tuple, list)) and len(tag) == 2:
        family, size = tag
    else:
        match = _GROUP_RE.match(str(tag))
        if not match:
            raise DomainError(f"unsupported group tag {tag!r}")
        family, size = match.group(1), int(match.group(2))
    family = {"gl": "GL", "sl": "SL", "so": "SO", "sp": "Sp"}.get(str(family).lower())
    if family is None or not isinstance(size, int) or size < 1:
        raise DomainError(f"unsupported group tag {tag!r}")
    if family == "Sp" and size % 2:
        raise DomainError("Sp(2m) needs an even matrix size")
    if family == "SO" and size < 3:
        raise DomainError("SO(m) is only supported for m >= 3 (semisimple)")
    return family, size


def _check_genus(g):
    if not isinstance(g, int) or g < 2:
        raise DomainError(f"genus must be an integer >= 2, got {g!r}")


def h0_canonical_power(g, i):
    """Dimension of H^0(K^i) on a genus-g curve (Riemann-Roch)."""
    _check_genus(g)
    if not isinstance(i, int) or i < 0:
        raise DomainError(f"power must be a non-negative integer, got {i!r}")
    if i == 0:
        return 1
    if i == 1:
        return g
    return (2 * i - 1) * (g - 1)


def exponents(group):
    """Degrees of the basic invariant polynomials."""
    family, size = parse_group(group)
    if family == "GL":
        return list(range(1, size + 1))
    if family == "SL":
        return list(range(2, size + 1))
    if family == "Sp":
        return list(range(2, size + 1, 2))
    m = size // 2
    if size % 2:
        return list(range(2, 2 * m + 1, 2))
    # SO(2m): the top even invariant is replaced by the Pfaffian, of degree m
    return list(range(2, 2 * m - 1, 2)) + [m]


def group_dimension(group):
    family, size = parse_group(group)
    if family == "GL":
        return size * size
    if family == "SL":
        return size * size - 1
    if family == "Sp":
        m = size // 2
        return m * (2 * m + 1)
    return size * (size - 1) // 2


def hitchin_base_dim(group, g):
    _check_genus(g)
    return sum(h0_canonical_power(g, d) for d in exponents(group))


def moduli_dim(group, g):
    _check_genus(g)
    family, size = parse_group(group)
    if family == "GL":
        return 2 * size * size * (g - 1) + 2
    return 2 * group_dimension(group) * (g - 1)


def spectral_genus(n, g):
    """Genus of an n-sheeted spectral curve in the total space of K."""
    _check_genus(g)
    if not isinstance(n, int) or n < 1:
        raise DomainError("sheet count must be a positive integer")
    return 1 + n * n * (g - 1)


def upp_genera(p, g):
    """Genera ``(g_S, g_Sbar)`` of a U(p,p) spectral curve and its quotient by eta -> -eta."""
    _check_genus(g)
    if not isinstance(p, int) or p < 1:
        raise DomainError("p must be a positive integer")
    return 4 * p * p * (g - 1) + 1, (2 * p * p - p) * (g - 1) + 1


def parabolic_moduli_dim(g, r, n):
    """Dimension of the moduli space of rank-r parabolic Higgs bundles with n marked points."""
    if not all(isinstance(v, int) for v in (g, r, n)) or g < 0 or n < 0:
        raise DomainError("g and n must be non-negative integers")
    if 2 * g - 2 + n < 0:
        raise DomainError("need 2g - 2 + n >= 0")
    if r < 1:
        raise DomainError("rank must be positive")
    return (2 * g - 2) * r * r + 2 + n * r * (r - 1)


def torsion_two_count(prym_dim):
    """Number of 2-torsion points on an abelian variety of the given dimension."""
    if not isinstance(prym_dim, int) or prym_dim < 0:
        raise DomainError("dimension must be a non-negative integer")
    return 2 ** (2 * prym_dim)

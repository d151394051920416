"""
Conversion of D + rho u z^T to complex symmetric form, with exact pairs split off
"""
from __future__ import annotations

import logging
from typing import List, Tuple

import numpy as np

from ..models.dpr1_models import Dpr1, Dpr1Csym, ExactPair

logger = logging.getLogger(__name__)

EPS = np.finfo(float).eps

# Multiple of eps * (||d||_inf + rho ||u|| ||z||) under which a rank-one
# entry is replaced by an exact zero.
DEFLATION_SMALL = 4.0


def drop_negligible(a: Dpr1, small: float = DEFLATION_SMALL) -> Dpr1:
    """Zero the u_i or z_i whose removal perturbs the matrix at rounding level.

    Of the two factors of entry i, the one with the smaller contribution
    rho |u_i| ||z|| versus rho |z_i| ||u|| is zeroed.
    """
    u = np.array(a.u)
    z = np.array(a.z)
    nu = float(np.linalg.norm(u))
    nz = float(np.linalg.norm(z))
    thresh = small * EPS * (float(np.max(np.abs(a.d))) + a.rho * nu * nz)
    cu = a.rho * np.abs(u) * nz
    cz = a.rho * np.abs(z) * nu
    kill_u = (cu <= thresh) & (cu <= cz)
    kill_z = (cz <= thresh) & ~kill_u
    if not (np.any(kill_u & (u != 0)) or np.any(kill_z & (z != 0))):
        return a
    u[kill_u] = 0.0
    z[kill_z] = 0.0
    logger.debug(f"Dropped {int(np.count_nonzero(kill_u | kill_z))} negligible rank-one entries")
    return Dpr1(d=a.d, u=u, z=z, rho=a.rho)


def to_csym(a: Dpr1) -> Tuple[Dpr1Csym, List[ExactPair]]:
    """Rewrite D + rho u z^T as D + rho zh zh^T with zh = S u, S = diag(sqrt(z/u)).

    Entries with u_i = 0 or z_i = 0 (after :func:`drop_negligible`) have d_i as
    an eigenvalue and are split off as exact pairs. When two surviving
    entries share a diagonal value, a complex rotation of that pair folds both
    weights into one entry and the other becomes an exact pair too.

    Args:
        a: DPR1 matrix with rho > 0

    Returns:
        The symmetric form of the remaining entries and the exact pairs
    """
    a = drop_negligible(a)
    exact = (a.u == 0) | (a.z == 0)
    pairs = [ExactPair(value=complex(a.d[i]), index=int(i)) for i in np.flatnonzero(exact)]

    active = np.flatnonzero(~exact)
    s = np.sqrt(a.z[active] / a.u[active])
    zh = s * a.u[active]
    d = np.array(a.d[active])

    keep = np.ones(active.shape[0], dtype=bool)
    seen: dict[complex, int] = {}
    for pos, value in enumerate(d):
        key = complex(value)
        if key not in seen:
            seen[key] = pos
            continue
        first = seen[key]
        merged = np.sqrt(zh[first] ** 2 + zh[pos] ** 2)
        pairs.append(ExactPair(value=key, index=int(active[pos]), partner=int(active[first])))
        keep[pos] = False
        if merged == 0:
            # Isotropic pair: both weights cancel and the first entry is exact as well.
            pairs.append(ExactPair(value=key, index=int(active[first]), partner=int(active[pos])))
            keep[first] = False
            del seen[key]
        else:
            zh[first] = merged

    csym = Dpr1Csym(d=d[keep], z=zh[keep], rho=a.rho, scaling=s[keep], active=active[keep])
    return csym, pairs

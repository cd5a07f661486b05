"""Pure numpy implementation of the tube-flux density kernel.

Mirrors ``_kernels.pyx`` and is used when the compiled module is missing.
"""
import numpy as np

_SG = np.array([-1.0, 1.0, 1.0, 1.0, 1.0, 1.0])


def _wedge(a, b):
    o = a[..., :, None] * b[..., None, :]
    return o - np.swapaxes(o, -1, -2)


def tube_density(z, u, a, adot, k, w):
    """Weighted sphere sums of the graded flux density.

    Returns ``(mom, ang)``: ``mom[p + 4]`` is the momentum coefficient of
    ``r**p`` for ``p = -4..0`` and ``ang[p + 4]`` the angular-momentum
    coefficient for ``p = -4..1``.  The stress-energy prefactor is not
    applied.
    """
    k = np.ascontiguousarray(k, dtype=float)
    ak = (k * _SG) @ a
    adk = (k * _SG) @ adot
    uu = np.broadcast_to(u, k.shape)
    v3 = 3.0 * (a + 2.0 * u * ak[:, None])
    wv = adot + u * adk[:, None] + 3.0 * a * ak[:, None] + 3.0 * u * (ak**2)[:, None]
    pieces = (3.0 * _wedge(uu, k), _wedge(u, a) + _wedge(v3, k), _wedge(wv, k))
    grades = (4, 3, 2)
    # S(G_i, G_j) = G_i^{ab} G_j_{ab}
    sg2 = np.outer(_SG, _SG)
    s = [[np.einsum("nab,ab,nab->n", gi, sg2, gj) for gj in pieces] for gi in pieces]
    covs = ((k - u) * _SG, ak[:, None] * k * _SG)
    j_by_power = np.zeros((6, k.shape[0], 6))
    for extra, d in enumerate(covs):
        xs = [np.einsum("nm,nml->nl", d, g) * _SG for g in pieces]
        draised = d * _SG
        for i, gi_grade in enumerate(grades):
            for j, gj_grade in enumerate(grades):
                p = 4 - (gi_grade + gj_grade) + extra
                jv = np.einsum("nvs,ns->nv", pieces[j], xs[i]) - 0.25 * draised * s[i][j][:, None]
                j_by_power[p + 4] += jv
    mom = np.einsum("n,pnv->pv", w, j_by_power)[:5]
    ang = np.zeros((6, 6, 6))
    for idx in range(5):
        jw = w[:, None] * j_by_power[idx]
        tot = jw.sum(axis=0)
        ang[idx] += np.outer(z, tot) - np.outer(tot, z)
        kj = k.T @ jw
        ang[idx + 1] += kj - kj.T
    return mom, ang

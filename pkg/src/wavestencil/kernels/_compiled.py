"""Compiled tile kernels, one per code shape.

Every kernel advances one time step over a list of tiles (rows of
``z0, z1, y0, y1, x0, x1`` in padded coordinates), writing ``u_next`` into
the ``up`` buffer.  Arithmetic goes through the shared cell primitives so the
per-cell evaluation order is the same as the reference sweep; only Semi
reorders the z contributions.

Counters are bumped per row (or per plane) when ``inst`` is set.
"""

import numpy as np
from numba import njit

from ..counters import (
    CELLS,
    ETA_FILL,
    ETA_LOADS,
    FLOPS,
    PREV_LOADS,
    SCRATCH_LOADS,
    SCRATCH_STORES,
    SEMI_FILL_LOADS,
    SEMI_FILL_STORES,
    SEMI_LOADS,
    SEMI_STORES,
    STORES,
    U_FILL,
    U_LOADS,
    V_LOADS,
)
from ..decomp import RADIUS, eta_face_map
from ..physics import (
    FLOPS_INNER,
    FLOPS_INNER_UPDATE,
    FLOPS_PML,
    FLOPS_PML_GRADIENT,
    FLOPS_PML_UPDATE,
    FLOPS_SEMI_BACKWARD,
    FLOPS_SEMI_FORWARD,
    grad_terms,
    inner_value,
    lap25,
    pml_grad,
    pml_value,
)

R = RADIUS
NSLOT = 2 * RADIUS + 1


@njit(inline="always")
def _count_update(cnt, n, pml):
    cnt[PREV_LOADS] += n
    cnt[V_LOADS] += n
    cnt[STORES] += n
    cnt[CELLS] += n
    if pml:
        cnt[ETA_LOADS] += 7 * n
        cnt[FLOPS] += FLOPS_PML * n
    else:
        cnt[FLOPS] += FLOPS_INNER * n


@njit(nogil=True, cache=True)
def slot(z, r):
    return (z + 2 * r) % (2 * r + 1)


# --- 3D blocking, direct reads ----------------------------------------------


@njit(nogil=True, cache=True)
def gmem_tiles(up, uc, vel, eta, c, prm, tiles, pml, cnt, inst):
    for t in range(tiles.shape[0]):
        z0, z1, y0, y1, x0, x1 = tiles[t, 0], tiles[t, 1], tiles[t, 2], tiles[t, 3], tiles[t, 4], tiles[t, 5]
        for k in range(z0, z1):
            for j in range(y0, y1):
                if pml:
                    for i in range(x0, x1):
                        lap = lap25(uc, k, j, i, c)
                        g = pml_grad(eta, k, j, i, uc, k, j, i, prm)
                        up[k, j, i] = pml_value(uc[k, j, i], up[k, j, i], vel[k, j, i], eta[k, j, i], lap, g, prm)
                else:
                    for i in range(x0, x1):
                        lap = lap25(uc, k, j, i, c)
                        up[k, j, i] = inner_value(uc[k, j, i], up[k, j, i], vel[k, j, i], lap, prm)
                if inst:
                    n = x1 - x0
                    cnt[U_LOADS] += 25 * n
                    _count_update(cnt, n, pml)


# --- 3D blocking, u cached in a tile scratch box ------------------------------


@njit(nogil=True, cache=True)
def smem_u_tiles(up, uc, vel, eta, c, prm, tiles, pml, cnt, inst):
    mx = 0
    my = 0
    mz = 0
    for t in range(tiles.shape[0]):
        mz = max(mz, tiles[t, 1] - tiles[t, 0])
        my = max(my, tiles[t, 3] - tiles[t, 2])
        mx = max(mx, tiles[t, 5] - tiles[t, 4])
    s = np.empty((mz + 2 * R, my + 2 * R, mx + 2 * R), dtype=uc.dtype)
    for t in range(tiles.shape[0]):
        z0, z1, y0, y1, x0, x1 = tiles[t, 0], tiles[t, 1], tiles[t, 2], tiles[t, 3], tiles[t, 4], tiles[t, 5]
        ex, ey, ez = x1 - x0, y1 - y0, z1 - z0
        # every lane fetches its own point
        for k in range(z0, z1):
            for j in range(y0, y1):
                for i in range(x0, x1):
                    s[k - z0 + R, j - y0 + R, i - x0 + R] = uc[k, j, i]
        # lanes 0..R-1 fetch the low halo of an axis, lanes R..2R-1 the high halo
        for k in range(z0, z1):
            for j in range(y0, y1):
                for lane in range(2 * R):
                    gi = x0 - R + lane if lane < R else x1 + lane - R
                    si = lane if lane < R else ex + lane
                    s[k - z0 + R, j - y0 + R, si] = uc[k, j, gi]
        for k in range(z0, z1):
            for lane in range(2 * R):
                gj = y0 - R + lane if lane < R else y1 + lane - R
                sj = lane if lane < R else ey + lane
                for i in range(x0, x1):
                    s[k - z0 + R, sj, i - x0 + R] = uc[k, gj, i]
        for lane in range(2 * R):
            gk = z0 - R + lane if lane < R else z1 + lane - R
            sk = lane if lane < R else ez + lane
            for j in range(y0, y1):
                for i in range(x0, x1):
                    s[sk, j - y0 + R, i - x0 + R] = uc[gk, j, i]
        if inst:
            nfill = ex * ey * ez + 2 * R * (ex * ey + ex * ez + ey * ez)
            cnt[U_FILL] += nfill
            cnt[SCRATCH_STORES] += nfill
        for k in range(z0, z1):
            sk = k - z0 + R
            for j in range(y0, y1):
                sj = j - y0 + R
                if pml:
                    for i in range(x0, x1):
                        si = i - x0 + R
                        lap = lap25(s, sk, sj, si, c)
                        g = pml_grad(eta, k, j, i, s, sk, sj, si, prm)
                        up[k, j, i] = pml_value(s[sk, sj, si], up[k, j, i], vel[k, j, i], eta[k, j, i], lap, g, prm)
                else:
                    for i in range(x0, x1):
                        si = i - x0 + R
                        lap = lap25(s, sk, sj, si, c)
                        up[k, j, i] = inner_value(s[sk, sj, si], up[k, j, i], vel[k, j, i], lap, prm)
                if inst:
                    n = x1 - x0
                    cnt[SCRATCH_LOADS] += 25 * n
                    _count_update(cnt, n, pml)


# --- 3D blocking, eta cached with a width-1 halo (PML walls only) -------------


@njit(nogil=True, cache=True)
def eta_tiles(up, uc, vel, eta, c, prm, tiles, one_conditional, nt, cnt, inst):
    mx = 0
    my = 0
    mz = 0
    for t in range(tiles.shape[0]):
        mz = max(mz, tiles[t, 1] - tiles[t, 0])
        my = max(my, tiles[t, 3] - tiles[t, 2])
        mx = max(mx, tiles[t, 5] - tiles[t, 4])
    es = np.empty((mz + 2, my + 2, mx + 2), dtype=eta.dtype)
    for t in range(tiles.shape[0]):
        z0, z1, y0, y1, x0, x1 = tiles[t, 0], tiles[t, 1], tiles[t, 2], tiles[t, 3], tiles[t, 4], tiles[t, 5]
        ex, ey, ez = x1 - x0, y1 - y0, z1 - z0
        for k in range(z0, z1):
            for j in range(y0, y1):
                for i in range(x0, x1):
                    es[k - z0 + 1, j - y0 + 1, i - x0 + 1] = eta[k, j, i]
        nhalo = 0
        if one_conditional:
            for zidx in range(nt):
                for yidx in range(nt):
                    for xidx in range(nt):
                        ok, gi, gj, gk, si, sj, sk = eta_face_map(zidx, xidx, yidx, ex, ey, ez)
                        if ok:
                            es[sk, sj, si] = eta[z0 + gk, y0 + gj, x0 + gi]
                            nhalo += 1
        else:
            # first two lanes along each axis fetch that axis' faces
            for k in range(ez):
                for j in range(ey):
                    for lane in range(2):
                        gi = -1 if lane == 0 else ex
                        es[k + 1, j + 1, gi + 1] = eta[z0 + k, y0 + j, x0 + gi]
                        nhalo += 1
            for k in range(ez):
                for lane in range(2):
                    gj = -1 if lane == 0 else ey
                    for i in range(ex):
                        es[k + 1, gj + 1, i + 1] = eta[z0 + k, y0 + gj, x0 + i]
                        nhalo += 1
            for lane in range(2):
                gk = -1 if lane == 0 else ez
                for j in range(ey):
                    for i in range(ex):
                        es[gk + 1, j + 1, i + 1] = eta[z0 + gk, y0 + j, x0 + i]
                        nhalo += 1
        if inst:
            nfill = ex * ey * ez + nhalo
            cnt[ETA_FILL] += nfill
            cnt[SCRATCH_STORES] += nfill
        for k in range(z0, z1):
            ek = k - z0 + 1
            for j in range(y0, y1):
                ej = j - y0 + 1
                for i in range(x0, x1):
                    ei = i - x0 + 1
                    lap = lap25(uc, k, j, i, c)
                    g = pml_grad(es, ek, ej, ei, uc, k, j, i, prm)
                    up[k, j, i] = pml_value(uc[k, j, i], up[k, j, i], vel[k, j, i], es[ek, ej, ei], lap, g, prm)
                if inst:
                    n = x1 - x0
                    cnt[U_LOADS] += 25 * n
                    cnt[SCRATCH_LOADS] += 7 * n
                    cnt[PREV_LOADS] += n
                    cnt[V_LOADS] += n
                    cnt[STORES] += n
                    cnt[CELLS] += n
                    cnt[FLOPS] += FLOPS_PML * n


# --- semi-stencil along z -----------------------------------------------------


@njit(nogil=True, cache=True)
def semi_tiles(up, uc, vel, eta, c, prm, tiles, pml, cnt, inst):
    """Sweep step ``s`` reads the window ``u[s .. s+R]`` once per column.

    Forward phase: partial(s+R) = center + x + y + lower z half, kept in a
    ring of R+1 partial planes.  Backward phase: result(s) = partial(s) +
    upper z half, then the time update and the final store.
    """
    mx = 0
    my = 0
    for t in range(tiles.shape[0]):
        my = max(my, tiles[t, 3] - tiles[t, 2])
        mx = max(mx, tiles[t, 5] - tiles[t, 4])
    part = np.empty((R + 1, my, mx), dtype=uc.dtype)
    for t in range(tiles.shape[0]):
        z0, z1, y0, y1, x0, x1 = tiles[t, 0], tiles[t, 1], tiles[t, 2], tiles[t, 3], tiles[t, 4], tiles[t, 5]
        n = x1 - x0
        for s in range(z0 - R, z1):
            b = s
            f = s + R
            do_b = b >= z0
            do_f = f < z1
            sb = (b - z0) % (R + 1)
            sf = (f - z0) % (R + 1)
            for j in range(y0, y1):
                jj = j - y0
                if do_b:
                    for i in range(x0, x1):
                        acc = part[sb, jj, i - x0]
                        for m in range(1, R + 1):
                            acc += c[8 + m] * uc[b + m, j, i]
                        if pml:
                            g = pml_grad(eta, b, j, i, uc, b, j, i, prm)
                            up[b, j, i] = pml_value(uc[b, j, i], up[b, j, i], vel[b, j, i], eta[b, j, i], acc, g, prm)
                        else:
                            up[b, j, i] = inner_value(uc[b, j, i], up[b, j, i], vel[b, j, i], acc, prm)
                if do_f:
                    for i in range(x0, x1):
                        acc = c[0] * uc[f, j, i]
                        for m in range(1, R + 1):
                            acc += c[m] * (uc[f, j, i + m] + uc[f, j, i - m])
                        for m in range(1, R + 1):
                            acc += c[4 + m] * (uc[f, j + m, i] + uc[f, j - m, i])
                        for m in range(1, R + 1):
                            acc += c[8 + m] * uc[f - m, j, i]
                        part[sf, jj, i - x0] = acc
                if inst:
                    # window of R+1 semi-axis values serves both phases
                    cnt[U_LOADS] += (R + 1) * n
                    if do_b and do_f:
                        cnt[SEMI_LOADS] += (R + 1) * n
                        cnt[SEMI_STORES] += 2 * n
                    else:
                        cnt[SEMI_FILL_LOADS] += (R + 1) * n
                        cnt[SEMI_FILL_STORES] += n
                    if do_f:
                        cnt[U_LOADS] += 4 * R * n
                        cnt[SCRATCH_STORES] += n
                        cnt[FLOPS] += FLOPS_SEMI_FORWARD * n
                    if do_b:
                        cnt[SCRATCH_LOADS] += n
                        cnt[PREV_LOADS] += n
                        cnt[V_LOADS] += n
                        cnt[STORES] += n
                        cnt[CELLS] += n
                        cnt[FLOPS] += (FLOPS_SEMI_BACKWARD + FLOPS_INNER_UPDATE) * n
                        if pml:
                            # x/y neighbours and u[b-1] are re-read for the gradient
                            cnt[U_LOADS] += 5 * n
                            cnt[ETA_LOADS] += 7 * n
                            cnt[FLOPS] += (FLOPS_PML_GRADIENT + FLOPS_PML_UPDATE - FLOPS_INNER_UPDATE) * n


# --- 2.5D streaming helpers -----------------------------------------------------


@njit(inline="always")
def _load_plane(dst, uc, z, y0, y1, x0, x1):
    """Copy plane ``z`` of the column plus its R-wide x/y face halos into the 2D ``dst``."""
    ex = x1 - x0
    ey = y1 - y0
    for j in range(y0, y1):
        for i in range(x0, x1):
            dst[j - y0 + R, i - x0 + R] = uc[z, j, i]
    for j in range(y0, y1):
        for lane in range(2 * R):
            gi = x0 - R + lane if lane < R else x1 + lane - R
            si = lane if lane < R else ex + lane
            dst[j - y0 + R, si] = uc[z, j, gi]
    for lane in range(2 * R):
        gj = y0 - R + lane if lane < R else y1 + lane - R
        sj = lane if lane < R else ey + lane
        for i in range(x0, x1):
            dst[sj, i - x0 + R] = uc[z, gj, i]
    return ex * ey + 2 * R * (ex + ey)


@njit(inline="always")
def _xy(S, jj, ii, c):
    """Center and x/y contributions from a halo'd plane, reference order."""
    acc = c[0] * S[jj, ii]
    for m in range(1, R + 1):
        acc += c[m] * (S[jj, ii + m] + S[jj, ii - m])
    for m in range(1, R + 1):
        acc += c[4 + m] * (S[jj + m, ii] + S[jj - m, ii])
    return acc


@njit(inline="always")
def _stream_plane(up, vel, eta, c, prm, S, k, y0, y1, x0, x1,
                  zp1, zp2, zp3, zp4, zm1, zm2, zm3, zm4, off, pml, cnt, inst, zloads):
    """Output plane ``k`` of a column.

    ``S`` is the current plane with x/y halos; ``zp*``/``zm*`` are the planes
    above/below, indexed with the in-column offset ``off``.
    """
    for j in range(y0, y1):
        jj = j - y0 + R
        a = j - y0 + off
        if pml:
            for i in range(x0, x1):
                ii = i - x0 + R
                b = i - x0 + off
                acc = _xy(S, jj, ii, c)
                acc += c[9] * (zp1[a, b] + zm1[a, b])
                acc += c[10] * (zp2[a, b] + zm2[a, b])
                acc += c[11] * (zp3[a, b] + zm3[a, b])
                acc += c[12] * (zp4[a, b] + zm4[a, b])
                g = grad_terms(
                    eta[k, j, i + 1], eta[k, j, i - 1], S[jj, ii + 1], S[jj, ii - 1],
                    eta[k, j + 1, i], eta[k, j - 1, i], S[jj + 1, ii], S[jj - 1, ii],
                    eta[k + 1, j, i], eta[k - 1, j, i], zp1[a, b], zm1[a, b],
                    prm,
                )
                up[k, j, i] = pml_value(S[jj, ii], up[k, j, i], vel[k, j, i], eta[k, j, i], acc, g, prm)
        else:
            for i in range(x0, x1):
                ii = i - x0 + R
                b = i - x0 + off
                acc = _xy(S, jj, ii, c)
                acc += c[9] * (zp1[a, b] + zm1[a, b])
                acc += c[10] * (zp2[a, b] + zm2[a, b])
                acc += c[11] * (zp3[a, b] + zm3[a, b])
                acc += c[12] * (zp4[a, b] + zm4[a, b])
                up[k, j, i] = inner_value(S[jj, ii], up[k, j, i], vel[k, j, i], acc, prm)
        if inst:
            n = x1 - x0
            cnt[SCRATCH_LOADS] += (17 + zloads) * n
            _count_update(cnt, n, pml)


@njit(inline="always")
def _col_extent(cols):
    mx = 0
    my = 0
    for t in range(cols.shape[0]):
        my = max(my, cols[t, 3] - cols[t, 2])
        mx = max(mx, cols[t, 5] - cols[t, 4])
    return mx, my


# --- 2.5D streaming with a ring of 2R+1 halo'd planes ---------------------------


@njit(nogil=True, cache=True)
def st_planes_cols(up, uc, vel, eta, c, prm, cols, pml, cnt, inst):
    mx, my = _col_extent(cols)
    B = np.empty((NSLOT, my + 2 * R, mx + 2 * R), dtype=uc.dtype)
    for t in range(cols.shape[0]):
        z0, z1, y0, y1, x0, x1 = cols[t, 0], cols[t, 1], cols[t, 2], cols[t, 3], cols[t, 4], cols[t, 5]
        nfill = 0
        # top halo planes into slots [0, R), first R planes into [R, 2R)
        for q in range(R):
            nfill += _load_plane(B[q], uc, z0 - R + q, y0, y1, x0, x1)
            nfill += _load_plane(B[R + q], uc, z0 + q, y0, y1, x0, x1)
        for zr in range(z1 - z0):
            k = z0 + zr
            nfill += _load_plane(B[(zr + 2 * R) % NSLOT], uc, k + R, y0, y1, x0, x1)
            # plane k + m sits in slot (zr + R + m) mod (2R+1)
            _stream_plane(
                up, vel, eta, c, prm, B[(zr + R) % NSLOT], k, y0, y1, x0, x1,
                B[(zr + R + 1) % NSLOT], B[(zr + R + 2) % NSLOT], B[(zr + R + 3) % NSLOT], B[(zr + R + 4) % NSLOT],
                B[(zr + R - 1) % NSLOT], B[(zr + R - 2) % NSLOT], B[(zr + R - 3) % NSLOT], B[(zr + R - 4) % NSLOT],
                R, pml, cnt, inst, 8,
            )
        if inst:
            cnt[U_FILL] += nfill
            cnt[SCRATCH_STORES] += nfill


# --- 2.5D streaming, register window shifted every step -------------------------


@njit(nogil=True, cache=True)
def st_shift_cols(up, uc, vel, eta, c, prm, cols, pml, cnt, inst):
    mx, my = _col_extent(cols)
    S = np.empty((my + 2 * R, mx + 2 * R), dtype=uc.dtype)
    behind4 = np.empty((my, mx), dtype=uc.dtype)
    behind3 = np.empty((my, mx), dtype=uc.dtype)
    behind2 = np.empty((my, mx), dtype=uc.dtype)
    behind1 = np.empty((my, mx), dtype=uc.dtype)
    current = np.empty((my, mx), dtype=uc.dtype)
    front1 = np.empty((my, mx), dtype=uc.dtype)
    front2 = np.empty((my, mx), dtype=uc.dtype)
    front3 = np.empty((my, mx), dtype=uc.dtype)
    front4 = np.empty((my, mx), dtype=uc.dtype)
    for t in range(cols.shape[0]):
        z0, z1, y0, y1, x0, x1 = cols[t, 0], cols[t, 1], cols[t, 2], cols[t, 3], cols[t, 4], cols[t, 5]
        ncol = (x1 - x0) * (y1 - y0)
        # window slots 1..2R start with planes z0-R .. z0+R-1; the first shift aligns them
        for j in range(y0, y1):
            for i in range(x0, x1):
                a = j - y0
                b = i - x0
                behind3[a, b] = uc[z0 - 4, j, i]
                behind2[a, b] = uc[z0 - 3, j, i]
                behind1[a, b] = uc[z0 - 2, j, i]
                current[a, b] = uc[z0 - 1, j, i]
                front1[a, b] = uc[z0, j, i]
                front2[a, b] = uc[z0 + 1, j, i]
                front3[a, b] = uc[z0 + 2, j, i]
                front4[a, b] = uc[z0 + 3, j, i]
        if inst:
            cnt[U_FILL] += 2 * R * ncol
        for k in range(z0, z1):
            for j in range(y0, y1):
                for i in range(x0, x1):
                    a = j - y0
                    b = i - x0
                    behind4[a, b] = behind3[a, b]
                    behind3[a, b] = behind2[a, b]
                    behind2[a, b] = behind1[a, b]
                    behind1[a, b] = current[a, b]
                    current[a, b] = front1[a, b]
                    front1[a, b] = front2[a, b]
                    front2[a, b] = front3[a, b]
                    front3[a, b] = front4[a, b]
                    front4[a, b] = uc[k + R, j, i]
            splane = _load_plane(S, uc, k, y0, y1, x0, x1)
            _stream_plane(
                up, vel, eta, c, prm, S, k, y0, y1, x0, x1,
                front1, front2, front3, front4, behind1, behind2, behind3, behind4,
                0, pml, cnt, inst, 0,
            )
            if inst:
                cnt[U_FILL] += ncol + splane
                cnt[SCRATCH_STORES] += splane


# --- 2.5D streaming, fixed register slots, body unrolled 2R+1 times ------------


@njit(nogil=True, cache=True)
def _fixed_body(a0, a1, a2, a3, a4, a5, a6, a7, a8, S, up, uc, vel, eta, c, prm, k, y0, y1, x0, x1, pml, cnt, inst):
    # a0..a8 are bound to planes k-4 .. k+4; only the leading slot is written
    for j in range(y0, y1):
        for i in range(x0, x1):
            a8[j - y0, i - x0] = uc[k + R, j, i]
    splane = _load_plane(S, uc, k, y0, y1, x0, x1)
    _stream_plane(
        up, vel, eta, c, prm, S, k, y0, y1, x0, x1,
        a5, a6, a7, a8, a3, a2, a1, a0,
        0, pml, cnt, inst, 0,
    )
    if inst:
        cnt[U_FILL] += (x1 - x0) * (y1 - y0) + splane
        cnt[SCRATCH_STORES] += splane


@njit(nogil=True, cache=True)
def st_fixed_cols(up, uc, vel, eta, c, prm, cols, pml, cnt, inst):
    mx, my = _col_extent(cols)
    S = np.empty((my + 2 * R, mx + 2 * R), dtype=uc.dtype)
    r0 = np.empty((my, mx), dtype=uc.dtype)
    r1 = np.empty((my, mx), dtype=uc.dtype)
    r2 = np.empty((my, mx), dtype=uc.dtype)
    r3 = np.empty((my, mx), dtype=uc.dtype)
    r4 = np.empty((my, mx), dtype=uc.dtype)
    r5 = np.empty((my, mx), dtype=uc.dtype)
    r6 = np.empty((my, mx), dtype=uc.dtype)
    r7 = np.empty((my, mx), dtype=uc.dtype)
    r8 = np.empty((my, mx), dtype=uc.dtype)
    for t in range(cols.shape[0]):
        z0, z1, y0, y1, x0, x1 = cols[t, 0], cols[t, 1], cols[t, 2], cols[t, 3], cols[t, 4], cols[t, 5]
        # plane p (relative to z0) lives in slot (p + R) mod (2R+1)
        for j in range(y0, y1):
            for i in range(x0, x1):
                a = j - y0
                b = i - x0
                r0[a, b] = uc[z0 - 4, j, i]
                r1[a, b] = uc[z0 - 3, j, i]
                r2[a, b] = uc[z0 - 2, j, i]
                r3[a, b] = uc[z0 - 1, j, i]
                r4[a, b] = uc[z0, j, i]
                r5[a, b] = uc[z0 + 1, j, i]
                r6[a, b] = uc[z0 + 2, j, i]
                r7[a, b] = uc[z0 + 3, j, i]
        if inst:
            cnt[U_FILL] += 2 * R * (x1 - x0) * (y1 - y0)
        k = z0
        while True:
            if k >= z1:
                break
            _fixed_body(r0, r1, r2, r3, r4, r5, r6, r7, r8, S, up, uc, vel, eta, c, prm, k, y0, y1, x0, x1, pml, cnt, inst)
            k += 1
            if k >= z1:
                break
            _fixed_body(r1, r2, r3, r4, r5, r6, r7, r8, r0, S, up, uc, vel, eta, c, prm, k, y0, y1, x0, x1, pml, cnt, inst)
            k += 1
            if k >= z1:
                break
            _fixed_body(r2, r3, r4, r5, r6, r7, r8, r0, r1, S, up, uc, vel, eta, c, prm, k, y0, y1, x0, x1, pml, cnt, inst)
            k += 1
            if k >= z1:
                break
            _fixed_body(r3, r4, r5, r6, r7, r8, r0, r1, r2, S, up, uc, vel, eta, c, prm, k, y0, y1, x0, x1, pml, cnt, inst)
            k += 1
            if k >= z1:
                break
            _fixed_body(r4, r5, r6, r7, r8, r0, r1, r2, r3, S, up, uc, vel, eta, c, prm, k, y0, y1, x0, x1, pml, cnt, inst)
            k += 1
            if k >= z1:
                break
            _fixed_body(r5, r6, r7, r8, r0, r1, r2, r3, r4, S, up, uc, vel, eta, c, prm, k, y0, y1, x0, x1, pml, cnt, inst)
            k += 1
            if k >= z1:
                break
            _fixed_body(r6, r7, r8, r0, r1, r2, r3, r4, r5, S, up, uc, vel, eta, c, prm, k, y0, y1, x0, x1, pml, cnt, inst)
            k += 1
            if k >= z1:
                break
            _fixed_body(r7, r8, r0, r1, r2, r3, r4, r5, r6, S, up, uc, vel, eta, c, prm, k, y0, y1, x0, x1, pml, cnt, inst)
            k += 1
            if k >= z1:
                break
            _fixed_body(r8, r0, r1, r2, r3, r4, r5, r6, r7, S, up, uc, vel, eta, c, prm, k, y0, y1, x0, x1, pml, cnt, inst)
            k += 1

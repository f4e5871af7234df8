"""Numba-compiled twins of the numpy kernels.

Same contracts as ``numpy_impl``; explicit loops, single-threaded so
results are reproducible. No fastmath: the two backends must agree to
rounding-level accuracy.
"""

import numpy as np
from numba import njit

from . import _rollout

BACKEND_NAME = "numba"


@njit(cache=True)
def cell_gradient(phi, dx, dy, dz,
                  face_xlo, face_xhi, face_ylo, face_yhi, face_zlo, face_zhi):
    nx, ny, nz = phi.shape
    gx = np.empty_like(phi)
    gy = np.empty_like(phi)
    gz = np.empty_like(phi)
    for j in range(ny):
        for k in range(nz):
            f_prev = face_xlo[j, k]
            for i in range(nx):
                if i == nx - 1:
                    f_next = face_xhi[j, k]
                else:
                    w = dx[i] / (dx[i] + dx[i + 1])
                    f_next = (1.0 - w) * phi[i, j, k] + w * phi[i + 1, j, k]
                gx[i, j, k] = (f_next - f_prev) / dx[i]
                f_prev = f_next
    for i in range(nx):
        for k in range(nz):
            f_prev = face_ylo[i, k]
            for j in range(ny):
                if j == ny - 1:
                    f_next = face_yhi[i, k]
                else:
                    w = dy[j] / (dy[j] + dy[j + 1])
                    f_next = (1.0 - w) * phi[i, j, k] + w * phi[i, j + 1, k]
                gy[i, j, k] = (f_next - f_prev) / dy[j]
                f_prev = f_next
    for i in range(nx):
        for j in range(ny):
            f_prev = face_zlo[i, j]
            for k in range(nz):
                if k == nz - 1:
                    f_next = face_zhi[i, j]
                else:
                    w = dz[k] / (dz[k] + dz[k + 1])
                    f_next = (1.0 - w) * phi[i, j, k] + w * phi[i, j, k + 1]
                gz[i, j, k] = (f_next - f_prev) / dz[k]
                f_prev = f_next
    return gx, gy, gz


@njit(cache=True)
def face_normal_velocity(u, axis):
    nx, ny, nz = u.shape
    if axis == 0:
        uf = np.zeros((nx + 1, ny, nz))
        for i in range(1, nx):
            for j in range(ny):
                for k in range(nz):
                    uf[i, j, k] = 0.5 * (u[i - 1, j, k] + u[i, j, k])
    elif axis == 1:
        uf = np.zeros((nx, ny + 1, nz))
        for i in range(nx):
            for j in range(1, ny):
                for k in range(nz):
                    uf[i, j, k] = 0.5 * (u[i, j - 1, k] + u[i, j, k])
    else:
        uf = np.zeros((nx, ny, nz + 1))
        for i in range(nx):
            for j in range(ny):
                for k in range(1, nz):
                    uf[i, j, k] = 0.5 * (u[i, j, k - 1] + u[i, j, k])
    return uf


@njit(cache=True)
def assemble_system(phi_iter, phi_old, inertia, conv, conservative,
                    gamma_x, gamma_y, gamma_z, Fx, Fy, Fz,
                    gx, gy, gz, use_sou,
                    rc_xlo, rv_xlo, rc_xhi, rv_xhi,
                    rc_ylo, rv_ylo, rc_yhi, rv_yhi,
                    rc_zlo, rv_zlo, rc_zhi, rv_zhi,
                    dx, dy, dz, dt):
    nx, ny, nz = phi_iter.shape
    aP = np.empty((nx, ny, nz))
    b = np.empty((nx, ny, nz))
    aXm = np.zeros((nx, ny, nz))
    aXp = np.zeros((nx, ny, nz))
    aYm = np.zeros((nx, ny, nz))
    aYp = np.zeros((nx, ny, nz))
    aZm = np.zeros((nx, ny, nz))
    aZp = np.zeros((nx, ny, nz))

    for i in range(nx):
        for j in range(ny):
            for k in range(nz):
                ap0 = inertia[i, j, k] * dx[i] * dy[j] * dz[k] / dt
                aP[i, j, k] = ap0
                b[i, j, k] = ap0 * phi_old[i, j, k]

    # x faces
    for i in range(nx - 1):
        for j in range(ny):
            for k in range(nz):
                area = dy[j] * dz[k]
                D = area / (dx[i] / (2.0 * gamma_x[i, j, k])
                            + dx[i + 1] / (2.0 * gamma_x[i + 1, j, k]))
                F = Fx[i + 1, j, k]
                phi_lo = phi_iter[i, j, k]
                phi_hi = phi_iter[i + 1, j, k]
                corr = 0.0
                if use_sou:
                    if F > 0.0:
                        phi_up = phi_lo
                        phi_sou = phi_lo + gx[i, j, k] * (0.5 * dx[i])
                    else:
                        phi_up = phi_hi
                        phi_sou = phi_hi - gx[i + 1, j, k] * (0.5 * dx[i + 1])
                    lo = min(phi_lo, phi_hi)
                    hi = max(phi_lo, phi_hi)
                    if phi_sou < lo:
                        phi_sou = lo
                    elif phi_sou > hi:
                        phi_sou = hi
                    corr = phi_sou - phi_up
                if conservative:
                    aXp[i, j, k] += max(-F, 0.0) + D
                    aXm[i + 1, j, k] += max(F, 0.0) + D
                    aP[i, j, k] += max(F, 0.0) + D
                    aP[i + 1, j, k] += max(-F, 0.0) + D
                    b[i, j, k] += -F * corr
                    b[i + 1, j, k] += F * corr
                else:
                    cin_lo = conv[i, j, k] * max(-F, 0.0)
                    cin_hi = conv[i + 1, j, k] * max(F, 0.0)
                    aXp[i, j, k] += cin_lo + D
                    aXm[i + 1, j, k] += cin_hi + D
                    aP[i, j, k] += cin_lo + D
                    aP[i + 1, j, k] += cin_hi + D
                    if F > 0.0:
                        b[i + 1, j, k] += conv[i + 1, j, k] * F * corr
                    else:
                        b[i, j, k] += -conv[i, j, k] * F * corr

    # y faces
    for i in range(nx):
        for j in range(ny - 1):
            for k in range(nz):
                area = dx[i] * dz[k]
                D = area / (dy[j] / (2.0 * gamma_y[i, j, k])
                            + dy[j + 1] / (2.0 * gamma_y[i, j + 1, k]))
                F = Fy[i, j + 1, k]
                phi_lo = phi_iter[i, j, k]
                phi_hi = phi_iter[i, j + 1, k]
                corr = 0.0
                if use_sou:
                    if F > 0.0:
                        phi_up = phi_lo
                        phi_sou = phi_lo + gy[i, j, k] * (0.5 * dy[j])
                    else:
                        phi_up = phi_hi
                        phi_sou = phi_hi - gy[i, j + 1, k] * (0.5 * dy[j + 1])
                    lo = min(phi_lo, phi_hi)
                    hi = max(phi_lo, phi_hi)
                    if phi_sou < lo:
                        phi_sou = lo
                    elif phi_sou > hi:
                        phi_sou = hi
                    corr = phi_sou - phi_up
                if conservative:
                    aYp[i, j, k] += max(-F, 0.0) + D
                    aYm[i, j + 1, k] += max(F, 0.0) + D
                    aP[i, j, k] += max(F, 0.0) + D
                    aP[i, j + 1, k] += max(-F, 0.0) + D
                    b[i, j, k] += -F * corr
                    b[i, j + 1, k] += F * corr
                else:
                    cin_lo = conv[i, j, k] * max(-F, 0.0)
                    cin_hi = conv[i, j + 1, k] * max(F, 0.0)
                    aYp[i, j, k] += cin_lo + D
                    aYm[i, j + 1, k] += cin_hi + D
                    aP[i, j, k] += cin_lo + D
                    aP[i, j + 1, k] += cin_hi + D
                    if F > 0.0:
                        b[i, j + 1, k] += conv[i, j + 1, k] * F * corr
                    else:
                        b[i, j, k] += -conv[i, j, k] * F * corr

    # z faces
    for i in range(nx):
        for j in range(ny):
            for k in range(nz - 1):
                area = dx[i] * dy[j]
                D = area / (dz[k] / (2.0 * gamma_z[i, j, k])
                            + dz[k + 1] / (2.0 * gamma_z[i, j, k + 1]))
                F = Fz[i, j, k + 1]
                phi_lo = phi_iter[i, j, k]
                phi_hi = phi_iter[i, j, k + 1]
                corr = 0.0
                if use_sou:
                    if F > 0.0:
                        phi_up = phi_lo
                        phi_sou = phi_lo + gz[i, j, k] * (0.5 * dz[k])
                    else:
                        phi_up = phi_hi
                        phi_sou = phi_hi - gz[i, j, k + 1] * (0.5 * dz[k + 1])
                    lo = min(phi_lo, phi_hi)
                    hi = max(phi_lo, phi_hi)
                    if phi_sou < lo:
                        phi_sou = lo
                    elif phi_sou > hi:
                        phi_sou = hi
                    corr = phi_sou - phi_up
                if conservative:
                    aZp[i, j, k] += max(-F, 0.0) + D
                    aZm[i, j, k + 1] += max(F, 0.0) + D
                    aP[i, j, k] += max(F, 0.0) + D
                    aP[i, j, k + 1] += max(-F, 0.0) + D
                    b[i, j, k] += -F * corr
                    b[i, j, k + 1] += F * corr
                else:
                    cin_lo = conv[i, j, k] * max(-F, 0.0)
                    cin_hi = conv[i, j, k + 1] * max(F, 0.0)
                    aZp[i, j, k] += cin_lo + D
                    aZm[i, j, k + 1] += cin_hi + D
                    aP[i, j, k] += cin_lo + D
                    aP[i, j, k + 1] += cin_hi + D
                    if F > 0.0:
                        b[i, j, k + 1] += conv[i, j, k + 1] * F * corr
                    else:
                        b[i, j, k] += -conv[i, j, k] * F * corr

    # Robin boundary terms
    for j in range(ny):
        for k in range(nz):
            area = dy[j] * dz[k]
            hA = rc_xlo[j, k] * area
            aP[0, j, k] += hA
            b[0, j, k] += hA * rv_xlo[j, k]
            hA = rc_xhi[j, k] * area
            aP[nx - 1, j, k] += hA
            b[nx - 1, j, k] += hA * rv_xhi[j, k]
    for i in range(nx):
        for k in range(nz):
            area = dx[i] * dz[k]
            hA = rc_ylo[i, k] * area
            aP[i, 0, k] += hA
            b[i, 0, k] += hA * rv_ylo[i, k]
            hA = rc_yhi[i, k] * area
            aP[i, ny - 1, k] += hA
            b[i, ny - 1, k] += hA * rv_yhi[i, k]
    for i in range(nx):
        for j in range(ny):
            area = dx[i] * dy[j]
            hA = rc_zlo[i, j] * area
            aP[i, j, 0] += hA
            b[i, j, 0] += hA * rv_zlo[i, j]
            hA = rc_zhi[i, j] * area
            aP[i, j, nz - 1] += hA
            b[i, j, nz - 1] += hA * rv_zhi[i, j]

    return aP, aXm, aXp, aYm, aYp, aZm, aZp, b


@njit(cache=True)
def stencil_matvec(aP, aXm, aXp, aYm, aYp, aZm, aZp, x):
    nx, ny, nz = aP.shape
    y = np.empty((nx, ny, nz))
    for i in range(nx):
        for j in range(ny):
            for k in range(nz):
                acc = aP[i, j, k] * x[i, j, k]
                if i > 0:
                    acc -= aXm[i, j, k] * x[i - 1, j, k]
                if i < nx - 1:
                    acc -= aXp[i, j, k] * x[i + 1, j, k]
                if j > 0:
                    acc -= aYm[i, j, k] * x[i, j - 1, k]
                if j < ny - 1:
                    acc -= aYp[i, j, k] * x[i, j + 1, k]
                if k > 0:
                    acc -= aZm[i, j, k] * x[i, j, k - 1]
                if k < nz - 1:
                    acc -= aZp[i, j, k] * x[i, j, k + 1]
                y[i, j, k] = acc
    return y


@njit(cache=True)
def scaled_residual_parts(aP, aXm, aXp, aYm, aYp, aZm, aZp, b, phi):
    nx, ny, nz = aP.shape
    num = 0.0
    den = 0.0
    for i in range(nx):
        for j in range(ny):
            for k in range(nz):
                acc = aP[i, j, k] * phi[i, j, k]
                if i > 0:
                    acc -= aXm[i, j, k] * phi[i - 1, j, k]
                if i < nx - 1:
                    acc -= aXp[i, j, k] * phi[i + 1, j, k]
                if j > 0:
                    acc -= aYm[i, j, k] * phi[i, j - 1, k]
                if j < ny - 1:
                    acc -= aYp[i, j, k] * phi[i, j + 1, k]
                if k > 0:
                    acc -= aZm[i, j, k] * phi[i, j, k - 1]
                if k < nz - 1:
                    acc -= aZp[i, j, k] * phi[i, j, k + 1]
                num += abs(acc - b[i, j, k])
                den += abs(aP[i, j, k] * phi[i, j, k])
    return num, den


narx_rollout = njit(cache=True)(_rollout.narx_rollout)
narx_step = njit(cache=True)(_rollout.narx_step)

"""Vectorized numpy implementations of the hot kernels.

Reference backend: every function here has a numba twin in
``numba_impl`` with identical semantics. Fields are C-contiguous
float64 arrays of shape (nx, ny, nz); face-flux arrays are full-size
(one extra entry along their axis) with boundary entries equal to zero.

Sign conventions for the assembled system, per cell P:

    aP * phi_P - sum_nb a_nb * phi_nb = b

with all a_nb >= 0 for the upwind/diffusion discretization.
"""

import numpy as np

from . import _rollout

BACKEND_NAME = "numpy"


def cell_gradient(phi, dx, dy, dz,
                  face_xlo, face_xhi, face_ylo, face_yhi, face_zlo, face_zhi):
    """Green-Gauss per-axis gradient of a cell field.

    Interior face values are distance-weighted linear interpolations;
    boundary face values are supplied as 2D planes.
    """
    nx, ny, nz = phi.shape
    gx = np.empty_like(phi)
    gy = np.empty_like(phi)
    gz = np.empty_like(phi)

    for axis, (g, d, lo, hi) in enumerate((
            (gx, dx, face_xlo, face_xhi),
            (gy, dy, face_ylo, face_yhi),
            (gz, dz, face_zlo, face_zhi))):
        n = phi.shape[axis]
        ph = np.moveaxis(phi, axis, 0)
        gg = np.moveaxis(g, axis, 0)
        if n == 1:
            gg[0] = (hi - lo) / d[0]
            continue
        w = (d[:-1] / (d[:-1] + d[1:])).reshape(-1, 1, 1)
        interior = (1.0 - w) * ph[:-1] + w * ph[1:]
        faces = np.concatenate([lo[None], interior, hi[None]], axis=0)
        gg[:] = (faces[1:] - faces[:-1]) / d.reshape(-1, 1, 1)
    return gx, gy, gz


def face_normal_velocity(u, axis):
    """Arithmetic average of adjacent cell velocities onto interior faces.

    Returns the full-size face array for ``axis`` with zero boundary
    entries (boundary transport is carried by the Robin terms).
    """
    nx, ny, nz = u.shape
    shape = [nx, ny, nz]
    shape[axis] += 1
    uf = np.zeros(shape)
    um = np.moveaxis(u, axis, 0)
    np.moveaxis(uf, axis, 0)[1:-1] = 0.5 * (um[:-1] + um[1:])
    return uf


def _axis_terms(phi, conv, gamma, F, grad, d_axis, area, conservative,
                use_sou, axis):
    """Per-axis face coefficients and explicit corrections.

    Returns (a_low_nb, a_high_nb, diag_low, diag_high, b_low, b_high)
    where "low"/"high" refer to the two cells adjacent to each interior
    face along ``axis``; arrays have the interior-face shape (face axis
    first).
    """
    ph = np.moveaxis(phi, axis, 0)
    cv = np.moveaxis(conv, axis, 0)
    gm = np.moveaxis(gamma, axis, 0)
    gr = np.moveaxis(grad, axis, 0)
    Fi = np.moveaxis(F, axis, 0)[1:-1]  # interior faces only
    d = d_axis.reshape(-1, 1, 1)

    # distance-weighted harmonic diffusion conductance
    D = area / (d[:-1] / (2.0 * gm[:-1]) + d[1:] / (2.0 * gm[1:]))

    phi_lo, phi_hi = ph[:-1], ph[1:]
    Fpos = Fi > 0.0

    # second-order upwind face value: upwind value plus upwind-side
    # gradient extrapolation, clipped to the adjacent-cell band
    if use_sou:
        ext_lo = phi_lo + gr[:-1] * (0.5 * d[:-1])
        ext_hi = phi_hi - gr[1:] * (0.5 * d[1:])
        phi_up = np.where(Fpos, phi_lo, phi_hi)
        phi_sou = np.where(Fpos, ext_lo, ext_hi)
        band_lo = np.minimum(phi_lo, phi_hi)
        band_hi = np.maximum(phi_lo, phi_hi)
        corr = np.clip(phi_sou, band_lo, band_hi) - phi_up
    else:
        corr = np.zeros_like(Fi)

    if conservative:
        # flux F*phi_f crosses the face: out of low cell, into high cell
        a_low_nb = np.maximum(-Fi, 0.0) + D     # coeff of high value in low eq
        a_high_nb = np.maximum(Fi, 0.0) + D     # coeff of low value in high eq
        diag_low = np.maximum(Fi, 0.0) + D
        diag_high = np.maximum(-Fi, 0.0) + D
        b_low = -Fi * corr
        b_high = Fi * corr
    else:
        # non-conservative u.grad(phi): only the inflow side of each face
        # picks up a term, scaled by the local convection coefficient
        cin_low = cv[:-1] * np.maximum(-Fi, 0.0)
        cin_high = cv[1:] * np.maximum(Fi, 0.0)
        a_low_nb = cin_low + D
        a_high_nb = cin_high + D
        diag_low = cin_low + D
        diag_high = cin_high + D
        b_low = np.where(Fpos, 0.0, -cv[:-1] * Fi * corr)
        b_high = np.where(Fpos, cv[1:] * Fi * corr, 0.0)
    return a_low_nb, a_high_nb, diag_low, diag_high, b_low, b_high


def assemble_system(phi_iter, phi_old, inertia, conv, conservative,
                    gamma_x, gamma_y, gamma_z, Fx, Fy, Fz,
                    gx, gy, gz, use_sou,
                    rc_xlo, rv_xlo, rc_xhi, rv_xhi,
                    rc_ylo, rv_ylo, rc_yhi, rv_yhi,
                    rc_zlo, rv_zlo, rc_zhi, rv_zhi,
                    dx, dy, dz, dt):
    """Implicit-Euler finite-volume system for one transport equation."""
    nx, ny, nz = phi_iter.shape
    vol = (dx[:, None, None] * dy[None, :, None] * dz[None, None, :])
    ax = dy[:, None] * dz[None, :]          # (ny, nz)
    ay = dx[:, None] * dz[None, :]          # (nx, nz)
    az = dx[:, None] * dy[None, :]          # (nx, ny)

    aP = inertia * vol / dt
    b = aP * phi_old
    aXm = np.zeros_like(aP)
    aXp = np.zeros_like(aP)
    aYm = np.zeros_like(aP)
    aYp = np.zeros_like(aP)
    aZm = np.zeros_like(aP)
    aZp = np.zeros_like(aP)

    for axis, (gamma, F, grad, d, area, a_m, a_p) in enumerate((
            (gamma_x, Fx, gx, dx, ax[None, :, :], aXm, aXp),
            (gamma_y, Fy, gy, dy, ay[:, None, :], aYm, aYp),
            (gamma_z, Fz, gz, dz, az[:, :, None], aZm, aZp))):
        if phi_iter.shape[axis] == 1:
            continue
        face_area = np.broadcast_to(
            np.moveaxis(area, axis, 0),
            np.moveaxis(phi_iter, axis, 0).shape)[:-1]
        alo, ahi, dlo, dhi, blo, bhi = _axis_terms(
            phi_iter, conv, gamma, F, grad, d, face_area,
            conservative, use_sou, axis)
        np.moveaxis(a_p, axis, 0)[:-1] += alo
        np.moveaxis(a_m, axis, 0)[1:] += ahi
        np.moveaxis(aP, axis, 0)[:-1] += dlo
        np.moveaxis(aP, axis, 0)[1:] += dhi
        np.moveaxis(b, axis, 0)[:-1] += blo
        np.moveaxis(b, axis, 0)[1:] += bhi

    # Robin boundary terms: coef * area * (drive - phi_P)
    for (rc, rv, axis, side, area2d) in (
            (rc_xlo, rv_xlo, 0, 0, ax), (rc_xhi, rv_xhi, 0, 1, ax),
            (rc_ylo, rv_ylo, 1, 0, ay), (rc_yhi, rv_yhi, 1, 1, ay),
            (rc_zlo, rv_zlo, 2, 0, az), (rc_zhi, rv_zhi, 2, 1, az)):
        idx = -1 if side else 0
        hA = rc * area2d
        np.moveaxis(aP, axis, 0)[idx] += hA
        np.moveaxis(b, axis, 0)[idx] += hA * rv

    return aP, aXm, aXp, aYm, aYp, aZm, aZp, b


def stencil_matvec(aP, aXm, aXp, aYm, aYp, aZm, aZp, x):
    """y = A x for the 7-point stencil (diagonal aP, negative neighbours)."""
    y = aP * x
    y[1:, :, :] -= aXm[1:, :, :] * x[:-1, :, :]
    y[:-1, :, :] -= aXp[:-1, :, :] * x[1:, :, :]
    y[:, 1:, :] -= aYm[:, 1:, :] * x[:, :-1, :]
    y[:, :-1, :] -= aYp[:, :-1, :] * x[:, 1:, :]
    y[:, :, 1:] -= aZm[:, :, 1:] * x[:, :, :-1]
    y[:, :, :-1] -= aZp[:, :, :-1] * x[:, :, 1:]
    return y


def scaled_residual_parts(aP, aXm, aXp, aYm, aYp, aZm, aZp, b, phi):
    """(sum |A phi - b|, sum |aP phi|) for the scaled residual."""
    r = stencil_matvec(aP, aXm, aXp, aYm, aYp, aZm, aZp, phi) - b
    return float(np.abs(r).sum()), float(np.abs(aP * phi).sum())


narx_rollout = _rollout.narx_rollout
narx_step = _rollout.narx_step

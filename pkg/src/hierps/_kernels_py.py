"""Pure-numpy round kernels; fallback when the compiled extension is absent.

Both kernels mutate the state arrays in place and implement the same
two-phase update as the compiled versions in ``_kernels.pyx``:

  phase 1: stage z/(d+1) onto the cumulative send counters and broadcast;
           operational edges catch the receiver's counters up, silent edges
           leave the backlog parked on the edge's virtual node;
  phase 2: stage another z+/(d+1) per neighbour and keep z+/(d+1) locally.

The tracking variant additionally pushes every value-side quantity through
the dynamics matrix and subtracts the stepped gradient; the mass side is
never touched by the dynamics.
"""

from __future__ import annotations

import numpy as np


def consensus_round(z, m, sigma, sigma_tilde, rho, rho_tilde, inv_deg, src, dst, bits):
    inv = inv_deg[:, None]
    sigma += z * inv
    sigma_tilde += m * inv_deg
    zp = z * inv
    mp = m * inv_deg

    op = bits.astype(bool)
    new_rho = np.where(op[:, None], sigma[src], rho)
    new_rt = np.where(op, sigma_tilde[src], rho_tilde)
    np.add.at(zp, dst, new_rho - rho)
    np.add.at(mp, dst, new_rt - rho_tilde)
    rho[:] = new_rho
    rho_tilde[:] = new_rt

    sigma += zp * inv
    sigma_tilde += mp * inv_deg
    z[:] = zp * inv
    m[:] = mp * inv_deg


def tracking_round(z, m, sigma, sigma_tilde, rho, rho_tilde, inv_deg, src, dst, bits,
                   dyn, eta_grad):
    inv = inv_deg[:, None]
    sigma += z * inv
    sigma_tilde += m * inv_deg
    zp = z * inv
    mp = m * inv_deg

    op = bits.astype(bool)
    rho_plus = np.where(op[:, None], sigma[src], rho)
    rt_plus = np.where(op, sigma_tilde[src], rho_tilde)
    np.add.at(zp, dst, rho_plus - rho)
    np.add.at(mp, dst, rt_plus - rho_tilde)

    dyn_t = dyn.T
    sigma[:] = (sigma + zp * inv) @ dyn_t
    sigma_tilde += mp * inv_deg
    rho[:] = rho_plus @ dyn_t
    rho_tilde[:] = rt_plus
    z[:] = (zp * inv) @ dyn_t - eta_grad
    m[:] = mp * inv_deg

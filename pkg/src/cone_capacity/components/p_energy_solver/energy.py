"""Regularized p-Dirichlet energy with its gradient and Hessian."""
from concurrent.futures import ThreadPoolExecutor, as_completed
from typing import NamedTuple, Optional

import numpy as np
from scipy import sparse

from cone_capacity.components.meridian_mesh import MeridianMesh


class EnergyEvaluation(NamedTuple):
    energy: float
    gradient: np.ndarray
    hessian: Optional[sparse.csr_matrix]


def _safe_power(s: np.ndarray, exponent: float) -> np.ndarray:
    """s**exponent with 0 wherever s == 0 would blow up."""
    if exponent >= 0.0:
        return s ** exponent
    out = np.zeros_like(s)
    positive = s > 0.0
    out[positive] = s[positive] ** exponent
    return out


def _element_chunk(mesh: MeridianMesh, u: np.ndarray, p: float, eps: float,
                   chunk: slice, with_hessian: bool):
    grad_ops = mesh.qp_grad[chunk]                            # (e, q, a, d)
    weights = mesh.qp_weight[chunk]                           # (e, q)
    u_el = u[mesh.elements[chunk]]                            # (e, a)

    grad_u = np.einsum('eqad,ea->eqd', grad_ops, u_el)
    s = np.einsum('eqd,eqd->eq', grad_u, grad_u) + eps * eps

    energy = float(np.sum(weights * s ** (p / 2.0))) / p
    coef = weights * _safe_power(s, (p - 2.0) / 2.0)
    local_grad = np.einsum('eq,eqd,eqad->ea', coef, grad_u, grad_ops)

    local_hess = None
    if with_hessian:
        local_hess = np.einsum('eq,eqad,eqbd->eab', coef, grad_ops, grad_ops)
        if p != 2.0:
            coef2 = (p - 2.0) * weights * _safe_power(s, (p - 4.0) / 2.0)
            projected = np.einsum('eqad,eqd->eqa', grad_ops, grad_u)
            local_hess += np.einsum('eq,eqa,eqb->eab', coef2, projected, projected)
    return energy, local_grad, local_hess


def _chunks(n_elements: int, threads: int):
    if threads <= 1:
        return [slice(0, n_elements)]
    bounds = np.linspace(0, n_elements, threads + 1).astype(int)
    return [slice(a, b) for a, b in zip(bounds[:-1], bounds[1:]) if b > a]


def energy_gradient_hessian(mesh: MeridianMesh, u: np.ndarray, p: float, eps: float,
                            free: Optional[np.ndarray] = None, with_hessian: bool = True,
                            threads: int = 1, deterministic: bool = True) -> EnergyEvaluation:
    """
    E = (1/p) int (|grad u|^2 + eps^2)^(p/2) dmu over the mesh.

    Gradient and Hessian are restricted to the `free` mask (default: every
    node that is neither SIGMA nor OUTER). Element contributions are
    computed in chunks on a thread pool; with `deterministic` the chunks
    are reduced in element order, otherwise in completion order.
    """
    u = np.asarray(u, dtype=float)
    if free is None:
        free = mesh.free_mask
    chunks = _chunks(mesh.n_elements, threads)

    if len(chunks) == 1:
        results = [(chunks[0], _element_chunk(mesh, u, p, eps, chunks[0], with_hessian))]
    else:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            futures = {pool.submit(_element_chunk, mesh, u, p, eps, c, with_hessian): c for c in chunks}
            if deterministic:
                results = [(futures[f], f.result()) for f in futures]
            else:
                results = [(futures[f], f.result()) for f in as_completed(futures)]

    energy = 0.0
    gradient = np.zeros(mesh.n_nodes)
    rows, cols, vals = [], [], []
    for chunk, (e_chunk, g_chunk, h_chunk) in results:
        energy += e_chunk
        conn = mesh.elements[chunk]
        gradient += np.bincount(conn.ravel(), weights=g_chunk.ravel(), minlength=mesh.n_nodes)
        if with_hessian:
            rows.append(np.repeat(conn, 4, axis=1).ravel())
            cols.append(np.tile(conn, (1, 4)).ravel())
            vals.append(h_chunk.ravel())

    hessian = None
    if with_hessian:
        full = sparse.coo_matrix(
            (np.concatenate(vals), (np.concatenate(rows), np.concatenate(cols))),
            shape=(mesh.n_nodes, mesh.n_nodes)
        ).tocsr()
        hessian = full[free][:, free]
    return EnergyEvaluation(energy, gradient[free], hessian)

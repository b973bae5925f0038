"""Pure numpy implementation of the kernels in ``_core.pyx``.

Same signatures and in-place semantics; selected when the compiled module is
unavailable or ``SYNTURB_PURE_PYTHON`` is set.
"""
import numpy as np


def _mode_sum(x, fidx, k, are, aim):
    if k.shape[0] == 1:
        th = x @ k[0].T
        c = np.cos(th) - 1.0
        s = np.sin(th)
        return c @ are[0] - s @ aim[0]
    kk = k[fidx]
    th = np.einsum("nmd,nd->nm", kk, x)
    c = np.cos(th) - 1.0
    s = np.sin(th)
    return np.einsum("nm,nmd->nd", c, are[fidx]) - np.einsum("nm,nmd->nd", s, aim[fidx])


def increment_sum(x, fidx, k, are, aim, scale, out):
    out[...] = scale * _mode_sum(x, fidx, k, are, aim)


def euler_step(x, fidx, k, are, aim, drift_dt, noise, noise_scale):
    if drift_dt != 0.0:
        v = _mode_sum(x, fidx, k, are, aim)
        x += drift_dt * v + noise_scale * noise
    else:
        x += noise_scale * noise


def limit_step(x, dt, noise, r_tab, ll_tab, nn_tab, coef, two_eta, kappa0,
               transverse, closed, jitter):
    d = x.shape[1]
    r = np.sqrt(np.einsum("nd,nd->n", x, x))
    with np.errstate(divide="ignore", invalid="ignore"):
        if closed:
            dl = coef * r**two_eta
            dn = transverse * dl
        else:
            lr = np.log(np.where(r > 0, r, 1.0))
            lt = np.log(r_tab)
            lo = np.clip(np.searchsorted(r_tab, r, side="right") - 1, 0, len(r_tab) - 2)
            w = (lr - lt[lo]) / (lt[lo + 1] - lt[lo])
            dl = np.exp((1 - w) * np.log(ll_tab[lo]) + w * np.log(ll_tab[lo + 1]))
            dn = np.exp((1 - w) * np.log(nn_tab[lo]) + w * np.log(nn_tab[lo + 1]))
        xh = np.where(r[:, None] > 0, x / r[:, None], 0.0)
    dl = np.where(r > 0, dl, 0.0) + kappa0
    dn = np.where(r > 0, dn, 0.0) + kappa0
    fl = jitter * (dl + (d - 1) * dn)
    dl = np.maximum(dl, fl)
    dn = np.maximum(dn, fl)
    step = np.where(dt > 0, dt, 0.0)
    sl = np.sqrt(dl * step)
    sn = np.sqrt(dn * step)
    proj = np.einsum("nd,nd->n", xh, noise)
    x += (sl * proj)[:, None] * xh + sn[:, None] * (noise - proj[:, None] * xh)

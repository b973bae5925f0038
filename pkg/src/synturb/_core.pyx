# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled mode-sum kernels."""
from libc.math cimport cos, sin, sqrt, log, exp, pow


def increment_sum(const double[:, ::1] x, const long[::1] fidx,
                  const double[:, :, ::1] k, const double[:, :, :] are,
                  const double[:, :, :] aim, double scale, double[:, ::1] out):
    """out[n] = scale * sum_m Re[(exp(i k.x) - 1) A_m] for the field fidx[n]."""
    cdef Py_ssize_t n, m, j, f
    cdef Py_ssize_t N = x.shape[0], M = k.shape[1], D = x.shape[1]
    cdef double th, c, s
    cdef double acc[3]
    with nogil:
        for n in range(N):
            f = fidx[n]
            for j in range(D):
                acc[j] = 0.0
            for m in range(M):
                th = 0.0
                for j in range(D):
                    th = th + k[f, m, j] * x[n, j]
                c = cos(th) - 1.0
                s = sin(th)
                for j in range(D):
                    acc[j] = acc[j] + c * are[f, m, j] - s * aim[f, m, j]
            for j in range(D):
                out[n, j] = scale * acc[j]


def euler_step(double[:, ::1] x, const long[::1] fidx,
               const double[:, :, ::1] k, const double[:, :, :] are,
               const double[:, :, :] aim, double drift_dt,
               const double[:, ::1] noise, double noise_scale):
    """In place: x += drift_dt * v(x) + noise_scale * noise."""
    cdef Py_ssize_t n, m, j, f
    cdef Py_ssize_t N = x.shape[0], M = k.shape[1], D = x.shape[1]
    cdef double th, c, s
    cdef double acc[3]
    with nogil:
        for n in range(N):
            f = fidx[n]
            for j in range(D):
                acc[j] = 0.0
            if drift_dt != 0.0:
                for m in range(M):
                    th = 0.0
                    for j in range(D):
                        th = th + k[f, m, j] * x[n, j]
                    c = cos(th) - 1.0
                    s = sin(th)
                    for j in range(D):
                        acc[j] = acc[j] + c * are[f, m, j] - s * aim[f, m, j]
            for j in range(D):
                x[n, j] = x[n, j] + drift_dt * acc[j] + noise_scale * noise[n, j]


def limit_step(double[:, ::1] x, const double[::1] dt, const double[:, ::1] noise,
               const double[::1] r_tab, const double[::1] ll_tab, const double[::1] nn_tab,
               double coef, double two_eta, double kappa0, double transverse, int closed,
               double jitter):
    """One step of the limit pair diffusion with D = kappa0 I + D_LL xx + D_NN (I - xx).

    With ``closed`` the components are ``coef |x|^two_eta`` and
    ``transverse * coef |x|^two_eta``; otherwise they are interpolated
    log-linearly from the radial table (power-law extrapolation at the ends).
    """
    cdef Py_ssize_t n, j, lo, hi, mid
    cdef Py_ssize_t N = x.shape[0], D = x.shape[1], T = r_tab.shape[0]
    cdef double r, dl, dn, proj, sl, sn, w, lr
    cdef double xh[3]
    with nogil:
        for n in range(N):
            if dt[n] <= 0.0:
                continue
            r = 0.0
            for j in range(D):
                r = r + x[n, j] * x[n, j]
            r = sqrt(r)
            if r > 0.0:
                if closed:
                    dl = coef * pow(r, two_eta)
                    dn = transverse * dl
                else:
                    lr = log(r)
                    if r <= r_tab[0]:
                        lo = 0
                    elif r >= r_tab[T - 1]:
                        lo = T - 2
                    else:
                        lo = 0
                        hi = T - 1
                        while hi - lo > 1:
                            mid = (lo + hi) // 2
                            if r_tab[mid] <= r:
                                lo = mid
                            else:
                                hi = mid
                    w = (lr - log(r_tab[lo])) / (log(r_tab[lo + 1]) - log(r_tab[lo]))
                    dl = exp((1.0 - w) * log(ll_tab[lo]) + w * log(ll_tab[lo + 1]))
                    dn = exp((1.0 - w) * log(nn_tab[lo]) + w * log(nn_tab[lo + 1]))
                for j in range(D):
                    xh[j] = x[n, j] / r
            else:
                dl = 0.0
                dn = 0.0
                for j in range(D):
                    xh[j] = 0.0
            dl = dl + kappa0
            dn = dn + kappa0
            w = jitter * (dl + (D - 1) * dn)
            if dl < w:
                dl = w
            if dn < w:
                dn = w
            sl = sqrt(dl * dt[n])
            sn = sqrt(dn * dt[n])
            proj = 0.0
            for j in range(D):
                proj = proj + xh[j] * noise[n, j]
            for j in range(D):
                x[n, j] = x[n, j] + sl * proj * xh[j] + sn * (noise[n, j] - proj * xh[j])

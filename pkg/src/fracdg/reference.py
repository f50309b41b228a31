"""Reference solutions: exact trigonometric evolutions and manufactured targets.

For the linear flux f(u) = c u the fractional equation diagonalizes in
Fourier space: mode k evolves by the factor exp((-i c xi_k - |xi_k|^lam) t),
i.e. pure advection at speed c with modal decay exp(-|xi_k|^lam t). That
gives closed-form space-time solutions for trigonometric initial data, used
as exact references in the convergence studies.

For nonlinear fluxes a chosen trigonometric target u* is made an exact
solution by adding the source s = u*_t + f(u*)_x - g[u*], all three terms
available in closed form.
"""

import numpy as np

from .mesh import build_mesh, l2_project


class TrigSolution:
    """Exact solution of u_t + c u_x = g[u] with trigonometric initial data.

    terms is an iterable of (k, a, b) with integer k >= 0 meaning the
    initial-data contribution a cos(xi_k x) + b sin(xi_k x), xi_k = 2 pi k/L.
    """

    def __init__(self, lam, L, terms, speed=1.0):
        if not 0.0 < lam < 1.0:
            raise ValueError("lam must lie in (0, 1), got %r" % (lam,))
        self.lam = float(lam)
        self.L = float(L)
        self.speed = float(speed)
        self.terms = [(int(k), float(a), float(b)) for k, a, b in terms]
        if any(k < 0 for k, _, _ in self.terms):
            raise ValueError("mode indices must be nonnegative")

    def _parts(self, x, t):
        x = np.asarray(x, dtype=float)
        for k, a, b in self.terms:
            xi = 2.0 * np.pi * k / self.L
            theta = xi * (x - self.speed * t)
            decay = np.exp(-abs(xi) ** self.lam * t)
            yield xi, a, b, decay, np.cos(theta), np.sin(theta)

    def u(self, x, t=0.0):
        out = np.zeros_like(np.asarray(x, dtype=float))
        for xi, a, b, d, cs, sn in self._parts(x, t):
            out += d * (a * cs + b * sn)
        return out

    def dudx(self, x, t=0.0):
        out = np.zeros_like(np.asarray(x, dtype=float))
        for xi, a, b, d, cs, sn in self._parts(x, t):
            out += d * xi * (-a * sn + b * cs)
        return out

    def dudt(self, x, t=0.0):
        c = self.speed
        out = np.zeros_like(np.asarray(x, dtype=float))
        for xi, a, b, d, cs, sn in self._parts(x, t):
            nu = abs(xi) ** self.lam
            out += d * (-nu * (a * cs + b * sn) + c * xi * (a * sn - b * cs))
        return out

    def glam(self, x, t=0.0):
        out = np.zeros_like(np.asarray(x, dtype=float))
        for xi, a, b, d, cs, sn in self._parts(x, t):
            out += -abs(xi) ** self.lam * d * (a * cs + b * sn)
        return out

    def hat(self, t=0.0):
        """Two-sided complex Fourier coefficients {k: uhat_k(t)}."""
        out = {}
        for k, a, b in self.terms:
            xi = 2.0 * np.pi * k / self.L
            mu = -1j * self.speed * xi - abs(xi) ** self.lam
            amp = np.exp(mu * t)
            if k == 0:
                out[0] = out.get(0, 0.0) + a
            else:
                out[k] = out.get(k, 0.0) + 0.5 * (a - 1j * b) * amp
                out[-k] = out.get(-k, 0.0) + 0.5 * (a + 1j * b) * np.conj(amp)
        return out

    def l2_norm_sq(self, t=0.0):
        total = 0.0
        for k, a, b in self.terms:
            xi = 2.0 * np.pi * k / self.L
            decay = np.exp(-2.0 * abs(xi) ** self.lam * t)
            total += a * a if k == 0 else 0.5 * decay * (a * a + b * b)
        return self.L * total

    def seminorm_sq(self, t=0.0):
        total = 0.0
        for k, a, b in self.terms:
            if k == 0:
                continue
            xi = 2.0 * np.pi * k / self.L
            decay = np.exp(-2.0 * xi ** self.lam * t)
            total += 0.5 * xi ** self.lam * decay * (a * a + b * b)
        return self.L * total


class ManufacturedSolution:
    """Trigonometric traveling target made exact by a closed-form source.

    u*(x, t) = offset + sum a cos(xi_k x - omega t) + b sin(xi_k x - omega t)
    solves u_t + f(u)_x = g[u] + s with
    s = u*_t + f'(u*) u*_x - g[u*].
    """

    def __init__(self, model, lam, L, terms, omega=1.0, offset=0.0):
        if not 0.0 < lam < 1.0:
            raise ValueError("lam must lie in (0, 1), got %r" % (lam,))
        self.model = model
        self.lam = float(lam)
        self.L = float(L)
        self.omega = float(omega)
        self.offset = float(offset)
        self.terms = [(int(k), float(a), float(b)) for k, a, b in terms]
        if any(k <= 0 for k, _, _ in self.terms):
            raise ValueError("mode indices must be positive")

    def _phases(self, x, t):
        x = np.asarray(x, dtype=float)
        for k, a, b in self.terms:
            xi = 2.0 * np.pi * k / self.L
            theta = xi * x - self.omega * t
            yield xi, a, b, np.cos(theta), np.sin(theta)

    def u(self, x, t=0.0):
        out = np.full_like(np.asarray(x, dtype=float), self.offset)
        for xi, a, b, cs, sn in self._phases(x, t):
            out += a * cs + b * sn
        return out

    def dudx(self, x, t=0.0):
        out = np.zeros_like(np.asarray(x, dtype=float))
        for xi, a, b, cs, sn in self._phases(x, t):
            out += xi * (-a * sn + b * cs)
        return out

    def dudt(self, x, t=0.0):
        out = np.zeros_like(np.asarray(x, dtype=float))
        for xi, a, b, cs, sn in self._phases(x, t):
            out += self.omega * (a * sn - b * cs)
        return out

    def glam(self, x, t=0.0):
        out = np.zeros_like(np.asarray(x, dtype=float))
        for xi, a, b, cs, sn in self._phases(x, t):
            out += -xi ** self.lam * (a * cs + b * sn)
        return out

    def source(self, x, t=0.0):
        return (self.dudt(x, t) + self.model.df(self.u(x, t)) * self.dudx(x, t)
                - self.glam(x, t))


def fine_grid_reference(u0, model, flux_kind, lam, L, T, n_fine, k,
                        c_cfl=0.05, source=None, eps_asm=1e-10, cache_dir=None):
    """Numerical reference: run the scheme on a fine mesh and return it.

    Used when no closed-form solution exists. Returns the fine-mesh DG
    solution at time T; compare against it with pointwise evaluation.
    """
    from .scheme import run

    mesh = build_mesh(L, n_fine)
    uh0 = l2_project(u0, mesh, k, npts=k + 4)
    result = run(uh0, model, flux_kind, lam, T, c_cfl=c_cfl, source=source,
                 eps_asm=eps_asm, cache_dir=cache_dir)
    return result.u

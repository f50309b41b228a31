"""Explicit two-stage Runge-Kutta DG time stepping.

Each stage pairs the semidiscrete form against every test function: the
convective part integrates f(u) against test derivatives inside cells and
exchanges upwind-type numerical fluxes at the interfaces, the nonlocal part
is the assembled Galerkin fractional operator, and an optional space-time
source is paired by quadrature. With the orthonormal basis the mass matrix
is the identity, so stages act directly on coefficient arrays:

    w       = u + tau rhs(u, t)
    u_next  = (u + w + tau rhs(w, t + tau)) / 2

The step size follows tau = c_cfl h for k = 1 and tau = c_cfl h^(4/3) for
k >= 2, with the final step truncated so the last time level lands on T
exactly.
"""

import numpy as np

from .mesh import DGFunction, legendre_table, legendre_deriv_table, l2_norm
from .fluxes import NumericalFlux
from .fractional import assemble_operator


def convective_rhs(u, model, nflux):
    """Coefficient contributions of the convection terms, all cells at once."""
    mesh, k = u.mesh, u.k
    npts = k + 2
    xi, w, _ = mesh.quad(npts)
    m = np.arange(k + 1)
    scale = np.sqrt((2 * m + 1) / mesh.h)
    dB = legendre_deriv_table(k, xi) * scale[:, None]   # test derivative * (h/2)
    fvals = model.f(u.eval_at_ref(xi))
    out = np.einsum("jq,q,mq->jm", fvals, w, dB)        # (h/2)(2/h) cancels

    minus, plus = u.traces()
    hval = nflux.evaluate_many(minus, plus)             # flux at node x_j
    hnext = np.roll(hval, -1)
    out += hval[:, None] * (scale * (-1.0) ** m)[None, :]
    out -= hnext[:, None] * scale[None, :]
    return out


def source_rhs(source, mesh, k, t, npts=None):
    """L2 pairing of the source at time t against all test functions."""
    if npts is None:
        npts = k + 3
    xi, w, xq = mesh.quad(npts)
    m = np.arange(k + 1)
    B = legendre_table(k, xi) * np.sqrt((2 * m + 1) / mesh.h)[:, None]
    vals = np.asarray(source(xq.reshape(-1), t), dtype=float).reshape(mesh.N, npts)
    return 0.5 * mesh.h * np.einsum("jq,q,mq->jm", vals, w, B)


def cfl_timestep(h, k, c_cfl):
    return c_cfl * h if k <= 1 else c_cfl * h ** (4.0 / 3.0)


class TrajectoryRecord:
    """Per-step scalars (time, mass, L2 norm, optional seminorm) and snapshots."""

    def __init__(self):
        self.times = []
        self.mass = []
        self.l2 = []
        self.seminorm = []
        self.snapshots = []
        self.blew_up = False
        self.n_steps = 0

    def log(self, t, u, op=None):
        self.times.append(float(t))
        self.mass.append(u.mass())
        self.l2.append(l2_norm(u))
        if op is not None:
            self.seminorm.append(op.seminorm(u))

    def arrays(self):
        out = {"times": np.asarray(self.times), "mass": np.asarray(self.mass),
               "l2": np.asarray(self.l2)}
        if self.seminorm:
            out["seminorm"] = np.asarray(self.seminorm)
        return out


class RunResult:
    def __init__(self, u, record, op):
        self.u = u
        self.record = record
        self.op = op


def run(u0, model, flux_kind, lam, T, c_cfl=0.1, tau=None, source=None, op=None,
        observer=None, snapshot_every=0, record_seminorm=False,
        blowup_threshold=1e6, eps_asm=1e-10, cache_dir=None):
    """March the scheme from u0 to time T and return the final state.

    lam = None disables the nonlocal term (pure conservation law); otherwise
    the operator is assembled (or taken from op when given). observer, when
    set, is called as observer(step, t_old, tau_step, u_old, w, u_new) after
    every step; snapshot_every > 0 stores coefficient copies at that cadence.
    """
    mesh, k = u0.mesh, u0.k
    if T <= 0:
        raise ValueError("final time must be positive")
    if lam is not None and op is None:
        op = assemble_operator(mesh, k, lam, eps_asm=eps_asm, cache_dir=cache_dir)
    nflux = NumericalFlux(model, flux_kind)
    if tau is None:
        tau = cfl_timestep(mesh.h, k, c_cfl)
    n_steps = max(1, int(np.ceil(T / tau - 1e-12)))

    def rhs(v, t):
        out = convective_rhs(v, model, nflux)
        if op is not None:
            out += op.apply(v.coeffs)
        if source is not None:
            out += source_rhs(source, mesh, k, t)
        return out

    record = TrajectoryRecord()
    rec_op = op if (record_seminorm and op is not None) else None
    u = u0.copy()
    record.log(0.0, u, rec_op)
    if snapshot_every:
        record.snapshots.append((0.0, u.coeffs.copy()))
    t = 0.0
    for step in range(1, n_steps + 1):
        tau_step = tau if step < n_steps else T - (n_steps - 1) * tau
        w = DGFunction(mesh, k, u.coeffs + tau_step * rhs(u, t))
        u_new = DGFunction(mesh, k,
                           0.5 * (u.coeffs + w.coeffs + tau_step * rhs(w, t + tau_step)))
        t_old, t = t, (T if step == n_steps else t + tau_step)
        ok = np.isfinite(u_new.coeffs).all() and l2_norm(u_new) < blowup_threshold
        if not ok:
            record.blew_up = True
            break
        if observer is not None:
            observer(step, t_old, tau_step, u, w, u_new)
        u = u_new
        record.n_steps = step
        record.log(t, u, rec_op)
        if snapshot_every and step % snapshot_every == 0:
            record.snapshots.append((t, u.coeffs.copy()))
    return RunResult(u, record, op)


def consistency_defect(sol, tau):
    """One-step defect of the two-stage update against the exact evolution.

    For the linear flux every mode evolves by exp(tau mu_k) with
    mu_k = -i c xi_k - |xi_k|^lam, while the stepper applies the quadratic
    Taylor polynomial; the weighted defect therefore shrinks like tau^3.
    """
    hat = sol.hat(0.0)
    total = 0.0
    for k, c in hat.items():
        xi = 2.0 * np.pi * k / sol.L
        mu = -1j * sol.speed * xi - abs(xi) ** sol.lam
        z = tau * mu
        diff = np.exp(z) - (1.0 + z + 0.5 * z * z)
        total += abs(c) ** 2 * abs(diff) ** 2
    return float(np.sqrt(sol.L * total))


def consistency_defect_ratios(sol, tau0, n_halvings=3):
    """Defect ratios under step halving; third-order local accuracy gives 8."""
    taus = [tau0 / 2 ** i for i in range(n_halvings + 1)]
    defects = [consistency_defect(sol, t) for t in taus]
    return [defects[i] / defects[i + 1] for i in range(n_halvings)]

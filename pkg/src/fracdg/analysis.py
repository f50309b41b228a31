"""Error norms, convergence rates, and the per-step energy-identity check.

The headline error is the discrete space-time energy norm

    max_n ||u^n - u_h^n||  +  ( sum_m tau_m |u^m - u_h^m|^2_(lam/2) )^(1/2),

accumulated online during a run: at each level the total error is embedded
into the same mesh at degree k+3 (projected exact solution minus
zero-padded numerical solution) so its nonlocal seminorm can be evaluated
with an assembled higher-degree operator.

The energy-identity check reproduces, term by term, the exact per-step
balance satisfied by the discrete errors xi^n = u_h^n - P^n u^n and
zeta^n = w_h^n - P^n w^n against the sided projections P^n picked by the
upwind rule (strict sign initially, hysteresis band h afterwards):

    ||xi^(n+1)||^2 - ||xi^n||^2 =
        ||xi^(n+1) - zeta^n||^2 + K^n(xi^n) + L^n(zeta^n)
        - tau [ D(zeta_pi, zeta^n) + D(xi_pi, xi^n) ]
        + tau [ xi^T B xi + zeta^T B zeta ],

where the last bracket is the dissipative Gagliardo term written through
the assembled form. Every ingredient is either exact coefficient algebra,
an exact closed-form field of the linear-flux solution, or fine Gauss
quadrature of a smooth-times-polynomial integrand, so the residual sits at
round-off level, far below the verification tolerance.
"""

import numpy as np

from .mesh import DGFunction, legendre_table, legendre_deriv_table, l2_project, l2_norm
from .fluxes import NumericalFlux
from .fractional import assemble_operator
from .projections import gauss_radau_project, cell_speed_range, SwitchTracker
from .scheme import convective_rhs


def l2_error(u_h, v, npts=None):
    """||v - u_h|| by per-cell Gauss quadrature of the squared residual."""
    mesh, k = u_h.mesh, u_h.k
    if npts is None:
        npts = k + 8
    xi, w, xq = mesh.quad(npts)
    resid = np.asarray(v(xq.reshape(-1)), dtype=float).reshape(mesh.N, npts) \
        - u_h.eval_at_ref(xi)
    return float(np.sqrt(0.5 * mesh.h * np.sum(w * resid ** 2)))


def jump_error(u_h):
    """Interface jump seminorm of the error against any continuous target."""
    return float(np.sqrt(np.sum(u_h.jumps() ** 2)))


def pad_to_degree(u_h, k_hi):
    """Embed a DG function into the same mesh at a higher degree."""
    if k_hi < u_h.k:
        raise ValueError("target degree must not be smaller")
    coeffs = np.zeros((u_h.mesh.N, k_hi + 1))
    coeffs[:, :u_h.k + 1] = u_h.coeffs
    return DGFunction(u_h.mesh, k_hi, coeffs)


def eoc(h_values, errors):
    """Experimental orders log(e_i/e_{i+1}) / log(h_i/h_{i+1})."""
    h_values = np.asarray(h_values, dtype=float)
    errors = np.asarray(errors, dtype=float)
    return list(np.log(errors[:-1] / errors[1:]) / np.log(h_values[:-1] / h_values[1:]))


class EocTable:
    """Rows (h, error, eoc) with eoc = None on the first row."""

    def __init__(self, pairs):
        pairs = [(float(h), float(e)) for h, e in pairs]
        if len(pairs) < 2:
            raise ValueError("need at least two (h, error) rows")
        hs = [h for h, _ in pairs]
        if any(h2 >= h1 for h1, h2 in zip(hs, hs[1:])):
            raise ValueError("h must be strictly decreasing, got %r" % hs)
        rates = eoc(hs, [e for _, e in pairs])
        self.rows = [(pairs[0][0], pairs[0][1], None)]
        self.rows += [(h, e, float(r)) for (h, e), r in zip(pairs[1:], rates)]

    def orders(self):
        return [r for _, _, r in self.rows[1:]]

    def __iter__(self):
        return iter(self.rows)

    def __len__(self):
        return len(self.rows)


class ErrorRecord:
    """One grid's worth of a convergence study; wall_time stays in memory only."""

    def __init__(self, N, h, tau, k, lam, l2_error, energy_error, jump,
                 wall_time=None, eoc=None):
        self.N = int(N)
        self.h = float(h)
        self.tau = float(tau)
        self.k = int(k)
        self.lam = float(lam)
        self.l2_error = float(l2_error)
        self.energy_error = float(energy_error)
        self.jump = float(jump)
        self.wall_time = wall_time
        self.eoc = eoc

    def to_dict(self):
        return {"h": self.h, "tau": self.tau, "N": self.N, "k": self.k,
                "lambda": self.lam, "l2_error": self.l2_error,
                "energy_error": self.energy_error, "jump": self.jump,
                "eoc": self.eoc}


class EnergyErrorAccumulator:
    """Online space-time energy error against a known exact solution.

    Wire .observer into scheme.run after calling start() with the initial
    numerical state; finalize() returns the accumulated norms. The seminorm
    of each level's error is measured in a degree k+3 embedding with its own
    assembled operator.
    """

    def __init__(self, exact_u, mesh, k, lam, eps_asm=1e-10, cache_dir=None, extra=3):
        self.exact_u = exact_u
        self.mesh = mesh
        self.k = int(k)
        self.k_hi = int(k) + int(extra)
        self.lam = float(lam)
        self.op_hi = assemble_operator(mesh, self.k_hi, lam, eps_asm=eps_asm,
                                       cache_dir=cache_dir)
        self.max_l2 = 0.0
        self.semi_terms = []
        self._e_last = None

    def _error_embedding(self, u_h, t):
        proj = l2_project(lambda x: self.exact_u(x, t), self.mesh, self.k_hi,
                          npts=self.k_hi + 3)
        return DGFunction(self.mesh, self.k_hi,
                          proj.coeffs - pad_to_degree(u_h, self.k_hi).coeffs)

    def start(self, u_h0):
        e = self._error_embedding(u_h0, 0.0)
        self.max_l2 = l2_norm(e)
        self._e_last = e

    def observer(self, step, t_old, tau_step, u_old, w, u_new):
        if self._e_last is None:
            raise RuntimeError("call start() with the initial state first")
        self.semi_terms.append(tau_step * self.op_hi.seminorm(self._e_last) ** 2)
        e = self._error_embedding(u_new, t_old + tau_step)
        self.max_l2 = max(self.max_l2, l2_norm(e))
        self._e_last = e

    def finalize(self):
        semi = float(np.sqrt(sum(self.semi_terms)))
        return {"max_l2": float(self.max_l2), "semi_l2t": semi,
                "energy_error": float(self.max_l2) + semi}


def error_norms(result, exact_u, op_hi):
    """ErrorRecord from a run recorded with snapshot_every=1.

    exact_u(x, t) is the reference; op_hi is a higher-degree operator on the
    run's mesh used for the seminorm of the embedded error at every level.
    The seminorm sum uses left endpoints, matching the accumulator.
    """
    snaps = result.record.snapshots
    if len(snaps) != result.record.n_steps + 1:
        raise ValueError("need a snapshot at every level (snapshot_every=1); "
                         "got %d of %d" % (len(snaps), result.record.n_steps + 1))
    mesh, k = result.u.mesh, result.u.k
    if op_hi.k <= k or not op_hi.mesh.same_as(mesh):
        raise ValueError("op_hi must live on the same mesh at a higher degree")
    k_hi = op_hi.k

    def embed_error(coeffs, t):
        u_h = DGFunction(mesh, k, coeffs)
        proj = l2_project(lambda x: exact_u(x, t), mesh, k_hi, npts=k_hi + 3)
        return DGFunction(mesh, k_hi,
                          proj.coeffs - pad_to_degree(u_h, k_hi).coeffs)

    errs = [embed_error(c, t) for t, c in snaps]
    times = [t for t, _ in snaps]
    max_l2 = max(l2_norm(e) for e in errs)
    semi_sq = sum((t1 - t0) * op_hi.seminorm(e) ** 2
                  for t0, t1, e in zip(times, times[1:], errs))
    T = times[-1]
    tau = max(t1 - t0 for t0, t1 in zip(times, times[1:]))
    return ErrorRecord(
        N=mesh.N, h=mesh.h, tau=tau, k=k, lam=op_hi.lam,
        l2_error=l2_error(result.u, lambda x: exact_u(x, T)),
        energy_error=max_l2 + float(np.sqrt(semi_sq)),
        jump=float(np.sqrt(np.sum(errs[-1].jumps() ** 2))))


def _modal_stage_fields(sol, t, tau, x):
    """Closed-form u, w = u + tau u_t, w_x, g[u], g[w] at time t."""
    x = np.asarray(x, dtype=float)
    u = np.zeros_like(x)
    w = np.zeros_like(x)
    wx = np.zeros_like(x)
    gu = np.zeros_like(x)
    gw = np.zeros_like(x)
    for k, c in sol.hat(t).items():
        xi = 2.0 * np.pi * k / sol.L
        mu = -1j * sol.speed * xi - abs(xi) ** sol.lam
        mode = c * np.exp(1j * xi * x)
        stage = (1.0 + tau * mu) * mode
        u += mode.real
        w += stage.real
        wx += (1j * xi * stage).real
        gu += -abs(xi) ** sol.lam * mode.real
        gw += -abs(xi) ** sol.lam * stage.real
    return u, w, wx, gu, gw


class _PairingKit:
    """Reusable quadrature tables for pairing smooth fields with DG functions."""

    def __init__(self, mesh, k, npts):
        self.mesh, self.k, self.npts = mesh, k, npts
        self.xi, self.w, self.xq = mesh.quad(npts)
        m = np.arange(k + 1)
        scale = np.sqrt((2 * m + 1) / mesh.h)
        self.B = legendre_table(k, self.xi) * scale[:, None]
        self.dB = legendre_deriv_table(k, self.xi) * scale[:, None] * (2.0 / mesh.h)
        self.flatx = self.xq.reshape(-1)

    def pair(self, field_vals, phi):
        """int field * phi over the whole domain; field sampled on flatx."""
        vals = field_vals.reshape(self.mesh.N, self.npts)
        return float(0.5 * self.mesh.h
                     * np.sum(self.w * vals * phi.eval_at_ref(self.xi)))

    def continuous_form(self, model, field_vals, node_vals, phi):
        """Convection form of a continuous field against phi in V_h.

        Volume term integrates f(field) against phi_x; the interface flux of
        a continuous field reduces to f at the nodes by consistency.
        """
        vals = model.f(field_vals.reshape(self.mesh.N, self.npts))
        phi_x = phi.coeffs @ self.dB
        total = 0.5 * self.mesh.h * np.sum(self.w * vals * phi_x)
        fnod = model.f(np.asarray(node_vals, dtype=float))
        minus, plus = phi.traces()
        total += np.sum(fnod * (plus - minus))
        return float(total)


def energy_identity_residual(sol, model, flux_kind, mesh, k, T, tau=None,
                             c_cfl=0.1, eps_asm=1e-10, cache_dir=None, npts=None):
    """March the scheme and verify the per-step energy balance term by term.

    Restricted to linear fluxes: the stage field w = u + tau u_t, its
    derivative, and both fractional images are then available in closed
    Fourier form, so every term of the balance is computable without new
    discretization error. Returns per-step residuals and the participating
    term magnitudes; max_rel is the headline residual relative to the
    largest term in each step.

    The balance itself closes for any assembled matrix, so the check also
    records the dissipative terms: dissipation_ok asserts they never turn
    antidissipative, which is what a corrupted operator breaks.
    """
    lam = sol.lam
    op = assemble_operator(mesh, k, lam, eps_asm=eps_asm, cache_dir=cache_dir)
    nflux = NumericalFlux(model, flux_kind)
    kit = _PairingKit(mesh, k, npts or (k + 8))

    if tau is None:
        tau = c_cfl * mesh.h if k <= 1 else c_cfl * mesh.h ** (4.0 / 3.0)
    n_steps = max(1, int(np.ceil(T / tau - 1e-12)))

    tracker = SwitchTracker(mesh.N)
    lo, hi = cell_speed_range(model, lambda x: sol.u(x, 0.0), mesh)
    sides = tracker.observe(lo, hi)
    proj_u = gauss_radau_project(lambda x: sol.u(x, 0.0), mesh, k, sides,
                                 npts=kit.npts)
    u_h = proj_u.copy()          # xi^0 = 0 by construction

    def step_rhs(v):
        return convective_rhs(v, model, nflux) + op.apply(v.coeffs)

    residuals, rels, diss = [], [], []
    t = 0.0
    for step in range(1, n_steps + 1):
        tau_step = tau if step < n_steps else T - (n_steps - 1) * tau
        t_next = T if step == n_steps else t + tau_step

        # exact fields and sided projections at this level
        uvals, wvals, wxvals, guvals, gwvals = _modal_stage_fields(sol, t, tau_step, kit.flatx)
        wfun = lambda x: _modal_stage_fields(sol, t, tau_step, x)[1]
        proj_w = gauss_radau_project(wfun, mesh, k, sides, npts=kit.npts)

        # scheme step
        w_h = DGFunction(mesh, k, u_h.coeffs + tau_step * step_rhs(u_h))
        u_next = DGFunction(mesh, k, 0.5 * (u_h.coeffs + w_h.coeffs
                                            + tau_step * step_rhs(w_h)))

        # next-level projection choice from the exact solution
        lo, hi = cell_speed_range(model, lambda x: sol.u(x, t_next), mesh)
        sides_next = tracker.observe(lo, hi, band=mesh.h)
        proj_u_next = gauss_radau_project(lambda x: sol.u(x, t_next), mesh, k,
                                          sides_next, npts=kit.npts)

        xi_h = DGFunction(mesh, k, u_h.coeffs - proj_u.coeffs)
        zeta_h = DGFunction(mesh, k, w_h.coeffs - proj_w.coeffs)
        xi_next = DGFunction(mesh, k, u_next.coeffs - proj_u_next.coeffs)

        lhs = l2_norm(xi_next) ** 2 - l2_norm(xi_h) ** 2

        # K^n(xi): (zeta_pi - xi_pi, xi) + tau [H(u_h, xi) - H(u, xi)]
        t_K = (kit.pair(wvals - uvals, xi_h)
               - float(np.vdot(proj_w.coeffs - proj_u.coeffs, xi_h.coeffs))
               + tau_step * float(np.vdot(convective_rhs(u_h, model, nflux),
                                          xi_h.coeffs))
               - tau_step * kit.continuous_form(
                   model, uvals, sol.u(mesh.nodes[:-1], t), xi_h))

        # L^n(zeta): (2 xi_pi^(n+1) - zeta_pi - xi_pi - 2E^n, zeta)
        #            + tau [H(w_h, zeta) - H(w, zeta)]
        # the continuous part collapses to tau (g[w] - f(w)_x) by the
        # definition of the consistency remainder E^n
        cont = tau_step * (gwvals - model.df(wvals) * wxvals)
        t_L = (kit.pair(cont, zeta_h)
               - float(np.vdot(2.0 * proj_u_next.coeffs - proj_w.coeffs
                               - proj_u.coeffs, zeta_h.coeffs))
               + tau_step * float(np.vdot(convective_rhs(w_h, model, nflux),
                                          zeta_h.coeffs))
               - tau_step * kit.continuous_form(
                   model, wvals,
                   _modal_stage_fields(sol, t, tau_step, mesh.nodes[:-1])[1],
                   zeta_h))

        # -tau [D(zeta_pi, zeta) + D(xi_pi, xi)], each split into the exact
        # pairing of the smooth field minus the assembled pairing of its
        # projection
        d_xi = kit.pair(guvals, xi_h) - op.bilinear(proj_u.coeffs, xi_h.coeffs)
        d_zeta = kit.pair(gwvals, zeta_h) - op.bilinear(proj_w.coeffs, zeta_h.coeffs)
        t_D = -tau_step * (d_zeta + d_xi)

        # dissipative Gagliardo terms through the assembled form
        t_S = tau_step * (op.quadratic_form(xi_h.coeffs)
                          + op.quadratic_form(zeta_h.coeffs))

        diff2 = l2_norm(DGFunction(mesh, k, xi_next.coeffs - zeta_h.coeffs)) ** 2
        rhs_total = diff2 + t_K + t_L + t_D + t_S
        scale = max(abs(lhs), abs(diff2), abs(t_K), abs(t_L), abs(t_D),
                    abs(t_S), 1e-300)
        residuals.append(abs(lhs - rhs_total))
        rels.append(abs(lhs - rhs_total) / scale)
        diss.append(t_S / scale)

        u_h, proj_u, sides, t = u_next, proj_u_next, sides_next, t_next

    residuals = np.asarray(residuals)
    rels = np.asarray(rels)
    diss = np.asarray(diss)
    return {
        "residuals": residuals,
        "relative": rels,
        "max_rel": float(rels.max()),
        "dissipative_terms": diss,
        "dissipation_ok": bool(diss.max() <= 1e-12),
        "n_steps": int(n_steps),
        "switch_counts": tracker.counts.copy(),
    }

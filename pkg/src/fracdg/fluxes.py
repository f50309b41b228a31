"""Scalar flux models and monotone numerical fluxes.

A numerical flux hhat(a, b) is admissible when it is locally Lipschitz,
consistent (hhat(p, p) = f(p)), nondecreasing in the first argument and
nonincreasing in the second. Godunov, Engquist-Osher and pure upwind (with
Godunov fallback where f' changes sign) all qualify.

The interface viscosity quantity

    a(p-, p+) = (f(pbar) - hhat(p-, p+)) / [[p]]   if [[p]] != 0,
                |f'(pbar)|                          otherwise,

with pbar the trace average and [[p]] = p+ - p-, is nonnegative, bounded by
the Lipschitz constant of f, and satisfies the two-sided estimates checked
by check_lemma31 with constants c = 1 and c_* = max(M2, M3).
"""

import numpy as np
from scipy.optimize import brentq


class FluxModel:
    """Flux f with derivatives and derivative bounds on a working interval.

    M1, M2, M3 bound |f'|, |f''|, |f'''| on u_range; builders supply exact
    values, the generic constructor estimates them by dense sampling.
    """

    def __init__(self, f, df, d2f, d3f, u_range=(-1.0, 1.0), name="custom",
                 bounds=None, godunov_closed=None):
        self.f = f
        self.df = df
        self.d2f = d2f
        self.d3f = d3f
        lo, hi = map(float, u_range)
        if not lo < hi:
            raise ValueError("u_range must be an interval (lo < hi)")
        self.u_range = (lo, hi)
        self.name = name
        self.godunov_closed = godunov_closed
        if bounds is None:
            s = np.linspace(lo, hi, 1025)
            bounds = (float(np.max(np.abs(df(s)))),
                      float(np.max(np.abs(d2f(s)))),
                      float(np.max(np.abs(d3f(s)))))
        self.M1, self.M2, self.M3 = bounds

    def __repr__(self):
        return "FluxModel(%s, u_range=%r)" % (self.name, self.u_range)


def linear_flux(c=1.0, u_range=(-2.0, 2.0)):
    """f(u) = c*u; Godunov reduces to classical upwinding."""
    c = float(c)

    def closed(a, b):
        return c * a if c >= 0 else c * b

    return FluxModel(f=lambda u: c * u,
                     df=lambda u: c * np.ones_like(np.asarray(u, dtype=float)),
                     d2f=lambda u: np.zeros_like(np.asarray(u, dtype=float)),
                     d3f=lambda u: np.zeros_like(np.asarray(u, dtype=float)),
                     u_range=u_range, name="linear",
                     bounds=(abs(c), 0.0, 0.0), godunov_closed=closed)


def burgers_flux(u_range=(-2.0, 2.0)):
    """f(u) = u^2/2. Godunov flux has the classical closed form."""

    def closed(a, b):
        # min over [a,b] if a <= b else max over [b,a], both in one formula
        return np.maximum(np.maximum(a, 0.0) ** 2, np.minimum(b, 0.0) ** 2) / 2.0

    lo, hi = u_range
    return FluxModel(f=lambda u: 0.5 * np.asarray(u, dtype=float) ** 2,
                     df=lambda u: np.asarray(u, dtype=float),
                     d2f=lambda u: np.ones_like(np.asarray(u, dtype=float)),
                     d3f=lambda u: np.zeros_like(np.asarray(u, dtype=float)),
                     u_range=u_range, name="burgers",
                     bounds=(max(abs(lo), abs(hi)), 1.0, 0.0), godunov_closed=closed)


def _critical_points(model, lo, hi, coarse=33):
    """Roots of f' inside [lo, hi], located by sign-change bracketing."""
    if hi - lo < 1e-300:
        return []
    s = np.linspace(lo, hi, coarse)
    ds = np.asarray(model.df(s), dtype=float)
    roots = []
    for i in range(coarse - 1):
        if ds[i] == 0.0:
            roots.append(s[i])
        elif ds[i] * ds[i + 1] < 0.0:
            roots.append(brentq(lambda u: float(model.df(u)), s[i], s[i + 1]))
    if ds[-1] == 0.0:
        roots.append(s[-1])
    return roots


def godunov_flux(model, a, b):
    """Godunov flux: min of f on [a, b] if a <= b, else max of f on [b, a].

    The extremum is located from the endpoint values plus the roots of f'
    bracketed inside the trace interval.
    """
    a = float(a)
    b = float(b)
    if a == b:
        return float(model.f(a))
    lo, hi = (a, b) if a < b else (b, a)
    cand = [a, b] + _critical_points(model, lo, hi)
    vals = [float(model.f(u)) for u in cand]
    return min(vals) if a < b else max(vals)


def engquist_osher_flux(model, a, b):
    """Engquist-Osher flux.

    hhat(a, b) = f(0) + int_0^a max(f', 0) + int_0^b min(f', 0), evaluated
    by splitting at the bracketed roots of f' so each piece is smooth.
    """
    from scipy.integrate import quad

    def directed(u, part):
        if u == 0.0:
            return 0.0
        lo, hi = (0.0, u) if u > 0 else (u, 0.0)
        pieces = sorted({lo, hi}.union(_critical_points(model, lo, hi)))
        total = 0.0
        for p0, p1 in zip(pieces[:-1], pieces[1:]):
            val, _ = quad(lambda s: part(float(model.df(s))), p0, p1, limit=100)
            total += val
        return total if u > 0 else -total

    pos = directed(float(a), lambda d: max(d, 0.0))
    neg = directed(float(b), lambda d: min(d, 0.0))
    return float(model.f(0.0)) + pos + neg


def upwind_flux(model, a, b):
    """Pure upwind flux: f(a) when f' >= 0 on the trace interval, f(b) when
    f' < 0; automatic Godunov fallback when f' changes sign in between."""
    a = float(a)
    b = float(b)
    lo, hi = (a, b) if a <= b else (b, a)
    s = np.linspace(lo, hi, 65)
    ds = np.asarray(model.df(s), dtype=float)
    if np.all(ds >= 0.0):
        return float(model.f(a))
    if np.all(ds < 0.0):
        return float(model.f(b))
    return godunov_flux(model, a, b)


_SCALAR_FLUXES = {
    "godunov": godunov_flux,
    "engquist_osher": engquist_osher_flux,
    "pure_upwind": upwind_flux,
}


class NumericalFlux:
    """Monotone interface flux of a given kind bound to a flux model."""

    KINDS = tuple(_SCALAR_FLUXES)

    def __init__(self, model, kind="godunov"):
        if kind not in _SCALAR_FLUXES:
            raise ValueError("unknown flux kind %r; expected one of %r" % (kind, self.KINDS))
        self.model = model
        self.kind = kind
        self._scalar = _SCALAR_FLUXES[kind]

    def __call__(self, a, b):
        return self._scalar(self.model, a, b)

    def evaluate_many(self, a, b):
        """Vectorized interface fluxes for trace arrays.

        Uses the model's closed-form Godunov expression when available (the
        built-in fluxes; pure upwind coincides with Godunov wherever f' is
        sign-definite and falls back to it elsewhere). Engquist-Osher and
        custom models go through the scalar path.
        """
        a = np.asarray(a, dtype=float)
        b = np.asarray(b, dtype=float)
        if self.kind in ("godunov", "pure_upwind") and self.model.godunov_closed is not None:
            return self.model.godunov_closed(a, b)
        return np.array([self._scalar(self.model, ai, bi)
                         for ai, bi in zip(a.ravel(), b.ravel())]).reshape(a.shape)


def a_quantity(model, flux, p_minus, p_plus):
    """Interface viscosity coefficient of the numerical flux.

    (f(pbar) - hhat(p-, p+)) / [[p]] for nonzero jumps, |f'(pbar)| at zero
    jump; nonnegative for monotone fluxes.
    """
    p_minus = float(p_minus)
    p_plus = float(p_plus)
    jump = p_plus - p_minus
    pbar = 0.5 * (p_plus + p_minus)
    if jump == 0.0:
        return abs(float(model.df(pbar)))
    if isinstance(flux, NumericalFlux):
        hval = flux(p_minus, p_plus)
    else:
        hval = flux(model, p_minus, p_plus)
    return (float(model.f(pbar)) - hval) / jump


def check_lemma31(model, flux, n_samples=10000, seed=0, c=1.0, c_star=None):
    """Sample trace pairs and verify the interface-viscosity estimates.

    Checks, for (p-, p+) drawn uniformly from the model's working square:
      nonneg:   a >= 0
      bounded:  a <= M1
      lower-d1: |f'(pbar)|/2    <= a + c_* |[[p]]|
      lower-d2: -f''(pbar)[[p]]/8 <= a + c_* [[p]]^2
      upper:    a <= c |f'(pbar)| + c_* |[[p]]|
    with c = 1 and c_* = max(M2, M3) unless overridden. Returns a report
    dict with worst margins (RHS - LHS, negative = violated) and the total
    violation count at tolerance tol.
    """
    if c_star is None:
        c_star = max(model.M2, model.M3)
    tol = 1e-12
    rng = np.random.default_rng(seed)
    lo, hi = model.u_range
    pm = rng.uniform(lo, hi, n_samples)
    pp = rng.uniform(lo, hi, n_samples)
    a_vals = np.array([a_quantity(model, flux, x, y) for x, y in zip(pm, pp)])
    jump = pp - pm
    pbar = 0.5 * (pp + pm)
    d1 = np.asarray(model.df(pbar), dtype=float)
    d2 = np.asarray(model.d2f(pbar), dtype=float)
    margins = {
        "nonneg": a_vals - 0.0,
        "bounded": model.M1 - a_vals,
        "lower-d1": a_vals + c_star * np.abs(jump) - 0.5 * np.abs(d1),
        "lower-d2": a_vals + c_star * jump ** 2 + 0.125 * d2 * jump,
        "upper": c * np.abs(d1) + c_star * np.abs(jump) - a_vals,
    }
    worst = {name: float(m.min()) for name, m in margins.items()}
    violations = int(sum(int(np.sum(m < -tol)) for m in margins.values()))
    return {
        "kind": flux.kind if isinstance(flux, NumericalFlux) else getattr(flux, "__name__", "flux"),
        "n_samples": int(n_samples),
        "seed": int(seed),
        "c": float(c),
        "c_star": float(c_star),
        "a_min": float(a_vals.min()),
        "a_max": float(a_vals.max()),
        "margins": worst,
        "violations": violations,
        "passed": violations == 0,
    }

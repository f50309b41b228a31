"""Periodic 1D mesh and piecewise-polynomial DG function space.

Cells are I_j = (x_j, x_{j+1}) with x_j = j*h, h = L/N, indices wrapping
periodically. Each cell carries the L2-orthonormal scaled Legendre basis

    b_{j,m}(x) = sqrt((2m+1)/h) * P_m(2(x - x_j)/h - 1),   m = 0..k,

so the global mass matrix is the identity: coefficients are the L2 inner
products against the basis and ||u||^2 is the plain sum of squared
coefficients. No mass-matrix solve appears anywhere downstream.
"""

import numpy as np


def legendre_table(k, xi):
    """P_m(xi) for m = 0..k as an array of shape (k+1, len(xi))."""
    xi = np.atleast_1d(np.asarray(xi, dtype=float))
    P = np.empty((k + 1, xi.size))
    P[0] = 1.0
    if k >= 1:
        P[1] = xi
    for m in range(1, k):
        P[m + 1] = ((2 * m + 1) * xi * P[m] - m * P[m - 1]) / (m + 1)
    return P


def legendre_deriv_table(k, xi):
    """P_m'(xi) for m = 0..k, via P'_{m+1} = P'_{m-1} + (2m+1) P_m."""
    xi = np.atleast_1d(np.asarray(xi, dtype=float))
    P = legendre_table(k, xi)
    dP = np.zeros((k + 1, xi.size))
    if k >= 1:
        dP[1] = 1.0
    for m in range(1, k):
        dP[m + 1] = dP[m - 1] + (2 * m + 1) * P[m]
    return dP


def gauss_legendre(npts):
    """Gauss-Legendre nodes/weights on [-1, 1]. npts points integrate degree 2*npts-1."""
    return np.polynomial.legendre.leggauss(npts)


class Mesh:
    """Uniform periodic mesh of N cells on [0, L)."""

    def __init__(self, L, N):
        if not L > 0:
            raise ValueError("mesh length L must be positive, got %r" % (L,))
        if int(N) != N or N < 2:
            raise ValueError("cell count N must be an integer >= 2, got %r" % (N,))
        self.L = float(L)
        self.N = int(N)
        self.h = self.L / self.N
        self.nodes = np.linspace(0.0, self.L, self.N + 1)
        self.centers = 0.5 * (self.nodes[:-1] + self.nodes[1:])
        self._quad_cache = {}

    def __repr__(self):
        return "Mesh(L=%g, N=%d)" % (self.L, self.N)

    def same_as(self, other):
        return self.N == other.N and self.L == other.L

    def wrap(self, x):
        return np.mod(x, self.L)

    def cell_of(self, x):
        """Index of the cell containing x (right-continuous at nodes)."""
        idx = np.floor(self.wrap(x) / self.h).astype(int)
        return np.clip(idx, 0, self.N - 1)

    def quad(self, npts):
        """Reference nodes/weights plus physical points, cached per npts.

        Returns (xi, w, xq) with xi, w of shape (npts,) and xq of shape
        (N, npts); xq[j] are the mapped Gauss points inside cell j.
        """
        if npts not in self._quad_cache:
            xi, w = gauss_legendre(npts)
            xq = self.nodes[:-1, None] + 0.5 * self.h * (xi[None, :] + 1.0)
            self._quad_cache[npts] = (xi, w, xq)
        return self._quad_cache[npts]


def build_mesh(L, N):
    """Uniform periodic mesh of N cells on [0, L)."""
    return Mesh(L, N)


class DGFunction:
    """Piecewise polynomial of degree <= k with orthonormal Legendre coefficients.

    coeffs has shape (N, k+1); coeffs[j, m] multiplies b_{j,m}. Because the
    basis is orthonormal, inner products and norms reduce to coefficient
    arithmetic.
    """

    def __init__(self, mesh, k, coeffs=None):
        if int(k) != k or k < 0:
            raise ValueError("polynomial degree k must be a nonnegative integer")
        self.mesh = mesh
        self.k = int(k)
        if coeffs is None:
            coeffs = np.zeros((mesh.N, self.k + 1))
        coeffs = np.asarray(coeffs, dtype=float)
        if coeffs.shape != (mesh.N, self.k + 1):
            raise ValueError("coefficient array must have shape (N, k+1) = %r, got %r"
                             % ((mesh.N, self.k + 1), coeffs.shape))
        self.coeffs = coeffs

    def copy(self):
        return DGFunction(self.mesh, self.k, self.coeffs.copy())

    def scale(self):
        """Orthonormal basis scale factors sqrt((2m+1)/h), shape (k+1,)."""
        m = np.arange(self.k + 1)
        return np.sqrt((2 * m + 1) / self.mesh.h)

    def evaluate(self, x):
        """Pointwise values; right-continuous at cell interfaces."""
        x = np.asarray(x, dtype=float)
        shape = x.shape
        xf = np.ravel(x)
        j = self.mesh.cell_of(xf)
        xi = 2.0 * (self.mesh.wrap(xf) - self.mesh.nodes[j]) / self.mesh.h - 1.0
        P = legendre_table(self.k, xi)
        vals = np.einsum("qm,mq->q", self.coeffs[j] * self.scale()[None, :], P)
        return vals.reshape(shape) if shape else float(vals[0])

    def eval_at_ref(self, xi):
        """Values at reference points xi in every cell, shape (N, len(xi))."""
        B = legendre_table(self.k, xi) * self.scale()[:, None]
        return self.coeffs @ B

    def traces(self):
        """Interface values (minus, plus) at nodes x_0..x_{N-1}.

        minus[j] is the limit from cell j-1 (left of node j), plus[j] the
        limit from cell j. Node 0 is identified with node N.
        """
        s = self.scale()
        signs = (-1.0) ** np.arange(self.k + 1)
        plus = self.coeffs @ (s * signs)
        minus = np.roll(self.coeffs @ s, 1)
        return minus, plus

    def jumps(self):
        """Interface jumps [[u]]_j = plus - minus at each node."""
        minus, plus = self.traces()
        return plus - minus

    def cell_means(self):
        return self.coeffs[:, 0] / np.sqrt(self.mesh.h)

    def mass(self):
        """Integral of u over one period."""
        return float(np.sqrt(self.mesh.h) * self.coeffs[:, 0].sum())

    # Coefficient-space arithmetic; operands must share mesh and degree.
    def _check(self, other):
        if not (self.mesh.same_as(other.mesh) and self.k == other.k):
            raise ValueError("mesh/degree mismatch in DGFunction arithmetic")

    def __add__(self, other):
        self._check(other)
        return DGFunction(self.mesh, self.k, self.coeffs + other.coeffs)

    def __sub__(self, other):
        self._check(other)
        return DGFunction(self.mesh, self.k, self.coeffs - other.coeffs)

    def __mul__(self, a):
        return DGFunction(self.mesh, self.k, self.coeffs * float(a))

    __rmul__ = __mul__


def trace(u, j, side):
    """Interface value of u at node j from side '-' (cell j-1) or '+' (cell j)."""
    minus, plus = u.traces()
    j = int(j) % u.mesh.N
    if side == "-":
        return float(minus[j])
    if side == "+":
        return float(plus[j])
    raise ValueError("side must be '-' or '+', got %r" % (side,))


def l2_project(v, mesh, k, npts=None):
    """L2 projection of a callable onto the degree-k DG space.

    Default quadrature uses k+2 Gauss points per cell (exact through degree
    2k+3), matching the scheme's volume rule; pass a larger npts when the
    integrand warrants it.
    """
    if npts is None:
        npts = k + 2
    xi, w, xq = mesh.quad(npts)
    m = np.arange(k + 1)
    B = legendre_table(k, xi) * np.sqrt((2 * m + 1) / mesh.h)[:, None]
    # c[j,m] = (h/2) sum_q w_q v(x_{jq}) b_m(xi_q)
    vals = np.asarray(v(xq), dtype=float)
    coeffs = 0.5 * mesh.h * np.einsum("jq,q,mq->jm", vals, w, B)
    return DGFunction(mesh, k, coeffs)


def inner_product(u, v):
    """L2 inner product over the period; coefficient dot product."""
    u._check(v)
    return float(np.vdot(u.coeffs, v.coeffs))


def l2_norm(u):
    return float(np.linalg.norm(u.coeffs))

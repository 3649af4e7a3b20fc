"""Floating-point recomputation of the exact results.

Nothing here calls into the symbol or boundary machinery.  The only contact
with the exact side is :meth:`ExactScalar.evaluate` for coefficients of
inputs handed to :func:`oracle_trace` and :func:`oracle_contour`.  The
boundary cases are redone from a concrete collar metric with explicit
gamma matrices, Cauchy-integral derivatives and quadrature.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.special import roots_jacobi

from .scalar import DY, HP0, PI, X, Y

__all__ = [
    "QuadratureDivergence",
    "GammaRep",
    "NumericAssignment",
    "gamma_rep",
    "oracle_trace",
    "oracle_contour",
    "oracle_sphere",
    "CollarModel",
    "oracle_phi",
    "oracle_phi_all",
]


class QuadratureDivergence(RuntimeError):
    pass


# ---------------------------------------------------------------------------
# Gamma matrices
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class GammaRep:
    """Four 4x4 matrices with ``g_i g_j + g_j g_i = -2 delta_ij``."""

    gammas: tuple

    @property
    def dim(self) -> int:
        return self.gammas[0].shape[0]

    def residual(self) -> float:
        eye = np.eye(self.dim)
        worst = 0.0
        for i, a in enumerate(self.gammas):
            for j, b in enumerate(self.gammas):
                target = -2.0 * eye if i == j else 0.0 * eye
                worst = max(worst, float(np.max(np.abs(a @ b + b @ a - target))))
        return worst


def gamma_rep() -> GammaRep:
    s1 = np.array([[0, 1], [1, 0]], dtype=complex)
    s2 = np.array([[0, -1j], [1j, 0]], dtype=complex)
    s3 = np.array([[1, 0], [0, -1]], dtype=complex)
    z = np.zeros((2, 2), dtype=complex)
    e = np.eye(2, dtype=complex)
    herm = [np.block([[z, -1j * s], [1j * s, z]]) for s in (s1, s2, s3)]
    herm.append(np.block([[z, e], [e, z]]))
    return GammaRep(tuple(1j * h for h in herm))


_REP = gamma_rep()


def _word_matrix(mask: int, rep: GammaRep) -> np.ndarray:
    out = np.eye(rep.dim, dtype=complex)
    i = 0
    while mask:
        if mask & 1:
            out = out @ rep.gammas[i]
        mask >>= 1
        i += 1
    return out


def oracle_trace(element, rep: GammaRep | None = None, assignment=None) -> complex:
    """Trace of the matrix realizing a Clifford element (n = 4)."""
    rep = _REP if rep is None else rep
    if element.n != len(rep.gammas):
        raise ValueError("representation size does not match the element")
    total = np.zeros((rep.dim, rep.dim), dtype=complex)
    for mask, coef in element.terms.items():
        total = total + complex(coef.evaluate(assignment or {})) * _word_matrix(mask, rep)
    return complex(np.trace(total))


# ---------------------------------------------------------------------------
# Contour and sphere quadrature
# ---------------------------------------------------------------------------


def _line_values(f, z: np.ndarray, assignment, xi_tangential) -> np.ndarray:
    """Evaluate a scalar-word LineSymbol at complex points ``z``."""
    out = np.zeros_like(z, dtype=complex)
    for (d, tmono, word), coef in f.num.items():
        if word:
            raise ValueError("oracle_contour takes scalar (traced) line symbols")
        c = complex(coef.evaluate(assignment or {}))
        if any(tmono):
            if xi_tangential is None:
                raise ValueError("tangential monomials need xi_tangential")
            c *= float(np.prod([t**p for t, p in zip(xi_tangential, tmono)]))
        out = out + c * z**d
    return out / ((z - 1j) ** f.a * (z + 1j) ** f.b)


def oracle_contour(
    f,
    assignment=None,
    xi_tangential=None,
    nodes: int = 4096,
    radius: float = 0.5,
    tol: float = 1e-11,
    max_nodes: int = 1 << 17,
) -> complex:
    """Trapezoid rule for the integral over ``|xi_n - i| = radius``.

    The node count doubles until successive values agree within ``tol``
    (relative to the value), else :class:`QuadratureDivergence`.
    """
    if radius <= 1e-3 or abs(radius - 2.0) <= 1e-3:
        raise ValueError("contour passes within 1e-3 of a pole")
    if radius > 2.0:
        raise ValueError("contour would enclose the pole at -i")

    def rule(m):
        w = np.exp(2j * np.pi * np.arange(m) / m)
        z = 1j + radius * w
        return complex(np.mean(_line_values(f, z, assignment, xi_tangential) * 1j * radius * w)) * 2 * np.pi

    prev = rule(nodes)
    m = nodes
    while m < max_nodes:
        m *= 2
        cur = rule(m)
        if abs(cur - prev) <= tol * max(1.0, abs(cur)):
            return cur
        prev = cur
    raise QuadratureDivergence(f"no convergence with {m} nodes")


def _sphere_rule(m: int, order: int):
    """Nodes and weights on ``S^(m-1)``, exact for polynomials of degree < ``order``."""
    if m < 2:
        raise ValueError("sphere needs m >= 2")
    nphi = max(2 * order, 4)
    phi = 2 * np.pi * np.arange(nphi) / nphi
    pts = np.stack([np.cos(phi), np.sin(phi)], axis=1)
    wts = np.full(nphi, 2 * np.pi / nphi)
    for dim in range(3, m + 1):
        # x_dim = t, rest scaled by sqrt(1 - t^2); weight (1 - t^2)^((dim-3)/2)
        a = (dim - 3) / 2
        t, w = roots_jacobi(order, a, a)
        s = np.sqrt(1 - t**2)
        pts = np.concatenate(
            [np.concatenate([pts * si, np.full((len(pts), 1), ti)], axis=1) for ti, si in zip(t, s)]
        )
        wts = np.concatenate([wts * wi for wi in w])
    return pts, wts


def oracle_sphere(mono, m: int = 3, samples: int = 0, seed: int = 0, order: int = 8):
    """``(quadrature, monte_carlo)`` for the integral of ``xi^mono`` over ``S^(m-1)``.

    ``monte_carlo`` is ``None`` when ``samples`` is 0.
    """
    mono = tuple(mono)
    if len(mono) != m:
        raise ValueError("monomial length must equal m")
    pts, wts = _sphere_rule(m, max(order, sum(mono) // 2 + 2))
    quad = float(np.sum(wts * np.prod(pts**np.array(mono), axis=1)))
    mc = None
    if samples:
        rng = np.random.default_rng(seed)
        v = rng.standard_normal((samples, m))
        v /= np.linalg.norm(v, axis=1, keepdims=True)
        vol = 2 * math.pi ** (m / 2) / math.gamma(m / 2)
        mc = float(vol * np.mean(np.prod(v ** np.array(mono), axis=1)))
    return quad, mc


# ---------------------------------------------------------------------------
# Numeric collar model
# ---------------------------------------------------------------------------


@dataclass
class NumericAssignment:
    """Numeric values for ``h'(0)``, the field components and their jets.

    ``h2`` and ``kappa`` add second-order metric terms that the boundary
    values must not depend on.
    """

    hp0: float
    X: np.ndarray
    Y: np.ndarray
    DY: np.ndarray
    seed: int | None = None
    h2: float = 0.0
    kappa: float = 0.0

    @classmethod
    def random(cls, seed: int, n: int = 4, derivatives: bool = False) -> "NumericAssignment":
        rng = np.random.default_rng(seed)
        hp0 = float(rng.uniform(0.5, 1.5) * rng.choice([-1, 1]))
        Xv = rng.uniform(-1, 1, n)
        Yv = rng.uniform(-1, 1, n)
        D = np.zeros((n, n))
        if derivatives:
            D[: n - 1, :] = rng.uniform(-1, 1, (n - 1, n))
        return cls(hp0, Xv, Yv, D, seed, float(rng.uniform(-0.5, 0.5)), float(rng.uniform(-0.5, 0.5)))

    @classmethod
    def unit(cls, j: int, l: int, n: int = 4, hp0: float = 1.0) -> "NumericAssignment":
        Xv, Yv = np.zeros(n), np.zeros(n)
        Xv[j - 1] = 1.0
        Yv[l - 1] = 1.0
        return cls(hp0, Xv, Yv, np.zeros((n, n)))

    def generator_values(self) -> dict:
        """Values keyed by formal generator, for evaluating exact expressions."""
        n = len(self.X)
        vals = {PI: math.pi, HP0: self.hp0}
        for j in range(n):
            vals[X(j + 1)] = self.X[j]
            vals[Y(j + 1)] = self.Y[j]
            for l in range(n):
                vals[DY(j + 1, l + 1)] = self.DY[j, l]
        return vals


def _cauchy_nodes(count: int):
    return np.exp(2j * np.pi * np.arange(count) / count)


def _cderiv(fun, x0: np.ndarray, axis: int, order: int = 1, radius: float = 0.05, count: int = 16):
    """``d^order fun / dx_axis^order`` at ``x0`` by the Cauchy integral formula."""
    w = _cauchy_nodes(count)
    acc = None
    for wk in w:
        x = np.array(x0, dtype=complex)
        x[axis] += radius * wk
        term = fun(x) / (radius * wk) ** order
        acc = term if acc is None else acc + term
    return acc * (math.factorial(order) / count)


class CollarModel:
    """Metric ``diag(rho/h, ..., rho/h, 1)`` with ``h = 1 + hp0 x_n + h2 x_n^2``
    and ``rho = 1 + kappa |x'|^2``; frame ``e_a = g_aa^(-1/2) d_a``.
    """

    def __init__(self, a: NumericAssignment, rep: GammaRep | None = None):
        self.a = a
        self.n = len(a.X)
        self.rep = _REP if rep is None else rep
        self.G = np.array(self.rep.gammas)
        self.x0 = np.zeros(self.n, dtype=complex)
        self._build()

    # fields and metric at (possibly complex) x
    def h(self, x):
        t = x[self.n - 1]
        return 1 + self.a.hp0 * t + self.a.h2 * t * t

    def metric(self, x):
        rho = 1 + self.a.kappa * np.sum(x[: self.n - 1] ** 2)
        d = np.full(self.n, rho / self.h(x), dtype=complex)
        d[-1] = 1
        return np.diag(d)

    def frame(self, x):
        g = self.metric(x)
        return np.diag(1 / np.sqrt(np.diag(g)))

    def field_X(self, x):
        return np.asarray(self.a.X, dtype=complex)

    def field_Y(self, x):
        return np.asarray(self.a.Y, dtype=complex) + x @ self.a.DY.astype(complex)

    def _p2_tensor(self, x):
        """``M[k, l]`` with ``p_2(x, xi) = sum M[k, l] xi_k xi_l`` for ``D^2``."""
        E = self.frame(x)
        GG = np.einsum("aij,bjk->abik", self.G, self.G)
        return -np.einsum("ak,bl,abij->klij", E, E, GG)

    def _build(self):
        n, G, x0 = self.n, self.G, self.x0
        g = self.metric(x0)
        ginv = np.linalg.inv(g)
        dg = np.array([_cderiv(self.metric, x0, a) for a in range(n)])
        chris = 0.5 * (
            np.einsum("kl,ijl->kij", ginv, dg)
            + np.einsum("kl,jil->kij", ginv, dg)
            - np.einsum("kl,lij->kij", ginv, dg)
        )
        E = self.frame(x0)
        dE = np.array([_cderiv(self.frame, x0, a) for a in range(n)])  # dE[c, t, b]
        # (nabla_{e_i} e_t)^b
        nab = np.einsum("ic,ctb->itb", E, dE) + np.einsum("ic,bcd,td->itb", E, chris, E)
        omega = np.einsum("itb,bd,sd->sti", nab, g, E)  # omega[s, t, i]
        GG = np.einsum("sij,tjk->stik", G, G)
        sigma = -0.25 * np.einsum("sti,stjk->ijk", omega, GG)
        Einv = np.linalg.inv(E)
        self.sigma = sigma
        self.A_coord = np.einsum("ka,aij->kij", Einv.T, sigma)  # A(d_k)

        self.M = self._p2_tensor(x0)
        self.dM = np.array([_cderiv(self._p2_tensor, x0, a) for a in range(n)])
        # p_1 = i sum_l L[l] xi_l
        t1 = np.einsum("ak,kbl,abij->lij", E, dE.transpose(0, 1, 2), np.einsum("aij,bjk->abik", G, G))
        t2 = np.einsum("al,aij,bjk,bkm->lim", E, G, G, sigma)
        t3 = np.einsum("bl,aij,ajk,bkm->lim", E, G, sigma, G)
        self.L = 1j * (t1 + t2 + t3)

        Xv = self.field_X(x0)
        Yv = self.field_Y(x0)
        dY = np.array([_cderiv(self.field_Y, x0, j) for j in range(n)])  # dY[j, l]
        self.S = -np.einsum("k,l->kl", Xv, Yv)
        self.dS = np.array(
            [_cderiv(lambda x: -np.einsum("k,l->kl", self.field_X(x), self.field_Y(x)), x0, a) for a in range(n)]
        )
        AX = np.einsum("k,kij->ij", Xv, self.A_coord)
        AY = np.einsum("k,kij->ij", Yv, self.A_coord)
        eye = np.eye(self.rep.dim)
        self.K = 1j * (
            np.einsum("j,jl,ik->lik", Xv, dY, eye)
            + np.einsum("l,ij->lij", Xv, AY)
            + np.einsum("l,ij->lij", Yv, AX)
        )

    # symbols at x0 on batches of xi (shape (P, n))
    def p2(self, xi, M=None):
        M = self.M if M is None else M
        d = self.rep.dim
        quad = (xi[:, :, None] * xi[:, None, :]).reshape(len(xi), -1)
        return (quad @ M.reshape(self.n * self.n, d * d)).reshape(len(xi), d, d)

    def dxi_p2(self, xi, k):
        d = self.rep.dim
        return (xi @ (self.M[k] + self.M[:, k]).reshape(self.n, d * d)).reshape(len(xi), d, d)

    def q2(self, xi):
        return np.linalg.inv(self.p2(xi))

    def dx_q2(self, xi, a, q=None):
        q = self.q2(xi) if q is None else q
        return -q @ self.p2(xi, self.dM[a]) @ q

    def q3(self, xi):
        q = self.q2(xi)
        d = self.rep.dim
        p1 = (xi @ self.L.reshape(self.n, d * d)).reshape(len(xi), d, d)
        acc = p1 @ q
        for k in range(self.n):
            acc = acc + self.dxi_p2(xi, k) @ (-1j * self.dx_q2(xi, k, q))
        return -q @ acc

    def sig2(self, xi, S=None):
        S = self.S if S is None else S
        return np.sum((xi @ S) * xi, axis=1)[:, None, None] * np.eye(self.rep.dim)

    def dxi_sig2(self, xi, k):
        return (xi @ (self.S[k] + self.S[:, k]))[:, None, None] * np.eye(self.rep.dim)

    def sig1(self, xi):
        d = self.rep.dim
        return (xi @ self.K.reshape(self.n, d * d)).reshape(len(xi), d, d)

    def P0(self, xi):
        return self.sig2(xi) @ self.q2(xi)

    def dxi_P0(self, xi, k):
        q = self.q2(xi)
        return self.dxi_sig2(xi, k) @ q + self.sig2(xi) @ (-q @ self.dxi_p2(xi, k) @ q)

    def dxn_P0(self, xi):
        a = self.n - 1
        q = self.q2(xi)
        return self.sig2(xi, self.dS[a]) @ q + self.sig2(xi) @ self.dx_q2(xi, a, q)

    def P1(self, xi):
        q = self.q2(xi)
        acc = self.sig2(xi) @ self.q3(xi) + self.sig1(xi) @ q
        for k in range(self.n):
            acc = acc + self.dxi_sig2(xi, k) @ (-1j * self.dx_q2(xi, k, q))
        return acc


def _with_xn(omega: np.ndarray, t: np.ndarray) -> np.ndarray:
    """Points ``(omega, t)`` for every sphere node and every ``t``: shape (S*T, n)."""
    S, T = len(omega), len(t)
    xi = np.empty((S, T, omega.shape[1] + 1), dtype=complex)
    xi[:, :, :-1] = omega[:, None, :]
    xi[:, :, -1] = t[None, :]
    return xi.reshape(S * T, -1)


def _dxin(fun, omega, t, order: int, radius: float = 0.4, count: int = 32):
    """``d^order/dxi_n^order fun`` at ``(omega, t)`` by the Cauchy formula."""
    S, T = len(omega), len(t)
    w = _cauchy_nodes(count)
    acc = 0
    for wk in w:
        vals = fun(_with_xn(omega, t + radius * wk)).reshape(S, T, 4, 4)
        acc = acc + vals / (radius * wk) ** order
    return acc * (math.factorial(order) / count)


@dataclass
class OracleConfig:
    inner_nodes: int = 48
    inner_radius: float = 0.5
    outer_nodes: int = 64
    sphere_order: int = 6


def _plus_projection(fun, omega, t, k: int, cfg: OracleConfig):
    """``d^k/dxi_n^k pi+ fun`` at real ``t`` via the Cauchy integral over a circle about ``i``."""
    S = len(omega)
    w = _cauchy_nodes(cfg.inner_nodes)
    eta = 1j + cfg.inner_radius * w
    F = fun(_with_xn(omega, eta)).reshape(S, len(eta), 4, 4)
    # (1/M) sum F(eta) rho w (-1)^k k! / (t - eta)^(k+1)
    kern = (cfg.inner_radius * w)[None, :] * ((-1) ** k * math.factorial(k)) / (t[:, None] - eta[None, :]) ** (k + 1)
    return np.einsum("tm,smij->stij", kern, F) / cfg.inner_nodes


def _real_line_rule(count: int):
    u, w = np.polynomial.legendre.leggauss(count)
    theta = u * np.pi / 2
    t = np.tan(theta)
    return t, w * (np.pi / 2) / np.cos(theta) ** 2


def oracle_phi(case: int, assignment: NumericAssignment, cfg: OracleConfig | None = None) -> complex:
    """Numeric value of boundary case ``case`` for a concrete assignment."""
    return oracle_phi_all(assignment, cfg, cases=(case,))[case]


def oracle_phi_all(assignment: NumericAssignment, cfg: OracleConfig | None = None, cases=(1, 2, 3, 4, 5)) -> dict:
    cfg = OracleConfig() if cfg is None else cfg
    model = CollarModel(assignment)
    n = model.n
    omega, sw = _sphere_rule(n - 1, cfg.sphere_order)
    t, tw = _real_line_rule(cfg.outer_nodes)
    tr = lambda A, B: np.einsum("stij,stji->st", A, B)  # noqa: E731

    def integrate(vals):
        return complex(np.einsum("s,t,st->", sw, tw, vals))

    out = {}
    for case in cases:
        if case == 1:
            total = 0
            for k in range(n - 1):
                left = _plus_projection(lambda xi, k=k: model.dxi_P0(xi, k), omega, t, 0, cfg)
                right = _dxin(lambda xi, k=k: model.dx_q2(xi, k), omega, t, 1)
                total += integrate(tr(left, right))
            val = -1 * total
        elif case == 2:
            left = _plus_projection(model.dxn_P0, omega, t, 0, cfg)
            right = _dxin(model.q2, omega, t, 2)
            val = -0.5 * integrate(tr(left, right))
        elif case == 3:
            left = _plus_projection(model.P0, omega, t, 1, cfg)
            right = _dxin(lambda xi: model.dx_q2(xi, n - 1), omega, t, 1)
            val = -0.5 * integrate(tr(left, right))
        elif case == 4:
            left = _plus_projection(model.P0, omega, t, 0, cfg)
            right = _dxin(model.q3, omega, t, 1)
            val = -1j * integrate(tr(left, right))
        elif case == 5:
            left = _plus_projection(model.P1, omega, t, 0, cfg)
            right = _dxin(model.q2, omega, t, 1)
            val = -1j * integrate(tr(left, right))
        else:
            raise ValueError(f"case must be in 1..5, got {case}")
        out[case] = val
    return out

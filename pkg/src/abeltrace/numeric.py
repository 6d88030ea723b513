"""Foundational numerics: univariate complex polynomials, simultaneous
root finding, Cauchy-integral differentiation, shifted-Hankel moment fits,
and least-squares polynomial interpolation.

Everything here is pure: functions take immutable inputs and return new
values, so callers may evaluate independent instances in parallel.

Default tolerances: 1e-10 for arithmetic-level checks (roots, zero snaps),
1e-8 for fitting-level checks (Hankel, interpolation).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import (
    DegreeUndetectable,
    EvaluationError,
    IllConditioned,
    NonConvergence,
    OverdeterminedMismatch,
    ZeroPolynomial,
)

TOL_ARITH = 1e-10
TOL_FIT = 1e-8
COND_CAP = 1e12


# ---------------------------------------------------------------------------
# univariate polynomials
# ---------------------------------------------------------------------------

class UniPoly:
    """Univariate polynomial with complex coefficients, lowest degree first.

    The zero polynomial has an empty coefficient tuple and degree -1; any
    other polynomial stores a nonzero leading coefficient.
    """

    __slots__ = ("coeffs",)

    def __init__(self, coeffs=()):
        c = np.asarray(list(coeffs), dtype=complex)
        nz = np.nonzero(c)[0]
        self.coeffs = tuple(map(complex, c[: nz[-1] + 1])) if nz.size else ()

    @property
    def degree(self):
        return len(self.coeffs) - 1

    @property
    def is_zero(self):
        return not self.coeffs

    @classmethod
    def zero(cls):
        return cls(())

    @classmethod
    def constant(cls, value):
        return cls((value,))

    @classmethod
    def from_roots(cls, roots, leading=1.0):
        c = np.array([leading], dtype=complex)
        for r in roots:
            c = np.convolve(c, np.array([-r, 1.0], dtype=complex))
        return cls(c)

    def __call__(self, z):
        acc = 0j
        for c in reversed(self.coeffs):
            acc = acc * z + c
        return acc

    def derivative(self, order=1):
        c = np.asarray(self.coeffs, dtype=complex)
        for _ in range(order):
            if len(c) <= 1:
                return UniPoly.zero()
            c = c[1:] * np.arange(1, len(c))
        return UniPoly(c)

    def monic(self):
        if self.is_zero:
            raise ZeroPolynomial("cannot normalize the zero polynomial")
        return UniPoly(np.asarray(self.coeffs) / self.coeffs[-1])

    def __add__(self, other):
        other = other if isinstance(other, UniPoly) else UniPoly.constant(other)
        n = max(len(self.coeffs), len(other.coeffs), 1)
        a = np.zeros(n, dtype=complex)
        if self.coeffs:
            a[: len(self.coeffs)] += self.coeffs
        if other.coeffs:
            a[: len(other.coeffs)] += other.coeffs
        return UniPoly(a)

    __radd__ = __add__

    def __neg__(self):
        return UniPoly([-c for c in self.coeffs])

    def __sub__(self, other):
        other = other if isinstance(other, UniPoly) else UniPoly.constant(other)
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, UniPoly):
            if self.is_zero or other.is_zero:
                return UniPoly.zero()
            return UniPoly(np.convolve(self.coeffs, other.coeffs))
        return UniPoly(np.asarray(self.coeffs, dtype=complex) * other)

    __rmul__ = __mul__

    def __eq__(self, other):
        return isinstance(other, UniPoly) and self.coeffs == other.coeffs

    def __hash__(self):
        return hash(self.coeffs)

    def __repr__(self):
        if self.is_zero:
            return "UniPoly(0)"
        terms = ", ".join(f"{c:.6g}" for c in self.coeffs)
        return f"UniPoly([{terms}])"

    def snapped(self, tol=TOL_ARITH):
        """Zero out coefficients below tol * max|coeff|."""
        if self.is_zero:
            return self
        c = np.asarray(self.coeffs, dtype=complex)
        cutoff = tol * np.max(np.abs(c))
        return UniPoly(np.where(np.abs(c) <= cutoff, 0.0, c))


# ---------------------------------------------------------------------------
# root finding
# ---------------------------------------------------------------------------

def _horner(coeffs, z):
    acc = 0j
    for c in coeffs[::-1]:
        acc = acc * z + c
    return acc


def _aberth_refine(coeffs, z, max_iter=80, step_tol=1e-15):
    """Aberth-Ehrlich simultaneous refinement of root estimates ``z``."""
    d = len(coeffs) - 1
    dcoeffs = np.asarray(coeffs[1:], dtype=complex) * np.arange(1, d + 1)
    for _ in range(max_iter):
        moved = 0.0
        for j in range(d):
            pj = _horner(coeffs, z[j])
            if pj == 0:
                continue
            dpj = _horner(dcoeffs, z[j])
            ratio = pj / dpj if dpj != 0 else pj
            rep = 0j
            for k in range(d):
                if k != j:
                    dz = z[j] - z[k]
                    if dz != 0:
                        rep += 1.0 / dz
            denom = 1.0 - ratio * rep
            step = ratio / denom if denom != 0 else ratio
            z[j] -= step
            moved = max(moved, abs(step) / (1.0 + abs(z[j])))
        if moved < step_tol:
            break
    return z


def _circle_start(coeffs):
    """Initial estimates on a circle sized by the Cauchy root bound."""
    d = len(coeffs) - 1
    lead = abs(coeffs[-1])
    bound = 1.0 + max(abs(c) for c in coeffs[:-1]) / lead
    radius = min(bound, max(abs(coeffs[0]) / lead, 1e-6) ** (1.0 / d) + 0.5)
    angles = 2.0 * np.pi * (np.arange(d) + 0.25) / d + 0.43
    return (radius * np.exp(1j * angles)).astype(complex)


def _merge_clusters(roots, tol):
    """Greedy agglomerative merge; radius scales like tol^(1/multiplicity)."""
    clusters = [[complex(r), 1] for r in roots]
    while True:
        best = None
        for i in range(len(clusters)):
            for j in range(i + 1, len(clusters)):
                dist = abs(clusters[i][0] - clusters[j][0])
                m = clusters[i][1] + clusters[j][1]
                scale = max(1.0, abs(clusters[i][0]), abs(clusters[j][0]))
                if dist <= scale * tol ** (1.0 / m) and (best is None or dist < best[0]):
                    best = (dist, i, j)
        if best is None:
            break
        _, i, j = best
        ci, cj = clusters[i], clusters[j]
        m = ci[1] + cj[1]
        clusters[i] = [(ci[0] * ci[1] + cj[0] * cj[1]) / m, m]
        del clusters[j]
    return [(c, m) for c, m in clusters]


def _cluster_residuals_ok(coeffs, merged, tol):
    """Residual acceptance against the local evaluation scale, with a
    coefficient-scale floor so multiple roots (where the evaluation scale
    itself vanishes) are judged fairly. Returns worst failing residual."""
    d = len(coeffs) - 1
    cmax = max(abs(c) for c in coeffs)
    worst = 0.0
    for root, mult in merged:
        az = abs(root)
        scale = sum(abs(c) * az**k for k, c in enumerate(coeffs))
        scale = max(scale, cmax * max(1.0, az) ** d)
        rel = abs(_horner(coeffs, root)) / scale
        eff = tol ** (1.0 / mult) if mult > 1 else tol
        if rel > eff:
            worst = max(worst, rel)
    return worst


def poly_roots(p, tol=TOL_ARITH):
    """All roots of ``p`` with multiplicities.

    Simultaneous Aberth-Ehrlich iteration from circle starting points,
    falling back to companion-matrix eigenvalues (followed by the same
    refinement) when the primary iteration stalls. Nearby iterates are
    merged into clusters whose radius scales like tol^(1/multiplicity);
    a merged cluster carries the summed multiplicity so downstream residue
    code can sum over it.

    Parameters
    ----------
    p : UniPoly or coefficient sequence (lowest degree first)
    tol : residual tolerance relative to the local evaluation scale

    Returns
    -------
    list of (root, multiplicity) with multiplicities summing to the
    degree, sorted by (real, imag).

    Raises
    ------
    ZeroPolynomial : degree < 1.
    NonConvergence : residuals above tolerance after both attempts;
        carries the worst relative residual.
    """
    if not isinstance(p, UniPoly):
        p = UniPoly(p)
    if p.degree < 1:
        raise ZeroPolynomial(f"need degree >= 1, got degree {p.degree}")
    if tol <= 0:
        raise ValueError("tol must be positive")

    coeffs = np.asarray(p.coeffs, dtype=complex)
    coeffs = tuple(coeffs / np.max(np.abs(coeffs)))
    d = len(coeffs) - 1

    # exact roots at the origin come off first
    k0 = 0
    while k0 <= d and coeffs[k0] == 0:
        k0 += 1
    work = coeffs[k0:]

    def attempt(start):
        z = list(start)
        if len(work) > 1:
            z = list(_aberth_refine(work, np.asarray(z, dtype=complex)))
        merged = _merge_clusters(list(z) + [0.0] * k0, tol)
        return merged, _cluster_residuals_ok(coeffs, merged, tol)

    merged, worst = (
        attempt(_circle_start(work)) if len(work) > 1 else attempt([])
    )
    if worst > 0.0 and len(work) > 1:
        merged, worst = attempt(np.roots(np.asarray(work)[::-1]).astype(complex))
    if worst > 0.0:
        raise NonConvergence(
            f"root refinement stalled (worst relative residual {worst:.3e})",
            worst_residual=worst,
        )

    merged.sort(key=lambda rm: (rm[0].real, rm[0].imag))
    return [(complex(r), int(m)) for r, m in merged]


# ---------------------------------------------------------------------------
# Cauchy-integral differentiation
# ---------------------------------------------------------------------------

def cauchy_derivative(f, z0, radius, order=1, nodes=64):
    """order-th derivative of a holomorphic ``f`` at ``z0``.

    Trapezoid rule on the circle |z - z0| = radius applied to the Cauchy
    integral order!/(2 pi i) * contour integral of f(z)/(z-z0)^(order+1);
    the relative error decays exponentially in ``nodes`` for f holomorphic
    on the closed disc.
    """
    if order < 1:
        raise ValueError("order must be >= 1")
    if nodes < 16:
        raise ValueError("nodes must be >= 16")
    if radius <= 0:
        raise ValueError("radius must be positive")
    theta = 2.0 * np.pi * np.arange(nodes) / nodes
    ring = np.exp(1j * theta)
    try:
        vals = np.array([f(z0 + radius * w) for w in ring], dtype=complex)
    except Exception as exc:  # noqa: BLE001 - evaluator contract
        raise EvaluationError(f"evaluator failed on the Cauchy circle: {exc}") from exc
    fact = float(np.prod(np.arange(1, order + 1)))
    return complex(fact * np.mean(vals * np.exp(-1j * order * theta)) / radius**order)


# ---------------------------------------------------------------------------
# shifted-Hankel moment fit
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class HankelFit:
    """Monic-recurrence coefficients (a_1..a_d) with fit diagnostics."""

    coeffs: tuple
    condition: float
    residual: float
    degree: int


def _hankel_system(m, d):
    rows = len(m) - d
    a = np.empty((rows, d), dtype=complex)
    for k in range(rows):
        for j in range(1, d + 1):
            a[k, j - 1] = m[k + d - j]
    return a, -np.asarray(m[d:], dtype=complex)


def hankel_fit(moments, d=None, tol=TOL_FIT, d_max=None, cond_cap=COND_CAP):
    """Fit the linear recurrence u_{k+d} + a_1 u_{k+d-1} + ... + a_d u_k = 0.

    Parameters
    ----------
    moments : sequence of complex moments u_0, u_1, ...
    d : recurrence length; None selects the smallest degree whose relative
        residual falls below ``tol`` (rank detection by residual
        thresholding, not SVD rank; the condition number is reported for
        diagnostics).
    tol : residual acceptance threshold, relative to max |moment|.
    d_max : cap for automatic degree detection (default (len-1)//2).
    cond_cap : condition number above which the fit is rejected as
        near-discriminant data.

    Raises
    ------
    DegreeUndetectable : no degree <= d_max meets tol, or all moments
        vanish (zero_moments=True; callers interpret that as zero data).
    IllConditioned : accepted system condition exceeds ``cond_cap``.
    """
    m = np.asarray(list(moments), dtype=complex)
    if tol <= 0:
        raise ValueError("tol must be positive")
    scale = float(np.max(np.abs(m))) if m.size else 0.0
    if scale == 0.0:
        raise DegreeUndetectable(
            "all moments vanish; data is identically zero", zero_moments=True
        )

    def solve_for(dd):
        if len(m) < 2 * dd:
            return None
        a, rhs = _hankel_system(m, dd)
        sol, _, _, sv = np.linalg.lstsq(a, rhs, rcond=None)
        resid = float(np.max(np.abs(a @ sol - rhs))) / scale
        cond = float(sv[0] / sv[-1]) if sv.size and sv[-1] > 0 else np.inf
        return tuple(map(complex, sol)), cond, resid

    if d is not None:
        if len(m) < 2 * d:
            raise ValueError(f"need at least {2 * d} moments for degree {d}")
        sol, cond, resid = solve_for(d)
        if cond > cond_cap:
            raise IllConditioned(
                f"recurrence system condition {cond:.3e} beyond cap", condition=cond
            )
        return HankelFit(sol, cond, resid, d)

    if d_max is None:
        d_max = (len(m) - 1) // 2
    if d_max < 1:
        raise ValueError("too few moments for automatic degree detection")
    best = None
    for dd in range(1, d_max + 1):
        out = solve_for(dd)
        if out is None:
            break
        sol, cond, resid = out
        if best is None or resid < best[3]:
            best = (dd, sol, cond, resid)
        if resid <= tol:
            if cond > cond_cap:
                raise IllConditioned(
                    f"detected degree {dd} but condition {cond:.3e} beyond cap",
                    condition=cond,
                )
            return HankelFit(sol, cond, resid, dd)
    detail = f" (best residual {best[3]:.3e} at degree {best[0]})" if best else ""
    raise DegreeUndetectable(f"no degree <= {d_max} meets tolerance {tol:g}{detail}")


# ---------------------------------------------------------------------------
# least-squares polynomial interpolation
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class PolyFit:
    poly: UniPoly
    residual: float
    condition: float


def poly_interpolate(samples, deg_bound, tol=TOL_FIT):
    """Least-squares polynomial through (point, value) samples.

    Fits in a centered/scaled variable for conditioning and converts back
    to the monomial basis; coefficients below tol * max|coeff| snap to 0.

    Raises OverdeterminedMismatch when the fit residual exceeds
    tol * max(1, max|value|): the data is not polynomial of this degree
    (wrong degree bound, or a genuinely meromorphic coefficient).
    """
    pts = np.asarray([s[0] for s in samples], dtype=complex)
    vals = np.asarray([s[1] for s in samples], dtype=complex)
    if deg_bound < 0:
        raise ValueError("deg_bound must be >= 0")
    if len(set(map(complex, pts))) < deg_bound + 1:
        raise ValueError(f"need at least {deg_bound + 1} distinct sample points")

    center = complex(np.mean(pts))
    spread = float(np.max(np.abs(pts - center)))
    spread = spread if spread > 0 else 1.0
    s = (pts - center) / spread

    v = np.vander(s, deg_bound + 1, increasing=True)
    sol, _, _, sv = np.linalg.lstsq(v, vals, rcond=None)
    cond = float(sv[0] / sv[-1]) if sv.size and sv[-1] > 0 else np.inf

    # expand c_k ((x-center)/spread)^k back to monomials in x
    out = np.zeros(deg_bound + 1, dtype=complex)
    basis = np.array([1.0 + 0j])
    shift = np.array([-center, 1.0], dtype=complex)
    for k in range(deg_bound + 1):
        out[: len(basis)] += sol[k] / spread**k * basis
        basis = np.convolve(basis, shift)
    poly = UniPoly(out).snapped(tol)

    vscale = max(1.0, float(np.max(np.abs(vals))) if vals.size else 0.0)
    residual = float(np.max(np.abs([poly(x) - y for x, y in zip(pts, vals)])))
    if residual > tol * vscale:
        raise OverdeterminedMismatch(
            f"data is not polynomial of degree <= {deg_bound} "
            f"(residual {residual:.3e} vs tol {tol * vscale:.3e})",
            residual=residual,
        )
    return PolyFit(poly, residual, cond)


# ---------------------------------------------------------------------------
# sampled values on a polydisc
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class SampleGrid:
    """(point, value) samples inside a closed polydisc.

    Points are tuples of complex coordinates; constructing a grid with a
    node outside the polydisc described by center/radii raises.
    """

    center: tuple
    radii: tuple
    nodes: tuple  # of (point, value)

    def __post_init__(self):
        for point, _ in self.nodes:
            for z, c, r in zip(point, self.center, self.radii):
                if abs(complex(z) - complex(c)) > r * (1 + 1e-12):
                    raise ValueError(
                        f"node {point} lies outside the polydisc"
                    )

    def points(self):
        return [pt for pt, _ in self.nodes]

    def values(self):
        return np.asarray([v for _, v in self.nodes], dtype=complex)


# ---------------------------------------------------------------------------
# polydisc Taylor models
# ---------------------------------------------------------------------------

@dataclass
class PolydiscModel:
    """Truncated Taylor model of a holomorphic function on a polydisc.

    Coefficients live in the scaled variables s_k = (z_k - center_k) /
    radius_k, so the model's natural domain is the unit polydisc in s.
    """

    center: tuple
    radii: tuple
    coeffs: dict  # exponent tuple -> complex
    build_error: float = 0.0

    def __call__(self, point):
        s = [(complex(point[k]) - self.center[k]) / self.radii[k]
             for k in range(len(self.center))]
        total = 0j
        for exps, c in self.coeffs.items():
            term = c
            for e, sk in zip(exps, s):
                if e:
                    term *= sk**e
            total += term
        return total

    def derivative(self, axis):
        """Analytic partial derivative along one axis (unscaled variable)."""
        out = {}
        r = self.radii[axis]
        for exps, c in self.coeffs.items():
            e = exps[axis]
            if e == 0:
                continue
            key = exps[:axis] + (e - 1,) + exps[axis + 1:]
            out[key] = out.get(key, 0j) + c * e / r
        return PolydiscModel(self.center, self.radii, out, self.build_error)

    @property
    def max_coeff(self):
        return max((abs(c) for c in self.coeffs.values()), default=0.0)


def torus_nodes(center, radii, nodes):
    """The distinguished-boundary sample grid: per grid index, the point
    (center_k + radii_k * e^{2 pi i idx_k / nodes})_k."""
    ring = np.exp(2j * np.pi * np.arange(nodes) / nodes)
    k = len(center)
    shape = (nodes,) * k
    pts = np.empty(shape + (k,), dtype=complex)
    for idx in np.ndindex(*shape):
        for ax in range(k):
            pts[idx + (ax,)] = center[ax] + radii[ax] * ring[idx[ax]]
    return pts


def polydisc_fit_grid(grid, center, radii, trunc_tol=1e-14):
    """Fit a PolydiscModel from values sampled on the torus_nodes grid.

    The multidimensional DFT of the value grid yields Taylor coefficients;
    frequencies above nodes//2 per axis are discarded (aliasing guard), as
    are coefficients below trunc_tol * max|coeff|.
    """
    grid = np.asarray(grid, dtype=complex)
    nodes = grid.shape[0]
    coeff_grid = np.fft.fftn(grid) / grid.size
    keep = nodes // 2
    cmax = float(np.max(np.abs(coeff_grid)))
    cutoff = trunc_tol * max(cmax, 1e-300)
    coeffs = {}
    for idx in np.ndindex(*coeff_grid.shape):
        if any(i > keep for i in idx):
            continue
        c = coeff_grid[idx]
        if abs(c) > cutoff:
            coeffs[idx] = complex(c)
    return PolydiscModel(
        tuple(map(complex, center)), tuple(map(float, radii)), coeffs
    )


def polydisc_fit(f, center, radii, nodes=32, trunc_tol=1e-14):
    """Fit a PolydiscModel to an evaluator by FFT on the distinguished
    boundary; the model records a validation error from off-grid interior
    probes. ``f`` takes a point (sequence of complex parameter values)."""
    k = len(center)
    pts = torus_nodes(center, radii, nodes)
    grid = np.empty((nodes,) * k, dtype=complex)
    for idx in np.ndindex(*grid.shape):
        grid[idx] = f(pts[idx])
    model = polydisc_fit_grid(grid, center, radii, trunc_tol)

    err = 0.0
    for t in range(4):
        w = np.exp(1j * (0.41 + 1.77 * t))
        pt = [center[ax] + 0.57 * radii[ax] * w * np.exp(0.23j * (ax + 1))
              for ax in range(k)]
        err = max(err, abs(model(pt) - f(pt)))
    model.build_error = err
    return model


def gauss_legendre_segment(g, z0, z1, nodes=24):
    """Gauss-Legendre quadrature of ``g`` along the straight segment z0->z1."""
    x, w = np.polynomial.legendre.leggauss(nodes)
    mid = 0.5 * (z0 + z1)
    half = 0.5 * (z1 - z0)
    total = 0j
    for xi, wi in zip(x, w):
        total += wi * g(mid + half * xi)
    return total * half

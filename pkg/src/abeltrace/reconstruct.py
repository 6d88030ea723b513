"""Inverse direction: recover minimal polynomials, the numerator, and
global algebraic data from trace moments.

Per fiber variable the moments satisfy a monic linear recurrence whose
coefficients are the minimal-polynomial coefficients; solving the
shifted-Hankel systems (rows indexed by the other slots' multi-indices)
recovers them, and the generating-series identity

    sum_I m_I / y^(I+1) = Q / (P_1 ... P_p),       m_I = (-1)^(n p) u_I

yields the numerator coefficients by clearing negative powers slot by
slot (first fiber slot first, then the next). The sign normalization
converts the repo Jacobian convention into the substituted-system
residues the series identity is stated for, so a round trip returns the
source numerator with its original sign.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import product as iproduct

import numpy as np

from .errors import (
    DegreeUndetectable,
    IllConditioned,
    InconsistentTraces,
    OverdeterminedMismatch,
    UnsupportedDimension,
)
from .geometry import DomainSpec, ResidueData, VarietySpec
from .multipoly import MultiPoly
from .numeric import COND_CAP, TOL_FIT, UniPoly, poly_interpolate
from .residues import (
    CLEAN,
    TorusPlan,
    TraceTable,
    moment_sign,
    trace_table,
)


@dataclass(frozen=True)
class MinimalPolySet:
    """Monic minimal polynomials per fiber variable: degrees d_i and
    coefficient functions (UniPolys in the base variable, possibly
    constants), ordered a_1 .. a_{d_i} from the sub-leading term down."""

    base_var: str
    y_vars: tuple
    degrees: tuple
    coeffs: tuple          # per variable: tuple of UniPoly, length d_i
    diagnostics: dict = field(default_factory=dict)

    def poly_at(self, i, x):
        """P_i at a base value, as a monic UniPoly in y_i."""
        d = self.degrees[i]
        low_first = [self.coeffs[i][d - 1 - k](x) for k in range(d)] + [1.0]
        return UniPoly(low_first)

    def coefficient_values(self, i, x):
        """(a_1, ..., a_d) for variable i at a base value."""
        return [c(x) for c in self.coeffs[i]]

    def as_multipoly(self, i, x_var):
        """P_i as a MultiPoly over (x_var, y_i)."""
        vars2 = (x_var, self.y_vars[i])
        d = self.degrees[i]
        out = MultiPoly(vars2, {(0, d): 1.0})
        for j in range(1, d + 1):
            cf = self.coeffs[i][j - 1]
            for e, c in enumerate(cf.coeffs):
                if c != 0:
                    out = out + MultiPoly(vars2, {(e, d - j): c})
        return out


@dataclass(frozen=True)
class ReconstructedData:
    """Product-form residue data recovered from traces: minimal
    polynomials, a numerator with deg_{y_i} Q <= d_i - 1, and fit
    diagnostics. ``is_zero`` marks the zero reconstruction (all traces
    vanished)."""

    minimal: MinimalPolySet
    numerator: MultiPoly
    diagnostics: dict = field(default_factory=dict)
    is_zero: bool = False

    def to_residue_data(self, label="reconstructed"):
        x = self.minimal.base_var
        y_vars = self.minimal.y_vars
        allv = (x,) + tuple(y_vars)
        defs = [
            self.minimal.as_multipoly(i, x).with_vars(allv)
            for i in range(len(y_vars))
        ]
        degree = 1
        for d in self.minimal.degrees:
            degree *= d
        variety = VarietySpec((x,), y_vars, defs, degree=degree)
        return ResidueData(variety, self.numerator.with_vars(allv), label=label)

    @classmethod
    def zero(cls, base_var, y_vars):
        p = len(y_vars)
        minimal = MinimalPolySet(
            base_var, tuple(y_vars), (1,) * p,
            tuple((UniPoly.zero(),) for _ in range(p)),
        )
        num = MultiPoly.zero((base_var,) + tuple(y_vars))
        return cls(minimal, num, {"zero_traces": True}, is_zero=True)


# ---------------------------------------------------------------------------
# moment plumbing
# ---------------------------------------------------------------------------

def _reconstruction_samples(t: TraceTable):
    """Clean samples of a projection-chart table: list of (x value,
    {index: trace}) pairs. The table must come from vertical charts
    (a = 0) with at most b_1 varying."""
    if t.n != 1:
        raise UnsupportedDimension("reconstruction supports one base variable")
    if np.any(t.domain.chart.a != 0):
        raise ValueError("reconstruction expects vertical charts (a = 0)")
    extra = [k for k in t.domain.varying if k != "b1"]
    if extra:
        raise ValueError(f"reconstruction tables may vary only b1, got {extra}")
    b0 = complex(t.domain.chart.b[0])
    out = []
    for s, off in enumerate(t.offsets):
        if t.flags[s] != CLEAN:
            continue
        x = b0 + complex(off.get("b1", 0.0))
        moms = {idx: t.entries[idx][s] for idx in t.entries}
        out.append((x, moms))
    if not out:
        raise ValueError("no clean samples available")
    return out


def _slot_rows(moms, i, d, p, max_order):
    """Rows of the recurrence system for fiber slot i at one sample:
    a_1 * m[.., k_i+d-1, ..] + ... + a_d * m[.., k_i, ..] = -m[.., k_i+d, ..],
    rows running over k_i and the other slots' indices."""
    other_ranges = [range(max_order + 1) for _ in range(p - 1)]
    rows, rhs = [], []
    for k_i in range(max_order - d + 1):
        for other in iproduct(*other_ranges):
            def full(ki):
                idx = list(other)
                idx.insert(i, ki)
                return tuple(idx)
            if full(k_i + d) not in moms:
                continue
            rows.append([moms[full(k_i + d - j)] for j in range(1, d + 1)])
            rhs.append(-moms[full(k_i + d)])
    return np.asarray(rows, dtype=complex), np.asarray(rhs, dtype=complex)


def _fit_slot(moms, i, d, p, max_order, scale):
    a, rhs = _slot_rows(moms, i, d, p, max_order)
    if a.shape[0] < d:
        raise ValueError(f"too few recurrence rows for degree {d} in slot {i}")
    sol, _, _, sv = np.linalg.lstsq(a, rhs, rcond=None)
    resid = float(np.max(np.abs(a @ sol - rhs))) / scale if a.size else 0.0
    cond = float(sv[0] / sv[-1]) if sv.size and sv[-1] > 0 else np.inf
    return sol, resid, cond


def _snap_abs(poly: UniPoly, cutoff):
    """Zero out coefficients below an absolute cutoff."""
    if poly.is_zero:
        return poly
    return UniPoly([0.0 if abs(c) <= cutoff else c for c in poly.coeffs])


def _fit_coefficient(samples, values, deg_bound, tol, scale=1.0):
    """Fit one coefficient function over the base samples; automatic
    degree sweep when no bound is given. Coefficients below tol * scale
    (the shared magnitude of the surrounding coefficient family) snap to
    zero."""
    pts = list(zip(samples, values))
    cutoff = tol * max(scale, 1e-300)
    if len(pts) == 1:
        return _snap_abs(UniPoly.constant(values[0]), cutoff), 0.0
    if deg_bound is not None:
        fit = poly_interpolate(pts, deg_bound, tol)
        return _snap_abs(fit.poly, cutoff), fit.residual
    cap = max(0, (len(pts) - 1) // 2)
    last = None
    for deg in range(cap + 1):
        try:
            fit = poly_interpolate(pts, deg, tol)
            return _snap_abs(fit.poly, cutoff), fit.residual
        except OverdeterminedMismatch as exc:
            last = exc
    raise OverdeterminedMismatch(
        f"coefficient is not polynomial of degree <= {cap}: likely a "
        f"meromorphic coefficient ({last})",
        residual=getattr(last, "residual", None),
    )


# ---------------------------------------------------------------------------
# operations
# ---------------------------------------------------------------------------

def fit_minimal_polys(t: TraceTable, d_max, tol=TOL_FIT, coeff_deg_bound=None,
                      cond_cap=COND_CAP):
    """Recover the monic minimal-polynomial coefficients from a trace
    table: per fiber variable, the smallest recurrence length d <= d_max
    whose residual falls below tol (rows taken across the other slots'
    multi-indices), solved per base sample and then fitted as polynomials
    in the base variable.

    Raises DegreeUndetectable (zero_moments=True when all traces vanish),
    IllConditioned near the discriminant, OverdeterminedMismatch when a
    coefficient is not polynomial within the degree bound.
    """
    samples = _reconstruction_samples(t)
    p = t.p
    scale = t.scale()
    if scale <= tol * max(t.term_scale(), 1e-300):
        raise DegreeUndetectable(
            "all traces vanish; data is identically zero", zero_moments=True
        )
    if t.max_order < 2 * d_max - 1:
        raise ValueError(
            f"table max_order {t.max_order} too small for d_max {d_max} "
            f"(need at least 2*d_max - 1)"
        )

    xs = [s[0] for s in samples]
    degrees, coeff_polys, diags = [], [], {}
    for i in range(p):
        # degree detection at the first clean sample
        first = samples[0][1]
        detected = None
        best = None
        for d in range(1, d_max + 1):
            sol, resid, cond = _fit_slot(first, i, d, p, t.max_order, scale)
            if best is None or resid < best[1]:
                best = (d, resid)
            if resid <= tol:
                detected = (d, cond)
                break
        if detected is None:
            raise DegreeUndetectable(
                f"no degree <= {d_max} fits slot {i} "
                f"(best residual {best[1]:.3e} at degree {best[0]})"
            )
        d, cond0 = detected
        if cond0 > cond_cap:
            raise IllConditioned(
                f"slot {i} recurrence condition {cond0:.3e} beyond cap",
                condition=cond0,
            )
        per_sample = []
        worst_res, worst_cond = 0.0, cond0
        for x, moms in samples:
            sol, resid, cond = _fit_slot(moms, i, d, p, t.max_order, scale)
            per_sample.append(sol)
            worst_res = max(worst_res, resid)
            worst_cond = max(worst_cond, cond)
        if worst_cond > cond_cap:
            raise IllConditioned(
                f"slot {i} recurrence condition {worst_cond:.3e} beyond cap",
                condition=worst_cond,
            )
        if worst_res > 10 * tol:
            raise DegreeUndetectable(
                f"slot {i} degree {d} detected at the first sample does not "
                f"fit all samples (worst residual {worst_res:.3e})"
            )
        per_sample = np.asarray(per_sample)
        slot_scale = max(1.0, float(np.max(np.abs(per_sample))))
        fitted = []
        fit_res = 0.0
        for j in range(d):
            poly, res = _fit_coefficient(
                xs, per_sample[:, j], coeff_deg_bound, tol, scale=slot_scale
            )
            fitted.append(poly)
            fit_res = max(fit_res, res)
        degrees.append(d)
        coeff_polys.append(tuple(fitted))
        diags[f"slot{i}"] = {
            "degree": d, "recurrence_residual": worst_res,
            "condition": worst_cond, "coefficient_fit_residual": fit_res,
        }
    return MinimalPolySet(
        t.data.variety.x_vars[0], t.data.variety.y_vars,
        tuple(degrees), tuple(coeff_polys), diags,
    )


def reconstruct_numerator(t: TraceTable, minimal: MinimalPolySet, tol=TOL_FIT,
                          coeff_deg_bound=None):
    """Recover the numerator Q from the trace table and fitted minimal
    polynomials: the formal series of sign-normalized moments equals
    Q / (P_1 ... P_p) up to the truncation order, and clearing negative
    powers slot by slot gives, for K_i < d_i, the coefficient of
    y_i^(d_i-1-K_i) as the convolution of the minimal coefficients with
    the moments.

    Raises InconsistentTraces when the recurrence defect beyond the
    reconstruction window exceeds tolerance (the traces are not generated
    by rational data of this shape).
    """
    samples = _reconstruction_samples(t)
    p = t.p
    sign = moment_sign(t.n, p)
    scale = max(t.scale(), 1e-300)
    degrees = minimal.degrees

    # truncation-defect check: the recurrence must keep holding on every
    # available index window beyond the fitted degree
    worst = 0.0
    for x, moms in samples:
        for i in range(p):
            avals = minimal.coefficient_values(i, x)
            a, rhs = _slot_rows(moms, i, degrees[i], p, t.max_order)
            if a.size:
                worst = max(
                    worst,
                    float(np.max(np.abs(a @ np.asarray(avals) - rhs))) / scale,
                )
    if worst > max(10 * tol, 1e-6):
        raise InconsistentTraces(
            f"recurrence defect {worst:.3e} beyond tolerance; traces are not "
            f"generated by rational data of this shape",
            defect=worst,
        )

    windows = [range(d) for d in degrees]
    xs = [s[0] for s in samples]
    coeff_samples = {K: [] for K in iproduct(*windows)}
    for x, moms in samples:
        acoef = []
        for i in range(p):
            avals = [1.0 + 0j] + list(minimal.coefficient_values(i, x))
            acoef.append(avals)
        for K in iproduct(*windows):
            total = 0j
            for J in iproduct(*[range(k + 1) for k in K]):
                prod_a = 1.0 + 0j
                for i in range(p):
                    prod_a *= acoef[i][J[i]]
                midx = tuple(K[i] - J[i] for i in range(p))
                total += prod_a * (sign * moms[midx])
            coeff_samples[K].append(total)

    x_var = minimal.base_var
    y_vars = minimal.y_vars
    allv = (x_var,) + tuple(y_vars)
    num = MultiPoly.zero(allv)
    fit_res = 0.0
    num_scale = max(
        (abs(v) for vals in coeff_samples.values() for v in vals), default=1.0
    )
    for K, vals in coeff_samples.items():
        poly, res = _fit_coefficient(
            xs, vals, coeff_deg_bound, tol, scale=max(1.0, num_scale)
        )
        fit_res = max(fit_res, res)
        for e, c in enumerate(poly.coeffs):
            if c != 0:
                exps = (e,) + tuple(degrees[i] - 1 - K[i] for i in range(p))
                num = num + MultiPoly(allv, {exps: c})

    diags = dict(minimal.diagnostics)
    diags["truncation_defect"] = worst
    diags["numerator_fit_residual"] = fit_res
    return ReconstructedData(minimal, num, diags)


@dataclass(frozen=True)
class MatchReport:
    passed: bool
    max_residual: float
    max_relative: float
    tol: float
    samples: int
    indices: int

    def to_dict(self):
        return {
            "passed": bool(self.passed),
            "max_residual": self.max_residual,
            "max_relative": self.max_relative,
            "tol": self.tol,
            "samples": self.samples,
            "indices": self.indices,
        }


def verify_traces_match(d1, d2, domain: DomainSpec, max_order, tol,
                        plan=None):
    """Max trace discrepancy between two datasets over a shared sampling
    plan; the computational form of trace injectivity (matching traces on
    enough indices pin the data)."""
    data1 = d1.to_residue_data() if isinstance(d1, ReconstructedData) else d1
    data2 = d2.to_residue_data() if isinstance(d2, ReconstructedData) else d2
    if data1.variety.p != data2.variety.p:
        raise ValueError("datasets have different fiber dimension")
    plan = plan or TorusPlan(6)
    t1 = trace_table(data1, domain, max_order, plan)
    t2 = trace_table(data2, domain, max_order, plan)
    mask = t1.clean_mask() & t2.clean_mask()
    worst = 0.0
    scale = max(t1.scale(), t2.scale(), 1e-300)
    shared = [idx for idx in t1.entries if idx in t2.entries]
    for idx in shared:
        diff = np.abs(t1.entries[idx][mask] - t2.entries[idx][mask])
        if diff.size:
            worst = max(worst, float(np.max(diff)))
    return MatchReport(
        worst <= tol, worst, worst / scale, tol, int(np.sum(mask)), len(shared)
    )


def reconstruct_global(t: TraceTable, d_max, deg_bounds, tol=TOL_FIT):
    """Full inverse pipeline on a locally sampled table: fit the minimal
    polynomials with global polynomial coefficients within ``deg_bounds``,
    then the numerator. Local trace data of algebraic origin determines
    the data on the whole base; non-algebraic data within the bounds fails
    with OverdeterminedMismatch (the honest failure mode). All-zero traces
    return the zero reconstruction.

    ``deg_bounds`` is an int (shared bound) or a dict with keys
    'minimal' and 'numerator'.
    """
    if isinstance(deg_bounds, dict):
        bound_min = deg_bounds.get("minimal")
        bound_num = deg_bounds.get("numerator", bound_min)
    else:
        bound_min = bound_num = deg_bounds
    try:
        minimal = fit_minimal_polys(t, d_max, tol, coeff_deg_bound=bound_min)
    except DegreeUndetectable as exc:
        if exc.zero_moments:
            return ReconstructedData.zero(
                t.data.variety.x_vars[0], t.data.variety.y_vars
            )
        raise
    return reconstruct_numerator(t, minimal, tol, coeff_deg_bound=bound_num)

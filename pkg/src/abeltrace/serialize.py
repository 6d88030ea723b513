"""JSON encoding/decoding for every on-disk schema.

Complex numbers are [re, im] pairs of IEEE-754 doubles; dumping uses
sorted keys and Python's shortest round-trip float repr, so identical
objects serialize to byte-identical UTF-8 JSON with LF line endings.
"""

from __future__ import annotations

import json
import math

import numpy as np

from .geometry import DomainSpec, PlaneChart, ResidueData, VarietySpec
from .multipoly import MultiPoly
from .radon import AffineMap, RadonTransform
from .reconstruct import MinimalPolySet, ReconstructedData
from .residues import TraceTable


def _c(z):
    z = complex(z)
    return [float(z.real), float(z.imag)]


def _uc(pair):
    if pair is None:
        return None
    return complex(float(pair[0]), float(pair[1]))


def encode_multipoly(mp: MultiPoly):
    terms = [
        {"coeff": _c(c), "exps": [int(e) for e in exps]}
        for exps, c in sorted(mp.terms.items())
    ]
    return {"vars": list(mp.vars), "terms": terms}


def decode_multipoly(obj):
    vars = tuple(obj["vars"])
    terms = {tuple(t["exps"]): _uc(t["coeff"]) for t in obj["terms"]}
    return MultiPoly(vars, terms)


def encode_variety(v: VarietySpec):
    return {
        "x_vars": list(v.x_vars),
        "y_vars": list(v.y_vars),
        "defs": [encode_multipoly(f) for f in v.defs],
        "degree": int(v.degree),
    }


def decode_variety(obj):
    return VarietySpec(
        tuple(obj["x_vars"]),
        tuple(obj["y_vars"]),
        [decode_multipoly(f) for f in obj["defs"]],
        degree=obj.get("degree"),
    )


def encode_residue_data(d: ResidueData):
    return {
        "variety": encode_variety(d.variety),
        "numerator": encode_multipoly(d.numerator),
        "label": d.label,
        "weight": encode_multipoly(d.weight) if d.weight is not None else None,
    }


def decode_residue_data(obj):
    return ResidueData(
        decode_variety(obj["variety"]),
        decode_multipoly(obj["numerator"]),
        label=obj.get("label", ""),
        weight=decode_multipoly(obj["weight"]) if obj.get("weight") else None,
    )


def encode_chart(ch: PlaneChart):
    return {
        "n": ch.n,
        "p": ch.p,
        "a": [[_c(ch.a[i, j]) for j in range(ch.p)] for i in range(ch.n)],
        "b": [_c(ch.b[i]) for i in range(ch.n)],
    }


def decode_chart(obj):
    a = [[_uc(z) for z in row] for row in obj["a"]]
    b = [_uc(z) for z in obj["b"]]
    return PlaneChart(a, b)


def encode_domain(dom: DomainSpec):
    # flat pinned form: center over all parameters, radius 0 = frozen
    names = dom.chart.param_names()
    vec = dom.chart.to_params()
    return {
        "n": dom.chart.n,
        "p": dom.chart.p,
        "center": [_c(z) for z in vec],
        "radii": [float(dom.radii.get(nm, 0.0)) for nm in names],
    }


def decode_domain(obj):
    n, p = int(obj["n"]), int(obj["p"])
    chart = PlaneChart.from_params(n, p, [_uc(z) for z in obj["center"]])
    names = chart.param_names()
    radii = {
        nm: float(r) for nm, r in zip(names, obj["radii"]) if float(r) > 0
    }
    return DomainSpec(chart, radii)


def _index_key(idx):
    return ",".join(str(int(i)) for i in idx)


def _parse_index(key):
    return tuple(int(s) for s in key.split(","))


def _encode_values(arr):
    out = []
    for z in np.asarray(arr):
        z = complex(z)
        if math.isnan(z.real) or math.isnan(z.imag):
            out.append(None)
        else:
            out.append(_c(z))
    return out


def _decode_values(items):
    out = []
    for it in items:
        out.append(complex(np.nan, np.nan) if it is None else _uc(it))
    return np.asarray(out, dtype=complex)


def encode_offsets(offsets):
    return [{k: _c(v) for k, v in sorted(off.items())} for off in offsets]


def decode_offsets(items):
    return [{k: _uc(v) for k, v in off.items()} for off in items]


def encode_trace_table(t: TraceTable):
    return {
        "kind": "trace_table",
        "source": encode_residue_data(t.data),
        "domain": encode_domain(t.domain),
        "max_order": t.max_order,
        "baseline_degree": t.baseline_degree,
        "offsets": encode_offsets(t.offsets),
        "entries": {
            _index_key(idx): _encode_values(vals) for idx, vals in t.entries.items()
        },
        "term_scales": [float(s) for s in t.term_scales],
        "flags": list(t.flags),
    }


def decode_trace_table(obj):
    data = decode_residue_data(obj["source"])
    domain = decode_domain(obj["domain"])
    offsets = decode_offsets(obj["offsets"])
    entries = {
        _parse_index(k): _decode_values(v) for k, v in obj["entries"].items()
    }
    return TraceTable(
        data, domain, offsets, entries,
        np.asarray(obj["term_scales"], dtype=float),
        tuple(obj["flags"]), obj["max_order"], obj["baseline_degree"],
    )


def encode_radon(rt: RadonTransform):
    return {
        "kind": "radon_transform",
        "source": encode_residue_data(rt.data),
        "domain": encode_domain(rt.domain),
        "baseline_degree": rt.baseline_degree,
        "offsets": encode_offsets(rt.offsets),
        "coefficients": {
            _index_key(lb): _encode_values(vals) for lb, vals in rt.coeffs.items()
        },
        "term_scales": [float(s) for s in rt.term_scales],
        "flags": list(rt.flags),
    }


def decode_radon(obj):
    return RadonTransform(
        decode_residue_data(obj["source"]),
        decode_domain(obj["domain"]),
        tuple(decode_offsets(obj["offsets"])),
        {_parse_index(k): _decode_values(v) for k, v in obj["coefficients"].items()},
        tuple(obj["flags"]),
        np.asarray(obj["term_scales"], dtype=float),
        int(obj["baseline_degree"]),
    )


def encode_unipoly(p):
    return [_c(c) for c in p.coeffs]


def decode_unipoly(items):
    from .numeric import UniPoly

    return UniPoly([_uc(c) for c in items])


def encode_reconstruction(rec: ReconstructedData):
    m = rec.minimal
    return {
        "kind": "reconstruction",
        "is_zero": bool(rec.is_zero),
        "base_var": m.base_var,
        "y_vars": list(m.y_vars),
        "degrees": [int(d) for d in m.degrees],
        "minimal_coeffs": [
            [encode_unipoly(c) for c in per_var] for per_var in m.coeffs
        ],
        "numerator": encode_multipoly(rec.numerator),
        "diagnostics": _plain(rec.diagnostics),
    }


def decode_reconstruction(obj):
    minimal = MinimalPolySet(
        obj["base_var"],
        tuple(obj["y_vars"]),
        tuple(obj["degrees"]),
        tuple(
            tuple(decode_unipoly(c) for c in per_var)
            for per_var in obj["minimal_coeffs"]
        ),
        obj.get("diagnostics", {}),
    )
    return ReconstructedData(
        minimal,
        decode_multipoly(obj["numerator"]),
        obj.get("diagnostics", {}),
        is_zero=obj.get("is_zero", False),
    )


def encode_affine_map(mu: AffineMap):
    k = mu.matrix.shape[0]
    return {
        "matrix": [[_c(mu.matrix[i, j]) for j in range(k)] for i in range(k)],
        "offset": [_c(z) for z in mu.offset],
    }


def decode_affine_map(obj):
    m = np.array([[_uc(z) for z in row] for row in obj["matrix"]])
    v = np.array([_uc(z) for z in obj["offset"]])
    return AffineMap(m, v)


def _plain(obj):
    """Best-effort conversion of diagnostics to JSON-safe values."""
    if isinstance(obj, dict):
        return {str(k): _plain(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_plain(v) for v in obj]
    if isinstance(obj, complex):
        return _c(obj)
    if isinstance(obj, (np.floating, np.integer)):
        return obj.item()
    if isinstance(obj, float) and math.isinf(obj):
        return "inf"
    return obj


def dumps(obj):
    """Deterministic JSON text: sorted keys, LF endings, UTF-8."""
    return json.dumps(_plain(obj), sort_keys=True, indent=2, ensure_ascii=False) + "\n"


def load_json(path):
    with open(path, encoding="utf-8") as fh:
        return json.load(fh)

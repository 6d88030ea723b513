import json

import numpy as np
import pytest

from abeltrace import serialize as ser
from abeltrace.cli import main
from abeltrace.geometry import DomainSpec, PlaneChart, ResidueData, VarietySpec
from abeltrace.multipoly import MultiPoly
from abeltrace.radon import AffineMap, radon_coefficients
from abeltrace.residues import GridPlan, TorusPlan, trace_table

V2 = ("x", "y")


@pytest.fixture
def parabola_files(tmp_path):
    f = MultiPoly(V2, {(0, 2): 1.0, (1, 0): -1.0})
    v = VarietySpec(("x",), ("y",), [f])
    paths = {}
    paths["variety"] = tmp_path / "parabola.json"
    paths["variety"].write_text(ser.dumps(ser.encode_variety(v)))
    paths["numerator"] = tmp_path / "one.json"
    paths["numerator"].write_text(
        ser.dumps(ser.encode_multipoly(MultiPoly.constant(1.0, V2)))
    )
    dom = DomainSpec(PlaneChart([[0.1]], [3.0]), {"a1.1": 0.4, "b1": 0.8})
    paths["domain"] = tmp_path / "dom.json"
    paths["domain"].write_text(ser.dumps(ser.encode_domain(dom)))
    vdom = DomainSpec(PlaneChart.vertical([3.0]), {"b1": 0.6})
    paths["vdomain"] = tmp_path / "vdom.json"
    paths["vdomain"].write_text(ser.dumps(ser.encode_domain(vdom)))
    return tmp_path, paths


class TestSerialization:
    def test_multipoly_round_trip(self):
        f = MultiPoly(V2, {(0, 2): 1.0 + 2.0j, (3, 1): -0.5})
        assert ser.decode_multipoly(ser.encode_multipoly(f)) == f

    def test_residue_data_round_trip(self):
        f = MultiPoly(V2, {(0, 2): 1.0, (1, 0): -1.0})
        v = VarietySpec(("x",), ("y",), [f])
        w = MultiPoly(V2, {(1, 0): 1.0, (0, 0): -2.0})
        d = ResidueData(v, MultiPoly.constant(2.0, V2), label="tag", weight=w)
        back = ser.decode_residue_data(ser.encode_residue_data(d))
        assert back.label == "tag"
        assert back.numerator == d.numerator
        assert back.weight == d.weight
        assert back.variety.defs == d.variety.defs
        assert back.variety.degree == d.variety.degree

    def test_domain_round_trip_preserves_frozen(self):
        dom = DomainSpec(PlaneChart([[0.5j, 1.0]], [2.0]), {"b1": 0.25})
        back = ser.decode_domain(ser.encode_domain(dom))
        assert back.radii == {"b1": 0.25}
        assert np.allclose(back.chart.to_params(), dom.chart.to_params())

    def test_trace_table_round_trip(self):
        f = MultiPoly(V2, {(0, 2): 1.0, (1, 0): -1.0})
        data = ResidueData(
            VarietySpec(("x",), ("y",), [f]), MultiPoly.constant(1.0, V2)
        )
        dom = DomainSpec(PlaneChart.vertical([3.0]), {"b1": 0.5})
        t = trace_table(data, dom, 3, TorusPlan(5))
        back = ser.decode_trace_table(ser.encode_trace_table(t))
        assert back.max_order == t.max_order
        assert back.flags == t.flags
        for idx in t.entries:
            assert np.allclose(back.entries[idx], t.entries[idx])
        # the decoded table can still evaluate off-plan
        assert back.value(3, PlaneChart.vertical([3.3])) == pytest.approx(-3.3)

    def test_radon_round_trip(self):
        f = MultiPoly(V2, {(0, 2): 1.0, (1, 0): -1.0})
        data = ResidueData(
            VarietySpec(("x",), ("y",), [f]), MultiPoly.constant(1.0, V2)
        )
        dom = DomainSpec(PlaneChart([[0.1]], [2.0]), {"a1.1": 0.2, "b1": 0.3})
        rt = radon_coefficients(data, dom, GridPlan({"a1.1": 3, "b1": 3}))
        back = ser.decode_radon(ser.encode_radon(rt))
        for lb in rt.coeffs:
            assert np.allclose(back.coeffs[lb], rt.coeffs[lb])

    def test_affine_map_round_trip(self):
        mu = AffineMap(
            np.array([[2.0, 1.0j], [0.0, 1.0]]), np.array([0.5, -0.25j])
        )
        back = ser.decode_affine_map(ser.encode_affine_map(mu))
        assert np.allclose(back.matrix, mu.matrix)
        assert np.allclose(back.offset, mu.offset)

    def test_dumps_deterministic(self):
        obj = {"b": [1.0, 2.0], "a": {"z": 0.1}}
        assert ser.dumps(obj) == ser.dumps(json.loads(ser.dumps(obj)))


class TestCli:
    def run_trace(self, paths, tmp_path, out="t.json", domain="domain",
                  grid="3x3", order=4):
        code = main([
            "trace", "--variety", str(paths["variety"]),
            "--numerator", str(paths["numerator"]),
            "--domain", str(paths[domain]),
            "--order", str(order), "--grid", grid,
            "-o", str(tmp_path / out),
        ])
        assert code == 0
        return tmp_path / out

    def test_trace_writes_table(self, parabola_files):
        tmp_path, paths = parabola_files
        out = self.run_trace(paths, tmp_path)
        obj = json.loads(out.read_text())
        assert obj["result"]["kind"] == "trace_table"
        assert "provenance" in obj
        col0 = obj["result"]["entries"]["0"]
        assert max(abs(complex(c[0], c[1])) for c in col0) < 1e-12

    def test_determinism(self, parabola_files):
        tmp_path, paths = parabola_files
        a = self.run_trace(paths, tmp_path, "t1.json").read_text()
        b = self.run_trace(paths, tmp_path, "t2.json").read_text()
        assert a == b

    def test_verify_shock_pass(self, parabola_files):
        tmp_path, paths = parabola_files
        out = self.run_trace(paths, tmp_path)
        code = main([
            "verify", "shock", "--traces", str(out), "--tol", "1e-6",
            "-o", str(tmp_path / "shock.json"),
        ])
        assert code == 0
        rep = json.loads((tmp_path / "shock.json").read_text())
        assert rep["report"]["passed"] is True

    def test_reconstruct_round_trip(self, parabola_files):
        tmp_path, paths = parabola_files
        out = self.run_trace(
            paths, tmp_path, "tv.json", domain="vdomain", grid="torus:9",
            order=5,
        )
        code = main([
            "reconstruct", "--traces", str(out), "--d-max", "2",
            "-o", str(tmp_path / "rec.json"),
        ])
        assert code == 0
        rec = json.loads((tmp_path / "rec.json").read_text())["result"]
        assert rec["degrees"] == [2]
        assert not rec["is_zero"]

    def test_reconstruct_zero_traces(self, parabola_files, tmp_path):
        _, paths = parabola_files
        zero = tmp_path / "zero.json"
        zero.write_text(ser.dumps(ser.encode_multipoly(MultiPoly.zero(V2))))
        code = main([
            "trace", "--variety", str(paths["variety"]),
            "--numerator", str(zero), "--domain", str(paths["vdomain"]),
            "--order", "3", "--grid", "torus:5",
            "-o", str(tmp_path / "tz.json"),
        ])
        assert code == 0
        code = main([
            "reconstruct", "--traces", str(tmp_path / "tz.json"),
            "-o", str(tmp_path / "recz.json"),
        ])
        assert code == 0
        rec = json.loads((tmp_path / "recz.json").read_text())["result"]
        assert rec["is_zero"] is True

    def test_radon_and_holomorphy(self, parabola_files):
        tmp_path, paths = parabola_files
        code = main([
            "radon", "--variety", str(paths["variety"]),
            "--numerator", str(paths["numerator"]),
            "--domain", str(paths["domain"]), "--grid", "4x4",
            "-o", str(tmp_path / "rt.json"),
        ])
        assert code == 0
        code = main([
            "verify", "holomorphy", "--radon", str(tmp_path / "rt.json"),
            "--tol", "1e-6", "-o", str(tmp_path / "hol.json"),
        ])
        assert code == 0

    def test_verify_match_failure_exit_code(self, parabola_files, tmp_path):
        _, paths = parabola_files
        f = MultiPoly(V2, {(0, 2): 1.0, (1, 0): -1.0})
        v = VarietySpec(("x",), ("y",), [f])
        d1 = ResidueData(v, MultiPoly.constant(1.0, V2))
        d2 = ResidueData(v, MultiPoly.constant(2.0, V2))
        p1 = tmp_path / "d1.json"
        p2 = tmp_path / "d2.json"
        p1.write_text(ser.dumps(ser.encode_residue_data(d1)))
        p2.write_text(ser.dumps(ser.encode_residue_data(d2)))
        code = main([
            "verify", "match", "--data1", str(p1), "--data2", str(p2),
            "--domain", str(paths["vdomain"]), "--order", "3",
            "--tol", "1e-8",
        ])
        assert code == 2

    def test_equivariance_command(self, parabola_files, tmp_path):
        _, paths = parabola_files
        mu = AffineMap(np.diag([2.0, 1.0]), np.zeros(2))
        mpath = tmp_path / "mu.json"
        mpath.write_text(ser.dumps(ser.encode_affine_map(mu)))
        code = main([
            "verify", "equivariance", "--variety", str(paths["variety"]),
            "--numerator", str(paths["numerator"]),
            "--domain", str(paths["domain"]), "--map", str(mpath),
            "--tol", "1e-8",
        ])
        assert code == 0

    def test_extend_command(self, parabola_files, tmp_path):
        _, paths = parabola_files
        out = self.run_trace(paths, tmp_path, "tsmall.json", grid="torus:5")
        big = DomainSpec(
            PlaneChart([[0.1]], [3.0]), {"a1.1": 0.4, "b1": 1.6}
        )
        bpath = tmp_path / "big.json"
        bpath.write_text(ser.dumps(ser.encode_domain(big)))
        code = main([
            "extend", "--traces", str(out), "--domain", str(bpath),
            "--order", "2", "-o", str(tmp_path / "ext.json"),
        ])
        assert code == 0
        obj = json.loads((tmp_path / "ext.json").read_text())
        assert obj["result"]["kind"] == "trace_table"

    def test_input_error_exit_code(self, tmp_path):
        code = main([
            "reconstruct", "--traces", str(tmp_path / "missing.json"),
        ])
        assert code == 1

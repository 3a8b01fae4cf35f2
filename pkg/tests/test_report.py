import json
from fractions import Fraction

import numpy as np
import pytest

from gmtlab import io as gio
from gmtlab.chains import boundary
from gmtlab.errors import GmtError
from gmtlab.flatnorm import filling_volume
from gmtlab.generators import frostman_weights, gen_sphere, gen_ultrametric
from gmtlab.harness import check_ultrametric_covering, check_ultrametric_lemma
from gmtlab.report import ExperimentReport, content_hash, dumps, emit_report, plain, report_csv


def sample_report():
    rep = ExperimentReport("demo", {"x": 1}, notes={"q": Fraction(1, 3), "inf": float("inf")})
    rep.add("a", [1, 2, 3], [0.1, 0.2, 0.30000000000000004], [1, 1, 1])
    rep.add("b", [0.5], [Fraction(1, 4)])
    return rep


class TestEmit:
    def test_same_report_same_bytes(self, tmp_path):
        a = emit_report(sample_report(), tmp_path / "a.json").read_bytes()
        b = emit_report(sample_report(), tmp_path / "b.json").read_bytes()
        assert a == b

    def test_csv_rows(self, tmp_path):
        rep = check_ultrametric_lemma(4, 2, 2)
        rows = report_csv(rep).splitlines()
        assert len(rows) - 1 == sum(len(s.grid) for s in rep.series)

    def test_json_round_trip_idempotent(self, tmp_path):
        rep = check_ultrametric_covering(4, 2, 3, ks=(1, 2))
        p = emit_report(rep, tmp_path / "r.json")
        back = ExperimentReport.from_dict(json.loads(p.read_text())["report"])
        q = emit_report(back, tmp_path / "s.json")
        assert p.read_bytes() == q.read_bytes()

    def test_unknown_format(self, tmp_path):
        with pytest.raises(ValueError):
            emit_report(sample_report(), tmp_path / "x", fmt="xml")

    def test_bad_verdict(self):
        with pytest.raises(ValueError):
            ExperimentReport("x", {}, verdict="maybe")


class TestPlain:
    def test_twelve_digits(self):
        assert plain(0.1 + 0.2) == 0.3
        assert plain(np.float64(1 / 3)) == 0.333333333333

    def test_rationals_exact(self):
        assert plain(Fraction(1, 3)) == "1/3"

    def test_nonfinite(self):
        assert plain([float("inf"), float("nan")]) == ["inf", "nan"]

    def test_hash_ignores_key_order(self):
        assert content_hash({"a": 1, "b": 2}) == content_hash({"b": 2, "a": 1})

    def test_dumps_sorted(self):
        assert dumps({"b": 1, "a": 2}).index('"a"') < dumps({"b": 1, "a": 2}).index('"b"')


class TestRoundTrip:
    def test_space(self):
        U = gen_ultrametric(4, 2, 2)
        V = gio.space_from_json(json.loads(json.dumps(gio.space_to_json(U))))
        assert np.array_equal(U.dist, V.dist) and V.ultrametric

    def test_measure(self):
        mu = frostman_weights(4, 2)
        nu = gio.measure_from_json(gio.measure_to_json(mu))
        assert nu.exact == mu.exact

    def test_complex_and_chain(self):
        S = gen_sphere(1)
        K = gio.complex_from_json(json.loads(json.dumps(gio.complex_to_json(S.complex))))
        T = gio.chain_from_json(gio.chain_to_json(S.chain), K)
        assert np.array_equal(K.coords, S.complex.coords)
        assert T.terms == S.chain.terms and T.dim == 2

    def test_witness_verifies_without_solver(self):
        S = gen_sphere(0)
        T = boundary(S.chain.__class__(S.complex, 2, {0: 1}))
        W = filling_volume(T)
        W2, T2 = gio.witness_from_json(json.loads(json.dumps(gio.witness_to_json(W, T))))
        assert W2.verify(T2) and W2.value_exact == W.value_exact

    def test_missing_field_named(self):
        with pytest.raises(GmtError, match="dist_upper"):
            gio.space_from_json({"n": 2})

    def test_bad_real_named(self):
        with pytest.raises(GmtError, match="vertices"):
            gio.complex_from_json({"simplices": {"0": [[0]]}, "vertices": [["x"]]})

    def test_invalid_json_file(self, tmp_path):
        p = tmp_path / "bad.json"
        p.write_text("{")
        with pytest.raises(GmtError, match="invalid JSON"):
            gio.read_json(p)

"""Canonical JSON state files and the command line front end."""

import json

import numpy as np
import pytest
from click.testing import CliRunner

from eofdual.cli import main
from eofdual.io import SchemaError, decode_state, encode_state, load_state, save_state
from eofdual.states import (
    BipartiteDims,
    DensityMatrix,
    FourPartyDims,
    HermitianObservable,
    PureState,
    sample_density,
    sample_haar_pure,
    sample_hermitian,
)

D22 = BipartiteDims(2, 2)


class TestEncodeDecode:
    def test_basis_state_text(self):
        v = np.zeros(4, dtype=complex)
        v[0] = 1.0
        text = encode_state(PureState(D22, v))
        assert text == (
            '{"kind":"pure","dims":{"a":2,"b":2},'
            '"data":[[1,0],[0,0],[0,0],[0,0]]}\n'
        )

    def test_round_trip_pure_byte_identical(self):
        psi = sample_haar_pure(BipartiteDims(2, 3), seed=1)
        text = encode_state(psi)
        again = encode_state(decode_state(text))
        assert text == again

    def test_round_trip_density_exact_values(self):
        rho = sample_density(D22, 3, seed=2)
        back = decode_state(encode_state(rho))
        np.testing.assert_array_equal(back.matrix, rho.matrix)
        assert back.dims == rho.dims

    def test_round_trip_four_party(self):
        dims = FourPartyDims(2, 2, 2, 2)
        rho = sample_density(dims, 2, seed=3)
        back = decode_state(encode_state(rho))
        assert isinstance(back.dims, FourPartyDims)
        np.testing.assert_array_equal(back.matrix, rho.matrix)

    def test_round_trip_hermitian(self):
        h = sample_hermitian(D22, seed=4)
        back = decode_state(encode_state(h))
        assert isinstance(back, HermitianObservable)
        np.testing.assert_array_equal(back.matrix, h.matrix)

    def test_save_load(self, tmp_path):
        rho = sample_density(D22, 2, seed=5)
        p = str(tmp_path / "rho.json")
        save_state(rho, p)
        back = load_state(p)
        np.testing.assert_array_equal(back.matrix, rho.matrix)


class TestSchemaErrors:
    def test_invalid_json(self):
        with pytest.raises(SchemaError, match=r"\$"):
            decode_state("{not json")

    def test_missing_key(self):
        with pytest.raises(SchemaError, match="missing key 'data'"):
            decode_state('{"kind":"pure","dims":{"a":2,"b":2}}')

    def test_unknown_kind(self):
        with pytest.raises(SchemaError, match="unknown kind"):
            decode_state('{"kind":"ghost","dims":{"a":2,"b":2},"data":[]}')

    def test_bad_dims_keys(self):
        with pytest.raises(SchemaError, match=r"\$\.dims"):
            decode_state('{"kind":"pure","dims":{"x":2},"data":[]}')

    def test_bad_pair_path(self):
        with pytest.raises(SchemaError, match=r"\$\.data\[1\]"):
            decode_state(
                '{"kind":"pure","dims":{"a":1,"b":2},"data":[[1,0],[1]]}'
            )

    def test_wrong_vector_length(self):
        with pytest.raises(SchemaError, match="length"):
            decode_state('{"kind":"pure","dims":{"a":2,"b":2},"data":[[1,0]]}')

    def test_non_psd_density_rejected(self):
        text = (
            '{"kind":"density","dims":{"a":1,"b":2},'
            '"data":[[[1.2,0],[0,0]],[[0,0],[-0.2,0]]]}'
        )
        with pytest.raises(ValueError, match="PSD"):
            decode_state(text)

    def test_non_integer_dims(self):
        with pytest.raises(SchemaError, match=r"\$\.dims\.a"):
            decode_state('{"kind":"pure","dims":{"a":2.0,"b":2},"data":[]}')


class TestCli:
    def run(self, args):
        return CliRunner().invoke(main, args, catch_exceptions=False)

    def test_sample_deterministic(self, tmp_path):
        a, b = str(tmp_path / "a.json"), str(tmp_path / "b.json")
        for path in (a, b):
            r = self.run(["sample", "--kind", "mixed", "--dims", "2 2",
                          "--rank", "2", "--seed", "7", "-o", path])
            assert r.exit_code == 0
        assert open(a, "rb").read() == open(b, "rb").read()

    def test_eof_bell(self, tmp_path):
        bell = np.zeros(4, dtype=complex)
        bell[0] = bell[3] = 1 / np.sqrt(2)
        p = str(tmp_path / "bell.json")
        save_state(DensityMatrix(D22, np.outer(bell, bell.conj())), p)
        r = self.run(["eof", p, "--restarts", "4", "--seed", "0"])
        assert r.exit_code == 0
        report = json.loads(r.output)
        assert report["command"] == "eof"
        assert report["results"][0]["value"] == pytest.approx(1.0, abs=1e-8)
        assert report["config"]["seed"] == 0
        assert len(report["inputs"][0]["sha256"]) == 64

    def test_entropy_and_wootters(self, tmp_path):
        p = str(tmp_path / "mix.json")
        save_state(DensityMatrix(D22, np.eye(4) / 4), p)
        r = self.run(["entropy", p])
        assert json.loads(r.output)["results"][0]["entropy_bits"] == pytest.approx(2.0)
        r = self.run(["wootters", p])
        out = json.loads(r.output)["results"][0]
        assert out["concurrence"] == pytest.approx(0.0, abs=1e-10)
        assert out["eof"] == pytest.approx(0.0, abs=1e-10)

    def test_conjugate_command(self, tmp_path):
        p = str(tmp_path / "h.json")
        save_state(HermitianObservable(D22, 1.5 * np.eye(4)), p)
        r = self.run(["conjugate", p, "--restarts", "4", "--seed", "0"])
        res = json.loads(r.output)["results"][0]
        assert res["value"] == pytest.approx(1.5, abs=1e-8)
        assert res["converged"] is True

    def test_csv_format(self, tmp_path):
        p = str(tmp_path / "mix.json")
        save_state(DensityMatrix(D22, np.eye(4) / 4), p)
        r = self.run(["entropy", p, "--format", "csv"])
        lines = r.output.strip().splitlines()
        assert lines[0].split(",")[0] == "command"
        assert len(lines) == 2

    def test_jobs_preserve_order(self, tmp_path):
        paths = []
        for i in range(4):
            p = str(tmp_path / f"s{i}.json")
            save_state(sample_density(D22, 2, seed=50, index=i), p)
            paths.append(p)
        serial = json.loads(self.run(
            ["eof", *paths, "--restarts", "2", "--seed", "0"]).output)
        parallel = json.loads(self.run(
            ["eof", *paths, "--restarts", "2", "--seed", "0", "--jobs", "3"]).output)
        for a, b in zip(serial["results"], parallel["results"]):
            assert a["path"] == b["path"]
            assert a["value"] == b["value"]

    def test_bad_input_exits_nonzero(self, tmp_path):
        p = tmp_path / "bad.json"
        p.write_text('{"kind":"pure"}')
        r = CliRunner(mix_stderr=False) if False else CliRunner()
        result = r.invoke(main, ["entropy", str(p)])
        assert result.exit_code == 1

    def test_wrong_kind_exits_nonzero(self, tmp_path):
        p = str(tmp_path / "h.json")
        save_state(sample_hermitian(D22, seed=6), p)
        result = CliRunner().invoke(main, ["entropy", p])
        assert result.exit_code == 1

    def test_report_reproducible_with_seed(self, tmp_path):
        p = str(tmp_path / "rho.json")
        save_state(sample_density(D22, 2, seed=8), p)
        a = json.loads(self.run(["eof", p, "--restarts", "3", "--seed", "11"]).output)
        b = json.loads(self.run(["eof", p, "--restarts", "3", "--seed", "11"]).output)
        assert a["results"] == b["results"]

    def test_seed_recorded_when_omitted(self, tmp_path):
        p = str(tmp_path / "rho.json")
        save_state(sample_density(D22, 2, seed=9), p)
        report = json.loads(self.run(["eof", p, "--restarts", "2"]).output)
        assert isinstance(report["config"]["seed"], int)

    def test_theorem_check_product_state(self, tmp_path):
        from eofdual.states import product_across_cut

        rho = product_across_cut(
            sample_density(D22, 2, seed=10, index=0),
            sample_density(D22, 2, seed=10, index=1),
        )
        p = str(tmp_path / "four.json")
        save_state(rho, p)
        r = self.run(["theorem-check", p, "--restarts", "8", "--seed", "0"])
        assert r.exit_code == 0
        rep = json.loads(r.output)["results"][0]
        assert rep["conclusion"] == "implied"
        assert all(rep["verdicts"].values())

import io
import json

import numpy as np
import pytest

from topomix import Grid, GridDensity, tde, tme
from topomix.errors import InvalidInputError, ParseError
from topomix.serialize import (
    FORMAT,
    MixtureDocument,
    looks_like_density,
    parse_density,
    parse_sample,
    read_sample,
    stacked_csv,
)

from oracles import two_two_one_grid_search


class TestParseSample:
    def test_with_header(self):
        np.testing.assert_array_equal(parse_sample("waiting\n79\n54\n\n74\n"), [79, 54, 74])

    def test_without_header(self):
        np.testing.assert_array_equal(parse_sample("1.5\n-2\n"), [1.5, -2])

    def test_bad_value_line_number(self):
        with pytest.raises(ParseError) as exc:
            parse_sample("x\n1\n2\nabc\n")
        assert exc.value.line == 4
        assert "line 4" in str(exc.value)

    def test_two_columns(self):
        with pytest.raises(ParseError):
            parse_sample("1,2\n")

    @pytest.mark.parametrize("text", ["", "header\n", "1\nnan\n"])
    def test_empty_or_nonfinite(self, text):
        with pytest.raises(InvalidInputError):
            parse_sample(text)

    def test_read_from_stream(self):
        np.testing.assert_array_equal(read_sample(io.StringIO("3\n4\n")), [3, 4])


class TestParseDensity:
    def test_grid_from_midpoints(self):
        f = parse_density("x,f\n0.5,2\n1.5,1\n2.5,2\n")
        assert f.grid == Grid(0.0, 1.0, 3)
        np.testing.assert_array_equal(f.values, [2, 1, 2])

    @pytest.mark.parametrize("text", ["0,1\n2,1\n1,1\n", "0,1\n1,1\n3,1\n", "0,1\n1,-1\n", "0,1\n"])
    def test_rejects(self, text):
        with pytest.raises(InvalidInputError):
            parse_density(text)

    def test_malformed_row(self):
        with pytest.raises(ParseError) as exc:
            parse_density("0,1\n1,1,1\n")
        assert exc.value.line == 2

    def test_sniffing(self):
        assert looks_like_density("x,f\n0,1\n")
        assert not looks_like_density("v\n0\n")


class TestDocument:
    def test_three_cell(self):
        f = GridDensity(Grid(0.0, 1.0, 3), [0.4, 0.2, 0.4])
        doc = MixtureDocument.build(tme(f).mixture)
        d = doc.to_dict()
        assert d["format"] == FORMAT
        assert len(d["weights"]) == 2
        assert d["ucat"] == 2
        assert abs(d["j_nats"] - two_two_one_grid_search()) < 1e-4

    def test_unimodal(self):
        doc = MixtureDocument.build(tme(GridDensity(Grid(0.0, 1.0, 4), [1, 3, 2, 1])).mixture)
        assert doc.mixture.n_components == 1
        assert doc.j_nats == 0.0

    def test_round_trip(self):
        x = np.random.default_rng(8).normal(size=50)
        f = GridDensity(Grid(-1.0, 0.05, 40), np.random.default_rng(9).random(40))
        doc = MixtureDocument.build(tme(f).mixture, tde(x), 0.25, {"seed": 3}, panel="tme")
        back = MixtureDocument.from_json(doc.to_json())
        assert back.mixture.grid == doc.mixture.grid
        np.testing.assert_allclose(back.mixture.weights, doc.mixture.weights, rtol=1e-12, atol=0)
        assert back.j_nats == pytest.approx(doc.j_nats, rel=1e-12)
        assert back.tde == json.loads(json.dumps(doc.tde))
        assert back.tde["delta_h"] == 0.25
        assert back.panel == "tme"
        assert back.provenance["seed"] == 3

    def test_wrong_format(self):
        with pytest.raises(ParseError):
            MixtureDocument.from_dict({"format": "other"})

    def test_bad_json(self):
        with pytest.raises(ParseError):
            MixtureDocument.from_json("{")


def test_stacked_csv():
    f = GridDensity(Grid(0.0, 1.0, 3), [2, 1, 2])
    text = stacked_csv({"tme": tme(f).mixture})
    lines = text.strip().splitlines()
    assert lines[0] == "panel,x,cum_1,cum_2"
    assert len(lines) == 4
    last = [float(v) for v in lines[-1].split(",")[1:]]
    assert last[-1] == pytest.approx(2.0)

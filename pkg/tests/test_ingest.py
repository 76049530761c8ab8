import io
import random

import numpy as np
import pytest
from hypothesis import given, strategies as st

from tradequil import (
    CountrySet,
    EmptySelection,
    FlowRecord,
    GoodsSet,
    MalformedRow,
    NegativeValue,
    SelfFlow,
    UnknownDirection,
    UnknownFixture,
    UnknownLabel,
    aggregate,
    build_demand_matrix,
    build_supply_matrix,
    load_fixture,
    parse_flows,
    serialize_flows,
)
from tradequil.ingest import CaptionFixture, fixture_names

HEADER = b"year,reporter,partner,product,direction,value_usd\n"


def parse(body: bytes):
    return parse_flows(HEADER + body)


class TestParse:
    def test_single_row(self):
        (r,) = parse(b"2020,China,Canada,Fuels,export,1000.5\n")
        assert r == FlowRecord(2020, "China", "Canada", "Fuels", "export", 1000.5)

    def test_self_flow(self):
        with pytest.raises(SelfFlow) as info:
            parse(b"2020,China,China,Fuels,export,5\n")
        assert info.value.row == 1

    def test_unknown_direction(self):
        with pytest.raises(UnknownDirection):
            parse(b"2020,China,Canada,Fuels,north,5\n")

    @pytest.mark.parametrize(
        "row, exc",
        [
            (b"2020,China,Canada,Fuels,export\n", MalformedRow),
            (b"2020,China,Canada,Fuels,export,abc\n", MalformedRow),
            (b"20x0,China,Canada,Fuels,export,1\n", MalformedRow),
            (b"2020,China,Canada,Fuels,export,nan\n", MalformedRow),
            (b"2020,China,Canada,Fuels,export,-3\n", NegativeValue),
        ],
    )
    def test_bad_rows(self, row, exc):
        with pytest.raises(exc):
            parse(b"2020,Japan,Italy,Wood,import,1\n" + row)

    def test_row_number_in_message(self):
        with pytest.raises(MalformedRow, match="row 2"):
            parse(b"2020,Japan,Italy,Wood,import,1\n\n2020,Japan,Italy,Wood,import,x\n")

    def test_bad_header(self):
        with pytest.raises(MalformedRow):
            parse_flows(b"a,b,c\n")

    def test_cents_column(self):
        (r,) = parse_flows(b"year,reporter,partner,product,direction,value_cents\n2021,A,B,g,import,250\n")
        assert r.value == 2.5

    def test_text_and_binary_streams(self):
        body = HEADER + b"2020,A,B,g,IMPORT,1\n"
        assert parse_flows(io.BytesIO(body)) == parse_flows(io.StringIO(body.decode()))
        assert parse_flows(body)[0].direction == "import"

    @given(
        st.lists(
            st.tuples(
                st.integers(1990, 2030),
                st.sampled_from(["A", "B", "C"]),
                st.sampled_from(["A", "B", "C"]),
                st.sampled_from(["g1", "g2"]),
                st.sampled_from(["export", "import"]),
                st.floats(0, 1e15, allow_nan=False),
            ).filter(lambda t: t[1] != t[2]),
            max_size=30,
        )
    )
    def test_round_trip(self, rows):
        records = [FlowRecord(*r) for r in rows]
        text = serialize_flows(records)
        assert parse_flows(text) == records
        assert serialize_flows(parse_flows(text)) == text


COUNTRIES = CountrySet(["A", "B", "C"])
GOODS = GoodsSet(["g1", "g2"])


class TestAggregate:
    def test_duplicates_summed(self):
        recs = parse(b"2020,A,B,g1,import,3\n2020,A,B,g1,import,4\n")
        t = aggregate(recs, COUNTRIES, GOODS, 2020)
        assert t.imports[0, 1, 0] == 7

    def test_wrong_year(self):
        recs = parse(b"2019,A,B,g1,import,3\n")
        with pytest.raises(EmptySelection):
            aggregate(recs, COUNTRIES, GOODS, 2020)

    def test_routes_by_direction(self):
        recs = parse(
            b"2020,A,B,g1,import,1\n"
            b"2020,B,A,g1,export,2\n"
            b"2020,C,A,g2,export,3\n"
            b"2020,B,C,g2,import,4\n"
        )
        t = aggregate(recs, COUNTRIES, GOODS, 2020)
        assert build_demand_matrix(t).tolist() == [[1, 0, 0], [0, 4, 0]]
        assert build_supply_matrix(t).tolist() == [[0, 2, 0], [0, 0, 3]]

    def test_strict_and_lenient(self):
        recs = parse(b"2020,A,B,g1,import,1\n2020,A,Z,g1,import,1\n2019,A,B,g1,import,1\n2020,A,B,zz,export,1\n")
        with pytest.raises(UnknownLabel):
            aggregate(recs, COUNTRIES, GOODS, 2020)
        t = aggregate(recs, COUNTRIES, GOODS, 2020, strict=False)
        assert t.records_used == 1
        assert t.records_used + t.records_skipped == len(recs)

    def test_permutation_invariant(self):
        rng = random.Random(1)
        recs = [
            FlowRecord(2020, "A", "B", "g1", "import", rng.uniform(0, 1e12) * 10 ** rng.randint(-6, 3))
            for _ in range(200)
        ]
        base = aggregate(recs, COUNTRIES, GOODS, 2020).imports
        for _ in range(5):
            rng.shuffle(recs)
            assert np.array_equal(aggregate(recs, COUNTRIES, GOODS, 2020).imports, base)


class TestFixtures:
    def test_caption_digits(self):
        fx = load_fixture("fig3_2022")
        assert isinstance(fx, CaptionFixture)
        assert fx.as_dict()["Canada"] == 0.123
        assert fx.as_dict()["China"] == 0.281
        assert load_fixture("fig1_2020").captions[0] == "0.10"
        assert load_fixture("fig7_2020").captions[-1] == "0.1108"

    def test_instances(self):
        fx = load_fixture("degenerate_2x2")
        assert fx.demand.tolist() == [[1, 1], [0, 0]]
        assert fx.supply.tolist() == [[1, 1], [1, 1]]
        assert load_fixture("ideal_2x2").demand.tolist() == [[1, 0], [0, 1]]

    def test_unknown(self):
        with pytest.raises(UnknownFixture):
            load_fixture("nope")

    def test_catalogue(self):
        names = fixture_names()
        assert len(names) == 14
        assert names[:3] == ["fig1_2020", "fig2_2021", "fig3_2022"]
        assert sum(1 for n in names if load_fixture(n).__class__ is CaptionFixture) == 12

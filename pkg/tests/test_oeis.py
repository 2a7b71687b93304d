import subprocess
import sys
import threading
from functools import partial
from http.server import HTTPServer, SimpleHTTPRequestHandler
from pathlib import Path

import pytest
from hypothesis import given
from hypothesis import strategies as st

from kekule_integrals import numtheory as nt
from kekule_integrals.oeis import (
    SUPPORTED,
    BFile,
    BFileParseError,
    NotAvailableError,
    bfile_name,
    compare_prefix,
    format_bfile,
    get_terms,
    load_fixture,
    parse_bfile,
    validate_id,
)

ROOT = Path(__file__).resolve().parents[1]


@pytest.fixture
def cache(tmp_path):
    return tmp_path / "oeis"


def test_offline_examples(cache):
    assert get_terms("A001079", 5, True, cache_dir=cache).values[:5] == [1, 5, 49, 485, 4801]
    assert get_terms("A007913", 8, True, cache_dir=cache).values[:8] == [1, 2, 3, 1, 5, 6, 7, 2]
    with pytest.raises(NotAvailableError):
        get_terms("A999999", 1, True, cache_dir=cache)


def test_offline_request_beyond_fixture(cache):
    with pytest.raises(NotAvailableError, match="fixture has 100"):
        get_terms("A000188", 5000, True, cache_dir=cache)


@pytest.mark.parametrize("seq_id", sorted(SUPPORTED))
def test_every_fixture_present_and_long_enough(seq_id):
    bf = load_fixture(seq_id)
    assert bf is not None and len(bf) >= 50
    assert bf.indices == list(range(bf.offset, bf.offset + len(bf)))


def test_fixtures_match_generator():
    proc = subprocess.run([sys.executable, str(ROOT / "scripts" / "make_fixtures.py"), "--check"],
                          capture_output=True, text=True)
    assert proc.returncode == 0, proc.stdout + proc.stderr


def test_fixture_values_against_definitions():
    assert load_fixture("A122652").values[:6] == [0, 4, 40, 396, 3920, 38804]
    a019554 = load_fixture("A019554")
    assert a019554.value(8) == 4 and a019554.value(12) == 6
    a143608 = load_fixture("A143608")
    # principal convergents p/q of sqrt 2 interleaved with 2q/p: 1/1, 4/3, 7/5, 24/17, 41/29
    assert a143608.values[:6] == [1, 4, 7, 24, 41, 140]
    assert load_fixture("A079496").values[:6] == [1, 3, 5, 17, 29, 99]


@pytest.mark.parametrize("text,line", [
    ("0 1\n1 2\n3 4\n", 3),
    ("# header\n\n0 1\n1 x\n", 4),
    ("0 1 2\n", 1),
])
def test_parse_errors_report_line(text, line):
    with pytest.raises(BFileParseError) as info:
        parse_bfile(text, "A000001")
    assert info.value.line == line
    assert f"line {line}" in str(info.value)


@given(st.integers(-5, 5), st.lists(st.integers(-10**30, 10**30), min_size=1, max_size=30))
def test_format_parse_round_trip(offset, values):
    bf = BFile("A000001", offset, tuple(enumerate(values, start=offset)), "fixture")
    back = parse_bfile(format_bfile(bf, "comment"), "A000001")
    assert back.terms == bf.terms and back.offset == offset


def test_validate_id():
    assert validate_id(" a000188 ") == "A000188"
    assert bfile_name("A000188") == "b000188.txt"
    for bad in ("A12", "B000188", "A0001880", 188):
        with pytest.raises(ValueError):
            validate_id(bad)


class _Quiet(SimpleHTTPRequestHandler):
    hits = 0

    def log_message(self, *args):
        pass

    def do_GET(self):
        type(self).hits += 1
        super().do_GET()


@pytest.fixture
def server(tmp_path):
    root = tmp_path / "www"
    (root / "A999999").mkdir(parents=True)
    (root / "A999999" / "b999999.txt").write_text("# synthetic\n1 10\n2 20\n3 30\n4 40\n")
    (root / "A999998").mkdir(parents=True)
    (root / "A999998" / "b999998.txt").write_text("1 10\n2 twenty\n")
    _Quiet.hits = 0
    httpd = HTTPServer(("127.0.0.1", 0), partial(_Quiet, directory=str(root)))
    thread = threading.Thread(target=httpd.serve_forever, daemon=True)
    thread.start()
    yield f"http://127.0.0.1:{httpd.server_address[1]}"
    httpd.shutdown()


def test_network_fetch_then_cache(server, cache):
    first = get_terms("A999999", 3, False, cache_dir=cache, base_url=server)
    assert first.source == "network" and first.values == [10, 20, 30, 40]
    assert (cache / "b999999.txt").is_file()
    second = get_terms("A999999", 3, False, cache_dir=cache, base_url=server)
    assert second.source == "cache" and second.terms == first.terms
    assert _Quiet.hits == 1
    # offline now succeeds from the cache
    assert get_terms("A999999", 4, True, cache_dir=cache).values == first.values


def test_network_base_url_from_environment(server, cache, monkeypatch):
    monkeypatch.setenv("KEKULE_OEIS_URL", server)
    assert get_terms("A999999", 2, cache_dir=cache).values[:2] == [10, 20]


def test_network_malformed_and_missing(server, cache):
    with pytest.raises(BFileParseError) as info:
        get_terms("A999998", 1, False, cache_dir=cache, base_url=server)
    assert info.value.line == 2
    with pytest.raises(NotAvailableError):
        get_terms("A999997", 1, False, cache_dir=cache, base_url=server, timeout=2)


def test_network_short_bfile(server, cache):
    with pytest.raises(NotAvailableError, match="only 4"):
        get_terms("A999999", 10, False, cache_dir=cache, base_url=server)


def test_compare_prefix_examples(cache):
    m = compare_prefix("A165367", [7, 17, 10, 23, 13], 6, cache_dir=cache)
    assert m.matched and m.first_index == 4 and not m.ambiguous
    assert get_terms("A165367", 9, True, cache_dir=cache).values[4:9] == [7, 17, 10, 23, 13]
    m = compare_prefix("A000188", [1, 1, 1], 2, cache_dir=cache)
    assert m.ambiguous and not m.matched
    m = compare_prefix("A019554", [1, 2, 3, 2, 5, 6, 7, 4], 2, cache_dir=cache)
    assert m.shift == 0 and m.first_index == 1


def test_compare_prefix_negative_shift(cache):
    # two leading terms hang off the front of the b-file and are not compared
    m = compare_prefix("A007913", [99, 99, 1, 2, 3, 1, 5, 6, 7], 3, cache_dir=cache)
    assert m.shift == -2 and m.first_index == -1
    m = compare_prefix("A007913", [1, 2, 3, 1, 5, 6, 7], 3, cache_dir=cache)
    assert m.shift == 0


@given(st.lists(st.integers(0, 50), min_size=5, max_size=12), st.integers(0, 3))
def test_compare_prefix_is_exact(candidate, max_offset):
    bf = load_fixture("A000188")
    m = compare_prefix("A000188", candidate, max_offset, bfile=bf)
    for s in m.matching_shifts:
        for i, c in enumerate(candidate):
            if 0 <= i + s < len(bf):
                assert bf.values[i + s] == c


def test_compare_prefix_recovers_known_shift():
    bf = load_fixture("A026741")
    for shift in range(0, 4):
        cand = bf.values[shift:shift + 10]
        m = compare_prefix("A026741", cand, 3, bfile=bf)
        assert m.shift == shift

"""OEIS b-file client with bundled offline fixtures.

Terms are looked up in the local cache directory, then in the fixtures
shipped with the package, then (unless offline) fetched over HTTP from
``{base}/{id}/b{digits}.txt``.  Environment overrides:

* ``KEKULE_CACHE_DIR`` - cache root (b-files live in its ``oeis`` subfolder)
* ``KEKULE_OEIS_URL``  - base URL, default ``https://oeis.org``
"""

from __future__ import annotations

import os
import re
import tempfile
import time
import urllib.error
import urllib.request
from dataclasses import dataclass
from importlib import resources
from pathlib import Path
from typing import Optional, Sequence

DEFAULT_BASE_URL = "https://oeis.org"
DEFAULT_TIMEOUT = 10.0
MIN_PREFIX = 5

_ID_RE = re.compile(r"^A\d{6}$")

#: sequences the toolkit refers to, with a short description
SUPPORTED = {
    "A000188": "square root of largest square dividing n",
    "A001079": "companion sequence 1, 5, 49, 485, ...",
    "A007913": "squarefree part of n",
    "A019554": "smallest number whose square is divisible by n",
    "A026741": "n if n odd, n/2 if n even",
    "A079496": "denominators of lower principal and intermediate convergents to sqrt(2)",
    "A083481": "core(n(n+1))",
    "A122652": "Kekule numbers c_n = 10 c_{n-1} - c_{n-2}, 0, 4, ...",
    "A129194": "n^2 (3 - (-1)^n) / 4",
    "A143608": "numerators of lower principal and intermediate convergents to sqrt(2)",
    "A165367": "trisection A026741(3n+2)",
    "A168077": "A129194(n), halved at even n",
}


class OEISError(Exception):
    pass


class NotAvailableError(OEISError):
    """No source can provide the requested terms."""


class BFileParseError(OEISError, ValueError):
    def __init__(self, message: str, line: int):
        super().__init__(f"line {line}: {message}")
        self.line = line


def validate_id(seq_id: str) -> str:
    if not isinstance(seq_id, str) or not _ID_RE.match(seq_id.strip().upper()):
        raise ValueError(f"not a sequence id (expected A + 6 digits): {seq_id!r}")
    return seq_id.strip().upper()


@dataclass(frozen=True)
class BFile:
    id: str
    offset: int
    terms: tuple  # ((index, value), ...)
    source: str  # "cache", "fixture" or "network"

    @property
    def values(self) -> list[int]:
        return [v for _, v in self.terms]

    @property
    def indices(self) -> list[int]:
        return [i for i, _ in self.terms]

    def __len__(self) -> int:
        return len(self.terms)

    def value(self, index: int) -> int:
        pos = index - self.offset
        if not 0 <= pos < len(self.terms):
            raise IndexError(f"{self.id}({index}) is outside the available range")
        return self.terms[pos][1]

    def head(self, count: int) -> "BFile":
        return BFile(self.id, self.offset, self.terms[:count], self.source)


def parse_bfile(text: str, seq_id: str, source: str = "fixture") -> BFile:
    """Parse ``index value`` lines; ``#`` comments and blank lines are skipped."""
    seq_id = validate_id(seq_id)
    terms = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        parts = line.split()
        if len(parts) != 2:
            raise BFileParseError(f"expected 'index value', got {raw!r}", lineno)
        try:
            index, value = int(parts[0]), int(parts[1])
        except ValueError:
            raise BFileParseError(f"non-integer field in {raw!r}", lineno) from None
        if terms and index != terms[-1][0] + 1:
            raise BFileParseError(f"index {index} does not follow {terms[-1][0]}", lineno)
        terms.append((index, value))
    if not terms:
        raise BFileParseError("no terms", 0)
    return BFile(seq_id, terms[0][0], tuple(terms), source)


def format_bfile(bfile: BFile, comment: Optional[str] = None) -> str:
    lines = [f"# {comment}"] if comment else []
    lines += [f"{i} {v}" for i, v in bfile.terms]
    return "\n".join(lines) + "\n"


def bfile_name(seq_id: str) -> str:
    return f"b{validate_id(seq_id)[1:]}.txt"


def default_cache_dir() -> Path:
    root = os.environ.get("KEKULE_CACHE_DIR")
    base = Path(root) if root else Path.home() / ".cache" / "kekule-integrals"
    return base / "oeis"


def default_base_url() -> str:
    return os.environ.get("KEKULE_OEIS_URL", DEFAULT_BASE_URL).rstrip("/")


def atomic_write_text(path: Path, text: str) -> None:
    """Write via a temporary file and os.replace, so readers never see partial data."""
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def load_fixture(seq_id: str) -> Optional[BFile]:
    ref = resources.files("kekule_integrals").joinpath("data", bfile_name(seq_id))
    if not ref.is_file():
        return None
    return parse_bfile(ref.read_text(encoding="utf-8"), seq_id, "fixture")


def fetch_bfile(seq_id: str, base_url: Optional[str] = None, timeout: float = DEFAULT_TIMEOUT) -> str:
    """GET the b-file text; one retry after a short pause."""
    seq_id = validate_id(seq_id)
    url = f"{base_url or default_base_url()}/{seq_id}/{bfile_name(seq_id)}"
    last: Exception = OEISError("no attempt made")
    for attempt in range(2):
        try:
            with urllib.request.urlopen(url, timeout=timeout) as resp:
                return resp.read().decode("utf-8")
        except (urllib.error.URLError, OSError) as exc:
            last = exc
            if attempt == 0:
                time.sleep(0.5)
    raise NotAvailableError(f"could not fetch {url}: {last}")


def get_terms(seq_id: str, count: int = 1, offline: bool = False, *,
              cache_dir: Optional[Path] = None, base_url: Optional[str] = None,
              timeout: float = DEFAULT_TIMEOUT) -> BFile:
    """A b-file holding at least ``count`` terms of ``seq_id``."""
    seq_id = validate_id(seq_id)
    if count < 1:
        raise ValueError("count must be >= 1")
    cdir = Path(cache_dir) if cache_dir is not None else default_cache_dir()
    cached = cdir / bfile_name(seq_id)
    shortfall = []
    if cached.is_file():
        bf = parse_bfile(cached.read_text(encoding="utf-8"), seq_id, "cache")
        if len(bf) >= count:
            return bf
        shortfall.append(f"cache has {len(bf)}")
    bf = load_fixture(seq_id)
    if bf is not None:
        if len(bf) >= count:
            return bf
        shortfall.append(f"fixture has {len(bf)}")
    if offline:
        detail = f" ({', '.join(shortfall)})" if shortfall else ""
        raise NotAvailableError(f"{seq_id}: {count} terms not available offline{detail}")
    text = fetch_bfile(seq_id, base_url, timeout)
    bf = parse_bfile(text, seq_id, "network")
    atomic_write_text(cached, format_bfile(bf, f"{seq_id} fetched from {base_url or default_base_url()}"))
    if len(bf) < count:
        raise NotAvailableError(f"{seq_id}: network b-file has only {len(bf)} terms")
    return bf


@dataclass(frozen=True)
class PrefixMatch:
    """Result of aligning a candidate list against a b-file.

    ``shift`` is the list position in the b-file that candidate[0] lines up
    with (negative: leading candidate terms hang off the front), and
    ``first_index`` the matching sequence index.  ``shift`` is None when no
    shift or more than one shift fits (``ambiguous``).
    """

    id: str
    shift: Optional[int]
    first_index: Optional[int]
    ambiguous: bool
    matching_shifts: tuple

    @property
    def matched(self) -> bool:
        return self.shift is not None


def compare_prefix(seq_id: str, candidate: Sequence[int], max_offset: int, *,
                   offline: bool = True, bfile: Optional[BFile] = None, **kw) -> PrefixMatch:
    """Exact alignment of ``candidate`` to the sequence with |shift| <= max_offset.

    Every aligned pair must agree and at least five pairs must overlap.
    Candidates shorter than five terms can never be pinned down and come
    back as ambiguous.
    """
    if max_offset < 0:
        raise ValueError("max_offset must be >= 0")
    candidate = [int(x) for x in candidate]
    if bfile is None:
        bfile = get_terms(seq_id, len(candidate) + max_offset, offline, **kw)
    values = bfile.values
    if len(candidate) < MIN_PREFIX:
        fits = tuple(s for s in range(-max_offset, max_offset + 1)
                     if s >= 0 and values[s:s + len(candidate)] == candidate)
        return PrefixMatch(bfile.id, None, None, True, fits)
    fits = []
    for s in range(-max_offset, max_offset + 1):
        pairs = [(c, values[i + s]) for i, c in enumerate(candidate) if 0 <= i + s < len(values)]
        if len(pairs) >= MIN_PREFIX and all(c == v for c, v in pairs):
            fits.append(s)
    if len(fits) == 1:
        return PrefixMatch(bfile.id, fits[0], bfile.offset + fits[0], False, tuple(fits))
    return PrefixMatch(bfile.id, None, None, len(fits) > 1, tuple(fits))

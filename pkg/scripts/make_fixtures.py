"""Regenerate the bundled b-file fixtures from exact formulas and recurrences.

Usage: python3 scripts/make_fixtures.py [--check]
"""

import argparse
import sys
from pathlib import Path

from kekule_integrals import numtheory as nt
from kekule_integrals.oeis import SUPPORTED, BFile, bfile_name, format_bfile

TERMS = 100
DATA = Path(__file__).resolve().parents[1] / "src" / "kekule_integrals" / "data"


def _lower_convergents(i: int, numerators: bool) -> int:
    # alternate principal convergents p_i/q_i of sqrt(2) (odd i) with the
    # doubled companions 2q_i / p_i (even i)
    conv = nt.convergents_sqrt(2, i)
    if i % 2:
        return conv.numerator if numerators else conv.denominator
    return 2 * conv.denominator if numerators else conv.numerator


GENERATORS = {
    "A000188": (1, nt.a000188),
    "A001079": (0, nt.companion_d),
    "A007913": (1, nt.a007913),
    "A019554": (1, nt.a019554),
    "A026741": (0, nt.a026741),
    "A079496": (1, lambda i: _lower_convergents(i, False)),
    "A083481": (1, nt.a083481),
    "A122652": (0, nt.kekule_c),
    "A129194": (0, nt.a129194),
    "A143608": (1, lambda i: _lower_convergents(i, True)),
    "A165367": (0, nt.a165367),
    "A168077": (0, nt.a168077),
}


def build(seq_id: str) -> str:
    offset, fn = GENERATORS[seq_id]
    terms = tuple((i, fn(i)) for i in range(offset, offset + TERMS))
    return format_bfile(BFile(seq_id, offset, terms, "fixture"),
                        f"{seq_id} {SUPPORTED[seq_id]} (generated)")


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--check", action="store_true", help="verify instead of writing")
    args = parser.parse_args()
    stale = []
    for seq_id in sorted(GENERATORS):
        path = DATA / bfile_name(seq_id)
        text = build(seq_id)
        if args.check:
            if not path.is_file() or path.read_text(encoding="utf-8") != text:
                stale.append(seq_id)
        else:
            path.write_text(text, encoding="utf-8")
    if stale:
        print("stale fixtures:", ", ".join(stale))
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())

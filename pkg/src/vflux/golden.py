"""Golden-file regression corpus.

Each case binds a checked-in configuration to the SHA-256 digest of the
CSV it produces.  Digests are exact per platform; a numeric fallback
comparator (absolute tolerance 1e-12 per cell) exists for environments
with a different BLAS/LAPACK.

Regeneration rewrites ``golden/digests.json`` and is refused unless
maintainer mode is switched on (``--maintainer`` or VFLUX_MAINTAINER=1).

Run as a module::

    python -m vflux.golden --verify
    python -m vflux.golden --regenerate --maintainer [--case NAME]
"""

from __future__ import annotations

import argparse
import hashlib
import json
import os
import sys
from dataclasses import dataclass
from pathlib import Path

from .config import load_config
from .errors import UsageError, VfluxError
from .runner import compute_rows, render_csv

DIGEST_SCHEMA = "vflux-golden/1"
MAINTAINER_ENV = "VFLUX_MAINTAINER"


def default_root() -> Path:
    """Repository golden directory (sibling of the installed package in a
    source checkout; overridable for tests)."""
    return Path(__file__).resolve().parents[2] / "golden"


@dataclass(frozen=True)
class GoldenCase:
    name: str
    config_path: Path
    digest: str
    tolerance_policy: str = "exact"


def load_cases(root: Path | None = None) -> list[GoldenCase]:
    root = root or default_root()
    index = json.loads((root / "digests.json").read_text(encoding="utf-8"))
    if index.get("schema") != DIGEST_SCHEMA:
        raise UsageError(f"unexpected golden digest schema {index.get('schema')!r}")
    cases = []
    for name, entry in sorted(index["cases"].items()):
        cases.append(
            GoldenCase(
                name=name,
                config_path=root / entry["config"],
                digest=entry["sha256"],
                tolerance_policy=entry.get("tolerance", "exact"),
            )
        )
    return cases


def compute_csv(case: GoldenCase) -> str:
    config = load_config(case.config_path)
    columns, rows = compute_rows(config)
    return render_csv(columns, rows)


def digest_of(text: str) -> str:
    return hashlib.sha256(text.encode("utf-8")).hexdigest()


def verify(case: GoldenCase, csv_text: str | None = None) -> tuple[bool, str]:
    """Check one case; returns (ok, actual digest)."""
    text = compute_csv(case) if csv_text is None else csv_text
    actual = digest_of(text)
    return actual == case.digest, actual


def compare_numeric(a: str, b: str, atol: float = 1e-12) -> bool:
    """Cell-wise CSV comparison with absolute tolerance on float cells."""
    rows_a = a.strip().split("\n")
    rows_b = b.strip().split("\n")
    if len(rows_a) != len(rows_b):
        return False
    for line_a, line_b in zip(rows_a, rows_b):
        cells_a = line_a.split(",")
        cells_b = line_b.split(",")
        if len(cells_a) != len(cells_b):
            return False
        for cell_a, cell_b in zip(cells_a, cells_b):
            if cell_a == cell_b:
                continue
            try:
                if abs(float(cell_a) - float(cell_b)) <= atol:
                    continue
            except ValueError:
                pass
            return False
    return True


def _diff_summary(old_digest: str, text: str, case: GoldenCase) -> str:
    lines = text.count("\n")
    return (f"{case.name}: digest {old_digest[:12]} -> {digest_of(text)[:12]} "
            f"({lines - 1} data rows)")


def regenerate(
    case: GoldenCase,
    maintainer: bool = False,
    root: Path | None = None,
) -> str:
    """Refresh one case digest; refuses without the maintainer flag."""
    if not (maintainer or os.environ.get(MAINTAINER_ENV) == "1"):
        raise UsageError("golden regeneration requires maintainer mode")
    root = root or default_root()
    text = compute_csv(case)
    index_path = root / "digests.json"
    index = json.loads(index_path.read_text(encoding="utf-8"))
    entry = index["cases"][case.name]
    old = entry["sha256"]
    entry["sha256"] = digest_of(text)
    index_path.write_text(json.dumps(index, indent=2, sort_keys=True) + "\n",
                          encoding="utf-8")
    print(_diff_summary(old, text, case))
    return entry["sha256"]


def main(argv: list[str] | None = None) -> int:
    parser = argparse.ArgumentParser(prog="python -m vflux.golden",
                                     description="golden regression corpus tooling")
    parser.add_argument("--root", type=Path, default=None, help="golden directory")
    parser.add_argument("--case", default=None, help="restrict to one case name")
    mode = parser.add_mutually_exclusive_group(required=True)
    mode.add_argument("--verify", action="store_true")
    mode.add_argument("--regenerate", action="store_true")
    parser.add_argument("--maintainer", action="store_true",
                        help="enable regeneration (or set VFLUX_MAINTAINER=1)")
    args = parser.parse_args(argv)

    try:
        cases = load_cases(args.root)
    except (OSError, VfluxError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    if args.case is not None:
        cases = [c for c in cases if c.name == args.case]
        if not cases:
            print(f"error: no golden case named {args.case!r}", file=sys.stderr)
            return 2

    status = 0
    for case in cases:
        try:
            if args.regenerate:
                regenerate(case, maintainer=args.maintainer, root=args.root)
            else:
                ok, actual = verify(case)
                print(f"{case.name}: {'ok' if ok else 'MISMATCH ' + actual}")
                if not ok:
                    status = 1
        except VfluxError as exc:
            print(f"error: {case.name}: {exc}", file=sys.stderr)
            status = 2
    return status


if __name__ == "__main__":
    raise SystemExit(main())

"""Command-line driver for linkform.

Exit codes: 0 success, 1 a verification check failed, 2 bad input
(unreadable or malformed files, winding number 0, unsupported rings).
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path

from .knot import KnotData, KnotError, KnotFileError, alexander_module, alexander_poly_seifert, load_knot, parse_knot
from .linking import LinkingError, LinkingPairing, dump_pairing, infect, tensor_pairing
from .matrix import MatrixError
from .module import ModuleError, order
from .ring import QQ, BaseRing, RingError, WindingMorphism, format_poly
from .verify import DEFAULT_FIXTURES, run_criterion, Corpus, CRITERIA

REPRESENTATIVE_NOTE = (
    "note: Q(t)/R classes are shown by their canonical representative: "
    "denominator with lowest term 1 and monic top term, numerator of lower degree."
)


class InputError(Exception):
    """Problem with user input; reported with exit code 2."""


def _fixtures_dir() -> Path:
    env = os.environ.get("LF_FIXTURES")
    return Path(env) if env else DEFAULT_FIXTURES


def _read_json(path: str):
    p = Path(path)
    try:
        return json.loads(p.read_text())
    except OSError as exc:
        raise InputError(f"{p}: cannot read file ({exc.strerror})") from None
    except json.JSONDecodeError as exc:
        raise InputError(f"{p}: invalid JSON ({exc.msg} at line {exc.lineno})") from None


def _knot_pairing(knot: KnotData, base: BaseRing) -> LinkingPairing:
    if knot.seifert is None:
        raise InputError(f"{knot.path}: field 'seifert': a Seifert matrix is needed for the pairing")
    try:
        return knot.blanchfield(base)
    except KnotError as exc:
        raise InputError(f"{knot.path}: field 'seifert': {exc}") from None


def _load_host(path: str, base: BaseRing) -> LinkingPairing:
    """A pairing file (``module`` + ``gram``) or a knot file."""
    obj = _read_json(path)
    if isinstance(obj, dict) and "gram" in obj:
        try:
            B = LinkingPairing.from_json(obj)
        except (LinkingError, ModuleError, RingError, MatrixError, KeyError, TypeError) as exc:
            raise InputError(f"{path}: field 'gram': {exc}") from None
        if B.base != base:
            raise InputError(f"{path}: field 'module': pairing is over {B.base}, --coeff asks for {base}")
        return B
    return _knot_pairing(parse_knot(obj, path), base)


def _table(rows: list[list[str]], indent: str = "  ") -> list[str]:
    widths = [max(len(r[c]) for r in rows) for c in range(len(rows[0]))]
    return [indent + "  ".join(x.ljust(w) for x, w in zip(r, widths)).rstrip() for r in rows]


def _pairing_lines(B: LinkingPairing, labels: list[str] | None = None) -> list[str]:
    n = B.ngens
    labels = labels or [f"e{i}" for i in range(n)]
    lines = [f"base ring:  {B.base}", f"generators: {n}", f"order:      {format_poly(order(B.module))}"]
    if n == 0:
        lines.append("gram: (empty; trivial module)")
        return lines
    lines.append("gram (row i, column j holds Bl(e_i, e_j)):")
    rows = [[""] + labels] + [[labels[i]] + [str(x) for x in B.gram[i]] for i in range(n)]
    lines.extend(_table(rows))
    lines.append(REPRESENTATIVE_NOTE)
    return lines


def _emit(lines: list[str]) -> None:
    sys.stdout.write("\n".join(lines) + "\n")


def _save(B: LinkingPairing, path: str | None) -> None:
    if path:
        Path(path).write_text(dump_pairing(B) + "\n")


# -- subcommands -------------------------------------------------------------------


def cmd_alex(args) -> int:
    knot = load_knot(args.knotfile)
    rows = [["route", "Alexander polynomial"]]
    values = []
    if knot.seifert is not None:
        d = alexander_poly_seifert(knot.seifert)
        values.append(d)
        rows.append(["seifert", format_poly(d)])
    if knot.pd is not None:
        d = order(alexander_module(knot.wirtinger()))
        values.append(d)
        rows.append(["fox", format_poly(d)])
    _emit([f"knot: {knot.name}"] + _table(rows))
    if len(values) == 2 and values[0] != values[1]:
        _emit(["routes disagree"])
        return 1
    return 0


def cmd_bl(args) -> int:
    knot = load_knot(args.knotfile)
    B = _knot_pairing(knot, args.coeff)
    _emit([f"knot: {knot.name}"] + _pairing_lines(B))
    _save(B, args.save)
    return 0


def cmd_infect(args) -> int:
    host = _load_host(args.host, args.coeff)
    knot = load_knot(args.knot)
    BJ = _knot_pairing(knot, args.coeff)
    result = infect(host, BJ, WindingMorphism(args.winding, args.coeff))
    ny = host.ngens
    labels = [f"y{i}" for i in range(ny)] + [f"j{i}" for i in range(result.pairing.ngens - ny)]
    _emit([f"host: {args.host}", f"knot: {knot.name}", f"winding: {args.winding}",
           f"host generators y0..y{ny - 1}, then tensored knot generators j*" if ny else
           "host is trivial; all generators come from the tensored knot"]
          + _pairing_lines(result.pairing, labels))
    _save(result.pairing, args.save)
    return 0


def cmd_tensor(args) -> int:
    knot = load_knot(args.knot)
    B = _knot_pairing(knot, args.coeff)
    T = tensor_pairing(WindingMorphism(args.winding, args.coeff), B)
    _emit([f"knot: {knot.name}", f"winding: {args.winding}"] + _pairing_lines(T))
    _save(T, args.save)
    return 0


def cmd_verify(args) -> int:
    directory = Path(args.suite) if args.suite else _fixtures_dir()
    corpus = Corpus.load(directory)
    criteria = sorted(CRITERIA) if not args.criteria else args.criteria
    reports = []
    for n in criteria:
        reports.extend(run_criterion(n, corpus))
    failed = [r for r in reports if not r.passed]
    if args.json:
        sys.stdout.write(json.dumps([r.to_json() for r in reports], indent=1) + "\n")
    else:
        shown = reports if args.verbose else failed
        rows = [["criterion", "claim", "case", "verdict", "witness"]]
        rows += [[str(r.criterion), r.claim, r.case, r.verdict, r.witness] for r in shown]
        summary = [["criterion", "claim", "cases", "failed"]]
        for n in criteria:
            rs = [r for r in reports if r.criterion == n]
            summary.append([str(n), rs[0].claim if rs else "-", str(len(rs)),
                            str(sum(not r.passed for r in rs))])
        lines = _table(summary, indent="")
        if len(rows) > 1:
            lines += [""] + _table(rows, indent="")
        lines.append(f"{len(reports) - len(failed)}/{len(reports)} checks passed")
        _emit(lines)
    return 1 if failed else 0


# -- argument parsing ----------------------------------------------------------------


def _coeff(text: str) -> BaseRing:
    try:
        base = BaseRing.parse(text)
    except RingError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None
    if not base.is_field:
        raise argparse.ArgumentTypeError("pairings need field coefficients: use q or fp:<p>")
    return base


def _criteria(text: str) -> list[int]:
    try:
        out = sorted({int(x) for x in text.split(",") if x.strip()})
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated criterion numbers, got {text!r}") from None
    bad = [n for n in out if n not in CRITERIA]
    if bad:
        raise argparse.ArgumentTypeError(f"unknown criteria {bad}; choose from 1-{max(CRITERIA)}")
    return out


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="linkform", description="Alexander invariants and Blanchfield linking forms.")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("alex", help="Alexander polynomial by the Seifert and Fox routes")
    p.add_argument("knotfile")
    p.set_defaults(func=cmd_alex)

    p = sub.add_parser("bl", help="Blanchfield pairing of a knot")
    p.add_argument("knotfile")
    p.add_argument("--coeff", type=_coeff, default=QQ, help="q (default) or fp:<p>")
    p.add_argument("--save", metavar="FILE", help="write the pairing as JSON")
    p.set_defaults(func=cmd_bl)

    p = sub.add_parser("infect", help="pairing of a host infected by a knot along a curve of winding w")
    p.add_argument("--host", required=True, help="pairing file or knot file")
    p.add_argument("--knot", required=True)
    p.add_argument("--winding", type=int, required=True)
    p.add_argument("--coeff", type=_coeff, default=QQ, help="q (default) or fp:<p>")
    p.add_argument("--save", metavar="FILE", help="write the pairing as JSON")
    p.set_defaults(func=cmd_infect)

    p = sub.add_parser("tensor", help="knot pairing tensored along t -> t^w")
    p.add_argument("--knot", required=True)
    p.add_argument("--winding", type=int, required=True)
    p.add_argument("--coeff", type=_coeff, default=QQ, help="q (default) or fp:<p>")
    p.add_argument("--save", metavar="FILE", help="write the pairing as JSON")
    p.set_defaults(func=cmd_tensor)

    p = sub.add_parser("verify", help="run the verification suite on a fixture directory")
    p.add_argument("--suite", metavar="DIR", help="fixture directory (default: $LF_FIXTURES or the bundled corpus)")
    p.add_argument("--json", action="store_true", help="one JSON object per report")
    p.add_argument("--criteria", type=_criteria, help="comma-separated subset, e.g. 1,5,6")
    p.add_argument("-v", "--verbose", action="store_true", help="list passing reports too")
    p.set_defaults(func=cmd_verify)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except RingError as exc:
        # includes the winding-number-0 (eta-regularity) rejection
        print(f"linkform: error: {exc}", file=sys.stderr)
        return 2
    except (InputError, KnotFileError, KnotError, LinkingError, ModuleError, MatrixError) as exc:
        print(f"linkform: error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())

"""Command-line entry point: ``qcorr measure | sweep | verify``."""
from __future__ import annotations

import argparse
import json
import math
import sys
from pathlib import Path

import numpy as np

from . import closed_form as cf
from .errors import AmbiguousInput, NotBellDiagonal, ParseError, QCorrError
from .harness import QUANTITIES, SUITES, SweepSpec, run_suite, run_sweep
from .optimize import OptimizerConfig
from .states import (
    BellDiagonalState,
    DensityMatrix,
    PureSchmidtState,
    bell_diagonal_of,
)
from .variational import (
    measure_report_general,
    nonlocality_bound_bd,
    steering_bound_bd,
)

STATE_KEYS = ("bell_diagonal", "matrix", "pure_alpha")


def _real(x, what):
    if isinstance(x, bool) or not isinstance(x, (int, float)) or not math.isfinite(x):
        raise ParseError(f"{what} must be a finite number, got {x!r}")
    return float(x)


def parse_state_input(document):
    """Parse a state document (JSON text or an already-decoded mapping).

    Exactly one of ``bell_diagonal: [c1, c2, c3]``,
    ``matrix: {"re": 4x4, "im": 4x4}`` or ``pure_alpha: a`` must be present.
    """
    if isinstance(document, (str, bytes)):
        try:
            document = json.loads(document)
        except json.JSONDecodeError as exc:
            raise ParseError(f"not valid JSON: {exc}") from None
    if not isinstance(document, dict):
        raise ParseError("state document must be an object")
    keys = [k for k in STATE_KEYS if k in document]
    if len(keys) > 1:
        raise AmbiguousInput(f"state document has several state keys: {keys}")
    if not keys:
        raise ParseError(f"state document needs one of {STATE_KEYS}")
    key = keys[0]
    value = document[key]
    if key == "bell_diagonal":
        if not isinstance(value, list) or len(value) != 3:
            raise ParseError("bell_diagonal must be a list of three numbers")
        return BellDiagonalState(tuple(_real(v, "c_j") for v in value))
    if key == "pure_alpha":
        return PureSchmidtState(_real(value, "pure_alpha"))
    if not isinstance(value, dict) or "re" not in value:
        raise ParseError('matrix must be an object with "re" (and optionally "im") 4x4 arrays')
    try:
        re = np.array(value["re"], dtype=float)
        im = np.array(value.get("im", np.zeros((4, 4))), dtype=float)
    except (TypeError, ValueError) as exc:
        raise ParseError(f"matrix entries must be numbers: {exc}") from None
    if re.shape != (4, 4) or im.shape != (4, 4):
        raise ParseError("matrix re/im must both be 4x4")
    return DensityMatrix(re + 1j * im)


def _parse_triple(text: str) -> BellDiagonalState:
    try:
        parts = [float(t) for t in text.split(",")]
    except ValueError:
        raise ParseError(f"--bell-diag expects c1,c2,c3, got {text!r}") from None
    if len(parts) != 3:
        raise ParseError(f"--bell-diag expects three values, got {text!r}")
    return BellDiagonalState(tuple(parts))


def build_report(state, cfg: OptimizerConfig, bounds: bool):
    """MeasureReport for any supported input, plus a label for the path taken."""
    if isinstance(state, DensityMatrix):
        try:
            state = bell_diagonal_of(state)
        except NotBellDiagonal:
            if bounds:
                raise NotBellDiagonal(
                    "steering/nonlocality bounds are only available for Bell-diagonal states"
                ) from None
            return measure_report_general(state, cfg), "general (variational)"
    if isinstance(state, PureSchmidtState):
        report = cf.pure_state_measures(state)
        if bounds and report.steering_bound is None:
            try:
                bd = bell_diagonal_of(state.density_matrix())
            except NotBellDiagonal:
                raise NotBellDiagonal(
                    "steering/nonlocality bounds are only available for Bell-diagonal states"
                ) from None
            report.steering_bound = steering_bound_bd(bd, cfg)
            report.nonlocality_bound = nonlocality_bound_bd(bd, cfg)
        return report, "pure Schmidt (closed form)"
    return cf.measure_report(state, cfg if bounds else None), "Bell-diagonal (closed form)"


def render_report(report: cf.MeasureReport, label: str) -> str:
    def fmt(v):
        if v is None:
            return "n/a"
        if isinstance(v, bool):
            return "yes" if v else "no"
        return f"{v:.10f}"

    rows = [
        ("discord D", report.discord),
        ("entanglement E", report.entanglement),
        ("coherence Coh", report.coherence),
        ("steerable (2 proj. meas.)", report.steerable_2pm),
        ("CHSH violating", report.chsh_violating),
        ("CHSH parameter l1+l2", report.chsh_parameter),
        ("steering bound", report.steering_bound),
        ("nonlocality bound", report.nonlocality_bound),
    ]
    width = max(len(r[0]) for r in rows)
    lines = [f"state: {label}"]
    lines += [f"{name.ljust(width)}  {fmt(v)}" for name, v in rows]
    for name, ok in report.hierarchy_checks().items():
        lines.append(f"check {name}: {'pass' if ok else 'FAIL'}")
    data = report.to_dict()
    data["scenario"] = "two projective measurements per side"
    lines.append("---")
    lines.append(json.dumps(data, sort_keys=True))
    return "\n".join(lines)


def cmd_measure(args) -> int:
    if args.state is not None:
        try:
            text = Path(args.state).read_text(encoding="utf-8")
        except OSError as exc:
            raise ParseError(f"cannot read {args.state}: {exc}") from None
        state = parse_state_input(text)
    elif args.bell_diag is not None:
        state = _parse_triple(args.bell_diag)
    else:
        state = PureSchmidtState(args.pure_alpha)
    cfg = OptimizerConfig(seed=args.seed, restarts=args.restarts)
    report, label = build_report(state, cfg, args.bounds)
    print(render_report(report, label))
    return 0


def cmd_sweep(args) -> int:
    spec = SweepSpec(args.quantity, args.c3, args.grid, args.out)
    try:
        run_sweep(spec)
    except OSError as exc:
        print(f"error: cannot write {args.out}: {exc}", file=sys.stderr)
        return 2
    print(f"wrote {args.grid * args.grid} rows to {args.out}")
    return 0


def cmd_verify(args) -> int:
    res = run_suite(args.suite, args.samples, args.seed)
    print(res.summary())
    return 0 if res.passed else 1


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="qcorr", description=__doc__)
    sub = ap.add_subparsers(dest="command", required=True)

    m = sub.add_parser("measure", help="quantifiers and criteria for one state")
    src = m.add_mutually_exclusive_group(required=True)
    src.add_argument("--state", help="JSON file with bell_diagonal, matrix or pure_alpha")
    src.add_argument("--bell-diag", metavar="C1,C2,C3")
    src.add_argument("--pure-alpha", type=float, metavar="A")
    m.add_argument("--bounds", action="store_true", help="also compute steering/nonlocality bounds")
    m.add_argument("--seed", type=int, default=0)
    m.add_argument("--restarts", type=int, default=32)
    m.set_defaults(func=cmd_measure)

    s = sub.add_parser("sweep", help="write a (c1, c2) grid of one quantity as CSV")
    s.add_argument("--quantity", required=True, choices=sorted(QUANTITIES))
    s.add_argument("--c3", type=float, required=True)
    s.add_argument("--grid", type=int, required=True, help="points per axis")
    s.add_argument("--out", required=True)
    s.set_defaults(func=cmd_sweep)

    v = sub.add_parser("verify", help="run a property suite")
    v.add_argument("--suite", required=True, help=f"one of {', '.join(sorted(SUITES))}")
    v.add_argument("--samples", type=int, required=True)
    v.add_argument("--seed", type=int, required=True)
    v.set_defaults(func=cmd_verify)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (QCorrError, ValueError) as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    raise SystemExit(main())

"""Command-line front end.

Every subcommand writes JSON (``threshold`` writes CSV) to standard output or
to ``--out``. Exit codes: 0 success, 1 bad input, 2 internal invariant
violation.
"""
from __future__ import annotations

import argparse
import io
import json
import math
import sys
from typing import Any, Sequence

import numpy as np

from . import gates, qecc, teleport
from .fock import FockState
from .optics import PhotonNumberViolation, circuit_from_json, element_to_json, run_circuit
from .reck import compile_to_elements, decompose, reconstruct, unitary_from_json

SIG_DIGITS = 12
ZERO_FLOOR = 1e-15  # rounding noise below this prints as 0
RENORM_TOL = 1e-2


class UsageError(Exception):
    """Bad user input; maps to exit code 1."""


# ---------------------------------------------------------------- formatting


def fmt_float(x: float) -> float:
    """Round to 12 significant digits; noise below ZERO_FLOOR and -0.0 become 0.0."""
    x = float(x)
    if abs(x) < ZERO_FLOOR:
        return 0.0
    return float(f"{x:.{SIG_DIGITS}g}")


def _clean(obj: Any) -> Any:
    if isinstance(obj, bool) or obj is None or isinstance(obj, str):
        return obj
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        return fmt_float(obj)
    if isinstance(obj, (complex, np.complexfloating)):
        return {"re": fmt_float(obj.real), "im": fmt_float(obj.imag)}
    if isinstance(obj, dict):
        return {str(k): _clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_clean(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return _clean(obj.tolist())
    if isinstance(obj, FockState):
        return _clean(obj.to_json())
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def dumps(obj: Any) -> str:
    return json.dumps(_clean(obj), sort_keys=True, indent=2) + "\n"


def parse_complex(text: str) -> complex:
    """Accepts '0.6', '-0.3i', '0.5+0.5i', '1e-3-2i' (or with j)."""
    s = text.strip().replace(" ", "").replace("I", "i").replace("i", "j")
    if s in ("j", "+j", "-j"):
        s = s.replace("j", "1j")
    try:
        return complex(s)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a complex number: {text!r}") from None


def _normalize(*amps: complex) -> tuple[list[complex], bool]:
    n = math.sqrt(sum(abs(a) ** 2 for a in amps))
    if n == 0:
        raise UsageError("amplitudes are all zero")
    if abs(n * n - 1) > RENORM_TOL:
        raise UsageError(f"amplitudes are far from normalized (norm^2 = {n * n:.6g})")
    return [a / n for a in amps], abs(n * n - 1) > 1e-12


def _read_json(path: str) -> Any:
    try:
        with open(path) as fh:
            return json.load(fh)
    except OSError as exc:
        raise UsageError(f"cannot read {path}: {exc.strerror}") from None
    except json.JSONDecodeError as exc:
        raise UsageError(f"malformed JSON in {path}: {exc}") from None


def _amps_json(amps: Sequence[complex]) -> list[complex]:
    return [complex(a) for a in amps]


# ----------------------------------------------------------------- commands


def cmd_run(args) -> str:
    obj = _read_json(args.circuit)
    circuit = circuit_from_json(obj)
    if args.state:
        state = FockState.from_json(_read_json(args.state))
    elif "input" in obj:
        state = FockState.from_json(obj["input"])
    else:
        raise UsageError("no input state: pass --state or add an 'input' entry to the circuit file")
    result = run_circuit(circuit, state)
    out: dict[str, Any] = {"command": "run", "n_modes": circuit.n_modes}
    if isinstance(result, FockState):
        out["state"] = result
    elif isinstance(result, list):
        out["outcomes"] = [o.to_json() for o in result]
    else:
        out["outcomes"] = [result.to_json()]
    return dumps(out)


def cmd_decompose(args) -> str:
    u = unitary_from_json(_read_json(args.unitary))
    plan = decompose(u)
    err = float(np.abs(reconstruct(plan) - u).max())
    return dumps({"command": "decompose", "plan": plan.to_json(),
                  "elements": [element_to_json(e) for e in compile_to_elements(plan)],
                  "reconstruction_error": err})


def cmd_ns(args) -> str:
    (a, b, g), renorm = _normalize(args.alpha, args.beta, args.gamma)
    res = gates.ns_gate(a, b, g, use_netlist=args.netlist)
    out = {"command": "ns", "input": _amps_json((a, b, g)), "renormalized": renorm,
           "output": [res.output.get((n,), 0j) for n in range(3)], **res.to_json()}
    return dumps(out)


def cmd_csign(args) -> str:
    q1, r1 = _normalize(*args.q1)
    q2, r2 = _normalize(*args.q2)
    if args.variant == "klm":
        res = gates.csign_klm(q1, q2)
    elif args.variant == "2_27":
        res = gates.csign_knill_2_27(q1, q2, angles=args.angles)
    else:
        res = teleport.teleported_csign(q1, q2)
    target = gates.csign_target(q1, q2)
    out = {"command": "csign", "variant": args.variant, "q1": _amps_json(q1), "q2": _amps_json(q2),
           "renormalized": r1 or r2, "fidelity": gates.csign_fidelity(res, q1, q2),
           "target": target, **res.to_json()}
    if args.variant == "2_27":
        out["angles"] = args.angles
    return dumps(out)


def cmd_teleport(args) -> str:
    (a, b), renorm = _normalize(args.alpha, args.beta)
    outcomes = teleport.teleport_rail(a, b, args.n)
    p = sum(o.probability for o in outcomes if o.success)
    return dumps({"command": "teleport", "n": args.n, "input": _amps_json((a, b)),
                  "renormalized": renorm, "success_probability": p,
                  "outcomes": [o.to_json() for o in outcomes]})


def _f_values(args) -> list[float]:
    if args.f is not None:
        vals = [args.f]
    else:
        lo, hi, step = args.f_range
        if step <= 0 or hi < lo:
            raise UsageError("--f-range needs START <= STOP and STEP > 0")
        count = int(math.floor((hi - lo) / step + 1e-9)) + 1
        vals = [lo + i * step for i in range(count)]
    for f in vals:
        if not 0.0 <= f <= 1.0:
            raise UsageError(f"f must lie in [0, 1], got {f}")
    return vals


def cmd_threshold(args) -> str:
    if args.trials < 1:
        raise UsageError("--trials must be at least 1")
    buf = io.StringIO()
    buf.write("f,F_z_analytic,F_z_mc,stderr\n")
    for f in _f_values(args):
        mc = qecc.monte_carlo_failure(f, args.trials, args.seed)
        row = [fmt_float(f), fmt_float(qecc.f_z(f)), fmt_float(mc["F_z_hat"]), fmt_float(mc["stderr_z"])]
        buf.write(",".join(repr(x) for x in row) + "\n")
    return buf.getvalue()


def cmd_erasure(args) -> str:
    code = qecc.steane_code()
    ks = [args.k] if args.k is not None else list(range(code.n + 1))
    rows = []
    for k in ks:
        if not 0 <= k <= code.n:
            raise UsageError(f"k must lie in 0..{code.n}")
        c, t = qecc.count_correctable(code, k)
        if (c, t) != qecc.count_correctable(code, k, method="dense"):
            raise AssertionError("correctability tests disagree")
        rows.append({"k": k, "correctable": c, "total": t})
    out: dict[str, Any] = {"command": "erasure", "code": "steane"}
    if args.k is not None:
        out.update(rows[0])
    else:
        out["counts"] = rows
    return dumps(out)


def cmd_recover_demo(args) -> str:
    limit = 2 if args.code == "z" else 7
    if not 0 <= args.qubit < limit:
        raise UsageError(f"qubit must lie in 0..{limit - 1} for the {args.code} code")
    (a, b), renorm = _normalize(args.alpha, args.beta)
    branches = []
    if args.code == "z":
        enc = qecc.encode_z_code(a, b)
        for zo in (1, -1):
            m = qecc.z_measure(enc, args.qubit, zo)
            if m.state is None:
                continue
            for xo in (1, -1):
                for method in ("xx", "rotation"):
                    r = qecc.recover_z_measurement(m.state, args.qubit, xo, method)
                    branches.append({"z_outcome": zo, "check_outcome": xo, "method": method,
                                     "probability": m.probability * r.probability,
                                     "fidelity": qecc.state_fidelity(enc, r.state)})
    else:
        code = qecc.steane_code()
        z0, z1 = qecc.code_space(code)
        enc = a * z0 + b * z1
        for zo in (1, -1):
            m = qecc.z_measure(enc, args.qubit, zo)
            if m.state is None:
                continue
            for go in (1, -1):
                r = qecc.steane_z_erasure_recovery(m.state, args.qubit, go, code)
                if r.state is None:
                    continue
                branches.append({"z_outcome": zo, "check_outcome": go, "generator": r.generator.letters,
                                 "probability": m.probability * r.probability,
                                 "fidelity": qecc.state_fidelity(enc, r.state)})
    return dumps({"command": "recover-demo", "code": args.code, "qubit": args.qubit,
                  "input": _amps_json((a, b)), "renormalized": renorm, "branches": branches,
                  "min_fidelity": min(br["fidelity"] for br in branches)})


# ------------------------------------------------------------------- parser


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="loqc", description="Linear-optics QC simulator experiments.")
    p.add_argument("--out", help="write output here instead of stdout")
    sub = p.add_subparsers(dest="command", required=True)

    r = sub.add_parser("run", help="run a circuit file on an input state")
    r.add_argument("circuit")
    r.add_argument("--state", help="input state JSON (default: the circuit's 'input' entry)")
    r.set_defaults(func=cmd_run)

    d = sub.add_parser("decompose", help="triangular beam-splitter decomposition of a unitary")
    d.add_argument("unitary")
    d.set_defaults(func=cmd_decompose)

    n = sub.add_parser("ns", help="nonlinear sign gate on a0|0> + a1|1> + a2|2>")
    n.add_argument("--alpha", type=parse_complex, required=True)
    n.add_argument("--beta", type=parse_complex, required=True)
    n.add_argument("--gamma", type=parse_complex, required=True)
    n.add_argument("--netlist", action="store_true", help="use the four-element netlist")
    n.set_defaults(func=cmd_ns)

    c = sub.add_parser("csign", help="post-selected controlled-sign gates")
    c.add_argument("variant", choices=["klm", "2_27", "teleported"])
    c.add_argument("--q1", type=parse_complex, nargs=2, metavar=("A0", "A1"),
                   default=[1 / math.sqrt(2), 1 / math.sqrt(2)])
    c.add_argument("--q2", type=parse_complex, nargs=2, metavar=("A0", "A1"),
                   default=[1 / math.sqrt(2), 1 / math.sqrt(2)])
    c.add_argument("--angles", choices=["rounded", "refined", "exact"], default="rounded")
    c.set_defaults(func=cmd_csign)

    t = sub.add_parser("teleport", help="teleportation through the |t_n> resource")
    t.add_argument("--n", type=int, choices=[1, 2, 3], required=True)
    t.add_argument("--alpha", type=parse_complex, default=1 / math.sqrt(2))
    t.add_argument("--beta", type=parse_complex, default=1 / math.sqrt(2))
    t.set_defaults(func=cmd_teleport)

    th = sub.add_parser("threshold", help="recursion curve with Monte Carlo check (CSV)")
    g = th.add_mutually_exclusive_group(required=True)
    g.add_argument("--f", type=float)
    g.add_argument("--f-range", type=float, nargs=3, metavar=("START", "STOP", "STEP"))
    th.add_argument("--trials", type=int, default=100000)
    th.add_argument("--seed", type=int, default=0)
    th.set_defaults(func=cmd_threshold)

    e = sub.add_parser("erasure", help="Steane-code erasure correctability counts")
    e.add_argument("--k", type=int)
    e.set_defaults(func=cmd_erasure)

    rd = sub.add_parser("recover-demo", help="Z-measurement error recovery on every branch")
    rd.add_argument("--code", choices=["z", "steane"], default="z")
    rd.add_argument("--qubit", type=int, default=0)
    rd.add_argument("--alpha", type=parse_complex, default=0.6)
    rd.add_argument("--beta", type=parse_complex, default=0.8j)
    rd.set_defaults(func=cmd_recover_demo)
    return p


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        # argparse uses 2 for usage errors; this tool reserves 2 for internal faults
        return 0 if exc.code == 0 else 1
    try:
        text = args.func(args)
    except (UsageError, ValueError, IndexError, KeyError) as exc:
        print(f"loqc: error: {exc}", file=sys.stderr)
        return 1
    except (PhotonNumberViolation, AssertionError) as exc:
        print(f"loqc: internal error: {exc}", file=sys.stderr)
        return 2
    if args.out:
        try:
            with open(args.out, "w") as fh:
                fh.write(text)
        except OSError as exc:
            print(f"loqc: error: cannot write {args.out}: {exc.strerror}", file=sys.stderr)
            return 1
    else:
        sys.stdout.write(text)
    return 0


if __name__ == "__main__":
    sys.exit(main())

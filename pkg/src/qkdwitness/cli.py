"""Command-line front end and file formats.

Subcommands: ``simulate`` (exact outcome tables for a channel or
attack), ``detect`` (entanglement verdict from a distribution file),
``tomo`` (state reconstruction from six-state data), ``scan``
(rotation-angle sweep to CSV, with an optional figure), ``info``
(information-theoretic report on three-party tables).

Exit codes: 0 success/detected, 3 not detected, 2 invalid input,
4 numeric failure.  All data payloads are deterministic for a fixed
configuration; no timestamps are ever written into them.
"""

from __future__ import annotations

import argparse
import csv
import json
import sys
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .channels import apply_to_bob, depolarizing_channel, identity_channel, intercept_resend, rotation_channel
from .errors import NumericError, UsageError, ValidationError
from .information import (
    TripartiteTable,
    conditional_mutual_information,
    intrinsic_info_upper_bound,
    make_tripartite_table,
    mutual_information,
    separable_extension,
)
from .measurements import (
    FOUR_STATE,
    SIX_STATE,
    JointDistribution,
    distribution_from_probs,
    joint_distribution,
    observed_pauli_table,
    protocol_by_name,
    qber,
    tomographic_state,
)
from .qlinalg import PAULI_LABELS
from .states import bell_state, is_ppt
from .witnesses import DetectionResult, Witness, detect_4state, detect_6state, grid_search_family, pseudo_mixture

EXIT_DETECTED = 0
EXIT_INPUT_ERROR = 2
EXIT_NOT_DETECTED = 3
EXIT_NUMERIC_ERROR = 4

SUM_TOLERANCE = 1e-9


@dataclass
class RunConfig:
    """Parsed invocation: one command plus its knobs."""

    command: str
    protocol: str = "four-state"
    channel: str | None = None
    attack: str | None = None
    inputs: list[str] = field(default_factory=list)
    output: str | None = None
    tripartite_output: str | None = None
    tol: float = 1e-9
    resolution: int | None = None
    emit_pseudo_mixture: bool = False
    theta_start: float = 0.0
    theta_stop: float = np.pi / 2
    points: int = 91
    plot: bool = True
    plot_output: str | None = None


# ---------------------------------------------------------------------------
# spec-string and file-format helpers
# ---------------------------------------------------------------------------

def parse_angle(text: str) -> float:
    """Angle in radians; a ':deg' suffix converts from degrees."""
    raw = text.strip()
    if raw.endswith(":deg"):
        return float(raw[: -len(":deg")]) * np.pi / 180.0
    return float(raw)


def parse_channel_spec(spec: str):
    parts = spec.split(":", 1)
    kind = parts[0]
    arg = parts[1] if len(parts) > 1 else None
    try:
        if kind == "identity":
            if arg is not None:
                raise UsageError("identity channel takes no parameter")
            return identity_channel()
        if kind == "rotation":
            if arg is None:
                raise UsageError("rotation channel needs an angle, e.g. rotation:0.5")
            return rotation_channel(parse_angle(arg))
        if kind == "depolarizing":
            if arg is None:
                raise UsageError("depolarizing channel needs a probability")
            return depolarizing_channel(float(arg))
    except ValueError as exc:
        raise UsageError(f"bad channel parameter in {spec!r}: {exc}") from None
    raise UsageError(f"unknown channel kind {kind!r}")


def parse_attack_spec(spec: str):
    parts = spec.split(":", 1)
    if parts[0] != "intercept-resend" or len(parts) != 2 or not parts[1]:
        raise UsageError("attack spec must look like intercept-resend:xz")
    return tuple(parts[1])


def distribution_to_json(dist: JointDistribution, meta: dict | None = None) -> dict:
    probs = {
        f"{i},{a:+d},{j},{b:+d}": value for (i, a, j, b), value in dist.probs.items()
    }
    doc = {
        "protocol": dist.protocol.name,
        "basis_probs": "uniform",
        "probs": probs,
        "qber": qber(dist),
    }
    if meta:
        doc.update(meta)
    return doc


def distribution_from_json(doc: dict) -> JointDistribution:
    if not isinstance(doc, dict):
        raise ValidationError("distribution file must hold a JSON object")
    for key in ("protocol", "basis_probs", "probs"):
        if key not in doc:
            raise ValidationError(f"distribution file is missing the {key!r} field")
    if doc["basis_probs"] != "uniform":
        raise ValidationError("only uniform basis_probs are supported")
    protocol = protocol_by_name(doc["protocol"])
    probs = {}
    for key, value in doc["probs"].items():
        fields = key.split(",")
        if len(fields) != 4 or fields[1] not in ("+1", "-1") or fields[3] not in ("+1", "-1"):
            raise ValidationError(f"bad outcome key {key!r}")
        probs[(fields[0], int(fields[1]), fields[2], int(fields[3]))] = float(value)
    return distribution_from_probs(protocol, probs, tol=SUM_TOLERANCE)


def _label_to_str(label) -> str:
    if isinstance(label, tuple) and len(label) == 2:
        return f"{label[0]}:{label[1]:+d}"
    return str(label)


def tripartite_to_json(table: TripartiteTable) -> dict:
    la = [_label_to_str(x) for x in table.alphabet_a]
    lb = [_label_to_str(x) for x in table.alphabet_b]
    le = [_label_to_str(x) for x in table.alphabet_e]
    probs = {}
    for ia, a in enumerate(la):
        for jb, b in enumerate(lb):
            for ke, e in enumerate(le):
                value = float(table.probs[ia, jb, ke])
                if value != 0.0:
                    probs[f"{a}|{b}|{e}"] = value
    return {"alphabet_a": la, "alphabet_b": lb, "alphabet_e": le, "probs": probs}


def tripartite_from_json(doc: dict) -> TripartiteTable:
    if not isinstance(doc, dict):
        raise ValidationError("tripartite file must hold a JSON object")
    for key in ("alphabet_a", "alphabet_b", "alphabet_e", "probs"):
        if key not in doc:
            raise ValidationError(f"tripartite file is missing the {key!r} field")
    la, lb, le = (tuple(doc[k]) for k in ("alphabet_a", "alphabet_b", "alphabet_e"))
    index_a = {x: i for i, x in enumerate(la)}
    index_b = {x: i for i, x in enumerate(lb)}
    index_e = {x: i for i, x in enumerate(le)}
    probs = np.zeros((len(la), len(lb), len(le)))
    for key, value in doc["probs"].items():
        fields = key.split("|")
        if len(fields) != 3:
            raise ValidationError(f"bad tripartite key {key!r}")
        try:
            probs[index_a[fields[0]], index_b[fields[1]], index_e[fields[2]]] = float(value)
        except KeyError as missing:
            raise ValidationError(f"key {key!r} uses unknown label {missing.args[0]!r}")
    return make_tripartite_table(la, lb, le, probs, tol=SUM_TOLERANCE)


def witness_to_json(witness: Witness) -> dict:
    coeffs = {
        f"{i},{j}": float(witness.coefficients[a, b])
        for a, i in enumerate(PAULI_LABELS)
        for b, j in enumerate(PAULI_LABELS)
    }
    doc = {"class": witness.class_tag, "coefficients": coeffs}
    if witness.generator is not None:
        doc["generator"] = {
            "re": [float(x) for x in witness.generator.real],
            "im": [float(x) for x in witness.generator.imag],
        }
    return doc


def _dump(doc: dict, output: str | None) -> None:
    text = json.dumps(doc, indent=2, sort_keys=True) + "\n"
    if output:
        Path(output).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)


def _load_json(path: str) -> dict:
    try:
        return json.loads(Path(path).read_text(encoding="utf-8"))
    except FileNotFoundError:
        raise ValidationError(f"no such file: {path}")
    except json.JSONDecodeError as exc:
        raise ValidationError(f"{path} is not valid JSON: {exc}")


# ---------------------------------------------------------------------------
# subcommands
# ---------------------------------------------------------------------------

def cmd_simulate(config: RunConfig) -> int:
    protocol = protocol_by_name(config.protocol)
    source = bell_state("phi+")
    meta: dict = {}
    tripartite: TripartiteTable | None = None
    if config.attack:
        bases = parse_attack_spec(config.attack)
        record = intercept_resend(bases, source)
        state = record.post_state
        meta["attack"] = config.attack
        tripartite = separable_extension(record.mixture, protocol)
    else:
        channel = parse_channel_spec(config.channel or "identity")
        state = apply_to_bob(channel, source)
        meta["channel"] = config.channel or "identity"
    dist = joint_distribution(state, protocol)
    _dump(distribution_to_json(dist, meta), config.output)
    if config.tripartite_output:
        if tripartite is None:
            raise UsageError("--tripartite-output needs an --attack simulation")
        _dump(tripartite_to_json(tripartite), config.tripartite_output)
    return 0


def detection_report(dist: JointDistribution, result: DetectionResult, config: RunConfig) -> dict:
    doc = {
        "protocol": dist.protocol.name,
        "verdict": "detected" if result.detected else "not-detected",
        "value": result.value,
        "margin": result.margin,
        "tolerance": config.tol,
        "qber": qber(dist),
        "witness": witness_to_json(result.witness) if result.witness else None,
    }
    if config.emit_pseudo_mixture and result.witness is not None:
        terms = pseudo_mixture(result.witness)
        doc["pseudo_mixture"] = [
            {"coefficient": coeff, "projector_a": f"{ba}:{a:+d}", "projector_b": f"{bb}:{b:+d}"}
            for coeff, (ba, a), (bb, b) in terms.terms
        ]
    return doc


def cmd_detect(config: RunConfig) -> int:
    dist = distribution_from_json(_load_json(config.inputs[0]))
    if dist.protocol.name == "four-state":
        result = detect_4state(dist, tol=config.tol)
    else:
        result = detect_6state(dist, tol=config.tol)
    doc = detection_report(dist, result, config)
    if config.resolution is not None and dist.protocol.name == "four-state":
        cross = grid_search_family(dist, resolution=config.resolution, tol=config.tol)
        doc["grid_cross_check"] = {
            "resolution": config.resolution,
            "verdict": "detected" if cross.detected else "not-detected",
            "value": cross.value,
        }
    _dump(doc, config.output)
    return EXIT_DETECTED if result.detected else EXIT_NOT_DETECTED


def cmd_tomo(config: RunConfig) -> int:
    dist = distribution_from_json(_load_json(config.inputs[0]))
    state = tomographic_state(dist, tol=max(config.tol, 1e-9))
    observed = observed_pauli_table(dist)
    ppt = is_ppt(state, tol=config.tol)
    doc = {
        "protocol": dist.protocol.name,
        "rho": {
            "re": [[float(v) for v in row] for row in state.rho.real],
            "im": [[float(v) for v in row] for row in state.rho.imag],
        },
        "pauli": {f"{i},{j}": float(observed[(i, j)]) for (i, j) in sorted(observed)},
        "ppt": ppt.ppt,
        "min_pt_eigenvalue": ppt.min_eigenvalue,
        "qber": qber(dist),
    }
    _dump(doc, config.output)
    return 0


SCAN_COLUMNS = (
    "theta",
    "qber_4state",
    "qber_6state",
    "witness_value_4state",
    "detected_4state",
    "min_pt_eigenvalue_6state",
    "detected_6state",
)


def rotation_sweep(thetas, tol: float = 1e-9) -> list[dict]:
    """One scan row per angle; this is the library-level core of ``scan``."""
    source = bell_state("phi+")
    rows = []
    for theta in thetas:
        state = apply_to_bob(rotation_channel(float(theta)), source)
        dist4 = joint_distribution(state, FOUR_STATE)
        dist6 = joint_distribution(state, SIX_STATE)
        r4 = detect_4state(dist4, tol=tol)
        r6 = detect_6state(dist6, tol=tol)
        rows.append(
            {
                "theta": float(theta),
                "qber_4state": qber(dist4),
                "qber_6state": qber(dist6),
                "witness_value_4state": r4.value,
                "detected_4state": r4.detected,
                "min_pt_eigenvalue_6state": r6.value,
                "detected_6state": r6.detected,
            }
        )
    return rows


def write_scan_csv(rows, path) -> None:
    def cell(value):
        if isinstance(value, bool):
            return "true" if value else "false"
        return repr(float(value))

    with open(path, "w", encoding="utf-8", newline="") as handle:
        writer = csv.writer(handle, lineterminator="\n")
        writer.writerow(SCAN_COLUMNS)
        for row in rows:
            writer.writerow([cell(row[c]) for c in SCAN_COLUMNS])


def cmd_scan(config: RunConfig) -> int:
    if config.points < 1:
        raise UsageError("scan needs at least one point")
    if not config.output:
        raise UsageError("scan needs --output for the CSV report")
    thetas = np.linspace(config.theta_start, config.theta_stop, config.points)
    rows = rotation_sweep(thetas, tol=config.tol)
    write_scan_csv(rows, config.output)
    if config.plot:
        from . import plots  # deferred: matplotlib import is slow

        figure_path = config.plot_output or str(Path(config.output).with_suffix(".png"))
        plots.save_sweep_figure(rows, figure_path)
    return 0


def cmd_info(config: RunConfig) -> int:
    tables = []
    report = []
    for path in config.inputs:
        table = tripartite_from_json(_load_json(path))
        tables.append(table)
        marginal = table.bipartite_marginal()
        report.append(
            {
                "input": path,
                "mutual_information_bits": mutual_information(marginal),
                "conditional_mutual_information_bits": conditional_mutual_information(table),
            }
        )
    doc = {
        "tables": report,
        "intrinsic_info_upper_bound_bits": intrinsic_info_upper_bound(tables),
    }
    _dump(doc, config.output)
    return 0


# ---------------------------------------------------------------------------
# argument parsing
# ---------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="qkdwitness",
        description="Simulate QKD correlation data and certify entanglement from it.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    sim = sub.add_parser("simulate", help="write the exact joint outcome distribution")
    sim.add_argument("--protocol", choices=["four-state", "six-state"], default="four-state")
    group = sim.add_mutually_exclusive_group()
    group.add_argument("--channel", help="identity | rotation:<angle>[:deg] | depolarizing:<p>")
    group.add_argument("--attack", help="intercept-resend:<bases>, e.g. intercept-resend:xz")
    sim.add_argument("--output", help="distribution JSON path (default: stdout)")
    sim.add_argument("--tripartite-output", help="also write Eve's P(A,B,E) extension (attacks only)")

    det = sub.add_parser("detect", help="entanglement verdict for a distribution file")
    det.add_argument("input", help="distribution JSON")
    det.add_argument("--tol", type=float, default=1e-9)
    det.add_argument("--resolution", type=int, help="also run the grid-search cross-check")
    det.add_argument("--emit-pseudo-mixture", action="store_true")
    det.add_argument("--output", help="report JSON path (default: stdout)")

    tomo = sub.add_parser("tomo", help="reconstruct the state from six-state data")
    tomo.add_argument("input", help="distribution JSON (six-state)")
    tomo.add_argument("--tol", type=float, default=1e-9)
    tomo.add_argument("--output", help="report JSON path (default: stdout)")

    scan = sub.add_parser("scan", help="rotation-angle sweep to CSV (+ figure)")
    scan.add_argument("--theta-start", default="0")
    scan.add_argument("--theta-stop", default=repr(float(np.pi / 2)))
    scan.add_argument("--points", type=int, default=91)
    scan.add_argument("--tol", type=float, default=1e-9)
    scan.add_argument("--output", required=True, help="CSV path")
    scan.add_argument("--no-plot", action="store_true", help="skip the companion figure")
    scan.add_argument("--plot-output", help="figure path (default: CSV path with .png)")

    info = sub.add_parser("info", help="information-theoretic report on P(A,B,E) tables")
    info.add_argument("inputs", nargs="+", help="tripartite JSON files over one shared P(A,B)")
    info.add_argument("--output", help="report JSON path (default: stdout)")

    return parser


def config_from_args(args: argparse.Namespace) -> RunConfig:
    config = RunConfig(command=args.command)
    if args.command == "simulate":
        config.protocol = args.protocol
        config.channel = args.channel
        config.attack = args.attack
        config.output = args.output
        config.tripartite_output = args.tripartite_output
    elif args.command in ("detect", "tomo"):
        config.inputs = [args.input]
        config.tol = args.tol
        config.output = args.output
        if args.command == "detect":
            config.resolution = args.resolution
            config.emit_pseudo_mixture = args.emit_pseudo_mixture
    elif args.command == "scan":
        config.theta_start = parse_angle(args.theta_start)
        config.theta_stop = parse_angle(args.theta_stop)
        config.points = args.points
        config.tol = args.tol
        config.output = args.output
        config.plot = not args.no_plot
        config.plot_output = args.plot_output
    elif args.command == "info":
        config.inputs = list(args.inputs)
        config.output = args.output
    return config


_COMMANDS = {
    "simulate": cmd_simulate,
    "detect": cmd_detect,
    "tomo": cmd_tomo,
    "scan": cmd_scan,
    "info": cmd_info,
}


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        config = config_from_args(args)
        return _COMMANDS[args.command](config)
    except (UsageError, ValidationError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT_ERROR
    except NumericError as exc:
        print(f"numeric error: {exc}", file=sys.stderr)
        return EXIT_NUMERIC_ERROR


if __name__ == "__main__":
    raise SystemExit(main())

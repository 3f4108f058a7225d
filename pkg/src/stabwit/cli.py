"""Command-line front end.

Examples::

    stabwit --family ghz --d 3 --n 4 plimit
    stabwit curves --family ghz,cluster --d 2,3,5,7 --n 3..12
    stabwit lms --generators gens.json --json
    stabwit nonlocal wwbar --json
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
from dataclasses import dataclass, field

import numpy as np

from . import coloring as lms
from . import graphs, nonlocal_witness, oracle, witness
from .pauli import DenseCapExceeded, is_prime
from .stabilizer import GeneratorSet, StabilizerError, validate

MODES = ("build", "plimit", "spectrum", "lms", "verify", "curves", "nonlocal")
NONLOCAL_TARGETS = ("w", "wwbar", "ghzw")
FAMILIES = ("ghz", "cluster", "star", "nd_subspace", "gens_opt", "five_qubit")
WITNESS_KINDS = ("projector", "generator", "colored")
MAX_PRIME = 10**6
WITNESS_FILE_MODES = ("plimit", "spectrum", "verify")


class ConfigError(ValueError):
    def __init__(self, violations: list[str]):
        super().__init__("; ".join(violations))
        self.violations = violations


@dataclass
class JobConfig:
    mode: str
    family: str | None = None
    d: int | None = None
    n: int | None = None
    graph: graphs.Multigraph | None = None
    generators: GeneratorSet | None = None
    witness_data: dict | None = None
    witness_kind: str = "colored"
    target: str | None = None
    families: list[str] = field(default_factory=list)
    ds: list[int] = field(default_factory=list)
    ns: list[int] = field(default_factory=list)
    output: str | None = None
    fmt: str = "text"
    cap: int | None = None
    restarts: int = 20
    seed: int = 0


def _common(parser: argparse.ArgumentParser) -> None:
    s = argparse.SUPPRESS
    parser.add_argument("--family", default=s, help="named family (comma list for curves)")
    parser.add_argument("--d", default=s, help="local dimension (comma list for curves)")
    parser.add_argument("--n", default=s, help="number of qudits (range a..b or list for curves)")
    parser.add_argument("--graph", default=s, help="multigraph JSON file")
    parser.add_argument("--generators", default=s, help="generator JSON file")
    parser.add_argument("--witness", default=s, choices=WITNESS_KINDS, help="witness construction")
    parser.add_argument("--witness-file", dest="witness_file", default=s, help="witness JSON for verify")
    parser.add_argument("--json", action="store_true", default=s, help="machine-readable output")
    parser.add_argument("--csv", action="store_true", default=s, help="CSV output (curves)")
    parser.add_argument("--output", "-o", default=s, help="write output to this path")
    parser.add_argument("--cap", type=int, default=s, help="dense dimension cap")
    parser.add_argument("--restarts", type=int, default=s, help="oracle restarts")
    parser.add_argument("--seed", type=int, default=s, help="oracle random seed (default 0)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="stabwit", description="Stabilizer GME witnesses and their oracle checks")
    _common(parser)
    sub = parser.add_subparsers(dest="mode", required=True)
    for mode in MODES:
        p = sub.add_parser(mode)
        _common(p)
        if mode == "nonlocal":
            p.add_argument("target", choices=NONLOCAL_TARGETS)
    return parser


def _normalize_argv(argv: list[str]) -> list[str]:
    # `witness plimit ...` is accepted as an alias of `plimit ...`
    out = list(argv)
    for i, tok in enumerate(out):
        if tok == "witness" and i + 1 < len(out) and out[i + 1] in MODES:
            del out[i]
            break
    return out


def _int_list(text: str, name: str, errors: list[str]) -> list[int]:
    vals: list[int] = []
    for part in str(text).split(","):
        part = part.strip()
        try:
            if ".." in part:
                lo, hi = part.split("..")
                vals.extend(range(int(lo), int(hi) + 1))
            elif part:
                vals.append(int(part))
        except ValueError:
            errors.append(f"{name}: cannot parse {part!r} as an integer or range")
    return vals


def _check_prime(d: int, where: str, errors: list[str]) -> None:
    if not (0 < d < MAX_PRIME and is_prime(d)):
        errors.append(f"{where}: d must be prime (got {d})")


def _load_json(path: str, what: str, errors: list[str]):
    try:
        with open(path) as fh:
            return json.load(fh)
    except OSError as exc:
        errors.append(f"{what}: cannot read {path}: {exc.strerror}")
    except json.JSONDecodeError as exc:
        errors.append(f"{what}: malformed JSON in {path} (line {exc.lineno}, column {exc.colno}: {exc.msg})")
    return None


def _check_graph_json(data, errors: list[str]) -> graphs.Multigraph | None:
    before = len(errors)
    if not isinstance(data, dict):
        errors.append("graph: top level must be an object with 'n' and 'edges'")
        return None
    n = data.get("n")
    if not isinstance(n, int) or n < 1:
        errors.append(f"graph.n: expected a positive integer, got {n!r}")
    edges = data.get("edges", [])
    if not isinstance(edges, list):
        errors.append("graph.edges: expected a list")
        edges = []
    for idx, edge in enumerate(edges):
        path = f"graph.edges[{idx}]"
        if not isinstance(edge, list) or len(edge) not in (2, 3) or not all(isinstance(v, int) for v in edge):
            errors.append(f"{path}: expected [i, j] or [i, j, multiplicity] with integers")
            continue
        if len(edge) == 3 and edge[2] < 0:
            errors.append(f"{path}[2]: negative multiplicity {edge[2]}")
        for pos in (0, 1):
            if isinstance(n, int) and not 1 <= edge[pos] <= n:
                errors.append(f"{path}[{pos}]: vertex {edge[pos]} outside 1..{n}")
        if edge[0] == edge[1]:
            errors.append(f"{path}: self-loop at vertex {edge[0]}")
    if len(errors) > before:
        return None
    return graphs.Multigraph.from_json(data)


def _check_generators_json(data, errors: list[str]) -> GeneratorSet | None:
    before = len(errors)
    if not isinstance(data, dict):
        errors.append("generators: top level must be an object with 'd', 'n', 'generators'")
        return None
    for key in ("d", "n"):
        if not isinstance(data.get(key), int):
            errors.append(f"generators.{key}: expected an integer")
    if isinstance(data.get("d"), int):
        _check_prime(data["d"], "generators.d", errors)
    texts = data.get("generators")
    if not isinstance(texts, list):
        errors.append("generators.generators: expected a list of Pauli words")
    if len(errors) > before:
        return None
    try:
        return GeneratorSet.from_text(data["d"], data["n"], texts)
    except ValueError as exc:
        errors.append(f"generators.generators: {exc}")
        return None


def parse_config(argv: list[str] | None = None) -> JobConfig:
    """Parse arguments into a validated job, collecting every violation before failing."""
    argv = _normalize_argv(sys.argv[1:] if argv is None else list(argv))
    ns = vars(build_parser().parse_args(argv))
    errors: list[str] = []
    cfg = JobConfig(mode=ns["mode"])
    cfg.target = ns.get("target")
    cfg.output = ns.get("output")
    cfg.cap = ns.get("cap")
    cfg.restarts = ns.get("restarts", 20)
    cfg.seed = ns.get("seed", 0)
    cfg.witness_kind = ns.get("witness", "colored")
    if ns.get("json"):
        cfg.fmt = "json"
    elif ns.get("csv") or cfg.mode == "curves":
        cfg.fmt = "csv" if cfg.mode == "curves" else "text"
    if cfg.restarts < 1:
        errors.append(f"restarts: must be positive (got {cfg.restarts})")
    if cfg.cap is not None and cfg.cap < 1:
        errors.append(f"cap: must be positive (got {cfg.cap})")

    family_text = ns.get("family")
    if cfg.mode == "curves":
        cfg.families = [f.strip() for f in (family_text or "ghz,cluster").split(",") if f.strip()]
        for f in cfg.families:
            if f not in witness.CURVE_FAMILIES:
                errors.append(f"family: unknown curve family {f!r} (expected {', '.join(witness.CURVE_FAMILIES)})")
        cfg.ds = _int_list(ns.get("d", "2,3,5,7"), "d", errors)
        cfg.ns = _int_list(ns.get("n", "3..12"), "n", errors)
        for d in cfg.ds:
            _check_prime(d, "d", errors)
        for n in cfg.ns:
            if n < 2:
                errors.append(f"n: need N >= 2 (got {n})")
    else:
        if "d" in ns:
            ds = _int_list(ns["d"], "d", errors)
            if len(ds) == 1:
                cfg.d = ds[0]
                _check_prime(cfg.d, "d", errors)
            elif ds:
                errors.append("d: a single value is required outside curves")
        if "n" in ns:
            nvals = _int_list(ns["n"], "n", errors)
            if len(nvals) == 1:
                cfg.n = nvals[0]
                if cfg.n < 1:
                    errors.append(f"n: must be positive (got {cfg.n})")
            elif nvals:
                errors.append("n: a single value is required outside curves")
        if family_text is not None:
            if family_text not in FAMILIES:
                errors.append(f"family: unknown family {family_text!r} (expected {', '.join(FAMILIES)})")
            else:
                cfg.family = family_text
        if "graph" in ns:
            data = _load_json(ns["graph"], "graph", errors)
            if data is not None:
                cfg.graph = _check_graph_json(data, errors)
        if "generators" in ns:
            data = _load_json(ns["generators"], "generators", errors)
            if data is not None:
                cfg.generators = _check_generators_json(data, errors)
        if "witness_file" in ns:
            cfg.witness_data = _load_json(ns["witness_file"], "witness-file", errors)

        if cfg.mode == "nonlocal":
            if cfg.target == "w" and cfg.n is None:
                errors.append("n: required for `nonlocal w`")
        elif cfg.mode in ("build", "plimit", "spectrum", "lms", "verify"):
            sources = sum(x is not None for x in (family_text, ns.get("graph"), ns.get("generators"), ns.get("witness_file")))
            if sources == 0:
                errors.append("source: one of --family, --graph, --generators" + (", --witness-file" if cfg.mode in WITNESS_FILE_MODES else "") + " is required")
            elif sources > 1:
                errors.append("source: give exactly one of --family, --graph, --generators, --witness-file")
            if "witness_file" in ns and cfg.mode not in WITNESS_FILE_MODES:
                errors.append(f"witness-file: only used by {', '.join(WITNESS_FILE_MODES)}")
            if cfg.family is not None:
                if cfg.family == "nd_subspace":
                    if cfg.d is None:
                        errors.append("d: required for family nd_subspace")
                    if cfg.n is not None and cfg.d is not None and cfg.n != cfg.d:
                        errors.append(f"n: nd_subspace lives on N = d qudits (got N={cfg.n}, d={cfg.d})")
                elif cfg.family == "five_qubit":
                    if cfg.d not in (None, 2) or cfg.n not in (None, 5):
                        errors.append("family five_qubit is fixed at d=2, N=5")
                else:
                    if cfg.d is None:
                        errors.append(f"d: required for family {cfg.family}")
                    if cfg.n is None:
                        errors.append(f"n: required for family {cfg.family}")
                    elif cfg.n < 2:
                        errors.append(f"n: family {cfg.family} needs N >= 2")
            if ns.get("graph") is not None and cfg.d is None:
                errors.append("d: required with --graph")
    if errors:
        raise ConfigError(errors)
    return cfg


def _family_generators(family: str, n: int | None, d: int | None) -> GeneratorSet:
    if family == "ghz":
        return graphs.ghz_generators(n, d)
    if family == "cluster":
        return graphs.cluster_generators(n, d)
    if family == "star":
        return graphs.graph_generators(graphs.star_graph(n), d)
    if family == "nd_subspace":
        return graphs.nd_subspace_generators(d)
    if family == "gens_opt":
        return graphs.opt_subspace_generators(n, d)
    if family == "five_qubit":
        return graphs.five_qubit_code_generators()
    raise ValueError(f"unknown family {family!r}")


def _generators(cfg: JobConfig) -> GeneratorSet:
    if cfg.generators is not None:
        return cfg.generators
    if cfg.graph is not None:
        return graphs.graph_generators(cfg.graph, cfg.d)
    return _family_generators(cfg.family, cfg.n, cfg.d)


def _build(cfg: JobConfig, group) -> witness.Witness:
    if cfg.witness_kind == "projector":
        return witness.projector_witness(group)
    if cfg.witness_kind == "generator":
        return witness.generator_witness(group)
    return witness.colored_witness(group)


def _closed_form(cfg: JobConfig, w: witness.Witness) -> tuple[str, float] | None:
    n, d = w.n, w.d
    if w.kind == "projector":
        return "projector", witness.p_limit_closed_form("projector", n, d, k=w.projector_group.k)
    if w.kind == "generator":
        if d == 2:
            return "generator_qubit", witness.p_limit_closed_form("generator_qubit", n, d)
        return "generator", witness.p_limit_closed_form("generator", n, d)
    if w.kind == "colored":
        fam = {"ghz": "ghz", "cluster": "cluster", "gens_opt": "gens_opt", "nd_subspace": "nd_subspace"}.get(cfg.family or "")
        if fam == "cluster":
            fam = "cluster_even" if n % 2 == 0 else "cluster_odd"
        if fam:
            return fam, witness.p_limit_closed_form(fam, n, d)
        return "colored_general", witness.p_limit_closed_form("colored_general", n, d, sizes=w.block_sizes())
    return None


def _header(cfg: JobConfig) -> dict:
    return {"mode": cfg.mode, "seed": cfg.seed}


def _verify(cfg: JobConfig, w: witness.Witness) -> dict:
    checks = []

    def record(name: str, ok: bool, residual: float | None = None, **extra):
        item = {"name": name, "pass": bool(ok)}
        if residual is not None:
            item["residual"] = float(residual)
        item.update(extra)
        checks.append(item)

    dense = oracle.dense_witness(w, cfg.cap)
    dim = dense.shape[0]
    herm = float(np.max(np.abs(dense - dense.conj().T)))
    record("hermitian", herm <= 1e-12, herm)
    trace_dev = abs(np.trace(dense).real / dim - witness.normalized_trace(w))
    record("symbolic_trace", trace_dev <= 1e-10, trace_dev)
    spectrum = oracle.hermitian_spectrum(dense)
    if w.kind in ("colored", "projector", "generator"):
        combo = witness.expand_spectrum(witness.witness_spectrum(w))
        dev = float(np.max(np.abs(np.sort(combo) - spectrum))) if len(combo) == dim else math.inf
        record("combinatorial_spectrum", dev <= 1e-9, dev)
    target = w.target
    if target is not None:
        p = target.projector(cfg.cap)
        stab = max(float(np.max(np.abs(g.to_dense(cfg.cap) @ p - p))) for g in target.generators)
        record("stabilization", stab <= 1e-10, stab)
        rho = p / target.subspace_dimension()
        dense_e = float(np.trace(dense @ rho).real)
        sym_e = witness.expectation(w, target)
        record("target_expectation", abs(dense_e - sym_e) <= 1e-10, abs(dense_e - sym_e), value=sym_e)
        alpha = {"colored": float(w.d), "generator": 1 - math.cos(2 * math.pi / w.d)}.get(w.kind)
        if alpha is not None:
            tilde = oracle.dense_witness(witness.projector_witness(target), cfg.cap)
            margin = oracle.min_eigenvalue(dense - alpha * tilde)
            record("psd_certificate", margin >= -1e-10, min(margin, 0.0), alpha=alpha, min_eigenvalue=margin)
        try:
            rep = witness.p_limit_generic(w, target)
            t = np.trace(dense).real / dim
            dense_p = -dense_e / (t - dense_e)
            record("p_limit", abs(dense_p - rep.p_limit) <= 1e-10, abs(dense_p - rep.p_limit), value=rep.p_limit)
        except witness.NotDetected as exc:
            record("p_limit", False, None, reason=str(exc))
    if w.n >= 2 and dim <= 256:
        res = oracle.min_product_over_bipartitions(dense, w.n, w.d, cfg.restarts, cfg.seed)
        record("biseparable_nonnegative", res["minimum"] >= -1e-8, min(res["minimum"], 0.0),
               minimum=res["minimum"], per_bipartition=res["per_bipartition"])
    return {**_header(cfg), "kind": w.kind, "d": w.d, "n": w.n, "checks": checks,
            "pass": all(c["pass"] for c in checks)}


def _dense_json(m: np.ndarray) -> dict:
    return {"real": np.real(m).tolist(), "imag": np.imag(m).tolist()}


def _nonlocal(cfg: JobConfig) -> dict:
    out = _header(cfg)
    if cfg.target == "w":
        u = nonlocal_witness.w_unitary(cfg.n)
        stabs = nonlocal_witness.w_nonlocal_stabilizer(cfg.n, u)
        out.update({"n": cfg.n, "variant": u.variant, "rejected_variants": u.rejected, "strings": u.strings,
                    "unitary": u.operator.to_json(), "unitary_dense": _dense_json(u.operator.to_dense(cfg.cap)),
                    "stabilizers": [s.to_json() for s in stabs]})
        if cfg.n % 2:
            w, rep = nonlocal_witness.w_witness(cfg.n, stabs)
            out.update({"witness": w.to_dict(), "report": rep.to_dict(),
                        "p_limit_expected": 1 / cfg.n**2})
        return out
    if cfg.target == "wwbar":
        res = nonlocal_witness.wwbar_witnesses()
        out.update({
            "generators": [g.to_json() for g in res.generators],
            "projector_witness": res.projector.to_dict(),
            "stabilizer_witness": res.stabilizer.to_dict(),
            "projector_report": res.projector_report.to_dict(),
            "stabilizer_report": res.stabilizer_report.to_dict(),
            "comparison": res.extras,
        })
        for name, w in (("projector", res.projector), ("stabilizer", res.stabilizer)):
            r = oracle.min_product_over_bipartitions(oracle.dense_witness(w), 3, 2, cfg.restarts, cfg.seed)
            out[f"{name}_product_state_minimum"] = r["minimum"]
        return out
    fx = nonlocal_witness.ghzw_fixture()
    out.update({
        "checks": fx.checks,
        "u": _dense_json(fx.u), "s1": _dense_json(fx.s1), "s2": _dense_json(fx.s2),
        "projector_witness": fx.projector.to_dict(),
        "stabilizer_witness": fx.stabilizer.to_dict(),
        "projector_report": fx.projector_report.to_dict(),
        "stabilizer_report": fx.stabilizer_report.to_dict(),
    })
    for name, w in (("projector", fx.projector), ("stabilizer", fx.stabilizer)):
        r = oracle.min_product_over_bipartitions(oracle.dense_witness(w), 3, 2, cfg.restarts, cfg.seed)
        out[f"{name}_product_state_minimum"] = r["minimum"]
    return out


def execute(cfg: JobConfig) -> tuple[int, object]:
    """Run a validated job, returning (exit code, result payload)."""
    if cfg.mode == "curves":
        return 0, witness.curve_emit(cfg.families, cfg.ds, cfg.ns)
    if cfg.mode == "nonlocal":
        return 0, _nonlocal(cfg)
    if cfg.witness_data is not None:
        w = witness.Witness.from_dict(cfg.witness_data)
    else:
        gens = _generators(cfg)
        group = validate(gens)
        if cfg.mode == "lms":
            profile = lms.commutation_profile(gens)
            K, col = lms.lms_count(gens)
            return 0, {**_header(cfg), "d": gens.d, "n": gens.n, "generators": [str(g) for g in gens],
                       **profile.to_json(), "K": K, "classes": [[i + 1 for i in c] for c in col.classes]}
        w = _build(cfg, group)
    if cfg.mode == "build":
        return 0, {**_header(cfg), "witness": w.to_dict(), "normalized_trace": witness.normalized_trace(w)}
    if cfg.mode == "spectrum":
        spec = witness.witness_spectrum(w)
        return 0, {**_header(cfg), "kind": w.kind, "spectrum": [{"eigenvalue": v, "multiplicity": m} for v, m in spec]}
    if cfg.mode == "plimit":
        rep = witness.p_limit_generic(w)
        out = {**_header(cfg), "kind": w.kind, "d": w.d, "n": w.n, "K": w.K or None, **rep.to_dict()}
        cf = _closed_form(cfg, w)
        if cf is not None:
            out["closed_form"], out["p_limit_closed_form"] = cf
        return 0, out
    result = _verify(cfg, w)
    return (0 if result["pass"] else 1), result


def _fmt(obj):
    if isinstance(obj, bool) or obj is None or isinstance(obj, (int, str)):
        return obj
    if isinstance(obj, (float, np.floating)):
        return float(f"{float(obj):.12g}")
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, complex):
        return [_fmt(obj.real), _fmt(obj.imag)]
    if isinstance(obj, dict):
        return {str(k): _fmt(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_fmt(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return _fmt(obj.tolist())
    return str(obj)


def _text_lines(obj, prefix: str = "") -> list[str]:
    if isinstance(obj, dict):
        lines = []
        for k, v in obj.items():
            if isinstance(v, (dict, list)) and v and not all(isinstance(x, (int, float, str, bool)) for x in v):
                lines.append(f"{prefix}{k}:")
                lines.extend(_text_lines(v, prefix + "  "))
            else:
                lines.append(f"{prefix}{k}: {json.dumps(v)}")
        return lines
    if isinstance(obj, list):
        lines = []
        for v in obj:
            sub = _text_lines(v, prefix + "  ")
            if sub:
                lines.append(f"{prefix}- {sub[0].strip()}")
                lines.extend(sub[1:])
        return lines
    return [f"{prefix}{json.dumps(obj)}"]


def render(cfg: JobConfig, payload) -> str:
    payload = _fmt(payload)
    if cfg.mode == "curves" and cfg.fmt == "csv":
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(["family", "d", "N", "K", "p_limit"])
        for row in payload:
            writer.writerow([row["family"], row["d"], row["N"], "" if row["K"] is None else row["K"],
                             f"{row['p_limit']:.12g}"])
        return buf.getvalue()
    if cfg.mode == "curves":
        payload = {**_header(cfg), "rows": payload}
    if cfg.fmt == "json":
        return json.dumps(payload, indent=2) + "\n"
    return "\n".join(_text_lines(payload)) + "\n"


def _module_tag(exc: BaseException) -> str:
    tb = exc.__traceback__
    name = "cli"
    while tb is not None:
        mod = tb.tb_frame.f_globals.get("__name__", "")
        if mod.startswith("stabwit."):
            name = mod.split(".", 1)[1]
        tb = tb.tb_next
    return name


def main(argv: list[str] | None = None) -> int:
    try:
        cfg = parse_config(argv)
    except ConfigError as exc:
        for v in exc.violations:
            print(f"error [config]: {v}", file=sys.stderr)
        return 1
    try:
        code, payload = execute(cfg)
    except witness.NotDetected as exc:
        print(f"not detected [{_module_tag(exc)}]: {exc}", file=sys.stderr)
        return 2
    except (ValueError, KeyError, TypeError, StabilizerError, DenseCapExceeded, AssertionError, ArithmeticError) as exc:
        print(f"error [{_module_tag(exc)}]: {exc}", file=sys.stderr)
        return 1
    text = render(cfg, payload)
    if cfg.fmt == "csv":
        print(f"seed: {cfg.seed}", file=sys.stderr)
    if cfg.output:
        with open(cfg.output, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return code


if __name__ == "__main__":
    sys.exit(main())

"""Command-line front end.

Commands: describe, resonances, residues, verify, plot. Flags override a
plain-text ``key=value`` file given with ``--config``. Exit codes: 0 ok,
1 verification failure, 2 usage or configuration error.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
from dataclasses import dataclass, field, replace
from fractions import Fraction
from pathlib import Path

from .plancherel import profile
from .resonances import (
    branch_points,
    enumerate_resonances,
    lattice_point,
)
from .spaces import (
    ExtensionClass,
    ParameterRangeError,
    ProductSpace,
    RankOneSpace,
    SpecParseError,
    build_product,
    classify_extension,
    parse_space,
)

FORMATS = ("json", "csv", "svg", "text")


class ConfigError(ValueError):
    pass


@dataclass
class RunConfig:
    space1: str | None = None
    space2: str | None = None
    b2_1: Fraction | None = None
    b2_2: Fraction | None = None
    R_sq: Fraction = Fraction(25)
    format: str | None = None
    nodes: int = 2048
    tolerances: dict = field(default_factory=dict)
    seed: int = 0
    out: str | None = None
    k: int | None = None
    printed_forms: bool = False

    def validate(self):
        if self.R_sq <= 0:
            raise ConfigError("max-r2 must be positive")
        if self.nodes <= 0 or self.nodes % 2:
            raise ConfigError("nodes must be a positive even integer")
        if any(v <= 0 for v in self.tolerances.values()):
            raise ConfigError("tolerances must be positive")
        if self.format is not None and self.format not in FORMATS:
            raise ConfigError(f"format must be one of {', '.join(FORMATS)}")

    def space(self, which: int) -> RankOneSpace | None:
        text = self.space1 if which == 1 else self.space2
        if text is None:
            return None
        s = parse_space(text)
        b2 = self.b2_1 if which == 1 else self.b2_2
        if b2 is not None:
            if b2 <= 0:
                raise ConfigError("b2 values must be positive")
            s = replace(s, b_sq=b2)
        return s

    def product(self) -> ProductSpace:
        s1, s2 = self.space(1), self.space(2)
        if s1 is None or s2 is None:
            raise ConfigError("this command needs both --space1 and --space2")
        return build_product(s1, s2)


def _fraction(text: str) -> Fraction:
    try:
        return Fraction(text.strip())
    except (ValueError, ZeroDivisionError):
        raise ConfigError(f"not a rational number: {text!r}") from None


def _parse_tol(entries: list[str]) -> dict:
    """'1e-8' sets every check; 'name=1e-8' sets one check."""
    from .verifier import DEFAULT_TOLERANCES

    out = {}
    for entry in entries:
        if "=" in entry:
            name, value = entry.split("=", 1)
            name = name.strip()
            if name not in DEFAULT_TOLERANCES:
                raise ConfigError(f"unknown check name in --tol: {name}")
            names = [name]
        else:
            value, names = entry, list(DEFAULT_TOLERANCES)
        try:
            tol = float(value)
        except ValueError:
            raise ConfigError(f"invalid tolerance {value!r}") from None
        for n in names:
            out[n] = tol
    return out


_KEYS = {
    "space1": "space1",
    "space2": "space2",
    "b2-1": "b2_1",
    "b2-2": "b2_2",
    "max-r2": "max_r2",
    "format": "format",
    "nodes": "nodes",
    "tol": "tol",
    "seed": "seed",
    "out": "out",
    "k": "k",
}


def read_config_file(path: str) -> dict:
    values: dict = {}
    try:
        lines = Path(path).read_text().splitlines()
    except OSError as exc:
        raise ConfigError(f"cannot read config file: {exc}") from None
    for num, raw in enumerate(lines, 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"{path}:{num}: expected key=value")
        key, value = (x.strip() for x in line.split("=", 1))
        key = key.replace("_", "-")
        if key not in _KEYS:
            raise ConfigError(f"{path}:{num}: unknown key {key!r}")
        if key == "tol":
            values.setdefault("tol", []).append(value)
        else:
            values[_KEYS[key]] = value
    return values


def build_config(args: argparse.Namespace) -> RunConfig:
    merged = read_config_file(args.config) if args.config else {}
    for name in ("space1", "space2", "b2_1", "b2_2", "max_r2", "format", "nodes", "seed", "out", "k"):
        value = getattr(args, name)
        if value is not None:
            merged[name] = value
    if args.tol:
        merged["tol"] = args.tol
    cfg = RunConfig(printed_forms=args.printed_forms)
    cfg.space1 = merged.get("space1")
    cfg.space2 = merged.get("space2")
    if "b2_1" in merged:
        cfg.b2_1 = _fraction(str(merged["b2_1"]))
    if "b2_2" in merged:
        cfg.b2_2 = _fraction(str(merged["b2_2"]))
    if "max_r2" in merged:
        cfg.R_sq = _fraction(str(merged["max_r2"]))
    cfg.format = merged.get("format")
    try:
        if "nodes" in merged:
            cfg.nodes = int(merged["nodes"])
        if "seed" in merged:
            cfg.seed = int(merged["seed"])
        if "k" in merged:
            cfg.k = int(merged["k"])
    except ValueError as exc:
        raise ConfigError(str(exc)) from None
    cfg.tolerances = _parse_tol(merged.get("tol", []))
    cfg.out = merged.get("out")
    cfg.validate()
    return cfg


# ---------------------------------------------------------------------------
# payload builders


def _space_json(s: RankOneSpace, lattice: int = 5) -> dict:
    prof = profile(s)
    out = {
        "label": s.label,
        "family": s.family.value,
        "n": s.n,
        "m_half": s.m_half,
        "m_full": s.m_full,
        "rho_beta": str(s.rho_beta),
        "b_sq": str(s.b_sq),
        "P": prof.P.format(),
        "has_cot": prof.has_cot,
    }
    if s.odd:
        out["L_sq_lattice"] = [str(s.b_sq * (s.rho_beta + ell) ** 2) for ell in range(lattice)]
    else:
        out["L_sq_lattice"] = []
    return out


def describe_payload(cfg: RunConfig) -> dict:
    spaces = [s for s in (cfg.space(1), cfg.space(2)) if s is not None]
    if not spaces:
        raise ConfigError("describe needs --space1 (and optionally --space2)")
    payload: dict = {"spaces": [_space_json(s) for s in spaces]}
    if len(spaces) == 2:
        p = build_product(*spaces)
        rep = classify_extension(p)
        payload["product"] = {
            "rho_X_sq": str(p.rho_X_sq),
            "L_sq": str(p.L_sq) if p.L_sq != math.inf else "inf",
            "extension_class": rep.extension_class.value,
            "statement": rep.statement,
        }
    return payload


def _branch_json(p: ProductSpace, R_sq) -> list:
    if p.extension_class is ExtensionClass.BothEvenHolomorphicLog:
        return []
    return [
        {"L_sq": str(b.L_sq), "sources": [[s.factor, s.ell] for s in b.sources]}
        for b in branch_points(p, R_sq)
    ]


def resonance_json(r) -> dict:
    return {
        "z_abs_sq": str(r.z_abs_sq),
        "z": f"-i*sqrt({r.z_abs_sq})",
        "pairs": [[s.ell1, s.ell2] for s in r.summands],
        "C": [s.C.to_json() for s in r.summands],
        "weights": [list(s.weight) for s in r.summands],
    }


def catalog_payload(cfg: RunConfig) -> dict:
    p = cfg.product()
    rep = classify_extension(p)
    res = enumerate_resonances(p, cfg.R_sq)
    note = "" if res or p.extension_class is ExtensionClass.BothOddMeromorphic else (
        "no resonances: the resolvent extends without poles (" + rep.statement + ")"
    )
    return {
        "space1": p.s1.label,
        "space2": p.s2.label,
        "b_sq": [str(p.s1.b_sq), str(p.s2.b_sq)],
        "max_r2": str(cfg.R_sq),
        "extension_class": p.extension_class.value,
        "note": note,
        "branch_points": _branch_json(p, cfg.R_sq),
        "resonances": [resonance_json(r) for r in res],
    }


CSV_FIELDS = ["z_abs_sq", "z", "l1", "l2", "C_q1", "C_q2", "weight_l1", "weight_l2"]


def catalog_csv(payload: dict) -> str:
    buf = io.StringIO()
    buf.write(f"# product: {payload['space1']} x {payload['space2']}; max_r2={payload['max_r2']}\n")
    if payload["note"]:
        buf.write(f"# {payload['note']}\n")
    for bp in payload["branch_points"]:
        src = ";".join(f"{f}:{e}" for f, e in bp["sources"])
        buf.write(f"# branch_point L_sq={bp['L_sq']} sources={src}\n")
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(CSV_FIELDS)
    for r in payload["resonances"]:
        for pair, C, wt in zip(r["pairs"], r["C"], r["weights"]):
            writer.writerow([r["z_abs_sq"], r["z"], pair[0], pair[1], C["q1"], C["q2"], wt[0], wt[1]])
    return buf.getvalue()


def residues_payload(cfg: RunConfig) -> dict:
    from .verifier import (
        KernelContext,
        SingularChartError,
        chart_setup,
        residue_F_tilde,
        residue_F_tilde_derived,
    )

    p = cfg.product()
    if p.extension_class is not ExtensionClass.BothOddMeromorphic:
        return {"extension_class": p.extension_class.value, "note": classify_extension(p).statement,
                "residues": []}
    ctx = KernelContext(p, nodes=cfg.nodes)
    res = enumerate_resonances(p, cfg.R_sq)
    indices = range(len(res)) if cfg.k is None else [cfg.k]
    if cfg.k is not None and not 0 <= cfg.k < len(res):
        raise ConfigError(f"resonance index {cfg.k} out of range (found {len(res)} within max-r2)")
    out = []
    for k in indices:
        r = res[k]
        entry = resonance_json(r)
        entry["k"] = k
        entry["summand_count"] = len(r.summands)
        entry["C_value"] = [float(s.C) for s in r.summands]
        try:
            cs = chart_setup(ctx, k)
            same = [1] * (cs.m + 1)
            entry["chart_index"] = cs.m
            entry["L_m_sq"] = str(cs.L_m_sq)
            printed = residue_F_tilde(ctx, k, 1)
            derived = residue_F_tilde_derived(ctx, k, same)
            entry["residue_printed_eps_plus"] = [printed.real, printed.imag]
            entry["residue_derived_eps_all_plus"] = [derived.real, derived.imag]
        except SingularChartError as exc:
            entry["chart_note"] = str(exc)
        out.append(entry)
    return {
        "extension_class": p.extension_class.value,
        "test_function": "gaussian(sigma=1)",
        "residues": out,
    }


def _text(payload, indent: int = 0) -> str:
    pad = "  " * indent
    lines = []
    if isinstance(payload, dict):
        for key, value in payload.items():
            if isinstance(value, (dict, list)) and value and not all(
                isinstance(x, (str, int, float, bool)) for x in (value if isinstance(value, list) else [])
            ):
                lines.append(f"{pad}{key}:")
                lines.append(_text(value, indent + 1))
            else:
                lines.append(f"{pad}{key}: {value}")
    elif isinstance(payload, list):
        for item in payload:
            if isinstance(item, dict):
                lines.append(f"{pad}-")
                lines.append(_text(item, indent + 1))
            else:
                lines.append(f"{pad}- {item}")
    else:
        lines.append(f"{pad}{payload}")
    return "\n".join(lines)


def _dump_json(payload) -> str:
    return json.dumps(payload, indent=2) + "\n"


def _emit(cfg: RunConfig, data: str | bytes, stdout) -> None:
    if cfg.out:
        mode = "wb" if isinstance(data, bytes) else "w"
        with open(cfg.out, mode) as fh:
            fh.write(data)
    else:
        if isinstance(data, bytes):
            stdout.buffer.write(data) if hasattr(stdout, "buffer") else stdout.write(data.decode())
        else:
            stdout.write(data)


def _sidecar(out: str, suffix: str) -> Path:
    path = Path(out)
    return path.with_name(path.stem + suffix)


def _pole_svg(cfg: RunConfig) -> bytes:
    from .plotting import pole_diagram

    p = cfg.product()
    branch = [] if p.extension_class is ExtensionClass.BothEvenHolomorphicLog else branch_points(p, cfg.R_sq)
    res = enumerate_resonances(p, cfg.R_sq)
    return pole_diagram(branch, res, cfg.R_sq, title=f"{p.label}, |z|² ≤ {cfg.R_sq}")


# ---------------------------------------------------------------------------
# commands


def cmd_describe(cfg: RunConfig, stdout) -> int:
    payload = describe_payload(cfg)
    fmt = cfg.format or "json"
    if fmt not in ("json", "text"):
        raise ConfigError("describe supports json and text")
    _emit(cfg, _dump_json(payload) if fmt == "json" else _text(payload) + "\n", stdout)
    return 0


def cmd_resonances(cfg: RunConfig, stdout) -> int:
    payload = catalog_payload(cfg)
    fmt = cfg.format or "json"
    if fmt == "json":
        data = _dump_json(payload)
    elif fmt == "csv":
        data = catalog_csv(payload)
    elif fmt == "text":
        data = _text(payload) + "\n"
    else:
        raise ConfigError("resonances supports json, csv and text")
    _emit(cfg, data, stdout)
    if cfg.out:
        _sidecar(cfg.out, ".svg").write_bytes(_pole_svg(cfg))
    return 0


def cmd_residues(cfg: RunConfig, stdout) -> int:
    payload = residues_payload(cfg)
    fmt = cfg.format or "json"
    if fmt not in ("json", "text"):
        raise ConfigError("residues supports json and text")
    _emit(cfg, _dump_json(payload) if fmt == "json" else _text(payload) + "\n", stdout)
    return 0


def cmd_verify(cfg: RunConfig, stdout) -> int:
    from .verifier import KernelContext, run_suite

    p = cfg.product()
    ctx = KernelContext(p, nodes=cfg.nodes)
    checks = [c.to_json() for c in run_suite(ctx, seed=cfg.seed, tolerances=cfg.tolerances,
                                              printed_forms=cfg.printed_forms)]
    failed = [c["name"] for c in checks if not c["pass"]]
    report = {
        "product": p.label,
        "seed": cfg.seed,
        "nodes": cfg.nodes,
        "checks": checks,
        "failed": failed,
        "pass": not failed,
    }
    fmt = cfg.format or "json"
    if fmt == "json":
        data = _dump_json(report)
    elif fmt == "text":
        rows = [f"{'PASS' if c['pass'] else 'FAIL'}  {c['name']:<26} error={c['error']:.3e}  tol={c['tol']:.1e}"
                for c in checks]
        data = "\n".join([f"verify {p.label} (seed {cfg.seed})", *rows]) + "\n"
    else:
        raise ConfigError("verify supports json and text")
    _emit(cfg, data, stdout)
    if cfg.out:
        from .plotting import check_summary

        _sidecar(cfg.out, "_checks.svg").write_bytes(check_summary(checks, title=p.label))
    if failed:
        print("failed checks: " + ", ".join(failed), file=sys.stderr)
        return 1
    return 0


def cmd_plot(cfg: RunConfig, stdout) -> int:
    if (cfg.format or "svg") != "svg":
        raise ConfigError("plot emits svg only")
    _emit(cfg, _pole_svg(cfg), stdout)
    return 0


COMMANDS = {
    "describe": cmd_describe,
    "resonances": cmd_resonances,
    "residues": cmd_residues,
    "verify": cmd_verify,
    "plot": cmd_plot,
}


def make_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="symres",
        description="Resonances of the Laplacian on products of two rank-one symmetric spaces.",
    )
    parser.add_argument("command", choices=sorted(COMMANDS))
    parser.add_argument("--config", help="key=value file; flags override its entries")
    parser.add_argument("--space1", help='first factor, e.g. "SU(2,1)" or "Sp(2,1)@b2=1/2"')
    parser.add_argument("--space2", help="second factor")
    parser.add_argument("--b2-1", dest="b2_1", help="b^2 of the first factor (rational)")
    parser.add_argument("--b2-2", dest="b2_2", help="b^2 of the second factor (rational)")
    parser.add_argument("--max-r2", dest="max_r2", help="enumeration bound on |z|^2 (rational, default 25)")
    parser.add_argument("--format", choices=FORMATS)
    parser.add_argument("--nodes", help="quadrature nodes on circles (even, default 2048)")
    parser.add_argument("--tol", action="append", default=[],
                        help="tolerance override: VALUE for all checks or NAME=VALUE; repeatable")
    parser.add_argument("--seed", help="seed for randomized checks (default 0)")
    parser.add_argument("--out", help="output file; figures are written next to it")
    parser.add_argument("--k", help="resonance index for the residues command")
    parser.add_argument("--printed-forms", action="store_true",
                        help="verify: also compare the printed chart and F-tilde residue formulas")
    return parser


def main(argv: list[str] | None = None, stdout=None) -> int:
    stdout = stdout or sys.stdout
    parser = make_parser()
    args = parser.parse_args(argv)
    try:
        cfg = build_config(args)
        return COMMANDS[args.command](cfg, stdout)
    except (ConfigError, SpecParseError, ParameterRangeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


def main_exit() -> None:
    sys.exit(main())

"""``homstruct`` command line.

    homstruct classify <s2xr|h2xr> [--json PATH]
    homstruct verify <s2xr|h2xr> [--label lambda|solv] [--lambda F] [--samples N]
                     [--tol F] [--seed N] [--fd-step F] [--json PATH]
    homstruct isom <s2xr|h2xr> <lambda> <mu> [--json PATH]

Exit codes: 0 success, 2 verification failure, 64 usage error.
``--json -`` writes the JSON report to stdout instead of the text report.
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import asdict, dataclass, field
from typing import Any, Optional, Sequence

import numpy as np

from . import __version__
from .errors import HomstructError
from .models import ModelSpace, make_h2xr, make_h2xr_solv, make_s2xr, named_structure
from .reductive import enumerate_lie_subspaces
from .verifier import (
    VerificationConfig,
    crosscheck_origin,
    invariance_residual,
    isomorphism_test,
    origin_table,
    verify_ambrose_singer,
)

EXIT_OK = 0
EXIT_FAIL = 2
EXIT_USAGE = 64

CROSSCHECK_TOL = 1e-8
INVARIANCE_SAMPLES = 20
SPACES = ("s2xr", "h2xr")


@dataclass
class ReportDocument:
    version: str
    command: list[str]
    space: str
    coset: str
    families: list[dict[str, Any]] = field(default_factory=list)
    origin_tensor: Optional[dict[str, Any]] = None
    as_residuals: Optional[dict[str, Any]] = None
    isomorphism: Optional[dict[str, Any]] = None

    def to_dict(self) -> dict[str, Any]:
        return asdict(self)

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), ensure_ascii=False, indent=2, sort_keys=True) + "\n"

    @classmethod
    def from_dict(cls, d: dict[str, Any]) -> ReportDocument:
        return cls(**d)

    @classmethod
    def from_json(cls, text: str) -> ReportDocument:
        return cls.from_dict(json.loads(text))


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="homstruct", description="Homogeneous structure tensors on S²×ℝ and H²×ℝ.")
    p.add_argument("--version", action="version", version=__version__)
    sub = p.add_subparsers(dest="cmd", required=True, parser_class=_Parser)

    c = sub.add_parser("classify", help="enumerate Lie subspaces and structure tensors")
    c.add_argument("space", choices=SPACES)
    c.add_argument("--json", metavar="PATH")

    v = sub.add_parser("verify", help="certify the Ambrose-Singer equations numerically")
    v.add_argument("space", choices=SPACES)
    v.add_argument("--label", choices=("lambda", "solv"), default="lambda")
    v.add_argument("--lambda", dest="lam", type=float, default=1.0)
    v.add_argument("--samples", type=int, default=100)
    v.add_argument("--tol", type=float, default=1e-6)
    v.add_argument("--seed", type=int, default=42)
    v.add_argument("--fd-step", type=float, default=1e-5)
    v.add_argument("--json", metavar="PATH")

    i = sub.add_parser("isom", help="search for an isometry between T^λ and T^μ")
    i.add_argument("space", choices=SPACES)
    i.add_argument("lam", type=float, metavar="lambda")
    i.add_argument("mu", type=float)
    i.add_argument("--json", metavar="PATH")
    return p


def _model(space: str) -> ModelSpace:
    return make_s2xr() if space == "s2xr" else make_h2xr()


def _entries(s: np.ndarray) -> list[dict[str, Any]]:
    return [
        {"i": int(i), "j": int(j), "k": int(k), "value": round(float(s[i, j, k]), 9)}
        for i, j, k in np.ndindex(*s.shape)
        if abs(s[i, j, k]) > 1e-9
    ]


def _origin_block(model: ModelSpace, s: np.ndarray) -> dict[str, Any]:
    return {"frame": list(model.display_labels), "entries": _entries(s)}


def _fmt(x: float) -> str:
    return f"{x:.3e}"


def _print_origin(block: dict[str, Any], out) -> None:
    frame = block["frame"]
    if not block["entries"]:
        print("    T = 0 at o", file=out)
    for e in block["entries"]:
        print(f"    T({frame[e['i']]}, {frame[e['j']]}, {frame[e['k']]}) = {e['value']:g}", file=out)


def _recorded(argv: Sequence[str]) -> list[str]:
    """The invocation without its output destination, so reports written to different files compare equal."""
    out, skip = [], False
    for a in argv:
        if skip:
            skip = False
        elif a == "--json":
            skip = True
        elif not a.startswith("--json="):
            out.append(a)
    return out


def cmd_classify(args, argv) -> tuple[ReportDocument, int]:
    s2 = args.space == "s2xr"
    reps = [make_s2xr()] if s2 else [make_h2xr(), make_h2xr_solv()]
    lambdas = VerificationConfig().lambdas
    families, worst = [], 0.0
    for model in reps:
        fam = enumerate_lie_subspaces(model.algebra_id, model.h_basis)
        if fam.free_params:
            label = "T_lambda"
            devs = [
                crosscheck_origin(model, fam.instantiate({"λ": lam}), named_structure(model, label, lam))
                for lam in lambdas
            ]
            generator = fam.instantiate({"λ": 1})
        else:
            label = "T_solv"
            generator = fam.instantiate()
            devs = [crosscheck_origin(model, generator, named_structure(model, label))]
        structure = named_structure(model, label, 1.0)
        worst = max(worst, *devs)
        families.append({
            "label": label,
            "free_params": list(fam.free_params),
            "forced_zero": list(fam.forced_zero),
            "coset": model.coset,
            "tensor": structure.formula,
            "m_basis": generator.labels(),
            "crosscheck_deviation": max(devs),
            "origin_tensor": _origin_block(model, origin_table(model, generator)),
        })
    doc = ReportDocument(
        version=__version__,
        command=_recorded(argv),
        space=args.space,
        coset="; ".join(f["coset"] for f in families),
        families=families,
        origin_tensor=families[0]["origin_tensor"],
    )
    return doc, EXIT_OK if worst <= CROSSCHECK_TOL else EXIT_FAIL


def print_classify(doc: ReportDocument, out) -> None:
    name = "S²×ℝ" if doc.space == "s2xr" else "H²×ℝ"
    print(f"{name}: {len(doc.families)} type(s) of homogeneous structure tensors", file=out)
    for f in doc.families:
        print(f"  [{f['coset']}]  T = {f['tensor']}", file=out)
        print(f"    m = span{{{', '.join(f['m_basis'])}}}", file=out)
        free = ", ".join(f["free_params"]) or "none"
        forced = ", ".join(f"{n} = 0" for n in f["forced_zero"]) or "none"
        print(f"    free parameters: {free}; forced: {forced}", file=out)
        print(f"    origin tensor{' at λ = 1' if f['free_params'] else ''}:", file=out)
        _print_origin(f["origin_tensor"], out)
        print(f"    crosscheck vs closed form: {_fmt(f['crosscheck_deviation'])}", file=out)


def cmd_verify(args, argv) -> tuple[ReportDocument, int]:
    cfg = VerificationConfig(samples=args.samples, tol=args.tol, fd_step=args.fd_step, seed=args.seed)
    model = _model(args.space)
    if args.label == "solv":
        if args.space != "h2xr":
            raise _UsageError("--label solv is only defined on h2xr")
        structure = named_structure(model, "T_solv")
    else:
        structure = named_structure(model, "T_lambda", args.lam)
    report = verify_ambrose_singer(structure.model, structure, cfg)
    inv = invariance_residual(structure, INVARIANCE_SAMPLES, cfg.seed)
    passed = report.passed and inv < cfg.tol
    residuals = report.to_dict()
    residuals["invariance"] = inv
    residuals["pass"] = passed
    doc = ReportDocument(
        version=__version__,
        command=_recorded(argv),
        space=args.space,
        coset=structure.coset,
        families=[{"label": structure.label, "free_params": [] if structure.label == "T_solv" else ["λ"],
                   "forced_zero": [], "tensor": structure.formula}],
        origin_tensor=_origin_block(structure.model, _display(structure)),
        as_residuals=residuals,
    )
    return doc, EXIT_OK if passed else EXIT_FAIL


def _display(structure) -> np.ndarray:
    model = structure.model
    f = model.display_frame
    return np.einsum("ijk,ia,jb,kc->abc", structure.tensor(model.origin), f, f, f)


def print_verify(doc: ReportDocument, out) -> None:
    r = doc.as_residuals
    fam = doc.families[0]
    what = fam["tensor"] + ("" if r["lam"] is None else f", λ = {r['lam']:g}")
    print(f"{doc.space} [{doc.coset}]  T = {what}", file=out)
    print(f"  samples {r['samples']}, seed {r['seed']}, tol {r['tol']:g}", file=out)
    print(f"  max |∇̃g| = {_fmt(r['nabla_g'])}", file=out)
    print(f"  max |∇̃R| = {_fmt(r['nabla_R'])}", file=out)
    print(f"  max |∇̃T| = {_fmt(r['nabla_T'])}", file=out)
    print(f"  max |∇R|  = {_fmt(r['nabla_R_levi_civita'])}  (Levi-Civita)", file=out)
    print(f"  invariance under {INVARIANCE_SAMPLES} group elements: {_fmt(r['invariance'])}", file=out)
    print("  PASS" if r["pass"] else "  FAIL", file=out)


def cmd_isom(args, argv) -> tuple[ReportDocument, int]:
    model = _model(args.space)
    v = isomorphism_test(model, args.lam, args.mu)
    doc = ReportDocument(
        version=__version__,
        command=_recorded(argv),
        space=args.space,
        coset=model.coset,
        isomorphism={
            "lambda": v.lam,
            "mu": v.mu,
            "verdict": v.verdict,
            "witness": v.witness,
            "deviation": v.deviation,
            "certificate": v.certificate,
            "norm_lambda": v.norm_lambda,
            "norm_mu": v.norm_mu,
        },
    )
    return doc, EXIT_OK


def print_isom(doc: ReportDocument, out) -> None:
    i = doc.isomorphism
    head = f"T^{i['lambda']:g} vs T^{i['mu']:g} on {doc.space}:"
    if i["verdict"] == "isomorphic":
        print(f"{head} isomorphic, witness \"{i['witness']}\" (deviation {_fmt(i['deviation'])})", file=out)
    elif i["verdict"] == "not_isomorphic":
        print(f"{head} not isomorphic: {i['certificate']}", file=out)
    else:
        print(f"{head} no witness found in the isometry catalog", file=out)


class _UsageError(Exception):
    pass


_COMMANDS = {
    "classify": (cmd_classify, print_classify),
    "verify": (cmd_verify, print_verify),
    "isom": (cmd_isom, print_isom),
}


def main(argv: Optional[Sequence[str]] = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    run, show = _COMMANDS[args.cmd]
    try:
        doc, code = run(args, argv)
    except (_UsageError, ValueError) as exc:
        parser.print_usage(sys.stderr)
        print(f"homstruct: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except HomstructError as exc:
        print(f"homstruct: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_FAIL
    if args.json == "-":
        sys.stdout.write(doc.to_json())
    else:
        show(doc, sys.stdout)
        if args.json:
            with open(args.json, "w", encoding="utf-8") as fh:
                fh.write(doc.to_json())
    return code


if __name__ == "__main__":
    sys.exit(main())

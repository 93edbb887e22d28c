"""Command-line entry point: ``cantorspec <command> [options]``.

Exit codes: 0 for a definitive result, 2 for an inconclusive certificate,
1 for usage or runtime errors.
"""
from __future__ import annotations

import argparse
import json
import sys
from dataclasses import dataclass
from typing import Optional

from .frame import frame_scan, rows_to_csv, scan_grid
from .gap import certify_spectrum, min_gap, refute_series
from .measure import MeasureParams, compute_constants
from .ortho import is_maximal_at_depth, is_orthogonal_set, tree_from_set
from .rescale import classify_K_lambda4, classify_scaled, rescaled_counterexample_covering
from .tree import enumerate_lambda, make_kappa, make_tau24, parse_word, trie_from_json

EXIT_OK, EXIT_ERROR, EXIT_INCONCLUSIVE = 0, 1, 2
CONSTRUCTIONS = ("tau24", "kappa", "trie-file", "rescaled-counterexample")


class UsageError(Exception):
    pass


@dataclass(frozen=True)
class RunConfig:
    q: int = 2
    b: int = 4
    construction: str = "tau24"
    file: Optional[str] = None
    depth: int = 24
    level: int = 8
    budget: int = 100000
    mu_tol: float = 1e-10
    grid_resolution: float = 1e-5
    output: Optional[str] = None
    format: str = "json"

    @property
    def params(self) -> MeasureParams:
        return MeasureParams(self.q, self.b)


def _config(args) -> RunConfig:
    fields = RunConfig.__dataclass_fields__
    cfg = RunConfig(**{k: v for k, v in vars(args).items() if k in fields and v is not None})
    try:
        cfg.params
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    return cfg


def build_mapping(cfg: RunConfig, cover: Optional[int] = None):
    p = cfg.params
    if cfg.construction == "tau24":
        if (p.q, p.b) != (2, 4):
            raise UsageError("tau24 requires --q 2 --b 4")
        return make_tau24()
    if cfg.construction == "kappa":
        try:
            return make_kappa(p)
        except ValueError as exc:
            raise UsageError(str(exc)) from None
    if cfg.construction == "trie-file":
        if not cfg.file:
            raise UsageError("trie-file needs --file")
        try:
            with open(cfg.file) as fh:
                text = fh.read()
        except OSError as exc:
            raise UsageError(f"{cfg.file}: {exc.strerror}") from None
        data = json.loads(text) if text.strip() else {}
        if not isinstance(data, dict):
            raise UsageError(f"{cfg.file}: expected a JSON object")
        data.setdefault("q", p.q)
        data.setdefault("b", p.b)
        return trie_from_json(data)
    if cfg.construction == "rescaled-counterexample":
        return rescaled_counterexample_covering(p, max(cover or cfg.level, 6))
    raise UsageError(f"unknown construction {cfg.construction!r}")


def _emit(cfg: RunConfig, text: str) -> None:
    if not text.endswith("\n"):
        text += "\n"
    if cfg.output:
        try:
            with open(cfg.output, "w") as fh:
                fh.write(text)
        except OSError as exc:
            raise RuntimeError(f"{cfg.output}: {exc.strerror}") from None
    else:
        sys.stdout.write(text)


def _emit_lines(cfg: RunConfig, lines: list) -> None:
    if lines:
        _emit(cfg, "\n".join(lines))
    elif cfg.output:
        open(cfg.output, "w").close()


def cmd_classify_k(args) -> int:
    cfg = _config(args)
    p = cfg.params
    lo, hi = args.from_, args.to
    ks = [k for k in range(lo, hi + 1) if not (args.odd and k % 2 == 0)]
    lines = []
    if (p.q, p.b) == (2, 4):
        for k in ks:
            if k < 3 or k % 2 == 0:
                raise UsageError(f"K={k}: K must be odd and >= 3")
            lines.append(json.dumps(classify_K_lambda4(k).to_dict(), sort_keys=True))
    else:
        t = build_mapping(cfg)
        for k in ks:
            try:
                cert = classify_scaled(t, k, cfg.depth)
            except ValueError as exc:
                raise UsageError(str(exc)) from None
            lines.append(json.dumps({"K": k, "verdict": cert.verdict,
                                     "witness": cert.witnesses[0] if cert.witnesses else None},
                                    sort_keys=True))
    _emit_lines(cfg, lines)
    return EXIT_OK


def cmd_certify(args) -> int:
    cfg = _config(args)
    t = build_mapping(cfg)
    if t.n_tau_slope:
        c = compute_constants(cfg.params, cfg.grid_resolution)
        cert = refute_series(t, c, n_max=min(cfg.level, 6))
    else:
        cert = certify_spectrum(t, level=cfg.level, budget=cfg.budget)
    cert.parameters["mu_tol"] = cfg.mu_tol
    _emit(cfg, cert.to_json())
    return EXIT_OK if cert.definitive else EXIT_INCONCLUSIVE


def cmd_frame_scan(args) -> int:
    cfg = _config(args)
    t = build_mapping(cfg, cover=cfg.level)
    b = cfg.b
    xi_min = args.xi_min if args.xi_min is not None else -1 / (b - 1) + 1e-3
    xi_max = args.xi_max if args.xi_max is not None else (b - 2) / (b - 1) - 1e-3
    try:
        grid = scan_grid(t, xi_min, xi_max, args.steps)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    rows = frame_scan(t, grid, cfg.level, cfg.mu_tol)
    if cfg.format == "json":
        _emit_lines(cfg, [json.dumps(r.__dict__, sort_keys=True) for r in rows])
    else:
        _emit(cfg, rows_to_csv(rows))
    return EXIT_OK


def cmd_gap(args) -> int:
    cfg = _config(args)
    try:
        word = parse_word(args.word, cfg.q)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    t = build_mapping(cfg)
    g = min_gap(t, word, budget=cfg.budget)
    out = dict(g.to_dict(), word=args.word, construction=t.name)
    _emit(cfg, json.dumps(out, sort_keys=True))
    return EXIT_OK if g.exact else EXIT_INCONCLUSIVE


def cmd_export(args) -> int:
    cfg = _config(args)
    t = build_mapping(cfg, cover=cfg.level)
    lam = enumerate_lambda(t, cfg.level)
    if lam.unknown:
        raise RuntimeError(f"labels unknown below level {cfg.level}")
    _emit(cfg, json.dumps(list(lam.values)))
    return EXIT_OK


def cmd_ortho(args) -> int:
    cfg = _config(args)
    t = build_mapping(cfg, cover=cfg.level)
    values = list(enumerate_lambda(t, cfg.level).values)
    report = is_orthogonal_set(cfg.params, values)
    if report.orthogonal:
        report.maximal_at_depth = is_maximal_at_depth(tree_from_set(cfg.params, values), cfg.depth).maximal
    _emit(cfg, report.to_json())
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--q", type=int)
    common.add_argument("--b", type=int)
    common.add_argument("--construction", choices=CONSTRUCTIONS)
    common.add_argument("--file")
    common.add_argument("--depth", type=int)
    common.add_argument("--level", type=int)
    common.add_argument("--budget", type=int)
    common.add_argument("--mu-tol", dest="mu_tol", type=float)
    common.add_argument("--grid-resolution", dest="grid_resolution", type=float)
    common.add_argument("--output")
    common.add_argument("--format", choices=("json", "csv"))

    parser = argparse.ArgumentParser(prog="cantorspec",
                                     description="Spectra of Cantor measures from labelled trees.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("classify-k", parents=[common], help="classify K * Lambda for a range of K")
    p.add_argument("--from", dest="from_", type=int, required=True)
    p.add_argument("--to", type=int, required=True)
    p.add_argument("--odd", action="store_true")
    p.set_defaults(func=cmd_classify_k)

    p = sub.add_parser("certify", parents=[common], help="spectrum / non-spectrum certificate")
    p.set_defaults(func=cmd_certify)

    p = sub.add_parser("frame-scan", parents=[common], help="tabulate Q_n on a grid")
    p.add_argument("--xi-min", dest="xi_min", type=float)
    p.add_argument("--xi-max", dest="xi_max", type=float)
    p.add_argument("--steps", type=int, default=50)
    p.set_defaults(func=cmd_frame_scan, format="csv")

    p = sub.add_parser("gap", parents=[common], help="minimal gap below a word")
    p.add_argument("--word", required=True)
    p.set_defaults(func=cmd_gap)

    p = sub.add_parser("export", parents=[common], help="finite truncation of Lambda")
    p.set_defaults(func=cmd_export)

    p = sub.add_parser("ortho", parents=[common], help="orthogonality of a truncation")
    p.set_defaults(func=cmd_ortho)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_ERROR if exc.code else EXIT_OK
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
    except (ValueError, RuntimeError, LookupError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
    return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())

"""Command-line front end.

Config files are flat ``key = value`` text; ``box`` may repeat, one record
per Schwartz box::

    q = 3
    N = 5
    c_exp = 1
    alpha_exp = 2
    box = ball:-1 shell:0 ball:0
    box = ball:0 ball:1 shell:-1 * 2
    dm = macdonald

Exit codes: 0 pass, 1 failed verification, 2 invalid input.
"""
from __future__ import annotations

import argparse
import json
import re
import sys
import time
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

from .coeffs import CoeffElement, CoeffField, PoleError
from .lattice_series import DivergentSeries
from .lemma_verify import verify_lemma
from .lfactors import const_cv_details, unramified_gamma_satake, unramified_sigma_satake
from .padic_geometry import PadicParams
from .repcoeff import SphericalModel, explicit_model, macdonald_model
from .schwartz import BALL, SHELL, BoxTerm, SchwartzFn
from .zeta import (DivergentRegularization, check_unramified, doubled_Iv, local_period_details,
                   zeta_gl1, zeta_gl2)

SCHEMA = "localzeta.report/1"
EXIT_PASS, EXIT_FAIL, EXIT_INVALID = 0, 1, 2


class ConfigError(ValueError):
    """Invalid configuration; the message names the offending field."""


# ---------------------------------------------------------------------------
# parsing

_ELEM = re.compile(r"^\s*([+-]?\d+(?:/\d+)?)?\s*\*?\s*(?:zeta\^?(-?\d+)|(zeta))?\s*$")


def parse_element(F: CoeffField, text: str, name: str = "value") -> CoeffElement:
    """``r``, ``zeta^k`` or ``r*zeta^k`` with ``r`` rational."""
    mt = _ELEM.match(text)
    if not mt or not text.strip():
        raise ConfigError(f"{name}: cannot parse field element {text!r}")
    r, k, bare = mt.groups()
    val = F.from_rational(Fraction(r) if r else 1)
    if k is not None or bare:
        val = val * F.zeta(int(k) if k is not None else 1)
    elif r is None:
        raise ConfigError(f"{name}: cannot parse field element {text!r}")
    return val


def parse_box(text: str) -> tuple[list[tuple], str]:
    """``kind:k kind:k ... [* coeff]`` -> (coords, coefficient text)."""
    body, _, coeff = text.partition("*")
    coeff = coeff.strip() or "1"
    coords = []
    for tok in body.split():
        kind, sep, k = tok.partition(":")
        if not sep or kind not in (BALL, SHELL):
            raise ConfigError(f"box: bad coordinate {tok!r} (expected ball:k or shell:k)")
        try:
            coords.append((kind, int(k)))
        except ValueError:
            raise ConfigError(f"box: bad exponent in {tok!r}") from None
    if not coords:
        raise ConfigError("box: empty record")
    return coords, coeff


def read_config_text(text: str) -> dict:
    out: dict = {"box": []}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        key, sep, val = line.partition("=")
        if not sep:
            raise ConfigError(f"line {lineno}: expected key = value")
        key = key.strip().replace("-", "_")
        val = val.strip()
        if key == "box":
            out["box"].append(val)
        elif key in out:
            raise ConfigError(f"line {lineno}: duplicate key {key!r}")
        else:
            out[key] = val
    return out


KNOWN_KEYS = {"q", "N", "c_exp", "alpha_exp", "box", "dm", "c1", "c2", "sigma", "gamma", "l1", "mode",
              "kind", "shift", "m", "t0", "radii", "tol"}


@dataclass
class SessionConfig:
    q: int
    N: int = 1
    c_exp: int = 0
    alpha_exp: int = 0
    boxes: list = field(default_factory=list)  # [(coords, coeff text)]
    dm: str = "macdonald"
    c1: str | None = None
    c2: str | None = None
    sigma: list | None = None
    gamma: list | None = None
    l1: int | None = None
    mode: str = "pieces"
    kind: str = "gl2"
    shift: Fraction = Fraction(0)
    m: int = 2
    t0: list = field(default_factory=lambda: [0.3, 0.5])
    radii: list = field(default_factory=lambda: [10, 20, 40])
    tol: float = 1e-9

    @property
    def params(self) -> PadicParams:
        return PadicParams(self.q, self.N, self.c_exp, self.alpha_exp)

    def schwartz(self, default_dim: int | None = None) -> SchwartzFn | None:
        F = self.params.field
        if not self.boxes:
            return None if default_dim is None else SchwartzFn.lattice_indicator(F, default_dim)
        terms = [BoxTerm(tuple(coords), parse_element(F, coeff, "box coefficient")) for coords, coeff in self.boxes]
        dims = {len(t.coords) for t in terms}
        if len(dims) != 1:
            raise ConfigError("box: records have different dimensions")
        return SchwartzFn(F, dims.pop(), terms)

    def model(self) -> SphericalModel:
        P = self.params
        if self.dm == "macdonald":
            return macdonald_model(P)
        F = P.field
        return explicit_model(P, parse_element(F, self.c1, "c1"), parse_element(F, self.c2, "c2"),
                              degenerate=P.c_squared_is_one)

    def satake(self, which: str) -> list | None:
        vals = getattr(self, which)
        if vals is None:
            return None
        F = self.params.field
        return [parse_element(F, v, which) for v in vals]

    def echo(self) -> dict:
        return {
            "q": self.q, "N": self.N, "c_exp": self.c_exp, "alpha_exp": self.alpha_exp,
            "boxes": [{"coords": [list(c) for c in coords], "coeff": coeff} for coords, coeff in self.boxes],
            "dm": self.dm, "c1": self.c1, "c2": self.c2, "sigma": self.sigma, "gamma": self.gamma,
            "l1": self.l1, "mode": self.mode, "kind": self.kind, "shift": str(self.shift), "m": self.m,
            "t0": self.t0, "radii": self.radii, "tol": self.tol,
        }


def _int(raw: dict, key: str, default=None, lo: int | None = None):
    if key not in raw or raw[key] is None:
        return default
    try:
        v = int(raw[key])
    except (TypeError, ValueError):
        raise ConfigError(f"{key}: expected an integer, got {raw[key]!r}") from None
    if lo is not None and v < lo:
        raise ConfigError(f"{key}: must be >= {lo}, got {v}")
    return v


def _list(raw: dict, key: str) -> list | None:
    if key not in raw or raw[key] is None:
        return None
    v = raw[key]
    if isinstance(v, str):
        v = [x.strip() for x in v.split(",") if x.strip()]
    return list(v)


def build_config(raw: dict) -> SessionConfig:
    """Validate a raw key/value mapping into a :class:`SessionConfig`."""
    unknown = sorted(set(raw) - KNOWN_KEYS)
    if unknown:
        raise ConfigError(f"{unknown[0]}: unknown configuration key")
    q = _int(raw, "q")
    if q is None:
        raise ConfigError("q: required")
    N = _int(raw, "N", 1, lo=1)
    cfg = SessionConfig(q=q, N=N, c_exp=_int(raw, "c_exp", 0), alpha_exp=_int(raw, "alpha_exp", 0))
    try:
        cfg.params.field
    except ValueError as exc:
        raise ConfigError(f"q: {exc}") from None
    cfg.boxes = [parse_box(b) if isinstance(b, str) else b for b in raw.get("box") or []]
    cfg.dm = raw.get("dm") or "macdonald"
    if cfg.dm not in ("macdonald", "explicit"):
        raise ConfigError(f"dm: expected macdonald or explicit, got {cfg.dm!r}")
    cfg.c1, cfg.c2 = raw.get("c1"), raw.get("c2")
    if cfg.dm == "explicit" and (cfg.c1 is None or cfg.c2 is None):
        raise ConfigError("c1: explicit spherical model needs c1 and c2")
    cfg.sigma, cfg.gamma = _list(raw, "sigma"), _list(raw, "gamma")
    for key in ("sigma", "gamma"):
        vals = getattr(cfg, key)
        if vals is not None and len(vals) != 2:
            raise ConfigError(f"{key}: expected two Satake parameters, got {len(vals)}")
    cfg.l1 = _int(raw, "l1", None, lo=0)
    cfg.mode = raw.get("mode") or "pieces"
    if cfg.mode not in ("pieces", "subpieces"):
        raise ConfigError(f"mode: expected pieces or subpieces, got {cfg.mode!r}")
    cfg.kind = raw.get("kind") or "gl2"
    if cfg.kind not in ("gl1", "gl2", "doubled"):
        raise ConfigError(f"kind: expected gl1, gl2 or doubled, got {cfg.kind!r}")
    try:
        cfg.shift = Fraction(raw.get("shift") or 0)
    except (ValueError, ZeroDivisionError):
        raise ConfigError(f"shift: not a rational number: {raw.get('shift')!r}") from None
    if (2 * cfg.shift).denominator != 1:
        raise ConfigError("shift: must be a half-integer")
    cfg.m = _int(raw, "m", 2)
    if cfg.m not in (1, 2):
        raise ConfigError(f"m: expected 1 or 2, got {cfg.m}")
    try:
        if raw.get("t0") is not None:
            cfg.t0 = [float(x) for x in _list(raw, "t0")]
        if raw.get("radii") is not None:
            cfg.radii = [int(x) for x in _list(raw, "radii")]
        if raw.get("tol") is not None:
            cfg.tol = float(raw["tol"])
    except ValueError as exc:
        raise ConfigError(f"numeric options: {exc}") from None
    if any(not 0 < t < 1 for t in cfg.t0):
        raise ConfigError("t0: every sample point must lie in (0, 1)")
    if not cfg.radii or any(r < 1 for r in cfg.radii):
        raise ConfigError("radii: expected positive integers")
    # parse eagerly so errors surface before any computation
    cfg.schwartz()
    if cfg.dm == "explicit":
        cfg.model()
    cfg.satake("sigma")
    cfg.satake("gamma")
    return cfg


# ---------------------------------------------------------------------------
# formatting


def fmt_elem(x: CoeffElement) -> str:
    if not any(x.a[1:]) and not any(x.b):
        return str(Fraction(x.a[0], x.den))
    return repr(x)[1:-1]


def _report(command: str, cfg: SessionConfig, verdict: str, result: dict) -> dict:
    return {"schema": SCHEMA, "command": command, "config": cfg.echo(), "verdict": verdict, "result": result}


def emit_report(report: dict) -> str:
    """Deterministic JSON text (sorted keys, fixed separators)."""
    return json.dumps(report, sort_keys=True, indent=2, default=str) + "\n"


# ---------------------------------------------------------------------------
# commands


def cmd_check_unramified(cfg: SessionConfig, args) -> tuple[int, dict, list[str]]:
    res = check_unramified(cfg.params, cfg.m)
    ok = res["equal"]
    body = {"m": cfg.m, "zeta": res["zeta"].to_json(), "expected": res["expected"].to_json(),
            "identity": "Z(phi_0, s) = L(s + 1/2, pi x gamma_W) / d_m(s)", "equal": ok}
    lines = [f"unramified identity m={cfg.m}: {'pass' if ok else 'fail'}"]
    return (EXIT_PASS if ok else EXIT_FAIL), _report("check-unramified", cfg, "pass" if ok else "fail", body), lines


def cmd_check_lemma(cfg: SessionConfig, args) -> tuple[int, dict, list[str]]:
    phi = cfg.schwartz(default_dim=3)
    rep = verify_lemma(phi, cfg.model(), cfg.params, cfg.mode, cfg.l1)
    body = rep.to_json(with_forms=not args.no_forms)
    lines = [f"piece {p.claim_id}: order {p.order} -> {'pass' if p.verdict else 'fail'}" for p in rep.pieces]
    lines.append(f"negative control fails: {rep.negative_control_fails}")
    for c in rep.subpieces:
        if c.verdict is not None:
            lines.append(f"  {c.claim_id}: order {c.order}, claim ~^{c.sim_level} 0 -> {'pass' if c.verdict else 'fail'}")
    verdict = "pass" if rep.overall else "fail"
    lines.append(f"lemma certificate: {verdict}")
    return (EXIT_PASS if rep.overall else EXIT_FAIL), _report("check-lemma", cfg, verdict, body), lines


def cmd_eval_zeta(cfg: SessionConfig, args) -> tuple[int, dict, list[str]]:
    res = _zeta(cfg)
    body = res.to_json()
    lines = [f"{cfg.kind} zeta: order at t=1 {body['order_at_one']}"]
    return EXIT_PASS, _report("eval-zeta", cfg, "n/a", body), lines


def _zeta(cfg: SessionConfig):
    P = cfg.params
    if cfg.kind == "gl1":
        return zeta_gl1(cfg.schwartz(default_dim=1), P, cfg.shift)
    if cfg.kind == "gl2":
        return zeta_gl2(cfg.schwartz(default_dim=2), cfg.model(), P, cfg.shift)
    return doubled_Iv(cfg.schwartz(default_dim=3), cfg.model(), P, cfg.shift)


def cmd_local_period(cfg: SessionConfig, args) -> tuple[int, dict, list[str]]:
    P = cfg.params
    phi = cfg.schwartz(default_dim=3)
    sigma = cfg.satake("sigma") or unramified_sigma_satake(P)
    gamma = cfg.satake("gamma") or unramified_gamma_satake(P)
    unramified = not cfg.boxes and cfg.sigma is None and cfg.gamma is None and cfg.dm == "macdonald"
    expect = parse_element(P.field, args.expect, "expect") if args.expect else (P.field.one if unramified else None)
    res = local_period_details(phi, cfg.model(), P, sigma, gamma, strict=False)
    body = res.to_json()
    body["expected"] = None if expect is None else expect.to_json()
    if res.value is None:
        lines = [f"local period: {res.error}"]
        return EXIT_FAIL, _report("local-period", cfg, "fail", body), lines
    lines = [f"P_v = {fmt_elem(res.value)}"]
    if expect is None:
        return EXIT_PASS, _report("local-period", cfg, "n/a", body), lines
    ok = res.value == expect
    lines.append(f"expected {fmt_elem(expect)}: {'pass' if ok else 'fail'}")
    return (EXIT_PASS if ok else EXIT_FAIL), _report("local-period", cfg, "pass" if ok else "fail", body), lines


def cmd_constants(cfg: SessionConfig, args) -> tuple[int, dict, list[str]]:
    P = cfg.params
    F = P.field
    if args.all_satake_one:
        sigma = gamma = [F.one, F.one]
    else:
        sigma = cfg.satake("sigma") or unramified_sigma_satake(P)
        gamma = cfg.satake("gamma") or unramified_gamma_satake(P)
    br = const_cv_details(P, sigma, gamma)
    body = {"c_v": br.value.to_json(), "c_v_text": fmt_elem(br.value),
            "factors": {k: v.to_json() for k, v in sorted(br.factors.items())}}
    return EXIT_PASS, _report("constants", cfg, "n/a", body), [f"c_v = {fmt_elem(br.value)}"]


def cmd_truncation_compare(cfg: SessionConfig, args) -> tuple[int, dict, list[str]]:
    res = _zeta(cfg)
    f = res.closed_form
    rows = []
    ok = True
    lines = []
    for t0 in cfg.t0:
        inside = res.convergence.contains_t(cfg.q, t0)
        exact = f.eval(t0)
        errs = [abs(res.summand.partial_sum(R, t0) - exact) for R in cfg.radii]
        passed = (not inside) or errs[-1] <= cfg.tol
        ok = ok and passed
        rows.append({"t0": t0, "inside_region": inside, "exact": [exact.real, exact.imag],
                     "errors": dict(zip(map(str, cfg.radii), errs)), "verdict": "pass" if passed else "fail"})
        lines.append(f"t0={t0}: error at R={cfg.radii[-1]} is {errs[-1]:.3e} -> {'pass' if passed else 'fail'}"
                     + ("" if inside else " (outside convergence region, skipped)"))
    body = {"kind": cfg.kind, "order_at_one": res.to_json()["order_at_one"], "rows": rows, "tol": cfg.tol}
    return (EXIT_PASS if ok else EXIT_FAIL), _report("truncation-compare", cfg, "pass" if ok else "fail", body), lines


COMMANDS = {
    "check-lemma": cmd_check_lemma,
    "check-unramified": cmd_check_unramified,
    "eval-zeta": cmd_eval_zeta,
    "local-period": cmd_local_period,
    "constants": cmd_constants,
    "truncation-compare": cmd_truncation_compare,
}


# ---------------------------------------------------------------------------
# entry point


def make_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="key = value configuration file")
    common.add_argument("--q", type=int)
    common.add_argument("--N", type=int)
    common.add_argument("--c-exp", type=int)
    common.add_argument("--alpha-exp", type=int)
    common.add_argument("--json", action="store_true", help="print the JSON report instead of summary lines")
    common.add_argument("--report", help="also write the JSON report to this path")
    common.add_argument("--timing", action="store_true", help="include wall-clock timing in the report")
    p = argparse.ArgumentParser(prog="localzeta", description="Exact local zeta integrals at split places.")
    sub = p.add_subparsers(dest="command", required=True)
    s = sub.add_parser("check-lemma", parents=[common])
    s.add_argument("--mode", choices=["pieces", "subpieces"])
    s.add_argument("--l1", type=int)
    s.add_argument("--no-forms", action="store_true", help="omit closed forms from the report")
    s = sub.add_parser("check-unramified", parents=[common])
    s.add_argument("--m", type=int)
    for name in ("eval-zeta", "truncation-compare"):
        s = sub.add_parser(name, parents=[common])
        s.add_argument("--kind", choices=["gl1", "gl2", "doubled"])
        s.add_argument("--shift")
        if name == "truncation-compare":
            s.add_argument("--t0", help="comma-separated sample points")
            s.add_argument("--radii", help="comma-separated window radii")
            s.add_argument("--tol", type=float)
    s = sub.add_parser("local-period", parents=[common])
    s.add_argument("--sigma", help="two comma-separated Satake parameters")
    s.add_argument("--gamma", help="two comma-separated Satake parameters")
    s.add_argument("--expect", help="expected value, e.g. 1 or 1/2")
    s = sub.add_parser("constants", parents=[common])
    s.add_argument("--sigma")
    s.add_argument("--gamma")
    s.add_argument("--all-satake-one", action="store_true")
    return p


def run_command(argv: Sequence[str] | None = None, out=None, err=None) -> int:
    out = out or sys.stdout
    err = err or sys.stderr
    parser = make_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_INVALID if exc.code else EXIT_PASS
    try:
        raw: dict = {}
        if args.config:
            try:
                with open(args.config) as fh:
                    raw = read_config_text(fh.read())
            except OSError as exc:
                raise ConfigError(f"config: {exc}") from None
        for key in ("q", "N", "c_exp", "alpha_exp", "mode", "l1", "m", "kind", "shift", "t0", "radii", "tol",
                    "sigma", "gamma"):
            v = getattr(args, key, None)
            if v is not None:
                raw[key] = v
        cfg = build_config(raw)
    except ConfigError as exc:
        print(f"invalid input: {exc}", file=err)
        return EXIT_INVALID
    for flag in ("no_forms", "expect", "all_satake_one"):
        if not hasattr(args, flag):
            setattr(args, flag, None)
    start = time.perf_counter()
    try:
        code, report, lines = COMMANDS[args.command](cfg, args)
    except ConfigError as exc:
        print(f"invalid input: {exc}", file=err)
        return EXIT_INVALID
    except (ValueError, PoleError, DivergentSeries, DivergentRegularization) as exc:
        print(f"invalid input: {exc}", file=err)
        return EXIT_INVALID
    if args.timing:
        report["timing_seconds"] = round(time.perf_counter() - start, 3)
    text = emit_report(report)
    if args.report:
        with open(args.report, "w") as fh:
            fh.write(text)
    if args.json:
        out.write(text)
    else:
        for line in lines:
            print(line, file=out)
    return code


def main() -> None:
    sys.exit(run_command())


if __name__ == "__main__":
    main()

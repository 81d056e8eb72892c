"""Command line front end.

Exit codes: 0 success, 1 malformed input or configuration, 2 resonance,
3 validation failure or violated bound, 4 degenerate majorant, 5 divergence.
"""
from __future__ import annotations

import argparse
import json
import logging
import math
import os
import sys
import tempfile
import time
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import bounds, orbit
from .normalform import NormalFormError, normalize, structure_violations
from .poly import GradedSeries, Polynomial, PolydiskGeometry, from_json_obj, from_text, to_json_obj
from .resonance import EstimateError, Mode, ResonanceError, Spectrum, check_gamma

log = logging.getLogger("lyapnorm")

EXIT_OK, EXIT_INPUT, EXIT_RESONANCE, EXIT_VALIDATION, EXIT_DEGENERATE, EXIT_DIVERGENCE = range(6)


class ConfigError(ValueError):
    pass


@dataclass
class JobConfig:
    input: Path | None
    out: Path
    mode: Mode | None = None
    order: int = 6
    radii: tuple[float, ...] | None = None
    d: float = 0.25
    prune: float = 0.0
    residual_tol: float = 1e-12
    seed: int = 0
    extra: dict = field(default_factory=dict)

    def validate(self) -> None:
        if self.order < 1:
            raise ConfigError("order must be >= 1")
        if not 0 < self.d < 0.5:
            raise ConfigError("d must satisfy 0 < d < 1/2")
        if self.radii is not None and any(not (r > 0 and math.isfinite(r)) for r in self.radii):
            raise ConfigError("radii must be positive")
        if self.prune < 0:
            raise ConfigError("prune tolerance must be non-negative")


# -- I/O -----------------------------------------------------------------------------


def dump_json(obj) -> str:
    return json.dumps(obj, sort_keys=True, indent=1, allow_nan=True) + "\n"


def write_atomic(path: Path, text: str) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def read_model(path: Path, n_hint: int | None = None) -> tuple[Polynomial, dict]:
    """Load a model file: polynomial JSON (with optional ``lambda``/``mode``) or the text format."""
    try:
        raw = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigError(f"{path}: {exc.strerror}") from None
    if path.suffix != ".json" and not raw.lstrip().startswith("{"):
        if n_hint is None:
            raise ConfigError(f"{path}: text models need --n")
        try:
            return from_text(raw, n_hint), {}
        except ValueError as exc:
            raise ConfigError(f"{path}: {exc}") from None
    try:
        obj = json.loads(raw)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path}: line {exc.lineno} column {exc.colno}: {exc.msg}") from None
    if not isinstance(obj, dict):
        raise ConfigError(f"{path}: top level must be an object")
    try:
        H = from_json_obj(obj)
    except (ValueError, TypeError) as exc:
        raise ConfigError(f"{path}: {exc}") from None
    return H, obj


def infer_lambda(H: Polynomial) -> tuple[complex, ...]:
    n = H.n
    lam = []
    for l in range(n):
        e = [0] * n
        e[l] = 1
        lam.append(complex(H.coefficient(e, e)))
    return tuple(lam)


def model_spectrum(H: Polynomial, meta: dict, mode: Mode | None) -> Spectrum:
    try:
        if "lambda" in meta:
            spec = Spectrum.from_json_obj({"lambda": meta["lambda"], "mode": meta.get("mode", "thm1")})
        else:
            spec = Spectrum(infer_lambda(H), Mode.parse(meta.get("mode", "thm1")))
    except (KeyError, TypeError, ValueError) as exc:
        raise ConfigError(f"bad spectrum: {exc}") from None
    if len(spec.lam) != H.n:
        raise ConfigError(f"lambda has {len(spec.lam)} entries, model has n={H.n}")
    if mode is not None:
        spec = Spectrum(spec.lam, mode)
    return spec


def _geometry(cfg: JobConfig, n: int) -> PolydiskGeometry:
    radii = cfg.radii if cfg.radii is not None else (1.0,) * n
    if len(radii) != n:
        raise ConfigError(f"expected {n} radii, got {len(radii)}")
    return PolydiskGeometry(tuple(radii))


def _threads() -> int:
    raw = os.environ.get("LYAPNORM_THREADS")
    if raw is None:
        return 1
    try:
        v = int(raw)
    except ValueError:
        raise ConfigError("LYAPNORM_THREADS must be a positive integer") from None
    if v < 1:
        raise ConfigError("LYAPNORM_THREADS must be a positive integer")
    return v


def _load(cfg: JobConfig):
    if cfg.input is None:
        raise ConfigError("--in is required")
    H, meta = read_model(cfg.input, cfg.extra.get("n"))
    spec = model_spectrum(H, meta, cfg.mode)
    if spec.mode is not Mode.BIRKHOFF:
        spec = spec.with_gamma()
    return GradedSeries.from_polynomial(H), spec


def _print_table(header: list[str], rows: list[list], stream=None) -> None:
    stream = stream or sys.stdout
    cells = [header] + [[c if isinstance(c, str) else f"{c:.6g}" for c in row] for row in rows]
    widths = [max(len(r[i]) for r in cells) for i in range(len(header))]
    for row in cells:
        print("  ".join(c.rjust(w) for c, w in zip(row, widths)), file=stream)


# -- commands ------------------------------------------------------------------------


def cmd_normalize(cfg: JobConfig) -> int:
    cfg.validate()
    H, spec = _load(cfg)
    t0 = time.perf_counter()
    nf = normalize(H, spec, cfg.order, prune=cfg.prune)
    elapsed = time.perf_counter() - t0
    res = nf.state.homological_residuals()
    violations = structure_violations(nf)
    obj = nf.to_json_obj()
    obj["homological_residuals"] = res
    obj["structure_violations"] = violations
    write_atomic(cfg.out / "normalform.json", dump_json(obj))
    _print_table(["r", "|Z_r|_1", "|chi_r|_1", "residual"],
                 [[r, float(np.abs(z.coeffs).sum()), float(np.abs(c.coeffs).sum()), e]
                  for r, (z, c, e) in enumerate(zip(nf.state.Z, nf.state.chi, res), start=1)])
    log.info("normalized to order %d in %.3f s", cfg.order, elapsed)
    failed = [r for r, e in enumerate(res, start=1) if not e <= cfg.residual_tol]
    if failed or violations:
        for msg in violations:
            print(f"structure: {msg}", file=sys.stderr)
        if failed:
            print(f"homological residual above {cfg.residual_tol:g} at r={failed}", file=sys.stderr)
        return EXIT_VALIDATION
    return EXIT_OK


def cmd_certify(cfg: JobConfig) -> int:
    cfg.validate()
    H, spec = _load(cfg)
    if spec.mode is Mode.BIRKHOFF:
        raise ConfigError("certify needs a divisor constant; use thm1 or thm2")
    geom = _geometry(cfg, spec.n)
    nf = normalize(H, spec, cfg.order, prune=cfg.prune)
    ledger = bounds.build_ledger(nf, H, geom, cfg.d, t_path=cfg.extra.get("t_path", "bound"))
    if ledger.degenerate:
        print("degenerate input: no perturbation terms, E is undefined", file=sys.stderr)
        return EXIT_DEGENERATE
    cert = None
    if cfg.order >= 3:
        dseq = bounds.DeltaSequence(cfg.d)
        norms = bounds.chi_norms(nf, geom, cfg.d)
        c = bounds.fit_certificate(norms, dseq, ledger)
        ledger.beta, ledger.G, ledger.rho, ledger.beta_th = c.beta, c.G, c.rho, c.beta_th
        cert = c.to_json_obj()
    write_atomic(cfg.out / "ledger.csv", ledger.to_csv())
    report = {"E": ledger.E, "h": ledger.h, "gamma": ledger.gamma, "Lambda": ledger.Lambda,
              "C": ledger.C, "d": cfg.d, "order": cfg.order, "passed": ledger.passed,
              "certificate": cert, "gamma_empirical": spec.gamma_empirical}
    write_atomic(cfg.out / "certificate.json", dump_json(report))
    _print_table(["r", "actual_chi", "bound_chi", "ratio", "T_path", "pass"],
                 [[row.r, row.actual_chi, row.bound_chi, row.ratio, row.T_path,
                   "pass" if row.passed else "FAIL"] for row in ledger.rows])
    return EXIT_OK if ledger.passed else EXIT_VALIDATION


def _parse_orders(text: str) -> list[int]:
    out = []
    for part in text.split(","):
        part = part.strip()
        if "-" in part:
            a, b = part.split("-", 1)
            out.extend(range(int(a), int(b) + 1))
        elif part:
            out.append(int(part))
    if not out or min(out) < 1:
        raise ConfigError("orders must be positive integers")
    return out


def cmd_orbit(cfg: JobConfig) -> int:
    cfg.validate()
    amp = cfg.extra["amplitude"]
    dt = cfg.extra.get("dt", 1e-3)
    if amp is None or not (amp >= 0 and math.isfinite(amp)):
        raise ConfigError("--amplitude must be a non-negative number")
    if not dt > 0:
        raise ConfigError("--dt must be positive")
    H, spec = _load(cfg)
    orders = _parse_orders(cfg.extra["orders"]) if cfg.extra.get("orders") else [cfg.order]
    rows, last = [], None
    for k in orders:
        nf = normalize(H, spec, k, prune=cfg.prune)
        run = orbit.orbit_residual(H, nf, amp, amp, dt=dt)
        s = run.summary()
        rows.append({"order": k, **s})
        last = run
    drift_ok = all(r["energy_drift"] <= cfg.extra.get("drift_tol", 1e-9) for r in rows)
    write_atomic(cfg.out / "orbit.csv", last.to_csv())
    write_atomic(cfg.out / "orbit.json", dump_json({"amplitude": amp, "dt": dt, "rows": rows,
                                                    "lambda1": [spec.lam[0].real, spec.lam[0].imag]}))
    _print_table(["order", "period", "residual", "energy_drift", "aperiodic"],
                 [[r["order"], r["period"], r["residual"], r["energy_drift"], str(r["aperiodic"])]
                  for r in rows])
    return EXIT_OK if drift_ok else EXIT_VALIDATION


def cmd_verify(cfg: JobConfig) -> int:
    trials = cfg.extra.get("trials", 200)
    if trials < 0:
        raise ConfigError("--trials must be non-negative")
    if cfg.input is not None:
        _, spec = _load(cfg)
    else:
        mode = cfg.mode or Mode.LYAPUNOV
        spec = Spectrum((1j, 1j * math.sqrt(2)), mode)
    if spec.mode is Mode.BIRKHOFF:
        raise ConfigError("verify needs a divisor constant; use thm1 or thm2")
    spec = spec.with_gamma() if spec.gamma is None else spec
    geom = _geometry(cfg, spec.n)
    if trials == 0:
        print("warning: zero trials requested, inequality checks are vacuous", file=sys.stderr)
    rng = np.random.default_rng(cfg.seed)
    deltas = (0.1, 0.25, 0.5)
    violations = 0
    worst = {}
    min_slack = {}
    for i in range(trials):
        rep = bounds.cauchy_trial(rng, spec, geom, deltas[i % len(deltas)])
        violations += not rep.ok
        for key, val in rep.ratio.items():
            worst[key] = max(worst.get(key, 0.0), val)
        for key, val in rep.slack.items():
            min_slack[key] = min(min_slack.get(key, math.inf), val)
    seq = {
        "mu_power_bound": all(bounds.mu(r - 1, r) <= 4 ** (r - 1) for r in range(1, 26)),
        "catalan_closed_form": all(bounds.catalan(r) == bounds.catalan_closed(r) for r in range(1, 21)),
    }
    ok_gamma, gamma_slack = check_gamma(spec, spec.gamma, 200)
    report = {"trials": trials, "seed": cfg.seed, "violations": violations,
              "worst_ratio": worst, "min_slack": {k: v for k, v in min_slack.items()},
              "sequences": seq, "gamma": spec.gamma, "gamma_check": ok_gamma,
              "gamma_min_slack": gamma_slack}
    write_atomic(cfg.out / "verify.json", dump_json(report))
    _print_table(["estimate", "worst_ratio", "min_slack"],
                 [[k, worst[k], min_slack[k]] for k in sorted(worst)])
    ok = violations == 0 and all(seq.values()) and ok_gamma
    return EXIT_OK if ok else EXIT_VALIDATION


def cmd_convert(cfg: JobConfig) -> int:
    if cfg.input is None:
        raise ConfigError("--in is required")
    H, meta = read_model(cfg.input, cfg.extra.get("n"))
    direction = cfg.extra.get("direction", "complex")
    try:
        if direction == "complex":
            out = orbit.to_complex_coordinates(H).to_polynomial()
            doc = to_json_obj(out)
            doc["lambda"] = [[v.real, v.imag] for v in infer_lambda(out)]
            if cfg.mode is not None:
                doc["mode"] = cfg.mode.value
        else:
            doc = to_json_obj(orbit.to_real_coordinates(H).to_polynomial())
    except ValueError as exc:
        raise ConfigError(str(exc)) from None
    target = cfg.out if cfg.out.suffix == ".json" else cfg.out / "model.json"
    write_atomic(target, dump_json(doc))
    print(target)
    return EXIT_OK


COMMANDS = {"normalize": cmd_normalize, "certify": cmd_certify, "orbit": cmd_orbit,
            "verify": cmd_verify, "convert": cmd_convert}


# -- argument parsing ----------------------------------------------------------------


def _radii(text: str) -> tuple[float, ...]:
    try:
        return tuple(float(v) for v in text.split(","))
    except ValueError:
        raise argparse.ArgumentTypeError("radii must be comma-separated numbers") from None


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="lyapnorm", description="Normal forms near an elliptic-type equilibrium.")
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp, order_default=6):
        sp.add_argument("--in", dest="input", type=Path)
        sp.add_argument("--out", type=Path, default=Path("."))
        sp.add_argument("--mode", choices=[m.value for m in Mode])
        sp.add_argument("--order", type=int, default=order_default)
        sp.add_argument("--radii", type=_radii)
        sp.add_argument("--d", type=float, default=0.25)
        sp.add_argument("--prune", type=float, default=0.0)
        sp.add_argument("--residual-tol", type=float, default=1e-12)
        sp.add_argument("--seed", type=int, default=0)
        sp.add_argument("--n", type=int, help="number of degrees of freedom for text-format models")

    common(sub.add_parser("normalize", help="compute the normal form"))
    sp = sub.add_parser("certify", help="compare norms with the recursive bounds")
    common(sp)
    sp.add_argument("--t-path", choices=["bound", "exact", "auto"], default="bound")
    sp = sub.add_parser("orbit", help="validate orbits against direct integration")
    common(sp)
    sp.add_argument("--amplitude", type=float, required=True)
    sp.add_argument("--dt", type=float, default=1e-3)
    sp.add_argument("--orders", help="e.g. 2-6 or 2,4,6")
    sp.add_argument("--drift-tol", type=float, default=1e-9)
    sp = sub.add_parser("verify", help="randomized derivative-estimate suite")
    common(sp)
    sp.add_argument("--trials", type=int, default=200)
    sp = sub.add_parser("convert", help="switch between real oscillator and complex coordinates")
    common(sp)
    sp.add_argument("--direction", choices=["complex", "real"], default="complex")
    return p


def config_from_args(ns: argparse.Namespace) -> JobConfig:
    extra = {k: getattr(ns, k) for k in ("amplitude", "dt", "orders", "trials", "t_path", "n",
                                          "direction", "drift_tol") if hasattr(ns, k)}
    return JobConfig(ns.input, ns.out, Mode.parse(ns.mode) if ns.mode else None, ns.order, ns.radii,
                     ns.d, ns.prune, ns.residual_tol, ns.seed, extra)


def main(argv=None) -> int:
    parser = build_parser()
    try:
        ns = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_INPUT if exc.code else EXIT_OK
    logging.basicConfig(level=logging.INFO if ns.verbose else logging.WARNING,
                        format="%(levelname)s %(message)s")
    try:
        threads = _threads()
        log.info("using %d thread(s); computation is single-threaded", threads)
        cfg = config_from_args(ns)
        return COMMANDS[ns.command](cfg)
    except ResonanceError as exc:
        k = None if exc.k is None else [int(v) for v in exc.k]
        print(f"resonance: {exc} k={k}", file=sys.stderr)
        return EXIT_RESONANCE
    except orbit.DivergenceError as exc:
        print(f"divergence: {exc}", file=sys.stderr)
        return EXIT_DIVERGENCE
    except EstimateError as exc:
        print(f"estimate failure: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except (ConfigError, NormalFormError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())

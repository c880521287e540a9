"""Command-line front end.

    ftgraph --preset fig2_n7 --k-max 20 --k-points 4000 -o fig2_n7.csv
    ftgraph --mode spectrum --n 0 --L 1.5707963 --k-max 10.5
    ftgraph --mode spacings --preset fig3c --levels 2000

Settings come from built-in defaults, then a preset, then a JSON config file
(``--config``), then explicit flags. Exit status: 0 success, 1 usage error,
2 numerical error.
"""
from __future__ import annotations

import argparse
import dataclasses
import io
import json
import logging
import math
import sys
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .errors import ArgumentError, DegeneracyError, FTGraphError, IncompleteSpectrumError
from .model import BOX_RULES, Coupling, DefectArray, fig3_geometry, sqrt_prime_positions
from .scattering import METHODS, amplitude_arrays, enumerate_frequencies
from .spectrum import SpectralProblem, find_spectrum, residual_eq19
from .statistics import compare, transmission_autocorrelation, unfold

log = logging.getLogger("ftgraph")

SCHEMA_VERSION = 1
MODES = ("scan", "spectrum", "spacings", "freqs", "autocorr")
FIG3_ALPHAS = (2.0, 5.0, 27.0)

PRESETS = {
    "fig2_n3": dict(mode="scan", alpha=1.5, phi=0.0, n=3, k_max=20.0, k_points=4000),
    "fig2_n5": dict(mode="scan", alpha=1.5, phi=0.0, n=5, k_max=20.0, k_points=4000),
    "fig2_n7": dict(mode="scan", alpha=1.5, phi=0.0, n=7, k_max=20.0, k_points=4000),
    "fig3a": dict(mode="spacings", alpha=2.0, phi=0.0, n=3, L="fig3"),
    "fig3b": dict(mode="spacings", alpha=2.0, phi=0.0, n=5, L="fig3"),
    "fig3c": dict(mode="spacings", alpha=2.0, phi=0.0, n=7, L="fig3"),
}
# settings a preset pins down; fig3 presets still accept alpha in FIG3_ALPHAS and a box rule
_PINNED = ("alpha", "phi", "n", "positions", "L")


class UsageError(Exception):
    pass


@dataclass
class RunConfig:
    mode: str = "scan"
    alpha: float = 1.5
    phi: float = 0.0
    positions: Optional[list] = None
    n: Optional[int] = None
    L: object = None
    k_min: Optional[float] = None
    k_max: Optional[float] = None
    k_points: int = 2000
    method: str = "transfer"
    levels: Optional[int] = None
    discard_low: int = 50
    max_lag: Optional[float] = None
    output: str = "-"
    seed: int = 0
    preset: Optional[str] = None
    extra: dict = field(default_factory=dict, repr=False)

    def defects(self) -> DefectArray:
        if self.positions is not None:
            return DefectArray(tuple(self.positions))
        if self.n is not None:
            if isinstance(self.L, str):
                return fig3_geometry(self.n, _box_rule(self.L))[0]
            return sqrt_prime_positions(self.n)
        raise ArgumentError("give either positions or n (square-root-prime generator)")

    def half_length(self) -> float:
        if isinstance(self.L, str):
            if self.n is None or self.positions is not None:
                raise ArgumentError("the fig3 box rule needs the generator form (n), not explicit positions")
            return fig3_geometry(self.n, _box_rule(self.L))[1]
        if self.L is None:
            raise ArgumentError("this mode needs a box half-length L")
        return float(self.L)

    def coupling(self) -> Coupling:
        return Coupling(self.alpha, self.phi)


def _box_rule(tag: str) -> str:
    rule = "printed" if tag == "fig3" else tag.removeprefix("fig3-")
    if rule not in BOX_RULES:
        raise ArgumentError(f"L must be a number, 'fig3' or 'fig3-sqrt', got {tag!r}")
    return rule


# -- config validation -----------------------------------------------------

def _is_num(v):
    return isinstance(v, (int, float)) and not isinstance(v, bool) and math.isfinite(v)


def _is_int(v):
    return isinstance(v, int) and not isinstance(v, bool)


_CHECKS = {
    "mode": (lambda v: v in MODES, f"one of {MODES}"),
    "alpha": (_is_num, "a finite number"),
    "phi": (_is_num, "a finite number"),
    "positions": (lambda v: isinstance(v, list) and all(_is_num(x) for x in v), "a list of numbers"),
    "n": (lambda v: _is_int(v) and v >= 0, "a non-negative integer"),
    "L": (lambda v: (_is_num(v) and v > 0) or v in ("fig3", "fig3-sqrt"), "a positive number, 'fig3' or 'fig3-sqrt'"),
    "k_min": (lambda v: _is_num(v) and v > 0, "a positive number"),
    "k_max": (lambda v: _is_num(v) and v > 0, "a positive number"),
    "k_points": (lambda v: _is_int(v) and v >= 2, "an integer >= 2"),
    "method": (lambda v: v in METHODS + ("all",), f"one of {METHODS + ('all',)}"),
    "levels": (lambda v: _is_int(v) and v >= 1, "a positive integer"),
    "discard_low": (lambda v: _is_int(v) and v >= 0, "a non-negative integer"),
    "max_lag": (lambda v: _is_num(v) and v > 0, "a positive number"),
    "output": (lambda v: isinstance(v, str), "a string"),
    "seed": (_is_int, "an integer"),
    "preset": (lambda v: v in PRESETS, f"one of {tuple(PRESETS)}"),
}


def validate_settings(settings: dict, source: str) -> dict:
    for key, value in settings.items():
        if key not in _CHECKS:
            raise UsageError(f"{source}: unknown field {key!r}")
        ok, expected = _CHECKS[key]
        if not ok(value):
            raise UsageError(f"{source}: field {key!r} must be {expected}, got {value!r}")
    return settings


def load_config_file(path: str) -> dict:
    try:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise UsageError(f"cannot read config {path}: {exc}") from None
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise UsageError(f"{path}: line {exc.lineno}, column {exc.colno}: {exc.msg}") from None
    if not isinstance(data, dict):
        raise UsageError(f"{path}: top level must be a JSON object")
    return validate_settings(data, path)


def resolve_config(file_settings: dict, flag_settings: dict) -> RunConfig:
    """Merge preset, file and flags (later wins) and enforce preset pinning."""
    explicit = {**file_settings, **flag_settings}
    preset = explicit.get("preset")
    base = dict(PRESETS[preset]) if preset else {}
    if preset:
        for key in _PINNED:
            if key not in explicit:
                continue
            value = explicit[key]
            if preset.startswith("fig3") and key == "alpha" and float(value) in FIG3_ALPHAS:
                continue
            if preset.startswith("fig3") and key == "L" and value in ("fig3", "fig3-sqrt"):
                continue
            if key in base and value == base[key]:
                continue
            raise UsageError(f"preset {preset} fixes {key!r}; remove it or drop the preset")
    cfg = RunConfig(**{**base, **explicit})
    return cfg


# -- output helpers --------------------------------------------------------

def fmt(x) -> str:
    return format(float(x), ".17g")


def write_csv(out, header, rows, comments=()):
    for line in comments:
        out.write(f"# {line}\n")
    out.write(",".join(header) + "\n")
    for row in rows:
        out.write(",".join(v if isinstance(v, str) else fmt(v) for v in row) + "\n")


def _config_dict(cfg: RunConfig) -> dict:
    d = dataclasses.asdict(cfg)
    d.pop("extra")
    return d


# -- modes -----------------------------------------------------------------

def _k_grid(cfg: RunConfig) -> np.ndarray:
    if cfg.k_max is None:
        raise ArgumentError("this mode needs k_max")
    k_min = cfg.k_min if cfg.k_min is not None else cfg.k_max / cfg.k_points
    if not 0 < k_min < cfg.k_max:
        raise ArgumentError("need 0 < k_min < k_max")
    return np.linspace(k_min, cfg.k_max, cfg.k_points)


def run_scan(cfg: RunConfig, out) -> int:
    c, d, ks = cfg.coupling(), cfg.defects(), _k_grid(cfg)
    if cfg.method == "all":
        results = [amplitude_arrays(c, d, ks, m) for m in METHODS]
        T, R = results[METHODS.index("transfer")][:2]
        disagreement = np.zeros(len(ks))
        for i in range(len(results)):
            for j in range(i + 1, len(results)):
                for x, y in zip(results[i], results[j]):
                    disagreement = np.maximum(disagreement, np.abs(x - y))
        header = ["k", "re_T", "im_T", "re_R", "im_R", "abs_T_sq", "max_disagreement"]
        rows = zip(ks, T.real, T.imag, R.real, R.imag, np.abs(T) ** 2, disagreement)
    else:
        T, R = amplitude_arrays(c, d, ks, cfg.method)[:2]
        header = ["k", "re_T", "im_T", "re_R", "im_R", "abs_T_sq"]
        rows = zip(ks, T.real, T.imag, R.real, R.imag, np.abs(T) ** 2)
    write_csv(out, header, rows)
    return 0


def _problem(cfg: RunConfig) -> SpectralProblem:
    return SpectralProblem(cfg.coupling(), cfg.defects(), cfg.half_length())


def _spectrum_kmax(cfg: RunConfig, p: SpectralProblem, extra_levels: int = 0) -> float:
    if cfg.levels is not None:
        # Weyl staircase stays within N + 2 of 2Lk/pi, so this yields enough levels
        return (cfg.levels + extra_levels + p.n + 3) * p.mean_spacing
    if cfg.k_max is None:
        raise ArgumentError("give k_max or levels")
    return cfg.k_max


def _spectrum_rows(p, spec):
    res19 = np.abs(residual_eq19(p, spec.roots)) if len(spec) else []
    return [(str(i + 1), k, r, q) for i, (k, r, q) in enumerate(zip(spec.roots, spec.residuals, res19))]


def run_spectrum(cfg: RunConfig, out) -> int:
    p = _problem(cfg)
    header = ["n", "k", "residual", "residual_eq19"]
    try:
        spec = find_spectrum(p, _spectrum_kmax(cfg, p))
    except IncompleteSpectrumError as exc:
        warn = [f"WARNING: incomplete spectrum: {exc}", f"suspect windows: {exc.windows}"]
        write_csv(out, header, _spectrum_rows(p, exc.partial), comments=warn)
        raise
    write_csv(out, header, _spectrum_rows(p, spec))
    return 0


def run_spacings(cfg: RunConfig, out) -> int:
    p = _problem(cfg)
    spec = find_spectrum(p, _spectrum_kmax(cfg, p, extra_levels=cfg.discard_low + 1))
    sample = unfold(spec, cfg.discard_low)
    cmp_ = compare(sample)
    doc = {
        "schema_version": SCHEMA_VERSION,
        "mode": "spacings",
        "config": _config_dict(cfg),
        "L": p.L,
        "positions": list(p.defects.positions),
        "n_levels_used": sample.n_levels_used,
        "n_discarded_low": sample.n_discarded_low,
        "k_max": spec.k_max,
        "ks_wigner": cmp_.ks_wigner,
        "ks_poisson": cmp_.ks_poisson,
        "histogram": {"bin_edges": cmp_.bin_edges.tolist(), "densities": cmp_.densities.tolist()},
        "spacings": sample.spacings.tolist(),
    }
    json.dump(doc, out, indent=1)
    out.write("\n")
    return 0


def run_freqs(cfg: RunConfig, out) -> int:
    terms = enumerate_frequencies(cfg.defects())
    beta = cfg.coupling().beta
    rows = []
    for kind, entries in (("D", terms.d_terms), ("B", terms.b_terms)):
        for f, orders in entries:
            coef = sum(beta ** l for l in orders)
            rows.append((kind, f, ";".join(map(str, orders)), coef))
    write_csv(out, ["sum", "frequency", "orders", "coefficient"], rows)
    return 0


def run_autocorr(cfg: RunConfig, out) -> int:
    c, d, ks = cfg.coupling(), cfg.defects(), _k_grid(cfg)
    T = amplitude_arrays(c, d, ks, "transfer" if cfg.method == "all" else cfg.method)[0]
    max_lag = cfg.max_lag if cfg.max_lag is not None else 0.25 * (ks[-1] - ks[0])
    ac = transmission_autocorrelation(ks, np.abs(T) ** 2, max_lag)
    log.info("correlation width (C = 1/2): %s", fmt(ac.width))
    write_csv(out, ["dk", "C"], zip(ac.lags, ac.values), comments=[f"correlation_width={fmt(ac.width)}"])
    return 0


RUNNERS = {
    "scan": run_scan,
    "spectrum": run_spectrum,
    "spacings": run_spacings,
    "freqs": run_freqs,
    "autocorr": run_autocorr,
}


def run(cfg: RunConfig) -> int:
    """Execute one configured run, writing to ``cfg.output`` (``-`` is stdout)."""
    buf = io.StringIO()
    status = 0
    try:
        status = RUNNERS[cfg.mode](cfg, buf)
    finally:
        text = buf.getvalue()
        if text:
            if cfg.output == "-":
                sys.stdout.write(text)
            else:
                with open(cfg.output, "w", encoding="utf-8", newline="\n") as fh:
                    fh.write(text)
    return status


# -- argument parsing ------------------------------------------------------

class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _positions(text: str):
    try:
        return [float(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"positions must be comma-separated numbers, got {text!r}") from None


def _length(text: str):
    if text in ("fig3", "fig3-sqrt"):
        return text
    try:
        return float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"L must be a number, 'fig3' or 'fig3-sqrt', got {text!r}") from None


def build_parser() -> argparse.ArgumentParser:
    ap = _Parser(prog="ftgraph", description="Scale-invariant point defects on a line: scans, spectra, statistics.")
    S = argparse.SUPPRESS
    ap.add_argument("--config", help="JSON file with RunConfig fields")
    ap.add_argument("--preset", choices=sorted(PRESETS), default=S)
    ap.add_argument("--mode", choices=MODES, default=S)
    ap.add_argument("--alpha", type=float, default=S)
    ap.add_argument("--phi", type=float, default=S)
    ap.add_argument("--positions", type=_positions, default=S, help="comma-separated defect positions")
    ap.add_argument("--n", type=int, default=S, help="number of square-root-prime defects")
    ap.add_argument("--L", type=_length, default=S, help="box half-length, 'fig3' or 'fig3-sqrt'")
    ap.add_argument("--k-min", dest="k_min", type=float, default=S)
    ap.add_argument("--k-max", dest="k_max", type=float, default=S)
    ap.add_argument("--k-points", dest="k_points", type=int, default=S)
    ap.add_argument("--method", choices=METHODS + ("all",), default=S)
    ap.add_argument("--levels", type=int, default=S, help="levels wanted (spectrum/spacings)")
    ap.add_argument("--discard-low", dest="discard_low", type=int, default=S)
    ap.add_argument("--max-lag", dest="max_lag", type=float, default=S)
    ap.add_argument("-o", "--output", default=S)
    ap.add_argument("--seed", type=int, default=S)
    ap.add_argument("-v", "--verbose", action="store_true")
    return ap


def main(argv=None) -> int:
    try:
        args = vars(build_parser().parse_args(argv))
        logging.basicConfig(level=logging.DEBUG if args.pop("verbose") else logging.WARNING,
                            format="%(levelname)s %(name)s: %(message)s")
        path = args.pop("config")
        file_settings = load_config_file(path) if path else {}
        flags = validate_settings(args, "command line")
        cfg = resolve_config(file_settings, flags)
        return run(cfg)
    except UsageError as exc:
        print(f"ftgraph: usage error: {exc}", file=sys.stderr)
        return 1
    except IncompleteSpectrumError as exc:
        print(f"ftgraph: numerical error: {exc}", file=sys.stderr)
        return 2
    except DegeneracyError as exc:
        print(f"ftgraph: numerical error: {exc}", file=sys.stderr)
        return 2
    except (ArgumentError, FTGraphError) as exc:
        print(f"ftgraph: usage error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())

"""Command-line driver: parse a run configuration, sweep, write CSV/JSON datasets.

Units in files: frequencies in omega_R, weights in A(Omega), angles in units of pi.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from dataclasses import asdict, dataclass
from pathlib import Path

import numpy as np

from .lattice import BOHR, LatticeConfig
from .sweep import BACKENDS, SpectrumEngine, cells_for, sweep

FORMATS = ("csv", "json")
KERNEL_CHOICES = ("diffraction", "sinc2")

# Figure parameter sets.  Shared: M = N = 7, d0 = 413 nm, a_s = 105 a0,
# omega_r = 10 omega_R, T = 3 ms.
PRESETS = {
    "fig2a": {"v0": "8.1", "theta-pi": "2/7"},
    "fig2b": {"v0": "0.1", "theta-pi": "2/7"},
    "fig2c": {"v0": "8.1", "theta-pi": "6/7"},
    "fig2d": {"v0": "0.1", "theta-pi": "6/7"},
    "fig3a": {"v0": "8.1", "theta-pi": "0:2:71"},
    "fig3b": {"v0": "0.1", "theta-pi": "0:2:71"},
    # scattering length lowered so that U/J ~ 0.1 at V0 = 0.1
    "fig3c": {"v0": "0.1", "theta-pi": "0:2:71", "as-bohr": "10.97"},
    "fig4": {"v0": "0.1:8.1:41", "theta-pi": "6/7"},
    "fig5a": {"v0": "8.1", "theta-pi": "0:2:101"},
    "fig5b": {"v0": "0.1", "theta-pi": "0:2:101"},
    "fig6": {"v0": "0.1:8.1:17", "theta-pi": "0:2:51"},
}

REQUIRED_KEYS = ("v0", "theta-pi")


class ConfigError(ValueError):
    """Malformed or incomplete run configuration."""


@dataclass(frozen=True)
class RunConfig:
    lattice: LatticeConfig
    backend: str = "exact"
    include_j1: bool = True
    theta_grid: tuple = ()          # rad
    v0_grid: tuple = ()             # hbar omega_R
    freq_grid: tuple | None = None  # (min, max, count) in omega_R
    T_detect: float = 3e-3          # s
    output: Path = Path("braggspec-out")
    format: str = "csv"
    preset: str | None = None
    kernel: str = "diffraction"
    workers: int = 1
    periodic: bool = True

    @property
    def backends(self) -> tuple:
        return BACKENDS if self.backend == "all" else (self.backend,)


def _number(text: str, key: str) -> float:
    try:
        if "/" in text:
            num, den = text.split("/")
            return float(num) / float(den)
        return float(text)
    except (ValueError, ZeroDivisionError):
        raise ConfigError(f"{key}: cannot parse {text!r} as a number") from None


def parse_grid(text: str, key: str) -> tuple:
    """'a,b,c' list, 'start:stop:count' linspace, or single value; fractions allowed."""
    text = str(text).strip()
    if ":" in text:
        parts = text.split(":")
        if len(parts) != 3:
            raise ConfigError(f"{key}: range must be start:stop:count, got {text!r}")
        lo, hi = _number(parts[0], key), _number(parts[1], key)
        count = int(_number(parts[2], key))
        if count < 1:
            raise ConfigError(f"{key}: empty range")
        return tuple(float(v) for v in np.linspace(lo, hi, count))
    values = tuple(_number(v.strip(), key) for v in text.split(",") if v.strip())
    if not values:
        raise ConfigError(f"{key}: empty grid")
    return values


def _bool(text, key):
    if isinstance(text, bool):
        return text
    value = str(text).strip().lower()
    if value in ("1", "true", "yes", "on"):
        return True
    if value in ("0", "false", "no", "off"):
        return False
    raise ConfigError(f"{key}: expected a boolean, got {text!r}")


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="braggspec",
        description="Photon Bragg-scattering spectra of bosons in a 1D optical lattice.")
    p.add_argument("--config", help="flat 'key = value' file using the long flag names")
    p.add_argument("--preset", choices=sorted(PRESETS))
    p.add_argument("--v0", help="lattice depth(s) in hbar*omega_R: x, a,b,c or start:stop:count")
    p.add_argument("--theta-pi", help="Bragg angle(s) q_x d0 in units of pi, same grid syntax")
    p.add_argument("--sites", help="number of lattice sites M")
    p.add_argument("--atoms", help="number of atoms N")
    p.add_argument("--d0-nm", help="lattice constant in nm")
    p.add_argument("--as-bohr", help="s-wave scattering length in Bohr radii")
    p.add_argument("--omega-r", help="transverse trap frequency in units of omega_R")
    p.add_argument("--backend", help=f"one of {', '.join(BACKENDS + ('all',))}")
    p.add_argument("--no-light-hopping", action="store_const", const="true",
                   help="drop the J1 term of the scattering operator")
    p.add_argument("--open-chain", action="store_const", const="true",
                   help="open boundaries for the exact backend (default: ring)")
    p.add_argument("--t-detect-ms", help="detection time in ms")
    p.add_argument("--freq-min", help="grid start (omega_R)")
    p.add_argument("--freq-max", help="grid end (omega_R)")
    p.add_argument("--freq-count", help="grid points")
    p.add_argument("--kernel", help="lineshape: diffraction (default) or sinc2")
    p.add_argument("--workers", help="threads for the sweep")
    p.add_argument("--out", help="output directory")
    p.add_argument("--format", help="csv or json")
    return p


KNOWN_KEYS = {a.dest.replace("_", "-") for a in build_parser()._actions
              if a.dest not in ("help", "config", "preset")} | {"preset"}


def read_config_file(path) -> dict:
    values = {}
    for lineno, raw in enumerate(Path(path).read_text().splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"{path}:{lineno}: expected 'key = value'")
        key, value = (s.strip() for s in line.split("=", 1))
        key = key.lstrip("-").replace("_", "-")
        if key not in KNOWN_KEYS:
            raise ConfigError(f"{path}:{lineno}: unknown key {key!r}")
        values[key] = value
    return values


def parse_config(argv=None) -> RunConfig:
    """Resolve preset < config file < command-line flags into a RunConfig."""
    args = build_parser().parse_args(argv)
    flags = {k.replace("_", "-"): v for k, v in vars(args).items()
             if v is not None and k != "config"}
    file_values = read_config_file(args.config) if args.config else {}
    preset = flags.get("preset") or file_values.get("preset")
    values = {}
    if preset:
        if preset not in PRESETS:
            raise ConfigError(f"preset: unknown preset {preset!r}")
        values.update(PRESETS[preset])
    values.update(file_values)
    values.update(flags)

    missing = [k for k in REQUIRED_KEYS if k not in values]
    if missing:
        raise ConfigError("missing required keys: " + ", ".join("--" + k for k in missing)
                          + " (or choose --preset)")

    lattice = LatticeConfig(
        V0=0.0,
        d0=_number(values.get("d0-nm", "413"), "d0-nm") * 1e-9,
        a_s=_number(values.get("as-bohr", "105"), "as-bohr") * BOHR,
        omega_r=_number(values.get("omega-r", "10"), "omega-r"),
        M=int(_number(values.get("sites", "7"), "sites")),
        N=int(_number(values.get("atoms", "7"), "atoms")),
    )
    backend = values.get("backend", "exact")
    if backend not in BACKENDS + ("all",):
        raise ConfigError(f"backend: unknown backend {backend!r}")
    fmt = values.get("format", "csv")
    if fmt not in FORMATS:
        raise ConfigError(f"format: expected csv or json, got {fmt!r}")
    kernel = values.get("kernel", "diffraction")
    if kernel not in KERNEL_CHOICES:
        raise ConfigError(f"kernel: expected diffraction or sinc2, got {kernel!r}")

    v0_grid = parse_grid(values["v0"], "v0")
    if min(v0_grid) < 0:
        raise ConfigError("v0: lattice depth must be non-negative")
    theta_grid = tuple(np.pi * t for t in parse_grid(values["theta-pi"], "theta-pi"))

    freq_keys = [k for k in ("freq-min", "freq-max", "freq-count") if k in values]
    freq_grid = None
    if freq_keys:
        if len(freq_keys) != 3:
            raise ConfigError("freq-min, freq-max and freq-count must be given together")
        freq_grid = (_number(values["freq-min"], "freq-min"), _number(values["freq-max"], "freq-max"),
                     int(_number(values["freq-count"], "freq-count")))
        if freq_grid[1] <= freq_grid[0] or freq_grid[2] < 2:
            raise ConfigError("frequency grid must have freq-max > freq-min and at least 2 points")

    T_ms = _number(values.get("t-detect-ms", "3"), "t-detect-ms")
    if T_ms <= 0:
        raise ConfigError("t-detect-ms: must be positive")
    return RunConfig(
        lattice=lattice, backend=backend,
        include_j1=not _bool(values.get("no-light-hopping", False), "no-light-hopping"),
        theta_grid=theta_grid, v0_grid=v0_grid, freq_grid=freq_grid, T_detect=T_ms * 1e-3,
        output=Path(values.get("out", "braggspec-out")), format=fmt, preset=preset,
        kernel=kernel, workers=int(_number(values.get("workers", "1"), "workers")),
        periodic=not _bool(values.get("open-chain", False), "open-chain"))


def _fmt(x: float) -> str:
    return repr(float(x))


def cell_stem(cell) -> str:
    stem = f"{cell.backend}_V0-{cell.V0:.4f}_theta-{cell.theta / np.pi:.4f}pi"
    return stem if cell.include_j1 else stem + "_noJ1"


def spectrum_payload(result) -> dict:
    spec = result.spectrum
    return {
        "lines": [{"omega_over_omegaR": float(l.omega), "weight_per_A": float(l.weight),
                   "label": l.label} for l in spec.lines],
        "elastic": float(spec.elastic),
        "grid": [float(v) for v in spec.grid],
        "broadened": [float(v) for v in spec.broadened],
        "elastic_broadened": [float(v) for v in spec.elastic_curve],
        "manifest": {"backend": spec.backend, "kernel": spec.kernel, "units": spec.units_note,
                     "T_times_omegaR": spec.T_reduced, "notes": list(result.notes),
                     **{k: v for k, v in spec.meta.items()}},
    }


def spectrum_csv(spec) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["omega_over_omegaR", "sigma_per_A", "component", "backend"])
    for component, curve in (("elastic", spec.elastic_curve), ("stokes", spec.broadened)):
        for x, y in zip(spec.grid, curve):
            w.writerow([_fmt(x), _fmt(y), component, spec.backend])
    return buf.getvalue()


def _dump_json(obj) -> str:
    return json.dumps(obj, indent=1, sort_keys=True, ensure_ascii=False) + "\n"


def resolved_parameters(engine: SpectrumEngine, v0_grid) -> list:
    rows = []
    for V0 in v0_grid:
        sol = engine.lattice(V0)
        p, cfg = sol.params, sol.config
        rows.append({"V0": V0, "J": p.J, "U": p.U, "U_over_J": p.u_over_j, "mu": p.mu,
                     "g": str(p.g), "xi_r_m": cfg.xi_r, "omega_R_rad_s": cfg.recoil_omega,
                     "T_times_omegaR": engine.T_detect * cfg.recoil_omega})
    return rows


def run(config: RunConfig) -> int:
    """Evaluate every (backend, V0, theta) cell and write datasets plus manifest.json."""
    out = Path(config.output)
    out.mkdir(parents=True, exist_ok=True)
    engine = SpectrumEngine(config.lattice, config.T_detect, config.freq_grid, config.kernel,
                            periodic=config.periodic)
    cells = cells_for(config.v0_grid, config.theta_grid, config.backends, config.include_j1)
    results = sweep(cells, config.lattice, engine=engine, workers=config.workers)

    files, intensity, annotations = [], [], []
    for res in results:
        cell = res.cell
        stem = cell_stem(cell)
        for note in res.notes:
            annotations.append({"cell": stem, "note": note})
        if res.spectrum is None:
            continue
        payload = spectrum_payload(res)
        if config.format == "json":
            (out / f"{stem}.json").write_text(_dump_json(payload), encoding="utf-8")
            files.append(f"{stem}.json")
        else:
            (out / f"{stem}.csv").write_text(spectrum_csv(res.spectrum), encoding="utf-8")
            (out / f"{stem}.lines.json").write_text(
                _dump_json({"lines": payload["lines"], "elastic": payload["elastic"]}),
                encoding="utf-8")
            files += [f"{stem}.csv", f"{stem}.lines.json"]
        spec = res.spectrum
        intensity.append({"backend": cell.backend, "V0": cell.V0,
                          "theta_over_pi": cell.theta / np.pi, "include_j1": cell.include_j1,
                          "elastic": spec.elastic, "stokes": spec.stokes_weight,
                          "total": spec.total_weight})

    if config.format == "json":
        (out / "intensity.json").write_text(_dump_json(intensity), encoding="utf-8")
        files.append("intensity.json")
    else:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        keys = ["backend", "V0", "theta_over_pi", "include_j1", "elastic", "stokes", "total"]
        w.writerow(keys)
        for row in intensity:
            w.writerow([_fmt(row[k]) if isinstance(row[k], float) else row[k] for k in keys])
        (out / "intensity.csv").write_text(buf.getvalue(), encoding="utf-8")
        files.append("intensity.csv")

    lattice = asdict(config.lattice)
    lattice.pop("V0")
    manifest = {
        "preset": config.preset, "backend": config.backend, "include_j1": config.include_j1,
        "lattice": lattice, "T_detect_s": config.T_detect, "kernel": config.kernel,
        "boundary": "periodic" if config.periodic else "open",
        "theta_over_pi": [t / np.pi for t in config.theta_grid], "v0_grid": list(config.v0_grid),
        "freq_grid": list(config.freq_grid) if config.freq_grid else None,
        "resolved": resolved_parameters(engine, config.v0_grid),
        "files": files, "annotations": annotations,
        "units": {"frequency": "omega_R", "weight": "A(Omega)", "angle": "pi"},
    }
    (out / "manifest.json").write_text(_dump_json(manifest), encoding="utf-8")
    return 0


def main(argv=None) -> int:
    try:
        config = parse_config(argv)
    except ConfigError as exc:
        print(f"braggspec: error: {exc}", file=sys.stderr)
        return 2
    return run(config)


if __name__ == "__main__":
    sys.exit(main())

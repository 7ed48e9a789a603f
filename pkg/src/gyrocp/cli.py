"""Command-line front end: parameter sweeps written as CSV.

Subcommands
-----------
force     resonant, Casimir and total forces along a sweep
si        the same rows converted to newtons and 1/s
spp       exact surface-plasmon dispersion next to the quasi-static resonance
fieldmap  dipole field sampled on an (x, z) grid

Output is RFC-4180 CSV preceded by ``#`` metadata lines (format version
and the full resolved configuration), or a JSON document carrying the
same metadata, columns and rows with ``--format json``.  Failed points keep their row with
empty numeric fields and the exception name in the ``error`` column.
Exit status: 0 on success, 2 for configuration errors, 3 when every
point failed.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from concurrent.futures import ProcessPoolExecutor

import numpy as np

from . import __version__
from .config import ScenarioConfig, dump_config, load_config, load_preset, parse_lines, preset_names
from .errors import ConfigError, GyroError, MissingSIFields
from .force import compute_forces, total_force
from .greens import field_map
from .qs_force import qs_lateral_force, qs_normal_components
from .spp import omega_theta, solve_spp_dispersion
from .units import debye_to_cm, f0_si, length_unit, rate_unit

CSV_FORMAT = 1

FORCE_COLUMNS = ["sweep_value", "path", "Fx", "Fy", "Fz_res", "Fz_cas", "F_total_t0",
                 "Fz_total_t", "decay_rate", "rel_diff", "error"]
SI_COLUMNS = FORCE_COLUMNS[:-1] + ["F0_N", "Fx_N", "Fy_N", "Fz_res_N", "Fz_cas_N",
                                   "F_total_t0_N", "Fz_total_t_N", "decay_rate_per_s", "error"]
SPP_COLUMNS = ["theta", "k_par", "omega_spp", "omega_theta_qs", "error"]
FIELD_COLUMNS = ["x", "z", "re_Ex", "im_Ex", "re_Ey", "im_Ey", "re_Ez", "im_Ez", "error"]

EXIT_OK, EXIT_CONFIG, EXIT_NUMERIC = 0, 2, 3


def _fmt(v):
    if v is None:
        return ""
    if isinstance(v, str):
        return v
    v = float(v)
    if not np.isfinite(v):
        return ""
    return format(v + 0.0, ".12g")


# ---------------------------------------------------------------- force rows

def _exact_row(cfg: ScenarioConfig, t, rate):
    mat, atom, geom = cfg.material(), cfg.atom(), cfg.geometry()
    fr = compute_forces(mat, atom, geom, cfg.quad_spec(), cfg.casimir_spec())
    rho = atom.rho_ee0
    return {"Fx": rho * fr.f_res[0], "Fy": rho * fr.f_res[1], "Fz_res": fr.f_res[2],
            "Fz_cas": fr.f_cas[2], "F_total_t0": total_force(fr)[2],
            "Fz_total_t": total_force(fr, t, rate)[2], "decay_rate": fr.decay}


def _qs_row(cfg: ScenarioConfig, t, rate):
    mat, atom = cfg.material(), cfg.atom()
    rho = atom.rho_ee0
    lat = qs_lateral_force(mat, atom)
    f_res, f_cas = qs_normal_components(mat, atom)
    row = {"Fx": lat[0], "Fy": lat[1], "Fz_res": f_res, "Fz_cas": f_cas,
           "F_total_t0": rho * f_res + (1 - 2 * rho) * f_cas, "decay_rate": None}
    # the quasi-static path has no decay rate of its own
    if t == 0 or rate is not None:
        rho_t = rho * np.exp(-(rate or 0.0) * t)
        row["Fz_total_t"] = rho_t * f_res + (1 - 2 * rho_t) * f_cas
    return row


_COMPARE = ("Fx", "Fy", "Fz_res", "Fz_cas")


def force_point(cfg: ScenarioConfig, value, path="exact", t=0.0, rate=None):
    """Rows (dicts) for one sweep value; one per requested path.

    ``t`` and ``rate`` set the time of the Fz_total_t column; the decay
    rate of the exact path is used unless ``rate`` overrides it.
    """
    c = cfg.at(value)
    rows = []
    for name, fn in (("exact", _exact_row), ("qs", _qs_row)):
        if path not in (name, "both"):
            continue
        row = {"sweep_value": None if np.isnan(value) else value, "path": name, "error": ""}
        try:
            row.update(fn(c, t, rate))
        except GyroError as exc:
            row["error"] = type(exc).__name__
        rows.append(row)
    if len(rows) == 2 and not rows[0]["error"] and not rows[1]["error"]:
        ex = np.array([rows[0][k] for k in _COMPARE])
        qs = np.array([rows[1][k] for k in _COMPARE])
        scale = np.max(np.abs(ex))
        if scale > 0:
            rows[1]["rel_diff"] = float(np.max(np.abs(qs - ex)) / scale)
    return rows


def _si_extend(cfg: ScenarioConfig, rows):
    wp = cfg.omega_p_si
    d_m = cfg.geometry_d() * length_unit(wp)
    f0 = f0_si(debye_to_cm(cfg.dipole_si_debye), d_m)
    for r in rows:
        r["F0_N"] = f0
        for k in ("Fx", "Fy", "Fz_res", "Fz_cas", "F_total_t0", "Fz_total_t"):
            r[k + "_N"] = None if r.get(k) is None else r[k] * f0
        rate = r.get("decay_rate")
        r["decay_rate_per_s"] = None if rate is None else rate * rate_unit(wp)
    return rows


def si_point(cfg: ScenarioConfig, value, path="exact", t=0.0, rate=None):
    return _si_extend(cfg.at(value), force_point(cfg, value, path, t, rate))


# ------------------------------------------------------------------ spp rows

def spp_block(cfg: ScenarioConfig, theta):
    mat = cfg.material().lossless()
    ks = cfg.spp_k_grid()
    qs = float(omega_theta(mat, theta))
    try:
        ws = solve_spp_dispersion(mat, theta, ks)
        err = ["" if np.isfinite(w) else "BranchLost" for w in ws]
    except GyroError as exc:
        ws = np.full(ks.shape, np.nan)
        err = [type(exc).__name__] * ks.size
    return [{"theta": theta, "k_par": k, "omega_spp": w, "omega_theta_qs": qs, "error": e}
            for k, w, e in zip(ks, ws, err)]


# ------------------------------------------------------------- fieldmap rows

def field_rows(cfg: ScenarioConfig, z):
    xs = np.linspace(cfg.fieldmap_x_min, cfg.fieldmap_x_max, cfg.fieldmap_nx)
    pts = np.column_stack([xs, np.zeros_like(xs), np.full_like(xs, z)])
    rows = [{"x": x, "z": z, "error": ""} for x in xs]
    try:
        E = field_map(cfg.material(), cfg.fieldmap_omega, cfg.geometry(), cfg.gamma_vec(), pts,
                      part=cfg.fieldmap_part, spec=cfg.quad_spec())
    except GyroError as exc:
        for r in rows:
            r["error"] = type(exc).__name__
        return rows
    for r, e in zip(rows, E):
        for name, c in zip("xyz", e):
            r[f"re_E{name}"] = c.real
            r[f"im_E{name}"] = c.imag
    return rows


# ------------------------------------------------------------------- driver

def _run(fn, cfg, items, workers, extra=()):
    if workers <= 1 or len(items) <= 1:
        return [fn(cfg, it, *extra) for it in items]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        futs = [pool.submit(fn, cfg, it, *extra) for it in items]
        return [f.result() for f in futs]


def write_csv(out, command, cfg: ScenarioConfig, columns, rows):
    out.write(f"# gyrocp {command} csv-format {CSV_FORMAT} version {__version__}\n")
    out.write(f"# source: {cfg.source}\n")
    for line in dump_config(cfg):
        out.write(f"# {line}\n")
    w = csv.writer(out, lineterminator="\n")
    w.writerow(columns)
    for r in rows:
        w.writerow([_fmt(r.get(c)) for c in columns])


def _json_value(v):
    if v is None or isinstance(v, str):
        return v if v != "" else None
    v = float(v)
    return v + 0.0 if np.isfinite(v) else None


def write_json(out, command, cfg: ScenarioConfig, columns, rows):
    doc = {"tool": "gyrocp", "command": command, "format_version": CSV_FORMAT,
           "version": __version__, "source": cfg.source, "config": dump_config(cfg),
           "columns": columns,
           "rows": [[_json_value(r.get(c)) for c in columns] for r in rows]}
    json.dump(doc, out, indent=1)
    out.write("\n")


def execute(command, cfg: ScenarioConfig, path="exact", workers=1, t=0.0, rate=None):
    """Compute the rows for ``command``; returns (columns, rows)."""
    cfg.validate()
    if command in ("force", "si"):
        if command == "si" and not cfg.has_si():
            raise MissingSIFields("the si command needs material.omega_p_si and atom.dipole_si_debye")
        fn = si_point if command == "si" else force_point
        blocks = _run(fn, cfg, list(cfg.sweep_values()), workers, (path, t, rate))
        return (SI_COLUMNS if command == "si" else FORCE_COLUMNS), [r for b in blocks for r in b]
    if command == "spp":
        blocks = _run(spp_block, cfg, list(cfg.spp_thetas), workers)
        return SPP_COLUMNS, [r for b in blocks for r in b]
    if command == "fieldmap":
        zs = np.linspace(cfg.fieldmap_z_min, cfg.fieldmap_z_max, cfg.fieldmap_nz)
        blocks = _run(field_rows, cfg, list(zs), workers)
        return FIELD_COLUMNS, [r for b in blocks for r in b]
    raise ConfigError(f"unknown command {command!r}")


def build_parser():
    p = argparse.ArgumentParser(prog="gyrocp", description=__doc__.split("\n\n")[0])
    p.add_argument("--version", action="version", version=f"gyrocp {__version__}")
    sub = p.add_subparsers(dest="command", required=True)
    for name, text in (("force", "forces along a sweep"), ("si", "forces in SI units"),
                       ("spp", "surface-plasmon dispersion"), ("fieldmap", "field on an x-z grid")):
        s = sub.add_parser(name, help=text)
        s.add_argument("--config", metavar="PATH", help="key = value scenario file")
        s.add_argument("--preset", choices=preset_names(), help="start from a shipped scenario")
        s.add_argument("--set", action="append", default=[], metavar="KEY=VALUE",
                       help="override one setting (repeatable)")
        s.add_argument("--path", choices=("exact", "qs", "both"), default="exact",
                       help="force model (force and si only)")
        s.add_argument("--out", metavar="PATH", help="output file (default stdout)")
        s.add_argument("--format", choices=("csv", "json"), default="csv", help="output format")
        s.add_argument("--workers", type=int, default=1, help="parallel worker processes")
        s.add_argument("--tol", type=float, metavar="REL", help="relative tolerance of the spectral integrals")
        s.add_argument("--time", type=float, default=0.0, metavar="T",
                       help="time (1/omega_p units) of the Fz_total_t column")
        s.add_argument("--rate", type=float, metavar="R",
                       help="decay rate used for rho(t) instead of the computed one")
    return p


def _resolve_config(args) -> ScenarioConfig:
    if args.config and args.preset:
        raise ConfigError("give either --config or --preset, not both")
    if args.config:
        cfg = load_config(args.config)
    elif args.preset:
        cfg = load_preset(args.preset)
    else:
        cfg = ScenarioConfig()
    if args.set:
        src = cfg.source
        cfg = parse_lines(args.set, base=cfg, source="--set")
        cfg.source = f"{src} with overrides"
    if args.tol is not None:
        cfg.rel_tol = args.tol
    return cfg


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = _resolve_config(args)
        columns, rows = execute(args.command, cfg, args.path, max(1, args.workers), args.time, args.rate)
    except ConfigError as exc:
        print(f"gyrocp: configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    buf = io.StringIO()
    writer = write_json if args.format == "json" else write_csv
    writer(buf, args.command, cfg, columns, rows)
    if args.out:
        with open(args.out, "w", encoding="utf-8", newline="") as fh:
            fh.write(buf.getvalue())
    else:
        sys.stdout.write(buf.getvalue())
    failed = sum(1 for r in rows if r.get("error"))
    if failed:
        print(f"gyrocp: {failed} of {len(rows)} points failed", file=sys.stderr)
    if rows and failed == len(rows):
        return EXIT_NUMERIC
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())

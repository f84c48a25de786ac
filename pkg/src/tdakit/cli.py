"""Command-line entry point: ``tdakit <subcommand> ...``.

Every run writes its outputs plus ``<output>.meta.json`` holding the fully
resolved configuration (defaults included) and the package version.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from . import __version__
from .dynsys import DEFAULT_PARAMS, PRESETS, SYSTEMS, FlowSpec, generate, generate_flow
from .embedding import (
    DEFAULT_EMBED_DIM, DEFAULT_SUBSAMPLE, optimal_delay, pca_fit, pca_transform, rossler_delay_series,
)
from .errors import DataError, TdaError, ValidationError
from .filtration import DEFAULT_MAX_DIM, ENCLOSING
from .fractal import (
    DEFAULT_ALPHA, DEFAULT_N_SIZES, DEFAULT_TRIALS, FlowSampler, HenonSampler,
    estimate_dimension, geometric_sizes, uniform_cube_sampler,
)
from .geometry import read_point_cloud_csv, write_point_cloud_csv
from .metrics import DEFAULT_DIMS, DEFAULT_P, write_scaled_csv, wasserstein
from .persistence import persistent_diagram, read_diagram_csv, vr_persistence, write_diagram_csv
from .shm import (
    SHM_DIMS, SHM_P, THREADS_ENV, PartitionConfig, default_threads, analyze_partitions, partition_records,
    partition_size_sweep, read_records_csv, split_partition, synthetic_records, write_sweep_csv,
)

SAMPLERS = ("henon", "lorenz", "rossler", "cube2", "cube3")


# ------------------------------------------------------------ arg helpers

def _int_list(s: str) -> list[int]:
    out = []
    for part in s.split(","):
        part = part.strip()
        if ":" in part:
            a, b = part.split(":")
            out.extend(range(int(a), int(b) + 1))
        elif part:
            out.append(int(part))
    return out


def _float_list(s: str) -> list[float]:
    return [float(x) for x in s.split(",") if x.strip()]


def _params(s: str) -> dict:
    out = {}
    for part in s.split(","):
        if part.strip():
            k, _, v = part.partition("=")
            out[k.strip()] = float(v)
    return out


def _max_scale(s: str):
    return s if s in (ENCLOSING, "inf", "unbounded") else float(s)


def _input(path) -> Path:
    p = Path(path)
    if not p.is_file():
        raise DataError(f"input file not found: {p}")
    return p


def _output(path) -> Path:
    p = Path(path)
    if p.parent and not p.parent.exists():
        raise ValidationError(f"output directory does not exist: {p.parent}")
    return p


def _write_meta(out: Path, args, extra=None) -> None:
    cfg = {k: v for k, v in vars(args).items() if k != "func"}
    meta = {"tdakit_version": __version__, "config": cfg}
    if extra:
        meta.update(extra)
    Path(str(out) + ".meta.json").write_text(json.dumps(meta, indent=1, sort_keys=True, default=str) + "\n")


def _json_out(obj, dest: Path | None) -> None:
    text = json.dumps(obj, indent=1, default=str) + "\n"
    if dest is None:
        sys.stdout.write(text)
    else:
        dest.write_text(text)


# ------------------------------------------------------------ commands

def cmd_generate(args) -> int:
    out = _output(args.output)
    kw = dict(PRESETS[args.preset]) if args.preset else {}
    system = args.system or kw.pop("system", None)
    kw.pop("system", None)
    if system is None:
        raise ValidationError("give --system or --preset")
    if system not in SYSTEMS:
        raise ValidationError(f"unknown system {system!r}; valid systems: {', '.join(SYSTEMS)}")
    for name in ("count", "stride", "dt"):
        if getattr(args, name) is not None:
            kw[name] = getattr(args, name)
    if args.transient is not None:
        kw["transient_steps"] = args.transient
    if args.params:
        kw["params"] = _params(args.params)
    if args.initial:
        kw["initial"] = tuple(_float_list(args.initial))
    count = kw.pop("count", 1000 if system != "henon" else 2000)
    cloud = generate(system, count, **kw)
    header = ["x", "y"] if cloud.dim == 2 else ["x", "y", "z"]
    write_point_cloud_csv(cloud, out, header=header)
    _write_meta(out, args, {"resolved": {"system": system, "count": count, **{k: v for k, v in kw.items()}},
                            "default_params": DEFAULT_PARAMS[system]})
    return 0


def cmd_persist(args) -> int:
    out = _output(args.output)
    cloud = read_point_cloud_csv(_input(args.input))
    scale = _max_scale(args.max_scale)
    if args.reduced:
        d = persistent_diagram(cloud, max_dim=args.max_dim, max_scale=scale)
    else:
        d = vr_persistence(cloud, max_dim=args.max_dim, max_scale=scale)
    write_diagram_csv(d, out)
    _write_meta(out, args)
    return 0


def cmd_distance(args) -> int:
    a = read_diagram_csv(_input(args.first))
    b = read_diagram_csv(_input(args.second))
    dims = _int_list(args.dims)
    res = wasserstein(a, b, args.p, dims)
    obj = {
        "distance": res.cost,
        "p": res.p,
        "dims": dims,
        "matching": [{"dim": k, "a": x, "b": y} for k, x, y in res.pairs],
    }
    dest = _output(args.output) if args.output else None
    _json_out(obj, dest)
    if dest is not None:
        _write_meta(dest, args)
    return 0


def _sampler(name: str, args):
    if name == "henon":
        return HenonSampler()
    if name in ("lorenz", "rossler"):
        return FlowSampler(name, length=max(args.sizes_resolved), stride=args.flow_stride)
    return uniform_cube_sampler(int(name[-1]))


def cmd_fractal(args) -> int:
    out = _output(args.output)
    if args.sizes:
        sizes = _int_list(args.sizes)
    else:
        sizes = geometric_sizes(args.n_max, args.n_sizes)
    args.sizes_resolved = sizes
    est = estimate_dimension(_sampler(args.sampler, args), sizes, args.alpha, args.hom_dim, args.trials, args.seed)
    obj = dict(est.summary())
    obj["beta_stderr"] = est.beta_stderr
    obj["hom_dim"] = est.hom_dim
    obj["fit"] = [{"n": n, "log_n": ln, "log_E": le} for n, ln, le in est.fit_rows()]
    _json_out(obj, out)
    _write_meta(out, args)
    return 0


def _reference_and_series(args):
    if args.reference:
        ref = read_diagram_csv(_input(args.reference))
    else:
        cfg = PRESETS["rossler-topology"]
        ref = persistent_diagram(generate_flow(FlowSpec("rossler", stride=cfg["stride"], count=cfg["count"])))
    if args.input:
        cloud = read_point_cloud_csv(_input(args.input))
        if not 0 <= args.column < cloud.dim:
            raise ValidationError(f"column {args.column} out of range for a {cloud.dim}-column file")
        series = cloud.points[:, args.column]
    else:
        series = rossler_delay_series(max(_int_list(args.delays)), args.dim)
    return ref, series


def cmd_delayopt(args) -> int:
    out = _output(args.output)
    ref, series = _reference_and_series(args)
    res = optimal_delay(series, args.dim, _int_list(args.delays), ref, args.p, _int_list(args.dims), args.subsample)
    res.write_csv(out)
    json_path = Path(str(out) + ".json") if not args.json else _output(args.json)
    res.write_json(json_path)
    _write_meta(out, args, {"first_peak": res.first_peak, "optimal": res.optimal})
    return 0


def cmd_pca(args) -> int:
    out = _output(args.output)
    cloud = read_point_cloud_csv(_input(args.input))
    proj = pca_fit(cloud, args.k)
    write_point_cloud_csv(pca_transform(proj, cloud), out, header=[f"pc{i + 1}" for i in range(args.k)])
    proj.write_json(Path(str(out) + ".pca.json"))
    _write_meta(out, args)
    return 0


def _load_table(args):
    cfg = PartitionConfig(args.freezing_max, args.cold_max, args.damage_start)
    if args.input:
        records = read_records_csv(_input(args.input))
    elif args.synthetic:
        records = synthetic_records(args.seed, cfg=cfg)
    else:
        raise DataError("no dataset: give --input FILE or --synthetic")
    table = partition_records(records, cfg)
    if args.split:
        label, _, fr = args.split.partition(":")
        table = split_partition(table, label, _float_list(fr or "0.5,0.5"), args.seed)
    return table


def cmd_z24(args) -> int:
    out = _output(args.output)
    table = _load_table(args)
    res = analyze_partitions(table, _int_list(args.omegas), args.pca_k, args.p, _int_list(args.dims),
                             threads=args.threads)
    write_scaled_csv(res.rows, out)
    res.distances.write_csv(Path(str(out) + ".matrix.csv"))
    _write_meta(out, args, {"counts": table.counts, "skipped": table.skipped,
                            "provenance": dict(table.provenance), "argmax": res.argmax})
    return 0


def cmd_sweep(args) -> int:
    out = _output(args.output)
    table = _load_table(args)
    rows = partition_size_sweep(table, args.label, _int_list(args.sizes), args.seed, args.p,
                                _int_list(args.dims), _int_list(args.omegas))
    write_sweep_csv(rows, out)
    _write_meta(out, args, {"counts": table.counts})
    return 0


# ------------------------------------------------------------ parser

def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="tdakit", description="Persistent homology for attractors and bridge monitoring data.")
    ap.add_argument("--version", action="version", version=__version__)
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=0, help="seed for every random choice (default 0)")
    common.add_argument("--threads", type=int, default=default_threads(),
                        help=f"worker cap (default ${THREADS_ENV} or 1)")
    sub = ap.add_subparsers(dest="command", required=True)

    g = sub.add_parser("generate", parents=[common], help="attractor point cloud CSV")
    g.add_argument("--system", help="|".join(SYSTEMS))
    g.add_argument("--preset", choices=sorted(PRESETS))
    g.add_argument("--params", help="e.g. sigma=10,rho=28")
    g.add_argument("--initial", help="comma-separated initial state")
    g.add_argument("--dt", type=float)
    g.add_argument("--transient", type=int)
    g.add_argument("--stride", type=int)
    g.add_argument("--count", type=int)
    g.add_argument("-o", "--output", required=True)
    g.set_defaults(func=cmd_generate)

    p = sub.add_parser("persist", parents=[common], help="VR persistence diagram of a point cloud CSV")
    p.add_argument("input")
    p.add_argument("--max-dim", type=int, default=DEFAULT_MAX_DIM, help="largest simplex dimension (default 2, giving H0 and H1)")
    p.add_argument("--max-scale", default=ENCLOSING, help="number, 'enclosing' (default) or 'inf'")
    p.add_argument("--reduced", action="store_true", help="drop the infinite H0 bar")
    p.add_argument("-o", "--output", required=True)
    p.set_defaults(func=cmd_persist)

    d = sub.add_parser("distance", parents=[common], help="Wasserstein distance between two diagram CSVs")
    d.add_argument("first")
    d.add_argument("second")
    d.add_argument("--p", type=float, default=DEFAULT_P)
    d.add_argument("--dims", default=",".join(map(str, DEFAULT_DIMS)))
    d.add_argument("-o", "--output", help="JSON path (default stdout)")
    d.set_defaults(func=cmd_distance)

    f = sub.add_parser("fractal", parents=[common], help="persistent-homology fractal dimension")
    f.add_argument("--sampler", choices=SAMPLERS, required=True)
    f.add_argument("--sizes", help="explicit sample sizes, e.g. 100,200,400")
    f.add_argument("--n-max", type=int, default=2000)
    f.add_argument("--n-sizes", type=int, default=DEFAULT_N_SIZES)
    f.add_argument("--alpha", type=float, default=DEFAULT_ALPHA)
    f.add_argument("--hom-dim", type=int, default=0)
    f.add_argument("--trials", type=int, default=DEFAULT_TRIALS)
    f.add_argument("--flow-stride", type=int, default=10, help="integration steps between orbit samples")
    f.add_argument("-o", "--output", required=True)
    f.set_defaults(func=cmd_fractal)

    e = sub.add_parser("delayopt", parents=[common], help="WD sweep over time delays")
    e.add_argument("--input", help="series CSV (default: Rossler x-coordinate)")
    e.add_argument("--column", type=int, default=0)
    e.add_argument("--reference", help="reduced diagram CSV (default: Rossler topology run)")
    e.add_argument("--dim", type=int, default=DEFAULT_EMBED_DIM)
    e.add_argument("--delays", default="1:60")
    e.add_argument("--p", type=float, default=DEFAULT_P)
    e.add_argument("--dims", default=",".join(map(str, DEFAULT_DIMS)))
    e.add_argument("--subsample", type=int, default=DEFAULT_SUBSAMPLE)
    e.add_argument("--json", help="path for {first_peak, optimal} (default <output>.json)")
    e.add_argument("-o", "--output", required=True)
    e.set_defaults(func=cmd_delayopt)

    c = sub.add_parser("pca", parents=[common], help="project a point cloud onto its top principal components")
    c.add_argument("input")
    c.add_argument("--k", type=int, default=2)
    c.add_argument("-o", "--output", required=True)
    c.set_defaults(func=cmd_pca)

    for name, fn, hlp in (("z24", cmd_z24, "partition WD tables"), ("sweep", cmd_sweep, "partition-size sweep")):
        z = sub.add_parser(name, parents=[common], help=hlp)
        z.add_argument("--input", help="CSV with index,temperature,omega1..omega4")
        z.add_argument("--synthetic", action="store_true", help="use generated stand-in data")
        z.add_argument("--omegas", default="1,2,3,4", help="1-based frequency columns")
        z.add_argument("--p", type=float, default=SHM_P)
        z.add_argument("--dims", default=",".join(map(str, SHM_DIMS)))
        z.add_argument("--split", help="LABEL[:f1,f2,...] random split, e.g. Warm:0.5,0.5")
        z.add_argument("--freezing-max", type=float, default=PartitionConfig.freezing_max)
        z.add_argument("--cold-max", type=float, default=PartitionConfig.cold_max)
        z.add_argument("--damage-start", type=int, default=PartitionConfig.damage_start_index)
        z.add_argument("-o", "--output", required=True)
        if name == "z24":
            z.add_argument("--pca-k", type=int, help="project onto k pooled principal components first")
        else:
            z.add_argument("--label", default="Warm")
            z.add_argument("--sizes", required=True, help="e.g. 50,100,200")
        z.set_defaults(func=fn)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except TdaError as exc:
        print(f"tdakit {args.command}: {exc}", file=sys.stderr)
        return exc.exit_code
    except ValueError as exc:  # malformed numeric flag values
        print(f"tdakit {args.command}: {exc}", file=sys.stderr)
        return ValidationError.exit_code


if __name__ == "__main__":
    sys.exit(main())

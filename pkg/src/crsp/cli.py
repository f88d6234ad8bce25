"""Command-line interface.

Exit codes: 0 success, 2 validation error, 3 non-convergence or numeric
failure, 4 I/O or format error.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path

import numpy as np

from crsp.cluster import affinity_from_dissimilarity, spectral_clustering
from crsp.datasets import DEFAULT_ANGLES, SbmParams, generate_sbm, generate_swiss_roll, swiss_roll_graph
from crsp.embed import classical_mds
from crsp.errors import CrspError, FormatError
from crsp.fusion import DEFAULT_MODE, FUSION_MODES, crsp_dissimilarity
from crsp.graph import CULL_RULES, MultiViewGraph, cull_disconnected, gaussian_affinity
from crsp.metrics import evaluate
from crsp.pipeline import PipelineConfig, run_pipeline
from crsp.rsp import DEFAULT_BETA, RspParams
from crsp.storage import (
    load_manifest,
    read_labels,
    read_matrix_csv,
    save_multiview_graph,
    write_labels,
    write_matrix_csv,
)

log = logging.getLogger("crsp")


def _bandwidth(text: str):
    return text if text == "median" else float(text)


def _angles(text: str) -> tuple[float, ...]:
    return tuple(float(x) for x in text.split(",") if x.strip())


def cmd_generate_sbm(args) -> int:
    params = SbmParams(args.n, args.k, args.c, args.lam, args.m, args.seed)
    graph, labels = generate_sbm(params, args.cull)
    path = save_multiview_graph(args.out, graph, labels, fmt=args.format)
    log.info("SBM: %d of %d nodes survive culling", graph.n, args.n)
    print(path)
    return 0


def cmd_generate_swissroll(args) -> int:
    holes = json.loads(args.holes) if args.holes else None
    kwargs = {} if holes is None else {"holes": holes}
    cloud = generate_swiss_roll(args.n, seed=args.seed, **kwargs)
    graph = swiss_roll_graph(cloud, args.angles, _bandwidth(args.bandwidth))
    path = save_multiview_graph(args.out, graph, fmt=args.format)
    write_matrix_csv(Path(args.out) / "points.csv", cloud.points)
    write_matrix_csv(Path(args.out) / "roll_params.csv", np.column_stack([cloud.t, cloud.h]))
    print(path)
    return 0


def cmd_affinity(args) -> int:
    views = [gaussian_affinity(read_matrix_csv(f), _bandwidth(args.bandwidth)) for f in args.features]
    labels = read_labels(args.labels) if args.labels else None
    print(save_multiview_graph(args.out, MultiViewGraph(tuple(views)), labels, fmt=args.format))
    return 0


def cmd_dissimilarity(args) -> int:
    graph, _ = load_manifest(args.manifest)
    if args.cull != "none":
        graph = cull_disconnected(graph, args.cull)
    delta = crsp_dissimilarity(graph, RspParams(args.beta), args.mode)
    write_matrix_csv(args.out, delta)
    return 0


def cmd_embed(args) -> int:
    emb = classical_mds(read_matrix_csv(args.delta), args.dims)
    if emb.padded_dims:
        log.warning("%d embedding dimension(s) padded with zeros", emb.padded_dims)
    write_matrix_csv(args.out, emb.coords)
    return 0


def cmd_cluster(args) -> int:
    labels = spectral_clustering(affinity_from_dissimilarity(read_matrix_csv(args.delta)), args.k, args.seed)
    write_labels(args.out, labels)
    return 0


def cmd_evaluate(args) -> int:
    report = evaluate(read_labels(args.pred), read_labels(args.truth), args.nmi_average)
    text = json.dumps(report.to_dict())
    if args.out:
        Path(args.out).write_text(text + "\n")
    print(text)
    return 0


def cmd_pipeline(args) -> int:
    config = PipelineConfig.from_file(args.config) if args.config else PipelineConfig()
    if args.manifest:
        config.input = {"manifest": args.manifest}
    elif args.sbm:
        config.input = {"generator": "sbm", **json.loads(args.sbm)}
    elif args.swissroll:
        config.input = {"generator": "swissroll", **json.loads(args.swissroll)}
    for key in ("beta", "mode", "dims", "k", "seed", "out_dir", "nmi_average", "cull"):
        value = getattr(args, key)
        if value is not None:
            setattr(config, key, value)
    artifacts = run_pipeline(config)
    print(Path(artifacts["metrics.json"]).read_text(), end="")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="crsp", description="RSP / C-RSP dissimilarities, embeddings and clusterings."
    )
    parser.add_argument("-v", "--verbose", action="count", default=0)
    sub = parser.add_subparsers(dest="command", required=True)

    gen = sub.add_parser("generate", help="write a synthetic multi-view graph")
    gsub = gen.add_subparsers(dest="generator", required=True)
    sbm = gsub.add_parser("sbm", help="multi-view stochastic block model")
    sbm.add_argument("--n", type=int, default=500)
    sbm.add_argument("--k", type=int, default=3)
    sbm.add_argument("--c", type=float, default=10.0)
    sbm.add_argument("--lam", type=float, default=0.9)
    sbm.add_argument("--m", type=int, default=3)
    sbm.add_argument("--seed", type=int, default=0)
    sbm.add_argument("--cull", choices=CULL_RULES, default="views",
                     help="views: every view connected; union: union graph connected")
    sbm.add_argument("--format", choices=("dense", "triplets"), default="dense")
    sbm.add_argument("--out", required=True)
    sbm.set_defaults(func=cmd_generate_sbm)

    roll = gsub.add_parser("swissroll", help="Swiss roll with holes, projected views")
    roll.add_argument("--n", type=int, default=400)
    roll.add_argument("--seed", type=int, default=0)
    roll.add_argument("--angles", type=_angles, default=DEFAULT_ANGLES,
                      help="comma-separated rotations about y in degrees")
    roll.add_argument("--holes", help='JSON list of [[t, h], radius], e.g. "[[[7.5, 7], 1.75]]"')
    roll.add_argument("--bandwidth", default="median")
    roll.add_argument("--format", choices=("dense", "triplets"), default="dense")
    roll.add_argument("--out", required=True)
    roll.set_defaults(func=cmd_generate_swissroll)

    aff = sub.add_parser("affinity", help="Gaussian-kernel views from feature CSVs")
    aff.add_argument("features", nargs="+", help="one CSV of feature rows per view")
    aff.add_argument("--bandwidth", default="median", help='"median" or a positive sigma')
    aff.add_argument("--labels", help="optional ground-truth labels file to copy")
    aff.add_argument("--format", choices=("dense", "triplets"), default="dense")
    aff.add_argument("--out", required=True)
    aff.set_defaults(func=cmd_affinity)

    dis = sub.add_parser("dissimilarity", help="C-RSP dissimilarity of a manifest graph")
    dis.add_argument("manifest")
    dis.add_argument("--beta", type=float, default=DEFAULT_BETA)
    dis.add_argument("--mode", choices=FUSION_MODES, default=DEFAULT_MODE)
    dis.add_argument("--cull", choices=CULL_RULES + ("none",), default="views")
    dis.add_argument("--out", default="delta.csv")
    dis.set_defaults(func=cmd_dissimilarity)

    emb = sub.add_parser("embed", help="classical MDS of a dissimilarity CSV")
    emb.add_argument("delta")
    emb.add_argument("--dims", type=int, default=2)
    emb.add_argument("--out", default="coords.csv")
    emb.set_defaults(func=cmd_embed)

    clu = sub.add_parser("cluster", help="spectral clustering of 1/delta")
    clu.add_argument("delta")
    clu.add_argument("--k", type=int, required=True)
    clu.add_argument("--seed", type=int, default=0)
    clu.add_argument("--out", default="labels.csv")
    clu.set_defaults(func=cmd_cluster)

    ev = sub.add_parser("evaluate", help="CCR and NMI of predicted labels")
    ev.add_argument("pred")
    ev.add_argument("truth")
    ev.add_argument("--nmi-average", choices=("geometric", "arithmetic"), default="geometric")
    ev.add_argument("--out")
    ev.set_defaults(func=cmd_evaluate)

    pipe = sub.add_parser("pipeline", help="generate/load -> dissimilarity -> embed -> cluster -> evaluate")
    pipe.add_argument("--config", help="JSON config; flags override its fields")
    src = pipe.add_mutually_exclusive_group()
    src.add_argument("--manifest")
    src.add_argument("--sbm", help='JSON generator args, e.g. \'{"n":100,"k":2,"c":10,"lam":0.9,"m":3,"seed":7}\'')
    src.add_argument("--swissroll", help='JSON generator args, e.g. \'{"n":300,"seed":0}\'')
    pipe.add_argument("--beta", type=float)
    pipe.add_argument("--mode", choices=FUSION_MODES)
    pipe.add_argument("--dims", type=int)
    pipe.add_argument("--k", type=int)
    pipe.add_argument("--seed", type=int)
    pipe.add_argument("--nmi-average", choices=("geometric", "arithmetic"))
    pipe.add_argument("--cull", choices=CULL_RULES + ("none",))
    pipe.add_argument("--out", dest="out_dir")
    pipe.set_defaults(func=cmd_pipeline)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(
        level=logging.WARNING - 10 * min(args.verbose, 2),
        format="%(asctime)s %(name)s %(levelname)s %(message)s",
    )
    try:
        return args.func(args)
    except CrspError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.exit_code
    except (OSError, json.JSONDecodeError) as exc:
        print(f"error: {FormatError(exc)}", file=sys.stderr)
        return FormatError.exit_code


if __name__ == "__main__":
    sys.exit(main())

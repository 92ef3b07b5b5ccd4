#!/usr/bin/env python3
import argparse
import os
import sys

# Asegurar que el directorio actual está en el path para las importaciones
sys.path.append(os.path.dirname(os.path.abspath(__file__)))

from pydantic import ValidationError

from dynamic_cover.config import LOG_FILE, VERIFY_EVERY
from dynamic_cover.core.manager import EXIT_BAD_INPUT, EXIT_FAULT, RunManager
from dynamic_cover.data_structures.schemas import Generator, RunConfig
from dynamic_cover.utils.log import setup_logging


def _ladder(raw: str) -> list:
    low, _, high = raw.partition(":")
    return list(range(int(low), int(high or low) + 1))


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(description="Dynamic weighted set cover / dominating set engine")
    parser.add_argument("--verbose", "-v", action="store_true", help="Logging a nivel DEBUG")
    parser.add_argument("--log-file", default=LOG_FILE, help="Archivo de log ('' para desactivarlo)")
    sub = parser.add_subparsers(dest="mode", required=True)

    for mode, text in (("run", "Reproducir un workload y emitir metricas"),
                       ("verify", "Reproducir con chequeo de invariantes y de aproximacion")):
        p = sub.add_parser(mode, help=text)
        p.add_argument("workload", help="Archivo de workload")
        p.add_argument("--eps", type=float, default=None, help="Precision (por defecto: eps del workload)")
        p.add_argument("--output", "-o", default="-", help="Archivo de metricas ('-' = stdout)")
        p.add_argument("--debug-exact-counters", action="store_true", help="Refrescar todos los contadores en cada cambio")
        p.add_argument("--no-timing", action="store_true", help="Omitir los campos wall_ns")
        p.add_argument("--no-global-resets", action="store_true", help="Desactivar el reset global periodico")
        if mode == "verify":
            p.add_argument("--verify-every", type=int, default=VERIFY_EVERY, help="Chequear cada k pasos")

    p = sub.add_parser("gen", help="Generar un workload determinista")
    p.add_argument("generator", choices=[g.value for g in Generator])
    p.add_argument("--output", "-o", default="-")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--n", type=int, default=64)
    p.add_argument("--m", type=int, default=32)
    p.add_argument("--f", type=int, default=3)
    p.add_argument("--delta", type=int, default=4)
    p.add_argument("--cost-ratio", type=float, default=4.0)
    p.add_argument("--ops", type=int, default=0, help="Numero de operaciones (0 = 2n)")
    p.add_argument("--churn", type=float, default=0.3)
    p.add_argument("--q", type=int, default=3, help="Parametro de las construcciones lb_*")

    p = sub.add_parser("bench", help="Escalera de tamanos con tiempos por operacion")
    p.add_argument("--ladder", type=_ladder, default=None, help="Exponentes 'lo:hi' de n = 2^k")
    p.add_argument("--eps", type=float, default=None)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--ops", type=int, default=0)
    p.add_argument("--output", "-o", default="-")
    return parser


def config_from_args(args: argparse.Namespace) -> RunConfig:
    values = {"mode": args.mode, "output": args.output}
    if args.mode in ("run", "verify"):
        values.update(
            workload=args.workload,
            eps=args.eps,
            debug_exact_counters=args.debug_exact_counters,
            no_timing=args.no_timing,
            global_resets=not args.no_global_resets,
        )
        if args.mode == "verify":
            values["verify_every"] = args.verify_every
    elif args.mode == "gen":
        values.update(
            generator=args.generator, seed=args.seed, n=args.n, m=args.m, f=args.f, delta=args.delta,
            c_ratio=args.cost_ratio, ops=args.ops, churn=args.churn, q=args.q,
        )
    else:
        values.update(eps=args.eps, seed=args.seed, ops=args.ops, ladder=args.ladder or [])
    return RunConfig(**values)


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)

    # Configurar Logging
    setup_logging(args.log_file or None, verbose=args.verbose)
    import logging
    logger = logging.getLogger(__name__)

    try:
        config = config_from_args(args)
    except ValidationError as e:
        logger.error(f"Configuracion invalida: {e}")
        return EXIT_BAD_INPUT

    logger.info(f"=== Dynamic Cover ({config.mode.value}) ===")
    try:
        return RunManager(config).execute()
    except Exception as e:
        logger.critical(f"Error fatal: {e}", exc_info=True)
        return EXIT_FAULT


if __name__ == "__main__":
    sys.exit(main())

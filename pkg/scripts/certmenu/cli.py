#!/usr/bin/env python3
"""
Interfaz de Línea de Comandos
=============================
Carga la configuración, ejecuta un subcomando y escribe CSV y resúmenes
JSON en el directorio de salida.

Uso:
    python -m certmenu [--config FICHERO] <subcomando> [opciones]

Códigos de salida: 0 éxito, 1 fallo de verificación, 2 error de uso o
de configuración.

Autor: Proyecto Certificación
Fecha: 2026
"""

from __future__ import annotations

import argparse
import logging
import sys
from dataclasses import replace
from pathlib import Path

import numpy as np
import pandas as pd

from . import __version__
from .analysis import (
    SWEEPS,
    compare_to_perfect,
    consumer_welfare_power,
    content_diversity,
    engagement,
    small_gamma_limits,
)
from .benchmarks import (
    enforced_perfect,
    optimize_single,
    optimize_two_certificate,
    planner,
    single_certificate,
)
from .config import load_config
from .exceptions import CertMenuError, ConfigError
from .mechanism_solver import (
    effective_virtual_values,
    pointwise_optimum,
    profit,
    solve_optimal,
    verify_ic,
)
from .model_core import attention_values, inverse_marginal_cost, virtual_value_range
from .oracle import brute_single_profit, cross_check_solver
from .reporting import (
    crear_tabla_ascii,
    formatear_numero,
    guardar_json,
    guardar_tabla,
    imprimir_progreso,
    imprimir_seccion,
)
from .validation import es_ejemplo_referencia, validar_ejemplo_referencia

logger = logging.getLogger(__name__)

DEFAULT_CONFIG = Path(__file__).resolve().parents[2] / "configs" / "linear_running_example.yaml"

EXIT_OK = 0
EXIT_FAILED = 1
EXIT_USAGE = 2

FIGURE_POINTS = 401

SWEEP_DEFAULTS = {
    "gamma": [0.05, 0.1, 0.2, 0.3, 0.4],
    "kappa": [0.5, 1.0, 2.0],
    "alpha": [0.5, 1.0, 2.0],
    "b": [0.0, 0.5, 1.0],
    "z": [0.01, 0.03],
}

# ============================================================================
# SALIDA
# ============================================================================

def _escribir(run, nombre, df):
    ruta = guardar_tabla(df, run.output_dir / f"{nombre}.csv", run.precision)
    print(f"✓ {ruta}")
    return ruta


def _resumen(run, nombre, datos):
    ruta = run.output_dir / f"{nombre}.json"
    guardar_json({"config": run.summary(), **datos}, ruta)
    print(f"✓ {ruta}")
    return ruta


def _resumen_mecanismo(sol, cfg):
    report = profit(sol, cfg)
    served = content_diversity(sol)
    ic = verify_ic(sol)
    return {
        "label": sol.label,
        "nodes": int(sol.theta.size),
        "profit_direct": report.direct,
        "profit_virtual_surplus": report.virtual_surplus,
        "engagement": engagement(sol),
        "serving_intervals": [list(i) for i in served.intervals],
        "serving_measure": served.measure,
        "ic_max_violation": ic.max_violation,
        "ic_holds": ic.holds(),
    }


# ============================================================================
# SUBCOMANDOS
# ============================================================================

def cmd_solve(args, run):
    cfg = run.model
    sol = solve_optimal(cfg)
    _escribir(run, "optimal_mechanism", sol.to_frame())
    resumen = _resumen_mecanismo(sol, cfg)
    if not cfg.attention.transformed:
        resumen["welfare"] = consumer_welfare_power(sol, cfg).welfare
    _resumen(run, "optimal_mechanism", {**resumen, "diagnostics": sol.diagnostics})
    print(f"  Beneficio: {formatear_numero(resumen['profit_virtual_surplus'], 10)}"
          f"  Engagement: {formatear_numero(resumen['engagement'], 10)}")
    if sol.diagnostics.get("internal_error"):
        print("❌ El mecanismo no es monótono")
        return EXIT_FAILED
    return EXIT_OK


def cmd_benchmark(args, run):
    cfg = run.model
    kind = args.kind
    if kind == "planner":
        sol = planner(cfg)
        extra = {}
    elif kind == "perfect":
        result = enforced_perfect(cfg)
        sol, extra = result.mechanism, {"lambda": result.lam}
    elif kind == "single":
        result = single_certificate(cfg, args.lam) if args.lam is not None else optimize_single(cfg)
        sol, extra = result.mechanism, {"lambda": result.lam}
    else:
        result = optimize_two_certificate(cfg)
        sol = result.mechanism
        extra = {"lambda_low": result.lambda_low, "lambda_high": result.lambda_high,
                 "theta_hat": result.theta_hat, "feasible": result.feasible,
                 "diagnostics": result.diagnostics}
    nombre = f"benchmark_{kind.replace('-', '_')}"
    _escribir(run, nombre, sol.to_frame())
    _resumen(run, nombre, {**_resumen_mecanismo(sol, cfg), **extra})
    if kind == "two-cert" and not result.feasible:
        print("❌ El menú de dos certificados no es compatible en incentivos")
        return EXIT_FAILED
    return EXIT_OK


def cmd_sweep(args, run):
    values = args.values if args.values else SWEEP_DEFAULTS[args.parameter]
    result = SWEEPS[args.parameter](run.model, values, n_jobs=run.n_jobs)
    nombre = f"sweep_{args.parameter}"
    _escribir(run, nombre, result.to_frame())
    _escribir(run, f"{nombre}_summary", result.summary_frame())
    _resumen(run, nombre, {"parameter": result.parameter, "values": result.values,
                           "holds": result.holds, "violations": result.violations})
    filas = [[formatear_numero(v), formatear_numero(p, 8), formatear_numero(e, 8),
              formatear_numero(d, 6)]
             for v, p, e, d in zip(result.values, result.profit, result.engagement, result.diversity)]
    print(crear_tabla_ascii([args.parameter, "beneficio", "engagement", "diversidad"], filas))
    if not result.holds:
        for mensaje in result.violations:
            print(f"⚠️ {mensaje}")
        return EXIT_FAILED
    return EXIT_OK


def cmd_compare(args, run):
    report = compare_to_perfect(run.model)
    _escribir(run, "compare_perfect", report.to_frame())
    _resumen(run, "compare_perfect", {
        "total_optimal": report.total_optimal,
        "total_perfect": report.total_perfect,
        "diversity_optimal": [list(i) for i in report.diversity_optimal.intervals],
        "diversity_perfect": [list(i) for i in report.diversity_perfect.intervals],
        "dichotomy_holds": report.dichotomy_holds,
    })
    print(f"  Engagement óptimo: {formatear_numero(report.total_optimal, 10)}"
          f"  perfecta: {formatear_numero(report.total_perfect, 10)}")
    if not report.dichotomy_holds:
        print("❌ Falla la dicotomía calidad/diversidad")
        return EXIT_FAILED
    return EXIT_OK


def cmd_limits(args, run):
    reports = [small_gamma_limits(alpha, args.sigma, args.gammas) for alpha in args.alphas]
    frames = [r.to_frame().assign(alpha=r.alpha) for r in reports]
    df = pd.concat(frames, ignore_index=True)[["alpha", "gamma", "phi", "lambda", "engagement"]]
    _escribir(run, "limits", df)
    _resumen(run, "limits", {"sigma": args.sigma, "reports": [
        {"alpha": r.alpha, "regime": r.regime, "limit": r.limit,
         "trend_holds": r.trend_holds, "quality_to_zero": r.quality_to_zero}
        for r in reports]})
    ok = all(r.holds for r in reports)
    for r in reports:
        print(f"  α={r.alpha:g} ({r.regime}): {'✅' if r.holds else '❌'}")
    return EXIT_OK if ok else EXIT_FAILED


def figure_tables(cfg, n_points=FIGURE_POINTS):
    """
    Tablas para gráficos sobre una malla de φ en [0, min(1, φ(θ̄))].

    - fig1: vistas con certificado único λ = 1 y λ = 0.5
    - fig2a: Λ*
    - fig2b: V* y vistas con certificación perfecta
    - fig3: A(Λ*)V* menos las vistas con λ = 1
    """
    _, phi_high = virtual_value_range(cfg.dist)
    phi = np.linspace(0.0, min(1.0, phi_high), n_points)

    def single_views(lam):
        return inverse_marginal_cost(cfg.cost, effective_virtual_values(cfg.attention, cfg.gamma, phi, lam))

    quality, views, _ = pointwise_optimum(phi, cfg)
    perfect = single_views(1.0)
    reads = attention_values(cfg.attention, quality) * views
    return {
        "fig1": pd.DataFrame({"phi": phi, "v_lambda_1": perfect, "v_lambda_0.5": single_views(0.5)}),
        "fig2a": pd.DataFrame({"phi": phi, "lambda": quality}),
        "fig2b": pd.DataFrame({"phi": phi, "v_good": views, "v_perfect": perfect}),
        "fig3": pd.DataFrame({"phi": phi, "engagement_optimal": reads,
                              "engagement_perfect": perfect, "delta": reads - perfect}),
    }


def cmd_figures(args, run):
    tablas = figure_tables(run.model)
    for nombre, df in tablas.items():
        _escribir(run, nombre, df)
    _resumen(run, "figures", {"points": FIGURE_POINTS, "files": sorted(tablas)})
    return EXIT_OK


def cmd_verify(args, run):
    cfg = run.model
    probes = args.probes if args.probes is not None else run.oracle_probes
    fallos = []
    total = 4

    imprimir_progreso(1, total, f"Contraste con oráculos ({probes} sondas aleatorias)...")
    random_check = cross_check_solver(n_probes=probes, seed=run.seed)
    local_check = cross_check_solver(cfg, n_probes=max(1, probes // 4), seed=run.seed + 1)
    n_fail = len(random_check.failures) + len(local_check.failures)
    print(f"{'✅' if n_fail == 0 else '❌'} {n_fail} sondas fuera de tolerancia")
    if n_fail:
        fallos.append(f"{n_fail} oracle probes failed")

    imprimir_progreso(2, total, "Mecanismo óptimo: monotonía, IC y equivalencia de ingresos...")
    sol = solve_optimal(cfg)
    ic = verify_ic(sol)
    report = profit(sol, cfg)
    checks = {
        "monotone": not sol.diagnostics["internal_error"],
        "ic": ic.holds(),
        "revenue_equivalence": report.relative_gap <= 1e-6,
    }
    for nombre, ok in checks.items():
        print(f"{'✅' if ok else '❌'} {nombre}")
        if not ok:
            fallos.append(nombre)

    imprimir_progreso(3, total, "Certificado único óptimo frente a búsqueda exhaustiva...")
    single = optimize_single(cfg)
    brute = brute_single_profit(cfg)
    single_ok = single.profit >= brute.profit - 1e-6 * max(abs(brute.profit), 1e-300)
    print(f"{'✅' if single_ok else '❌'} Π^s(λ*)={single.profit:.10g}  oráculo={brute.profit:.10g}")
    if not single_ok:
        fallos.append("optimize_single below oracle")

    imprimir_progreso(4, total, "Valores esperados del ejemplo de referencia...")
    esperados = {}
    if es_ejemplo_referencia(cfg):
        esperados = validar_ejemplo_referencia(cfg)
        for nombre, resultado in esperados.items():
            print(f"  {resultado['status']} {nombre}: {resultado['obtenido']:.10g}")
            if not resultado["en_rango"]:
                fallos.append(nombre)
    else:
        print("  (la configuración no es el ejemplo de referencia)")

    _resumen(run, "verify", {
        "oracle_failures": [p._asdict() for p in (*random_check.failures, *local_check.failures)],
        "checks": checks,
        "single_profit": single.profit,
        "oracle_single_profit": brute.profit,
        "expected_values": esperados,
        "failures": fallos,
    })
    if fallos:
        print(f"\n❌ Verificación fallida: {', '.join(fallos)}")
        return EXIT_FAILED
    print("\n✅ Verificación completa")
    return EXIT_OK


COMMANDS = {
    "solve": cmd_solve,
    "benchmark": cmd_benchmark,
    "sweep": cmd_sweep,
    "compare-perfect": cmd_compare,
    "limits": cmd_limits,
    "figures": cmd_figures,
    "verify": cmd_verify,
}


# ============================================================================
# ENTRADA
# ============================================================================

def build_parser():
    parser = argparse.ArgumentParser(
        prog="certmenu",
        description="Menús óptimos de certificación y steering en plataformas",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument("--config", default=str(DEFAULT_CONFIG), help="fichero YAML de configuración")
    parser.add_argument("--output-dir", help="sustituye output.dir")
    parser.add_argument("--jobs", type=int, help="sustituye run.n_jobs")
    parser.add_argument("-v", "--verbose", action="count", default=0)
    sub = parser.add_subparsers(dest="command", required=True, metavar="subcomando")

    sub.add_parser("solve", help="mecanismo óptimo sin restricciones")

    bench = sub.add_parser("benchmark", help="mecanismos de referencia")
    bench.add_argument("kind", choices=["planner", "single", "two-cert", "perfect"])
    bench.add_argument("--lam", type=float, help="calidad fija para 'single' (por defecto se optimiza)")

    sweep = sub.add_parser("sweep", help="estática comparativa")
    sweep.add_argument("parameter", choices=sorted(SWEEPS))
    sweep.add_argument("--values", type=float, nargs="+", help="valores estrictamente crecientes")

    sub.add_parser("compare-perfect", help="óptimo frente a certificación perfecta impuesta")

    limits = sub.add_parser("limits", help="límites para γ pequeño")
    limits.add_argument("--sigma", type=float, default=2.0)
    limits.add_argument("--alphas", type=float, nargs="+", default=[0.3, 0.5, 0.7])
    limits.add_argument("--gammas", type=float, nargs="+", default=[1e-2, 1e-3, 1e-4])

    sub.add_parser("figures", help="tablas para gráficos sobre una malla de φ")

    verify = sub.add_parser("verify", help="contraste con oráculos y valores esperados")
    verify.add_argument("--probes", type=int, help="sustituye oracle.probes")
    return parser


def run_subcommand(command, run, args=None):
    """
    Ejecuta un subcomando sobre una configuración validada.

    Returns:
        int: código de salida
    """
    if command not in COMMANDS:
        raise ConfigError("command", f"unknown subcommand {command!r}")
    args = args if args is not None else build_parser().parse_args([command])
    imprimir_seccion(f"CERTMENU · {command.upper()}")
    return COMMANDS[command](args, run)


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=max(logging.DEBUG, logging.WARNING - 10 * args.verbose),
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        run = load_config(args.config)
        if args.output_dir:
            run = replace(run, output_dir=Path(args.output_dir))
        if args.jobs is not None:
            if args.jobs < 1:
                raise ConfigError("run.n_jobs", "n_jobs must be >= 1")
            run = replace(run, n_jobs=args.jobs)
        return run_subcommand(args.command, run, args)
    except ConfigError as exc:
        print(f"❌ Error de configuración: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except CertMenuError as exc:
        print(f"❌ {exc}", file=sys.stderr)
        return EXIT_FAILED


if __name__ == "__main__":
    sys.exit(main())

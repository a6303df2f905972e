#!/usr/bin/env python3
"""
Script Maestro - Análisis Completo del Menú de Certificación
============================================================
Este script ejecuta todo el pipeline en orden sobre el ejemplo de
referencia:
1. Mecanismo óptimo
2. Mecanismos de referencia (planificador, único, dos certificados, perfecta)
3. Comparación con certificación perfecta impuesta
4. Estática comparativa (γ, κ, α, pérdidas, adicción)
5. Límites para γ pequeño
6. Tablas para gráficos
7. Verificación con oráculos y valores esperados

Autor: Proyecto Certificación
Fecha: 2026
"""

import os
import subprocess
import sys
from datetime import datetime
from pathlib import Path

# ============================================================================
# CONFIGURACIÓN
# ============================================================================

PROJECT_DIR = Path(__file__).resolve().parents[1]
SCRIPTS_DIR = PROJECT_DIR / "scripts"
RESULTS_DIR = PROJECT_DIR / "results"
TABLES_DIR = RESULTS_DIR / "tables"
CONFIG = PROJECT_DIR / "configs" / "linear_running_example.yaml"

PASOS = [
    (["solve"], "Mecanismo óptimo"),
    (["benchmark", "planner"], "Planificador"),
    (["benchmark", "perfect"], "Certificación perfecta impuesta"),
    (["benchmark", "single"], "Certificado único óptimo"),
    (["benchmark", "two-cert"], "Dos certificados"),
    (["compare-perfect"], "Comparación con certificación perfecta"),
    (["sweep", "gamma"], "Estática comparativa en γ"),
    (["sweep", "kappa"], "Estática comparativa en κ"),
    (["sweep", "alpha"], "Estática comparativa en α"),
    (["sweep", "b"], "Estática comparativa en aversión a pérdidas"),
    (["sweep", "z"], "Estática comparativa en adicción"),
    (["limits"], "Límites para γ pequeño"),
    (["figures"], "Tablas para gráficos"),
    (["verify"], "Verificación"),
]

ARCHIVOS_ESPERADOS = {
    "Mecanismos": [
        "optimal_mechanism.csv",
        "benchmark_planner.csv",
        "benchmark_perfect.csv",
        "benchmark_single.csv",
        "benchmark_two_cert.csv",
    ],
    "Análisis": [
        "compare_perfect.csv",
        "sweep_gamma.csv",
        "sweep_kappa.csv",
        "sweep_alpha.csv",
        "sweep_b.csv",
        "sweep_z.csv",
        "limits.csv",
    ],
    "Figuras": ["fig1.csv", "fig2a.csv", "fig2b.csv", "fig3.csv"],
    "Verificación": ["verify.json"],
}

# ============================================================================
# FUNCIONES AUXILIARES
# ============================================================================

def imprimir_banner():
    """Imprime el banner inicial."""
    banner = """
    ╔════════════════════════════════════════════════════════════════════╗
    ║                                                                    ║
    ║        MENÚS DE CERTIFICACIÓN Y STEERING - ANÁLISIS COMPLETO       ║
    ║                                                                    ║
    ║                      Pipeline Automatizado                         ║
    ║                                                                    ║
    ╚════════════════════════════════════════════════════════════════════╝
    """
    print(banner)
    print(f"\n    Fecha de ejecución: {datetime.now().strftime('%Y-%m-%d %H:%M:%S')}")
    print(f"    Directorio del proyecto: {PROJECT_DIR}\n")


def imprimir_seccion(titulo):
    print("\n" + "=" * 80)
    print(f"  {titulo}")
    print("=" * 80 + "\n")


def ejecutar_subcomando(argumentos, descripcion):
    """
    Ejecuta un subcomando del paquete en un proceso aparte.

    Returns:
        bool: True si exitoso, False si falló
    """
    print(f"→ Ejecutando: {descripcion}")
    print(f"  Subcomando: {' '.join(argumentos)}")
    entorno = {**os.environ, "PYTHONPATH": str(SCRIPTS_DIR)}
    comando = [sys.executable, "-m", "certmenu", "--config", str(CONFIG),
               "--output-dir", str(TABLES_DIR), *argumentos]

    try:
        result = subprocess.run(comando, capture_output=True, text=True, timeout=600,
                                env=entorno, cwd=PROJECT_DIR)
        if result.returncode == 0:
            print("  ✅ COMPLETADO\n")
            return True
        print(f"  ❌ ERROR (código {result.returncode}): {result.stderr or result.stdout}\n")
        return False
    except subprocess.TimeoutExpired:
        print("  ❌ ERROR: Timeout (>10 minutos)\n")
        return False


def verificar_archivos_generados():
    """Verifica que se hayan generado los archivos esperados."""
    imprimir_seccion("VERIFICACIÓN DE ARCHIVOS GENERADOS")

    total_archivos = 0
    archivos_encontrados = 0
    for categoria, archivos in ARCHIVOS_ESPERADOS.items():
        print(f"{categoria}:")
        for archivo in archivos:
            total_archivos += 1
            ruta = TABLES_DIR / archivo
            if ruta.exists():
                print(f"  ✅ {archivo} ({ruta.stat().st_size / 1024:.1f} KB)")
                archivos_encontrados += 1
            else:
                print(f"  ❌ {archivo} - NO ENCONTRADO")
        print()

    print(f"Total: {archivos_encontrados}/{total_archivos} archivos generados correctamente")
    return archivos_encontrados == total_archivos


def generar_reporte_final(resultados):
    """Escribe results/REPORTE_FINAL.txt con el estado de cada paso."""
    sys.path.insert(0, str(SCRIPTS_DIR))
    from certmenu.reporting import cargar_json

    imprimir_seccion("GENERANDO REPORTE FINAL")
    try:
        optimo = cargar_json(TABLES_DIR / "optimal_mechanism.json")
        perfecta = cargar_json(TABLES_DIR / "benchmark_perfect.json")
        dos = cargar_json(TABLES_DIR / "benchmark_two_cert.json")
        verificacion = cargar_json(TABLES_DIR / "verify.json")
    except (OSError, ValueError) as e:
        print(f"❌ Error al generar reporte final: {e}\n")
        return False

    lineas_pasos = "\n".join(f"  {'✅' if ok else '❌'} {desc}" for desc, ok in resultados)
    lineas_esperados = "\n".join(
        f"  {v['status']} {nombre}" for nombre, v in verificacion.get("expected_values", {}).items())
    barra = "━" * 78
    reporte = f"""
╔════════════════════════════════════════════════════════════════════════════╗
║                         REPORTE FINAL DE ANÁLISIS                          ║
║                  Menú óptimo de certificación y steering                   ║
╚════════════════════════════════════════════════════════════════════════════╝

Fecha: {datetime.now().strftime('%Y-%m-%d %H:%M:%S')}

{barra}
 1. MECANISMO ÓPTIMO
{barra}

  Beneficio:             {optimo['profit_virtual_surplus']:.10f}
  Engagement:            {optimo['engagement']:.10f}
  Conjunto servido:      {optimo['serving_intervals']}
  IC (violación máx.):   {optimo['ic_max_violation']:.3e}

{barra}
 2. REFERENCIAS
{barra}

  Certificación perfecta:  beneficio {perfecta['profit_virtual_surplus']:.10f}, engagement {perfecta['engagement']:.10f}
  Dos certificados:        λ̲={dos['lambda_low']:.6f}  λ̄={dos['lambda_high']:.6f}  θ̂={dos['theta_hat']:.6f}
                           beneficio {dos['profit_virtual_surplus']:.10f}

{barra}
 3. PASOS DEL PIPELINE
{barra}

{lineas_pasos}

{barra}
 4. VALORES ESPERADOS
{barra}

{lineas_esperados or '  (no aplicable)'}

{barra}
"""
    print(reporte)
    reporte_file = RESULTS_DIR / "REPORTE_FINAL.txt"
    reporte_file.write_text(reporte, encoding="utf-8")
    print(f"\n✅ Reporte final guardado: {reporte_file}\n")
    return True

# ============================================================================
# FUNCIÓN PRINCIPAL
# ============================================================================

def main():
    """Ejecuta el pipeline completo."""
    inicio = datetime.now()
    imprimir_banner()

    imprimir_seccion("EJECUCIÓN DE SUBCOMANDOS")
    resultados = [(descripcion, ejecutar_subcomando(argumentos, descripcion))
                  for argumentos, descripcion in PASOS]
    exitosos = sum(ok for _, ok in resultados)
    fallidos = len(resultados) - exitosos

    archivos_ok = verificar_archivos_generados()
    reporte_ok = generar_reporte_final(resultados)

    duracion = (datetime.now() - inicio).total_seconds()
    imprimir_seccion("RESUMEN DE EJECUCIÓN")
    print(f"  Duración total:      {duracion:.1f} segundos ({duracion / 60:.1f} minutos)")
    print(f"\n  Pasos ejecutados:    {len(resultados)}")
    print(f"  ✅ Exitosos:         {exitosos}")
    print(f"  ❌ Fallidos:         {fallidos}")

    if fallidos == 0 and archivos_ok and reporte_ok:
        imprimir_seccion("✅ PIPELINE COMPLETADO EXITOSAMENTE")
        return 0
    imprimir_seccion("⚠️  PIPELINE COMPLETADO CON ADVERTENCIAS")
    return 1

# ============================================================================
# ENTRY POINT
# ============================================================================

if __name__ == "__main__":
    sys.exit(main())

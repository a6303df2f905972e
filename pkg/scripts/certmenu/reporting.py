#!/usr/bin/env python3
"""
Utilidades de Salida
====================
Impresión de secciones y progreso en consola, tablas ASCII y escritura
de resultados en CSV y JSON.

Autor: Proyecto Certificación
Fecha: 2026
"""

import json
from pathlib import Path

import numpy as np

# ============================================================================
# FUNCIONES DE CONSOLA
# ============================================================================

def imprimir_seccion(titulo, ancho=70):
    """
    Imprime un título de sección formateado.

    Args:
        titulo (str): Título de la sección
        ancho (int): Ancho de la línea
    """
    print("\n" + "=" * ancho)
    print(titulo.center(ancho))
    print("=" * ancho)


def imprimir_progreso(paso_actual, total_pasos, descripcion):
    """Imprime el progreso de un proceso: [k/n] descripción."""
    print(f"\n[{paso_actual}/{total_pasos}] {descripcion}")


def formatear_numero(numero, decimales=6):
    if isinstance(numero, (int, np.integer)):
        return f"{numero:,}"
    if numero is None:
        return "-"
    return f"{numero:.{decimales}g}"


def crear_tabla_ascii(headers, rows):
    """
    Crea una tabla ASCII formateada.

    Args:
        headers (list): Lista de encabezados
        rows (list): Lista de filas (cada fila es una lista)

    Returns:
        str: Tabla formateada
    """
    col_widths = [len(h) for h in headers]
    for row in rows:
        for i, cell in enumerate(row):
            col_widths[i] = max(col_widths[i], len(str(cell)))

    separator = "+" + "+".join("-" * (w + 2) for w in col_widths) + "+"
    table = [separator]
    table.append("|" + "|".join(f" {h:<{col_widths[i]}} " for i, h in enumerate(headers)) + "|")
    table.append(separator)
    for row in rows:
        table.append("|" + "|".join(f" {str(cell):<{col_widths[i]}} " for i, cell in enumerate(row)) + "|")
    table.append(separator)
    return "\n".join(table)


# ============================================================================
# FUNCIONES DE ARCHIVOS
# ============================================================================

def _json_default(value):
    if isinstance(value, np.ndarray):
        return value.tolist()
    if isinstance(value, np.generic):
        return value.item()
    if isinstance(value, Path):
        return str(value)
    raise TypeError(f"Object of type {type(value).__name__} is not JSON serializable")


def _finite(value):
    """NaN e infinitos pasan a None (JSON estricto)."""
    if isinstance(value, dict):
        return {k: _finite(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_finite(v) for v in value]
    if isinstance(value, np.ndarray):
        return _finite(value.tolist())
    if isinstance(value, (float, np.floating)) and not np.isfinite(value):
        return None
    return value


def guardar_json(data, filepath, indent=2):
    """
    Guarda datos en formato JSON (acepta arrays y escalares de numpy).

    Args:
        data (dict): Datos a guardar
        filepath (str | Path): Ruta del archivo de salida
        indent (int): Indentación del JSON
    """
    filepath = Path(filepath)
    filepath.parent.mkdir(parents=True, exist_ok=True)
    with open(filepath, "w", encoding="utf-8") as f:
        json.dump(_finite(data), f, indent=indent, default=_json_default, ensure_ascii=False)
        f.write("\n")


def cargar_json(filepath):
    with open(filepath, encoding="utf-8") as f:
        return json.load(f)


def guardar_tabla(df, filepath, precision=12):
    """
    Escribe un DataFrame como CSV con precisión decimal fija.

    Misma tabla y misma precisión producen el mismo fichero byte a byte.
    """
    filepath = Path(filepath)
    filepath.parent.mkdir(parents=True, exist_ok=True)
    df.to_csv(filepath, index=False, float_format=f"%.{int(precision)}f", lineterminator="\n")
    return filepath

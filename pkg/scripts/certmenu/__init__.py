"""
Solucionador de menús de certificación y steering para plataformas.

Módulos principales: model_core (primitivas), mechanism_solver (mecanismo
óptimo), benchmarks, analysis, oracle y cli.
"""

__version__ = "1.0.0"
__author__ = "Proyecto Certificación"
__description__ = "Menús óptimos de certificación y steering en plataformas"

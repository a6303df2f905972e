"""
Jerarquía de Errores
====================
Errores del solucionador de menús de certificación. Todos heredan de
``CertMenuError``; los que representan entradas fuera de dominio también
heredan de ``ValueError`` para que el código cliente pueda capturarlos
de forma genérica.
"""


class CertMenuError(Exception):
    """Error base del paquete."""


class ConfigError(CertMenuError, ValueError):
    """Configuración inválida. ``key`` nombra la clave con problemas."""

    def __init__(self, key, message):
        self.key = key
        super().__init__(f"{key}: {message}")


class RegularityError(ConfigError):
    """El valor virtual no es estrictamente creciente (no se hace ironing)."""

    def __init__(self, violation_at, key="dist"):
        self.violation_at = violation_at
        super().__init__(
            key,
            f"virtual value is not strictly increasing near theta={violation_at:.6g}",
        )


class DomainError(CertMenuError, ValueError):
    """Argumento fuera del dominio de la función."""


class KinkError(DomainError):
    """Derivada pedida justo en un quiebre de A_b o A_z."""

    def __init__(self, at, left, right):
        self.at = at
        self.left = left
        self.right = right
        super().__init__(
            f"attention is not differentiable at lambda={at:.12g} "
            f"(left derivative {left:.6g}, right derivative {right:.6g})"
        )


class RangeError(CertMenuError, ValueError):
    """Valor fuera del rango de una función monótona al invertirla."""


class PreconditionError(CertMenuError):
    """La entrada no cumple la precondición de la operación."""


class UnsupportedError(CertMenuError):
    """Operación no definida para esta familia de atención."""


class InternalSolverError(CertMenuError, RuntimeError):
    """El solucionador produjo una solución que viola una garantía teórica."""

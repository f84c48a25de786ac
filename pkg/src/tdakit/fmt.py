import math


def fmt_float(x: float) -> str:
    """Shortest round-trip decimal; ``inf`` for infinity."""
    x = float(x)
    if math.isinf(x):
        return "inf" if x > 0 else "-inf"
    return repr(x)

from __future__ import annotations

MAX_TOWER = 5


def tower(n: int) -> int:
    """twr(0) = 1, twr(n) = 2 ** twr(n - 1)."""
    if n < 0:
        raise ValueError("tower is defined for n >= 0")
    if n > MAX_TOWER:
        raise ValueError(f"tower({n}) is too large to materialize (limit {MAX_TOWER})")
    value = 1
    for _ in range(n):
        value = 1 << value
    return value

from __future__ import annotations

import itertools
import logging
from dataclasses import dataclass
from typing import Any, Callable, Mapping, Sequence

from ..classify import make_model
from .metrics import evaluate

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class GridResult:
    params: dict
    macro_f1: float | None
    error: str | None = None


def iter_grid(grid: Mapping[str, Sequence[Any]]):
    """Cartesian product in declaration order; the last axis varies fastest."""
    if not grid:
        raise ValueError("parameter grid is empty")
    for name, values in grid.items():
        if not isinstance(values, (list, tuple)) or not values:
            raise ValueError(f"grid axis {name!r} must be a non-empty list")
    names = list(grid)
    for combo in itertools.product(*(grid[n] for n in names)):
        yield dict(zip(names, combo))


def grid_search(
    grid: Mapping[str, Sequence[Any]],
    train: tuple,
    val: tuple,
    model_kind: str | Callable[..., Any],
) -> tuple[dict, list[GridResult]]:
    """Fit one model per grid point on ``train`` and score macro-F1 on ``val``.

    ``train`` and ``val`` are ``(X, y)`` pairs. A failing point is recorded
    with its error; the search only raises when every point fails. Ties keep
    the earliest point.
    """
    factory = (lambda **p: make_model(model_kind, **p)) if isinstance(model_kind, str) else model_kind
    results = []
    best: GridResult | None = None
    for params in iter_grid(grid):
        try:
            model = factory(**params).fit(*train)
            score = evaluate(val[1], model.predict(val[0])).macro_f1
        except Exception as exc:  # noqa: BLE001 - per-point failures are data
            log.warning("grid point %s failed: %s", params, exc)
            results.append(GridResult(params, None, f"{type(exc).__name__}: {exc}"))
            continue
        res = GridResult(params, score)
        results.append(res)
        if best is None or score > best.macro_f1:
            best = res
    if best is None:
        raise RuntimeError("every grid point failed to train")
    return best.params, results


def select_best(candidates: Sequence[tuple[str, Any]], val: tuple) -> str:
    """Name of the candidate with the highest validation macro-F1 (first wins ties)."""
    if not candidates:
        raise ValueError("no candidates")
    best_name, best_score = None, -1.0
    for name, model in candidates:
        score = evaluate(val[1], model.predict(val[0])).macro_f1
        if score > best_score:
            best_name, best_score = name, score
    return best_name

"""One-call entry points tying the models, the separator and the engine together."""

from __future__ import annotations

from dataclasses import replace

from .bnb import BnbConfig, MilpResult, solve_milp
from .models import CodeInstance, build_mindist_model, build_mld_model
from .separation import FsSeparator


def solve_min_distance(inst: CodeInstance, config: BnbConfig | None = None) -> tuple[MilpResult, FsSeparator | None]:
    """Minimum distance of ``inst``; also returns the separator (with its cut log), if any."""
    config = config or BnbConfig()
    model = build_mindist_model(inst)
    sep = None
    if config.separation_variant != "none":
        sep = FsSeparator(inst, config, model.blocks["x"], model.num_vars)
    return solve_milp(model, config, sep), sep


def solve_mld(inst: CodeInstance, gamma, config: BnbConfig | None = None) -> tuple[MilpResult, FsSeparator | None]:
    """Maximum-likelihood codeword for cost vector ``gamma`` (zero codeword allowed)."""
    config = replace(config or BnbConfig(), objective_is_integral=False)
    model = build_mld_model(inst, gamma)
    sep = None
    if config.separation_variant != "none":
        sep = FsSeparator(inst, config, model.blocks["x"], model.num_vars)
    return solve_milp(model, config, sep), sep

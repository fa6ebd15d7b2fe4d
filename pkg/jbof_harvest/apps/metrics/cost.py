"""
Bill-of-materials cost of one SSD under each platform variant.
"""
from jbof_harvest.apps.core.constants import Variant

from .constants import CostFactor
from .data import CostModel
from .exceptions import CostModelError

GB_PER_TB = 1024


def bom_cost(capacity_tb, variant, model=None):
    """
    Dollar cost of one SSD of ``capacity_tb`` terabytes.

    Flash is priced per 128 GB. Variants with shrunk compute-end resources pay
    half of the controller and DRAM price, and the harvesting variants pay the
    CXL-capable controller uplift on top. Open-channel drives carry a minimal
    controller and no DRAM of their own.
    """
    model = model or CostModel()
    if capacity_tb <= 0:
        raise CostModelError(f'capacity must be positive, got {capacity_tb} TB')
    flash = capacity_tb * GB_PER_TB / 128 * model.flash_per_128gb
    if variant == Variant.OC:
        return round(flash + model.oc_controller + model.other, 6)
    try:
        factor = CostFactor.FACTORS[variant]
    except KeyError:
        raise CostModelError(f'no cost factors for variant {variant!r}') from None
    dram = capacity_tb * model.dram_gb_per_tb * model.dram_per_gb * factor
    controller = model.controller * factor
    return round(flash + dram + controller + model.other, 6)


def bom_saving(capacity_tb, variant, baseline=Variant.CONV, model=None):
    """
    Fraction of the baseline's cost that ``variant`` saves.
    """
    base = bom_cost(capacity_tb, baseline, model)
    return (base - bom_cost(capacity_tb, variant, model)) / base


def cost_efficiency(bandwidth, cost):
    """
    MB/s delivered per dollar, for ``bandwidth`` in bytes per second.
    """
    if cost <= 0:
        raise CostModelError(f'cost must be positive, got {cost}')
    return bandwidth / (1024 * 1024) / cost

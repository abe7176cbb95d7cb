from .components import (DISCOUNT_RATE, GENERATOR_TECH, LINE_USABLE_FRACTION, STORAGE_TECH,
                         AcLine, Bus, DcLink, Generator, HydrogenStation, PowerSystem,
                         StorageUnit, annuity, make_generator, make_storage, validate_system)
from .expansion import SolvedCase, build_expansion_lp, solve_expansion

__all__ = [
    "DISCOUNT_RATE", "GENERATOR_TECH", "LINE_USABLE_FRACTION", "STORAGE_TECH",
    "AcLine", "Bus", "DcLink", "Generator", "HydrogenStation", "PowerSystem", "StorageUnit",
    "SolvedCase", "annuity", "build_expansion_lp", "make_generator", "make_storage",
    "solve_expansion", "validate_system",
]

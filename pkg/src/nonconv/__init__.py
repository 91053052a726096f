"""Lyapunov exponents of nonconventional products of random unimodular matrices."""

__version__ = "0.1.0"

from .avalanche import avalanche_inequalities, block_products, build_partition, partition_pipeline
from .cocycle import (LyapunovEstimate, RescaledProduct, lyapunov_spectrum, rescaled_product,
                      singular_exponents_exact, wedge_exponent)
from .deviations import fit_rate, tail_curve, theorem_comparison
from .drivers import ConstantDriver, MatrixListDriver, WedgeDriver, build_X_driver, build_Y_driver
from .processes import IIDProcess, MarkovProcess
from .schedules import IndexSchedule, check_separation

__all__ = [
    "ConstantDriver", "IIDProcess", "IndexSchedule", "LyapunovEstimate", "MarkovProcess",
    "MatrixListDriver", "RescaledProduct", "WedgeDriver", "avalanche_inequalities",
    "block_products", "build_X_driver", "build_Y_driver", "build_partition", "check_separation",
    "fit_rate", "lyapunov_spectrum", "partition_pipeline", "rescaled_product",
    "singular_exponents_exact", "tail_curve", "theorem_comparison", "wedge_exponent",
]

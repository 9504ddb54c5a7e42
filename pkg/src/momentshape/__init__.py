"""Reconstruction of planar and linear shapes from power moments.

The pipeline runs moments -> exponential-transform coefficients -> defining
polynomial, nodes and weights. Submodules:

``series``        truncated power series with ``exp`` and ``log``
``domains``       test shapes, shade functions, forward moments
``exptransform``  the ``s -> b`` map and pointwise transform evaluation
``reconstruct``   degeneracy test, ``P_d``, ``Q`` and quadrature data
``markov1d``      Hankel rank and Pade recovery of interval unions
``volume``        admissible multi-indices and sublevel-set volumes
``stability``     Hoelder-ratio and perturbation-bound experiments
``io``, ``cli``   file formats and the command line
"""
from .domains import (
    ConformalImage,
    Disk,
    IntervalUnion,
    MomentTable1D,
    MomentTable2D,
    OutsideUnitDiskWarning,
    Perturbation,
    ShadeFunction,
    SublevelSet,
    conformal_moments,
    disk_moments,
    grid_moments,
    interval_moments,
    sample_shade,
)
from .exptransform import (
    ExpCoeffTable,
    ExpCoeffTable1D,
    b_to_s,
    eval_diagonal,
    eval_polarized,
    rational_E,
    s_to_b,
    s_to_t,
    t_to_s,
)
from .markov1d import endpoints, hankel_rank, pade_recover
from .polynomials import RealPoly
from .reconstruct import (
    degeneracy_degree,
    extract_Q,
    extract_quadrature_data,
    node_polynomial,
    reconstruct,
    structure_check,
)
from .volume import check_vol_ratio, find_admissible, mc_sublevel_volume

__version__ = "0.1.0"

__all__ = [
    "ConformalImage",
    "Disk",
    "IntervalUnion",
    "MomentTable1D",
    "MomentTable2D",
    "OutsideUnitDiskWarning",
    "Perturbation",
    "ShadeFunction",
    "SublevelSet",
    "conformal_moments",
    "disk_moments",
    "grid_moments",
    "interval_moments",
    "sample_shade",
    "ExpCoeffTable",
    "ExpCoeffTable1D",
    "b_to_s",
    "eval_diagonal",
    "eval_polarized",
    "rational_E",
    "s_to_b",
    "s_to_t",
    "t_to_s",
    "degeneracy_degree",
    "extract_Q",
    "extract_quadrature_data",
    "node_polynomial",
    "reconstruct",
    "structure_check",
    "endpoints",
    "hankel_rank",
    "pade_recover",
    "RealPoly",
    "check_vol_ratio",
    "find_admissible",
    "mc_sublevel_volume",
]

from .config import Config, config, field, MISSING
from .errors import (
    TropBNError, ParameterError, StructureError,
    ConstructionError, VerificationError, PipelineError,
)
from .graph import ChainOfLoops, ChainConfig, make_chain
from .plfunc import PLFunction, SlopeVectorPair
from .tableaux import (
    Tableau, count_tableaux, enumerate_tableaux, random_tableau,
    vertex_avoiding_divisor,
)
from .independence import (
    IndependenceCertificate, build_independence, verify_independence,
    check_certificate,
)
from .chowring import ChowExpr, ChernRootMonomial, harris_tu_monomial, castelnuovo_number
from .slopes import DivisorClass, virtual_class_g23, virtual_class_rho1, slope_report
from .sweep import SweepConfig, SampleSweepConfig, run_sweep

from .libsvm import LibsvmParseError, parse_libsvm, serialize_libsvm
from .logistic import (LogisticLoss, LogisticProblem, lambda_max,
                       logistic_oracle, make_random_logistic, spectral_norm_sq)
from .ocp import BicycleConfig, OcpProblem, make_bicycle_mpc, ocp_single_shooting
from .synthetic import (BoxQpInstance, LassoInstance, convex_suite, make_box_qp,
                        make_lasso)

__all__ = [
    "BicycleConfig", "BoxQpInstance", "LassoInstance", "LibsvmParseError",
    "LogisticLoss", "LogisticProblem", "OcpProblem", "convex_suite",
    "lambda_max", "logistic_oracle", "make_bicycle_mpc", "make_box_qp",
    "make_lasso", "make_random_logistic", "ocp_single_shooting",
    "parse_libsvm", "serialize_libsvm", "spectral_norm_sq",
]

"""Copula-aligned weight initialization for randomized neural networks.

Fits elliptical and Archimedean copulas to training features, samples
frozen input-to-hidden weights whose columns carry the fitted dependence,
trains RVFL/ELM/dRVFL/BLS readouts in closed form, and benchmarks the
result against conventional iid initialization.
"""

from .copula import (CopulaModel, fit_copula, independence_model,
                     sample_copula, tau_of_theta)
from .dataset import (Dataset, FoldSplit, ScalerParams, apply_standardizer,
                      fit_standardizer, load_csv, one_hot, stratified_kfold)
from .dependence import (kendall_tau, nearest_correlation,
                         pseudo_observations, tau_matrix)
from .evaluate import (EvalReport, GridSpec, evaluate_dataset, measure_timing,
                       multi_seed, run_cv, wilcoxon_signed_rank)
from .numerics import (RngStream, debye1, sample_frailty, std_normal_quantile,
                       student_t_cdf, student_t_quantile)
from .rdnn import (ACTIVATIONS, ArchSpec, TrainedModel, build_features,
                   predict, ridge_solve, sample_arch_inits, train)
from .weights import (WeightInit, iid_baseline, marginal_quantile,
                      sample_weight_init)

__all__ = [name for name in dir() if not name.startswith("_")]
__version__ = "0.1.0"

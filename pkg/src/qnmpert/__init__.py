"""qnmpert: quasinormal modes of 1-d wave problems and their perturbative
frequency/wavefunction corrections, with exact handling of exponential
potential tails and cancellation-controlled integrals."""

from .engine import (GeneralizedNorm, MatrixElement, OrderData, PerturbationResult,
                     asymptotic_subtraction, effective_potential, extract_amplitude,
                     generalized_norm, matrix_element, order_shift, delta_n,
                     rotated_contour_me, run_lpt, second_order_explicit,
                     susceptibility, wavefunction_correction)
from .oracles import (complex_beta, complex_gamma, pt_exact, step_exact)
from .potentials import (BumpPerturbation, PotentialSpec, TailExpansion,
                         eval_potential, poschl_teller, pt_tail_expansion,
                         pt_width_perturbation, step_potential)
from .riccati import (ComplexFrequency, LogDerivProfile, MatchData,
                      count_real_nodes, integrate_outgoing, pt_eigenvalue,
                      shoot_eigenvalue, step_eigenvalue)
from .scenarios import (PtDemoResult, SweepResult, run_bump_sweep,
                        run_mu_scaling, run_pt_demo)
from .tails import (BornTerms, SeriesSolution, born_logderiv, matchdata_from_tail,
                    series_coefficients, series_logderiv)

__version__ = "0.1.0"

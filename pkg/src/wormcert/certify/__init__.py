"""Grid and sample certification of the inequalities, containments and
Levi-form signs, plus the parameter searches and the witness tables.
"""

from .containment import (certify_containments, certify_halfplane_containment, find_d2,
                          find_eta1, find_t_delta, sample_disc_boundary, sample_omega_closure)
from .crucial import (certify_crucial_estimate, crucial_margin, find_d1, m_function,
                      m_phi_identity_check, phi_function)
from .levi_suite import certify_levi
from .pipeline import RunSettings, run_checks, select_parameters
from .report import CertReport
from .witness import (DEFAULT_EPS_LIST, DEFAULT_S_LIST, WitnessConstants, certify_annuli,
                      certify_witness, lipschitz_constants, witness_point, witness_table,
                      x_epsilon)

__all__ = [
    "CertReport", "RunSettings", "WitnessConstants", "DEFAULT_EPS_LIST", "DEFAULT_S_LIST",
    "certify_annuli", "certify_containments", "certify_crucial_estimate",
    "certify_halfplane_containment", "certify_levi", "certify_witness", "crucial_margin",
    "find_d1", "find_d2", "find_eta1", "find_t_delta", "lipschitz_constants", "m_function",
    "m_phi_identity_check", "phi_function", "run_checks", "sample_disc_boundary",
    "sample_omega_closure", "select_parameters", "witness_point", "witness_table", "x_epsilon",
]

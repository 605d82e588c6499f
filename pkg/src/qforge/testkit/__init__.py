from .mutate import MUTATION_KINDS, Mutation, inject_bug, injected_ops, is_silent_mutation
from .planning import (ShotPlan, SqptProbeResult, estimate_shots, qpt_config_count, sigma,
                       sqpt_diag_probe)
from .runners import (CaseResult, EquivalenceResult, TestReport, equivalence_test, f_quant_tester,
                      p_class_tester, render_state)
from .swap import (CategoryError, PhaseLocalizationReport, SwapTestResult, localize_phase_error,
                   pair_probe, swap_harness, swap_test, swap_test_states)
from .vectors import TestCase, VectorFormatError

__all__ = [
    "MUTATION_KINDS", "Mutation", "inject_bug", "injected_ops", "is_silent_mutation",
    "ShotPlan", "SqptProbeResult", "estimate_shots", "qpt_config_count", "sigma", "sqpt_diag_probe",
    "CaseResult", "EquivalenceResult", "TestReport", "equivalence_test", "f_quant_tester",
    "p_class_tester", "render_state",
    "CategoryError", "PhaseLocalizationReport", "SwapTestResult", "localize_phase_error",
    "pair_probe", "swap_harness", "swap_test", "swap_test_states",
    "TestCase", "VectorFormatError",
]

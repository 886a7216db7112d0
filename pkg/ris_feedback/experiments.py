"""
    Proxy for beamforming and the Monte-Carlo harness to simplify import statements
"""
from ris_feedback.core.beamforming import (
    PhaseConfig, RateReport,
    zf_precoder, per_user_rate, ceo_optimize,
)

from ris_feedback.core.harness import (
    SweepSpec, ResultTable, ResultRow,
    run_point, sweep, fig4_spec, fig5_spec, overhead_reduction,
)

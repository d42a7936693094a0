"""Walsh-system Littlewood-Paley toolkit: dyadic group, Walsh transforms,
martingale square functions, interval decomposition and a verification harness."""
from .dyadic import (
    IntervalZ,
    complement_exponents,
    delta_block,
    dyadic_exponents,
    shift_decomposition,
    xor_add,
    xor_translate_set,
)
from .walsh import (
    DyadicFunction,
    VecFunction,
    WalshSpectrum,
    fwht_analyze,
    fwht_synthesize,
    lp_l2_norm,
    lp_norm,
    multiply_pointwise,
    project_spectrum,
    walsh_function,
)
from .martingale import (
    conditional_expectation,
    distribution_tail,
    martingale_difference,
    operator_G,
    square_function,
    square_function_vec,
)
from .decomposition import (
    ChainReport,
    DecomposedFunction,
    IntervalPartition,
    decompose_function,
    partition_interval,
    relocation_for_instance,
    theorem_chain,
)
from .harness import (
    InstanceSpec,
    InvariantViolation,
    TrialRecord,
    emit_report,
    estimate_constants,
    generate_instance,
    weak_type_probe,
)

__version__ = "0.1.0"

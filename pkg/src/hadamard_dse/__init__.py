"""Analog vs. digital spatial Hadamard transforms: simulation and design-space exploration."""
from .analog import (
    ARRAY_PRESETS,
    CapacitorArraySpec,
    DriverSpec,
    MismatchRealization,
    analog_transform,
    mismatch_sample,
    mismatch_sigma_from_cap,
    nyquist_rate,
)
from .chain import (
    AdcModel,
    SignalModel,
    SnrCurve,
    SweepConfig,
    generate_input,
    output_snr,
    quantize,
    run_analog_chain,
    run_digital_chain,
    yield_snr,
)
from .dse import (
    AdcRecord,
    DesignPoint,
    RequirementSet,
    TransformDesignRecord,
    adc_requirements,
    evaluate_design,
    load_adc_survey,
    pareto_front,
    select_adc,
)
from .kernels import BACKEND
from .transform import (
    CodeVector,
    FixedPointFormat,
    TransformSpec,
    dequantize_fht_output,
    fht_fixed,
    fht_real,
    hadamard_matrix,
)

__version__ = "0.1.0"

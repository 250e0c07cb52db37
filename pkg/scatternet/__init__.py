from scatternet.core.configuration import ScatternetConfiguration
from scatternet.core.exceptions import (
    ScatternetCheckError,
    ScatternetConfigError,
    ScatternetDomainError,
    ScatternetEnumerationError,
    ScatternetError,
    ScatternetNonFiniteError,
    ScatternetShapeError,
)
from scatternet.typing.field_types import (
    Grid1D,
    Grid2D,
    Grid3D,
    PhysConstants,
    ScatterKernel,
    ScatterPotential,
    Screen,
    SlitAperture,
    WaveField,
    WaveVector,
)
from scatternet.typing.network_types import (
    ConvLayer,
    DenseLayer,
    FeatureTensor,
    LabeledImages,
    LossReport,
    MaxPoolLayer,
)
from scatternet.typing.energy_types import (
    BinaryConfig,
    ChainState,
    RbmParams,
    TransitionKernel,
)
from scatternet.wavefield import plane_wave, translate_series, translation_phase
from scatternet.scattering import (
    born_scatter,
    box_conv_sine,
    double_slit_intensity,
    green_outgoing,
    neuron_response,
    scatter_kernel,
)
from scatternet.neuralnet import (
    backward,
    conv2d,
    cross_entropy,
    entropy,
    forward,
    init_network,
    kl_divergence,
    max_pool,
    softmax,
    softmax_temperature,
)
from scatternet.energymodel import (
    anneal_sample,
    boltzmann_prob,
    cd_train,
    energy,
    gibbs_step,
    markov_chain_run,
    partition_function_exact,
    temper_sample,
)
from scatternet.optim import MomentumState, momentum_step
from scatternet.training_flow import CnnTrainingFlow
from scatternet.harness.experiments import ExperimentRunner
from scatternet.harness.verify import run_verify_all

__all__ = [
    "ScatternetConfiguration",
    "ExperimentRunner",
    "run_verify_all",
    # Wave fields
    "Grid1D",
    "Grid2D",
    "Grid3D",
    "PhysConstants",
    "WaveField",
    "WaveVector",
    "plane_wave",
    "translation_phase",
    "translate_series",
    # Scattering
    "ScatterKernel",
    "ScatterPotential",
    "Screen",
    "SlitAperture",
    "green_outgoing",
    "born_scatter",
    "box_conv_sine",
    "double_slit_intensity",
    "scatter_kernel",
    "neuron_response",
    # Neural network
    "FeatureTensor",
    "LabeledImages",
    "ConvLayer",
    "DenseLayer",
    "MaxPoolLayer",
    "LossReport",
    "conv2d",
    "max_pool",
    "softmax",
    "softmax_temperature",
    "entropy",
    "cross_entropy",
    "kl_divergence",
    "forward",
    "backward",
    "init_network",
    "CnnTrainingFlow",
    # Energy model
    "RbmParams",
    "BinaryConfig",
    "ChainState",
    "TransitionKernel",
    "energy",
    "partition_function_exact",
    "boltzmann_prob",
    "gibbs_step",
    "anneal_sample",
    "temper_sample",
    "cd_train",
    "markov_chain_run",
    # Optimization
    "MomentumState",
    "momentum_step",
    # Common exceptions
    "ScatternetError",
    "ScatternetDomainError",
    "ScatternetShapeError",
    "ScatternetEnumerationError",
    "ScatternetNonFiniteError",
    "ScatternetConfigError",
    "ScatternetCheckError",
]

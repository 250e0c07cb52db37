import numpy as np

from scatternet.neuralnet import init_network
from scatternet.types import ExperimentConfig
from scatternet.typing.energy_types import RbmParams
from scatternet.typing.field_types import Grid3D, ScatterPotential
from scatternet.typing.network_types import LayerSpec, Network

SMALL_CNN_LAYERS: list[LayerSpec] = [
    {"type": "conv", "out_channels": 2, "kernel_size": 3},
    {"type": "relu"},
    {"type": "max_pool", "window": 2, "stride": 2},
    {"type": "dense", "outputs": 3},
]


def small_rbm(n_visible: int = 3, n_hidden: int = 2, seed: int = 0, scale: float = 1.0) -> RbmParams:
    rng = np.random.default_rng(seed)
    return RbmParams(
        rng.normal(0.0, scale, n_visible),
        rng.normal(0.0, scale, n_hidden),
        rng.normal(0.0, scale, (n_visible, n_hidden)),
    )


def small_cnn(seed: int = 0, input_shape=(1, 6, 6), layers=None) -> Network:
    return init_network(input_shape, layers or SMALL_CNN_LAYERS, seed)


def point_potential(n: int = 7, voxels: dict | None = None, spacing: float = 1.0) -> ScatterPotential:
    grid = Grid3D.regular(n, n, n, spacing)
    values = np.zeros(grid.shape)
    for index, value in (voxels or {}).items():
        values[index] = value
    return ScatterPotential(grid, values)


def experiment_config(tmp_path, experiment_id: str, seed: int = 0, **params) -> ExperimentConfig:
    return ExperimentConfig(
        experiment_id=experiment_id,
        seed=seed,
        output_dir=str(tmp_path / experiment_id),
        params=params,
    )

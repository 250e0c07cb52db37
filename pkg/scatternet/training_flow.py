import logging

import numpy as np

from scatternet.core.exceptions import ScatternetDomainError
from scatternet.core.helpers import spawn_rng
from scatternet.neuralnet import backward, forward
from scatternet.optim import MomentumState, momentum_step
from scatternet.typing.network_types import LabeledImages, Network

SHUFFLE_STREAM = 4


class CnnTrainingFlow:
    """
    Trains a layer stack end to end from its initial weights: minibatches of
    single-example backward passes, averaged, then one momentum step per
    parameter array. There is no pre-training stage.
    """

    current_epoch: int = 0

    def __init__(
        self,
        net: Network,
        learning_rate: float,
        momentum: float,
        batch_size: int,
        seed: int,
        logger: logging.Logger | None = None,
    ):
        if batch_size < 1:
            raise ScatternetDomainError(f"batch size must be >= 1, got {batch_size}")
        self.net = net
        self.batch_size = batch_size
        self.rng = spawn_rng(seed, SHUFFLE_STREAM)
        self.logger = logger or logging.getLogger(__name__)
        self.states = [
            {
                name: MomentumState.zeros_like(values, momentum, learning_rate)
                for name, values in layer.params().items()
            }
            for layer in net
        ]

    def train_epoch(self, data: LabeledImages) -> tuple[float, float]:
        """One pass over shuffled data; returns (mean loss, training accuracy)."""
        order = self.rng.permutation(len(data))
        total_loss, correct = 0.0, 0
        for start in range(0, len(order), self.batch_size):
            batch = order[start : start + self.batch_size]
            summed = None
            for index in batch:
                logits, cache = forward(self.net, data.images[index])
                report, grads = backward(self.net, cache, int(data.labels[index]))
                total_loss += report.loss
                correct += int(np.argmax(logits) == data.labels[index])
                summed = grads if summed is None else self._add(summed, grads)
            self._apply(summed, len(batch))

        self.current_epoch += 1
        return total_loss / len(order), correct / len(order)

    def evaluate(self, data: LabeledImages) -> float:
        correct = sum(
            int(np.argmax(forward(self.net, image)[0]) == label)
            for image, label in zip(data.images, data.labels)
        )
        return correct / len(data)

    def run(
        self, train: LabeledImages, test: LabeledImages, epochs: int
    ) -> list[tuple[int, float, float]]:
        """Trains for `epochs` epochs; one (epoch, train loss, test accuracy) row per epoch."""
        rows = []
        for _ in range(epochs):
            loss, train_accuracy = self.train_epoch(train)
            accuracy = self.evaluate(test)
            rows.append((self.current_epoch, loss, accuracy))
            self.logger.info(
                f"Epoch {self.current_epoch}: loss {loss:.4f} "
                f"train {train_accuracy:.3f} test {accuracy:.3f}"
            )
        return rows

    @staticmethod
    def _add(summed, grads):
        return [
            {name: summed[i][name] + values for name, values in layer.items()}
            for i, layer in enumerate(grads)
        ]

    def _apply(self, summed, count: int):
        for layer, states, grads in zip(self.net, self.states, summed):
            for name, state in states.items():
                params = getattr(layer, name)
                states[name], updated = momentum_step(state, params, grads[name] / count)
                setattr(layer, name, updated)

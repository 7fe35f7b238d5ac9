"""Double deep-Q learning on a small dense network, numpy only.

The online network picks the best next action, the slow-moving target
network prices it:

    y = r                                   if the transition ended
    y = r + gamma * Q_target(s', argmax_a Q_online(s', a))  otherwise,

with the argmax restricted to actions that are actually legal in s'.
Training happens in a burst at the end of each episode: a fixed number
of minibatch Adam steps on the Huber loss of the selected action's
Q-value.  Invalid actions receive no gradient and no target.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .circuits import N_ACTIONS
from .errors import NumericalFailure


@dataclass(frozen=True)
class AgentConfig:
    learning_rate: float = 0.001
    discount: float = 0.99
    epsilon_decay: float = 0.985
    epsilon_floor: float = 0.1
    batch_size: int = 128
    replay_iterations: int = 64
    target_sync_every: int = 30
    buffer_capacity: int = 50_000
    hidden: tuple[int, ...] = (32, 32, 32)

    @classmethod
    def extended(cls, **overrides) -> "AgentConfig":
        """Preset for long runs: slower exploration decay, lower floor."""
        overrides.setdefault("epsilon_decay", 0.9993)
        overrides.setdefault("epsilon_floor", 0.05)
        return cls(**overrides)


def epsilon_schedule(episode: int, step: int, decay: float, floor: float) -> float:
    """Exploration rate decay ** ((episode-1) + (step-1)), floored.

    Both indices are 1-based, so the very first decision of a run
    explores with probability 1 (unless the floor says otherwise).
    """
    if episode < 1 or step < 1:
        raise ValueError("episode and step are 1-based")
    return max(decay ** ((episode - 1) + (step - 1)), floor)


def huber_loss(pred, target, delta: float = 1.0):
    """Elementwise Huber value and d(value)/d(pred)."""
    error = np.asarray(pred, dtype=float) - np.asarray(target, dtype=float)
    small = np.abs(error) <= delta
    value = np.where(small, 0.5 * error**2, delta * (np.abs(error) - 0.5 * delta))
    grad = np.where(small, error, delta * np.sign(error))
    return value, grad


class QNetwork:
    """Plain MLP, ReLU hidden layers, linear output.

    Weights are He-uniform, biases start at zero.  ``forward`` accepts a
    single state or a batch; ``forward_cached`` also returns the
    intermediates needed for backprop.
    """

    def __init__(self, sizes, rng: np.random.Generator):
        self.sizes = tuple(int(s) for s in sizes)
        if len(self.sizes) < 2:
            raise ValueError("need at least an input and an output layer")
        self.weights = []
        self.biases = []
        for fan_in, fan_out in zip(self.sizes[:-1], self.sizes[1:]):
            limit = np.sqrt(6.0 / fan_in)
            self.weights.append(rng.uniform(-limit, limit, size=(fan_in, fan_out)))
            self.biases.append(np.zeros(fan_out))

    @property
    def parameters(self) -> list[np.ndarray]:
        params = []
        for w, b in zip(self.weights, self.biases):
            params.extend((w, b))
        return params

    def forward(self, x: np.ndarray) -> np.ndarray:
        single = np.ndim(x) == 1
        h = np.atleast_2d(np.asarray(x, dtype=float))
        for w, b in zip(self.weights[:-1], self.biases[:-1]):
            h = np.maximum(h @ w + b, 0.0)
        out = h @ self.weights[-1] + self.biases[-1]
        return out[0] if single else out

    def forward_cached(self, x: np.ndarray):
        """Batch forward keeping pre-activations for the backward pass."""
        h = np.asarray(x, dtype=float)
        activations = [h]
        pre = []
        for w, b in zip(self.weights[:-1], self.biases[:-1]):
            z = h @ w + b
            pre.append(z)
            h = np.maximum(z, 0.0)
            activations.append(h)
        out = h @ self.weights[-1] + self.biases[-1]
        return out, activations, pre

    def backward(self, d_out: np.ndarray, activations, pre) -> list[np.ndarray]:
        """Gradients of sum(d_out * output) in ``parameters`` order."""
        grads = [None] * (2 * len(self.weights))
        delta = d_out
        for layer in range(len(self.weights) - 1, -1, -1):
            grads[2 * layer] = activations[layer].T @ delta
            grads[2 * layer + 1] = delta.sum(axis=0)
            if layer > 0:
                delta = (delta @ self.weights[layer].T) * (pre[layer - 1] > 0.0)
        return grads

    def clone(self) -> "QNetwork":
        twin = QNetwork.__new__(QNetwork)
        twin.sizes = self.sizes
        twin.weights = [w.copy() for w in self.weights]
        twin.biases = [b.copy() for b in self.biases]
        return twin

    def copy_from(self, other: "QNetwork") -> None:
        if self.sizes != other.sizes:
            raise ValueError("network shapes differ")
        self.weights = [w.copy() for w in other.weights]
        self.biases = [b.copy() for b in other.biases]


def sync_target(online: QNetwork, target: QNetwork) -> None:
    """Hard-copy the online weights into the target network."""
    target.copy_from(online)


class Adam:
    """Adam with bias correction, one moment pair per parameter array."""

    def __init__(self, params, lr: float, beta1=0.9, beta2=0.999, eps=1e-8):
        self.lr = lr
        self.beta1 = beta1
        self.beta2 = beta2
        self.eps = eps
        self.t = 0
        self.m = [np.zeros_like(p) for p in params]
        self.v = [np.zeros_like(p) for p in params]

    def step(self, params, grads) -> None:
        self.t += 1
        for p, g, m, v in zip(params, grads, self.m, self.v):
            m *= self.beta1
            m += (1 - self.beta1) * g
            v *= self.beta2
            v += (1 - self.beta2) * g**2
            m_hat = m / (1 - self.beta1**self.t)
            v_hat = v / (1 - self.beta2**self.t)
            p -= self.lr * m_hat / (np.sqrt(v_hat) + self.eps)


class ReplayBuffer:
    """Fixed-capacity ring of transitions with uniform sampling."""

    def __init__(self, capacity: int, state_dim: int, n_actions: int = N_ACTIONS):
        self.capacity = int(capacity)
        self.states = np.zeros((capacity, state_dim))
        self.actions = np.zeros(capacity, dtype=np.int64)
        self.rewards = np.zeros(capacity)
        self.next_states = np.zeros((capacity, state_dim))
        self.dones = np.zeros(capacity, dtype=bool)
        self.next_masks = np.zeros((capacity, n_actions), dtype=bool)
        self.size = 0
        self.cursor = 0

    def __len__(self) -> int:
        return self.size

    def push(self, state, action, reward, next_state, done, next_mask) -> None:
        """Append one transition, evicting the oldest when full."""
        i = self.cursor
        self.states[i] = state
        self.actions[i] = action
        self.rewards[i] = reward
        self.next_states[i] = next_state
        self.dones[i] = done
        self.next_masks[i] = next_mask
        self.cursor = (i + 1) % self.capacity
        self.size = min(self.size + 1, self.capacity)

    def sample(self, rng: np.random.Generator, batch_size: int) -> dict:
        if self.size < batch_size:
            raise ValueError(f"buffer holds {self.size} < batch of {batch_size}")
        idx = rng.integers(0, self.size, size=batch_size)
        return {
            "states": self.states[idx],
            "actions": self.actions[idx],
            "rewards": self.rewards[idx],
            "next_states": self.next_states[idx],
            "dones": self.dones[idx],
            "next_masks": self.next_masks[idx],
        }


def masked_argmax(q_values: np.ndarray, mask: np.ndarray) -> int:
    """Index of the best legal action; ties break toward lower index."""
    if not mask.any():
        raise ValueError("no valid action to choose from")
    scores = np.where(mask, q_values, -np.inf)
    return int(np.argmax(scores))


def select_action(
    net: QNetwork, state, mask, eps: float, rng: np.random.Generator
) -> int:
    """Epsilon-greedy over the legal actions only."""
    mask = np.asarray(mask, dtype=bool)
    if not mask.any():
        raise ValueError("no valid action to choose from")
    if rng.random() < eps:
        return int(rng.choice(np.flatnonzero(mask)))
    return masked_argmax(net.forward(state), mask)


def ddqn_target(
    reward: float,
    done: bool,
    next_state,
    online: QNetwork,
    target: QNetwork,
    next_mask,
    discount: float,
) -> float:
    """Double-DQN backup value for a single transition."""
    if done:
        return float(reward)
    next_mask = np.asarray(next_mask, dtype=bool)
    best = masked_argmax(online.forward(next_state), next_mask)
    return float(reward + discount * target.forward(next_state)[best])


def _batch_targets(batch: dict, online, target, discount: float) -> np.ndarray:
    targets = batch["rewards"].astype(float).copy()
    live = ~batch["dones"]
    if live.any():
        next_states = batch["next_states"][live]
        if not batch["next_masks"][live].any(axis=1).all():
            raise ValueError("non-terminal transition with an empty action mask")
        online_q = online.forward(next_states)
        scores = np.where(batch["next_masks"][live], online_q, -np.inf)
        best = np.argmax(scores, axis=1)
        target_q = target.forward(next_states)
        targets[live] += discount * target_q[np.arange(len(best)), best]
    return targets


def train_batch(
    online: QNetwork,
    target: QNetwork,
    batch: dict,
    optimizer: Adam,
    config: AgentConfig,
) -> float:
    """One Adam step on the mean Huber loss; returns the loss."""
    targets = _batch_targets(batch, online, target, config.discount)
    out, activations, pre = online.forward_cached(batch["states"])
    rows = np.arange(len(targets))
    picked = out[rows, batch["actions"]]
    values, grad = huber_loss(picked, targets)
    d_out = np.zeros_like(out)
    d_out[rows, batch["actions"]] = grad / len(targets)
    grads = online.backward(d_out, activations, pre)
    optimizer.step(online.parameters, grads)
    return float(values.mean())


class DdqnAgent:
    """Bundles the two networks, the buffer and the optimizer state."""

    def __init__(self, state_dim: int, config: AgentConfig = AgentConfig(), seed: int = 0):
        self.config = config
        self.state_dim = int(state_dim)
        seq = np.random.SeedSequence(seed)
        init_seq, self._action_entropy = seq.spawn(2)
        self.rng = np.random.default_rng(self._action_entropy)
        sizes = (self.state_dim, *config.hidden, N_ACTIONS)
        self.online = QNetwork(sizes, np.random.default_rng(init_seq))
        self.target = self.online.clone()
        self.buffer = ReplayBuffer(config.buffer_capacity, self.state_dim)
        self.optimizer = Adam(self.online.parameters, config.learning_rate)
        self.episodes_trained = 0

    def act(self, state, mask, episode: int, step: int) -> tuple[int, float]:
        eps = epsilon_schedule(
            episode, step, self.config.epsilon_decay, self.config.epsilon_floor
        )
        return select_action(self.online, state, mask, eps, self.rng), eps

    def remember(self, state, action, reward, next_state, done, next_mask) -> None:
        self.buffer.push(state, action, reward, next_state, done, next_mask)

    def finish_episode(self, episode: int) -> Optional[float]:
        """Replay burst plus the periodic target sync; returns mean loss."""
        self.episodes_trained = episode
        loss = None
        if len(self.buffer) >= self.config.batch_size:
            total = 0.0
            for _ in range(self.config.replay_iterations):
                batch = self.buffer.sample(self.rng, self.config.batch_size)
                total += train_batch(
                    self.online, self.target, batch, self.optimizer, self.config
                )
            loss = total / self.config.replay_iterations
            if not np.isfinite(loss):
                raise NumericalFailure(f"training loss diverged: {loss}")
        if episode % self.config.target_sync_every == 0:
            sync_target(self.online, self.target)
        return loss

    # -- checkpointing --------------------------------------------------

    def state_arrays(self) -> dict:
        """Everything needed to resume bit-exactly, as flat arrays."""
        arrays = {}
        for i, w in enumerate(self.online.weights):
            arrays[f"online_w{i}"] = w
            arrays[f"online_b{i}"] = self.online.biases[i]
            arrays[f"target_w{i}"] = self.target.weights[i]
            arrays[f"target_b{i}"] = self.target.biases[i]
        for i, (m, v) in enumerate(zip(self.optimizer.m, self.optimizer.v)):
            arrays[f"adam_m{i}"] = m
            arrays[f"adam_v{i}"] = v
        n = self.buffer.size
        arrays["buffer_states"] = self.buffer.states[:n]
        arrays["buffer_actions"] = self.buffer.actions[:n]
        arrays["buffer_rewards"] = self.buffer.rewards[:n]
        arrays["buffer_next_states"] = self.buffer.next_states[:n]
        arrays["buffer_dones"] = self.buffer.dones[:n]
        arrays["buffer_next_masks"] = self.buffer.next_masks[:n]
        return arrays

    def state_meta(self) -> dict:
        return {
            "sizes": list(self.online.sizes),
            "adam_t": self.optimizer.t,
            "buffer_cursor": self.buffer.cursor,
            "buffer_size": self.buffer.size,
            "episodes_trained": self.episodes_trained,
            "rng_state": json.loads(json.dumps(self.rng.bit_generator.state)),
        }

    def restore(self, arrays: dict, meta: dict) -> None:
        if tuple(meta["sizes"]) != self.online.sizes:
            raise ValueError("checkpoint network shape mismatch")
        for i in range(len(self.online.weights)):
            self.online.weights[i] = np.array(arrays[f"online_w{i}"])
            self.online.biases[i] = np.array(arrays[f"online_b{i}"])
            self.target.weights[i] = np.array(arrays[f"target_w{i}"])
            self.target.biases[i] = np.array(arrays[f"target_b{i}"])
        self.optimizer = Adam(self.online.parameters, self.config.learning_rate)
        for i in range(len(self.optimizer.m)):
            self.optimizer.m[i] = np.array(arrays[f"adam_m{i}"])
            self.optimizer.v[i] = np.array(arrays[f"adam_v{i}"])
        self.optimizer.t = int(meta["adam_t"])
        n = int(meta["buffer_size"])
        self.buffer = ReplayBuffer(self.config.buffer_capacity, self.state_dim)
        self.buffer.states[:n] = arrays["buffer_states"]
        self.buffer.actions[:n] = arrays["buffer_actions"]
        self.buffer.rewards[:n] = arrays["buffer_rewards"]
        self.buffer.next_states[:n] = arrays["buffer_next_states"]
        self.buffer.dones[:n] = arrays["buffer_dones"]
        self.buffer.next_masks[:n] = arrays["buffer_next_masks"]
        self.buffer.size = n
        self.buffer.cursor = int(meta["buffer_cursor"])
        self.episodes_trained = int(meta["episodes_trained"])
        self.rng.bit_generator.state = meta["rng_state"]

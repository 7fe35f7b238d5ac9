"""Training-curve figures from a run's episodes.csv."""

from __future__ import annotations

import csv
import json
from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

from .errors import ConfigError

_NUMERIC = {
    "trial": int,
    "episode": int,
    "steps": int,
    "gate_count": int,
    "depth": int,
    "final_energy": float,
    "cumulative_reward": float,
    "e_threshold": float,
    "e_best": float,
    "epsilon_end": float,
}


def load_episode_table(run_dir) -> list[dict]:
    path = Path(run_dir) / "episodes.csv"
    if not path.is_file():
        raise ConfigError(f"{path} not found; is {run_dir} a run directory?")
    rows = []
    with open(path, newline="") as fh:
        for raw in csv.DictReader(fh):
            try:
                rows.append(
                    {k: _NUMERIC.get(k, str)(v) for k, v in raw.items()}
                )
            except (TypeError, ValueError) as exc:
                raise ConfigError(f"malformed row in {path}: {raw}") from exc
    if not rows:
        raise ConfigError(f"{path} holds no episodes")
    return rows


def episode_means(rows: list[dict], column: str) -> tuple[np.ndarray, np.ndarray]:
    """Per-episode mean of ``column`` across trials."""
    episodes = sorted({row["episode"] for row in rows})
    means = np.empty(len(episodes))
    for i, ep in enumerate(episodes):
        vals = [row[column] for row in rows if row["episode"] == ep]
        means[i] = float(np.mean(vals))
    return np.asarray(episodes), means


def _references(run_dir: Path) -> dict:
    path = run_dir / "summary.json"
    if not path.is_file():
        return {}
    try:
        return json.loads(path.read_text()).get("references", {})
    except json.JSONDecodeError:
        return {}


def emit_plots(run_dir, out_dir=None) -> list[Path]:
    """Write energy, reward, gate count and depth curves as SVG."""
    run_dir = Path(run_dir)
    rows = load_episode_table(run_dir)
    refs = _references(run_dir)
    out = Path(out_dir) if out_dir is not None else run_dir / "plots"
    out.mkdir(parents=True, exist_ok=True)
    n_trials = len({row["trial"] for row in rows})

    panels = [
        ("final_energy", "energy", "final energy"),
        ("cumulative_reward", "reward", "episode reward"),
        ("gate_count", "gate_count", "gate count"),
        ("depth", "depth", "circuit depth"),
    ]
    reference_lines = {
        "final_energy": [
            (refs.get("e_min"), "exact ground state"),
            (refs.get("e_fci"), "full CI"),
            (refs.get("e_hf"), "Hartree-Fock"),
        ],
        "gate_count": [(30, "gate bound")],
        "depth": [(10, "depth bound")],
    }

    written = []
    for column, stem, label in panels:
        episodes, means = episode_means(rows, column)
        fig, ax = plt.subplots(figsize=(6.0, 3.6))
        ax.plot(episodes, means, lw=1.2, color="#1f4e79")
        drawn = set()
        for value, name in reference_lines.get(column, []):
            if value is None or float(value) in drawn:
                continue
            drawn.add(float(value))
            ax.axhline(float(value), ls="--", lw=0.9, color="#a33", alpha=0.8)
            ax.annotate(
                name,
                xy=(episodes[-1], float(value)),
                xytext=(-4, 3),
                textcoords="offset points",
                ha="right",
                fontsize=8,
                color="#a33",
            )
        ax.set_xlabel("episode")
        title = label
        if n_trials > 1:
            title += f" (mean of {n_trials} trials)"
        ax.set_ylabel(label)
        ax.set_title(title, fontsize=10)
        ax.grid(alpha=0.25, lw=0.5)
        fig.tight_layout()
        target = out / f"{stem}.svg"
        fig.savefig(target)
        plt.close(fig)
        written.append(target)
    return written

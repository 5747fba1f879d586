import numpy as np


def random_ball_vectors(rng: np.random.Generator, count: int) -> np.ndarray:
    """Uniform points inside the unit ball."""
    directions = rng.normal(size=(count, 3))
    directions /= np.linalg.norm(directions, axis=1, keepdims=True)
    radii = rng.uniform(0.0, 1.0, size=count) ** (1.0 / 3.0)
    return directions * radii[:, None]

"""Small bundled games used by the docs, the CLI examples, and the tests."""

from __future__ import annotations

import numpy as np

from .game import MultilinearGame

__all__ = ["battle_of_the_sexes", "three_player_sample"]


def battle_of_the_sexes() -> MultilinearGame:
    """The classic 2x2 coordination game.

    Its fully mixed equilibrium is ((0.6, 0.4), (0.4, 0.6)) with value
    0.2 for both players, which scales to the complementarity solution
    (3, 2, 2, 3).
    """
    a1 = np.array([[2.0, -1.0], [-1.0, 1.0]])
    a2 = np.array([[1.0, -1.0], [-1.0, 2.0]])
    return MultilinearGame([a1, a2], name="battle-of-the-sexes")


def three_player_sample() -> MultilinearGame:
    """A fixed three-player game with strategy counts (2, 3, 2).

    Carries a known pure equilibrium at strategies (1, 1, 1) whose
    complementarity image has support exactly on those coordinates; the
    acceptance suite pins its solution to four decimals.
    """
    a1 = np.zeros((2, 3, 2))
    a1[:, :, 0] = [[0.0605, 0.5269, 0.6569], [0.3993, 0.4168, 0.6280]]
    a1[:, :, 1] = [[0.2920, 0.0155, 0.1672], [0.4317, 0.9841, 0.1062]]
    a2 = np.zeros((2, 3, 2))
    a2[:, :, 0] = [[0.3724, 0.4897, 0.9516], [0.1981, 0.3395, 0.9203]]
    a2[:, :, 1] = [[0.0527, 0.2691, 0.5479], [0.7379, 0.4228, 0.9427]]
    a3 = np.zeros((2, 3, 2))
    a3[:, :, 0] = [[0.4177, 0.3015, 0.6663], [0.9831, 0.7011, 0.5391]]
    a3[:, :, 1] = [[0.6981, 0.1781, 0.9991], [0.6665, 0.1280, 0.1711]]
    return MultilinearGame([a1, a2, a3], name="three-player-sample")

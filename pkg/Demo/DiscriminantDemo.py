"""
Draws F(sigma) of a designed necklace as a bar chart in the terminal.

    python Demo/DiscriminantDemo.py [sigma0] [eps]
"""

import pathlib
import sys
from typing import Iterator, Sequence

import numpy as np

sys.path.insert(0, str(pathlib.Path(__file__).resolve().parent.parent / "NecklaceWaveguide"))

from GraphModel.VertexCondition import VertexCondition  # noqa: E402
from Monodromy.Transfer import discriminant_kernel  # noqa: E402
from Designer.DesignLogic import DesignRequest  # noqa: E402
from Designer.DesignManager import design  # noqa: E402


CLIP = 4.0
ROWS = 16
COLUMNS = 100


def visualizer_closure(table, fill=True):
    conversion_table = table
    lim = len(conversion_table) - 1

    def inner(data: Sequence[int]) -> Iterator[str]:
        def string_gen(item: int):
            while True:
                try:
                    yield conversion_table[item]
                except IndexError:
                    yield conversion_table[-1] if fill else conversion_table[0]
                    item -= lim
                else:
                    break

        string_lines = ["".join(string_gen(n)) for n in data]
        max_length = max(map(len, string_lines))
        length_normalized = (line.ljust(max_length) for line in string_lines)

        return reversed(["".join(n) for n in zip(*length_normalized)])

    inner.num_per_ch = len(table) - 1

    return inner


visualize = visualizer_closure((" ", ".", ":", "|"))


def draw(sigma: np.ndarray, f: np.ndarray):
    # poles show up as full-height columns
    clipped = np.where(np.isnan(f), CLIP, np.clip(f, -CLIP, CLIP))
    levels = np.rint((clipped + CLIP) / (2 * CLIP) * ROWS * visualize.num_per_ch).astype(int)

    lines = list(visualize(levels.tolist()))
    for idx, line in enumerate(lines):
        value = CLIP - 2 * CLIP * idx / max(len(lines) - 1, 1)
        print(f"{line} _ {value:+.1f}")

    print(f"sigma {sigma[0]:.4f} .. {sigma[-1]:.4f}, band where |F| < 2")


def main():
    sigma0 = float(sys.argv[1]) if len(sys.argv) > 1 else 5.0
    eps = float(sys.argv[2]) if len(sys.argv) > 2 else 0.1

    vc = VertexCondition.from_blocks([[1.0, 0.5], [0.5, 2.0]], (1.0, 2.0), 0.3)
    result = design(DesignRequest(vc, sigma0, eps))
    print(f"l1 = {result.l1:.6f}, l2 = {result.l2:.6f}, l3 = {result.l3:.6f}")

    half = 20 * eps ** 2 + 0.05
    sigma = np.linspace(sigma0 - half, sigma0 + half, COLUMNS)
    f, *_ = discriminant_kernel(result.params, sigma)

    draw(sigma, f)


if __name__ == '__main__':
    main()

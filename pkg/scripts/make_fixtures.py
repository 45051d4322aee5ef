"""Write the three fixtures used by configs/directional.yaml."""

import argparse
from pathlib import Path

from gsmote.fixtures import write_fixture

# name, kind, imbalance ratio, label noise, seed
FIXTURES = [
    ("two_gaussians_ir20", "two_gaussians", 20, 0.05, 1),
    ("noisy_moons_ir10", "noisy_moons", 10, 0.0, 2),
    ("sparse_clusters_ir15", "sparse_clusters", 15, 0.0, 3),
]


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--out", type=Path, default=Path("data"))
    parser.add_argument("--n", type=int, default=1000)
    args = parser.parse_args()
    args.out.mkdir(parents=True, exist_ok=True)
    for name, kind, ir, noise, seed in FIXTURES:
        d = write_fixture(args.out / f"{name}.csv", kind, ir, args.n, seed, noise)
        print(f"{name}: {d.n_majority} majority / {d.n_minority} minority")


if __name__ == "__main__":
    main()

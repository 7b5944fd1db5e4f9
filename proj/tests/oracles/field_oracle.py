"""Writes tests/data/field_oracle.csv: random agent/person configurations and
the clamped pairwise field, computed with vector algebra and numpy."""
import sys

import numpy as np

M_A, N_A, M_P, N_P = 0.321, 0.856, 0.438, 0.630
A, B, C, K = 0.285, 0.175, 1.430, 10.180


def influence(pos, heading, other, m, n):
    facing = np.array([np.cos(heading), np.sin(heading)])
    long_axis = np.array([-np.sin(heading), np.cos(heading)])
    u = (other - pos) / np.linalg.norm(other - pos)
    cos_h = float(facing @ u)
    cos_t = float(long_axis @ u)
    sin_t = float(long_axis[0] * u[1] - long_axis[1] * u[0])
    ica = A * B / np.sqrt((A * cos_t) ** 2 + (B * sin_t) ** 2)
    return m * max(cos_h, 0.0) + n + C * ica


def field(agent, agent_heading, person, person_heading):
    d2 = float(np.sum((person - agent) ** 2))
    ia = influence(agent, agent_heading, person, M_A, N_A)
    ip = influence(person, person_heading, agent, M_P, N_P)
    return min(ia * ip / d2 / K, 1.0)


def main(path, count=1000, seed=20240917):
    rng = np.random.default_rng(seed)
    with open(path, "w") as out:
        out.write("ax,ay,ah,px,py,ph,field\n")
        for i in range(count):
            agent = rng.uniform(0.0, 15.0, 2)
            # A quarter of the cases sit within 1.5 m to exercise the clamp.
            if i % 4 == 0:
                r, phi = rng.uniform(0.05, 1.5), rng.uniform(-np.pi, np.pi)
                person = agent + r * np.array([np.cos(phi), np.sin(phi)])
            else:
                person = rng.uniform(0.0, 15.0, 2)
            ah, ph = rng.uniform(-np.pi, np.pi, 2)
            f = field(agent, ah, person, ph)
            vals = [*agent, ah, *person, ph, f]
            out.write(",".join(f"{v:.17g}" for v in vals) + "\n")


if __name__ == "__main__":
    main(sys.argv[1] if len(sys.argv) > 1 else "tests/data/field_oracle.csv")

#!/usr/bin/env python3
"""Regenerates the reference scenarios in scenarios/.

Maps are drawn as free rectangles carved out of solid wall, 0.1 m cells.
"""
import json
import pathlib

RES = 0.1


def carve(width_m, height_m, rects):
    w, h = round(width_m / RES), round(height_m / RES)
    grid = [["#"] * w for _ in range(h)]
    for x0, y0, x1, y1 in rects:
        for r in range(round(y0 / RES), round(y1 / RES)):
            for c in range(round(x0 / RES), round(x1 / RES)):
                grid[r][c] = "."
    # the first string is the top row
    return {
        "width": w,
        "height": h,
        "resolution": RES,
        "origin": [0.0, 0.0, 0.0],
        "rows": ["".join(row) for row in reversed(grid)],
    }


def compliant(pid, x, y, delay, sidestep):
    return {
        "id": pid,
        "start": [x, y, 3.141592653589793],
        "radius": 0.3,
        "policy": {"type": "compliant", "p_comply": 1.0, "delay": delay, "sidestep": sidestep},
    }


def free_corridor():
    return {
        "map": carve(16.0, 4.0, [(1.0, 1.1, 15.0, 2.9)]),
        "destinations": {"exit": [14.0, 2.0, 0.0]},
        "robot_start": [2.0, 2.0, 0.0],
        "goal_label": "exit",
        "pedestrians": [],
        "seed": 1,
    }


def blocked_with_detour():
    rects = [
        (1.0, 1.1, 15.0, 2.9),   # main corridor
        (3.4, 2.9, 4.6, 6.2),    # west connector
        (9.4, 2.9, 10.6, 6.2),   # east connector
        (3.4, 5.0, 10.6, 6.2),   # side corridor
        (6.0, 0.1, 7.0, 1.1),    # niches beside the blockers
        (6.0, 2.9, 7.0, 3.9),
    ]
    return {
        "map": carve(16.0, 7.0, rects),
        "destinations": {"exit": [14.0, 2.0, 0.0], "lobby": [7.0, 5.6, 0.0]},
        "robot_start": [2.0, 2.0, 0.0],
        "goal_label": "exit",
        "pedestrians": [
            compliant("p1", 6.5, 2.45, 1.0, 0.9),
            compliant("p2", 6.5, 1.55, 1.0, 0.9),
        ],
        "seed": 7,
    }


def sole_corridor():
    rects = [
        (1.0, 2.1, 15.0, 3.9),
        (7.5, 1.1, 8.5, 2.1),
        (7.5, 3.9, 8.5, 4.9),
    ]
    return {
        "map": carve(16.0, 6.0, rects),
        "destinations": {"exit": [14.5, 3.0, 0.0]},
        "robot_start": [1.5, 3.0, 0.0],
        "goal_label": "exit",
        "pedestrians": [
            compliant("p1", 8.0, 3.45, 2.0, 0.9),
            compliant("p2", 8.0, 2.55, 2.0, 0.9),
        ],
        "seed": 7,
    }


def main():
    out = pathlib.Path(__file__).resolve().parent.parent / "scenarios"
    out.mkdir(exist_ok=True)
    for name, doc in [
        ("a_free_corridor", free_corridor()),
        ("b_blocked_with_detour", blocked_with_detour()),
        ("c_blocked_sole_corridor", sole_corridor()),
    ]:
        (out / f"{name}.json").write_text(json.dumps(doc, indent=1) + "\n")


if __name__ == "__main__":
    main()

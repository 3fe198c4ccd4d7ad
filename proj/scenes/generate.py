#!/usr/bin/env python3
"""Writes the bundled scene logs (sample positions are computed, not typed)."""
import math
import os

HERE = os.path.dirname(os.path.abspath(__file__))


def fibonacci(n, radii, center=(0.0, 0.0, 0.0)):
    a, b, c = radii
    golden = math.pi * (3.0 - math.sqrt(5.0))
    out = []
    for i in range(n):
        z = 1.0 - 2.0 * (i + 0.5) / n
        r = math.sqrt(1.0 - z * z)
        x, y = r * math.cos(golden * i), r * math.sin(golden * i)
        p = (center[0] + a * x, center[1] + b * y, center[2] + c * z)
        g = (x / a, y / b, z / c)
        k = math.sqrt(sum(v * v for v in g))
        out.append(p + tuple(v / k for v in g))
    return out


def samples_line(op, samples):
    return op + " " + str(len(samples)) + " " + " ".join("%.17g" % v for s in samples for v in s)


def arc(n, radius, z_height, theta0, theta1):
    pts = []
    for i in range(n):
        t = theta0 + (theta1 - theta0) * i / (n - 1)
        r = math.sqrt(max(radius * radius - z_height * z_height, 0.0))
        pts.append((r * math.cos(t), r * math.sin(t), z_height))
    return pts


def stroke_line(h, r, pts):
    return "SketchHeightCurve %.17g %.17g %d " % (h, r, len(pts)) + " ".join("%.17g" % v for p in pts for v in p)


def write(name, lines):
    with open(os.path.join(HERE, name), "w") as f:
        f.write("\n".join(lines) + "\n")


# Sphere of radius 0.5, a cube tesel and one sketched ridge over the top.
write("bump.log", [
    "dass-scene 1",
    "seed 7",
    "config epsilon 0.001",
    "config error simple",
    "# sphere-like coarse shape with a single height curve",
    samples_line("SetSamples", fibonacci(120, (0.5, 0.5, 0.5))),
    "EditTesels new -0.3 -0.3 0.3 0.3",
    "Lift",
    "InitAtlas",
    stroke_line(0.04, 0.03, arc(12, 0.5, 0.35, 0.3, 1.6)),
])

# Elongated body with a split tesel and two strokes.
write("duck.log", [
    "dass-scene 1",
    "seed 11",
    "config epsilon 0.002",
    samples_line("SetSamples", fibonacci(90, (0.6, 0.4, 0.35))),
    "EditTesels new -0.4 -0.22 0.4 0.22",
    "EditTesels subdivide 0 U",
    "Lift",
    "InitAtlas",
    stroke_line(0.03, 0.06, [(0.45 * math.cos(t), 0.3 * math.sin(t), 0.15) for t in [0.2 + 0.15 * i for i in range(10)]]),
    stroke_line(-0.02, 0.05, [(-0.3 + 0.06 * i, -0.1, 0.3) for i in range(8)]),
    "SetEpsilon 0.0015",
])

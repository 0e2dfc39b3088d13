import math

import numpy as np
import pytest

from cineplan import demo
from cineplan.cinespace import CineRig, CineSpaceParams


@pytest.fixture(scope="session")
def demo_scene():
    return demo.build_demo_scene()


@pytest.fixture()
def axis_rig():
    """The axis-aligned reference rig: A(-1,0,0), B(1,0,0), Q at the origin."""
    return CineRig(subject_a=(-1.0, 0.0, 0.0), subject_b=(1.0, 0.0, 0.0))


def random_rig(rng, blend_range=(0.0, 1.0), baseline_range=(0.5, 3.0)):
    direction = rng.normal(size=3)
    direction /= np.linalg.norm(direction)
    a = rng.uniform(-3.0, 3.0, 3)
    b = a + rng.uniform(*baseline_range) * direction
    return CineRig(a, b, blend=rng.uniform(*blend_range),
                   rig_yaw=rng.uniform(0.0, 2.0 * math.pi))


def random_params(rng, phi_limit_deg=85.0):
    return CineSpaceParams(
        d=rng.uniform(0.5, 20.0),
        theta=rng.uniform(0.0, 2.0 * math.pi),
        phi=rng.uniform(-phi_limit_deg, phi_limit_deg) * math.pi / 180.0,
        focal_mm=rng.uniform(18.0, 85.0),
        screen_offset=rng.uniform(-0.2, 0.2),
    )


def random_triangle_scene(rng, max_triangles=20):
    """Random free triangles in front of an identity camera (z in -20..-2).

    Triangles are grouped into a few objects so id agreement is non-trivial.
    """
    from cineplan.scene import SceneDoc, StaticMesh

    n_objects = int(rng.integers(2, 5))
    remaining = int(rng.integers(n_objects, max_triangles + 1))
    objects = []
    for k in range(n_objects):
        take = max(1, remaining // (n_objects - k))
        remaining -= take
        verts, faces = [], []
        for t in range(take):
            base = np.array([rng.uniform(-4, 4), rng.uniform(-4, 4),
                             rng.uniform(-20.0, -2.0)])
            tri = base + rng.uniform(-2.0, 2.0, (3, 3))
            tri[:, 2] = np.clip(tri[:, 2], -21.0, -1.5)
            start = len(verts)
            verts.extend(tri.tolist())
            faces.append([start, start + 1, start + 2])
        objects.append(StaticMesh(object_id=f"obj{k}", name=f"Obj{k}",
                                  vertices=verts, faces=faces))
    return SceneDoc(objects=tuple(objects))

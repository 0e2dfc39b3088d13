"""Brute-force ray-casting oracle, independent of the rasterizer.

Per pixel center a ray is cast from the camera origin and intersected
against every primitive analytically: Moller-Trumbore for triangles and the
quadratic cylinder/sphere-cap solution for capsules (the rasterizer instead
tessellates capsules, which is what makes this a genuinely independent
check). The ray direction is scaled so its camera-space z component is -1,
making the ray parameter t equal to the metric depth along -Z.
"""

import numpy as np

from cineplan.scene import Character, bone_capsules

BACKGROUND = -1


def pixel_rays(pose, intr, width, height):
    """World-space ray origins/directions through every pixel center."""
    jj, ii = np.meshgrid(np.arange(width), np.arange(height))
    cx, cy = jj + 0.5, ii + 0.5
    ndc_x = 2.0 * cx / width - 1.0
    ndc_y = 1.0 - 2.0 * cy / height
    k = intr.tan_half_hfov
    dirs_cam = np.stack([ndc_x * k, ndc_y * k / intr.aspect,
                         -np.ones_like(ndc_x)], axis=-1)
    dirs_world = dirs_cam @ pose.rotation.T
    return pose.translation, dirs_world.reshape(-1, 3)


def _triangle_hits(origin, dirs, v0, v1, v2):
    """Ray parameter t per ray (inf for misses), both-sided."""
    e1, e2 = v1 - v0, v2 - v0
    pvec = np.cross(dirs, e2)
    det = pvec @ e1
    t_out = np.full(len(dirs), np.inf)
    ok = np.abs(det) > 1e-15
    if not ok.any():
        return t_out
    inv_det = np.where(ok, 1.0 / np.where(ok, det, 1.0), 0.0)
    tvec = origin - v0
    u = (pvec @ tvec) * inv_det
    qvec = np.cross(tvec, e1)
    v = (dirs @ qvec) * inv_det
    t = float(e2 @ qvec) * inv_det
    hit = ok & (u >= 0) & (v >= 0) & (u + v <= 1.0) & (t > 0)
    t_out[hit] = t[hit]
    return t_out


def _capsule_hits(origin, dirs, p0, p1, radius):
    """Smallest positive ray parameter against an analytic capsule."""
    with np.errstate(invalid="ignore"):  # inf ray params feed the clamp tests
        return _capsule_hits_impl(origin, dirs, p0, p1, radius)


def _capsule_hits_impl(origin, dirs, p0, p1, radius):
    t_out = np.full(len(dirs), np.inf)
    axis = p1 - p0
    len2 = float(axis @ axis)

    # infinite cylinder part, clamped to the segment
    if len2 > 1e-18:
        d_par = (dirs @ axis)[:, None] * axis / len2
        d_perp = dirs - d_par
        oc = origin - p0
        o_par = float(oc @ axis) / len2 * axis
        o_perp = oc - o_par
        a = np.einsum("ij,ij->i", d_perp, d_perp)
        b = d_perp @ o_perp
        c = float(o_perp @ o_perp) - radius * radius
        disc = b * b - a * c
        ok = (disc >= 0) & (a > 1e-18)
        root = np.sqrt(np.where(ok, disc, 0.0))
        for sign in (-1.0, 1.0):
            t = np.where(ok, (-b + sign * root) / np.where(a > 1e-18, a, 1.0), np.inf)
            s = ((origin + t[:, None] * dirs) - p0) @ axis / len2
            valid = ok & (t > 0) & (s >= 0) & (s <= 1)
            t_out = np.minimum(t_out, np.where(valid, t, np.inf))

    for center in (p0, p1):
        oc = origin - center
        b = dirs @ oc
        a = np.einsum("ij,ij->i", dirs, dirs)
        c = float(oc @ oc) - radius * radius
        disc = b * b - a * c
        ok = disc >= 0
        root = np.sqrt(np.where(ok, disc, 0.0))
        for sign in (-1.0, 1.0):
            t = np.where(ok, (-b + sign * root) / a, np.inf)
            valid = ok & (t > 0)
            if len2 > 1e-18:
                s = ((origin + t[:, None] * dirs) - p0) @ axis / len2
                valid &= (s <= 0) if center is p0 else (s >= 1)
            t_out = np.minimum(t_out, np.where(valid, t, np.inf))
    return t_out


def raycast(scene, t_s, pose, intr, width, height):
    """(depth, ids) buffers computed by per-pixel ray casting."""
    origin, dirs = pixel_rays(pose, intr, width, height)
    n = len(dirs)
    best_t = np.full(n, np.inf)
    best_id = np.full(n, BACKGROUND, dtype=np.int32)
    for index, obj in enumerate(scene.objects):
        if isinstance(obj, Character):
            for p0, p1, radius in bone_capsules(obj, t_s):
                t = _capsule_hits(origin, dirs, p0, p1, radius)
                t = np.where(t >= intr.near_m, t, np.inf)
                closer = t < best_t
                best_t[closer] = t[closer]
                best_id[closer] = index
        else:
            world = obj.world_vertices()
            for face in obj.faces:
                t = _triangle_hits(origin, dirs, world[face[0]], world[face[1]],
                                   world[face[2]])
                t = np.where(t >= intr.near_m, t, np.inf)
                closer = t < best_t
                best_t[closer] = t[closer]
                best_id[closer] = index
    return best_t.reshape(height, width), best_id.reshape(height, width)


def edge_pixels(scene, t_s, pose, intr, width, height, margin_px=1.0):
    """Pixels within margin of any projected triangle edge (screen space)."""
    jj, ii = np.meshgrid(np.arange(width), np.arange(height))
    cx, cy = (jj + 0.5).astype(float), (ii + 0.5).astype(float)
    near_edge = np.zeros((height, width), dtype=bool)
    k = intr.tan_half_hfov
    for obj in scene.objects:
        if isinstance(obj, Character):
            continue
        world = obj.world_vertices()
        cam = (world - pose.translation) @ pose.rotation
        z = -cam[:, 2]
        if np.any(z <= intr.near_m):
            raise AssertionError("edge oracle expects fully in-front geometry")
        px = (cam[:, 0] / (z * k) + 1.0) * width / 2.0
        py = (1.0 - cam[:, 1] * intr.aspect / (z * k)) * height / 2.0
        for face in obj.faces:
            for a, b in ((0, 1), (1, 2), (2, 0)):
                x0, y0 = px[face[a]], py[face[a]]
                x1, y1 = px[face[b]], py[face[b]]
                lo_x = max(0, int(min(x0, x1) - margin_px - 2))
                hi_x = min(width, int(max(x0, x1) + margin_px + 3))
                lo_y = max(0, int(min(y0, y1) - margin_px - 2))
                hi_y = min(height, int(max(y0, y1) + margin_px + 3))
                if lo_x >= hi_x or lo_y >= hi_y:
                    continue
                sx = cx[lo_y:hi_y, lo_x:hi_x]
                sy = cy[lo_y:hi_y, lo_x:hi_x]
                dx, dy = x1 - x0, y1 - y0
                denom = dx * dx + dy * dy
                if denom < 1e-12:
                    dist2 = (sx - x0) ** 2 + (sy - y0) ** 2
                else:
                    t = np.clip(((sx - x0) * dx + (sy - y0) * dy) / denom, 0, 1)
                    dist2 = (sx - (x0 + t * dx)) ** 2 + (sy - (y0 + t * dy)) ** 2
                near_edge[lo_y:hi_y, lo_x:hi_x] |= dist2 <= margin_px ** 2
    return near_edge

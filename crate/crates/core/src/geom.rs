//! Small planar helpers shared across modules.

use glam::DVec2;
use std::f64::consts::PI;

/// Wraps an angle into (-pi, pi].
pub fn wrap_angle(theta: f64) -> f64 {
    let mut a = theta.rem_euclid(2.0 * PI);
    if a > PI {
        a -= 2.0 * PI;
    }
    // rem_euclid maps -pi to pi already; guard the 2pi rounding edge.
    if a <= -PI {
        a += 2.0 * PI;
    }
    a
}

/// Unit vector along heading `theta`.
pub fn heading(theta: f64) -> DVec2 {
    DVec2::new(theta.cos(), theta.sin())
}

/// Even-odd point-in-polygon test. Points exactly on an edge may fall either way.
pub fn polygon_contains(polygon: &[DVec2], p: DVec2) -> bool {
    let n = polygon.len();
    if n < 3 {
        return false;
    }
    let mut inside = false;
    let mut j = n - 1;
    for i in 0..n {
        let (a, b) = (polygon[i], polygon[j]);
        if (a.y > p.y) != (b.y > p.y) {
            let x_cross = a.x + (p.y - a.y) * (b.x - a.x) / (b.y - a.y);
            if p.x < x_cross {
                inside = !inside;
            }
        }
        j = i;
    }
    inside
}

/// Distance from `p` to the polygon region: 0 inside, else the distance to the nearest edge.
pub fn polygon_distance(polygon: &[DVec2], p: DVec2) -> f64 {
    if polygon_contains(polygon, p) {
        return 0.0;
    }
    let n = polygon.len();
    (0..n)
        .map(|i| {
            let (a, b) = (polygon[i], polygon[(i + 1) % n]);
            let ab = b - a;
            let s = if ab.length_squared() > 0.0 { ((p - a).dot(ab) / ab.length_squared()).clamp(0.0, 1.0) } else { 0.0 };
            p.distance(a + ab * s)
        })
        .fold(f64::INFINITY, f64::min)
}

/// Rounds to 9 significant decimal digits so serialized traces stay byte-stable.
pub fn round_sig9(x: f64) -> f64 {
    if !x.is_finite() || x == 0.0 {
        return x;
    }
    format!("{:.8e}", x).parse().unwrap_or(x)
}

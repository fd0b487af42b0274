//! Planar reference paths.
//!
//! A [`Path`] is a polyline resampled at a fixed arc-length step with
//! per-sample heading and signed curvature. All agents in the simulator move
//! along a path; their state is a single longitudinal coordinate that is
//! mapped back to world coordinates through [`Path::pose_at`].

use nalgebra::Vector2;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type Point = Vector2<f64>;

/// Default arc-length spacing of resampled paths (m).
pub const DEFAULT_STEP: f64 = 0.5;

const EPS: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
pub struct PathId(pub u32);

#[derive(Debug, Clone, PartialEq)]
pub struct Path {
    id: PathId,
    step: f64,
    points: Vec<Point>,
    arclength: Vec<f64>,
    curvature: Vec<f64>,
    heading: Vec<f64>,
}

/// Location of an agent on a path.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PathPose {
    pub path_id: PathId,
    pub longitudinal: f64,
    pub position: Point,
    pub heading: f64,
    pub curvature: f64,
}

/// Crossing of two paths, expressed in the longitudinal coordinate of each.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IntersectionPoint {
    pub path_a: PathId,
    pub path_b: PathId,
    pub arclength_a: f64,
    pub arclength_b: f64,
    pub position: Point,
}

impl IntersectionPoint {
    pub fn swapped(&self) -> Self {
        Self {
            path_a: self.path_b,
            path_b: self.path_a,
            arclength_a: self.arclength_b,
            arclength_b: self.arclength_a,
            position: self.position,
        }
    }
}

impl Path {
    /// Builds a path from raw points, resampled at [`DEFAULT_STEP`].
    pub fn new(points: &[Point]) -> Result<Self> {
        Self::with_step(points, DEFAULT_STEP)
    }

    pub fn with_step(points: &[Point], step: f64) -> Result<Self> {
        if !(step > 0.0 && step.is_finite()) {
            return Err(Error::Construction(format!("invalid resampling step {step}")));
        }
        if points.len() < 3 {
            return Err(Error::Construction(format!(
                "a path needs at least 3 points, got {}",
                points.len()
            )));
        }
        if let Some(i) = points.iter().position(|p| !(p.x.is_finite() && p.y.is_finite())) {
            return Err(Error::Construction(format!("point {i} is not finite")));
        }
        for (i, w) in points.windows(2).enumerate() {
            if (w[1] - w[0]).norm() <= EPS {
                return Err(Error::Construction(format!(
                    "duplicate consecutive points at index {i} and {}",
                    i + 1
                )));
            }
        }

        let raw_s = cumulative_arclength(points);
        let raw_heading = tangent_headings(points);
        let raw_kappa = circumscribed_curvature(points);
        let total = *raw_s.last().unwrap();

        let mut stations: Vec<f64> = Vec::with_capacity((total / step) as usize + 2);
        let mut k = 0usize;
        loop {
            let s = k as f64 * step;
            if s >= total - 1e-6 * step {
                break;
            }
            stations.push(s);
            k += 1;
        }
        stations.push(total);
        if stations.len() < 3 {
            // Very short input: keep the original samples.
            stations = raw_s.clone();
        }

        let mut out = Path {
            id: PathId::default(),
            step,
            points: Vec::with_capacity(stations.len()),
            arclength: Vec::with_capacity(stations.len()),
            curvature: Vec::with_capacity(stations.len()),
            heading: Vec::with_capacity(stations.len()),
        };
        let mut seg = 0usize;
        for &s in &stations {
            while seg + 2 < raw_s.len() && raw_s[seg + 1] < s {
                seg += 1;
            }
            let len = raw_s[seg + 1] - raw_s[seg];
            let f = ((s - raw_s[seg]) / len).clamp(0.0, 1.0);
            out.points.push(points[seg] + (points[seg + 1] - points[seg]) * f);
            out.arclength.push(s);
            out.curvature
                .push(raw_kappa[seg] + (raw_kappa[seg + 1] - raw_kappa[seg]) * f);
            out.heading
                .push(lerp_angle(raw_heading[seg], raw_heading[seg + 1], f));
        }
        Ok(out)
    }

    pub fn with_id(mut self, id: PathId) -> Self {
        self.id = id;
        self
    }

    pub fn id(&self) -> PathId {
        self.id
    }

    pub fn step(&self) -> f64 {
        self.step
    }

    pub fn points(&self) -> &[Point] {
        &self.points
    }

    pub fn arclength(&self) -> &[f64] {
        &self.arclength
    }

    pub fn curvature(&self) -> &[f64] {
        &self.curvature
    }

    pub fn heading(&self) -> &[f64] {
        &self.heading
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn total_length(&self) -> f64 {
        *self.arclength.last().unwrap()
    }

    /// Index `i` of the sample interval `[s_i, s_{i+1}]` containing `l`.
    fn bracket(&self, l: f64) -> usize {
        let n = self.arclength.len();
        let mut i = ((l / self.step).max(0.0) as usize).min(n - 2);
        while i + 2 < n && self.arclength[i + 1] < l {
            i += 1;
        }
        while i > 0 && self.arclength[i] > l {
            i -= 1;
        }
        i
    }

    /// Interpolated pose at arc length `l`. Fails outside `[0, total_length]`.
    pub fn pose_at(&self, l: f64) -> Result<PathPose> {
        let total = self.total_length();
        if !(l >= -EPS && l <= total + EPS) {
            return Err(Error::Domain(format!(
                "arc length {l} outside path [0, {total}]"
            )));
        }
        let l = l.clamp(0.0, total);
        let i = self.bracket(l);
        let f = (l - self.arclength[i]) / (self.arclength[i + 1] - self.arclength[i]);
        Ok(PathPose {
            path_id: self.id,
            longitudinal: l,
            position: self.points[i] + (self.points[i + 1] - self.points[i]) * f,
            heading: lerp_angle(self.heading[i], self.heading[i + 1], f),
            curvature: self.curvature[i] + (self.curvature[i + 1] - self.curvature[i]) * f,
        })
    }

    /// Like [`Path::pose_at`], but continues straight at the end headings
    /// beyond either end of the path (zero curvature there).
    pub fn pose_extended(&self, l: f64) -> PathPose {
        let total = self.total_length();
        if l > total {
            let h = *self.heading.last().unwrap();
            let end = *self.points.last().unwrap();
            PathPose {
                path_id: self.id,
                longitudinal: l,
                position: end + Point::new(h.cos(), h.sin()) * (l - total),
                heading: h,
                curvature: 0.0,
            }
        } else if l < 0.0 {
            let h = self.heading[0];
            PathPose {
                path_id: self.id,
                longitudinal: l,
                position: self.points[0] + Point::new(h.cos(), h.sin()) * l,
                heading: h,
                curvature: 0.0,
            }
        } else {
            self.pose_at(l).expect("l within path")
        }
    }

    /// Curvature at `l` (zero beyond the path ends).
    pub fn curvature_at(&self, l: f64) -> f64 {
        if l < 0.0 || l > self.total_length() {
            return 0.0;
        }
        let i = self.bracket(l);
        let f = (l - self.arclength[i]) / (self.arclength[i + 1] - self.arclength[i]);
        self.curvature[i] + (self.curvature[i + 1] - self.curvature[i]) * f
    }

    /// Largest |κ| of the next curve segment at or ahead of `l`.
    ///
    /// A curve segment is a maximal run of samples with |κ| above
    /// `kappa_threshold`. If `l` already lies inside such a run, that run is
    /// the one reported. Returns `None` when no segment lies ahead.
    pub fn max_curvature_ahead(&self, l: f64, kappa_threshold: f64) -> Option<f64> {
        let total = self.total_length();
        if l > total {
            return None;
        }
        let start = self.bracket(l.max(0.0));
        let mut best: Option<f64> = None;
        for k in &self.curvature[start..] {
            let k = k.abs();
            if k > kappa_threshold {
                best = Some(best.map_or(k, |b| b.max(k)));
            } else if best.is_some() {
                break;
            }
        }
        best
    }

    /// Arc length of the sample closest to `p` (coarse projection).
    pub fn project(&self, p: &Point) -> f64 {
        let mut best = (f64::INFINITY, 0.0);
        for (i, w) in self.points.windows(2).enumerate() {
            let d = w[1] - w[0];
            let t = ((p - w[0]).dot(&d) / d.norm_squared()).clamp(0.0, 1.0);
            let dist = (w[0] + d * t - p).norm_squared();
            if dist < best.0 {
                best = (dist, self.arclength[i] + t * (self.arclength[i + 1] - self.arclength[i]));
            }
        }
        best.1
    }

    /// Distance from `p` to the polyline.
    pub fn distance_to(&self, p: &Point) -> f64 {
        self.points
            .windows(2)
            .map(|w| {
                let d = w[1] - w[0];
                let t = ((p - w[0]).dot(&d) / d.norm_squared()).clamp(0.0, 1.0);
                (w[0] + d * t - p).norm()
            })
            .fold(f64::INFINITY, f64::min)
    }
}

/// First crossing of `a` and `b`, ordered by arc length along `a`.
pub fn find_intersection(a: &Path, b: &Path) -> Option<IntersectionPoint> {
    let (bmin, bmax) = bounds(b.points());
    for i in 0..a.points.len() - 1 {
        let p0 = a.points[i];
        let p1 = a.points[i + 1];
        if p0.x.max(p1.x) < bmin.x - EPS
            || p0.x.min(p1.x) > bmax.x + EPS
            || p0.y.max(p1.y) < bmin.y - EPS
            || p0.y.min(p1.y) > bmax.y + EPS
        {
            continue;
        }
        let mut best: Option<(f64, usize, f64)> = None;
        for j in 0..b.points.len() - 1 {
            if let Some((t, u)) = segment_intersection(p0, p1, b.points[j], b.points[j + 1]) {
                if best.is_none_or(|(bt, _, _)| t < bt) {
                    best = Some((t, j, u));
                }
            }
        }
        if let Some((t, j, u)) = best {
            let sa = a.arclength[i] + t * (a.arclength[i + 1] - a.arclength[i]);
            let sb = b.arclength[j] + u * (b.arclength[j + 1] - b.arclength[j]);
            return Some(IntersectionPoint {
                path_a: a.id,
                path_b: b.id,
                arclength_a: sa,
                arclength_b: sb,
                position: p0 + (p1 - p0) * t,
            });
        }
    }
    None
}

/// Parameters `(t, u)` of the first common point of segments `p0p1` and
/// `q0q1`, endpoints included. Collinear overlaps report the overlap start.
pub(crate) fn segment_intersection(p0: Point, p1: Point, q0: Point, q1: Point) -> Option<(f64, f64)> {
    let r = p1 - p0;
    let s = q1 - q0;
    let qp = q0 - p0;
    let denom = cross(r, s);
    let scale = r.norm() * s.norm();
    if denom.abs() > 1e-12 * scale {
        let t = cross(qp, s) / denom;
        let u = cross(qp, r) / denom;
        let tol = 1e-9;
        if (-tol..=1.0 + tol).contains(&t) && (-tol..=1.0 + tol).contains(&u) {
            return Some((t.clamp(0.0, 1.0), u.clamp(0.0, 1.0)));
        }
        return None;
    }
    // Parallel: only collinear overlaps count.
    if cross(qp, r).abs() > 1e-9 * r.norm() {
        return None;
    }
    let rr = r.norm_squared();
    let t0 = qp.dot(&r) / rr;
    let t1 = (q1 - p0).dot(&r) / rr;
    let lo = t0.min(t1).max(0.0);
    let hi = t0.max(t1).min(1.0);
    if lo > hi + 1e-12 {
        return None;
    }
    let point = p0 + r * lo;
    let u = ((point - q0).dot(&s) / s.norm_squared()).clamp(0.0, 1.0);
    Some((lo, u))
}

fn bounds(points: &[Point]) -> (Point, Point) {
    let mut lo = Point::new(f64::INFINITY, f64::INFINITY);
    let mut hi = Point::new(f64::NEG_INFINITY, f64::NEG_INFINITY);
    for p in points {
        lo.x = lo.x.min(p.x);
        lo.y = lo.y.min(p.y);
        hi.x = hi.x.max(p.x);
        hi.y = hi.y.max(p.y);
    }
    (lo, hi)
}

fn cross(a: Point, b: Point) -> f64 {
    a.x * b.y - a.y * b.x
}

fn cumulative_arclength(points: &[Point]) -> Vec<f64> {
    let mut s = Vec::with_capacity(points.len());
    s.push(0.0);
    for w in points.windows(2) {
        s.push(s.last().unwrap() + (w[1] - w[0]).norm());
    }
    s
}

/// Tangent angle per point: first/last segment direction at the ends,
/// bisector of the adjacent segment directions inside.
fn tangent_headings(points: &[Point]) -> Vec<f64> {
    let n = points.len();
    let dirs: Vec<Point> = points.windows(2).map(|w| (w[1] - w[0]).normalize()).collect();
    (0..n)
        .map(|i| {
            let d = if i == 0 {
                dirs[0]
            } else if i == n - 1 {
                dirs[n - 2]
            } else {
                dirs[i - 1] + dirs[i]
            };
            let d = if d.norm() < 1e-12 { dirs[i.min(n - 2)] } else { d };
            d.y.atan2(d.x)
        })
        .collect()
}

/// Signed curvature of the circle through each interior point and its two
/// neighbours; endpoints copy the nearest interior value.
fn circumscribed_curvature(points: &[Point]) -> Vec<f64> {
    let n = points.len();
    let mut k = vec![0.0; n];
    for i in 1..n - 1 {
        k[i] = three_point_curvature(points[i - 1], points[i], points[i + 1]);
    }
    k[0] = k[1];
    k[n - 1] = k[n - 2];
    k
}

/// Signed reciprocal radius of the circle through `a`, `b`, `c`
/// (positive for left turns).
pub fn three_point_curvature(a: Point, b: Point, c: Point) -> f64 {
    let ab = (b - a).norm();
    let bc = (c - b).norm();
    let ca = (a - c).norm();
    let denom = ab * bc * ca;
    if denom < 1e-15 {
        return 0.0;
    }
    2.0 * cross(b - a, c - b) / denom
}

pub(crate) fn wrap_angle(a: f64) -> f64 {
    let two_pi = std::f64::consts::TAU;
    let mut a = (a + std::f64::consts::PI).rem_euclid(two_pi) - std::f64::consts::PI;
    if a <= -std::f64::consts::PI {
        a += two_pi;
    }
    a
}

fn lerp_angle(a: f64, b: f64, f: f64) -> f64 {
    wrap_angle(a + wrap_angle(b - a) * f)
}

/// Incremental construction of polylines out of straight and circular pieces.
#[derive(Debug, Clone)]
pub struct PathSketch {
    points: Vec<Point>,
    heading: f64,
    resolution: f64,
}

impl PathSketch {
    /// Starts at `origin` facing `heading` (rad). `resolution` is the chord
    /// length used to discretize both lines and arcs.
    pub fn new(origin: Point, heading: f64, resolution: f64) -> Self {
        Self {
            points: vec![origin],
            heading,
            resolution,
        }
    }

    pub fn straight(mut self, length: f64) -> Self {
        let start = *self.points.last().unwrap();
        let dir = Point::new(self.heading.cos(), self.heading.sin());
        let n = (length / self.resolution).ceil().max(1.0) as usize;
        for k in 1..=n {
            self.points.push(start + dir * (length * k as f64 / n as f64));
        }
        self
    }

    /// Circular arc of `radius`, turning by `angle` rad (positive = left).
    pub fn arc(mut self, radius: f64, angle: f64) -> Self {
        let start = *self.points.last().unwrap();
        let side = angle.signum();
        let normal = Point::new(-self.heading.sin(), self.heading.cos()) * side;
        let center = start + normal * radius;
        let phi0 = (start - center).y.atan2((start - center).x);
        let n = (radius * angle.abs() / self.resolution).ceil().max(2.0) as usize;
        for k in 1..=n {
            let phi = phi0 + angle * k as f64 / n as f64;
            self.points.push(center + Point::new(phi.cos(), phi.sin()) * radius);
        }
        self.heading = wrap_angle(self.heading + angle);
        self
    }

    pub fn points(&self) -> &[Point] {
        &self.points
    }

    pub fn into_points(self) -> Vec<Point> {
        self.points
    }

    pub fn build(&self) -> Result<Path> {
        Path::new(&self.points)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use std::f64::consts::{FRAC_PI_2, PI};

    fn straight(len: f64, n: usize) -> Vec<Point> {
        (0..=n).map(|i| Point::new(len * i as f64 / n as f64, 0.0)).collect()
    }

    fn circle(r: f64, n: usize) -> Vec<Point> {
        (0..n)
            .map(|i| {
                let a = 1.9 * PI * i as f64 / (n - 1) as f64;
                Point::new(r * a.cos(), r * a.sin())
            })
            .collect()
    }

    #[test]
    fn rejects_short_and_degenerate_input() {
        assert!(matches!(
            Path::new(&[Point::new(0.0, 0.0), Point::new(1.0, 0.0)]),
            Err(Error::Construction(_))
        ));
        let dup = [Point::new(0.0, 0.0), Point::new(1.0, 0.0), Point::new(1.0, 0.0)];
        assert!(matches!(Path::new(&dup), Err(Error::Construction(_))));
    }

    #[test]
    fn straight_line_has_zero_curvature_and_heading() {
        let p = Path::new(&straight(20.0, 7)).unwrap();
        assert!(p.curvature().iter().all(|k| k.abs() < 1e-12));
        assert!(p.heading().iter().all(|h| h.abs() < 1e-12));
        assert_eq!(p.arclength()[0], 0.0);
        assert!(p.arclength().windows(2).all(|w| w[1] > w[0]));
    }

    #[test]
    fn circle_curvature_is_reciprocal_radius() {
        let p = Path::new(&circle(25.0, 300)).unwrap();
        for k in p.curvature() {
            assert_abs_diff_eq!(*k, 0.04, epsilon = 1e-9);
        }
    }

    #[test]
    fn circle_curvature_converges_with_density() {
        let mut last = f64::INFINITY;
        for n in [24usize, 96, 384] {
            let p = Path::new(&circle(10.0, n)).unwrap();
            let err = p
                .curvature()
                .iter()
                .map(|k| (k - 0.1).abs())
                .fold(0.0, f64::max);
            assert!(err <= last + 1e-12 && err < 1e-6, "n={n} err={err}");
            last = err;
        }
    }

    #[test]
    fn estimator_converges_on_a_parabola() {
        // y = x^2 / 20 has curvature 0.1 at the vertex.
        let errors: Vec<f64> = [1.0, 0.25, 0.0625]
            .iter()
            .map(|&h| {
                let a = Point::new(-h, h * h / 20.0);
                let b = Point::new(0.0, 0.0);
                let c = Point::new(h, h * h / 20.0);
                (three_point_curvature(a, b, c) - 0.1).abs()
            })
            .collect();
        assert!(errors[1] < errors[0] && errors[2] < errors[1], "{errors:?}");
        assert!(errors[2] < 1e-4);
    }

    #[test]
    fn composite_turn_matches_analytic_parametrization() {
        // Right quarter turn of radius 10 starting at the origin heading +y,
        // followed by 30 m straight heading +x.
        let sketch = PathSketch::new(Point::new(0.0, 0.0), FRAC_PI_2, 0.05)
            .arc(10.0, -FRAC_PI_2)
            .straight(30.0);
        let p = sketch.build().unwrap();
        let arc_len = 10.0 * FRAC_PI_2;
        assert_abs_diff_eq!(p.total_length(), arc_len + 30.0, epsilon = 1e-3);
        for &l in &[1.0, 5.0, 10.0, 14.0] {
            let pose = p.pose_at(l).unwrap();
            let phi = l / 10.0;
            let expected = Point::new(10.0 - 10.0 * phi.cos(), 10.0 * phi.sin());
            assert!((pose.position - expected).norm() < 1e-3, "l={l}");
            assert_abs_diff_eq!(pose.curvature.abs(), 0.1, epsilon = 1e-3);
            assert!(pose.curvature < 0.0);
            assert_abs_diff_eq!(pose.heading, FRAC_PI_2 - phi, epsilon = 1e-2);
        }
        for &l in &[arc_len + 2.0, arc_len + 20.0] {
            let pose = p.pose_at(l).unwrap();
            let expected = Point::new(10.0 + (l - arc_len), 10.0);
            assert!((pose.position - expected).norm() < 1e-3);
            assert!(pose.curvature.abs() < 1e-9);
        }
    }

    #[test]
    fn pose_at_endpoints_and_interior() {
        let p = Path::new(&straight(100.0, 10)).unwrap();
        let first = p.pose_at(0.0).unwrap();
        assert_eq!(first.position, Point::new(0.0, 0.0));
        assert_eq!(first.heading, 0.0);
        let last = p.pose_at(100.0).unwrap();
        assert_abs_diff_eq!(last.position.x, 100.0, epsilon = 1e-12);
        let mid = p.pose_at(37.5).unwrap();
        assert_abs_diff_eq!(mid.position.x, 37.5, epsilon = 1e-12);
        assert_abs_diff_eq!(mid.position.y, 0.0, epsilon = 1e-12);
        assert!(matches!(p.pose_at(100.5), Err(Error::Domain(_))));
        assert!(matches!(p.pose_at(-1.0), Err(Error::Domain(_))));
    }

    #[test]
    fn extension_continues_straight() {
        let p = Path::new(&straight(10.0, 4)).unwrap();
        let pose = p.pose_extended(15.0);
        assert_abs_diff_eq!(pose.position.x, 15.0, epsilon = 1e-12);
        assert_eq!(pose.curvature, 0.0);
    }

    #[test]
    fn perpendicular_paths_cross_at_origin() {
        let a: Vec<Point> = (0..=10).map(|i| Point::new(-50.0 + 10.0 * i as f64, 0.0)).collect();
        let b: Vec<Point> = (0..=10).map(|i| Point::new(0.0, -30.0 + 6.0 * i as f64)).collect();
        let pa = Path::new(&a).unwrap().with_id(PathId(1));
        let pb = Path::new(&b).unwrap().with_id(PathId(2));
        let x = find_intersection(&pa, &pb).unwrap();
        assert_abs_diff_eq!(x.arclength_a, 50.0, epsilon = 1e-9);
        assert_abs_diff_eq!(x.arclength_b, 30.0, epsilon = 1e-9);
        let y = find_intersection(&pb, &pa).unwrap();
        assert_eq!(y.swapped().path_a, x.path_a);
        assert_abs_diff_eq!(y.arclength_a, x.arclength_b, epsilon = 1e-9);
        assert_abs_diff_eq!(y.arclength_b, x.arclength_a, epsilon = 1e-9);
    }

    #[test]
    fn parallel_paths_do_not_cross() {
        let a = Path::new(&straight(50.0, 5)).unwrap();
        let b: Vec<Point> = straight(50.0, 5).iter().map(|p| p + Point::new(0.0, 3.5)).collect();
        assert!(find_intersection(&a, &Path::new(&b).unwrap()).is_none());
    }

    #[test]
    fn curve_search_on_straight_finds_nothing() {
        let p = Path::new(&straight(50.0, 5)).unwrap();
        assert_eq!(p.max_curvature_ahead(0.0, 0.05), None);
    }

    #[test]
    fn curve_search_reports_next_segment_not_global_max() {
        let p = PathSketch::new(Point::new(0.0, 0.0), 0.0, 0.05)
            .straight(20.0)
            .arc(12.5, FRAC_PI_2)
            .straight(20.0)
            .arc(1.0 / 0.12, -FRAC_PI_2)
            .straight(20.0)
            .build()
            .unwrap();
        let first = p.max_curvature_ahead(0.0, 0.05).unwrap();
        assert_abs_diff_eq!(first, 0.08, epsilon = 1e-3);
        let second = p.max_curvature_ahead(20.0 + 12.5 * FRAC_PI_2 + 10.0, 0.05).unwrap();
        assert_abs_diff_eq!(second, 0.12, epsilon = 1e-3);
        // inside the first arc the current segment is reported
        let inside = p.max_curvature_ahead(25.0, 0.05).unwrap();
        assert_abs_diff_eq!(inside, 0.08, epsilon = 1e-3);
        let single = PathSketch::new(Point::new(0.0, 0.0), 0.0, 0.05)
            .straight(10.0)
            .arc(10.0, 1.0)
            .straight(10.0)
            .build()
            .unwrap();
        assert_abs_diff_eq!(single.max_curvature_ahead(0.0, 0.05).unwrap(), 0.1, epsilon = 1e-3);
    }
}

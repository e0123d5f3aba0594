//! SBS placement on a wrap-around rectangle.
//!
//! Positions follow a fixed-count Strauss process sampled by
//! Metropolis-Hastings. The torus metric is used everywhere, so there are
//! no edge effects at the borders.

use std::io::Write;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};
use crate::seeds;

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Point {
    pub x: f64,
    pub y: f64,
}

impl Point {
    pub const fn new(x: f64, y: f64) -> Self {
        Self { x, y }
    }
}

/// Rectangular area with opposite borders identified (a torus).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Area {
    pub width: f64,
    pub height: f64,
}

impl Default for Area {
    fn default() -> Self {
        Self {
            width: 500.0,
            height: 500.0,
        }
    }
}

impl Area {
    pub fn new(width: f64, height: f64) -> Result<Self> {
        let a = Self { width, height };
        a.validate()?;
        Ok(a)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.width > 0.0 && self.height > 0.0)
            || !self.width.is_finite()
            || !self.height.is_finite()
        {
            return Err(domain(format!(
                "area {}x{} must have positive finite sides",
                self.width, self.height
            )));
        }
        Ok(())
    }

    pub fn contains(&self, p: Point) -> bool {
        (0.0..self.width).contains(&p.x) && (0.0..self.height).contains(&p.y)
    }

    pub fn diagonal(&self) -> f64 {
        self.width.hypot(self.height)
    }

    pub fn surface(&self) -> f64 {
        self.width * self.height
    }

    /// Map any point back into `[0, width) x [0, height)`.
    #[inline]
    pub fn wrap(&self, p: Point) -> Point {
        Point::new(wrap_coord(p.x, self.width), wrap_coord(p.y, self.height))
    }

    pub fn uniform_point<R: Rng + ?Sized>(&self, rng: &mut R) -> Point {
        Point::new(
            rng.random::<f64>() * self.width,
            rng.random::<f64>() * self.height,
        )
    }
}

#[inline]
fn wrap_coord(v: f64, len: f64) -> f64 {
    if (0.0..len).contains(&v) {
        return v;
    }
    let w = v.rem_euclid(len);
    // rem_euclid can round up to `len` for tiny negative inputs.
    if w >= len {
        0.0
    } else {
        w
    }
}

#[inline]
fn shortest(d: f64, len: f64) -> f64 {
    if d > 0.5 * len {
        d - len
    } else if d < -0.5 * len {
        d + len
    } else {
        d
    }
}

/// Shortest displacement from `from` to `to` over the torus. Both points
/// are assumed to lie inside the area.
#[inline]
pub fn torus_delta(from: Point, to: Point, area: &Area) -> (f64, f64) {
    (
        shortest(to.x - from.x, area.width),
        shortest(to.y - from.y, area.height),
    )
}

/// Distance between two in-area points, taking the nearest periodic image.
pub fn torus_distance(a: Point, b: Point, area: &Area) -> Result<f64> {
    for p in [a, b] {
        if !area.contains(p) {
            return Err(domain(format!(
                "point ({}, {}) lies outside the {}x{} area",
                p.x, p.y, area.width, area.height
            )));
        }
    }
    let (dx, dy) = torus_delta(a, b, area);
    Ok(dx.hypot(dy))
}

#[inline]
fn torus_dist2(a: Point, b: Point, area: &Area) -> f64 {
    let (dx, dy) = torus_delta(a, b, area);
    dx * dx + dy * dy
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StraussConfig {
    pub n_points: usize,
    pub interaction_radius: f64,
    /// 1 gives a binomial (Poisson-conditioned) pattern, 0 a hard-core one.
    pub interaction_gamma: f64,
    pub burn_in_sweeps: usize,
    pub seed: u64,
}

impl Default for StraussConfig {
    fn default() -> Self {
        Self {
            n_points: 15,
            interaction_radius: 50.0,
            interaction_gamma: 0.3,
            burn_in_sweeps: 10_000,
            seed: 0,
        }
    }
}

impl StraussConfig {
    pub fn validate(&self) -> Result<()> {
        if !(0.0..=1.0).contains(&self.interaction_gamma) {
            return Err(domain(format!(
                "interaction gamma {} outside [0, 1]",
                self.interaction_gamma
            )));
        }
        if !(self.interaction_radius >= 0.0) || !self.interaction_radius.is_finite() {
            return Err(domain("interaction radius must be finite and non-negative"));
        }
        Ok(())
    }
}

/// Number of unordered pairs closer than `r` (torus metric).
pub fn close_pairs(points: &[Point], r: f64, area: &Area) -> usize {
    let r2 = r * r;
    let mut count = 0;
    for (i, a) in points.iter().enumerate() {
        for b in &points[i + 1..] {
            if torus_dist2(*a, *b, area) < r2 {
                count += 1;
            }
        }
    }
    count
}

fn neighbours_within(points: &[Point], skip: usize, p: Point, r2: f64, area: &Area) -> i32 {
    points
        .iter()
        .enumerate()
        .filter(|&(j, q)| j != skip && torus_dist2(p, *q, area) < r2)
        .count() as i32
}

const HARD_CORE_ATTEMPTS_PER_POINT: usize = 10_000;

/// Sample exactly `cfg.n_points` positions from the Strauss density
/// π(x) ∝ γ^{s_r(x)} conditioned on the point count.
pub fn sample_strauss(cfg: &StraussConfig, area: &Area) -> Result<Vec<Point>> {
    cfg.validate()?;
    area.validate()?;
    let mut rng = seeds::rng(cfg.seed);
    let n = cfg.n_points;
    let gamma = cfg.interaction_gamma;
    let r2 = cfg.interaction_radius * cfg.interaction_radius;

    let mut points = Vec::with_capacity(n);
    if gamma == 0.0 {
        // Random sequential adsorption gives a feasible hard-core start.
        let mut attempts = 0usize;
        while points.len() < n {
            attempts += 1;
            if attempts > HARD_CORE_ATTEMPTS_PER_POINT * n {
                return Err(Error::Packing(format!(
                    "placed only {} of {n} points with hard-core radius {} m",
                    points.len(),
                    cfg.interaction_radius
                )));
            }
            let p = area.uniform_point(&mut rng);
            if points.iter().all(|q| torus_dist2(p, *q, area) >= r2) {
                points.push(p);
            }
        }
    } else {
        points.extend((0..n).map(|_| area.uniform_point(&mut rng)));
    }

    // With γ = 1 every proposal is accepted and the start is already exact.
    if n < 2 || gamma == 1.0 || cfg.interaction_radius == 0.0 {
        return Ok(points);
    }

    for _ in 0..cfg.burn_in_sweeps {
        for _ in 0..n {
            let i = rng.random_range(0..n);
            let proposal = area.uniform_point(&mut rng);
            let old = neighbours_within(&points, i, points[i], r2, area);
            let new = neighbours_within(&points, i, proposal, r2, area);
            let ratio = gamma.powi(new - old);
            if ratio >= 1.0 || rng.random::<f64>() < ratio {
                points[i] = proposal;
            }
        }
    }
    Ok(points)
}

/// Write `id,x_m,y_m` rows.
pub fn write_points_csv<W: Write>(points: &[Point], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["id", "x_m", "y_m"])?;
    for (i, p) in points.iter().enumerate() {
        w.write_record([i.to_string(), p.x.to_string(), p.y.to_string()])?;
    }
    w.flush()?;
    Ok(())
}

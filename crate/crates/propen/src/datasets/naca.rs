//! NACA 4-digit airfoil geometry.
//!
//! Shapes are emitted as `n_points` (x, y) pairs flattened to a
//! `2 * n_points` vector, ordered trailing edge -> upper surface -> leading
//! edge -> lower surface -> trailing edge, with cosine-spaced chord stations.
//! The trailing edge is closed by subtracting the linear ramp
//! `x * y_t(1)` from the thickness profile, so first and last points coincide
//! exactly.

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy)]
pub struct NacaParams {
    pub m_camber: f64,
    pub p_pos: f64,
    pub t_thick: f64,
    pub n_points: usize,
}

impl NacaParams {
    pub fn new(m_camber: f64, p_pos: f64, t_thick: f64, n_points: usize) -> Result<Self> {
        if !(0.0..=0.09).contains(&m_camber) {
            return Err(Error::InvalidConfig(format!("m_camber {m_camber} outside [0, 0.09]")));
        }
        if !(0.1..=0.9).contains(&p_pos) {
            return Err(Error::InvalidConfig(format!("p_pos {p_pos} outside [0.1, 0.9]")));
        }
        if !(0.01..=0.40).contains(&t_thick) {
            return Err(Error::InvalidConfig(format!("t_thick {t_thick} outside [0.01, 0.40]")));
        }
        if n_points < 4 || n_points % 2 != 0 {
            return Err(Error::InvalidConfig("n_points must be an even integer >= 4".into()));
        }
        Ok(Self { m_camber, p_pos, t_thick, n_points })
    }
}

/// Standard half-thickness polynomial
/// `y_t(x) = 5T (0.2969 sqrt(x) - 0.1260 x - 0.3516 x^2 + 0.2843 x^3 - 0.1015 x^4)`.
pub fn thickness_half(t_thick: f64, x: f64) -> f64 {
    5.0 * t_thick
        * (0.2969 * x.sqrt() - 0.1260 * x - 0.3516 * x * x + 0.2843 * x.powi(3) - 0.1015 * x.powi(4))
}

/// Half-thickness with the trailing-edge ramp removed so that y_t(1) = 0.
fn thickness_closed(t_thick: f64, x: f64) -> f64 {
    thickness_half(t_thick, x) - x * thickness_half(t_thick, 1.0)
}

/// Piecewise-quadratic camber line and its slope.
fn camber(m_camber: f64, p_pos: f64, x: f64) -> (f64, f64) {
    if m_camber == 0.0 {
        return (0.0, 0.0);
    }
    let (m, p) = (m_camber, p_pos);
    if x < p {
        (m / (p * p) * (2.0 * p * x - x * x), 2.0 * m / (p * p) * (p - x))
    } else {
        let q = (1.0 - p) * (1.0 - p);
        (m / q * ((1.0 - 2.0 * p) + 2.0 * p * x - x * x), 2.0 * m / q * (p - x))
    }
}

/// Cosine-spaced chord stations from the trailing edge (x=1) to the leading
/// edge (x=0).
fn stations(half: usize) -> Vec<f64> {
    (0..half)
        .map(|k| {
            let theta = std::f64::consts::PI * k as f64 / (half - 1) as f64;
            (1.0 + theta.cos()) / 2.0
        })
        .collect()
}

/// Generates the flattened `[x0, y0, x1, y1, ...]` coordinate vector.
pub fn generate_naca(params: &NacaParams) -> Vec<f64> {
    let half = params.n_points / 2;
    let xs = stations(half);
    let mut coords = Vec::with_capacity(2 * params.n_points);
    let surface_point = |x: f64, upper: bool| -> (f64, f64) {
        let yt = thickness_closed(params.t_thick, x);
        let (yc, slope) = camber(params.m_camber, params.p_pos, x);
        let theta = slope.atan();
        if upper {
            (x - yt * theta.sin(), yc + yt * theta.cos())
        } else {
            (x + yt * theta.sin(), yc - yt * theta.cos())
        }
    };
    // upper: TE -> LE
    for &x in &xs {
        let (px, py) = surface_point(x, true);
        coords.push(px);
        coords.push(py);
    }
    // lower: LE -> TE (same stations reversed)
    for &x in xs.iter().rev() {
        let (px, py) = surface_point(x, false);
        coords.push(px);
        coords.push(py);
    }
    coords
}

/// Recovers (M, P, T) from a flattened coordinate vector by least squares.
///
/// The midpoint of paired upper/lower stations is exactly the camber point
/// and half the gap is exactly the (closed) thickness, so T comes from a
/// one-parameter linear fit and (M, P) from a grid over P with linear fits
/// for M.
pub fn fit_naca_params(coords: &[f64]) -> Result<(f64, f64, f64)> {
    if coords.len() % 4 != 0 || coords.len() < 8 {
        return Err(Error::InvalidConfig(format!(
            "coordinate vector length {} is not a paired airfoil layout",
            coords.len()
        )));
    }
    let n_points = coords.len() / 2;
    let half = n_points / 2;
    let point = |i: usize| (coords[2 * i], coords[2 * i + 1]);
    let mut xs = Vec::with_capacity(half);
    let mut camber_y = Vec::with_capacity(half);
    let mut half_gap = Vec::with_capacity(half);
    for i in 0..half {
        let (ux, uy) = point(i);
        let (lx, ly) = point(n_points - 1 - i);
        xs.push(0.5 * (ux + lx));
        camber_y.push(0.5 * (uy + ly));
        let (dx, dy) = (ux - lx, uy - ly);
        half_gap.push(0.5 * (dx * dx + dy * dy).sqrt());
    }
    // T: thickness profile is linear in T.
    let (mut num, mut den) = (0.0, 0.0);
    for (&x, &g) in xs.iter().zip(&half_gap) {
        let x = x.clamp(0.0, 1.0);
        let b = thickness_closed(1.0, x);
        num += g * b;
        den += b * b;
    }
    let t = if den > 0.0 { (num / den).clamp(0.0, 1.0) } else { 0.0 };
    // (M, P): camber line is linear in M for fixed P; grid over P.
    let camber_energy: f64 = camber_y.iter().map(|y| y * y).sum();
    if camber_energy < 1e-18 {
        return Ok((0.0, 0.5, t));
    }
    let mut best = (0.0, 0.5, f64::INFINITY);
    let steps = 320;
    for k in 0..=steps {
        let p = 0.1 + 0.8 * k as f64 / steps as f64;
        let (mut num, mut den) = (0.0, 0.0);
        for (&x, &y) in xs.iter().zip(&camber_y) {
            let (b, _) = camber(1.0, p, x.clamp(0.0, 1.0));
            num += y * b;
            den += b * b;
        }
        if den <= 0.0 {
            continue;
        }
        let m = (num / den).max(0.0);
        let sse: f64 = xs
            .iter()
            .zip(&camber_y)
            .map(|(&x, &y)| {
                let (b, _) = camber(1.0, p, x.clamp(0.0, 1.0));
                let r = y - m * b;
                r * r
            })
            .sum();
        if sse < best.2 {
            best = (m, p, sse);
        }
    }
    Ok((best.0, best.1, t))
}

/// Smooth lift-to-drag stand-in used by the self-contained airfoil pipeline:
/// rewards camber, prefers mid camber positions, and penalizes thickness away
/// from 10%.
pub fn synthetic_lift_drag(coords: &[f64]) -> Result<f64> {
    let (m, p, t) = fit_naca_params(coords)?;
    Ok(60.0 * m / 0.09 + 6.0 * (std::f64::consts::PI * p).sin() - 1000.0 * (t - 0.10) * (t - 0.10))
}

//! Derivative-free dense-grid oracles for the optimizers in `cclab-core`,
//! for tangent dimension 3 and 4.
//!
//! Hyperplanes are indexed by their unit normal on `S^{n-1}`; 2-planes by
//! unit decomposable bivectors, which for `n = 3` is again `S^2` (Hodge
//! dual of the normal) and for `n = 4` the product `S^2 x S^2` of the
//! self-dual and anti-self-dual parts. After the grid scan the best
//! candidates are refined by compass search with step halving.

use std::f64::consts::PI;

use cclab_core::curvature::CurvatureTensors;
use cclab_core::invariants::{self, BivectorForm, ExtremumMode};
use cclab_core::SubmanifoldPoint;
use nalgebra::DVector;

use crate::error::{CliError, Result};

/// Grid candidates kept for refinement.
const REFINE_TOP: usize = 8;
const MIN_STEP: f64 = 1e-10;

fn check_dim(n: usize) -> Result<()> {
    if n == 3 || n == 4 {
        Ok(())
    } else {
        Err(CliError::Config(format!("grid oracles support n = 3 or 4, got {n}")))
    }
}

/// Roughly `count` points on `S^2` (Fibonacci lattice).
pub fn fibonacci_s2(count: usize) -> Vec<[f64; 3]> {
    let golden = PI * (3.0 - 5f64.sqrt());
    (0..count)
        .map(|i| {
            let z = 1.0 - 2.0 * (i as f64 + 0.5) / count as f64;
            let rad = (1.0 - z * z).sqrt();
            let phi = golden * i as f64;
            [rad * phi.cos(), rad * phi.sin(), z]
        })
        .collect()
}

/// Roughly `count` points on `S^3` in Hopf coordinates, `sin^2` of the
/// polar angle equally spaced.
pub fn hopf_s3(count: usize) -> Vec<[f64; 4]> {
    let k = ((count as f64).cbrt().ceil() as usize).max(2);
    let mut out = Vec::with_capacity(k * k * k);
    for a in 0..k {
        let s2 = (a as f64 + 0.5) / k as f64;
        let (s, c) = (s2.sqrt(), (1.0 - s2).sqrt());
        for b in 0..k {
            let x1 = 2.0 * PI * b as f64 / k as f64;
            for d in 0..k {
                let x2 = 2.0 * PI * (d as f64 + 0.5 * (b % 2) as f64) / k as f64;
                out.push([s * x1.cos(), s * x1.sin(), c * x2.cos(), c * x2.sin()]);
            }
        }
    }
    out
}

/// Points spread over `S^{n-1}`, `n` in `{3, 4}`.
pub fn sphere_grid(n: usize, count: usize) -> Result<Vec<DVector<f64>>> {
    check_dim(n)?;
    Ok(if n == 3 {
        fibonacci_s2(count).into_iter().map(|p| DVector::from_column_slice(&p)).collect()
    } else {
        hopf_s3(count).into_iter().map(|p| DVector::from_column_slice(&p)).collect()
    })
}

/// Compass search on the sphere(s): coordinate moves of size `step`
/// followed by renormalization; halves the step when no move improves.
fn compass<F: Fn(&[DVector<f64>]) -> f64>(f: &F, mut x: Vec<DVector<f64>>) -> (f64, Vec<DVector<f64>>) {
    let mut fx = f(&x);
    let mut step = 0.05;
    while step > MIN_STEP {
        let mut improved = false;
        for block in 0..x.len() {
            for i in 0..x[block].len() {
                for sign in [1.0, -1.0] {
                    let mut trial = x.clone();
                    trial[block][i] += sign * step;
                    let norm = trial[block].norm();
                    trial[block] /= norm;
                    let ft = f(&trial);
                    if ft < fx {
                        fx = ft;
                        x = trial;
                        improved = true;
                    }
                }
            }
        }
        if !improved {
            step *= 0.5;
        }
    }
    (fx, x)
}

fn scan_and_refine<F: Fn(&[DVector<f64>]) -> f64>(f: F, candidates: Vec<Vec<DVector<f64>>>) -> OracleValue {
    let grid_points = candidates.len();
    let mut scored: Vec<(f64, Vec<DVector<f64>>)> = candidates.into_iter().map(|c| (f(&c), c)).collect();
    scored.sort_by(|a, b| a.0.total_cmp(&b.0));
    let grid_value = scored[0].0;
    let value = scored
        .into_iter()
        .take(REFINE_TOP)
        .map(|(_, c)| compass(&f, c).0)
        .fold(f64::INFINITY, f64::min);
    OracleValue { grid_value, value, grid_points }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OracleValue {
    /// Best raw grid value.
    pub grid_value: f64,
    /// After refinement.
    pub value: f64,
    pub grid_points: usize,
}

/// Inf or sup of `C(V)` over hyperplanes.
pub fn hyperplane_oracle(point: &SubmanifoldPoint, mode: ExtremumMode, grid: usize) -> Result<OracleValue> {
    let n = point.n();
    let pts = sphere_grid(n, grid)?;
    let sign = if mode == ExtremumMode::Inf { 1.0 } else { -1.0 };
    let mut v = scan_and_refine(
        |x: &[DVector<f64>]| sign * invariants::hyperplane_casorati(point, &x[0]),
        pts.into_iter().map(|p| vec![p]).collect(),
    );
    v.grid_value *= sign;
    v.value *= sign;
    Ok(v)
}

fn bivector(n: usize, parts: &[DVector<f64>]) -> DVector<f64> {
    // pair order (0,1), (0,2), ..., (n-2,n-1)
    if n == 3 {
        let nu = &parts[0];
        DVector::from_column_slice(&[nu[2], -nu[1], nu[0]])
    } else {
        let (a, s) = (&parts[0], &parts[1]);
        let h = 0.5;
        // self-dual basis: e01+e23, e02-e13, e03+e12; anti-self-dual with opposite signs
        DVector::from_column_slice(&[
            h * (a[0] + s[0]),
            h * (a[1] + s[1]),
            h * (a[2] + s[2]),
            h * (a[2] - s[2]),
            h * (-a[1] + s[1]),
            h * (a[0] - s[0]),
        ])
    }
}

/// Inf of the sectional curvature over tangent 2-planes.
pub fn plane_oracle(tensors: &CurvatureTensors<'_>, grid: usize) -> Result<OracleValue> {
    let n = tensors.n();
    check_dim(n)?;
    let form = BivectorForm::new(tensors);
    let candidates: Vec<Vec<DVector<f64>>> = if n == 3 {
        sphere_grid(3, grid)?.into_iter().map(|p| vec![p]).collect()
    } else {
        let side = ((grid as f64).sqrt().ceil() as usize).max(2);
        let s2: Vec<DVector<f64>> = fibonacci_s2(side).into_iter().map(|p| DVector::from_column_slice(&p)).collect();
        s2.iter().flat_map(|a| s2.iter().map(move |s| vec![a.clone(), s.clone()])).collect()
    };
    Ok(scan_and_refine(|x: &[DVector<f64>]| form.bivector_value(&bivector(n, x)), candidates))
}

/// Self-dual and anti-self-dual parts of `u ^ w` for an orthonormal pair in
/// `R^4`; both are unit vectors, and [`plane_oracle`] inverts this map.
pub fn decomposable_parts(u: &DVector<f64>, w: &DVector<f64>) -> (DVector<f64>, DVector<f64>) {
    let b = |i: usize, j: usize| u[i] * w[j] - u[j] * w[i];
    let a = DVector::from_column_slice(&[b(0, 1) + b(2, 3), b(0, 2) - b(1, 3), b(0, 3) + b(1, 2)]);
    let s = DVector::from_column_slice(&[b(0, 1) - b(2, 3), b(0, 2) + b(1, 3), b(0, 3) - b(1, 2)]);
    (a, s)
}

#[cfg(test)]
mod tests {
    use super::*;
    use cclab_core::scenario::{self, ScenarioSpec};

    #[test]
    fn grids_are_unit() {
        for p in sphere_grid(3, 1000).unwrap().iter().chain(sphere_grid(4, 1000).unwrap().iter()) {
            assert!((p.norm() - 1.0).abs() < 1e-12);
        }
        assert!(sphere_grid(5, 10).is_err());
    }

    #[test]
    fn s2_product_covers_decomposable_bivectors() {
        let u = DVector::from_column_slice(&[0.5, 0.5, 0.5, 0.5]);
        let w = DVector::from_column_slice(&[0.5, -0.5, 0.5, -0.5]);
        let (a, s) = decomposable_parts(&u, &w);
        assert!((a.norm() - 1.0).abs() < 1e-12 && (s.norm() - 1.0).abs() < 1e-12);
        let b = bivector(4, &[a, s]);
        let pairs = [(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)];
        for (k, (i, j)) in pairs.iter().enumerate() {
            assert!((b[k] - (u[*i] * w[*j] - u[*j] * w[*i])).abs() < 1e-12);
        }
    }

    #[test]
    fn oracle_matches_fixture_values() {
        let s1 = scenario::fixture_point("S1").unwrap();
        let t = CurvatureTensors::new(&s1);
        assert!((plane_oracle(&t, 2500).unwrap().value - 5.0).abs() < 1e-9);
        assert!((hyperplane_oracle(&s1, ExtremumMode::Inf, 2000).unwrap().value - 1.0).abs() < 1e-12);
    }

    #[test]
    fn oracle_agrees_with_optimizer_on_a_random_point() {
        let p = scenario::build(&ScenarioSpec::random(3, 2, 0.8, 5)).unwrap();
        let t = CurvatureTensors::new(&p);
        let oracle = plane_oracle(&t, 10_000).unwrap();
        let opt = invariants::chen_delta(&t, 5).unwrap();
        assert!((oracle.value - opt.inf_k).abs() < 1e-6, "{oracle:?} vs {}", opt.inf_k);
    }
}

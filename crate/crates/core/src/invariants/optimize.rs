//! Multi-start projected-gradient descent on the unit sphere and on
//! orthonormal pairs (the Stiefel set `V_2(R^n)`).
//!
//! Every run is deterministic: the canonical starts come first, the random
//! starts are drawn from a ChaCha stream seeded by the caller, and the
//! reduction keeps the smallest value with ties broken by lexicographic
//! order of the (sign-normalized) argument.

use alloc::vec::Vec;
use core::cmp::Ordering;
use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MultiStart {
    /// Random starts in addition to the canonical ones.
    pub starts: usize,
    pub max_iters: usize,
    /// Stop once `|f_k - f_{k+1}| <= tol * max(1, |f_k|)`.
    pub tol: f64,
}

impl Default for MultiStart {
    fn default() -> Self {
        Self { starts: 64, max_iters: 10_000, tol: 1e-12 }
    }
}

const ARMIJO: f64 = 1e-4;
const MAX_HALVINGS: usize = 60;

fn lexicographic(a: &DVector<f64>, b: &DVector<f64>) -> Ordering {
    for (x, y) in a.iter().zip(b.iter()) {
        match x.total_cmp(y) {
            Ordering::Equal => continue,
            other => return other,
        }
    }
    Ordering::Equal
}

/// Flips the sign so that the first entry above `1e-12` in magnitude is
/// positive.
pub fn sign_normalized(mut v: DVector<f64>) -> DVector<f64> {
    if let Some(first) = v.iter().find(|x| libm::fabs(**x) > 1e-12) {
        if *first < 0.0 {
            v.neg_mut();
        }
    }
    v
}

fn gaussian_unit(rng: &mut ChaCha8Rng, n: usize) -> DVector<f64> {
    loop {
        let v = DVector::from_fn(n, |_, _| rng.sample::<f64, _>(StandardNormal));
        let norm = v.norm();
        if norm > 1e-8 {
            return v / norm;
        }
    }
}

fn unit(n: usize, i: usize) -> DVector<f64> {
    let mut e = DVector::zeros(n);
    e[i] = 1.0;
    e
}

#[derive(Debug, Clone, PartialEq)]
pub struct SphereOptimum {
    pub value: f64,
    pub point: DVector<f64>,
    /// Local descents run (canonical plus random starts).
    pub runs: usize,
}

fn descend_sphere<F, G>(f: &F, grad: &G, mut x: DVector<f64>, opts: &MultiStart) -> (f64, DVector<f64>)
where
    F: Fn(&DVector<f64>) -> f64,
    G: Fn(&DVector<f64>) -> DVector<f64>,
{
    let mut fx = f(&x);
    let mut step = 1.0;
    for _ in 0..opts.max_iters {
        let g = grad(&x);
        let rg = &g - &x * x.dot(&g);
        let g2 = rg.norm_squared();
        if g2 <= 1e-28 {
            break;
        }
        let mut accepted = None;
        let mut t = step;
        for _ in 0..MAX_HALVINGS {
            let trial = (&x - &rg * t).normalize();
            let ft = f(&trial);
            if ft <= fx - ARMIJO * t * g2 {
                accepted = Some((trial, ft));
                break;
            }
            t *= 0.5;
        }
        let Some((next, fnext)) = accepted else { break };
        let delta = libm::fabs(fx - fnext);
        x = next;
        fx = fnext;
        step = t * 2.0;
        if delta <= opts.tol * libm::fmax(1.0, libm::fabs(fx)) {
            break;
        }
    }
    (fx, x)
}

/// Minimizes `f` over unit vectors of `R^n`. `grad` is the Euclidean
/// gradient; it is projected onto the tangent space of the sphere.
pub fn minimize_on_sphere<F, G>(n: usize, f: F, grad: G, opts: &MultiStart, seed: u64) -> SphereOptimum
where
    F: Fn(&DVector<f64>) -> f64,
    G: Fn(&DVector<f64>) -> DVector<f64>,
{
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let starts: Vec<DVector<f64>> =
        (0..n).map(|i| unit(n, i)).chain((0..opts.starts).map(|_| gaussian_unit(&mut rng, n))).collect();
    let runs = starts.len();
    let mut best: Option<(f64, DVector<f64>)> = None;
    for x0 in starts {
        let (value, x) = descend_sphere(&f, &grad, x0, opts);
        let x = sign_normalized(x);
        let better = match &best {
            None => true,
            Some((bv, bx)) => value < *bv || (value == *bv && lexicographic(&x, bx) == Ordering::Less),
        };
        if better {
            best = Some((value, x));
        }
    }
    let (value, point) = best.expect("at least one start");
    SphereOptimum { value, point, runs }
}

/// Orthonormal pair `(u, w)` spanning a 2-plane.
#[derive(Debug, Clone, PartialEq)]
pub struct PairOptimum {
    pub value: f64,
    pub u: DVector<f64>,
    pub w: DVector<f64>,
    pub runs: usize,
}

fn retract_pair(u: &DVector<f64>, w: &DVector<f64>) -> Option<(DVector<f64>, DVector<f64>)> {
    let nu = u.norm();
    if nu < 1e-12 {
        return None;
    }
    let u = u / nu;
    let mut w = w - &u * u.dot(w);
    w -= &u * u.dot(&w);
    let nw = w.norm();
    if nw < 1e-12 {
        return None;
    }
    Some((u, w / nw))
}

fn descend_pair<F, G>(
    f: &F,
    grad: &G,
    mut u: DVector<f64>,
    mut w: DVector<f64>,
    opts: &MultiStart,
) -> (f64, DVector<f64>, DVector<f64>)
where
    F: Fn(&DVector<f64>, &DVector<f64>) -> f64,
    G: Fn(&DVector<f64>, &DVector<f64>) -> (DVector<f64>, DVector<f64>),
{
    let mut fx = f(&u, &w);
    let mut step = 1.0;
    for _ in 0..opts.max_iters {
        let (gu, gw) = grad(&u, &w);
        // G - X sym(X^T G) with X = [u w]
        let a = u.dot(&gu);
        let d = w.dot(&gw);
        let b = 0.5 * (u.dot(&gw) + w.dot(&gu));
        let ru = &gu - &u * a - &w * b;
        let rw = &gw - &u * b - &w * d;
        let g2 = ru.norm_squared() + rw.norm_squared();
        if g2 <= 1e-28 {
            break;
        }
        let mut accepted = None;
        let mut t = step;
        for _ in 0..MAX_HALVINGS {
            if let Some((tu, tw)) = retract_pair(&(&u - &ru * t), &(&w - &rw * t)) {
                let ft = f(&tu, &tw);
                if ft <= fx - ARMIJO * t * g2 {
                    accepted = Some((tu, tw, ft));
                    break;
                }
            }
            t *= 0.5;
        }
        let Some((nu, nw, fnext)) = accepted else { break };
        let delta = libm::fabs(fx - fnext);
        u = nu;
        w = nw;
        fx = fnext;
        step = t * 2.0;
        if delta <= opts.tol * libm::fmax(1.0, libm::fabs(fx)) {
            break;
        }
    }
    (fx, u, w)
}

/// Minimizes `f(u, w)` over orthonormal pairs in `R^n`, starting from every
/// coordinate pair and then from random pairs.
pub fn minimize_on_pairs<F, G>(n: usize, f: F, grad: G, opts: &MultiStart, seed: u64) -> PairOptimum
where
    F: Fn(&DVector<f64>, &DVector<f64>) -> f64,
    G: Fn(&DVector<f64>, &DVector<f64>) -> (DVector<f64>, DVector<f64>),
{
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut starts = Vec::new();
    for i in 0..n {
        for j in (i + 1)..n {
            starts.push((unit(n, i), unit(n, j)));
        }
    }
    while starts.len() < n * (n - 1) / 2 + opts.starts {
        let u = gaussian_unit(&mut rng, n);
        let w = gaussian_unit(&mut rng, n);
        if let Some(pair) = retract_pair(&u, &w) {
            starts.push(pair);
        }
    }
    let runs = starts.len();
    let mut best: Option<(f64, DVector<f64>, DVector<f64>)> = None;
    for (u0, w0) in starts {
        let (value, u, w) = descend_pair(&f, &grad, u0, w0, opts);
        let (u, w) = (sign_normalized(u), sign_normalized(w));
        let better = match &best {
            None => true,
            Some((bv, bu, bw)) => {
                value < *bv
                    || (value == *bv
                        && lexicographic(&u, bu).then_with(|| lexicographic(&w, bw)) == Ordering::Less)
            }
        };
        if better {
            best = Some((value, u, w));
        }
    }
    let (value, u, w) = best.expect("at least one start");
    PairOptimum { value, u, w, runs }
}

/// Columns of an `n x 2` matrix.
pub fn pair_matrix(u: &DVector<f64>, w: &DVector<f64>) -> DMatrix<f64> {
    let mut m = DMatrix::zeros(u.len(), 2);
    m.set_column(0, u);
    m.set_column(1, w);
    m
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rayleigh_quotient_finds_smallest_eigenvalue() {
        let a = DMatrix::from_row_slice(3, 3, &[2.0, 0.5, 0.0, 0.5, 1.0, 0.3, 0.0, 0.3, 3.0]);
        let (vals, _) = crate::linalg::symmetric_eigen(&a);
        let opt = minimize_on_sphere(
            3,
            |x| x.dot(&(&a * x)),
            |x| (&a * x) * 2.0,
            &MultiStart::default(),
            1,
        );
        assert!((opt.value - vals[0]).abs() < 1e-10, "{} vs {}", opt.value, vals[0]);
        assert_eq!(opt.runs, 3 + 64);
    }

    #[test]
    fn pair_trace_is_sum_of_two_smallest() {
        let a = DMatrix::from_row_slice(
            4,
            4,
            &[4.0, 1.0, 0.0, 0.2, 1.0, 3.0, 0.5, 0.0, 0.0, 0.5, 1.0, 0.1, 0.2, 0.0, 0.1, 2.0],
        );
        let (vals, _) = crate::linalg::symmetric_eigen(&a);
        let opt = minimize_on_pairs(
            4,
            |u, w| u.dot(&(&a * u)) + w.dot(&(&a * w)),
            |u, w| ((&a * u) * 2.0, (&a * w) * 2.0),
            &MultiStart::default(),
            3,
        );
        assert!((opt.value - vals[0] - vals[1]).abs() < 1e-9);
        assert!(opt.u.dot(&opt.w).abs() < 1e-12);
    }

    #[test]
    fn runs_are_reproducible() {
        let f = |x: &DVector<f64>| x[0] * x[1] + x[2] * x[2] * x[0];
        let g = |x: &DVector<f64>| DVector::from_column_slice(&[x[1] + x[2] * x[2], x[0], 2.0 * x[2] * x[0]]);
        let a = minimize_on_sphere(3, f, g, &MultiStart::default(), 9);
        let b = minimize_on_sphere(3, f, g, &MultiStart::default(), 9);
        assert_eq!(a, b);
    }

    #[test]
    fn sign_normalization() {
        let v = sign_normalized(DVector::from_column_slice(&[0.0, -0.6, 0.8]));
        assert_eq!(v, DVector::from_column_slice(&[0.0, 0.6, -0.8]));
    }
}

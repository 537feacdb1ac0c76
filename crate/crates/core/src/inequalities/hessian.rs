use alloc::vec::Vec;
use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::linalg;

/// Hessian of the δ-Casorati quadratic form at its critical point.
#[derive(Debug, Clone, PartialEq)]
pub struct HessianSpectrum {
    pub n: usize,
    pub r: f64,
    pub h1: DMatrix<f64>,
    /// Ascending.
    pub eigenvalues: Vec<f64>,
    pub psd: bool,
    pub zero_multiplicity: usize,
    /// Closed-form eigenvalues, ascending:
    /// `0`, `2((n-1)n^2 + r^2)/(rn)` and `2(n-1)(n+r)/r` with multiplicity `n-2`.
    pub closed_form: Vec<f64>,
    /// Per-eigenvalue agreement with `closed_form` to `1e-9` relative.
    pub matches: Vec<bool>,
    /// `max |H1 k|` for the kernel direction `k = (1, ..., 1, n(n-1)/r)`.
    pub kernel_residual: f64,
}

impl HessianSpectrum {
    pub fn all_match(&self) -> bool {
        self.matches.iter().all(|&m| m)
    }
}

pub fn hessian_spectrum(n: usize, r: f64) -> Result<HessianSpectrum> {
    if n < 3 {
        return Err(Error::InvalidDimension { what: "n", value: n, reason: "needs n >= 3" });
    }
    if !(r > 0.0) || !r.is_finite() {
        return Err(Error::InvalidParameter { name: "r", value: r });
    }
    let nf = n as f64;
    let diag = 2.0 * (nf - 1.0) * (nf + r) / r - 2.0;
    let h1 = DMatrix::from_fn(n, n, |i, j| {
        if i != j {
            -2.0
        } else if i + 1 < n {
            diag
        } else {
            2.0 * r / nf
        }
    });
    let (vals, _) = linalg::symmetric_eigen(&h1);
    let eigenvalues: Vec<f64> = vals.iter().copied().collect();
    let scale = eigenvalues.iter().fold(1.0, |acc: f64, x| libm::fmax(acc, libm::fabs(*x)));
    let psd = eigenvalues[0] >= -1e-10 * scale;
    let zero_multiplicity = eigenvalues.iter().filter(|x| libm::fabs(**x) <= 1e-10 * scale).count();

    let mut closed_form = Vec::with_capacity(n);
    closed_form.push(0.0);
    closed_form.push(2.0 * ((nf - 1.0) * nf * nf + r * r) / (r * nf));
    closed_form.extend(core::iter::repeat(2.0 * (nf - 1.0) * (nf + r) / r).take(n - 2));
    closed_form.sort_by(f64::total_cmp);
    let matches = eigenvalues
        .iter()
        .zip(&closed_form)
        .map(|(a, b)| libm::fabs(a - b) <= 1e-9 * scale)
        .collect();

    let mut kernel = DVector::from_element(n, 1.0);
    kernel[n - 1] = nf * (nf - 1.0) / r;
    let kernel_residual = linalg::max_abs(&DMatrix::from_column_slice(n, 1, (&h1 * kernel).as_slice()));
    Ok(HessianSpectrum { n, r, h1, eigenvalues, psd, zero_multiplicity, closed_form, matches, kernel_residual })
}

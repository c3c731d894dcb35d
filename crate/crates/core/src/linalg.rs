//! Small dense complex linear-algebra helpers shared by the simulators.

use ndarray::Array2;
use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};

pub type Matrix = Array2<Complex64>;

/// Tolerance for accepting coin and mode matrices as unitary.
pub const UNITARY_TOL: f64 = 1e-12;

pub const ZERO: Complex64 = Complex64::new(0.0, 0.0);
pub const ONE: Complex64 = Complex64::new(1.0, 0.0);
pub const I: Complex64 = Complex64::new(0.0, 1.0);

pub fn identity(n: usize) -> Matrix {
    Array2::from_shape_fn((n, n), |(i, j)| if i == j { ONE } else { ZERO })
}

pub fn dagger(m: &Matrix) -> Matrix {
    m.t().mapv(|z| z.conj())
}

/// Largest entrywise modulus of `a - b`. Shapes must agree.
pub fn max_abs_diff(a: &Matrix, b: &Matrix) -> f64 {
    assert_eq!(a.dim(), b.dim(), "shape mismatch");
    a.iter()
        .zip(b.iter())
        .map(|(x, y)| (x - y).norm())
        .fold(0.0, f64::max)
}

/// Entrywise distance of `U U†` from the identity, or infinity if not square.
pub fn unitarity_defect(m: &Matrix) -> f64 {
    let (r, c) = m.dim();
    if r != c {
        return f64::INFINITY;
    }
    max_abs_diff(&m.dot(&dagger(m)), &identity(r))
}

pub fn ensure_unitary(m: &Matrix, tol: f64, what: &str) -> Result<()> {
    let defect = unitarity_defect(m);
    if defect.is_finite() && defect <= tol {
        Ok(())
    } else {
        Err(Error::Validation(format!(
            "{what} is not unitary (|UU†-I| = {defect:.3e}, shape {:?})",
            m.dim()
        )))
    }
}

/// Permutation as a mode map: `a_i† -> a_{perm[i]}†`.
pub fn permutation_matrix(perm: &[usize]) -> Matrix {
    let n = perm.len();
    let mut m = Array2::from_elem((n, n), ZERO);
    for (i, &p) in perm.iter().enumerate() {
        m[[i, p]] = ONE;
    }
    m
}

/// Places `block` on the rows/columns listed in `support` of an `n x n` identity.
pub fn embed(block: &Matrix, support: &[usize], n: usize) -> Matrix {
    let mut m = identity(n);
    for (a, &i) in support.iter().enumerate() {
        for (b, &j) in support.iter().enumerate() {
            m[[i, j]] = block[[a, b]];
        }
    }
    m
}

pub fn diagonal(phases: &[Complex64]) -> Matrix {
    let n = phases.len();
    Array2::from_shape_fn((n, n), |(i, j)| if i == j { phases[i] } else { ZERO })
}

/// Sylvester Hadamard matrix, normalised. `d` must be a power of two.
pub fn hadamard(d: usize) -> Option<Matrix> {
    if d == 0 || !d.is_power_of_two() {
        return None;
    }
    let scale = 1.0 / (d as f64).sqrt();
    Some(Array2::from_shape_fn((d, d), |(i, j)| {
        let sign = if (i & j).count_ones() % 2 == 0 {
            1.0
        } else {
            -1.0
        };
        Complex64::new(sign * scale, 0.0)
    }))
}

/// Normalised discrete Fourier transform matrix.
pub fn dft(d: usize) -> Matrix {
    let scale = 1.0 / (d as f64).sqrt();
    Array2::from_shape_fn((d, d), |(i, j)| {
        let angle = 2.0 * std::f64::consts::PI * (i * j % d) as f64 / d as f64;
        Complex64::from_polar(scale, angle)
    })
}

/// The two-mode swap block `[[0, 1], [1, 0]]`.
pub fn swap_block() -> Matrix {
    permutation_matrix(&[1, 0])
}

/// Symmetric balanced beamsplitter `[[1, i], [i, 1]] / sqrt(2)`.
pub fn balanced_beamsplitter() -> Matrix {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    Array2::from_shape_vec(
        (2, 2),
        vec![
            Complex64::new(s, 0.0),
            Complex64::new(0.0, s),
            Complex64::new(0.0, s),
            Complex64::new(s, 0.0),
        ],
    )
    .expect("2x2")
}

/// Haar-distributed random unitary via Gram-Schmidt on a complex Gaussian matrix.
pub fn random_unitary<R: Rng + ?Sized>(k: usize, rng: &mut R) -> Matrix {
    let mut m = Array2::from_shape_fn((k, k), |_| {
        let re: f64 = rng.sample(StandardNormal);
        let im: f64 = rng.sample(StandardNormal);
        Complex64::new(re, im)
    });
    // modified Gram-Schmidt on rows, twice for stability
    for _pass in 0..2 {
        for i in 0..k {
            for j in 0..i {
                let proj: Complex64 = (0..k).map(|c| m[[j, c]].conj() * m[[i, c]]).sum();
                for c in 0..k {
                    let v = m[[j, c]];
                    m[[i, c]] -= proj * v;
                }
            }
            let norm = (0..k).map(|c| m[[i, c]].norm_sqr()).sum::<f64>().sqrt();
            for c in 0..k {
                m[[i, c]] /= norm;
            }
        }
    }
    m
}

/// Reads a matrix given as rows of `[re, im]` pairs.
pub fn from_pairs(rows: &[Vec<[f64; 2]>]) -> Result<Matrix> {
    let n = rows.len();
    let cols = rows.first().map_or(0, Vec::len);
    if rows.iter().any(|r| r.len() != cols) {
        return Err(Error::Validation("ragged matrix rows".into()));
    }
    Ok(Array2::from_shape_fn((n, cols), |(i, j)| {
        Complex64::new(rows[i][j][0], rows[i][j][1])
    }))
}

pub fn to_pairs(m: &Matrix) -> Vec<Vec<[f64; 2]>> {
    m.rows()
        .into_iter()
        .map(|r| r.iter().map(|z| [z.re, z.im]).collect())
        .collect()
}

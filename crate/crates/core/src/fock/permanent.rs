use ndarray::Array2;
use num_complex::Complex64;

use super::OccupationVector;
use crate::error::{Error, Result};
use crate::linalg::{Matrix, ZERO};

/// Largest photon number accepted by [`permanent_amplitude`]. Ryser costs
/// `O(2^n n)`, so this stays well inside desk-scale runtimes.
pub const MAX_PERMANENT_PHOTONS: usize = 12;

/// Matrix permanent by Ryser's formula, visiting column subsets in Gray-code
/// order so each step updates the row sums by a single column.
pub fn permanent(a: &Matrix) -> Complex64 {
    let n = a.nrows();
    assert_eq!(n, a.ncols(), "permanent of a non-square matrix");
    if n == 0 {
        return Complex64::new(1.0, 0.0);
    }
    let mut row_sums = vec![ZERO; n];
    let mut total = ZERO;
    let mut gray: u64 = 0;
    for k in 1u64..(1u64 << n) {
        let col = k.trailing_zeros() as usize;
        gray ^= 1 << col;
        let added = gray & (1 << col) != 0;
        for (i, s) in row_sums.iter_mut().enumerate() {
            if added {
                *s += a[[i, col]];
            } else {
                *s -= a[[i, col]];
            }
        }
        let prod: Complex64 = row_sums.iter().product();
        if gray.count_ones().is_multiple_of(2) {
            total += prod;
        } else {
            total -= prod;
        }
    }
    if n % 2 == 1 {
        -total
    } else {
        total
    }
}

/// Transition amplitude `⟨output| U |input⟩` for bosons under the mode map
/// `U`, as `per(U[S, T]) / sqrt(∏ s_i! ∏ t_j!)` where rows repeat each input
/// mode by its occupation and columns repeat each output mode likewise.
pub fn permanent_amplitude(
    u: &Matrix,
    input: &OccupationVector,
    output: &OccupationVector,
) -> Result<Complex64> {
    if input.total() != output.total() {
        return Err(Error::PhotonNumber {
            input: input.total(),
            output: output.total(),
        });
    }
    let n = input.total();
    if n > MAX_PERMANENT_PHOTONS {
        return Err(Error::Cap {
            what: "photon number for permanent evaluation",
            requested: n,
            cap: MAX_PERMANENT_PHOTONS,
        });
    }
    let m = u.nrows();
    if let Some(bad) = input.bosons().chain(output.bosons()).find(|&b| b >= m) {
        return Err(Error::lookup(
            "mode index",
            format!("{bad} (unitary is {m}x{m})"),
        ));
    }
    let rows: Vec<usize> = input.bosons().collect();
    let cols: Vec<usize> = output.bosons().collect();
    let sub = Array2::from_shape_fn((n, n), |(i, j)| u[[rows[i], cols[j]]]);
    let norm = (input.factorial_product() * output.factorial_product()).sqrt();
    Ok(permanent(&sub) / norm)
}

use ndarray::Array2;
use num_complex::Complex64;

use super::{Element, OpticalNetwork};
use crate::error::Result;
use crate::linalg::{self, Matrix};

/// Inputs further than this from unitary are rejected.
pub const RECK_INPUT_TOL: f64 = 1e-10;

/// Below this modulus an entry is already nulled and needs no beamsplitter.
const NULL_TOL: f64 = 1e-15;

/// Triangular decomposition of a `k x k` unitary mode map into at most
/// `k(k-1)/2` nearest-neighbour beamsplitters and a leading phase.
///
/// Rows are cleared from the bottom up: each entry left of the diagonal is
/// nulled by a two-column rotation, which leaves the row as a unit vector on
/// the diagonal. With `U T_1 ... T_m = D` the network is `D` followed by
/// `T_m†, ..., T_1†`.
pub fn reck_decompose(u: &Matrix) -> Result<OpticalNetwork> {
    linalg::ensure_unitary(u, RECK_INPUT_TOL, "matrix to decompose")?;
    let k = u.nrows();
    let mut w = u.clone();
    let mut rotations: Vec<(usize, Matrix)> = Vec::new();
    for r in (1..k).rev() {
        for c in 0..r {
            let a = w[[r, c]];
            if a.norm() <= NULL_TOL {
                continue;
            }
            let b = w[[r, c + 1]];
            let n = (a.norm_sqr() + b.norm_sqr()).sqrt();
            let t = Array2::from_shape_vec((2, 2), vec![b / n, a.conj() / n, -a / n, b.conj() / n])
                .expect("2x2");
            for row in 0..k {
                let (x, y) = (w[[row, c]], w[[row, c + 1]]);
                w[[row, c]] = x * t[[0, 0]] + y * t[[1, 0]];
                w[[row, c + 1]] = x * t[[0, 1]] + y * t[[1, 1]];
            }
            w[[r, c]] = Complex64::new(0.0, 0.0);
            rotations.push((c, t));
        }
    }
    let mut elements = Vec::new();
    for i in 0..k {
        let theta = w[[i, i]].arg();
        if theta.abs() > NULL_TOL {
            elements.push(Element::phase(i, theta));
        }
    }
    for (c, t) in rotations.into_iter().rev() {
        elements.push(Element::beamsplitter(c, c + 1, linalg::dagger(&t)));
    }
    OpticalNetwork::new(k, elements)
}

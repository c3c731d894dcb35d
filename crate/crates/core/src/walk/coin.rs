use crate::error::{Error, Result};
use crate::graph::{Graph, Vertex};
use crate::linalg::{self, Matrix};

#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CoinPreset {
    /// Sylvester Hadamard; every degree must be a power of two.
    Hadamard,
    Identity,
    /// Normalised DFT of each vertex's degree.
    Dft,
}

impl std::str::FromStr for CoinPreset {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "hadamard" => Ok(CoinPreset::Hadamard),
            "identity" => Ok(CoinPreset::Identity),
            "dft" => Ok(CoinPreset::Dft),
            other => Err(Error::lookup("coin preset", other)),
        }
    }
}

/// One unitary per vertex, indexed by the vertex's sorted neighbour list:
/// `w(x,c)† -> Σ_j A[slot(c)][slot(j)] w(x,j)†`.
#[derive(Debug, Clone, PartialEq)]
pub struct CoinAssignment {
    matrices: Vec<Matrix>,
}

impl CoinAssignment {
    pub fn new(g: &Graph, matrices: Vec<Matrix>) -> Result<Self> {
        let coins = CoinAssignment { matrices };
        coins.check_graph(g)?;
        for (x, m) in coins.matrices.iter().enumerate() {
            linalg::ensure_unitary(m, linalg::UNITARY_TOL, &format!("coin at vertex {x}"))?;
        }
        Ok(coins)
    }

    pub fn preset(g: &Graph, preset: CoinPreset) -> Result<Self> {
        let matrices = (0..g.vertex_count())
            .map(|x| preset_matrix(preset, g.degree(x), x))
            .collect::<Result<_>>()?;
        Ok(CoinAssignment { matrices })
    }

    /// Replaces the coin at `x`.
    pub fn with_vertex(mut self, g: &Graph, x: Vertex, m: Matrix) -> Result<Self> {
        if x >= self.matrices.len() {
            return Err(Error::lookup("vertex", x));
        }
        check_dim(g, x, &m)?;
        linalg::ensure_unitary(&m, linalg::UNITARY_TOL, &format!("coin at vertex {x}"))?;
        self.matrices[x] = m;
        Ok(self)
    }

    pub fn matrix(&self, x: Vertex) -> &Matrix {
        &self.matrices[x]
    }

    pub fn matrices(&self) -> &[Matrix] {
        &self.matrices
    }

    pub(crate) fn check_graph(&self, g: &Graph) -> Result<()> {
        if self.matrices.len() != g.vertex_count() {
            return Err(Error::Validation(format!(
                "coin assignment covers {} vertices, graph has {}",
                self.matrices.len(),
                g.vertex_count()
            )));
        }
        for (x, m) in self.matrices.iter().enumerate() {
            check_dim(g, x, m)?;
        }
        Ok(())
    }

    /// Block-diagonal mode map over all of `g`'s modes.
    pub fn block_matrix(&self, g: &Graph) -> Matrix {
        let mut total = linalg::identity(g.mode_count());
        for (x, m) in self.matrices.iter().enumerate() {
            let r = g.bundle(x);
            for a in 0..m.nrows() {
                for b in 0..m.ncols() {
                    total[[r.start + a, r.start + b]] = m[[a, b]];
                }
            }
        }
        total
    }
}

fn check_dim(g: &Graph, x: Vertex, m: &Matrix) -> Result<()> {
    let d = g.degree(x);
    if m.dim() != (d, d) {
        return Err(Error::Validation(format!(
            "coin at vertex {x} is {}x{} but the vertex has degree {d}",
            m.nrows(),
            m.ncols()
        )));
    }
    Ok(())
}

fn preset_matrix(preset: CoinPreset, degree: usize, x: Vertex) -> Result<Matrix> {
    match preset {
        CoinPreset::Identity => Ok(linalg::identity(degree)),
        CoinPreset::Dft => Ok(linalg::dft(degree)),
        CoinPreset::Hadamard if degree == 0 => Ok(linalg::identity(0)),
        CoinPreset::Hadamard => linalg::hadamard(degree).ok_or_else(|| {
            Error::Validation(format!(
                "hadamard coin needs a power-of-two degree; vertex {x} has degree {degree}"
            ))
        }),
    }
}

pub(crate) fn is_identity(m: &Matrix) -> bool {
    m.indexed_iter().all(|((i, j), &z)| {
        if i == j {
            z == linalg::ONE
        } else {
            z == linalg::ZERO
        }
    })
}

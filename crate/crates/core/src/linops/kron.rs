//! Solves with a single Kronecker product `M_t ⊗ K_x` of SPD factors.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::linops::ldl::{factor_spd, Factorization};
use crate::linops::sparse::{CsrMatrix, LinearOperator};

#[derive(Debug, Clone)]
enum TimeFactor {
    /// Block diagonal with 2×2 blocks (discontinuous-in-time mass); stores the inverses.
    Block2(Vec<[f64; 4]>),
    General(Factorization),
}

/// `(M_t ⊗ K_x)⁻¹` for time-major vectors.
///
/// `K_x` is factored once; a time factor made of 2×2 diagonal blocks is inverted
/// in closed form, anything else goes through a sparse factorization.
#[derive(Debug, Clone)]
pub struct KronSpdSolver {
    nt: usize,
    ns: usize,
    time: TimeFactor,
    space: Factorization,
}

impl KronSpdSolver {
    pub fn new(m_t: &CsrMatrix, k_x: &CsrMatrix) -> Result<Self> {
        let nt = m_t.nrows();
        if m_t.ncols() != nt {
            return Err(Error::DimensionMismatch {
                expected: nt,
                got: m_t.ncols(),
            });
        }
        let space = factor_spd(k_x)?;
        let time = match block2_inverses(m_t)? {
            Some(blocks) => TimeFactor::Block2(blocks),
            None => TimeFactor::General(factor_spd(m_t)?),
        };
        Ok(Self {
            nt,
            ns: k_x.nrows(),
            time,
            space,
        })
    }

    pub fn dim(&self) -> usize {
        self.nt * self.ns
    }

    pub fn uses_block_time_inverse(&self) -> bool {
        matches!(self.time, TimeFactor::Block2(_))
    }

    pub fn solve(&self, rhs: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; self.dim()];
        self.solve_into(rhs, &mut out);
        out
    }

    pub fn solve_into(&self, rhs: &[f64], out: &mut [f64]) {
        let ns = self.ns;
        // spatial solves on every time row
        out.par_chunks_mut(ns)
            .zip(rhs.par_chunks(ns))
            .for_each(|(o, r)| self.space.solve_into(r, o));
        match &self.time {
            TimeFactor::Block2(blocks) => {
                for (c, inv) in blocks.iter().enumerate() {
                    let (lo, hi) = out[2 * c * ns..(2 * c + 2) * ns].split_at_mut(ns);
                    for (a, b) in lo.iter_mut().zip(hi.iter_mut()) {
                        let (x, y) = (*a, *b);
                        *a = inv[0] * x + inv[1] * y;
                        *b = inv[2] * x + inv[3] * y;
                    }
                }
            }
            TimeFactor::General(f) => {
                let mut col = vec![0.0; self.nt];
                let mut sol = vec![0.0; self.nt];
                for s in 0..ns {
                    for t in 0..self.nt {
                        col[t] = out[t * ns + s];
                    }
                    f.solve_into(&col, &mut sol);
                    for t in 0..self.nt {
                        out[t * ns + s] = sol[t];
                    }
                }
            }
        }
    }
}

impl LinearOperator for KronSpdSolver {
    fn nrows(&self) -> usize {
        self.dim()
    }
    fn ncols(&self) -> usize {
        self.dim()
    }
    fn apply_into(&self, x: &[f64], y: &mut [f64]) {
        self.solve_into(x, y)
    }
}

fn block2_inverses(m: &CsrMatrix) -> Result<Option<Vec<[f64; 4]>>> {
    let n = m.nrows();
    if n % 2 != 0 || m.triplets().any(|(i, j, _)| i / 2 != j / 2) {
        return Ok(None);
    }
    (0..n / 2)
        .map(|c| {
            let (a, b) = (m.get(2 * c, 2 * c), m.get(2 * c, 2 * c + 1));
            let (cc, d) = (m.get(2 * c + 1, 2 * c), m.get(2 * c + 1, 2 * c + 1));
            let det = a * d - b * cc;
            if !(a > 0.0 && det > 0.0) {
                return Err(Error::NotSpd {
                    row: 2 * c,
                    pivot: det,
                });
            }
            Ok([d / det, -b / det, -cc / det, a / det])
        })
        .collect::<Result<Vec<_>>>()
        .map(Some)
}

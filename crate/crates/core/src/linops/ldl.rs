//! Envelope (skyline) LDLᵀ factorization under a reverse Cuthill–McKee ordering.
//!
//! SPD matrices are factored with a positive-pivot check. Quasi-definite
//! saddle matrices `[[A, B], [Bᵀ, -C]]` with `A`, `C` SPD admit an LDLᵀ
//! factorization for every symmetric ordering, so the same kernel handles them
//! with only a nonzero-pivot check.

use std::collections::VecDeque;

use crate::error::{Error, Result};
use crate::linops::sparse::{CsrMatrix, LinearOperator};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum PivotRule {
    Positive,
    Nonzero,
}

#[derive(Debug, Clone)]
pub struct Factorization {
    n: usize,
    /// `perm[new] = old`
    perm: Vec<usize>,
    first: Vec<usize>,
    rowptr: Vec<usize>,
    lower: Vec<f64>,
    diag: Vec<f64>,
}

/// Factor a symmetric positive definite matrix.
pub fn factor_spd(a: &CsrMatrix) -> Result<Factorization> {
    Factorization::new(a, PivotRule::Positive)
}

/// Factor a symmetric quasi-definite (or otherwise strongly factorizable) matrix.
pub fn factor_symmetric_indefinite(a: &CsrMatrix) -> Result<Factorization> {
    Factorization::new(a, PivotRule::Nonzero)
}

/// Reverse Cuthill–McKee ordering of the symmetrized pattern; `perm[new] = old`.
pub fn rcm_ordering(a: &CsrMatrix) -> Vec<usize> {
    let adj = a.adjacency();
    let n = adj.len();
    let mut visited = vec![false; n];
    let mut order = Vec::with_capacity(n);
    while order.len() < n {
        // start each component from a low-degree node, then move to a pseudo-peripheral one
        let seed = (0..n).filter(|&i| !visited[i]).min_by_key(|&i| adj[i].len()).unwrap();
        let start = pseudo_peripheral(&adj, seed, &visited);
        let mut queue = VecDeque::from([start]);
        visited[start] = true;
        while let Some(v) = queue.pop_front() {
            order.push(v);
            let mut nbrs: Vec<usize> = adj[v].iter().copied().filter(|&w| !visited[w]).collect();
            nbrs.sort_by_key(|&w| (adj[w].len(), w));
            for w in nbrs {
                visited[w] = true;
                queue.push_back(w);
            }
        }
    }
    order.reverse();
    order
}

fn pseudo_peripheral(adj: &[Vec<usize>], seed: usize, blocked: &[bool]) -> usize {
    let mut node = seed;
    let mut ecc = 0;
    for _ in 0..8 {
        let levels = bfs_levels(adj, node, blocked);
        let depth = *levels.iter().flatten().max().unwrap_or(&0);
        if depth <= ecc && ecc > 0 {
            break;
        }
        ecc = depth;
        node = (0..adj.len())
            .filter(|&i| levels[i] == Some(depth))
            .min_by_key(|&i| adj[i].len())
            .unwrap_or(node);
    }
    node
}

fn bfs_levels(adj: &[Vec<usize>], start: usize, blocked: &[bool]) -> Vec<Option<usize>> {
    let mut lev = vec![None; adj.len()];
    lev[start] = Some(0);
    let mut q = VecDeque::from([start]);
    while let Some(v) = q.pop_front() {
        let l = lev[v].unwrap();
        for &w in &adj[v] {
            if !blocked[w] && lev[w].is_none() {
                lev[w] = Some(l + 1);
                q.push_back(w);
            }
        }
    }
    lev
}

impl Factorization {
    fn new(a: &CsrMatrix, rule: PivotRule) -> Result<Self> {
        let n = a.nrows();
        if a.ncols() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                got: a.ncols(),
            });
        }
        let perm = rcm_ordering(a);
        let mut inv = vec![0; n];
        for (new, &old) in perm.iter().enumerate() {
            inv[old] = new;
        }

        // envelope of the permuted lower triangle
        let mut first: Vec<usize> = (0..n).collect();
        for (old_i, old_j, _) in a.triplets() {
            let (i, j) = (inv[old_i], inv[old_j]);
            let (hi, lo) = if i >= j { (i, j) } else { (j, i) };
            first[hi] = first[hi].min(lo);
        }
        let mut rowptr = Vec::with_capacity(n + 1);
        rowptr.push(0);
        for i in 0..n {
            rowptr.push(rowptr[i] + (i - first[i]));
        }
        let mut lower = vec![0.0; rowptr[n]];
        let mut diag = vec![0.0; n];
        for (old_i, old_j, v) in a.triplets() {
            let (i, j) = (inv[old_i], inv[old_j]);
            if i == j {
                diag[i] = v;
            } else if i > j {
                lower[rowptr[i] + j - first[i]] = v;
            }
        }
        // pivots are judged against the magnitude of their own row
        let mut row_scale = vec![0.0f64; n];
        for (old_i, _, v) in a.triplets() {
            row_scale[inv[old_i]] = row_scale[inv[old_i]].max(v.abs());
        }

        // row-oriented LDLᵀ: t holds the unscaled entries l_ik d_k of the current row
        let mut t = Vec::new();
        for i in 0..n {
            let fi = first[i];
            let row = rowptr[i]..rowptr[i + 1];
            t.clear();
            t.extend_from_slice(&lower[row.clone()]);
            for j in fi..i {
                let fj = first[j];
                let k0 = fi.max(fj);
                let lj = &lower[rowptr[j]..rowptr[j + 1]];
                let mut s = t[j - fi];
                for k in k0..j {
                    s -= t[k - fi] * lj[k - fj];
                }
                t[j - fi] = s;
            }
            let mut d = diag[i];
            for j in fi..i {
                let l = t[j - fi] / diag[j];
                d -= t[j - fi] * l;
                lower[rowptr[i] + j - fi] = l;
            }
            let tiny = 1e-14 * row_scale[i].max(f64::MIN_POSITIVE);
            match rule {
                PivotRule::Positive if !(d > tiny) => {
                    return Err(Error::NotSpd { row: perm[i], pivot: d });
                }
                PivotRule::Nonzero if !(d.abs() > tiny) => {
                    return Err(Error::SingularPivot(perm[i]));
                }
                _ => {}
            }
            diag[i] = d;
        }

        Ok(Self {
            n,
            perm,
            first,
            rowptr,
            lower,
            diag,
        })
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    /// Entries stored in the envelope of `L`.
    pub fn envelope_size(&self) -> usize {
        self.lower.len()
    }

    pub fn solve(&self, b: &[f64]) -> Vec<f64> {
        let mut x = vec![0.0; self.n];
        self.solve_into(b, &mut x);
        x
    }

    pub fn solve_into(&self, b: &[f64], out: &mut [f64]) {
        let n = self.n;
        let mut y: Vec<f64> = self.perm.iter().map(|&old| b[old]).collect();
        for i in 0..n {
            let fi = self.first[i];
            let li = &self.lower[self.rowptr[i]..self.rowptr[i + 1]];
            let s: f64 = li.iter().zip(&y[fi..i]).map(|(l, v)| l * v).sum();
            y[i] -= s;
        }
        for (yi, d) in y.iter_mut().zip(&self.diag) {
            *yi /= d;
        }
        for i in (0..n).rev() {
            let fi = self.first[i];
            let yi = y[i];
            let li = &self.lower[self.rowptr[i]..self.rowptr[i + 1]];
            for (l, v) in li.iter().zip(&mut y[fi..i]) {
                *v -= l * yi;
            }
        }
        for (new, &old) in self.perm.iter().enumerate() {
            out[old] = y[new];
        }
    }

    /// Count of negative pivots (the matrix inertia's negative part).
    pub fn negative_pivots(&self) -> usize {
        self.diag.iter().filter(|d| **d < 0.0).count()
    }
}

/// `x ↦ A⁻¹ x` as an operator.
impl LinearOperator for Factorization {
    fn nrows(&self) -> usize {
        self.n
    }
    fn ncols(&self) -> usize {
        self.n
    }
    fn apply_into(&self, x: &[f64], y: &mut [f64]) {
        self.solve_into(x, y)
    }
}

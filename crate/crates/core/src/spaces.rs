//! Uniform partitions of the unit interval, piecewise-linear finite element
//! spaces on them, and tensor products of a temporal and a spatial space.
//!
//! Tensor-product coefficient vectors use time-major ordering: the coefficient
//! of `φ_i(t) ψ_j(x)` sits at `i * dim(space) + j`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Uniform partition of `[0, 1]` into `n_cells` cells of width `1 / n_cells`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Partition1D {
    n_cells: usize,
}

impl Partition1D {
    pub fn uniform(n_cells: usize) -> Result<Self> {
        if n_cells == 0 {
            return Err(Error::EmptyPartition);
        }
        Ok(Self { n_cells })
    }

    pub fn n_cells(&self) -> usize {
        self.n_cells
    }

    pub fn h(&self) -> f64 {
        1.0 / self.n_cells as f64
    }

    pub fn node(&self, i: usize) -> f64 {
        i as f64 / self.n_cells as f64
    }

    pub fn cell(&self, i: usize) -> (f64, f64) {
        (self.node(i), self.node(i + 1))
    }

    /// Partition with every cell split into `factor` equal pieces.
    pub fn refined(&self, factor: usize) -> Self {
        Self {
            n_cells: self.n_cells * factor.max(1),
        }
    }

    /// Number of cells of `self` per cell of `coarse`, if `self` refines `coarse`.
    pub fn refinement_ratio(&self, coarse: &Partition1D) -> Option<usize> {
        (self.n_cells % coarse.n_cells == 0).then_some(self.n_cells / coarse.n_cells)
    }

    /// Index of the cell containing `x`; interior nodes belong to the cell on their left.
    pub fn locate(&self, x: f64) -> usize {
        let s = x * self.n_cells as f64;
        let c = s.ceil() as isize - 1;
        c.clamp(0, self.n_cells as isize - 1) as usize
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Endpoint {
    Left,
    Right,
}

/// A subset of `{left, right}`, used for Dirichlet sets and essential BCs.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
pub struct BoundarySet {
    pub left: bool,
    pub right: bool,
}

impl BoundarySet {
    pub const NONE: Self = Self {
        left: false,
        right: false,
    };
    pub const LEFT: Self = Self {
        left: true,
        right: false,
    };
    pub const RIGHT: Self = Self {
        left: false,
        right: true,
    };
    pub const BOTH: Self = Self {
        left: true,
        right: true,
    };

    pub fn contains(&self, e: Endpoint) -> bool {
        match e {
            Endpoint::Left => self.left,
            Endpoint::Right => self.right,
        }
    }

    pub fn is_empty(&self) -> bool {
        !self.left && !self.right
    }

    pub fn count(&self) -> usize {
        self.left as usize + self.right as usize
    }

    pub fn without(mut self, e: Endpoint) -> Self {
        match e {
            Endpoint::Left => self.left = false,
            Endpoint::Right => self.right = false,
        }
        self
    }

    pub fn is_superset_of(&self, other: &BoundarySet) -> bool {
        (self.left || !other.left) && (self.right || !other.right)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Continuity {
    C0,
    Dg,
}

/// Degree-1 finite element space on a uniform partition.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct FESpace1D {
    partition: Partition1D,
    continuity: Continuity,
    essential_bc: BoundarySet,
}

impl FESpace1D {
    pub fn continuous(partition: Partition1D, essential_bc: BoundarySet) -> Self {
        Self {
            partition,
            continuity: Continuity::C0,
            essential_bc,
        }
    }

    pub fn discontinuous(partition: Partition1D) -> Self {
        Self {
            partition,
            continuity: Continuity::Dg,
            essential_bc: BoundarySet::NONE,
        }
    }

    pub fn new(partition: Partition1D, continuity: Continuity, essential_bc: BoundarySet) -> Result<Self> {
        if continuity == Continuity::Dg && !essential_bc.is_empty() {
            return Err(Error::InvalidSpace(
                "discontinuous spaces carry no essential boundary conditions".into(),
            ));
        }
        let space = Self {
            partition,
            continuity,
            essential_bc,
        };
        if space.dim() == 0 {
            return Err(Error::InvalidSpace("space has no degrees of freedom".into()));
        }
        Ok(space)
    }

    pub fn partition(&self) -> &Partition1D {
        &self.partition
    }

    pub fn continuity(&self) -> Continuity {
        self.continuity
    }

    pub fn essential_bc(&self) -> BoundarySet {
        self.essential_bc
    }

    pub fn with_essential_bc(&self, bc: BoundarySet) -> Self {
        Self {
            essential_bc: bc,
            ..*self
        }
    }

    pub fn dim(&self) -> usize {
        let n = self.partition.n_cells;
        match self.continuity {
            Continuity::C0 => n + 1 - self.essential_bc.count(),
            Continuity::Dg => 2 * n,
        }
    }

    /// Global index of local basis function `local` (0 = left node, 1 = right node) of `cell`,
    /// or `None` when that node carries an essential condition.
    pub fn local_dof(&self, cell: usize, local: usize) -> Option<usize> {
        debug_assert!(local < 2);
        match self.continuity {
            Continuity::Dg => Some(2 * cell + local),
            Continuity::C0 => self.node_dof(cell + local),
        }
    }

    /// Global index of the nodal basis function at mesh node `node` (C0 only).
    pub fn node_dof(&self, node: usize) -> Option<usize> {
        let n = self.partition.n_cells;
        if (node == 0 && self.essential_bc.left) || (node == n && self.essential_bc.right) {
            return None;
        }
        Some(node - self.essential_bc.left as usize)
    }

    /// Coefficient functional of point evaluation at an endpoint.
    pub fn trace_vector(&self, endpoint: Endpoint) -> Vec<f64> {
        let mut v = vec![0.0; self.dim()];
        let n = self.partition.n_cells;
        let dof = match endpoint {
            Endpoint::Left => self.local_dof(0, 0),
            Endpoint::Right => self.local_dof(n - 1, 1),
        };
        if let Some(i) = dof {
            v[i] = 1.0;
        }
        v
    }

    /// Index of the single basis function that is nonzero at `endpoint`, if any.
    pub fn trace_dof(&self, endpoint: Endpoint) -> Option<usize> {
        let n = self.partition.n_cells;
        match endpoint {
            Endpoint::Left => self.local_dof(0, 0),
            Endpoint::Right => self.local_dof(n - 1, 1),
        }
    }

    /// Value of the FE function at each point (left limits at DG interfaces).
    pub fn evaluate(&self, coeffs: &[f64], points: &[f64]) -> Result<Vec<f64>> {
        if coeffs.len() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                got: coeffs.len(),
            });
        }
        points
            .iter()
            .map(|&x| {
                if !(0.0..=1.0).contains(&x) {
                    return Err(Error::PointOutsideDomain(x));
                }
                let c = self.partition.locate(x);
                let [l, r] = self.local_basis(c, x);
                let val = |loc: usize| self.local_dof(c, loc).map_or(0.0, |i| coeffs[i]);
                Ok(val(0) * l + val(1) * r)
            })
            .collect()
    }

    /// Values of the two local basis functions of `cell` at `x` (extended linearly outside).
    pub fn local_basis(&self, cell: usize, x: f64) -> [f64; 2] {
        let (a, _) = self.partition.cell(cell);
        let s = (x - a) / self.partition.h();
        [1.0 - s, s]
    }

    /// Derivatives of the two local basis functions of `cell`.
    pub fn local_basis_derivative(&self) -> [f64; 2] {
        let inv_h = 1.0 / self.partition.h();
        [-inv_h, inv_h]
    }

    /// Nodal interpolant of `f`. Constrained nodes are dropped, so `f` should
    /// vanish there for the interpolant to be exact.
    pub fn interpolate(&self, f: impl Fn(f64) -> f64) -> Vec<f64> {
        let mut v = vec![0.0; self.dim()];
        for c in 0..self.partition.n_cells {
            let (a, b) = self.partition.cell(c);
            for (loc, x) in [a, b].into_iter().enumerate() {
                if let Some(i) = self.local_dof(c, loc) {
                    v[i] = f(x);
                }
            }
        }
        v
    }
}

/// `time ⊗ space` with time-major coefficient ordering.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct TensorSpace {
    pub time: FESpace1D,
    pub space: FESpace1D,
}

impl TensorSpace {
    pub fn new(time: FESpace1D, space: FESpace1D) -> Self {
        Self { time, space }
    }

    pub fn dim(&self) -> usize {
        self.time.dim() * self.space.dim()
    }

    pub fn index(&self, time_index: usize, space_index: usize) -> usize {
        time_index * self.space.dim() + space_index
    }

    pub fn split(&self, flat: usize) -> (usize, usize) {
        let ns = self.space.dim();
        (flat / ns, flat % ns)
    }

    pub fn interpolate(&self, f: impl Fn(f64, f64) -> f64) -> Vec<f64> {
        let nt = self.time.dim();
        let ns = self.space.dim();
        let mut v = vec![0.0; nt * ns];
        let tnodes = nodal_points(&self.time);
        let xnodes = nodal_points(&self.space);
        for (i, &t) in tnodes.iter().enumerate() {
            for (j, &x) in xnodes.iter().enumerate() {
                v[i * ns + j] = f(t, x);
            }
        }
        v
    }

    /// Pointwise evaluation at `(t, x)`.
    pub fn evaluate(&self, coeffs: &[f64], t: f64, x: f64) -> Result<f64> {
        if coeffs.len() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                got: coeffs.len(),
            });
        }
        for p in [t, x] {
            if !(0.0..=1.0).contains(&p) {
                return Err(Error::PointOutsideDomain(p));
            }
        }
        let ct = self.time.partition().locate(t);
        let cx = self.space.partition().locate(x);
        let bt = self.time.local_basis(ct, t);
        let bx = self.space.local_basis(cx, x);
        let mut val = 0.0;
        for (a, wt) in bt.iter().enumerate() {
            let Some(i) = self.time.local_dof(ct, a) else { continue };
            for (b, wx) in bx.iter().enumerate() {
                if let Some(j) = self.space.local_dof(cx, b) {
                    val += wt * wx * coeffs[self.index(i, j)];
                }
            }
        }
        Ok(val)
    }

    /// Spatial coefficient slice at time-basis index `time_index`.
    pub fn time_slice<'a>(&self, coeffs: &'a [f64], time_index: usize) -> &'a [f64] {
        let ns = self.space.dim();
        &coeffs[time_index * ns..(time_index + 1) * ns]
    }
}

/// The node associated with each basis function, in dof order.
pub fn nodal_points(space: &FESpace1D) -> Vec<f64> {
    let mut pts = vec![0.0; space.dim()];
    let p = space.partition();
    for c in 0..p.n_cells() {
        let (a, b) = p.cell(c);
        for (loc, x) in [a, b].into_iter().enumerate() {
            if let Some(i) = space.local_dof(c, loc) {
                pts[i] = x;
            }
        }
    }
    pts
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn c0(n: usize, bc: BoundarySet) -> FESpace1D {
        FESpace1D::continuous(Partition1D::uniform(n).unwrap(), bc)
    }

    #[test]
    fn uniform_partitions() {
        assert!(matches!(Partition1D::uniform(0), Err(Error::EmptyPartition)));
        let p = Partition1D::uniform(1).unwrap();
        assert_eq!(p.cell(0), (0.0, 1.0));
        assert_eq!(p.h(), 1.0);
        assert_eq!(Partition1D::uniform(512).unwrap().h(), 1.0 / 512.0);
        let p = Partition1D::uniform(4).unwrap();
        let cells: Vec<_> = (0..4).map(|i| p.cell(i)).collect();
        assert_eq!(cells, vec![(0.0, 0.25), (0.25, 0.5), (0.5, 0.75), (0.75, 1.0)]);
    }

    #[test]
    fn dimensions() {
        assert_eq!(c0(4, BoundarySet::BOTH).dim(), 3);
        assert_eq!(c0(4, BoundarySet::LEFT).dim(), 4);
        let dg = FESpace1D::discontinuous(Partition1D::uniform(4).unwrap());
        assert_eq!(dg.dim(), 8);
        let ts = TensorSpace::new(c0(4, BoundarySet::NONE), c0(4, BoundarySet::BOTH));
        assert_eq!(ts.dim(), 15);
        assert!(FESpace1D::new(*dg.partition(), Continuity::Dg, BoundarySet::LEFT).is_err());
    }

    #[test]
    fn trace_vectors() {
        assert_eq!(c0(2, BoundarySet::NONE).trace_vector(Endpoint::Left), vec![1.0, 0.0, 0.0]);
        assert_eq!(c0(2, BoundarySet::LEFT).trace_vector(Endpoint::Left), vec![0.0, 0.0]);
        let dg = FESpace1D::discontinuous(Partition1D::uniform(2).unwrap());
        assert_eq!(dg.trace_vector(Endpoint::Right), vec![0.0, 0.0, 0.0, 1.0]);
        for bc in [BoundarySet::NONE, BoundarySet::LEFT, BoundarySet::RIGHT, BoundarySet::BOTH] {
            let s = c0(5, bc);
            for e in [Endpoint::Left, Endpoint::Right] {
                let l1: f64 = s.trace_vector(e).iter().map(|v| v.abs()).sum();
                assert_eq!(l1, if bc.contains(e) { 0.0 } else { 1.0 });
            }
        }
    }

    #[test]
    fn evaluation() {
        let s = c0(8, BoundarySet::NONE);
        let c = s.interpolate(|x| x);
        assert!((s.evaluate(&c, &[0.5]).unwrap()[0] - 0.5).abs() < 1e-15);
        let zero = vec![0.0; s.dim()];
        assert_eq!(s.evaluate(&zero, &[0.3]).unwrap(), vec![0.0]);
        let hat = c0(2, BoundarySet::NONE);
        assert!((hat.evaluate(&[0.0, 1.0, 0.0], &[0.25]).unwrap()[0] - 0.5).abs() < 1e-15);
        assert!(matches!(s.evaluate(&c, &[1.5]), Err(Error::PointOutsideDomain(_))));
        assert!(s.evaluate(&c[1..], &[0.5]).is_err());
    }

    #[test]
    fn dg_uses_left_limit_at_interfaces() {
        let dg = FESpace1D::discontinuous(Partition1D::uniform(2).unwrap());
        // cell 0 constant 1, cell 1 constant 2
        let c = [1.0, 1.0, 2.0, 2.0];
        assert_eq!(dg.evaluate(&c, &[0.5, 0.0, 1.0]).unwrap(), vec![1.0, 1.0, 2.0]);
    }

    #[test]
    fn p1_reproduces_affine_functions() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for n in [1, 3, 8, 17] {
            let p = Partition1D::uniform(n).unwrap();
            for s in [FESpace1D::continuous(p, BoundarySet::NONE), FESpace1D::discontinuous(p)] {
                let (a, b) = (rng.random_range(-2.0..2.0), rng.random_range(-2.0..2.0));
                let c = s.interpolate(|x| a + b * x);
                let pts: Vec<f64> = (0..10).map(|_| rng.random_range(0.0..=1.0)).collect();
                for (x, v) in pts.iter().zip(s.evaluate(&c, &pts).unwrap()) {
                    assert!((v - (a + b * x)).abs() < 1e-13);
                }
            }
        }
    }

    #[test]
    fn tensor_index_round_trip() {
        for (nt, nx) in [(1, 1), (3, 4), (8, 5)] {
            let ts = TensorSpace::new(
                FESpace1D::discontinuous(Partition1D::uniform(nt).unwrap()),
                c0(nx, BoundarySet::LEFT),
            );
            for flat in 0..ts.dim() {
                let (i, j) = ts.split(flat);
                assert_eq!(ts.index(i, j), flat);
            }
        }
    }

    #[test]
    fn tensor_evaluation_of_bilinear_interpolant() {
        let ts = TensorSpace::new(c0(4, BoundarySet::NONE), c0(6, BoundarySet::NONE));
        let c = ts.interpolate(|t, x| (1.0 + t) * (2.0 - x));
        let v = ts.evaluate(&c, 0.3, 0.55).unwrap();
        assert!((v - 1.3 * 1.45).abs() < 1e-14);
    }
}

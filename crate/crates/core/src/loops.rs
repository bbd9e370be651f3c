//! Generalized loops, corner edges and oriented surfaces spanning a loop.

use std::collections::BTreeSet;

use rand::Rng;

use crate::error::{domain, Error, Result};
use crate::forms::{Chain, Form, Ring};
use crate::lattice::{Cell, Lattice, LatticeBox};
use crate::potential::copoincare_potential;

/// A 1-chain with coefficients in {-1, 0, 1} and empty boundary.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GeneralizedLoop {
    chain: Chain,
    corners: BTreeSet<Cell>,
}

impl GeneralizedLoop {
    pub fn new(chain: Chain) -> Result<GeneralizedLoop> {
        if chain.degree() != 1 || chain.lattice() != Lattice::Primal {
            return domain("a loop is a primal 1-chain");
        }
        if let Some((c, v)) = chain.iter().find(|(_, v)| v.abs() > 1) {
            return Err(Error::Validation { msg: format!("coefficient {v} outside {{-1,0,1}}"), witness: c.to_string() });
        }
        if let Some((c, _)) = chain.boundary()?.iter().next() {
            return Err(Error::Validation { msg: "nonzero boundary".into(), witness: c.to_string() });
        }
        let support: BTreeSet<Cell> = chain.support().collect();
        let corners = support
            .iter()
            .copied()
            .filter(|&e| {
                e.cofaces(None)
                    .iter()
                    .any(|&(p, _)| p.faces().iter().any(|&(f, _)| f != e && support.contains(&f)))
            })
            .collect();
        Ok(GeneralizedLoop { chain, corners })
    }

    /// Boundary of the `r × t` block of plaquettes in the plane of axes
    /// `(i, j)`, `i < j`, with lower corner `corner`, oriented from `e_i` to `e_j`.
    pub fn rectangle(corner: &[i32], i: usize, j: usize, r: i32, t: i32) -> Result<GeneralizedLoop> {
        if i >= j || j >= corner.len() || r < 1 || t < 1 {
            return domain(format!("bad rectangle plane ({i},{j}) or size {r}x{t}"));
        }
        let mut block = Chain::zero(Lattice::Primal, corner.len(), 2);
        let p0 = Cell::new(Lattice::Primal, corner, 1 << i | 1 << j);
        for a in 0..r {
            for b in 0..t {
                block.add(p0.shifted(i, a).shifted(j, b), 1);
            }
        }
        GeneralizedLoop::new(block.boundary()?)
    }

    pub fn chain(&self) -> &Chain {
        &self.chain
    }

    pub fn dim(&self) -> usize {
        self.chain.dim()
    }

    /// `ℓ = |supp γ|`, counting positively oriented edges.
    pub fn length(&self) -> usize {
        self.chain.len()
    }

    /// `ℓ_c`, the number of corner edges.
    pub fn corner_count(&self) -> usize {
        self.corners.len()
    }

    pub fn is_corner(&self, e: Cell) -> bool {
        self.corners.contains(&e)
    }

    pub fn coeff(&self, e: Cell) -> i64 {
        self.chain.get(e)
    }

    pub fn edges(&self) -> impl Iterator<Item = (Cell, i64)> + '_ {
        self.chain.iter()
    }

    /// `γ_c`: the restriction of γ to its corner edges.
    pub fn corner_restriction(&self) -> Chain {
        self.restricted(|e| self.is_corner(e))
    }

    /// `γ₁ = γ − γ_c`.
    pub fn straight_part(&self) -> Chain {
        self.restricted(|e| !self.is_corner(e))
    }

    fn restricted(&self, keep: impl Fn(Cell) -> bool) -> Chain {
        let mut q = Chain::zero(Lattice::Primal, self.dim(), 1);
        for (e, v) in self.chain.iter().filter(|&(e, _)| keep(e)) {
            q.add(e, v);
        }
        q
    }

    pub fn bounding_box(&self) -> Option<LatticeBox> {
        LatticeBox::bounding(Lattice::Primal, self.dim(), self.chain.support())
    }

    pub fn translated(&self, delta: &[i32]) -> Result<GeneralizedLoop> {
        let mut q = Chain::zero(Lattice::Primal, self.dim(), 1);
        for (e, v) in self.chain.iter() {
            q.add(e.translated(delta), v);
        }
        GeneralizedLoop::new(q)
    }

    /// Disjoint union; fails if the sum leaves {-1, 0, 1}.
    pub fn union(&self, other: &GeneralizedLoop) -> Result<GeneralizedLoop> {
        GeneralizedLoop::new(self.chain.plus(&other.chain))
    }
}

/// A 2-chain `q` with `∂q = γ`, supported in `region`.
#[derive(Clone, Debug)]
pub struct OrientedSurface {
    pub chain: Chain,
    pub region: LatticeBox,
}

/// Spanning surface of γ inside `bx`: the copoincaré potential of the loop's
/// indicator 1-form, read back as a chain.
pub fn build_surface(gamma: &GeneralizedLoop, bx: &LatticeBox) -> Result<OrientedSurface> {
    if let Some(e) = gamma.chain.support().find(|&e| !bx.contains_cell(e)) {
        return domain(format!("loop edge {e} outside the box"));
    }
    let Some(tight) = gamma.bounding_box() else {
        return Ok(OrientedSurface { chain: Chain::zero(Lattice::Primal, gamma.dim(), 2), region: bx.clone() });
    };
    let sigma = Form::from_chain(&gamma.chain, Ring::Integers);
    let omega = copoincare_potential(&sigma, &tight)?;
    let chain = omega.to_chain();
    debug_assert_eq!(chain.boundary()?, gamma.chain);
    Ok(OrientedSurface { chain, region: bx.clone() })
}

/// Plaquettes of `q` none of whose edges carry γ.
pub fn internal_plaquettes(q: &Chain, gamma: &GeneralizedLoop) -> BTreeSet<Cell> {
    q.support()
        .filter(|p| p.faces().iter().all(|&(e, _)| gamma.coeff(e) == 0))
        .collect()
}

/// Edges of plaquettes of `q` at which `∂q` vanishes.
pub fn internal_edges(q: &Chain) -> BTreeSet<Cell> {
    let bd = q.boundary().expect("surface is a 2-chain");
    q.support()
        .flat_map(|p| p.faces().into_iter().map(|(e, _)| e))
        .filter(|&e| bd.get(e) == 0)
        .collect()
}

/// Random loop inside `bx`: a rectangle, a union of two rectangles, or a
/// closed lattice walk with backtracks cancelled. Only valid loops are returned.
pub fn random_loop<R: Rng>(rng: &mut R, bx: &LatticeBox) -> GeneralizedLoop {
    loop {
        let cand = match rng.gen_range(0..3) {
            0 => random_rectangle(rng, bx),
            1 => random_rectangle(rng, bx).and_then(|a| random_rectangle(rng, bx).and_then(|b| a.union(&b))),
            _ => random_walk_loop(rng, bx),
        };
        if let Ok(g) = cand {
            if g.length() > 0 && g.chain.support().all(|e| bx.contains_cell(e)) {
                return g;
            }
        }
    }
}

fn random_rectangle<R: Rng>(rng: &mut R, bx: &LatticeBox) -> Result<GeneralizedLoop> {
    let dim = bx.dim();
    let i = rng.gen_range(0..dim - 1);
    let j = rng.gen_range(i + 1..dim);
    let (lo, hi) = (bx.lower(), bx.upper());
    let r = rng.gen_range(1..=(hi[i] - lo[i]).min(4));
    let t = rng.gen_range(1..=(hi[j] - lo[j]).min(4));
    let mut corner: Vec<i32> = (0..dim).map(|a| rng.gen_range(lo[a]..=hi[a])).collect();
    corner[i] = rng.gen_range(lo[i]..=hi[i] - r);
    corner[j] = rng.gen_range(lo[j]..=hi[j] - t);
    GeneralizedLoop::rectangle(&corner, i, j, r, t)
}

fn random_walk_loop<R: Rng>(rng: &mut R, bx: &LatticeBox) -> Result<GeneralizedLoop> {
    let dim = bx.dim();
    let start: Vec<i32> = (0..dim).map(|a| rng.gen_range(bx.lower()[a]..=bx.upper()[a])).collect();
    let mut q = Chain::zero(Lattice::Primal, dim, 1);
    let mut p = start.clone();
    let walk = |p: &mut Vec<i32>, axis: usize, dir: i32, q: &mut Chain| {
        let from = p.clone();
        p[axis] += dir;
        let base = if dir > 0 { from } else { p.clone() };
        q.add(Cell::new(Lattice::Primal, &base, 1 << axis), dir as i64);
    };
    for _ in 0..rng.gen_range(4..16) {
        let axis = rng.gen_range(0..dim);
        let dir = if rng.gen_bool(0.5) { 1 } else { -1 };
        if bx.contains_point(&{
            let mut n = p.clone();
            n[axis] += dir;
            n
        }) {
            walk(&mut p, axis, dir, &mut q);
        }
    }
    for axis in 0..dim {
        while p[axis] != start[axis] {
            let dir = (start[axis] - p[axis]).signum();
            walk(&mut p, axis, dir, &mut q);
        }
    }
    GeneralizedLoop::new(q)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn plaquette_loop() -> GeneralizedLoop {
        GeneralizedLoop::rectangle(&[0, 0, 0, 0], 0, 1, 1, 1).unwrap()
    }

    #[test]
    fn unit_plaquette_loop() {
        let g = plaquette_loop();
        assert_eq!((g.length(), g.corner_count()), (4, 4));
        assert_eq!(g.corner_restriction(), *g.chain());
        assert!(g.straight_part().is_empty());
    }

    #[test]
    fn single_edge_is_not_a_loop() {
        let mut q = Chain::zero(Lattice::Primal, 3, 1);
        q.add(Cell::new(Lattice::Primal, &[0, 0, 0], 1), 1);
        assert!(matches!(GeneralizedLoop::new(q), Err(Error::Validation { .. })));
    }

    #[test]
    fn rectangles_have_eight_corners() {
        for (r, t) in [(2, 2), (2, 5), (4, 4), (3, 7)] {
            let g = GeneralizedLoop::rectangle(&[0, 0, 0, 0], 1, 3, r, t).unwrap();
            assert_eq!(g.length(), (2 * r + 2 * t) as usize);
            assert_eq!(g.corner_count(), 8);
        }
    }

    #[test]
    fn far_rectangles_add_corner_counts() {
        let a = GeneralizedLoop::rectangle(&[0, 0, 0, 0], 0, 1, 3, 2).unwrap();
        let b = GeneralizedLoop::rectangle(&[10, 10, 0, 0], 2, 3, 2, 4).unwrap();
        let u = a.union(&b).unwrap();
        assert_eq!(u.corner_count(), a.corner_count() + b.corner_count());
    }

    #[test]
    fn planar_rectangle_surface_is_the_block() {
        let bx = LatticeBox::centered(4, 6).unwrap();
        let g = GeneralizedLoop::rectangle(&[-1, 0, 2, 0], 0, 2, 3, 2).unwrap();
        let s = build_surface(&g, &bx).unwrap();
        assert_eq!(s.chain.len(), 6);
        assert!(s.chain.iter().all(|(_, v)| v == 1));
        assert_eq!(s.chain.boundary().unwrap(), *g.chain());
        let unit = build_surface(&plaquette_loop(), &bx).unwrap();
        assert_eq!(unit.chain.len(), 1);
    }

    #[test]
    fn bent_loop_has_a_surface() {
        // walk over three coordinate planes
        let path = [(0, 1), (1, 1), (2, 1), (0, -1), (1, -1), (2, -1)];
        let mut q = Chain::zero(Lattice::Primal, 4, 1);
        let mut p = vec![0; 4];
        for (axis, dir) in path {
            let from = p.clone();
            p[axis] += dir;
            let base = if dir > 0 { from } else { p.clone() };
            q.add(Cell::new(Lattice::Primal, &base, 1 << axis), dir as i64);
        }
        let g = GeneralizedLoop::new(q).unwrap();
        let s = build_surface(&g, &LatticeBox::centered(4, 3).unwrap()).unwrap();
        assert_eq!(s.chain.boundary().unwrap(), *g.chain());
    }

    #[test]
    fn internal_cells_of_planar_squares() {
        let bx = LatticeBox::centered(2, 5).unwrap();
        let g3 = GeneralizedLoop::rectangle(&[0, 0], 0, 1, 3, 3).unwrap();
        let s3 = build_surface(&g3, &bx).unwrap();
        let inner = internal_plaquettes(&s3.chain, &g3);
        assert_eq!(inner.into_iter().collect::<Vec<_>>(), vec![Cell::new(Lattice::Primal, &[1, 1], 0b11)]);
        let unit = GeneralizedLoop::rectangle(&[0, 0], 0, 1, 1, 1).unwrap();
        assert!(internal_plaquettes(&build_surface(&unit, &bx).unwrap().chain, &unit).is_empty());
        let g2 = GeneralizedLoop::rectangle(&[0, 0], 0, 1, 2, 2).unwrap();
        let edges = internal_edges(&build_surface(&g2, &bx).unwrap().chain);
        let want: BTreeSet<Cell> = [
            Cell::new(Lattice::Primal, &[0, 1], 0b01),
            Cell::new(Lattice::Primal, &[1, 1], 0b01),
            Cell::new(Lattice::Primal, &[1, 0], 0b10),
            Cell::new(Lattice::Primal, &[1, 1], 0b10),
        ]
        .into();
        assert_eq!(edges, want);
    }

    #[test]
    fn surface_rejects_loop_outside_box() {
        let g = GeneralizedLoop::rectangle(&[0, 0], 0, 1, 3, 3).unwrap();
        assert!(build_surface(&g, &LatticeBox::cube(2, 0, 2).unwrap()).is_err());
    }

    #[test]
    fn random_loops_are_valid() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let bx = LatticeBox::centered(4, 6).unwrap();
        for _ in 0..30 {
            let g = random_loop(&mut rng, &bx);
            let s = build_surface(&g, &bx).unwrap();
            assert_eq!(s.chain.boundary().unwrap(), *g.chain());
        }
    }
}

//! Cells of the hypercubic complex on ℤ^m and of its dual, boundary and
//! coboundary chains, the Hodge star on cells, and boxes.
//!
//! Axes are 0-based throughout. A dual point is addressed by the integer
//! index `a` of the primal m-cell whose center it is, i.e. the point
//! `a + (1/2, …, 1/2)`. Dual edges point in the negative coordinate
//! directions, so a dual cell with axis `j` spans indices `a_j - 1 ..= a_j`.

use std::fmt;

use crate::error::{domain, Error, Result};

pub const MAX_DIM: usize = 6;
const COORD_BITS: u32 = 9;
const COORD_BIAS: i32 = 1 << (COORD_BITS - 1);
const COORD_MASK: u64 = (1 << COORD_BITS) - 1;
const AXES_SHIFT: u32 = 4;
const DIM_SHIFT: u32 = 1;

/// Largest absolute coordinate representable in a packed [`Cell`].
pub const COORD_LIMIT: i32 = COORD_BIAS - 1;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Lattice {
    Primal,
    Dual,
}

impl Lattice {
    /// Direction in which cells extend along their axes.
    #[inline]
    pub fn step(self) -> i32 {
        match self {
            Lattice::Primal => 1,
            Lattice::Dual => -1,
        }
    }

    pub fn other(self) -> Lattice {
        match self {
            Lattice::Primal => Lattice::Dual,
            Lattice::Dual => Lattice::Primal,
        }
    }
}

/// A positively oriented cell packed into 64 bits.
///
/// Bit layout, most significant first:
///
/// ```text
/// 63..10  six 9-bit coordinates, biased by 256, coordinate 0 first
///  9..4   axis set, bit 4+i set when axis i spans the cell
///  3..1   lattice dimension
///  0      1 for dual cells
/// ```
///
/// Comparing keys therefore orders cells lexicographically by base point,
/// then by axis set (as a bitmask, i.e. colexicographically).
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Cell(u64);

#[inline]
fn coord_shift(i: usize) -> u32 {
    64 - COORD_BITS * (i as u32 + 1)
}

impl Cell {
    /// Packs a cell. Panics if a coordinate is outside `±COORD_LIMIT` or the
    /// axis mask uses axes beyond `base.len()`.
    pub fn new(lattice: Lattice, base: &[i32], axes: u8) -> Cell {
        let dim = base.len();
        assert!((1..=MAX_DIM).contains(&dim), "dimension {dim} unsupported");
        assert!(axes >> dim == 0, "axis mask {axes:#b} exceeds dimension {dim}");
        let mut key = 0u64;
        for (i, &x) in base.iter().enumerate() {
            assert!(x.abs() <= COORD_LIMIT, "coordinate {x} outside packing range");
            key |= ((x + COORD_BIAS) as u64) << coord_shift(i);
        }
        key |= (axes as u64) << AXES_SHIFT;
        key |= (dim as u64) << DIM_SHIFT;
        if lattice == Lattice::Dual {
            key |= 1;
        }
        Cell(key)
    }

    pub fn vertex(lattice: Lattice, base: &[i32]) -> Cell {
        Cell::new(lattice, base, 0)
    }

    #[inline]
    pub fn key(self) -> u64 {
        self.0
    }

    #[inline]
    pub fn dim(self) -> usize {
        ((self.0 >> DIM_SHIFT) & 0b111) as usize
    }

    #[inline]
    pub fn lattice(self) -> Lattice {
        if self.0 & 1 == 1 {
            Lattice::Dual
        } else {
            Lattice::Primal
        }
    }

    #[inline]
    pub fn axes(self) -> u8 {
        ((self.0 >> AXES_SHIFT) & 0b11_1111) as u8
    }

    #[inline]
    pub fn degree(self) -> usize {
        self.axes().count_ones() as usize
    }

    #[inline]
    pub fn has_axis(self, i: usize) -> bool {
        self.axes() >> i & 1 == 1
    }

    #[inline]
    pub fn coord(self, i: usize) -> i32 {
        ((self.0 >> coord_shift(i)) & COORD_MASK) as i32 - COORD_BIAS
    }

    pub fn base(self) -> Vec<i32> {
        (0..self.dim()).map(|i| self.coord(i)).collect()
    }

    /// Axis indices in increasing order.
    pub fn axis_list(self) -> Vec<usize> {
        (0..self.dim()).filter(|&i| self.has_axis(i)).collect()
    }

    #[inline]
    pub fn shifted(self, i: usize, delta: i32) -> Cell {
        let x = self.coord(i) + delta;
        assert!(x.abs() <= COORD_LIMIT, "coordinate {x} outside packing range");
        let s = coord_shift(i);
        Cell((self.0 & !(COORD_MASK << s)) | (((x + COORD_BIAS) as u64) << s))
    }

    pub fn translated(self, delta: &[i32]) -> Cell {
        let mut c = self;
        for (i, &d) in delta.iter().enumerate() {
            if d != 0 {
                c = c.shifted(i, d);
            }
        }
        c
    }

    #[inline]
    pub fn with_axes(self, axes: u8) -> Cell {
        Cell((self.0 & !(0b11_1111 << AXES_SHIFT)) | ((axes as u64) << AXES_SHIFT))
    }

    /// Closed coordinate range covered along axis `i`.
    #[inline]
    pub fn extent(self, i: usize) -> (i32, i32) {
        let a = self.coord(i);
        if self.has_axis(i) {
            let b = a + self.lattice().step();
            (a.min(b), a.max(b))
        } else {
            (a, a)
        }
    }

    /// Corner points of the cell.
    pub fn corners(self) -> Vec<Vec<i32>> {
        let axes = self.axis_list();
        let step = self.lattice().step();
        let base = self.base();
        (0..1u32 << axes.len())
            .map(|bits| {
                let mut p = base.clone();
                for (t, &j) in axes.iter().enumerate() {
                    if bits >> t & 1 == 1 {
                        p[j] += step;
                    }
                }
                p
            })
            .collect()
    }

    /// Faces `(f, ∂c[f])` of the positively oriented cell.
    pub fn faces(self) -> Vec<(Cell, i64)> {
        let step = self.lattice().step();
        let axes = self.axis_list();
        let mut out = Vec::with_capacity(2 * axes.len());
        for (t, &j) in axes.iter().enumerate() {
            // t is 0-based here, so (-1)^{t+1} is the paper's (-1)^{k'}
            let s = if t % 2 == 0 { -1 } else { 1 };
            let f = self.with_axes(self.axes() & !(1 << j));
            out.push((f, s));
            out.push((f.shifted(j, step), -s));
        }
        out
    }

    /// Cofaces `(c', ∂c'[c])`, dropping cells outside `region` when given.
    pub fn cofaces(self, region: Option<&LatticeBox>) -> Vec<(Cell, i64)> {
        let step = self.lattice().step();
        let mask = self.axes();
        let mut out = Vec::with_capacity(2 * (self.dim() - self.degree()));
        for i in 0..self.dim() {
            if mask >> i & 1 == 1 {
                continue;
            }
            let below = (mask & ((1u8 << i) - 1)).count_ones();
            // 1-based position of i in the enlarged axis list is below+1
            let s: i64 = if below % 2 == 0 { -1 } else { 1 };
            let up = self.with_axes(mask | 1 << i);
            let down = up.shifted(i, -step);
            for (c, coef) in [(up, s), (down, -s)] {
                if region.map_or(true, |r| r.contains_cell(c)) {
                    out.push((c, coef));
                }
            }
        }
        out
    }

    /// Hodge star: the dual cell together with the orientation sign.
    pub fn hodge(self) -> (Cell, i64) {
        let dim = self.dim();
        let full = ((1u16 << dim) - 1) as u8;
        let comp = full & !self.axes();
        (
            self.with_lattice(self.lattice().other()).with_axes(comp),
            merge_sign(self.axes(), comp),
        )
    }

    fn with_lattice(self, l: Lattice) -> Cell {
        match l {
            Lattice::Primal => Cell(self.0 & !1),
            Lattice::Dual => Cell(self.0 | 1),
        }
    }
}

/// Sign of the permutation sorting the concatenation (first, second) of two
/// increasing disjoint axis lists.
pub fn merge_sign(first: u8, second: u8) -> i64 {
    let mut inversions = 0;
    for j in 0..8 {
        if first >> j & 1 == 1 {
            inversions += (second & ((1u16 << j) - 1) as u8).count_ones();
        }
    }
    if inversions % 2 == 0 {
        1
    } else {
        -1
    }
}

impl fmt::Debug for Cell {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for Cell {
    /// `p 0,1,-2 02` is the primal cell at (0,1,-2) spanned by axes 0 and 2;
    /// vertices print `-` for the axis set.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let tag = match self.lattice() {
            Lattice::Primal => 'p',
            Lattice::Dual => 'd',
        };
        let coords: Vec<String> = self.base().iter().map(|x| x.to_string()).collect();
        let axes: String = if self.axes() == 0 {
            "-".into()
        } else {
            self.axis_list().iter().map(|i| i.to_string()).collect()
        };
        write!(f, "{tag} {} {axes}", coords.join(","))
    }
}

impl std::str::FromStr for Cell {
    type Err = Error;

    fn from_str(s: &str) -> Result<Cell> {
        let bad = || Error::Domain(format!("malformed cell `{s}`"));
        let mut it = s.split_whitespace();
        let lattice = match it.next().ok_or_else(bad)? {
            "p" => Lattice::Primal,
            "d" => Lattice::Dual,
            _ => return Err(bad()),
        };
        let base: Vec<i32> = it
            .next()
            .ok_or_else(bad)?
            .split(',')
            .map(|x| x.parse().map_err(|_| bad()))
            .collect::<Result<_>>()?;
        let axes_txt = it.next().ok_or_else(bad)?;
        if it.next().is_some() || base.is_empty() || base.len() > MAX_DIM {
            return Err(bad());
        }
        let mut axes = 0u8;
        if axes_txt != "-" {
            for ch in axes_txt.chars() {
                let i = ch.to_digit(10).ok_or_else(bad)? as usize;
                if i >= base.len() || axes >> i & 1 == 1 {
                    return Err(bad());
                }
                axes |= 1 << i;
            }
        }
        if base.iter().any(|x| x.abs() > COORD_LIMIT) {
            return Err(bad());
        }
        Ok(Cell::new(lattice, &base, axes))
    }
}

/// A cell together with an orientation sign.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct OrientedCell {
    pub cell: Cell,
    pub sign: i8,
}

impl OrientedCell {
    pub fn positive(cell: Cell) -> Self {
        OrientedCell { cell, sign: 1 }
    }

    pub fn neg(self) -> Self {
        OrientedCell { cell: self.cell, sign: -self.sign }
    }

    pub fn degree(self) -> usize {
        self.cell.degree()
    }

    pub fn hodge(self) -> OrientedCell {
        let (c, s) = self.cell.hodge();
        OrientedCell { cell: c, sign: self.sign * s as i8 }
    }
}

/// Brings `(base; axes; sign)` with an arbitrary axis order to canonical
/// form. A repeated axis gives `Ok(None)`, the zero cell.
pub fn canonicalize(
    lattice: Lattice,
    base: &[i32],
    axes: &[usize],
    sign: i8,
) -> Result<Option<OrientedCell>> {
    let dim = base.len();
    if !(2..=MAX_DIM).contains(&dim) {
        return domain(format!("dimension {dim} outside 2..={MAX_DIM}"));
    }
    if let Some(&bad) = axes.iter().find(|&&a| a >= dim) {
        return domain(format!("axis {bad} out of range for dimension {dim}"));
    }
    let mut mask = 0u8;
    let mut inversions = 0usize;
    for (t, &a) in axes.iter().enumerate() {
        if mask >> a & 1 == 1 {
            return Ok(None);
        }
        mask |= 1 << a;
        inversions += axes[..t].iter().filter(|&&b| b > a).count();
    }
    let sign = if inversions % 2 == 0 { sign } else { -sign };
    Ok(Some(OrientedCell { cell: Cell::new(lattice, base, mask), sign }))
}

/// A box `[lower_1, upper_1] × … × [lower_m, upper_m]` of lattice points,
/// closed on both ends. For dual boxes the bounds are dual-point indices.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct LatticeBox {
    lattice: Lattice,
    lower: Vec<i32>,
    upper: Vec<i32>,
}

impl LatticeBox {
    /// A primal box with `lower < upper` in every coordinate.
    pub fn new(lower: Vec<i32>, upper: Vec<i32>) -> Result<LatticeBox> {
        if lower.iter().zip(&upper).any(|(a, b)| a >= b) {
            return domain(format!("box needs lower < upper, got {lower:?} / {upper:?}"));
        }
        LatticeBox::with_bounds(Lattice::Primal, lower, upper)
    }

    /// Like [`LatticeBox::new`] but allows flat axes (`lower == upper`) and dual boxes.
    pub fn with_bounds(lattice: Lattice, lower: Vec<i32>, upper: Vec<i32>) -> Result<LatticeBox> {
        let dim = lower.len();
        if dim != upper.len() || !(1..=MAX_DIM).contains(&dim) {
            return domain(format!("bounds of dimension {dim}/{}", upper.len()));
        }
        if lower.iter().zip(&upper).any(|(a, b)| a > b) {
            return domain(format!("empty box {lower:?} / {upper:?}"));
        }
        if lower.iter().chain(&upper).any(|x| x.abs() > COORD_LIMIT - 1) {
            return domain("box exceeds the packable coordinate range");
        }
        Ok(LatticeBox { lattice, lower, upper })
    }

    pub fn cube(dim: usize, lo: i32, hi: i32) -> Result<LatticeBox> {
        LatticeBox::new(vec![lo; dim], vec![hi; dim])
    }

    /// `B_N = [-N, N]^m`.
    pub fn centered(dim: usize, n: i32) -> Result<LatticeBox> {
        LatticeBox::cube(dim, -n, n)
    }

    pub fn dim(&self) -> usize {
        self.lower.len()
    }

    pub fn lattice(&self) -> Lattice {
        self.lattice
    }

    pub fn lower(&self) -> &[i32] {
        &self.lower
    }

    pub fn upper(&self) -> &[i32] {
        &self.upper
    }

    pub fn point_count(&self) -> usize {
        self.lower.iter().zip(&self.upper).map(|(a, b)| (b - a + 1) as usize).product()
    }

    pub fn contains_point(&self, p: &[i32]) -> bool {
        p.iter().zip(self.lower.iter().zip(&self.upper)).all(|(x, (a, b))| a <= x && x <= b)
    }

    /// True when every corner of the cell lies in the box.
    #[inline]
    pub fn contains_cell(&self, c: Cell) -> bool {
        if c.lattice() != self.lattice || c.dim() != self.dim() {
            return false;
        }
        (0..self.dim()).all(|i| {
            let (a, b) = c.extent(i);
            self.lower[i] <= a && b <= self.upper[i]
        })
    }

    /// A cell of the box lying in the topological boundary of the box,
    /// i.e. some coordinate it does not span sits on a face.
    pub fn is_boundary_cell(&self, c: Cell) -> bool {
        self.contains_cell(c)
            && (0..self.dim()).any(|i| {
                !c.has_axis(i) && (c.coord(i) == self.lower[i] || c.coord(i) == self.upper[i])
            })
    }

    /// `B*`: the dual points that are corners of `★x` for points `x ∈ B`
    /// (and symmetrically from dual to primal).
    pub fn dual(&self) -> LatticeBox {
        let (lower, upper) = match self.lattice {
            Lattice::Primal => (
                self.lower.iter().map(|x| x - 1).collect(),
                self.upper.clone(),
            ),
            Lattice::Dual => (self.lower.clone(), self.upper.iter().map(|x| x + 1).collect()),
        };
        LatticeBox { lattice: self.lattice.other(), lower, upper }
    }

    /// Lattice points in lexicographic order (coordinate 0 slowest).
    pub fn points(&self) -> Vec<Vec<i32>> {
        let mut out = Vec::with_capacity(self.point_count());
        let mut p = self.lower.clone();
        loop {
            out.push(p.clone());
            let mut i = self.dim();
            loop {
                if i == 0 {
                    return out;
                }
                i -= 1;
                if p[i] < self.upper[i] {
                    p[i] += 1;
                    break;
                }
                p[i] = self.lower[i];
            }
        }
    }

    /// All positively oriented `k`-cells of the box in ascending cell order.
    pub fn cells(&self, k: usize) -> Vec<Cell> {
        let dim = self.dim();
        let masks: Vec<u8> = (0..1u16 << dim)
            .map(|m| m as u8)
            .filter(|m| m.count_ones() as usize == k)
            .collect();
        let mut out = Vec::new();
        for p in self.points() {
            for &m in &masks {
                let c = Cell::new(self.lattice, &p, m);
                if self.contains_cell(c) {
                    out.push(c);
                }
            }
        }
        out.sort_unstable();
        out
    }

    /// Oriented `k`-cells: each positive cell followed by its negative.
    pub fn oriented_cells(&self, k: usize) -> Vec<OrientedCell> {
        self.cells(k)
            .into_iter()
            .flat_map(|c| [OrientedCell { cell: c, sign: 1 }, OrientedCell { cell: c, sign: -1 }])
            .collect()
    }

    /// Box with axis `i` collapsed to the single value `x`.
    pub(crate) fn slice(&self, i: usize, x: i32) -> LatticeBox {
        let mut b = self.clone();
        b.lower[i] = x;
        b.upper[i] = x;
        b
    }

    /// Box grown by `r` in every direction.
    pub fn expanded(&self, r: i32) -> LatticeBox {
        LatticeBox {
            lattice: self.lattice,
            lower: self.lower.iter().map(|x| x - r).collect(),
            upper: self.upper.iter().map(|x| x + r).collect(),
        }
    }

    pub fn contains_box(&self, other: &LatticeBox) -> bool {
        self.lattice == other.lattice
            && self.contains_point(&other.lower)
            && self.contains_point(&other.upper)
    }

    /// Smallest box of the given lattice containing all the cells.
    pub fn bounding(lattice: Lattice, dim: usize, cells: impl IntoIterator<Item = Cell>) -> Option<LatticeBox> {
        let mut lower = vec![i32::MAX; dim];
        let mut upper = vec![i32::MIN; dim];
        let mut any = false;
        for c in cells {
            any = true;
            for i in 0..dim {
                let (a, b) = c.extent(i);
                lower[i] = lower[i].min(a);
                upper[i] = upper[i].max(b);
            }
        }
        any.then_some(LatticeBox { lattice, lower, upper })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(base: &[i32], axes: &[usize]) -> Cell {
        canonicalize(Lattice::Primal, base, axes, 1).unwrap().unwrap().cell
    }

    #[test]
    fn canonicalize_examples() {
        let c = canonicalize(Lattice::Primal, &[0, 0], &[1, 0], 1).unwrap().unwrap();
        assert_eq!(c.sign, -1);
        assert_eq!(c.cell.axis_list(), vec![0, 1]);
        let c = canonicalize(Lattice::Primal, &[0, 0], &[0, 1], 1).unwrap().unwrap();
        assert_eq!(c.sign, 1);
        assert_eq!(canonicalize(Lattice::Primal, &[0, 0], &[0, 0], 1).unwrap(), None);
        assert!(canonicalize(Lattice::Primal, &[0, 0], &[2], 1).is_err());
        // three-cycle is even
        let c = canonicalize(Lattice::Primal, &[0, 0, 0], &[2, 0, 1], 1).unwrap().unwrap();
        assert_eq!(c.sign, 1);
    }

    #[test]
    fn packing_roundtrip() {
        let c = Cell::new(Lattice::Dual, &[-5, 3, 0, 255], 0b1010);
        assert_eq!(c.base(), vec![-5, 3, 0, 255]);
        assert_eq!(c.axes(), 0b1010);
        assert_eq!(c.dim(), 4);
        assert_eq!(c.lattice(), Lattice::Dual);
        assert_eq!(c.to_string().parse::<Cell>().unwrap(), c);
        assert_eq!(c.shifted(0, 2).coord(0), -3);
    }

    #[test]
    fn order_is_lexicographic_in_base() {
        let a = Cell::new(Lattice::Primal, &[-1, 5], 0b11);
        let b = Cell::new(Lattice::Primal, &[0, -5], 0);
        let c = Cell::new(Lattice::Primal, &[0, -5], 0b01);
        assert!(a < b && b < c);
    }

    #[test]
    fn plaquette_boundary_matches_figure() {
        let pl = p(&[0, 0], &[0, 1]);
        let mut f = pl.faces();
        f.sort();
        let mut want = vec![
            (p(&[0, 0], &[0]), 1),
            (p(&[1, 0], &[1]), 1),
            (p(&[0, 1], &[0]), -1),
            (p(&[0, 0], &[1]), -1),
        ];
        want.sort();
        assert_eq!(f, want);
        let e = p(&[2, 3], &[0]);
        let mut f = e.faces();
        f.sort();
        assert_eq!(f, vec![(p(&[2, 3], &[]), -1), (p(&[3, 3], &[]), 1)]);
    }

    #[test]
    fn coboundary_of_edge_in_z4() {
        let e = p(&[0, 0, 0, 0], &[0]);
        let mut cob = e.cofaces(None);
        cob.sort();
        let mut want = Vec::new();
        for j in 1..4 {
            let mut down = [0; 4];
            down[j] = -1;
            want.push((p(&[0, 0, 0, 0], &[0, j]), 1));
            want.push((p(&down, &[0, j]), -1));
        }
        want.sort();
        assert_eq!(cob, want);
    }

    #[test]
    fn dual_boundary_runs_backwards() {
        let e = Cell::new(Lattice::Dual, &[0, 0], 0b01);
        let mut f = e.faces();
        f.sort();
        assert_eq!(
            f,
            vec![
                (Cell::vertex(Lattice::Dual, &[-1, 0]), 1),
                (Cell::vertex(Lattice::Dual, &[0, 0]), -1)
            ]
        );
    }

    #[test]
    fn hodge_of_vertex_and_top_cell() {
        let (c, s) = p(&[1, 2, 3], &[]).hodge();
        assert_eq!((c.lattice(), c.axes(), s), (Lattice::Dual, 0b111, 1));
        assert_eq!(c.base(), vec![1, 2, 3]);
        let (c, s) = p(&[1, 2, 3], &[0, 1, 2]).hodge();
        assert_eq!((c.lattice(), c.axes(), s), (Lattice::Dual, 0, 1));
    }

    #[test]
    fn box_counts_and_dual() {
        let b = LatticeBox::cube(3, 0, 1).unwrap();
        assert_eq!(b.cells(1).len(), 12);
        assert_eq!(b.cells(2).len(), 6);
        let b2 = LatticeBox::cube(2, 0, 1).unwrap();
        let d = b2.dual();
        assert_eq!(d.point_count(), 9);
        let dd = d.dual();
        assert_eq!(dd.point_count(), 16);
        assert!(dd.contains_box(&b2) && dd != b2);
    }

    #[test]
    fn enumeration_is_sorted_and_stable() {
        let b = LatticeBox::cube(3, -1, 1).unwrap();
        let a: Vec<String> = b.cells(2).iter().map(|c| c.to_string()).collect();
        let c: Vec<String> = b.cells(2).iter().map(|c| c.to_string()).collect();
        assert_eq!(a, c);
        assert!(b.cells(2).windows(2).all(|w| w[0] < w[1]));
    }
}

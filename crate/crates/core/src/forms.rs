//! Integer chains and ℤ_n- or ℤ-valued forms with d, δ and ★.
//!
//! Both types store values on positively oriented cells only; the value on
//! the negatively oriented copy is the negative. Forms optionally carry an
//! ambient box: d and δ then only produce values on cells of that box.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;

use crate::error::{domain, Error, Result};
use crate::lattice::{Cell, Lattice, LatticeBox, OrientedCell};

/// Coefficient ring of a form.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Ring {
    Integers,
    Cyclic(u32),
}

impl Ring {
    #[inline]
    pub fn reduce(self, v: i64) -> i64 {
        match self {
            Ring::Integers => v,
            Ring::Cyclic(n) => v.rem_euclid(n as i64),
        }
    }
}

fn accumulate(map: &mut BTreeMap<Cell, i64>, ring: Ring, c: Cell, v: i64) {
    let e = map.entry(c).or_insert(0);
    *e = ring.reduce(*e + v);
    if *e == 0 {
        map.remove(&c);
    }
}

/// A finitely supported integer combination of positively oriented k-cells.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Chain {
    lattice: Lattice,
    dim: usize,
    degree: usize,
    coeffs: BTreeMap<Cell, i64>,
}

impl Chain {
    pub fn zero(lattice: Lattice, dim: usize, degree: usize) -> Chain {
        Chain { lattice, dim, degree, coeffs: BTreeMap::new() }
    }

    pub fn from_cells(lattice: Lattice, dim: usize, degree: usize, items: impl IntoIterator<Item = (OrientedCell, i64)>) -> Chain {
        let mut q = Chain::zero(lattice, dim, degree);
        for (c, v) in items {
            q.add_oriented(c, v);
        }
        q
    }

    pub fn lattice(&self) -> Lattice {
        self.lattice
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    /// `q[c]` for a positively oriented cell.
    pub fn get(&self, c: Cell) -> i64 {
        self.coeffs.get(&c).copied().unwrap_or(0)
    }

    pub fn coeff(&self, c: OrientedCell) -> i64 {
        self.get(c.cell) * c.sign as i64
    }

    pub fn add(&mut self, c: Cell, v: i64) {
        debug_assert_eq!(c.degree(), self.degree);
        accumulate(&mut self.coeffs, Ring::Integers, c, v);
    }

    pub fn add_oriented(&mut self, c: OrientedCell, v: i64) {
        self.add(c.cell, v * c.sign as i64);
    }

    pub fn iter(&self) -> impl Iterator<Item = (Cell, i64)> + '_ {
        self.coeffs.iter().map(|(&c, &v)| (c, v))
    }

    pub fn support(&self) -> impl Iterator<Item = Cell> + '_ {
        self.coeffs.keys().copied()
    }

    pub fn len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn boundary(&self) -> Result<Chain> {
        if self.degree == 0 {
            return domain("boundary of a 0-chain");
        }
        let mut out = Chain::zero(self.lattice, self.dim, self.degree - 1);
        for (c, v) in self.iter() {
            for (f, s) in c.faces() {
                out.add(f, s * v);
            }
        }
        Ok(out)
    }

    pub fn plus(&self, other: &Chain) -> Chain {
        let mut out = self.clone();
        for (c, v) in other.iter() {
            out.add(c, v);
        }
        out
    }

    pub fn minus(&self, other: &Chain) -> Chain {
        let mut out = self.clone();
        for (c, v) in other.iter() {
            out.add(c, -v);
        }
        out
    }

    pub fn scaled(&self, k: i64) -> Chain {
        let mut out = Chain::zero(self.lattice, self.dim, self.degree);
        for (c, v) in self.iter() {
            out.add(c, k * v);
        }
        out
    }
}

/// Boundary chain of one oriented cell.
pub fn boundary(c: OrientedCell) -> Result<Chain> {
    if c.degree() == 0 {
        return domain("boundary of a 0-cell");
    }
    let mut out = Chain::zero(c.cell.lattice(), c.cell.dim(), c.degree() - 1);
    for (f, s) in c.cell.faces() {
        out.add(f, s * c.sign as i64);
    }
    Ok(out)
}

/// Coboundary chain of one oriented cell, restricted to `region` if given.
pub fn coboundary(c: OrientedCell, region: Option<&LatticeBox>) -> Result<Chain> {
    let (k, m) = (c.degree(), c.cell.dim());
    if k >= m {
        return domain(format!("coboundary of a {k}-cell in dimension {m}"));
    }
    let mut out = Chain::zero(c.cell.lattice(), m, k + 1);
    for (f, s) in c.cell.cofaces(region) {
        out.add(f, s * c.sign as i64);
    }
    Ok(out)
}

/// A k-form: an odd function on oriented k-cells with values in a [`Ring`].
#[derive(Clone, Debug)]
pub struct Form {
    lattice: Lattice,
    dim: usize,
    degree: usize,
    ring: Ring,
    region: Option<LatticeBox>,
    values: BTreeMap<Cell, i64>,
}

impl PartialEq for Form {
    fn eq(&self, o: &Form) -> bool {
        self.lattice == o.lattice
            && self.dim == o.dim
            && self.degree == o.degree
            && self.ring == o.ring
            && self.values == o.values
    }
}

impl Eq for Form {}

impl Form {
    pub fn zero(lattice: Lattice, dim: usize, degree: usize, ring: Ring) -> Form {
        Form { lattice, dim, degree, ring, region: None, values: BTreeMap::new() }
    }

    /// Zero form living on the cells of `region`.
    pub fn on(region: &LatticeBox, degree: usize, ring: Ring) -> Form {
        let mut f = Form::zero(region.lattice(), region.dim(), degree, ring);
        f.region = Some(region.clone());
        f
    }

    pub fn with_region(mut self, region: Option<LatticeBox>) -> Form {
        self.region = region;
        self
    }

    pub fn lattice(&self) -> Lattice {
        self.lattice
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn ring(&self) -> Ring {
        self.ring
    }

    pub fn region(&self) -> Option<&LatticeBox> {
        self.region.as_ref()
    }

    /// Value on a positively oriented cell.
    pub fn get(&self, c: Cell) -> i64 {
        self.values.get(&c).copied().unwrap_or(0)
    }

    pub fn value(&self, c: OrientedCell) -> i64 {
        self.ring.reduce(self.get(c.cell) * c.sign as i64)
    }

    pub fn set(&mut self, c: Cell, v: i64) {
        debug_assert_eq!(c.degree(), self.degree);
        let v = self.ring.reduce(v);
        if v == 0 {
            self.values.remove(&c);
        } else {
            self.values.insert(c, v);
        }
    }

    pub fn set_oriented(&mut self, c: OrientedCell, v: i64) {
        self.set(c.cell, v * c.sign as i64);
    }

    pub fn add(&mut self, c: Cell, v: i64) {
        debug_assert_eq!(c.degree(), self.degree);
        accumulate(&mut self.values, self.ring, c, v);
    }

    pub fn iter(&self) -> impl Iterator<Item = (Cell, i64)> + '_ {
        self.values.iter().map(|(&c, &v)| (c, v))
    }

    /// Positively oriented cells where the form is nonzero.
    pub fn support(&self) -> impl Iterator<Item = Cell> + '_ {
        self.values.keys().copied()
    }

    /// `|supp ω|` counted over oriented cells, hence always even.
    pub fn support_size(&self) -> usize {
        2 * self.values.len()
    }

    pub fn nnz(&self) -> usize {
        self.values.len()
    }

    pub fn is_zero(&self) -> bool {
        self.values.is_empty()
    }

    fn same_shape(&self) -> Form {
        Form { values: BTreeMap::new(), ..self.clone() }
    }

    fn check_compatible(&self, o: &Form) -> Result<()> {
        if self.lattice != o.lattice || self.dim != o.dim || self.degree != o.degree || self.ring != o.ring {
            return domain("forms of different shape");
        }
        Ok(())
    }

    pub fn plus(&self, o: &Form) -> Result<Form> {
        self.check_compatible(o)?;
        let mut out = self.clone();
        for (c, v) in o.iter() {
            out.add(c, v);
        }
        Ok(out)
    }

    pub fn minus(&self, o: &Form) -> Result<Form> {
        self.check_compatible(o)?;
        let mut out = self.clone();
        for (c, v) in o.iter() {
            out.add(c, -v);
        }
        Ok(out)
    }

    pub fn neg(&self) -> Form {
        self.scaled(-1)
    }

    pub fn scaled(&self, k: i64) -> Form {
        let mut out = self.same_shape();
        for (c, v) in self.iter() {
            out.set(c, k * v);
        }
        out
    }

    /// `ω(q) = Σ q[c] ω(c)`.
    pub fn evaluate(&self, q: &Chain) -> Result<i64> {
        if q.degree() != self.degree || q.lattice() != self.lattice {
            return domain(format!("pairing a {}-form with a {}-chain", self.degree, q.degree()));
        }
        let mut s = 0i64;
        for (c, v) in q.iter() {
            s = self.ring.reduce(s + v * self.get(c));
        }
        Ok(s)
    }

    /// `dω(c) = ω(∂c)`.
    pub fn d(&self) -> Result<Form> {
        if self.degree >= self.dim {
            return domain(format!("d of a {}-form in dimension {}", self.degree, self.dim));
        }
        let mut out = Form { degree: self.degree + 1, values: BTreeMap::new(), ..self.clone() };
        for (c, v) in self.iter() {
            for (cc, s) in c.cofaces(self.region.as_ref()) {
                out.add(cc, s * v);
            }
        }
        Ok(out)
    }

    /// `δω(c) = ω(∂̂c)`.
    pub fn codiff(&self) -> Result<Form> {
        if self.degree == 0 {
            return domain("coderivative of a 0-form");
        }
        let mut out = Form { degree: self.degree - 1, values: BTreeMap::new(), ..self.clone() };
        for (c, v) in self.iter() {
            for (f, s) in c.faces() {
                if self.region.as_ref().map_or(true, |r| r.contains_cell(f)) {
                    out.add(f, s * v);
                }
            }
        }
        Ok(out)
    }

    /// `(★ω)(★c) = ω(c)`, a form on the other lattice.
    pub fn hodge(&self) -> Form {
        let mut out = Form {
            lattice: self.lattice.other(),
            degree: self.dim - self.degree,
            region: self.region.as_ref().map(|r| r.dual()),
            values: BTreeMap::new(),
            ..self.clone()
        };
        for (c, v) in self.iter() {
            let (cs, s) = c.hodge();
            out.set(cs, s * v);
        }
        out
    }

    /// Keeps values on the given cells only. The set must be closed under
    /// negation.
    pub fn restrict(&self, cells: &BTreeSet<OrientedCell>) -> Result<Form> {
        if let Some(c) = cells.iter().find(|c| !cells.contains(&c.neg())) {
            return domain(format!("restriction set not symmetric at {}", c.cell));
        }
        Ok(self.restrict_to(|c| cells.contains(&OrientedCell::positive(c))))
    }

    pub fn restrict_to(&self, keep: impl Fn(Cell) -> bool) -> Form {
        let mut out = self.same_shape();
        for (c, v) in self.iter() {
            if keep(c) {
                out.set(c, v);
            }
        }
        out
    }

    /// The form read as a chain, `q[c] = ω(c)` with representatives.
    pub fn to_chain(&self) -> Chain {
        let mut q = Chain::zero(self.lattice, self.dim, self.degree);
        for (c, v) in self.iter() {
            q.add(c, v);
        }
        q
    }

    pub fn from_chain(q: &Chain, ring: Ring) -> Form {
        let mut f = Form::zero(q.lattice(), q.dim(), q.degree(), ring);
        for (c, v) in q.iter() {
            f.add(c, v);
        }
        f
    }

    /// A form with the same values over a different ring (values are reduced).
    pub fn over(&self, ring: Ring) -> Form {
        let mut out = Form { ring, values: BTreeMap::new(), ..self.clone() };
        for (c, v) in self.iter() {
            out.set(c, v);
        }
        out
    }

    /// First cell, in cell order, where `dω` is nonzero on the ambient box.
    pub fn closedness_witness(&self) -> Result<Option<Cell>> {
        if self.degree == self.dim {
            return Ok(None);
        }
        Ok(self.d()?.support().next())
    }

    pub fn is_closed(&self) -> bool {
        matches!(self.closedness_witness(), Ok(None))
    }

    /// Line-based text: a header then one `cell value` line per support cell.
    pub fn to_text(&self) -> String {
        let ring = match self.ring {
            Ring::Integers => "Z".to_string(),
            Ring::Cyclic(n) => format!("Z{n}"),
        };
        let mut s = format!("form {} {} {}\n", self.dim, self.degree, ring);
        for (c, v) in self.iter() {
            writeln!(s, "{c} {v}").unwrap();
        }
        s
    }

    pub fn from_text(text: &str) -> Result<Form> {
        let mut lines = text.lines().enumerate().filter(|(_, l)| !l.trim().is_empty());
        let perr = |line: usize, msg: &str| Error::Parse { line: line + 1, msg: msg.to_string() };
        let (ln, header) = lines.next().ok_or_else(|| perr(0, "empty input"))?;
        let h: Vec<&str> = header.split_whitespace().collect();
        if h.len() != 4 || h[0] != "form" {
            return Err(perr(ln, "expected `form <dim> <degree> <ring>`"));
        }
        let dim: usize = h[1].parse().map_err(|_| perr(ln, "bad dimension"))?;
        let degree: usize = h[2].parse().map_err(|_| perr(ln, "bad degree"))?;
        let ring = match h[3] {
            "Z" => Ring::Integers,
            r => Ring::Cyclic(
                r.strip_prefix('Z')
                    .and_then(|x| x.parse().ok())
                    .filter(|&n: &u32| n >= 2)
                    .ok_or_else(|| perr(ln, "bad ring"))?,
            ),
        };
        let mut f: Option<Form> = None;
        for (ln, line) in lines {
            let (cell, value) = line.trim().rsplit_once(' ').ok_or_else(|| perr(ln, "expected `cell value`"))?;
            let c: Cell = cell.parse().map_err(|e: Error| perr(ln, &e.to_string()))?;
            let v: i64 = value.parse().map_err(|_| perr(ln, "bad value"))?;
            if c.dim() != dim || c.degree() != degree {
                return Err(perr(ln, "cell does not match header"));
            }
            let form = f.get_or_insert_with(|| Form::zero(c.lattice(), dim, degree, ring));
            if c.lattice() != form.lattice {
                return Err(perr(ln, "mixed lattices"));
            }
            form.add(c, v);
        }
        Ok(f.unwrap_or_else(|| Form::zero(Lattice::Primal, dim, degree, ring)))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cell(base: &[i32], axes: u8) -> Cell {
        Cell::new(Lattice::Primal, base, axes)
    }

    #[test]
    fn evaluate_examples() {
        let p = cell(&[0, 0], 0b11);
        let mut w = Form::zero(Lattice::Primal, 2, 2, Ring::Cyclic(3));
        let mut q = Chain::zero(Lattice::Primal, 2, 2);
        q.add(p, 2);
        assert_eq!(w.evaluate(&q).unwrap(), 0);
        w.set(p, 2);
        assert_eq!(w.evaluate(&q).unwrap(), 1);
        let e = Chain::zero(Lattice::Primal, 2, 1);
        assert!(w.evaluate(&e).is_err());
    }

    #[test]
    fn d_of_edge_indicator_is_minimal_vortex_shape() {
        let mut w = Form::zero(Lattice::Primal, 4, 1, Ring::Cyclic(5));
        w.set(cell(&[0, 0, 0, 0], 0b0001), 2);
        let dw = w.d().unwrap();
        assert_eq!(dw.support_size(), 12);
        assert!(dw.iter().all(|(_, v)| v == 2 || v == 3));
        assert!(dw.d().unwrap().is_zero());
    }

    #[test]
    fn negative_orientation_reads_negated() {
        let mut w = Form::zero(Lattice::Primal, 2, 1, Ring::Cyclic(4));
        let e = cell(&[0, 0], 1);
        w.set(e, 1);
        assert_eq!(w.value(OrientedCell { cell: e, sign: -1 }), 3);
    }

    #[test]
    fn restrict_examples() {
        let mut w = Form::zero(Lattice::Primal, 2, 1, Ring::Cyclic(3));
        w.set(cell(&[0, 0], 1), 1);
        w.set(cell(&[0, 0], 2), 2);
        let all: BTreeSet<_> = w.support().flat_map(|c| [OrientedCell::positive(c), OrientedCell::positive(c).neg()]).collect();
        assert_eq!(w.restrict(&all).unwrap(), w);
        assert!(w.restrict(&BTreeSet::new()).unwrap().is_zero());
        let one: BTreeSet<_> = [OrientedCell::positive(cell(&[0, 0], 1))].into();
        assert!(w.restrict(&one).is_err());
    }

    #[test]
    fn text_roundtrip() {
        let mut w = Form::zero(Lattice::Dual, 3, 2, Ring::Cyclic(7));
        w.set(Cell::new(Lattice::Dual, &[1, -2, 0], 0b101), 3);
        w.set(Cell::new(Lattice::Dual, &[0, 0, 0], 0b011), 6);
        let back = Form::from_text(&w.to_text()).unwrap();
        assert_eq!(back, w);
        assert!(Form::from_text("form 3 2 Z7\np 0,0 01 1\n").is_err());
    }

    #[test]
    fn hodge_twice_is_sign() {
        let mut w = Form::zero(Lattice::Primal, 4, 2, Ring::Integers);
        w.set(cell(&[0, 1, 0, 0], 0b0101), 3);
        assert_eq!(w.hodge().hodge(), w); // k(m-k) = 4
        let mut v = Form::zero(Lattice::Primal, 3, 1, Ring::Integers);
        v.set(cell(&[0, 1, 0], 0b010), 3);
        assert_eq!(v.hodge().hodge(), v); // k(m-k) = 2
    }
}

//! Vortices of closed 2-forms, minimal vortices `d(g dx_e)`, the observable
//! `W′_γ` and the pairing of vortices with spanning surfaces.
//!
//! Support sizes are oriented counts: a minimal vortex in ℤ⁴ has support 12.

use std::collections::{BTreeMap, BTreeSet, VecDeque};
use std::sync::Arc;

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{domain, Error, Result};
use crate::forms::{Chain, Form, Ring};
use crate::lattice::{Cell, Lattice, LatticeBox};
use crate::loops::GeneralizedLoop;
use crate::model::{Representation, WIDTH_BOUND_B};
use crate::sampler::{Geometry, SpinConfiguration};

/// Largest oriented support for which irreducibility is checked exhaustively.
pub const IRREDUCIBILITY_BUDGET: usize = 48;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Certificate {
    Checked,
    AssumedByConstruction,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Vortex {
    pub form: Form,
    pub certificate: Certificate,
}

impl Vortex {
    /// Oriented support size.
    pub fn size(&self) -> usize {
        self.form.support_size()
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Irreducibility {
    Irreducible,
    /// carries a proper closed restriction of the form
    Reducible(Option<Form>),
    /// support above [`IRREDUCIBILITY_BUDGET`]
    Unchecked,
}

impl Irreducibility {
    pub fn holds(&self) -> Option<bool> {
        match self {
            Irreducibility::Irreducible => Some(true),
            Irreducibility::Reducible(_) => Some(false),
            Irreducibility::Unchecked => None,
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

fn form_from(template: &Form, values: &BTreeMap<Cell, i64>) -> Form {
    let mut f = Form::zero(template.lattice(), template.dim(), template.degree(), template.ring())
        .with_region(template.region().cloned());
    for (&c, &v) in values {
        f.set(c, v);
    }
    f
}

/// Closed pieces with disjoint supports. Each piece starts at the least
/// unclaimed plaquette and grows by taking, at the least 3-cell where the
/// piece is not yet closed, the least face still carrying a value.
fn grow_components(omega: &Form) -> Result<Vec<Form>> {
    if omega.degree() != 2 {
        return domain("vortices are 2-forms");
    }
    if let Some(c) = omega.closedness_witness()? {
        return Err(Error::Precondition { msg: "form is not closed".into(), witness: c.to_string() });
    }
    let ring = omega.ring();
    let region = omega.region().cloned();
    let mut residual: BTreeMap<Cell, i64> = omega.iter().collect();
    let mut out = Vec::new();
    while let Some((p0, v0)) = residual.pop_first() {
        let mut part = BTreeMap::from([(p0, v0)]);
        let mut dpart = BTreeMap::new();
        for (c, s) in p0.cofaces(region.as_ref()) {
            accumulate(&mut dpart, ring, c, s * v0);
        }
        while let Some((&c, _)) = dpart.iter().next() {
            let Some(f) = c.faces().into_iter().map(|(f, _)| f).filter(|f| residual.contains_key(f)).min() else {
                return Err(Error::Precondition { msg: "form is not closed".into(), witness: c.to_string() });
            };
            let v = residual.remove(&f).unwrap();
            part.insert(f, v);
            for (c2, s) in f.cofaces(region.as_ref()) {
                accumulate(&mut dpart, ring, c2, s * v);
            }
        }
        out.push(form_from(omega, &part));
    }
    Ok(out)
}

/// Splits a closed 2-form into vortices with disjoint supports summing to it.
///
/// Pieces from the growth procedure that fit the irreducibility budget are
/// split along any closed proper restriction until irreducible, and are
/// marked [`Certificate::Checked`]; larger ones are kept as grown.
pub fn decompose(omega: &Form) -> Result<Vec<Vortex>> {
    let mut out = Vec::new();
    let mut queue: VecDeque<Form> = grow_components(omega)?.into();
    while let Some(f) = queue.pop_front() {
        match is_irreducible(&f) {
            Irreducibility::Reducible(Some(part)) => {
                let rest = f.minus(&part)?;
                queue.extend(grow_components(&part)?);
                queue.extend(grow_components(&rest)?);
            }
            Irreducibility::Unchecked => out.push(Vortex { form: f, certificate: Certificate::AssumedByConstruction }),
            _ => out.push(Vortex { form: f, certificate: Certificate::Checked }),
        }
    }
    out.sort_by(|a, b| a.form.support().next().cmp(&b.form.support().next()));
    Ok(out)
}

/// Whether no nonempty proper restriction of `nu` to a symmetric support
/// subset is closed. Closed restrictions come in complementary pairs, so
/// the search fixes the least plaquette inside the subset.
pub fn is_irreducible(nu: &Form) -> Irreducibility {
    if nu.is_zero() || nu.degree() != 2 || !nu.is_closed() {
        return Irreducibility::Reducible(None);
    }
    if nu.support_size() > IRREDUCIBILITY_BUDGET {
        return Irreducibility::Unchecked;
    }
    let ring = nu.ring();
    let region = nu.region();
    let plaq: Vec<(Cell, i64)> = nu.iter().collect();
    // constraints: for each 3-cell, the weighted plaquettes of the support on its boundary
    let mut cons: BTreeMap<Cell, Vec<(usize, i64)>> = BTreeMap::new();
    for (i, &(p, v)) in plaq.iter().enumerate() {
        for (c, s) in p.cofaces(region) {
            cons.entry(c).or_default().push((i, s * v));
        }
    }
    // breadth-first variable order from the least plaquette
    let mut order = vec![0usize];
    let mut seen = vec![false; plaq.len()];
    seen[0] = true;
    let mut head = 0;
    while head < order.len() {
        let i = order[head];
        head += 1;
        for (c, _) in plaq[i].0.cofaces(region) {
            for &(j, _) in &cons[&c] {
                if !seen[j] {
                    seen[j] = true;
                    order.push(j);
                }
            }
        }
    }
    if seen.iter().any(|s| !s) {
        // disconnected support: the connected part is closed on its own
        let part: BTreeMap<Cell, i64> = order.iter().map(|&i| (plaq[i].0, plaq[i].1)).collect();
        return Irreducibility::Reducible(Some(form_from(nu, &part)));
    }
    let mut rank = vec![0; plaq.len()];
    for (r, &i) in order.iter().enumerate() {
        rank[i] = r;
    }
    // constraints to check once the variable at a given rank is assigned
    let mut due: Vec<Vec<&Vec<(usize, i64)>>> = vec![Vec::new(); plaq.len()];
    for terms in cons.values() {
        let last = terms.iter().map(|&(i, _)| rank[i]).max().unwrap();
        due[last].push(terms);
    }
    let mut inside = vec![false; plaq.len()];
    fn search(
        r: usize,
        order: &[usize],
        due: &[Vec<&Vec<(usize, i64)>>],
        inside: &mut [bool],
        ring: Ring,
    ) -> bool {
        if r == order.len() {
            return inside.iter().any(|x| !x);
        }
        let choices: &[bool] = if r == 0 { &[true] } else { &[true, false] };
        for &choice in choices {
            inside[order[r]] = choice;
            let ok = due[r]
                .iter()
                .all(|terms| ring.reduce(terms.iter().filter(|(i, _)| inside[*i]).map(|(_, w)| w).sum()) == 0);
            if ok && search(r + 1, order, due, inside, ring) {
                return true;
            }
        }
        false
    }
    if search(0, &order, &due, &mut inside, ring) {
        let part: BTreeMap<Cell, i64> =
            plaq.iter().zip(&inside).filter(|(_, &b)| b).map(|(&(p, v), _)| (p, v)).collect();
        Irreducibility::Reducible(Some(form_from(nu, &part)))
    } else {
        Irreducibility::Irreducible
    }
}

/// `d(g dx_e)` for an edge whose full coboundary lies in `bx`.
pub fn minimal_vortex(e: Cell, g: i64, n: u32, bx: &LatticeBox) -> Result<Vortex> {
    if e.degree() != 1 || e.lattice() != Lattice::Primal {
        return domain("minimal vortices sit on primal edges");
    }
    if !bx.contains_cell(e) || e.cofaces(Some(bx)).len() != 2 * (e.dim() - 1) {
        return domain(format!("edge {e} is not interior to the box"));
    }
    let ring = Ring::Cyclic(n);
    if ring.reduce(g) == 0 {
        return domain("minimal vortex needs g != 0");
    }
    let mut a = Form::on(bx, 1, ring);
    a.set(e, g);
    Ok(Vortex { form: a.d()?, certificate: Certificate::Checked })
}

/// Recovers `(e, g)` with `ν = d(g dx_e)`, if there is one.
pub fn classify_minimal(nu: &Form) -> Option<(Cell, i64)> {
    if nu.degree() != 2 || nu.support_size() != 2 * 2 * (nu.dim() - 1) {
        return None;
    }
    let Ring::Cyclic(n) = nu.ring() else { return None };
    let (p, v) = nu.iter().next()?;
    p.faces().into_iter().find_map(|(e, s)| {
        let g = nu.ring().reduce(v * s);
        let mut a = Form::zero(Lattice::Primal, nu.dim(), 1, Ring::Cyclic(n));
        a.set(e, g);
        (a.d().ok()? == *nu).then_some((e, g))
    })
}

/// Data for `γ′` and `W′_γ`: for each non-corner edge of γ its plaquettes,
/// normalized so that `∂p[e] = +1`, and the fixed plaquette `p_e`.
pub struct WilsonPrimeContext {
    gamma: GeneralizedLoop,
    geom: Arc<Geometry>,
    straight: Vec<StraightEdge>,
}

struct StraightEdge {
    edge: Cell,
    coeff: i64,
    plaquettes: Vec<(u32, i8)>,
}

impl WilsonPrimeContext {
    pub fn new(gamma: &GeneralizedLoop, geom: &Arc<Geometry>) -> Result<WilsonPrimeContext> {
        let m = geom.bx().dim();
        let mut straight = Vec::new();
        for (e, coeff) in gamma.straight_part().iter() {
            let Some(ei) = geom.edge_index(e) else {
                return domain(format!("loop edge {e} outside the box"));
            };
            let plaquettes = geom.edge_plaquettes(ei).to_vec();
            if plaquettes.len() != 2 * (m - 1) {
                return domain(format!("coboundary of loop edge {e} is clipped by the box"));
            }
            straight.push(StraightEdge { edge: e, coeff, plaquettes });
        }
        Ok(WilsonPrimeContext { gamma: gamma.clone(), geom: geom.clone(), straight })
    }

    pub fn gamma(&self) -> &GeneralizedLoop {
        &self.gamma
    }

    /// `|supp γ₁|`, edges counted once.
    pub fn straight_len(&self) -> usize {
        self.straight.len()
    }

    /// The plaquette `p_e`: first in cell order among the coboundary of `e`.
    pub fn chosen_plaquette(&self, e: Cell) -> Option<Cell> {
        self.straight
            .iter()
            .find(|s| s.edge == e)
            .map(|s| self.geom.plaquettes()[s.plaquettes[0].0 as usize])
    }

    /// `(|supp γ′|, Σ_{e ∈ γ₁−γ′} dσ(p_e))` from the plaquette values of σ.
    pub fn evaluate(&self, plaq: &[u32], n: u32) -> (usize, i64) {
        let mut disagree = 0;
        let mut sum = 0i64;
        for s in &self.straight {
            let val = |&(pi, c): &(u32, i8)| (c as i64 * plaq[pi as usize] as i64).rem_euclid(n as i64);
            let first = val(&s.plaquettes[0]);
            if s.plaquettes.iter().all(|x| val(x) == first) {
                sum += s.coeff * first;
            } else {
                disagree += 1;
            }
        }
        (disagree, sum.rem_euclid(n as i64))
    }

    /// The chain `γ′`.
    pub fn gamma_prime(&self, sigma: &SpinConfiguration) -> Chain {
        let plaq = sigma.plaquette_values();
        let n = sigma.n() as i64;
        let mut out = Chain::zero(Lattice::Primal, self.geom.bx().dim(), 1);
        for s in &self.straight {
            let vals: BTreeSet<i64> =
                s.plaquettes.iter().map(|&(pi, c)| (c as i64 * plaq[pi as usize] as i64).rem_euclid(n)).collect();
            if vals.len() > 1 {
                out.add(s.edge, s.coeff);
            }
        }
        out
    }

    pub fn wilson_prime(&self, rep: &Representation, sigma: &SpinConfiguration) -> Complex64 {
        rep.rho(self.evaluate(&sigma.plaquette_values(), sigma.n()).1)
    }
}

/// `ν(q)`.
pub fn vortex_pairing(nu: &Form, q: &Chain) -> Result<i64> {
    nu.evaluate(q)
}

/// Checks the hypothesis of the vortex–surface lemma for the box spanned by
/// `supp ν`: `(B*)*` lies in `ambient` and meets `supp q` only in internal
/// plaquettes. Returns `Some(ν(q) = 0)` when it holds, `None` otherwise.
pub fn far_vortex_vanishes(nu: &Form, q: &Chain, gamma: &GeneralizedLoop, ambient: &LatticeBox) -> Result<Option<bool>> {
    if !nu.is_closed() {
        return Err(Error::Precondition { msg: "vortex is not closed".into(), witness: String::new() });
    }
    let Some(b) = LatticeBox::bounding(Lattice::Primal, nu.dim(), nu.support()) else {
        return Ok(Some(true));
    };
    let bb = b.dual().dual();
    if !ambient.contains_box(&bb) {
        return Ok(None);
    }
    let hyp = q
        .support()
        .filter(|&p| bb.contains_cell(p))
        .all(|p| p.faces().iter().all(|&(e, _)| gamma.coeff(e) == 0));
    if !hyp {
        return Ok(None);
    }
    Ok(Some(vortex_pairing(nu, q)? == 0))
}

/// L∞ distance between the closed cells `a` and `b`.
pub fn cell_distance(a: Cell, b: Cell) -> i32 {
    (0..a.dim())
        .map(|i| {
            let (x0, x1) = a.extent(i);
            let (y0, y1) = b.extent(i);
            (y0 - x1).max(x0 - y1).max(0)
        })
        .max()
        .unwrap_or(0)
}

/// Whether `supp ν` stays beyond distance `b + 2` from `supp q`.
pub fn is_far_from_surface(nu: &Form, q: &Chain) -> bool {
    nu.support().all(|p| q.support().all(|s| cell_distance(p, s) > WIDTH_BOUND_B + 2))
}

/// Closed irreducible 2-forms on ℤ^m containing `p0` with oriented support
/// `2M`, found by branching over the growth procedure of [`decompose`]:
/// at the least 3-cell where the partial form is not closed, any of its
/// free faces with any nonzero value.
pub fn enumerate_irreducible(p0: Cell, big_m: usize, n: u32) -> Result<Vec<Form>> {
    if !(6..=7).contains(&big_m) {
        return domain(format!("M = {big_m} outside the supported range 6..=7"));
    }
    if p0.degree() != 2 || p0.lattice() != Lattice::Primal {
        return domain("p0 must be a primal plaquette");
    }
    let ring = Ring::Cyclic(n);
    let dim = p0.dim();
    let mut found: BTreeSet<Vec<(Cell, i64)>> = BTreeSet::new();
    struct State {
        part: BTreeMap<Cell, i64>,
        dpart: BTreeMap<Cell, i64>,
    }
    fn add(st: &mut State, ring: Ring, p: Cell, v: i64) {
        st.part.insert(p, v);
        for (c, s) in p.cofaces(None) {
            accumulate(&mut st.dpart, ring, c, s * v);
        }
    }
    fn remove(st: &mut State, ring: Ring, p: Cell) {
        let v = st.part.remove(&p).unwrap();
        for (c, s) in p.cofaces(None) {
            accumulate(&mut st.dpart, ring, c, -s * v);
        }
    }
    fn grow(st: &mut State, ring: Ring, n: u32, big_m: usize, found: &mut BTreeSet<Vec<(Cell, i64)>>) {
        let Some((&c, _)) = st.dpart.iter().next() else {
            if st.part.len() == big_m {
                found.insert(st.part.iter().map(|(&p, &v)| (p, v)).collect());
            }
            return;
        };
        if st.part.len() == big_m {
            return;
        }
        for (f, _) in c.faces() {
            if st.part.contains_key(&f) {
                continue;
            }
            for g in 1..n as i64 {
                add(st, ring, f, g);
                grow(st, ring, n, big_m, found);
                remove(st, ring, f);
            }
        }
    }
    for g in 1..n as i64 {
        let mut st = State { part: BTreeMap::new(), dpart: BTreeMap::new() };
        add(&mut st, ring, p0, g);
        grow(&mut st, ring, n, big_m, &mut found);
    }
    let mut out = Vec::new();
    for vals in found {
        let mut f = Form::zero(Lattice::Primal, dim, 2, ring);
        for (p, v) in vals {
            f.set(p, v);
        }
        if is_irreducible(&f) == Irreducibility::Irreducible {
            out.push(f);
        }
    }
    Ok(out)
}

/// Per-sample vortex statistics.
#[derive(Clone, Debug, Default, Serialize, PartialEq)]
pub struct CensusRow {
    pub sample: usize,
    pub components: usize,
    /// components whose support keeps distance at least 1 from the box boundary
    pub interior_components: usize,
    pub minimal: usize,
    pub minimal_on_loop: usize,
    pub minimal_off_loop: usize,
    /// oriented support size -> count
    pub sizes: BTreeMap<usize, usize>,
}

/// Whether the component stays one step away from the faces of `bx`.
pub fn is_interior_component(nu: &Form, bx: &LatticeBox) -> bool {
    LatticeBox::bounding(Lattice::Primal, nu.dim(), nu.support())
        .map_or(false, |b| bx.expanded(-1).contains_box(&b))
}

pub fn census(sample: usize, field: &Form, gamma: Option<&GeneralizedLoop>, bx: &LatticeBox) -> Result<(CensusRow, Vec<Vortex>)> {
    let comps = decompose(field)?;
    let mut row = CensusRow { sample, components: comps.len(), ..Default::default() };
    for v in &comps {
        *row.sizes.entry(v.size()).or_default() += 1;
        if is_interior_component(&v.form, bx) {
            row.interior_components += 1;
        }
        if let Some((e, _)) = classify_minimal(&v.form) {
            row.minimal += 1;
            if gamma.map_or(false, |g| g.coeff(e) != 0) {
                row.minimal_on_loop += 1;
            } else {
                row.minimal_off_loop += 1;
            }
        }
    }
    Ok((row, comps))
}

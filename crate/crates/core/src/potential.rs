//! Constructive Poincaré lemmas on boxes.
//!
//! Two sweeps along the last non-flat axis, recursing on the base slice:
//!
//! * [`poincare_potential`] solves `dω′ = ω`. In axial gauge the potential
//!   vanishes on cells spanning the sweep axis and is integrated up each
//!   column from the base slice.
//! * [`copoincare_potential`] solves `δω′ = ω`. Reading forms as chains,
//!   `δ` is `∂`, so this fills a cycle: every cell off the base slice is
//!   pushed down to it through a column of prisms, which never leaves the box.
//!
//! When `ω` vanishes on the boundary cells of the box, the potential of `dω′ = ω`
//! is computed through the dual lattice as `±★ (cycle filling) ★ω`, which keeps
//! it off the boundary as well.

use std::collections::BTreeMap;

use crate::error::{domain, Error, Result};
use crate::forms::{Form, Ring};
use crate::lattice::{Cell, Lattice, LatticeBox};

fn check_inside(omega: &Form, bx: &LatticeBox) -> Result<()> {
    if omega.lattice() != bx.lattice() || omega.dim() != bx.dim() {
        return domain("form and box live on different lattices");
    }
    if let Some(c) = omega.support().find(|&c| !bx.contains_cell(c)) {
        return domain(format!("support cell {c} outside the box"));
    }
    Ok(())
}

/// A `(k-1)`-form `ω′` on `bx` with `dω′ = ω` on the cells of `bx`.
pub fn poincare_potential(omega: &Form, bx: &LatticeBox) -> Result<Form> {
    let (k, m) = (omega.degree(), omega.dim());
    if k == 0 || k > m {
        return domain(format!("poincare potential of a {k}-form in dimension {m}"));
    }
    check_inside(omega, bx)?;
    let omega = omega.clone().with_region(Some(bx.clone()));
    if let Some(c) = omega.closedness_witness()? {
        return Err(Error::Precondition { msg: "form is not closed".into(), witness: c.to_string() });
    }
    let out = if omega.is_zero() {
        Form::zero(omega.lattice(), m, k - 1, omega.ring())
    } else if k < m && omega.support().all(|c| !bx.is_boundary_cell(c)) {
        relative_potential(&omega, bx)?
    } else {
        let vals: BTreeMap<Cell, i64> = omega.iter().collect();
        let mut out = Form::zero(omega.lattice(), m, k - 1, omega.ring());
        for (c, v) in axial_sweep(&vals, bx, k, omega.ring()) {
            out.set(c, v);
        }
        out
    };
    Ok(out.with_region(Some(bx.clone())))
}

/// A `(k+1)`-form `ω′` supported in `bx` with `δω′ = ω`.
pub fn copoincare_potential(omega: &Form, bx: &LatticeBox) -> Result<Form> {
    let (k, m) = (omega.degree(), omega.dim());
    if k == 0 || k >= m {
        return domain(format!("copoincare potential of a {k}-form in dimension {m}"));
    }
    check_inside(omega, bx)?;
    let free = omega.clone().with_region(None);
    if let Some(c) = free.codiff()?.support().next() {
        return Err(Error::Precondition { msg: "form is not co-closed".into(), witness: c.to_string() });
    }
    Ok(fill_cycle(&free, bx)?.with_region(Some(bx.clone())))
}

fn last_active_axis(bx: &LatticeBox) -> Option<usize> {
    (0..bx.dim()).rev().find(|&i| bx.lower()[i] < bx.upper()[i])
}

fn sweep_start(bx: &LatticeBox, axis: usize) -> i32 {
    match bx.lattice() {
        Lattice::Primal => bx.lower()[axis],
        Lattice::Dual => bx.upper()[axis],
    }
}

fn axial_sweep(omega: &BTreeMap<Cell, i64>, bx: &LatticeBox, k: usize, ring: Ring) -> BTreeMap<Cell, i64> {
    let Some(axis) = last_active_axis(bx) else {
        return BTreeMap::new();
    };
    let step = bx.lattice().step();
    let start = sweep_start(bx, axis);
    let height = bx.upper()[axis] - bx.lower()[axis];
    let base = bx.slice(axis, start);
    let on_base: BTreeMap<Cell, i64> = omega
        .iter()
        .filter(|(c, _)| base.contains_cell(**c))
        .map(|(&c, &v)| (c, v))
        .collect();
    let mut out = axial_sweep(&on_base, &base, k, ring);
    let sign = if k % 2 == 1 { 1 } else { -1 };
    for h in base.cells(k - 1) {
        let mut val = out.get(&h).copied().unwrap_or(0);
        for t in 1..=height {
            let prev = h.shifted(axis, step * (t - 1));
            let vertical = prev.with_axes(prev.axes() | 1 << axis);
            val = ring.reduce(val + sign * omega.get(&vertical).copied().unwrap_or(0));
            if val != 0 {
                out.insert(h.shifted(axis, step * t), val);
            }
        }
    }
    out
}

/// Fills a cycle (a δ-closed form read as a chain) inside `region`.
fn fill_cycle(omega: &Form, region: &LatticeBox) -> Result<Form> {
    check_inside(omega, region)?;
    let k = omega.degree();
    let ring = omega.ring();
    let step = region.lattice().step();
    let mut residual: BTreeMap<Cell, i64> = omega.iter().collect();
    let mut out = Form::zero(omega.lattice(), omega.dim(), k + 1, ring);
    let mut reg = region.clone();
    let parity = if k % 2 == 0 { 1 } else { -1 };
    while let Some(axis) = last_active_axis(&reg) {
        let start = sweep_start(&reg, axis);
        let off_base: Vec<(Cell, i64)> = residual
            .iter()
            .filter(|(c, _)| !c.has_axis(axis) && c.coord(axis) != start)
            .map(|(&c, &v)| (c, v))
            .collect();
        for (c, v) in off_base {
            let x = parity * v;
            let columns = (c.coord(axis) - start) * step;
            let bottom = c.shifted(axis, start - c.coord(axis));
            for t in 0..columns {
                let p = bottom.shifted(axis, step * t);
                let p = p.with_axes(p.axes() | 1 << axis);
                out.add(p, x);
                for (f, s) in p.faces() {
                    let e = residual.entry(f).or_insert(0);
                    *e = ring.reduce(*e - s * x);
                    if *e == 0 {
                        residual.remove(&f);
                    }
                }
            }
        }
        reg = reg.slice(axis, start);
    }
    if let Some((c, _)) = residual.iter().next() {
        return Err(Error::Precondition { msg: "chain is not a cycle".into(), witness: c.to_string() });
    }
    Ok(out)
}

fn relative_potential(omega: &Form, bx: &LatticeBox) -> Result<Form> {
    let star = omega.hodge().with_region(None);
    let inner = bx.dual().expanded(-1);
    let zeta = fill_cycle(&star, &inner)?;
    let candidate = zeta.hodge().with_region(None);
    let target = omega.clone().with_region(None);
    let d = candidate.d()?;
    if d == target {
        Ok(candidate)
    } else if d == target.neg() {
        Ok(candidate.neg())
    } else {
        Err(Error::Precondition {
            msg: "form is not closed on the whole lattice".into(),
            witness: d.minus(&target)?.support().next().map(|c| c.to_string()).unwrap_or_default(),
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_form(bx: &LatticeBox, k: usize, ring: Ring, rng: &mut ChaCha8Rng) -> Form {
        let mut f = Form::on(bx, k, ring);
        for c in bx.cells(k) {
            if rng.gen_bool(0.4) {
                f.set(c, rng.gen_range(-3..=3));
            }
        }
        f
    }

    #[test]
    fn zero_has_zero_potentials() {
        let bx = LatticeBox::cube(3, 0, 2).unwrap();
        let z = Form::on(&bx, 2, Ring::Cyclic(3));
        assert!(poincare_potential(&z, &bx).unwrap().is_zero());
        assert!(copoincare_potential(&z, &bx).unwrap().is_zero());
    }

    #[test]
    fn poincare_recovers_exact_forms() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for (dim, ring) in [(2, Ring::Cyclic(2)), (3, Ring::Cyclic(3)), (3, Ring::Integers), (4, Ring::Cyclic(5))] {
            let bx = LatticeBox::cube(dim, 0, 2).unwrap();
            for k in 1..=dim {
                for _ in 0..5 {
                    let a = random_form(&bx, k - 1, ring, &mut rng);
                    let w = a.d().unwrap();
                    let p = poincare_potential(&w, &bx).unwrap();
                    assert_eq!(p.d().unwrap(), w, "dim {dim} k {k}");
                    assert_eq!(poincare_potential(&w, &bx).unwrap(), p);
                }
            }
        }
    }

    #[test]
    fn poincare_rejects_non_closed() {
        let bx = LatticeBox::cube(3, 0, 2).unwrap();
        let mut w = Form::on(&bx, 1, Ring::Cyclic(2));
        w.set(bx.cells(1)[0], 1);
        assert!(matches!(poincare_potential(&w, &bx), Err(Error::Precondition { .. })));
    }

    #[test]
    fn boundary_vanishing_is_preserved() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for dim in [2, 3, 4] {
            let bx = LatticeBox::cube(dim, 0, 4).unwrap();
            let inner = bx.expanded(-1);
            for k in 1..dim {
                for _ in 0..4 {
                    // potentials supported strictly inside give closed forms vanishing on ∂B
                    let a = random_form(&inner, k - 1, Ring::Cyclic(3), &mut rng)
                        .restrict_to(|c| !inner.is_boundary_cell(c))
                        .with_region(Some(bx.clone()));
                    let w = a.d().unwrap();
                    assert!(w.support().all(|c| !bx.is_boundary_cell(c)));
                    let p = poincare_potential(&w, &bx).unwrap();
                    assert_eq!(p.d().unwrap(), w);
                    assert!(p.support().all(|c| bx.contains_cell(c) && !bx.is_boundary_cell(c)));
                }
            }
        }
    }

    #[test]
    fn copoincare_inverts_codiff_inside_box() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for dim in [2, 3, 4] {
            let bx = LatticeBox::cube(dim, -1, 1).unwrap();
            for k in 1..dim {
                for _ in 0..5 {
                    let a = random_form(&bx, k + 1, Ring::Integers, &mut rng);
                    let w = a.codiff().unwrap();
                    let p = copoincare_potential(&w, &bx).unwrap();
                    assert_eq!(p.codiff().unwrap(), w);
                    assert!(p.support().all(|c| bx.contains_cell(c)));
                }
            }
        }
    }

    #[test]
    fn copoincare_rejects_non_coclosed() {
        let bx = LatticeBox::cube(3, 0, 2).unwrap();
        let mut w = Form::on(&bx, 1, Ring::Integers);
        w.set(bx.cells(1)[0], 1);
        assert!(matches!(copoincare_potential(&w, &bx), Err(Error::Precondition { .. })));
    }
}

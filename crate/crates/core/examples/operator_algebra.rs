//! Exterior derivative, coderivative and Hodge star on a small box.

use zn_gauge::forms::{Form, Ring};
use zn_gauge::lattice::{Cell, Lattice, LatticeBox};
use zn_gauge::potential::poincare_potential;

fn main() -> zn_gauge::Result<()> {
    let bx = LatticeBox::cube(3, 0, 2)?;
    let mut sigma = Form::on(&bx, 1, Ring::Cyclic(3));
    sigma.set(Cell::new(Lattice::Primal, &[1, 1, 1], 0b001), 1);
    sigma.set(Cell::new(Lattice::Primal, &[0, 1, 0], 0b100), 2);

    let curvature = sigma.d()?;
    println!("dσ has {} oriented cells in its support", curvature.support_size());
    println!("ddσ = 0: {}", curvature.d()?.is_zero());

    let star = curvature.hodge();
    println!("★dσ lives on the dual lattice: {:?}, degree {}", star.lattice(), star.degree());
    println!("★★ = (−1)^(k(m−k)) = +1 on 2-forms in three dimensions: {}", star.hodge() == curvature);

    let potential = poincare_potential(&curvature, &bx)?;
    println!("Poincaré potential reproduces dσ: {}", potential.d()? == curvature);
    print!("{}", curvature.to_text());
    Ok(())
}

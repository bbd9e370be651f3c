//! Exact expectations by enumeration, compared with the closed form tanh(2β).

use zn_gauge::lattice::LatticeBox;
use zn_gauge::loops::GeneralizedLoop;
use zn_gauge::model::Representation;
use zn_gauge::oracle::{exact_expectation, free_edge_count, OracleObservable, OracleSpec};

fn main() -> zn_gauge::Result<()> {
    let rep = Representation::standard(2)?;
    let plaquette = GeneralizedLoop::rectangle(&[0, 0], 0, 1, 1, 1)?;
    for beta in [0.0, 0.3, 1.0] {
        let spec = OracleSpec::new(LatticeBox::cube(2, 0, 1)?, rep.clone(), beta);
        let w = exact_expectation(&spec, &[OracleObservable::Wilson(plaquette.clone())])?[0];
        println!("β={beta}: E[W] = {:.15}, tanh(2β) = {:.15}", w.re, (2.0 * beta).tanh());
    }

    let cube = OracleSpec::new(LatticeBox::cube(3, 0, 1)?, Representation::standard(3)?, 0.4);
    let face = GeneralizedLoop::rectangle(&[0, 0, 0], 0, 1, 1, 1)?;
    let v = exact_expectation(&cube, &[OracleObservable::Wilson(face), OracleObservable::Action])?;
    println!(
        "[0,1]^3, n=3: {} free edges after gauge fixing, E[W] = {:.12}, E[S] = {:.12}",
        free_edge_count(&cube)?,
        v[0].re,
        v[1].re
    );
    Ok(())
}

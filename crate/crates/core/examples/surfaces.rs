//! Loops, corner edges and the oriented surface bounded by a loop.

use zn_gauge::lattice::LatticeBox;
use zn_gauge::loops::{build_surface, internal_edges, internal_plaquettes, GeneralizedLoop};

fn main() -> zn_gauge::Result<()> {
    let bx = LatticeBox::centered(4, 4)?;
    let a = GeneralizedLoop::rectangle(&[-2, -1, 0, 0], 0, 1, 3, 2)?;
    let b = GeneralizedLoop::rectangle(&[1, 1, 1, 1], 2, 3, 2, 2)?;
    let gamma = a.union(&b)?;
    println!("length {} with {} corner edges", gamma.length(), gamma.corner_count());

    let q = build_surface(&gamma, &bx)?;
    println!("surface: {} plaquettes, boundary matches: {}", q.chain.len(), q.chain.boundary()? == *gamma.chain());
    println!(
        "{} internal plaquettes, {} internal edges",
        internal_plaquettes(&q.chain, &gamma).len(),
        internal_edges(&q.chain).len()
    );
    Ok(())
}

//! Vortex decomposition of sampled plaquette fields.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use zn_gauge::lattice::{Cell, Lattice, LatticeBox};
use zn_gauge::model::Representation;
use zn_gauge::sampler::{Geometry, HeatBath, Schedule, SpinConfiguration};
use zn_gauge::vortex::{census, classify_minimal, enumerate_irreducible};

fn main() -> zn_gauge::Result<()> {
    let bx = LatticeBox::centered(4, 3)?;
    let geom = Geometry::new(&bx)?;
    let rep = Representation::standard(3)?;
    let mut kernel = HeatBath::new(&rep, 0.6, Schedule::Colored)?;
    let mut sigma = SpinConfiguration::zero(&geom, 3);
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for sweep in 1..=60 {
        kernel.sweep(&mut sigma, &mut rng);
        if sweep % 20 == 0 {
            let (row, comps) = census(sweep, &sigma.plaquette_field(), None, &bx)?;
            println!("sweep {sweep}: {} components, {} minimal, sizes {:?}", row.components, row.minimal, row.sizes);
            if let Some((e, g)) = comps.iter().find_map(|v| classify_minimal(&v.form)) {
                println!("  e.g. d({g} dx) around edge {e}");
            }
        }
    }

    let p0 = Cell::new(Lattice::Primal, &[0, 0, 0, 0], 0b11);
    println!("irreducible closed forms through p0 with 6 plaquettes: {}", enumerate_irreducible(p0, 6, 3)?.len());
    Ok(())
}

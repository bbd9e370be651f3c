//! Heat-bath sampling of a Wilson loop with batch-means errors.

use zn_gauge::lattice::LatticeBox;
use zn_gauge::loops::GeneralizedLoop;
use zn_gauge::model::{predicted_wilson, Representation};
use zn_gauge::sampler::{run_chain, ActionObservable, Geometry, Observable, SamplerConfig, Schedule, WilsonObservable};

fn main() -> zn_gauge::Result<()> {
    let bx = LatticeBox::centered(3, 3)?;
    let geom = Geometry::new(&bx)?;
    let rep = Representation::standard(2)?;
    let beta = 0.45;
    let config = SamplerConfig { seed: 7, thermalization: 50, measurements: 400, stride: 1, schedule: Schedule::Colored };

    let gamma = GeneralizedLoop::rectangle(&[-1, -1, 0], 0, 1, 2, 2)?;
    let mut wilson = WilsonObservable { label: "2x2".into(), rep: rep.clone(), gamma: gamma.clone() };
    let mut action = ActionObservable(rep.clone());
    let out = run_chain(&config, &geom, &rep, beta, &mut [&mut wilson as &mut dyn Observable, &mut action], |_, _| {})?;

    for (name, est) in out.names.iter().zip(&out.estimates) {
        println!(
            "{name}: {:.6} ± {:.6} ({} batches of {})",
            est.mean.re, est.std_error, est.batch_count, est.batch_size
        );
    }
    println!("leading-order prediction for W: {:.6}", predicted_wilson(&rep, gamma.length(), beta));
    Ok(())
}

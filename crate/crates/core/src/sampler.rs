//! Heat-bath sampling of the Wilson-action measure on a box with free
//! boundary, Wilson loops, and batch-means error bars.
//!
//! The measure weights a configuration by `e^{-βS(σ)}` with
//! `S(σ) = −Σ_p Re ρ(dσ(p))` summed over both orientations, so each
//! positively oriented plaquette contributes `e^{2β Re ρ(dσ(p))}`.

use std::collections::HashMap;
use std::sync::Arc;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};
use crate::forms::{Form, Ring};
use crate::lattice::{Cell, LatticeBox};
use crate::loops::GeneralizedLoop;
use crate::model::Representation;

/// Dense indexing of the edges and plaquettes of a primal box.
#[derive(Debug)]
pub struct Geometry {
    bx: LatticeBox,
    edges: Vec<Cell>,
    edge_index: HashMap<Cell, u32>,
    plaquettes: Vec<Cell>,
    plaquette_index: HashMap<Cell, u32>,
    /// `(edge, ∂p[e])` for the four boundary edges of each plaquette
    plaquette_edges: Vec<[(u32, i8); 4]>,
    /// `(plaquette, ∂p[e])` for every plaquette of the box containing the edge
    edge_plaquettes: Vec<Vec<(u32, i8)>>,
    /// per edge and adjacent plaquette: the other three edges with signs
    /// chosen so that their weighted sum is `σ_p^e`
    neighbours: Vec<Vec<[(u32, i8); 3]>>,
    colors: Vec<Vec<u32>>,
}

impl Geometry {
    pub fn new(bx: &LatticeBox) -> Result<Arc<Geometry>> {
        if bx.lattice() != crate::lattice::Lattice::Primal {
            return domain("the sampler runs on primal boxes");
        }
        let edges = bx.cells(1);
        let plaquettes = bx.cells(2);
        let edge_index: HashMap<Cell, u32> = edges.iter().enumerate().map(|(i, &e)| (e, i as u32)).collect();
        let plaquette_index: HashMap<Cell, u32> =
            plaquettes.iter().enumerate().map(|(i, &p)| (p, i as u32)).collect();
        let mut plaquette_edges = Vec::with_capacity(plaquettes.len());
        let mut edge_plaquettes = vec![Vec::new(); edges.len()];
        for (pi, p) in plaquettes.iter().enumerate() {
            let mut four = [(0u32, 0i8); 4];
            for (slot, (f, s)) in p.faces().into_iter().enumerate() {
                let ei = edge_index[&f];
                four[slot] = (ei, s as i8);
                edge_plaquettes[ei as usize].push((pi as u32, s as i8));
            }
            plaquette_edges.push(four);
        }
        let neighbours = edge_plaquettes
            .iter()
            .enumerate()
            .map(|(ei, adj)| {
                adj.iter()
                    .map(|&(pi, c)| {
                        let mut rest = [(0u32, 0i8); 3];
                        let mut k = 0;
                        for &(f, s) in &plaquette_edges[pi as usize] {
                            if f as usize != ei {
                                rest[k] = (f, c * s);
                                k += 1;
                            }
                        }
                        rest
                    })
                    .collect()
            })
            .collect();
        // color = (direction, parity of the other coordinates): same-colored
        // edges never bound a common plaquette
        let dim = bx.dim();
        let mut colors = vec![Vec::new(); 2 * dim];
        for (ei, e) in edges.iter().enumerate() {
            let dir = e.axes().trailing_zeros() as usize;
            let parity = (0..dim).filter(|&j| j != dir).map(|j| e.coord(j)).sum::<i32>().rem_euclid(2);
            colors[2 * dir + parity as usize].push(ei as u32);
        }
        Ok(Arc::new(Geometry {
            bx: bx.clone(),
            edges,
            edge_index,
            plaquettes,
            plaquette_index,
            plaquette_edges,
            edge_plaquettes,
            neighbours,
            colors,
        }))
    }

    pub fn bx(&self) -> &LatticeBox {
        &self.bx
    }

    pub fn edges(&self) -> &[Cell] {
        &self.edges
    }

    pub fn plaquettes(&self) -> &[Cell] {
        &self.plaquettes
    }

    pub fn edge_index(&self, e: Cell) -> Option<usize> {
        self.edge_index.get(&e).map(|&i| i as usize)
    }

    pub fn plaquette_index(&self, p: Cell) -> Option<usize> {
        self.plaquette_index.get(&p).map(|&i| i as usize)
    }

    /// Plaquettes of the box containing edge `ei`, with `∂p[e]`.
    pub fn edge_plaquettes(&self, ei: usize) -> &[(u32, i8)] {
        &self.edge_plaquettes[ei]
    }

    pub fn plaquette_edges(&self, pi: usize) -> &[(u32, i8); 4] {
        &self.plaquette_edges[pi]
    }

    pub fn colors(&self) -> &[Vec<u32>] {
        &self.colors
    }
}

/// A ℤ_n-valued 1-form on the edges of a box.
#[derive(Clone, Debug)]
pub struct SpinConfiguration {
    geom: Arc<Geometry>,
    n: u32,
    values: Vec<u32>,
}

impl PartialEq for SpinConfiguration {
    fn eq(&self, o: &Self) -> bool {
        self.n == o.n && self.geom.bx == o.geom.bx && self.values == o.values
    }
}

impl SpinConfiguration {
    pub fn zero(geom: &Arc<Geometry>, n: u32) -> SpinConfiguration {
        SpinConfiguration { geom: geom.clone(), n, values: vec![0; geom.edges.len()] }
    }

    pub fn from_values(geom: &Arc<Geometry>, n: u32, values: Vec<u32>) -> Result<SpinConfiguration> {
        if values.len() != geom.edges.len() || values.iter().any(|&v| v >= n) {
            return domain("spin values do not match the box");
        }
        Ok(SpinConfiguration { geom: geom.clone(), n, values })
    }

    pub fn from_form(geom: &Arc<Geometry>, sigma: &Form) -> Result<SpinConfiguration> {
        let Ring::Cyclic(n) = sigma.ring() else {
            return domain("spin configurations take values in Z_n");
        };
        let mut out = SpinConfiguration::zero(geom, n);
        for (e, v) in sigma.iter() {
            let Some(i) = geom.edge_index(e) else {
                return domain(format!("edge {e} outside the box"));
            };
            out.values[i] = v as u32;
        }
        Ok(out)
    }

    pub fn geometry(&self) -> &Arc<Geometry> {
        &self.geom
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn values(&self) -> &[u32] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [u32] {
        &mut self.values
    }

    /// `σ(e)` on a positively oriented edge, zero outside the box.
    pub fn get(&self, e: Cell) -> u32 {
        self.geom.edge_index(e).map_or(0, |i| self.values[i])
    }

    pub fn set(&mut self, e: Cell, v: i64) -> Result<()> {
        let Some(i) = self.geom.edge_index(e) else {
            return domain(format!("edge {e} outside the box"));
        };
        self.values[i] = v.rem_euclid(self.n as i64) as u32;
        Ok(())
    }

    pub fn to_form(&self) -> Form {
        let mut f = Form::on(&self.geom.bx, 1, Ring::Cyclic(self.n));
        for (e, &v) in self.geom.edges.iter().zip(&self.values) {
            f.set(*e, v as i64);
        }
        f
    }

    /// `dσ(p)` for the plaquette with dense index `pi`.
    #[inline]
    pub fn plaquette_value(&self, pi: usize) -> u32 {
        let n = self.n as i64;
        let s: i64 = self.geom.plaquette_edges[pi].iter().map(|&(e, c)| c as i64 * self.values[e as usize] as i64).sum();
        s.rem_euclid(n) as u32
    }

    /// `dσ` on every plaquette of the box, in dense order.
    pub fn plaquette_values(&self) -> Vec<u32> {
        (0..self.geom.plaquettes.len()).map(|pi| self.plaquette_value(pi)).collect()
    }

    /// The closed 2-form `dσ`.
    pub fn plaquette_field(&self) -> Form {
        let mut f = Form::on(&self.geom.bx, 2, Ring::Cyclic(self.n));
        for (pi, p) in self.geom.plaquettes.iter().enumerate() {
            f.set(*p, self.plaquette_value(pi) as i64);
        }
        f
    }

    /// Wilson action `S(σ)`, both orientations counted.
    pub fn action(&self, rep: &Representation) -> f64 {
        -2.0 * (0..self.geom.plaquettes.len()).map(|pi| rep.re_rho(self.plaquette_value(pi) as i64)).sum::<f64>()
    }

    /// `σ(γ)` as an element of ℤ_n.
    pub fn loop_sum(&self, gamma: &GeneralizedLoop) -> Result<u32> {
        let mut s = 0i64;
        for (e, c) in gamma.edges() {
            let Some(i) = self.geom.edge_index(e) else {
                return domain(format!("loop edge {e} outside the box"));
            };
            s += c * self.values[i] as i64;
        }
        Ok(s.rem_euclid(self.n as i64) as u32)
    }

    /// `W_γ(σ) = ρ(σ(γ))`, with the group sum taken before applying ρ.
    pub fn wilson_loop(&self, rep: &Representation, gamma: &GeneralizedLoop) -> Result<Complex64> {
        Ok(rep.rho(self.loop_sum(gamma)? as i64))
    }

    /// Partial plaquette sums `σ_p^e` for the plaquettes at edge `ei`.
    fn partial_sums(&self, ei: usize, out: &mut Vec<u32>) {
        out.clear();
        let n = self.n as i64;
        for rest in &self.geom.neighbours[ei] {
            let s: i64 = rest.iter().map(|&(f, c)| c as i64 * self.values[f as usize] as i64).sum();
            out.push(s.rem_euclid(n) as u32);
        }
    }
}

/// Conditional law of `σ(e)` given the other edges:
/// `P(g) ∝ ∏_p φ_β(σ_p^e + g)²` over the plaquettes of the box at `e`.
pub fn local_conditional(sigma: &SpinConfiguration, rep: &Representation, e: Cell, beta: f64) -> Result<Vec<f64>> {
    let Some(ei) = sigma.geom.edge_index(e) else {
        return domain(format!("edge {e} outside the box"));
    };
    let mut sums = Vec::new();
    sigma.partial_sums(ei, &mut sums);
    let mut w = vec![0.0; rep.n() as usize];
    conditional_weights(rep, &sums, beta, &mut w);
    let z: f64 = w.iter().sum();
    Ok(w.into_iter().map(|x| x / z).collect())
}

fn conditional_weights(rep: &Representation, sums: &[u32], beta: f64, w: &mut [f64]) {
    let n = rep.n() as usize;
    let cos = rep.cos_table();
    let mut hist = [0u32; 64];
    let mut small = Vec::new();
    let hist: &mut [u32] = if n <= 64 {
        &mut hist[..n]
    } else {
        small.resize(n, 0);
        &mut small
    };
    for &s in sums {
        hist[s as usize] += 1;
    }
    let mut top = f64::NEG_INFINITY;
    for g in 0..n {
        let e: f64 = hist.iter().enumerate().filter(|(_, &h)| h > 0).map(|(v, &h)| h as f64 * cos[(v + g) % n]).sum();
        w[g] = e;
        top = top.max(e);
    }
    for x in w.iter_mut() {
        *x = (2.0 * beta * (*x - top)).exp();
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum Schedule {
    #[default]
    Sequential,
    Colored,
}

/// Heat-bath kernel for fixed `β`.
pub struct HeatBath {
    rep: Representation,
    beta: f64,
    schedule: Schedule,
    sums: Vec<u32>,
    weights: Vec<f64>,
}

impl HeatBath {
    pub fn new(rep: &Representation, beta: f64, schedule: Schedule) -> Result<HeatBath> {
        if !(beta >= 0.0) || !beta.is_finite() {
            return domain(format!("beta = {beta} must be a finite nonnegative number"));
        }
        Ok(HeatBath { rep: rep.clone(), beta, schedule, sums: Vec::new(), weights: vec![0.0; rep.n() as usize] })
    }

    pub fn representation(&self) -> &Representation {
        &self.rep
    }

    /// Resamples edge `ei` from its conditional law.
    #[inline]
    pub fn update_edge<R: Rng>(&mut self, sigma: &mut SpinConfiguration, ei: usize, rng: &mut R) {
        sigma.partial_sums(ei, &mut self.sums);
        conditional_weights(&self.rep, &self.sums, self.beta, &mut self.weights);
        let total: f64 = self.weights.iter().sum();
        let mut u = rng.gen::<f64>() * total;
        let mut pick = self.weights.len() - 1;
        for (g, &w) in self.weights.iter().enumerate() {
            if u < w {
                pick = g;
                break;
            }
            u -= w;
        }
        sigma.values[ei] = pick as u32;
    }

    /// One sweep: every edge of the box is resampled once.
    pub fn sweep<R: Rng>(&mut self, sigma: &mut SpinConfiguration, rng: &mut R) {
        let geom = sigma.geom.clone();
        match self.schedule {
            Schedule::Sequential => {
                for ei in 0..geom.edges.len() {
                    self.update_edge(sigma, ei, rng);
                }
            }
            Schedule::Colored => {
                for class in &geom.colors {
                    for &ei in class {
                        self.update_edge(sigma, ei as usize, rng);
                    }
                }
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SamplerConfig {
    pub seed: u64,
    pub thermalization: usize,
    pub measurements: usize,
    #[serde(default = "one")]
    pub stride: usize,
    #[serde(default)]
    pub schedule: Schedule,
}

fn one() -> usize {
    1
}

impl SamplerConfig {
    pub fn validate(&self) -> Result<()> {
        if self.measurements == 0 {
            return Err(Error::Config("measurement sweeps must be positive".into()));
        }
        if self.stride == 0 {
            return Err(Error::Config("stride must be at least 1".into()));
        }
        Ok(())
    }
}

pub const MIN_BATCHES: usize = 20;
const TARGET_AUTOCORRELATION: f64 = 0.1;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct EstimatorResult {
    pub mean: Complex64,
    /// standard error of the real part
    pub std_error: f64,
    pub std_error_im: f64,
    pub batch_count: usize,
    pub batch_size: usize,
    pub sample_count: usize,
    /// lag-1 autocorrelation of the batch means of the real part
    pub autocorrelation: f64,
}

fn mean_var(xs: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let m = xs.iter().sum::<f64>() / n;
    let v = xs.iter().map(|x| (x - m) * (x - m)).sum::<f64>() / (n - 1.0);
    (m, v)
}

fn lag1(xs: &[f64]) -> f64 {
    let (m, _) = mean_var(xs);
    let den: f64 = xs.iter().map(|x| (x - m) * (x - m)).sum();
    if den <= 0.0 {
        return 0.0;
    }
    xs.windows(2).map(|w| (w[0] - m) * (w[1] - m)).sum::<f64>() / den
}

fn batch(xs: &[f64], size: usize) -> Vec<f64> {
    xs.chunks_exact(size).map(|c| c.iter().sum::<f64>() / size as f64).collect()
}

/// Batch-means estimate. The batch size doubles from 1 until the lag-1
/// autocorrelation of the batch means drops below 0.1, keeping at least
/// [`MIN_BATCHES`] batches.
pub fn batch_means(series: &[Complex64]) -> Result<EstimatorResult> {
    if series.len() < MIN_BATCHES {
        return Err(Error::Config(format!("{} samples cannot form {MIN_BATCHES} batches", series.len())));
    }
    let re: Vec<f64> = series.iter().map(|z| z.re).collect();
    let im: Vec<f64> = series.iter().map(|z| z.im).collect();
    let mut size = 1;
    loop {
        let r = lag1(&batch(&re, size)).max(lag1(&batch(&im, size)));
        if r < TARGET_AUTOCORRELATION || series.len() / (2 * size) < MIN_BATCHES {
            break;
        }
        size *= 2;
    }
    let (br, bi) = (batch(&re, size), batch(&im, size));
    let nb = br.len();
    let used = nb * size;
    let mean = Complex64::new(re[..used].iter().sum::<f64>() / used as f64, im[..used].iter().sum::<f64>() / used as f64);
    Ok(EstimatorResult {
        mean,
        std_error: (mean_var(&br).1 / nb as f64).sqrt(),
        std_error_im: (mean_var(&bi).1 / nb as f64).sqrt(),
        batch_count: nb,
        batch_size: size,
        sample_count: used,
        autocorrelation: lag1(&br),
    })
}

/// Something measured on every recorded configuration.
pub trait Observable {
    fn name(&self) -> String;
    fn measure(&mut self, sigma: &SpinConfiguration) -> Complex64;
}

pub struct WilsonObservable {
    pub label: String,
    pub rep: Representation,
    pub gamma: GeneralizedLoop,
}

impl Observable for WilsonObservable {
    fn name(&self) -> String {
        self.label.clone()
    }

    fn measure(&mut self, sigma: &SpinConfiguration) -> Complex64 {
        sigma.wilson_loop(&self.rep, &self.gamma).expect("loop checked against the box")
    }
}

pub struct ActionObservable(pub Representation);

impl Observable for ActionObservable {
    fn name(&self) -> String {
        "action".into()
    }

    fn measure(&mut self, sigma: &SpinConfiguration) -> Complex64 {
        Complex64::new(sigma.action(&self.0), 0.0)
    }
}

impl<F: FnMut(&SpinConfiguration) -> Complex64> Observable for (String, F) {
    fn name(&self) -> String {
        self.0.clone()
    }

    fn measure(&mut self, sigma: &SpinConfiguration) -> Complex64 {
        (self.1)(sigma)
    }
}

#[derive(Clone, Debug)]
pub struct ChainOutput {
    pub names: Vec<String>,
    pub series: Vec<Vec<Complex64>>,
    pub estimates: Vec<EstimatorResult>,
    pub final_state: SpinConfiguration,
}

/// Runs a cold-started chain and measures every observable after each
/// `stride` sweeps. The `hook` sees each recorded configuration first.
pub fn run_chain(
    config: &SamplerConfig,
    geom: &Arc<Geometry>,
    rep: &Representation,
    beta: f64,
    observables: &mut [&mut dyn Observable],
    mut hook: impl FnMut(usize, &SpinConfiguration),
) -> Result<ChainOutput> {
    config.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let mut kernel = HeatBath::new(rep, beta, config.schedule)?;
    let mut sigma = SpinConfiguration::zero(geom, rep.n());
    for _ in 0..config.thermalization {
        kernel.sweep(&mut sigma, &mut rng);
    }
    let mut series = vec![Vec::with_capacity(config.measurements); observables.len()];
    for t in 0..config.measurements {
        for _ in 0..config.stride {
            kernel.sweep(&mut sigma, &mut rng);
        }
        hook(t, &sigma);
        for (o, s) in observables.iter_mut().zip(series.iter_mut()) {
            s.push(o.measure(&sigma));
        }
    }
    let estimates = series.iter().map(|s| batch_means(s)).collect::<Result<Vec<_>>>()?;
    Ok(ChainOutput { names: observables.iter().map(|o| o.name()).collect(), series, estimates, final_state: sigma })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::Lattice;

    fn square() -> Arc<Geometry> {
        Geometry::new(&LatticeBox::cube(2, 0, 1).unwrap()).unwrap()
    }

    #[test]
    fn action_of_single_plaquette() {
        let g = square();
        let rep = Representation::standard(2).unwrap();
        let mut s = SpinConfiguration::zero(&g, 2);
        assert_eq!(s.action(&rep), -2.0);
        s.set(g.edges()[0], 1).unwrap();
        assert_eq!(s.action(&rep), 2.0);
    }

    #[test]
    fn action_is_translation_invariant() {
        let g = Geometry::new(&LatticeBox::cube(3, 0, 4).unwrap()).unwrap();
        let rep = Representation::standard(3).unwrap();
        let mut a = SpinConfiguration::zero(&g, 3);
        let mut b = SpinConfiguration::zero(&g, 3);
        let e = Cell::new(Lattice::Primal, &[1, 1, 1], 0b010);
        let f = Cell::new(Lattice::Primal, &[1, 2, 1], 0b100);
        for (c, v) in [(e, 1), (f, 2)] {
            a.set(c, v).unwrap();
            b.set(c.translated(&[1, 0, 1]), v).unwrap();
        }
        assert!((a.action(&rep) - b.action(&rep)).abs() < 1e-12);
    }

    #[test]
    fn conditional_examples() {
        let beta = 0.37;
        let rep = Representation::standard(2).unwrap();
        let g4 = Geometry::new(&LatticeBox::cube(4, -1, 1).unwrap()).unwrap();
        let s = SpinConfiguration::zero(&g4, 2);
        let e = Cell::new(Lattice::Primal, &[0, 0, 0, 0], 1);
        let p = local_conditional(&s, &rep, e, beta).unwrap();
        assert!((p[0] - 1.0 / (1.0 + (-24.0 * beta).exp())).abs() < 1e-14);
        let g3 = Geometry::new(&LatticeBox::cube(3, 0, 1).unwrap()).unwrap();
        let s3 = SpinConfiguration::zero(&g3, 2);
        let p = local_conditional(&s3, &rep, Cell::new(Lattice::Primal, &[0, 0, 0], 1), beta).unwrap();
        assert!((p[0] - 1.0 / (1.0 + (-8.0 * beta).exp())).abs() < 1e-14);
        let r5 = Representation::standard(5).unwrap();
        let s5 = SpinConfiguration::zero(&g4, 5);
        let p = local_conditional(&s5, &r5, e, 0.0).unwrap();
        assert!(p.iter().all(|x| (x - 0.2).abs() < 1e-15));
    }

    #[test]
    fn conditional_matches_action_difference() {
        // P(g)/P(h) = exp(-β(S_g - S_h)) with all other edges fixed
        let rep = Representation::standard(4).unwrap();
        let g = Geometry::new(&LatticeBox::cube(3, 0, 2).unwrap()).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let vals = (0..g.edges().len()).map(|_| rng.gen_range(0..4)).collect();
        let mut s = SpinConfiguration::from_values(&g, 4, vals).unwrap();
        let e = g.edges()[7];
        let p = local_conditional(&s, &rep, e, 0.8).unwrap();
        let mut act = Vec::new();
        for v in 0..4 {
            s.set(e, v).unwrap();
            act.push(s.action(&rep));
        }
        for v in 1..4 {
            let ratio = p[v] / p[0];
            assert!((ratio - (-0.8 * (act[v] - act[0])).exp()).abs() < 1e-10 * ratio.max(1.0));
        }
    }

    #[test]
    fn colors_are_independent_sets() {
        let g = Geometry::new(&LatticeBox::cube(4, 0, 2).unwrap()).unwrap();
        let total: usize = g.colors().iter().map(|c| c.len()).sum();
        assert_eq!(total, g.edges().len());
        for class in g.colors() {
            let set: std::collections::HashSet<u32> = class.iter().copied().collect();
            for &ei in class {
                for &(pi, _) in g.edge_plaquettes(ei as usize) {
                    let shared = g.plaquette_edges(pi as usize).iter().filter(|(f, _)| set.contains(f)).count();
                    assert_eq!(shared, 1);
                }
            }
        }
    }

    #[test]
    fn plaquette_field_matches_form_derivative() {
        let g = Geometry::new(&LatticeBox::cube(3, 0, 2).unwrap()).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let vals = (0..g.edges().len()).map(|_| rng.gen_range(0..3)).collect();
        let s = SpinConfiguration::from_values(&g, 3, vals).unwrap();
        let f = s.plaquette_field();
        assert_eq!(f, s.to_form().d().unwrap());
        assert!(f.d().unwrap().is_zero());
    }

    #[test]
    fn wilson_loop_basics() {
        let g = Geometry::new(&LatticeBox::cube(3, 0, 3).unwrap()).unwrap();
        let rep = Representation::standard(5).unwrap();
        let gamma = GeneralizedLoop::rectangle(&[0, 1, 1], 0, 2, 2, 2).unwrap();
        let mut s = SpinConfiguration::zero(&g, 5);
        assert_eq!(s.wilson_loop(&rep, &gamma).unwrap(), Complex64::new(1.0, 0.0));
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for v in s.values_mut() {
            *v = rng.gen_range(0..5);
        }
        let w = s.wilson_loop(&rep, &gamma).unwrap();
        assert!((w.norm() - 1.0).abs() < 1e-15);
        // gauge transform σ + dh leaves W unchanged
        let mut h = Form::on(g.bx(), 0, Ring::Cyclic(5));
        for c in g.bx().cells(0) {
            h.set(c, rng.gen_range(0..5));
        }
        let shifted = SpinConfiguration::from_form(&g, &s.to_form().plus(&h.d().unwrap()).unwrap()).unwrap();
        assert_eq!(shifted.wilson_loop(&rep, &gamma).unwrap(), w);
        // γ = ∂p gives ρ(dσ(p))
        let unit = GeneralizedLoop::rectangle(&[1, 1, 1], 0, 1, 1, 1).unwrap();
        let p = Cell::new(Lattice::Primal, &[1, 1, 1], 0b011);
        let pv = s.plaquette_value(g.plaquette_index(p).unwrap());
        assert_eq!(s.wilson_loop(&rep, &unit).unwrap(), rep.rho(pv as i64));
    }

    #[test]
    fn single_plaquette_chain_matches_tanh() {
        let g = square();
        let rep = Representation::standard(2).unwrap();
        let gamma = GeneralizedLoop::rectangle(&[0, 0], 0, 1, 1, 1).unwrap();
        for (beta, schedule) in [(0.0, Schedule::Sequential), (0.4, Schedule::Colored)] {
            let cfg = SamplerConfig { seed: 11, thermalization: 10, measurements: 40_000, stride: 1, schedule };
            let mut w = WilsonObservable { label: "w".into(), rep: rep.clone(), gamma: gamma.clone() };
            let out = run_chain(&cfg, &g, &rep, beta, &mut [&mut w], |_, _| {}).unwrap();
            let est = &out.estimates[0];
            assert!(est.batch_count >= MIN_BATCHES);
            let exact = (2.0 * beta as f64).tanh();
            assert!((est.mean.re - exact).abs() <= 4.0 * est.std_error, "{est:?} vs {exact}");
        }
    }

    #[test]
    fn fixed_seed_is_reproducible() {
        let g = Geometry::new(&LatticeBox::cube(3, 0, 2).unwrap()).unwrap();
        let rep = Representation::standard(3).unwrap();
        let cfg = SamplerConfig { seed: 5, thermalization: 3, measurements: 25, stride: 2, schedule: Schedule::Colored };
        let mut a = ActionObservable(rep.clone());
        let x = run_chain(&cfg, &g, &rep, 0.5, &mut [&mut a], |_, _| {}).unwrap();
        let y = run_chain(&cfg, &g, &rep, 0.5, &mut [&mut a], |_, _| {}).unwrap();
        assert_eq!(x.series, y.series);
        assert_eq!(x.final_state, y.final_state);
    }

    #[test]
    fn batch_means_on_iid_and_constant_series() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let xs: Vec<Complex64> = (0..4000).map(|_| Complex64::new(rng.gen::<f64>(), 0.0)).collect();
        let est = batch_means(&xs).unwrap();
        assert!((est.mean.re - 0.5).abs() < 4.0 * est.std_error);
        assert!((est.std_error - (1.0f64 / 12.0 / 4000.0).sqrt()).abs() < 0.003);
        let c = batch_means(&vec![Complex64::new(1.0, 0.0); 100]).unwrap();
        assert_eq!((c.mean.re, c.std_error), (1.0, 0.0));
        assert!(batch_means(&xs[..10]).is_err());
        let bad = SamplerConfig { seed: 0, thermalization: 0, measurements: 0, stride: 1, schedule: Schedule::Sequential };
        assert!(matches!(bad.validate(), Err(Error::Config(_))));
    }
}

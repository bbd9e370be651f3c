//! Exact expectations under the Wilson-action measure on small boxes.
//!
//! The general path enumerates edge configurations with an odometer, after
//! optionally fixing the gauge on a spanning tree. Moving a digit always
//! adds 1 mod n (including the wrap from n−1 to 0), so plaquette values are
//! maintained incrementally. In two dimensions `σ ↦ dσ` maps the gauge-fixed
//! configurations bijectively onto all plaquette assignments, the measure
//! becomes a product over plaquettes, and Wilson loops, the action and
//! agreement events factorize.

use std::sync::Arc;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{domain, Error, Result};
use crate::forms::{Form, Ring};
use crate::lattice::LatticeBox;
use crate::loops::{build_surface, GeneralizedLoop};
use crate::model::Representation;
use crate::sampler::{Geometry, SpinConfiguration};

/// Hard limit on the number of enumerated states.
pub const ENUMERATION_BUDGET: f64 = (1u64 << 28) as f64;

#[derive(Clone, Debug)]
pub struct OracleSpec {
    pub bx: LatticeBox,
    pub rep: Representation,
    pub beta: f64,
    pub gauge_fix: bool,
}

impl OracleSpec {
    pub fn new(bx: LatticeBox, rep: Representation, beta: f64) -> OracleSpec {
        OracleSpec { bx, rep, beta, gauge_fix: true }
    }
}

type CustomFn = Box<dyn Fn(&SpinConfiguration) -> Complex64 + Send + Sync>;

pub enum OracleObservable {
    Wilson(GeneralizedLoop),
    Action,
    /// indicator of `dσ|_{supp ν} = ν`
    Agreement(Form),
    Custom(String, CustomFn),
}

impl OracleObservable {
    pub fn name(&self) -> String {
        match self {
            OracleObservable::Wilson(_) => "wilson".into(),
            OracleObservable::Action => "action".into(),
            OracleObservable::Agreement(_) => "agreement".into(),
            OracleObservable::Custom(name, _) => name.clone(),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Method {
    /// factorized plaquette measure in two dimensions, enumeration otherwise
    Auto,
    Enumerate,
}

/// Marks the edges of a spanning tree, chosen greedily in canonical edge order.
pub fn spanning_tree(geom: &Geometry) -> Vec<bool> {
    let points = geom.bx().points();
    let index: std::collections::HashMap<Vec<i32>, usize> =
        points.iter().enumerate().map(|(i, p)| (p.clone(), i)).collect();
    let mut parent: Vec<usize> = (0..points.len()).collect();
    fn find(parent: &mut [usize], mut x: usize) -> usize {
        while parent[x] != x {
            parent[x] = parent[parent[x]];
            x = parent[x];
        }
        x
    }
    geom.edges()
        .iter()
        .map(|e| {
            let corners = e.corners();
            let (a, b) = (find(&mut parent, index[&corners[0]]), find(&mut parent, index[&corners[1]]));
            if a != b {
                parent[a] = b;
                true
            } else {
                false
            }
        })
        .collect()
}

/// Number of enumerated edges for the spec.
pub fn free_edge_count(spec: &OracleSpec) -> Result<usize> {
    let geom = Geometry::new(&spec.bx)?;
    Ok(if spec.gauge_fix { spanning_tree(&geom).iter().filter(|t| !**t).count() } else { geom.edges().len() })
}

fn check_observables(spec: &OracleSpec, geom: &Arc<Geometry>, obs: &[OracleObservable]) -> Result<()> {
    let n = spec.rep.n();
    for o in obs {
        match o {
            OracleObservable::Wilson(g) => {
                if let Some(e) = g.edges().map(|(e, _)| e).find(|&e| geom.edge_index(e).is_none()) {
                    return domain(format!("loop edge {e} outside the box"));
                }
            }
            OracleObservable::Agreement(nu) => {
                if nu.degree() != 2 || nu.ring() != Ring::Cyclic(n) {
                    return domain("agreement needs a Z_n-valued 2-form");
                }
                if let Some(p) = nu.support().find(|&p| geom.plaquette_index(p).is_none()) {
                    return domain(format!("plaquette {p} outside the box"));
                }
            }
            OracleObservable::Custom(name, f) if spec.gauge_fix => {
                let mut rng = ChaCha8Rng::seed_from_u64(0x9a06e);
                for _ in 0..8 {
                    let vals = (0..geom.edges().len()).map(|_| rng.gen_range(0..n)).collect();
                    let s = SpinConfiguration::from_values(geom, n, vals)?;
                    let mut h = Form::on(&spec.bx, 0, Ring::Cyclic(n));
                    for c in spec.bx.cells(0) {
                        h.set(c, rng.gen_range(0..n) as i64);
                    }
                    let t = SpinConfiguration::from_form(geom, &s.to_form().plus(&h.d()?)?)?;
                    if (f(&s) - f(&t)).norm() > 1e-9 {
                        return Err(Error::Precondition {
                            msg: format!("observable {name} is not gauge invariant"),
                            witness: "random gauge transform".into(),
                        });
                    }
                }
            }
            _ => {}
        }
    }
    Ok(())
}

/// `E_{N,β}[f]` for each observable, exactly.
pub fn exact_expectation(spec: &OracleSpec, obs: &[OracleObservable]) -> Result<Vec<Complex64>> {
    exact_expectation_with(spec, obs, Method::Auto)
}

pub fn exact_expectation_with(spec: &OracleSpec, obs: &[OracleObservable], method: Method) -> Result<Vec<Complex64>> {
    if !(spec.beta >= 0.0) {
        return domain(format!("beta = {} must be nonnegative", spec.beta));
    }
    let geom = Geometry::new(&spec.bx)?;
    check_observables(spec, &geom, obs)?;
    let custom = obs.iter().any(|o| matches!(o, OracleObservable::Custom(..)));
    if method == Method::Auto && spec.bx.dim() == 2 && !custom {
        return factorized_2d(spec, &geom, obs);
    }
    enumerate(spec, &geom, obs)
}

/// Law of a single plaquette value: `P(x) ∝ e^{2β Re ρ(x)}`.
fn single_plaquette_law(rep: &Representation, beta: f64) -> Vec<f64> {
    let w: Vec<f64> = rep.cos_table().iter().map(|c| (2.0 * beta * (c - 1.0)).exp()).collect();
    let z: f64 = w.iter().sum();
    w.into_iter().map(|x| x / z).collect()
}

fn factorized_2d(spec: &OracleSpec, geom: &Arc<Geometry>, obs: &[OracleObservable]) -> Result<Vec<Complex64>> {
    let law = single_plaquette_law(&spec.rep, spec.beta);
    let n = spec.rep.n() as i64;
    let char_mean = |k: i64| -> Complex64 { (0..n).map(|x| spec.rep.rho(k * x) * law[x as usize]).sum() };
    obs.iter()
        .map(|o| {
            Ok(match o {
                OracleObservable::Wilson(g) => {
                    if g.length() == 0 {
                        return Ok(Complex64::new(1.0, 0.0));
                    }
                    let q = build_surface(g, &spec.bx)?;
                    q.chain.iter().map(|(_, k)| char_mean(k)).product()
                }
                OracleObservable::Action => {
                    let per: f64 = (0..n).map(|x| spec.rep.re_rho(x) * law[x as usize]).sum();
                    Complex64::new(-2.0 * per * geom.plaquettes().len() as f64, 0.0)
                }
                OracleObservable::Agreement(nu) => {
                    Complex64::new(nu.iter().map(|(_, v)| law[v as usize]).product::<f64>(), 0.0)
                }
                OracleObservable::Custom(..) => unreachable!("custom observables use enumeration"),
            })
        })
        .collect()
}

/// Neumaier-compensated running sum; enumerations add up to 2^28 terms.
#[derive(Clone, Copy, Default)]
struct Sum {
    total: f64,
    carry: f64,
}

impl Sum {
    fn add(&mut self, x: f64) {
        let t = self.total + x;
        self.carry += if self.total.abs() >= x.abs() { (self.total - t) + x } else { (x - t) + self.total };
        self.total = t;
    }

    fn value(self) -> f64 {
        self.total + self.carry
    }
}

fn enumerate(spec: &OracleSpec, geom: &Arc<Geometry>, obs: &[OracleObservable]) -> Result<Vec<Complex64>> {
    let n = spec.rep.n();
    let free: Vec<usize> = if spec.gauge_fix {
        spanning_tree(geom).iter().enumerate().filter(|(_, t)| !**t).map(|(i, _)| i).collect()
    } else {
        (0..geom.edges().len()).collect()
    };
    let states = (n as f64).powi(free.len() as i32);
    if states > ENUMERATION_BUDGET {
        return Err(Error::Budget { states, budget: ENUMERATION_BUDGET });
    }
    let cos = spec.rep.cos_table();
    let np = geom.plaquettes().len();
    let mut sigma = SpinConfiguration::zero(geom, n);
    let mut plaq = vec![0u32; np];
    let mut hist = vec![0u64; n as usize];
    hist[0] = np as u64;
    let loops: Vec<Vec<(usize, i64)>> = obs
        .iter()
        .map(|o| match o {
            OracleObservable::Wilson(g) => g.edges().map(|(e, c)| (geom.edge_index(e).unwrap(), c)).collect(),
            _ => Vec::new(),
        })
        .collect();
    let targets: Vec<Vec<(usize, u32)>> = obs
        .iter()
        .map(|o| match o {
            OracleObservable::Agreement(nu) => {
                nu.iter().map(|(p, v)| (geom.plaquette_index(p).unwrap(), v as u32)).collect()
            }
            _ => Vec::new(),
        })
        .collect();
    let mut z = Sum::default();
    let mut sums = vec![(Sum::default(), Sum::default()); obs.len()];
    let mut digits = vec![0u32; free.len()];
    loop {
        let energy: f64 = hist.iter().zip(cos).map(|(&h, c)| h as f64 * (c - 1.0)).sum();
        let w = (2.0 * spec.beta * energy).exp();
        z.add(w);
        for (k, o) in obs.iter().enumerate() {
            let v = match o {
                OracleObservable::Wilson(_) => {
                    let s: i64 = loops[k].iter().map(|&(e, c)| c * sigma.values()[e] as i64).sum();
                    spec.rep.rho(s)
                }
                OracleObservable::Action => {
                    Complex64::new(-2.0 * hist.iter().zip(cos).map(|(&h, c)| h as f64 * c).sum::<f64>(), 0.0)
                }
                OracleObservable::Agreement(_) => {
                    Complex64::new(targets[k].iter().all(|&(p, v)| plaq[p] == v) as u8 as f64, 0.0)
                }
                OracleObservable::Custom(_, f) => f(&sigma),
            };
            sums[k].0.add(v.re * w);
            sums[k].1.add(v.im * w);
        }
        // odometer step; every touched digit moves by +1 mod n
        let mut i = 0;
        loop {
            if i == free.len() {
                let z = z.value();
                return Ok(sums.into_iter().map(|(re, im)| Complex64::new(re.value(), im.value()) / z).collect());
            }
            let ei = free[i];
            digits[i] = (digits[i] + 1) % n;
            sigma.values_mut()[ei] = digits[i];
            for &(pi, c) in geom.edge_plaquettes(ei) {
                let old = plaq[pi as usize];
                let new = (old as i64 + c as i64).rem_euclid(n as i64) as u32;
                hist[old as usize] -= 1;
                hist[new as usize] += 1;
                plaq[pi as usize] = new;
            }
            if digits[i] != 0 {
                break;
            }
            i += 1;
        }
    }
}

//! Run manifests, loop description files and CSV output.
//!
//! Loop files hold one item per line, `#` starting a comment:
//!
//! ```text
//! 0,0,0,0 1 -1          base point, axis (0-based), coefficient
//! rect 0,1 3 2 0,0,0,0  rectangle: plane, R, T, lower corner
//! ```

use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::forms::Chain;
use crate::lattice::{Cell, Lattice, LatticeBox};
use crate::loops::GeneralizedLoop;
use crate::model::Representation;
use crate::oracle::{exact_expectation, OracleObservable, OracleSpec};
use crate::sampler::{run_chain, Geometry, SamplerConfig, Schedule};
use crate::vortex::{census, CensusRow};

pub const SAMPLE_CSV_VERSION: &str = "# zn-gauge sample-csv v1";
pub const CENSUS_CSV_VERSION: &str = "# zn-gauge census-csv v1";
pub const ORACLE_CSV_VERSION: &str = "# zn-gauge oracle-csv v1";

/// Build identifier written into JSON reports.
pub fn build_id() -> String {
    format!("{} ({})", env!("CARGO_PKG_VERSION"), env!("ZN_GAUGE_GIT_DESCRIBE"))
}

/// Decimal with 17 significant digits.
pub fn fmt_float(x: f64) -> String {
    format!("{x:.16e}")
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum LoopSpec {
    Rectangle { plane: [usize; 2], r: i32, t: i32, corner: Vec<i32> },
    Edges { edges: Vec<(Vec<i32>, usize, i64)> },
}

impl LoopSpec {
    pub fn build(&self) -> Result<GeneralizedLoop> {
        match self {
            LoopSpec::Rectangle { plane, r, t, corner } => {
                GeneralizedLoop::rectangle(corner, plane[0], plane[1], *r, *t)
            }
            LoopSpec::Edges { edges } => {
                let dim = edges.first().map_or(0, |e| e.0.len());
                let mut q = Chain::zero(Lattice::Primal, dim, 1);
                for (base, axis, c) in edges {
                    if base.len() != dim || *axis >= dim {
                        return Err(Error::Config(format!("bad edge {base:?} axis {axis}")));
                    }
                    q.add(Cell::new(Lattice::Primal, base, 1 << axis), *c);
                }
                GeneralizedLoop::new(q)
            }
        }
    }

    pub fn label(&self) -> String {
        match self {
            LoopSpec::Rectangle { plane, r, t, .. } => format!("rect{}{}_{r}x{t}", plane[0], plane[1]),
            LoopSpec::Edges { edges } => format!("edges{}", edges.len()),
        }
    }
}

fn parse_point(s: &str, line: usize) -> Result<Vec<i32>> {
    s.split(',')
        .map(|x| x.trim().parse::<i32>().map_err(|e| Error::Parse { line, msg: format!("bad coordinate {x:?}: {e}") }))
        .collect()
}

fn parse_num<T: std::str::FromStr>(s: &str, what: &str, line: usize) -> Result<T> {
    s.parse().map_err(|_| Error::Parse { line, msg: format!("bad {what} {s:?}") })
}

/// Parses a loop description file into a loop (the sum of its items).
pub fn parse_loop_file(text: &str) -> Result<GeneralizedLoop> {
    let mut q: Option<Chain> = None;
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let body = raw.split('#').next().unwrap().trim();
        if body.is_empty() {
            continue;
        }
        let words: Vec<&str> = body.split_whitespace().collect();
        let part = if words[0] == "rect" {
            if words.len() != 5 {
                return Err(Error::Parse { line, msg: "expected: rect i,j R T corner".into() });
            }
            let plane = parse_point(words[1], line)?;
            if plane.len() != 2 || plane[0] < 0 || plane[1] < 0 {
                return Err(Error::Parse { line, msg: "plane needs two axes".into() });
            }
            let corner = parse_point(words[4], line)?;
            GeneralizedLoop::rectangle(
                &corner,
                plane[0] as usize,
                plane[1] as usize,
                parse_num(words[2], "R", line)?,
                parse_num(words[3], "T", line)?,
            )
            .map_err(|e| Error::Parse { line, msg: e.to_string() })?
            .chain()
            .clone()
        } else {
            if words.len() != 3 {
                return Err(Error::Parse { line, msg: "expected: base axis coefficient".into() });
            }
            let base = parse_point(words[0], line)?;
            let axis: usize = parse_num(words[1], "axis", line)?;
            let c: i64 = parse_num(words[2], "coefficient", line)?;
            if axis >= base.len() {
                return Err(Error::Parse { line, msg: format!("axis {axis} out of range") });
            }
            Chain::from_cells(
                Lattice::Primal,
                base.len(),
                1,
                [(crate::lattice::OrientedCell::positive(Cell::new(Lattice::Primal, &base, 1 << axis)), c)],
            )
        };
        q = Some(match q {
            None => part,
            Some(acc) if acc.dim() == part.dim() => acc.plus(&part),
            Some(_) => return Err(Error::Parse { line, msg: "dimension mismatch".into() }),
        });
    }
    let q = q.ok_or_else(|| Error::Parse { line: 0, msg: "empty loop file".into() })?;
    GeneralizedLoop::new(q)
}

/// Simulation manifest.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunManifest {
    pub n: u32,
    #[serde(default = "default_m_rep")]
    pub m_rep: u32,
    pub dim: usize,
    /// half-width: the box is `[-N, N]^dim`
    #[serde(rename = "N")]
    pub half_width: i32,
    pub betas: Vec<f64>,
    #[serde(default)]
    pub beta0: Option<f64>,
    pub loops: Vec<LoopSpec>,
    pub seed: u64,
    pub thermalization: usize,
    pub measurements: usize,
    #[serde(default = "default_stride")]
    pub stride: usize,
    #[serde(default)]
    pub schedule: Schedule,
}

fn default_m_rep() -> u32 {
    1
}

fn default_stride() -> usize {
    1
}

impl RunManifest {
    pub fn from_json(text: &str) -> Result<RunManifest> {
        let m: RunManifest =
            serde_json::from_str(text).map_err(|e| Error::Parse { line: e.line(), msg: e.to_string() })?;
        m.validate()?;
        Ok(m)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("manifest serializes")
    }

    pub fn validate(&self) -> Result<()> {
        if self.dim < 2 || self.dim > crate::lattice::MAX_DIM {
            return Err(Error::Config(format!("dim = {} outside 2..=6", self.dim)));
        }
        if self.half_width < 1 {
            return Err(Error::Config("N must be at least 1".into()));
        }
        if self.betas.is_empty() || self.betas.iter().any(|b| !(*b >= 0.0)) {
            return Err(Error::Config("betas must be a nonempty list of nonnegative numbers".into()));
        }
        self.sampler_config(0).validate()?;
        for l in &self.loops {
            let g = l.build()?;
            if g.dim() != self.dim {
                return Err(Error::Config(format!("loop {} has dimension {}", l.label(), g.dim())));
            }
            if g.edges().any(|(e, _)| !self.bx().contains_cell(e)) {
                return Err(Error::Config(format!("loop {} leaves the box", l.label())));
            }
        }
        Ok(())
    }

    pub fn bx(&self) -> LatticeBox {
        LatticeBox::centered(self.dim, self.half_width).expect("validated")
    }

    /// Sampler settings for the `index`-th β; each β gets its own stream.
    pub fn sampler_config(&self, index: usize) -> SamplerConfig {
        SamplerConfig {
            seed: self.seed.wrapping_add(index as u64),
            thermalization: self.thermalization,
            measurements: self.measurements,
            stride: self.stride,
            schedule: self.schedule,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SampleRow {
    pub beta: f64,
    pub loop_label: String,
    pub sweep: usize,
    pub re_w: f64,
    pub im_w: f64,
    pub action: f64,
    pub n_components: usize,
    pub n_minimal: usize,
}

fn csv_err(e: csv::Error) -> Error {
    Error::Io(e.to_string())
}

pub fn write_samples<W: Write>(out: &mut W, rows: &[SampleRow]) -> Result<()> {
    writeln!(out, "{SAMPLE_CSV_VERSION}")?;
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["beta", "loop", "sweep", "re_w", "im_w", "action", "n_components", "n_minimal"]).map_err(csv_err)?;
    for r in rows {
        w.write_record([
            fmt_float(r.beta),
            r.loop_label.clone(),
            r.sweep.to_string(),
            fmt_float(r.re_w),
            fmt_float(r.im_w),
            fmt_float(r.action),
            r.n_components.to_string(),
            r.n_minimal.to_string(),
        ])
        .map_err(csv_err)?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_samples(text: &str) -> Result<Vec<SampleRow>> {
    let body = text.strip_prefix(SAMPLE_CSV_VERSION).ok_or_else(|| Error::Parse {
        line: 1,
        msg: format!("missing header {SAMPLE_CSV_VERSION:?}"),
    })?;
    let mut r = csv::Reader::from_reader(body.trim_start_matches(['\r', '\n']).as_bytes());
    let mut rows = Vec::new();
    for (i, rec) in r.records().enumerate() {
        let line = i + 3;
        let rec = rec.map_err(|e| Error::Parse { line, msg: e.to_string() })?;
        if rec.len() != 8 {
            return Err(Error::Parse { line, msg: format!("expected 8 fields, found {}", rec.len()) });
        }
        rows.push(SampleRow {
            beta: parse_num(&rec[0], "beta", line)?,
            loop_label: rec[1].to_string(),
            sweep: parse_num(&rec[2], "sweep", line)?,
            re_w: parse_num(&rec[3], "re_w", line)?,
            im_w: parse_num(&rec[4], "im_w", line)?,
            action: parse_num(&rec[5], "action", line)?,
            n_components: parse_num(&rec[6], "n_components", line)?,
            n_minimal: parse_num(&rec[7], "n_minimal", line)?,
        });
    }
    Ok(rows)
}

pub fn write_census<W: Write>(out: &mut W, rows: &[(f64, CensusRow)]) -> Result<()> {
    writeln!(out, "{CENSUS_CSV_VERSION}")?;
    let mut w = csv::Writer::from_writer(out);
    w.write_record([
        "beta",
        "sample",
        "components",
        "interior_components",
        "minimal",
        "minimal_on_loop",
        "minimal_off_loop",
        "sizes",
    ])
    .map_err(csv_err)?;
    for (beta, r) in rows {
        let sizes: Vec<String> = r.sizes.iter().map(|(s, c)| format!("{s}:{c}")).collect();
        w.write_record([
            fmt_float(*beta),
            r.sample.to_string(),
            r.components.to_string(),
            r.interior_components.to_string(),
            r.minimal.to_string(),
            r.minimal_on_loop.to_string(),
            r.minimal_off_loop.to_string(),
            sizes.join(";"),
        ])
        .map_err(csv_err)?;
    }
    w.flush()?;
    Ok(())
}

/// Runs every β of the manifest and returns one row per recorded sweep and
/// loop (a single row labelled `-` when the manifest has no loops).
pub fn simulate(m: &RunManifest) -> Result<Vec<SampleRow>> {
    m.validate()?;
    let rep = Representation::new(m.n, m.m_rep)?;
    let geom = Geometry::new(&m.bx())?;
    let loops: Vec<GeneralizedLoop> = m.loops.iter().map(|l| l.build()).collect::<Result<_>>()?;
    let labels: Vec<String> = m.loops.iter().map(|l| l.label()).collect();
    let mut rows = Vec::new();
    for (bi, &beta) in m.betas.iter().enumerate() {
        let mut err = None;
        run_chain(&m.sampler_config(bi), &geom, &rep, beta, &mut [], |t, s| {
            let sweep = m.thermalization + (t + 1) * m.stride;
            let action = s.action(&rep);
            let (row, _) = match census(t, &s.plaquette_field(), loops.first(), &m.bx()) {
                Ok(r) => r,
                Err(e) => {
                    err.get_or_insert(e);
                    return;
                }
            };
            let base = SampleRow {
                beta,
                loop_label: "-".into(),
                sweep,
                re_w: 0.0,
                im_w: 0.0,
                action,
                n_components: row.components,
                n_minimal: row.minimal,
            };
            if loops.is_empty() {
                rows.push(base.clone());
            }
            for (g, label) in loops.iter().zip(&labels) {
                match s.wilson_loop(&rep, g) {
                    Ok(w) => rows.push(SampleRow { loop_label: label.clone(), re_w: w.re, im_w: w.im, ..base.clone() }),
                    Err(e) => {
                        err.get_or_insert(e);
                    }
                }
            }
        })?;
        if let Some(e) = err {
            return Err(e);
        }
    }
    Ok(rows)
}

/// Vortex census of every recorded configuration of the manifest run; the
/// first loop, if any, decides which minimal vortices count as on the loop.
pub fn simulate_census(m: &RunManifest) -> Result<Vec<(f64, CensusRow)>> {
    m.validate()?;
    let rep = Representation::new(m.n, m.m_rep)?;
    let geom = Geometry::new(&m.bx())?;
    let gamma = m.loops.first().map(|l| l.build()).transpose()?;
    let mut rows = Vec::new();
    for (bi, &beta) in m.betas.iter().enumerate() {
        let mut err = None;
        run_chain(&m.sampler_config(bi), &geom, &rep, beta, &mut [], |t, s| {
            match census(t, &s.plaquette_field(), gamma.as_ref(), &m.bx()) {
                Ok((row, _)) => rows.push((beta, row)),
                Err(e) => {
                    err.get_or_insert(e);
                }
            }
        })?;
        if let Some(e) = err {
            return Err(e);
        }
    }
    Ok(rows)
}

fn default_true() -> bool {
    true
}

/// Exact-oracle request: a box, a model and the observables to evaluate.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OracleRequest {
    pub n: u32,
    #[serde(default = "default_m_rep")]
    pub m_rep: u32,
    pub lower: Vec<i32>,
    pub upper: Vec<i32>,
    pub betas: Vec<f64>,
    #[serde(default)]
    pub loops: Vec<LoopSpec>,
    #[serde(default)]
    pub action: bool,
    #[serde(default = "default_true")]
    pub gauge_fix: bool,
}

#[derive(Clone, Debug, PartialEq)]
pub struct OracleRow {
    pub beta: f64,
    pub observable: String,
    pub re: f64,
    pub im: f64,
}

impl OracleRequest {
    pub fn from_json(text: &str) -> Result<OracleRequest> {
        serde_json::from_str(text).map_err(|e| Error::Parse { line: e.line(), msg: e.to_string() })
    }

    pub fn run(&self) -> Result<Vec<OracleRow>> {
        let bx = LatticeBox::new(self.lower.clone(), self.upper.clone())?;
        let rep = Representation::new(self.n, self.m_rep)?;
        let mut names = Vec::new();
        let mut obs = Vec::new();
        for l in &self.loops {
            names.push(l.label());
            obs.push(OracleObservable::Wilson(l.build()?));
        }
        if self.action {
            names.push("action".into());
            obs.push(OracleObservable::Action);
        }
        let mut rows = Vec::new();
        for &beta in &self.betas {
            let spec = OracleSpec { gauge_fix: self.gauge_fix, ..OracleSpec::new(bx.clone(), rep.clone(), beta) };
            for (name, v) in names.iter().zip(exact_expectation(&spec, &obs)?) {
                rows.push(OracleRow { beta, observable: name.clone(), re: v.re, im: v.im });
            }
        }
        Ok(rows)
    }
}

pub fn write_oracle<W: Write>(out: &mut W, rows: &[OracleRow]) -> Result<()> {
    writeln!(out, "{ORACLE_CSV_VERSION}")?;
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["beta", "observable", "re", "im"]).map_err(csv_err)?;
    for r in rows {
        w.write_record([fmt_float(r.beta), r.observable.clone(), fmt_float(r.re), fmt_float(r.im)]).map_err(csv_err)?;
    }
    w.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn manifest() -> RunManifest {
        RunManifest {
            n: 2,
            m_rep: 1,
            dim: 3,
            half_width: 2,
            betas: vec![0.5],
            beta0: None,
            loops: vec![LoopSpec::Rectangle { plane: [0, 1], r: 2, t: 1, corner: vec![0, 0, 0] }],
            seed: 1,
            thermalization: 5,
            measurements: 30,
            stride: 1,
            schedule: Schedule::Colored,
        }
    }

    #[test]
    fn manifest_roundtrip_and_errors() {
        let m = manifest();
        assert_eq!(RunManifest::from_json(&m.to_json()).unwrap(), m);
        let broken = m.to_json().replace("\"seed\": 1", "\"seed\": -1");
        match RunManifest::from_json(&broken) {
            Err(Error::Parse { line, .. }) => assert!(line > 1),
            other => panic!("{other:?}"),
        }
        let mut far = m.clone();
        far.loops = vec![LoopSpec::Rectangle { plane: [0, 1], r: 5, t: 1, corner: vec![0, 0, 0] }];
        assert!(matches!(far.validate(), Err(Error::Config(_))));
    }

    #[test]
    fn loop_file_forms() {
        let text = "# unit square\n0,0 0 1\n1,0 1 1\n0,1 0 -1\n0,0 1 -1\n";
        let g = parse_loop_file(text).unwrap();
        assert_eq!(g, GeneralizedLoop::rectangle(&[0, 0], 0, 1, 1, 1).unwrap());
        let r = parse_loop_file("rect 0,2 3 2 1,1,1\n").unwrap();
        assert_eq!(r, GeneralizedLoop::rectangle(&[1, 1, 1], 0, 2, 3, 2).unwrap());
        assert!(matches!(parse_loop_file("0,0 0 1\n0,0 x 1\n"), Err(Error::Parse { line: 2, .. })));
        assert!(matches!(parse_loop_file("0,0 0 1\n"), Err(Error::Validation { .. })));
    }

    #[test]
    fn simulate_is_deterministic() {
        let a = simulate(&manifest()).unwrap();
        assert_eq!(a.len(), 30);
        assert_eq!(a, simulate(&manifest()).unwrap());
        assert!(a.iter().all(|r| r.re_w.abs() == 1.0 && r.sweep > 5));
        assert_eq!(simulate_census(&manifest()).unwrap().len(), 30);
    }

    #[test]
    fn oracle_request_single_plaquette() {
        let text = r#"{"n": 2, "lower": [0, 0], "upper": [1, 1], "betas": [0.3],
            "loops": [{"kind": "rectangle", "plane": [0, 1], "r": 1, "t": 1, "corner": [0, 0]}]}"#;
        let rows = OracleRequest::from_json(text).unwrap().run().unwrap();
        assert!((rows[0].re - 0.6f64.tanh()).abs() < 1e-12);
        let mut buf = Vec::new();
        write_oracle(&mut buf, &rows).unwrap();
        assert!(String::from_utf8(buf).unwrap().starts_with(ORACLE_CSV_VERSION));
    }

    #[test]
    fn sample_csv_roundtrip() {
        let rows = vec![SampleRow {
            beta: 0.1,
            loop_label: "rect01_2x1".into(),
            sweep: 3,
            re_w: -1.0 / 3.0,
            im_w: 0.0,
            action: -12.0,
            n_components: 1,
            n_minimal: 0,
        }];
        let mut buf = Vec::new();
        write_samples(&mut buf, &rows).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(text.starts_with(SAMPLE_CSV_VERSION));
        assert_eq!(read_samples(&text).unwrap(), rows);
    }
}

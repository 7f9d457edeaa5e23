use crate::config::{Command, RunConfig};
use magspec::bounds::{reports_csv, scan_with, BoundReport, Registry, ScanRow, Study};
use magspec::fem::{BoundaryCondition, Source, VectorPotential};
use magspec::geometry::{self, DomainSpec};
use magspec::mesh::{io as mesh_io, triangulate};
use magspec::spectrum::{curve_csv, eigenvalue_curve_on, fmt12, SpectrumOptions};
use magspec::{radial, torsion, Error};
use serde_json::{json, Value};
use std::fmt::Write as _;
use std::path::PathBuf;
use std::sync::Arc;

pub enum Failure {
    Config(String),
    Solver(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::InvalidDomain(_) | Error::InvalidInput(_) | Error::Parse(_) => Failure::Config(e.to_string()),
            other => Failure::Solver(other.to_string()),
        }
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::Solver(format!("writing artifacts: {e}"))
    }
}

/// Stamps and writes artifacts: to files under the output directory, or the
/// primary artifact to stdout when there is none.
pub struct Artifacts {
    hash: String,
    timestamp: Option<u64>,
    dir: Option<PathBuf>,
}

impl Artifacts {
    pub fn new(cfg: &RunConfig, timestamp: bool) -> Self {
        let timestamp = timestamp.then(|| {
            std::time::SystemTime::now().duration_since(std::time::UNIX_EPOCH).map(|d| d.as_secs()).unwrap_or(0)
        });
        Self { hash: cfg.hash(), timestamp, dir: cfg.output.clone() }
    }

    fn versions() -> String {
        format!("magspec-core {}, magspec-cli {}", magspec::VERSION, env!("CARGO_PKG_VERSION"))
    }

    fn csv_header(&self) -> String {
        let mut s = format!("# {}\n# config sha256 {}\n", Self::versions(), self.hash);
        if let Some(t) = self.timestamp {
            let _ = writeln!(s, "# generated unix {t}");
        }
        s
    }

    fn meta(&self) -> Value {
        let mut m = json!({ "config_sha256": self.hash, "versions": Self::versions() });
        if let Some(t) = self.timestamp {
            m["generated_unix"] = json!(t);
        }
        m
    }

    fn emit(&self, name: &str, text: &str) -> Result<(), Failure> {
        match &self.dir {
            Some(d) => {
                std::fs::create_dir_all(d)?;
                std::fs::write(d.join(name), text)?;
            }
            None => print!("{text}"),
        }
        Ok(())
    }

    pub fn csv(&self, name: &str, body: &str) -> Result<(), Failure> {
        self.emit(name, &(self.csv_header() + body))
    }

    pub fn json(&self, name: &str, data: Value) -> Result<(), Failure> {
        let v = json!({ "meta": self.meta(), "data": data });
        self.emit(name, &(serde_json::to_string_pretty(&v).expect("json") + "\n"))
    }

    /// Secondary artifacts are only written to the output directory.
    pub fn side(&self, name: &str, text: &str) -> Result<(), Failure> {
        if self.dir.is_some() {
            self.emit(name, text)?;
        }
        Ok(())
    }

    /// One-line summaries go to stdout with an output directory, else stderr.
    pub fn say(&self, line: &str) {
        if self.dir.is_some() {
            println!("{line}");
        } else {
            eprintln!("{line}");
        }
    }
}

fn domain(cfg: &RunConfig) -> Result<DomainSpec, Failure> {
    cfg.load_domain().map_err(Failure::Config)
}

fn opts(cfg: &RunConfig) -> SpectrumOptions {
    SpectrumOptions { n: cfg.n, seed: cfg.seed, ..Default::default() }
}

pub fn run(cfg: &RunConfig, art: &Artifacts) -> Result<(), Failure> {
    match cfg.command {
        Command::Solve => solve(cfg, art),
        Command::Torsion => torsion_cmd(cfg, art),
        Command::Bounds => bounds(cfg, art),
        Command::Scan => scan(cfg, art),
        Command::Disc => disc(cfg, art),
        Command::Degennes => degennes(art),
        Command::MeshReport => mesh_report(cfg, art),
    }
}

fn solve(cfg: &RunConfig, art: &Artifacts) -> Result<(), Failure> {
    let d = domain(cfg)?;
    let fields = cfg.fields(0.0).map_err(Failure::Config)?;
    let mesh = Arc::new(triangulate(&d, cfg.mesh_h)?);
    let bc = cfg.bc_or(BoundaryCondition::Neumann);
    let rows = eigenvalue_curve_on(&mesh, &VectorPotential::Symmetric, &fields, bc, &opts(cfg))?;
    for r in &rows {
        art.say(&format!("B={} lambda_1={} residual={}", fmt12(r.b), fmt12(r.eigenvalues[0]), fmt12(r.residual_max)));
    }
    art.csv("solve.csv", &curve_csv(&rows))
}

fn torsion_cmd(cfg: &RunConfig, art: &Artifacts) -> Result<(), Failure> {
    let d = domain(cfg)?;
    if d.is_simply_connected() {
        let r = torsion::torsion_solve(&d, &Source::Constant(1.0), cfg.mesh_h)?;
        art.say(&format!("S={} psi_min={} formula_gap={}", fmt12(r.s_omega), fmt12(r.psi_min), fmt12(r.formula_gap)));
        art.json("torsion.json", r.to_json(false))
    } else {
        let hc = torsion::hole_calculus(&d, &Source::Constant(1.0), cfg.mesh_h)?;
        art.say(&format!("S0={} holes={}", fmt12(hc.s_base), hc.holes()));
        art.json("torsion.json", serde_json::to_value(&hc).expect("json"))
    }
}

fn bounds(cfg: &RunConfig, art: &Artifacts) -> Result<(), Failure> {
    let reg = Registry::standard();
    for c in &cfg.checks {
        if reg.get(c).is_none() {
            return Err(Failure::Config(format!("key 'checks': unknown check '{c}'; known: {}", reg.names().join(", "))));
        }
    }
    let d = domain(cfg)?;
    let fields = cfg.fields(1.0).map_err(Failure::Config)?;
    let study = Study::with_options(d, cfg.mesh_h, SpectrumOptions { n: cfg.n.max(2), ..opts(cfg) })?;
    let names: Vec<&str> = cfg.checks.iter().map(String::as_str).collect();
    let reports: Vec<BoundReport> = reg.run(&study, &fields, &names)?;
    for r in &reports {
        let b = r.context.b.map(|b| format!(" B={}", fmt12(b))).unwrap_or_default();
        art.say(&format!("{}{b}: {} (slack {}, tolerance {})", r.name, r.verdict, fmt12(r.slack), fmt12(r.tolerance)));
    }
    art.side("bounds.json", &(serde_json::to_string_pretty(&json!({ "meta": art.meta(), "data": reports })).expect("json") + "\n"))?;
    art.csv("bounds.csv", &reports_csv(&reports))
}

fn scan_row_csv(r: &ScanRow) -> String {
    format!(
        "{},{},{},{},{},{},{}\n",
        fmt12(r.b),
        fmt12(r.lambda_domain),
        fmt12(r.lambda_disc),
        r.m_star,
        fmt12(r.slack),
        fmt12(r.tolerance),
        r.verdict
    )
}

fn scan(cfg: &RunConfig, art: &Artifacts) -> Result<(), Failure> {
    let d = domain(cfg)?;
    let fields = cfg.fields(1.0).map_err(Failure::Config)?;
    let study = Study::with_options(d, cfg.mesh_h, SpectrumOptions { n: 2, ..opts(cfg) })?;
    let mut done: Vec<ScanRow> = Vec::new();
    let result = scan_with(&study, &fields, |_, r| {
        art.say(&format!("B={} domain={} disc={} slack={}", fmt12(r.b), fmt12(r.lambda_domain), fmt12(r.lambda_disc), fmt12(r.slack)));
        done.push(r.clone());
    });
    match result {
        Ok(s) => {
            let summary = format!(
                "{}: {} rows, {} violated, {} crossovers, relative discretization error {}",
                s.label,
                s.rows.len(),
                s.violations(),
                s.crossovers.len(),
                fmt12(s.relative_discretization_error)
            );
            art.say(&summary);
            art.side("scan.json", &(serde_json::to_string_pretty(&json!({ "meta": art.meta(), "data": s })).expect("json") + "\n"))?;
            art.side("MANIFEST", &format!("complete {} of {} rows\n", s.rows.len(), fields.len()))?;
            art.csv("scan.csv", &s.to_csv())
        }
        Err(e) => {
            let mut body = String::from("B,lambda_domain,lambda_disc,m_star,slack,tolerance,verdict\n");
            for r in &done {
                body.push_str(&scan_row_csv(r));
            }
            art.side("scan.partial.csv", &(art.csv_header() + &body))?;
            let mut m = format!("partial {} of {} rows (tolerances provisional)\nerror: {e}\n", done.len(), fields.len());
            for r in &done {
                let _ = writeln!(m, "done B={}", fmt12(r.b));
            }
            art.side("MANIFEST", &m)?;
            Err(e.into())
        }
    }
}

fn disc(cfg: &RunConfig, art: &Artifacts) -> Result<(), Failure> {
    let r = cfg.radius.unwrap_or(1.0);
    let bc = cfg.bc_or(BoundaryCondition::Neumann);
    let mut body = String::from("B,k,lambda,m\n");
    for b in cfg.fields(0.0).map_err(Failure::Config)? {
        let spec = radial::disc_spectrum(r, b, bc, cfg.n)?;
        art.say(&format!("B={} lambda_1={} m={}", fmt12(b), fmt12(spec[0].0), spec[0].1));
        for (k, (l, m)) in spec.iter().enumerate() {
            let _ = writeln!(body, "{},{},{},{}", fmt12(b), k + 1, fmt12(*l), m);
        }
    }
    art.csv("disc.csv", &body)
}

fn degennes(art: &Artifacts) -> Result<(), Failure> {
    let d = radial::de_gennes();
    art.say(&format!("theta0={} xi_star={} c1_estimate={}", fmt12(d.theta0), fmt12(d.xi_star), fmt12(d.c1_estimate)));
    art.json("degennes.json", serde_json::to_value(d).expect("json"))
}

fn mesh_report(cfg: &RunConfig, art: &Artifacts) -> Result<(), Failure> {
    let d = domain(cfg)?;
    let mesh = triangulate(&d, cfg.mesh_h)?;
    let q = mesh.quality();
    let g = geometry::summarize(&d, 1024)?;
    art.say(&format!("vertices={} triangles={} h_max={} min_angle={}", q.vertex_count, q.triangle_count, fmt12(q.h_max), fmt12(q.min_angle)));
    art.side("mesh.txt", &mesh_io::to_string(&mesh))?;
    let v = json!({ "domain": d.label, "quality": q, "boundary_deviation": mesh.boundary_deviation(), "geometry": g });
    art.json("mesh-report.json", v)
}

use magspec::bounds::field_grid;
use magspec::fem::BoundaryCondition;
use magspec::geometry::{file, presets, DomainSpec};
use serde::{Deserialize, Serialize};
use std::path::PathBuf;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    Solve,
    Torsion,
    Bounds,
    Scan,
    Disc,
    Degennes,
    MeshReport,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::Solve => "solve",
            Command::Torsion => "torsion",
            Command::Bounds => "bounds",
            Command::Scan => "scan",
            Command::Disc => "disc",
            Command::Degennes => "degennes",
            Command::MeshReport => "mesh-report",
        }
    }
}

/// Field values: a single B or `start:stop:count[:linear|log]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "GridRepr")]
pub struct Grid {
    pub start: f64,
    pub stop: f64,
    pub count: usize,
    #[serde(default)]
    pub log: bool,
}

/// A grid in a config file: either the command-line string or a table.
#[derive(Deserialize)]
#[serde(untagged)]
enum GridRepr {
    Text(String),
    Table(GridTable),
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct GridTable {
    start: f64,
    stop: f64,
    count: usize,
    #[serde(default = "default_log")]
    log: bool,
}

fn default_log() -> bool {
    true
}

impl TryFrom<GridRepr> for Grid {
    type Error = String;
    fn try_from(r: GridRepr) -> Result<Self, String> {
        match r {
            GridRepr::Text(s) => Grid::parse(&s),
            GridRepr::Table(t) => Ok(Grid { start: t.start, stop: t.stop, count: t.count, log: t.log }),
        }
    }
}

impl Grid {
    pub fn parse(s: &str) -> Result<Self, String> {
        let parts: Vec<&str> = s.split(':').collect();
        if !(3..=4).contains(&parts.len()) {
            return Err(format!("B-grid '{s}' must be start:stop:count[:linear|log]"));
        }
        let num = |i: usize, what: &str| parts[i].trim().parse::<f64>().map_err(|_| format!("B-grid {what} '{}' is not a number", parts[i]));
        let count = parts[2].trim().parse::<usize>().map_err(|_| format!("B-grid count '{}' is not a non-negative integer", parts[2]))?;
        let log = match parts.get(3).map(|s| s.trim()) {
            None | Some("log") => true,
            Some("linear") | Some("lin") => false,
            Some(o) => return Err(format!("B-grid spacing '{o}' must be linear or log")),
        };
        Ok(Self { start: num(0, "start")?, stop: num(1, "stop")?, count, log })
    }

    pub fn values(&self) -> Result<Vec<f64>, String> {
        field_grid(self.start, self.stop, self.count, self.log).map_err(|e| format!("key 'b_grid': {e}"))
    }
}

fn default_mesh_h() -> f64 {
    0.05
}
fn default_n() -> usize {
    1
}
fn default_seed() -> u64 {
    0x5eed
}

/// Everything a run depends on; its hash is stamped on every artifact.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub command: Command,
    #[serde(default)]
    pub domain: Option<PathBuf>,
    #[serde(default)]
    pub preset: Option<String>,
    #[serde(default)]
    pub b: Option<f64>,
    #[serde(default)]
    pub b_grid: Option<Grid>,
    #[serde(default = "default_mesh_h")]
    pub mesh_h: f64,
    #[serde(default = "default_n")]
    pub n: usize,
    #[serde(default)]
    pub bc: Option<BoundaryCondition>,
    #[serde(default)]
    pub radius: Option<f64>,
    #[serde(default)]
    pub checks: Vec<String>,
    #[serde(default = "default_seed")]
    pub seed: u64,
    /// Not part of the hash.
    #[serde(default, skip_serializing)]
    pub output: Option<PathBuf>,
}

impl RunConfig {
    pub fn from_toml(text: &str) -> Result<Self, String> {
        let c: Self = toml::from_str(text).map_err(|e| format!("invalid run config: {}", e.message()))?;
        c.validate()?;
        Ok(c)
    }

    pub fn validate(&self) -> Result<(), String> {
        if !(self.mesh_h > 0.0 && self.mesh_h.is_finite()) {
            return Err(format!("key 'mesh_h': must be positive, got {}", self.mesh_h));
        }
        if self.n == 0 {
            return Err("key 'n': at least one eigenvalue".into());
        }
        if let Some(g) = &self.b_grid {
            if g.count == 0 {
                return Err("key 'b_grid': count must be at least 1".into());
            }
            g.values()?;
        }
        if let Some(b) = self.b {
            if !b.is_finite() || b < 0.0 {
                return Err(format!("key 'b': must be finite and non-negative, got {b}"));
            }
        }
        if self.b.is_some() && self.b_grid.is_some() {
            return Err("keys 'b' and 'b_grid' are mutually exclusive".into());
        }
        if self.domain.is_some() && self.preset.is_some() {
            return Err("keys 'domain' and 'preset' are mutually exclusive".into());
        }
        if let Some(r) = self.radius {
            if r.is_nan() || r <= 0.0 {
                return Err(format!("key 'radius': must be positive, got {r}"));
            }
        }
        let needs_domain = matches!(self.command, Command::Solve | Command::Torsion | Command::Bounds | Command::Scan | Command::MeshReport);
        if needs_domain && self.domain.is_none() && self.preset.is_none() {
            return Err(format!("command '{}' needs key 'domain' or 'preset'", self.command.name()));
        }
        if self.command == Command::Scan && self.b_grid.is_none() {
            return Err("command 'scan' needs key 'b_grid'".into());
        }
        Ok(())
    }

    pub fn load_domain(&self) -> Result<DomainSpec, String> {
        match (&self.domain, &self.preset) {
            (Some(p), _) => file::load(p).map_err(|e| format!("key 'domain' ({}): {e}", p.display())),
            (None, Some(s)) => presets::parse(s).map_err(|e| format!("key 'preset': {e}")),
            _ => Err("no domain given".into()),
        }
    }

    /// Field values; a lone B, a grid, or the fallback.
    pub fn fields(&self, fallback: f64) -> Result<Vec<f64>, String> {
        match (&self.b, &self.b_grid) {
            (_, Some(g)) => g.values(),
            (Some(b), None) => Ok(vec![*b]),
            (None, None) => Ok(vec![fallback]),
        }
    }

    pub fn bc_or(&self, d: BoundaryCondition) -> BoundaryCondition {
        self.bc.unwrap_or(d)
    }

    /// SHA-256 of the canonical JSON form (output location excluded).
    pub fn hash(&self) -> String {
        use sha2::{Digest, Sha256};
        let json = serde_json::to_string(self).expect("config serializes");
        let d = Sha256::digest(json.as_bytes());
        d.iter().map(|b| format!("{b:02x}")).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_forms() {
        let g = Grid::parse("0.1:60:40").unwrap();
        assert!(g.log && g.count == 40);
        assert!(!Grid::parse("0:1:3:linear").unwrap().log);
        assert!(Grid::parse("0:1").is_err());
        assert!(Grid::parse("0:1:x").unwrap_err().contains("count"));
        assert!(Grid::parse("0:1:3:cubic").is_err());
        let c = RunConfig::from_toml("command = \"scan\"\npreset = \"disc\"\nb_grid = \"1:50:3:linear\"\n").unwrap();
        assert_eq!(c.b_grid, Some(Grid { start: 1.0, stop: 50.0, count: 3, log: false }));
        let c = RunConfig::from_toml("command = \"scan\"\npreset = \"disc\"\nb_grid = { start = 1.0, stop = 50.0, count = 3 }\n").unwrap();
        assert!(c.b_grid.unwrap().log);
    }

    #[test]
    fn unknown_key_is_named() {
        let e = RunConfig::from_toml("command = \"solve\"\npreset = \"disc\"\nmesh = 0.1\n").unwrap_err();
        assert!(e.contains("mesh"), "{e}");
    }

    #[test]
    fn bad_values_name_their_key() {
        let e = RunConfig::from_toml("command = \"solve\"\npreset = \"disc\"\nmesh_h = -1.0\n").unwrap_err();
        assert!(e.contains("mesh_h"));
        let e = RunConfig::from_toml("command = \"scan\"\npreset = \"disc\"\n").unwrap_err();
        assert!(e.contains("b_grid"));
    }

    #[test]
    fn hash_ignores_output() {
        let mut a = RunConfig::from_toml("command = \"degennes\"\n").unwrap();
        let h = a.hash();
        a.output = Some("x".into());
        assert_eq!(a.hash(), h);
        a.seed = 1;
        assert_ne!(a.hash(), h);
    }
}

//! TOML run configuration with line-numbered errors.
//!
//! ```toml
//! [domain]
//! a = -1.0
//! b = 1.0
//! l0 = 0.0
//!
//! [[material]]
//! side = "minus"          # or "plus"
//! entry = "q11"           # q11, q22 or q12
//! pieces = [{ from = -1.0, to = 1.0, coeffs = [1.0, 0.0, 0.25] }]
//! # or: constant = 2.0, or: coeffs = [...] over the whole domain
//!
//! [boundary]
//! w_b = [1, 0, 0, 0, 0, 1, 0, 0]   # or: preset = "dissipative"
//! r = 0.0
//!
//! [interface]
//! path = [[0.0, -0.1, 0.0], [1.0, 0.1, 0.0]]   # (t, l, dl/dt) breakpoints
//!
//! [run]
//! n_minus = 32
//! dt = 1e-3
//! seed = 42
//! ```
//!
//! Sections are read on demand, so a subcommand only validates what it uses.
//! Unknown sections and keys are always rejected.

use std::collections::HashMap;
use std::fmt;

use toml::{Table, Value};

use crate::counterexample::{CounterexampleSpec, Family};
use crate::model::{CoefficientProfile, DomainSpec, InterfacePath, MaterialPair, PathNode, Piece, Polynomial, SideProfiles};
use crate::ports::BoundarySpec;
use crate::simulate::{Scheme, SimulationConfig};

/// One located problem.
#[derive(Debug, Clone, PartialEq)]
pub struct ConfigError {
    pub location: String,
    pub message: String,
}

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.location, self.message)
    }
}

/// All problems found while reading a section.
#[derive(Debug, Clone, PartialEq)]
pub struct ConfigErrors(pub Vec<ConfigError>);

impl fmt::Display for ConfigErrors {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, e) in self.0.iter().enumerate() {
            if i > 0 {
                writeln!(f)?;
            }
            write!(f, "{e}")?;
        }
        Ok(())
    }
}

impl std::error::Error for ConfigErrors {}

impl From<ConfigError> for ConfigErrors {
    fn from(e: ConfigError) -> Self {
        ConfigErrors(vec![e])
    }
}

type Res<T> = std::result::Result<T, ConfigErrors>;

const SECTIONS: &[(&str, &[&str])] = &[
    ("domain", &["a", "b", "l0"]),
    ("material", &["side", "entry", "pieces", "constant", "coeffs"]),
    ("boundary", &["w_b", "preset", "r"]),
    ("interface", &["path", "margin"]),
    (
        "run",
        &["n_minus", "n_plus", "dt", "horizon", "scheme", "seed", "cadence", "modes", "max_shift", "audit_levels"],
    ),
    (
        "stability",
        &[
            "nsamples",
            "n_per_panel",
            "npos",
            "lambdas",
            "kato_cells",
            "kato_sequences",
            "kato_length",
            "s_max",
            "s_points",
            "rel_tol",
            "rayleigh_samples",
            "norm_samples",
        ],
    ),
    ("counterexample", &["eps", "xi1", "xi2", "sigma", "ks", "family", "nquad"]),
];

/// Parsed configuration file plus `--set` overrides.
#[derive(Debug, Clone)]
pub struct Config {
    name: String,
    table: Table,
    lines: HashMap<(String, usize, String), usize>,
    headers: HashMap<(String, usize), usize>,
    overridden: Vec<(String, String)>,
}

/// Settings of the `run` section.
#[derive(Debug, Clone, PartialEq)]
pub struct RunSettings {
    pub n_minus: usize,
    pub n_plus: usize,
    pub dt: f64,
    pub horizon: f64,
    pub scheme: Scheme,
    pub seed: u64,
    pub cadence: usize,
    pub modes: usize,
    pub max_shift: f64,
    pub audit_levels: usize,
}

/// Settings of the `stability` section.
#[derive(Debug, Clone, PartialEq)]
pub struct StabilitySettings {
    /// Pencil samples per side for ω.
    pub nsamples: usize,
    pub n_per_panel: usize,
    pub npos: usize,
    /// λ − ω values for the resolvent checks.
    pub lambdas: Vec<f64>,
    pub kato_cells: usize,
    pub kato_sequences: usize,
    pub kato_length: usize,
    pub s_max: f64,
    pub s_points: usize,
    pub rel_tol: f64,
    pub rayleigh_samples: usize,
    pub norm_samples: usize,
}

fn line_of_key(raw: &str) -> Option<String> {
    let (k, _) = raw.split_once('=')?;
    let k = k.trim().trim_matches('"');
    (!k.is_empty() && k.chars().all(|c| c.is_ascii_alphanumeric() || c == '_' || c == '-')).then(|| k.to_string())
}

impl Config {
    /// Parses TOML text. `name` labels error locations.
    pub fn parse(name: &str, text: &str) -> Res<Self> {
        let table: Table = text.parse().map_err(|e: toml::de::Error| {
            let line = e.span().map(|s| text[..s.start].matches('\n').count() + 1);
            ConfigError {
                location: line.map_or_else(|| name.to_string(), |l| format!("{name}:{l}")),
                message: e.message().to_string(),
            }
        })?;
        let mut lines = HashMap::new();
        let mut headers = HashMap::new();
        let mut counts: HashMap<String, usize> = HashMap::new();
        let (mut section, mut index) = (String::new(), 0usize);
        for (i, raw) in text.lines().enumerate() {
            let t = raw.trim();
            if let Some(h) = t.strip_prefix("[[").and_then(|s| s.split("]]").next()) {
                section = h.trim().to_string();
                let c = counts.entry(section.clone()).or_insert(0);
                index = *c;
                *c += 1;
                headers.insert((section.clone(), index), i + 1);
            } else if let Some(h) = t.strip_prefix('[').and_then(|s| s.split(']').next()) {
                section = h.trim().to_string();
                index = 0;
                headers.insert((section.clone(), 0), i + 1);
            } else if let Some(k) = line_of_key(t) {
                lines.entry((section.clone(), index, k)).or_insert(i + 1);
            }
        }
        let cfg = Self { name: name.to_string(), table, lines, headers, overridden: Vec::new() };
        cfg.check_keys()?;
        Ok(cfg)
    }

    pub fn from_file(path: &std::path::Path) -> Res<Self> {
        let name = path.display().to_string();
        let text = std::fs::read_to_string(path)
            .map_err(|e| ConfigError { location: name.clone(), message: format!("cannot read config: {e}") })?;
        Self::parse(&name, &text)
    }

    /// Applies `section.key=value`. The value is read as TOML and falls back
    /// to a bare string.
    pub fn apply_override(&mut self, spec: &str) -> Res<()> {
        let err = |m: String| ConfigError { location: format!("--set {spec}"), message: m };
        let (path, raw) = spec.split_once('=').ok_or_else(|| err("expected section.key=value".into()))?;
        let (section, key) = path.trim().split_once('.').ok_or_else(|| err("expected section.key=value".into()))?;
        let allowed = SECTIONS.iter().find(|(s, _)| *s == section).ok_or_else(|| err(format!("unknown section [{section}]")))?;
        if section == "material" {
            return Err(err("material entries cannot be overridden".into()).into());
        }
        if !allowed.1.contains(&key) {
            return Err(err(format!("unknown key {key:?} in [{section}]")).into());
        }
        let value = format!("v = {}", raw.trim())
            .parse::<Table>()
            .ok()
            .and_then(|mut t| t.remove("v"))
            .unwrap_or_else(|| Value::String(raw.trim().to_string()));
        let sec = self.table.entry(section.to_string()).or_insert_with(|| Value::Table(Table::new()));
        let Value::Table(sec) = sec else {
            return Err(err(format!("[{section}] is not a table")).into());
        };
        sec.insert(key.to_string(), value);
        self.overridden.push((format!("{section}.{key}"), spec.to_string()));
        Ok(())
    }

    fn location(&self, section: &str, index: usize, key: Option<&str>) -> String {
        if let Some(k) = key {
            let full = format!("{section}.{k}");
            if let Some((_, spec)) = self.overridden.iter().rev().find(|(p, _)| *p == full) {
                return format!("--set {spec}");
            }
            if let Some(l) = self.lines.get(&(section.to_string(), index, k.to_string())) {
                return format!("{}:{l}: {full}", self.name);
            }
        }
        match self.headers.get(&(section.to_string(), index)) {
            Some(l) => format!("{}:{l}: [{section}]{}", self.name, key.map(|k| format!(" {k}")).unwrap_or_default()),
            None => format!("{}: [{section}]{}", self.name, key.map(|k| format!(" {k}")).unwrap_or_default()),
        }
    }

    fn error(&self, section: &str, index: usize, key: Option<&str>, message: impl Into<String>) -> ConfigError {
        ConfigError { location: self.location(section, index, key), message: message.into() }
    }

    fn check_keys(&self) -> Res<()> {
        let mut errs = Vec::new();
        for (name, value) in &self.table {
            let Some((_, keys)) = SECTIONS.iter().find(|(s, _)| s == name) else {
                errs.push(self.error(name, 0, None, format!("unknown section [{name}]")));
                continue;
            };
            let tables: Vec<&Table> = match value {
                Value::Table(t) if *name != "material" => vec![t],
                Value::Array(a) if *name == "material" => a.iter().filter_map(|v| v.as_table()).collect(),
                _ => {
                    let shape = if *name == "material" { "an array of tables [[material]]" } else { "a table" };
                    errs.push(self.error(name, 0, None, format!("[{name}] must be {shape}")));
                    continue;
                }
            };
            for (i, t) in tables.iter().enumerate() {
                for k in t.keys() {
                    if !keys.contains(&k.as_str()) {
                        errs.push(self.error(name, i, Some(k), format!("unknown key {k:?}; allowed: {}", keys.join(", "))));
                    }
                }
            }
        }
        if errs.is_empty() {
            Ok(())
        } else {
            Err(ConfigErrors(errs))
        }
    }

    fn section(&self, name: &str) -> Option<&Table> {
        self.table.get(name).and_then(|v| v.as_table())
    }

    fn require(&self, name: &str) -> Res<&Table> {
        self.section(name)
            .ok_or_else(|| ConfigError { location: self.name.clone(), message: format!("missing section [{name}]") }.into())
    }

    fn num(&self, sec: &str, i: usize, t: &Table, key: &str) -> Result<Option<f64>, ConfigError> {
        match t.get(key) {
            None => Ok(None),
            Some(v) => as_f64(v).map(Some).ok_or_else(|| self.error(sec, i, Some(key), format!("expected a number, got {v}"))),
        }
    }

    fn num_or(&self, sec: &str, t: &Table, key: &str, default: f64, errs: &mut Vec<ConfigError>) -> f64 {
        match self.num(sec, 0, t, key) {
            Ok(v) => v.unwrap_or(default),
            Err(e) => {
                errs.push(e);
                default
            }
        }
    }

    fn count_or(&self, sec: &str, t: &Table, key: &str, default: usize, errs: &mut Vec<ConfigError>) -> usize {
        match t.get(key) {
            None => default,
            Some(Value::Integer(v)) if *v >= 0 => *v as usize,
            Some(v) => {
                errs.push(self.error(sec, 0, Some(key), format!("expected a nonnegative integer, got {v}")));
                default
            }
        }
    }

    fn text_or(&self, sec: &str, i: usize, t: &Table, key: &str, errs: &mut Vec<ConfigError>) -> Option<String> {
        match t.get(key) {
            None => None,
            Some(Value::String(s)) => Some(s.clone()),
            Some(v) => {
                errs.push(self.error(sec, i, Some(key), format!("expected a string, got {v}")));
                None
            }
        }
    }

    fn numbers(&self, sec: &str, i: usize, t: &Table, key: &str) -> Result<Option<Vec<f64>>, ConfigError> {
        match t.get(key) {
            None => Ok(None),
            Some(Value::Array(a)) => a
                .iter()
                .map(as_f64)
                .collect::<Option<Vec<_>>>()
                .map(Some)
                .ok_or_else(|| self.error(sec, i, Some(key), "expected an array of numbers")),
            Some(v) => Err(self.error(sec, i, Some(key), format!("expected an array of numbers, got {v}"))),
        }
    }

    fn finish<T>(errs: Vec<ConfigError>, value: T) -> Res<T> {
        if errs.is_empty() {
            Ok(value)
        } else {
            Err(ConfigErrors(errs))
        }
    }

    pub fn domain(&self) -> Res<DomainSpec<f64>> {
        let t = self.require("domain")?;
        let mut errs = Vec::new();
        let mut req = |k: &str| match self.num("domain", 0, t, k) {
            Ok(Some(v)) => Some(v),
            Ok(None) => {
                errs.push(self.error("domain", 0, None, format!("missing key {k:?}")));
                None
            }
            Err(e) => {
                errs.push(e);
                None
            }
        };
        let (a, b) = (req("a"), req("b"));
        let l0 = match self.num("domain", 0, t, "l0") {
            Ok(v) => v.unwrap_or(0.0),
            Err(e) => {
                errs.push(e);
                0.0
            }
        };
        let (Some(a), Some(b)) = (a, b) else {
            return Err(ConfigErrors(errs));
        };
        if !errs.is_empty() {
            return Err(ConfigErrors(errs));
        }
        if !(a < b) {
            return Err(self.error("domain", 0, Some("a"), format!("domain needs a < b, got a = {a}, b = {b}")).into());
        }
        DomainSpec::new(a, b, l0).map_err(|e| {
            let key = if a < 0.0 && 0.0 < b { "l0" } else { "a" };
            self.error("domain", 0, Some(key), e.to_string()).into()
        })
    }

    fn profile(&self, i: usize, t: &Table, dom: &DomainSpec<f64>) -> Result<CoefficientProfile<f64>, ConfigError> {
        let given: Vec<&str> = ["pieces", "constant", "coeffs"].into_iter().filter(|k| t.contains_key(*k)).collect();
        if given.len() != 1 {
            return Err(self.error("material", i, None, "give exactly one of pieces, constant or coeffs"));
        }
        let wrap = |key: &str, e: crate::Error| self.error("material", i, Some(key), e.to_string());
        match given[0] {
            "constant" => {
                let v = self.num("material", i, t, "constant")?.unwrap();
                CoefficientProfile::constant(dom.a, dom.b, v).map_err(|e| wrap("constant", e))
            }
            "coeffs" => {
                let c = self.numbers("material", i, t, "coeffs")?.unwrap();
                CoefficientProfile::polynomial(dom.a, dom.b, c).map_err(|e| wrap("coeffs", e))
            }
            _ => {
                let bad = || self.error("material", i, Some("pieces"), "pieces must be an array of {from, to, coeffs[, origin]} tables");
                let arr = t.get("pieces").and_then(|v| v.as_array()).ok_or_else(bad)?;
                let mut pieces = Vec::new();
                for p in arr {
                    let p = p.as_table().ok_or_else(bad)?;
                    if p.keys().any(|k| !["from", "to", "coeffs", "origin"].contains(&k.as_str())) {
                        return Err(bad());
                    }
                    let get = |k: &str| p.get(k).and_then(as_f64).ok_or_else(bad);
                    let coeffs = p
                        .get("coeffs")
                        .and_then(|v| v.as_array())
                        .and_then(|a| a.iter().map(as_f64).collect::<Option<Vec<_>>>())
                        .ok_or_else(bad)?;
                    let origin = match p.get("origin") {
                        Some(v) => as_f64(v).ok_or_else(bad)?,
                        None => 0.0,
                    };
                    pieces.push(Piece::new(get("from")?, get("to")?, Polynomial::with_origin(coeffs, origin)));
                }
                CoefficientProfile::new(pieces).map_err(|e| wrap("pieces", e))
            }
        }
    }

    pub fn material(&self) -> Res<MaterialPair<f64>> {
        let dom = self.domain()?;
        let entries: Vec<&Table> = match self.table.get("material") {
            Some(Value::Array(a)) => a.iter().filter_map(|v| v.as_table()).collect(),
            _ => return Err(ConfigError { location: self.name.clone(), message: "missing [[material]] entries".into() }.into()),
        };
        let mut errs = Vec::new();
        let mut slots: HashMap<(String, String), (usize, CoefficientProfile<f64>)> = HashMap::new();
        for (i, t) in entries.iter().enumerate() {
            let side = self.text_or("material", i, t, "side", &mut errs);
            let entry = self.text_or("material", i, t, "entry", &mut errs);
            let (Some(side), Some(entry)) = (side, entry) else {
                errs.push(self.error("material", i, None, "each [[material]] needs side and entry"));
                continue;
            };
            if side != "minus" && side != "plus" {
                errs.push(self.error("material", i, Some("side"), format!("side must be \"minus\" or \"plus\", got {side:?}")));
                continue;
            }
            if !["q11", "q22", "q12"].contains(&entry.as_str()) {
                errs.push(self.error("material", i, Some("entry"), format!("entry must be q11, q22 or q12, got {entry:?}")));
                continue;
            }
            match self.profile(i, t, &dom) {
                Ok(p) => {
                    if let Some((j, _)) = slots.insert((side.clone(), entry.clone()), (i, p)) {
                        errs.push(self.error("material", i, Some("entry"), format!("{side}.{entry} already given in entry {}", j + 1)));
                    }
                }
                Err(e) => errs.push(e),
            }
        }
        let mut take = |side: &str, entry: &str, required: bool, errs: &mut Vec<ConfigError>| {
            let got = slots.remove(&(side.to_string(), entry.to_string())).map(|(_, p)| p);
            if got.is_none() && required {
                errs.push(ConfigError { location: self.name.clone(), message: format!("material {side}.{entry} is missing") });
            }
            got
        };
        let sides: Vec<Option<SideProfiles<f64>>> = ["minus", "plus"]
            .iter()
            .map(|s| {
                let q11 = take(s, "q11", true, &mut errs);
                let q22 = take(s, "q22", true, &mut errs);
                let q12 = take(s, "q12", false, &mut errs);
                Some(SideProfiles { q11: q11?, q22: q22?, q12 })
            })
            .collect();
        if !errs.is_empty() {
            return Err(ConfigErrors(errs));
        }
        let mut it = sides.into_iter().flatten();
        let (minus, plus) = (it.next().unwrap(), it.next().unwrap());
        MaterialPair::new(minus, plus).map_err(|e| self.error("material", 0, None, e.to_string()).into())
    }

    pub fn boundary(&self) -> Res<BoundarySpec<f64>> {
        let t = self.require("boundary")?;
        let mut errs = Vec::new();
        let r = self.num_or("boundary", t, "r", 0.0, &mut errs);
        let preset = self.text_or("boundary", 0, t, "preset", &mut errs);
        let w = match self.numbers("boundary", 0, t, "w_b") {
            Ok(w) => w,
            Err(e) => {
                errs.push(e);
                None
            }
        };
        if !errs.is_empty() {
            return Err(ConfigErrors(errs));
        }
        let base = match (preset.as_deref(), w) {
            (Some(_), Some(_)) => return Err(self.error("boundary", 0, Some("preset"), "give either preset or w_b, not both").into()),
            (Some("conservative"), None) => BoundarySpec::conservative(),
            (Some("dissipative"), None) => BoundarySpec::dissipative(),
            (Some(p), None) => {
                return Err(self.error("boundary", 0, Some("preset"), format!("unknown preset {p:?}, expected conservative or dissipative")).into())
            }
            (None, Some(w)) => {
                let arr: [f64; 8] = w
                    .try_into()
                    .map_err(|w: Vec<f64>| self.error("boundary", 0, Some("w_b"), format!("w_b needs 8 entries (2×4 row-major), got {}", w.len())))?;
                BoundarySpec::new(arr, 0.0).map_err(|e| self.error("boundary", 0, Some("w_b"), e.to_string()))?
            }
            (None, None) => return Err(self.error("boundary", 0, None, "give preset or w_b").into()),
        };
        BoundarySpec::new(base.w_b.transpose().as_slice().try_into().unwrap(), r)
            .map_err(|e| self.error("boundary", 0, Some("r"), e.to_string()).into())
    }

    pub fn run_settings(&self) -> Res<RunSettings> {
        let empty = Table::new();
        let t = self.section("run").unwrap_or(&empty);
        let mut e = Vec::new();
        let n_minus = self.count_or("run", t, "n_minus", 32, &mut e);
        let scheme = match self.text_or("run", 0, t, "scheme", &mut e) {
            None => Scheme::ImplicitMidpoint,
            Some(s) => s.parse().unwrap_or_else(|err: crate::Error| {
                e.push(self.error("run", 0, Some("scheme"), err.to_string()));
                Scheme::ImplicitMidpoint
            }),
        };
        let s = RunSettings {
            n_minus,
            n_plus: self.count_or("run", t, "n_plus", n_minus, &mut e),
            dt: self.num_or("run", t, "dt", 1e-3, &mut e),
            horizon: self.num_or("run", t, "horizon", 1.0, &mut e),
            scheme,
            seed: self.count_or("run", t, "seed", 0, &mut e) as u64,
            cadence: self.count_or("run", t, "cadence", 1, &mut e),
            modes: self.count_or("run", t, "modes", 4, &mut e),
            max_shift: self.num_or("run", t, "max_shift", 1.0, &mut e),
            audit_levels: self.count_or("run", t, "audit_levels", 3, &mut e),
        };
        if s.dt <= 0.0 {
            e.push(self.error("run", 0, Some("dt"), format!("dt must be positive, got {}", s.dt)));
        }
        if s.horizon <= 0.0 {
            e.push(self.error("run", 0, Some("horizon"), format!("horizon must be positive, got {}", s.horizon)));
        }
        if s.cadence == 0 {
            e.push(self.error("run", 0, Some("cadence"), "cadence must be at least 1"));
        }
        if s.audit_levels < 2 {
            e.push(self.error("run", 0, Some("audit_levels"), "audit_levels must be at least 2"));
        }
        Self::finish(e, s)
    }

    /// Seed shared by every randomized computation.
    pub fn seed(&self) -> u64 {
        self.section("run")
            .and_then(|t| t.get("seed"))
            .and_then(|v| v.as_integer())
            .map_or(0, |v| v.max(0) as u64)
    }

    pub fn interface(&self, dom: &DomainSpec<f64>, horizon: f64) -> Res<InterfacePath<f64>> {
        let Some(t) = self.section("interface") else {
            return Ok(InterfacePath::constant(dom.l0, horizon));
        };
        let mut errs = Vec::new();
        let margin = self.num_or("interface", t, "margin", 0.0, &mut errs);
        if !errs.is_empty() {
            return Err(ConfigErrors(errs));
        }
        let Some(path) = t.get("path") else {
            return Ok(InterfacePath::constant(dom.l0, horizon));
        };
        let bad = || self.error("interface", 0, Some("path"), "path must be an array of [t, l, dl] triples");
        let nodes = path
            .as_array()
            .ok_or_else(bad)?
            .iter()
            .map(|v| match v.as_array().map(|a| a.iter().map(as_f64).collect::<Option<Vec<_>>>()) {
                Some(Some(a)) if a.len() == 3 => Ok(PathNode { t: a[0], l: a[1], dl: a[2] }),
                _ => Err(bad()),
            })
            .collect::<Result<Vec<_>, _>>()?;
        let p = InterfacePath::new(nodes, dom, margin).map_err(|e| self.error("interface", 0, Some("path"), e.to_string()))?;
        if p.horizon() < horizon * (1.0 - 1e-12) {
            return Err(self.error("interface", 0, Some("path"), format!("path ends at t = {} before the horizon {horizon}", p.horizon())).into());
        }
        Ok(p)
    }

    pub fn simulation(&self) -> Res<SimulationConfig<f64>> {
        let dom = self.domain()?;
        let mat = self.material()?;
        let bc = self.boundary()?;
        let run = self.run_settings()?;
        let path = self.interface(&dom, run.horizon)?;
        let cfg = SimulationConfig {
            dom,
            mat,
            bc,
            path,
            n_minus: run.n_minus,
            n_plus: run.n_plus,
            dt: run.dt,
            scheme: run.scheme,
            horizon: run.horizon,
            cadence: run.cadence,
            seed: run.seed,
            modes: run.modes,
            max_shift: run.max_shift,
        };
        cfg.validate().map_err(|e| self.error("run", 0, None, e.to_string()))?;
        Ok(cfg)
    }

    pub fn stability(&self) -> Res<StabilitySettings> {
        let empty = Table::new();
        let t = self.section("stability").unwrap_or(&empty);
        let mut e = Vec::new();
        let lambdas = match self.numbers("stability", 0, t, "lambdas") {
            Ok(v) => v.unwrap_or_else(|| vec![0.25, 0.5, 1.0, 4.0]),
            Err(err) => {
                e.push(err);
                Vec::new()
            }
        };
        let s = StabilitySettings {
            nsamples: self.count_or("stability", t, "nsamples", 2048, &mut e),
            n_per_panel: self.count_or("stability", t, "n_per_panel", 32, &mut e),
            npos: self.count_or("stability", t, "npos", 32, &mut e),
            lambdas,
            kato_cells: self.count_or("stability", t, "kato_cells", 64, &mut e),
            kato_sequences: self.count_or("stability", t, "kato_sequences", 50, &mut e),
            kato_length: self.count_or("stability", t, "kato_length", 4, &mut e),
            s_max: self.num_or("stability", t, "s_max", 2.0, &mut e),
            s_points: self.count_or("stability", t, "s_points", 21, &mut e),
            rel_tol: self.num_or("stability", t, "rel_tol", 1e-8, &mut e),
            rayleigh_samples: self.count_or("stability", t, "rayleigh_samples", 200, &mut e),
            norm_samples: self.count_or("stability", t, "norm_samples", 2000, &mut e),
        };
        if s.lambdas.iter().any(|&l| !(l > 0.0)) {
            e.push(self.error("stability", 0, Some("lambdas"), "every lambda offset above omega must be positive"));
        }
        if s.nsamples < 16 {
            e.push(self.error("stability", 0, Some("nsamples"), "nsamples must be at least 16"));
        }
        if s.npos == 0 || s.s_points < 2 || s.kato_sequences == 0 {
            e.push(self.error("stability", 0, None, "npos, kato_sequences and s_points must be positive (s_points at least 2)"));
        }
        if s.kato_length == 0 || s.kato_length > 6 {
            e.push(self.error("stability", 0, Some("kato_length"), "kato_length must be in 1..=6"));
        }
        if 4 * s.kato_cells > 800 {
            e.push(self.error("stability", 0, Some("kato_cells"), "kato_cells above 200 exceeds the dense dimension limit of 800"));
        }
        Self::finish(e, s)
    }

    pub fn counterexample(&self) -> Res<CounterexampleSpec<f64>> {
        let empty = Table::new();
        let t = self.section("counterexample").unwrap_or(&empty);
        let mut e = Vec::new();
        let eps = self.num_or("counterexample", t, "eps", 0.1, &mut e);
        let xi1 = self.num_or("counterexample", t, "xi1", -0.7, &mut e);
        let xi2 = self.num_or("counterexample", t, "xi2", -0.55, &mut e);
        let mut spec = CounterexampleSpec::standard(eps, xi1, xi2);
        spec.sigma = self.num_or("counterexample", t, "sigma", spec.sigma, &mut e);
        spec.nquad = self.count_or("counterexample", t, "nquad", spec.nquad, &mut e);
        match t.get("ks") {
            None => {}
            Some(Value::Array(a)) if a.iter().all(|v| v.as_integer().is_some_and(|k| k > 0)) => {
                spec.ks = a.iter().map(|v| v.as_integer().unwrap() as usize).collect();
            }
            Some(_) => e.push(self.error("counterexample", 0, Some("ks"), "ks must be an array of positive integers")),
        }
        if let Some(f) = self.text_or("counterexample", 0, t, "family", &mut e) {
            match f.parse::<Family>() {
                Ok(f) => spec.family = f,
                Err(err) => e.push(self.error("counterexample", 0, Some("family"), err.to_string())),
            }
        }
        if e.is_empty() {
            spec.validate().map_err(|err| self.error("counterexample", 0, None, err.to_string()))?;
        }
        Self::finish(e, spec)
    }
}

fn as_f64(v: &Value) -> Option<f64> {
    match v {
        Value::Float(f) => Some(*f),
        Value::Integer(i) => Some(*i as f64),
        _ => None,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const MINIMAL: &str = r#"
[domain]
a = -1.0
b = 1.0

[[material]]
side = "minus"
entry = "q11"
constant = 1.0

[[material]]
side = "minus"
entry = "q22"
constant = 2.0

[[material]]
side = "plus"
entry = "q11"
coeffs = [1.0, 0.1]

[[material]]
side = "plus"
entry = "q22"
pieces = [{ from = -1.0, to = 0.0, coeffs = [2.0] }, { from = 0.0, to = 1.0, coeffs = [2.0] }]

[boundary]
preset = "dissipative"
"#;

    #[test]
    fn minimal_config_fills_defaults() {
        let c = Config::parse("m.toml", MINIMAL).unwrap();
        let dom = c.domain().unwrap();
        assert_eq!((dom.a, dom.b, dom.l0), (-1.0, 1.0, 0.0));
        let mat = c.material().unwrap();
        assert!((mat.eval(crate::model::Side::Plus, 0.5)[(0, 0)] - 1.05).abs() < 1e-15);
        let run = c.run_settings().unwrap();
        assert_eq!((run.n_minus, run.n_plus, run.seed, run.scheme), (32, 32, 0, Scheme::ImplicitMidpoint));
        assert_eq!(c.boundary().unwrap(), BoundarySpec::dissipative());
        let sim = c.simulation().unwrap();
        assert_eq!(sim.path.eval(0.3), 0.0);
        assert_eq!(c.counterexample().unwrap(), CounterexampleSpec::default());
    }

    #[test]
    fn domain_invariant_error_has_location() {
        let text = MINIMAL.replace("a = -1.0", "a = 2.0");
        let err = Config::parse("m.toml", &text).unwrap().domain().unwrap_err();
        assert_eq!(err.0.len(), 1);
        assert!(err.0[0].location.starts_with("m.toml:3"), "{err}");
        assert!(err.0[0].message.contains("a < b"));
    }

    #[test]
    fn wrong_arity_and_unknown_keys() {
        let text = MINIMAL.replace("preset = \"dissipative\"", "w_b = [1, 0, 0, 0, 0, 1, 0]");
        let err = Config::parse("m.toml", &text).unwrap().boundary().unwrap_err();
        assert!(err.to_string().contains("8 entries") && err.to_string().contains("got 7"), "{err}");

        let text = format!("{MINIMAL}\n[run]\nnsteps = 4\n");
        let line = text.lines().position(|l| l.starts_with("nsteps")).unwrap() + 1;
        let err = Config::parse("m.toml", &text).unwrap_err();
        assert!(err.0[0].location.starts_with(&format!("m.toml:{line}: run.nsteps")), "{err}");
        assert!(err.0[0].message.contains("unknown key"));

        let err = Config::parse("m.toml", "[domain]\na = -1.0x\n").unwrap_err();
        assert!(err.0[0].location.starts_with("m.toml:2"), "{err}");
    }

    #[test]
    fn overrides_replace_values_and_report_themselves() {
        let mut c = Config::parse("m.toml", MINIMAL).unwrap();
        c.apply_override("run.dt=2e-3").unwrap();
        c.apply_override("run.scheme=backward-euler").unwrap();
        let run = c.run_settings().unwrap();
        assert_eq!((run.dt, run.scheme), (2e-3, Scheme::BackwardEuler));
        c.apply_override("run.dt=-1").unwrap();
        let err = c.run_settings().unwrap_err();
        assert!(err.0[0].location.starts_with("--set run.dt=-1"), "{err}");
        assert!(c.apply_override("run.bogus=1").is_err());
        assert!(c.apply_override("nodot=1").is_err());
    }

    #[test]
    fn missing_sections_are_only_an_error_when_used() {
        let c = Config::parse("m.toml", "[counterexample]\neps = 0.2\n").unwrap();
        assert_eq!(c.counterexample().unwrap().eps, 0.2);
        assert!(c.domain().unwrap_err().to_string().contains("missing section [domain]"));
    }
}

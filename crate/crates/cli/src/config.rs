//! Experiment configuration: a sectioned `key = value` file (TOML).
//!
//! Unknown keys are rejected everywhere, every parameter is validated
//! before any solve starts, and the raw file bytes are hashed so each
//! report can cite exactly which configuration produced it.

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use std::fmt;
use std::path::Path;

use fraclap_core::Point;

use crate::catalog::{find_domain, CatalogEntry};

/// What the runner should do with the configured domain.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Kind {
    /// Dirichlet solve with window data, compared against the ball
    /// oracle where one exists.
    Solve,
    /// Harmonic measure of the probe window plus measure identities.
    Measure,
    /// Condenser capacity scaling across a radius ladder, optionally
    /// with the weighted-extension comparison.
    Capacity,
    /// Capacity-density (fatness) scan of the domain complement.
    Fatness,
    /// Global and local harmonic-measure decay fits at an anchor.
    Decay,
    /// Growth-constant and operator-norm ladders over refinements.
    Holder,
    /// Extension trace versus direct solve on the same base grid.
    CsCheck,
    /// The full chain: fatness, local decay, growth stability, and a
    /// trivial-point probe, with a co-occurrence verdict.
    EquivalenceSuite,
}

impl Kind {
    pub fn as_str(self) -> &'static str {
        match self {
            Kind::Solve => "solve",
            Kind::Measure => "measure",
            Kind::Capacity => "capacity",
            Kind::Fatness => "fatness",
            Kind::Decay => "decay",
            Kind::Holder => "holder",
            Kind::CsCheck => "cs-check",
            Kind::EquivalenceSuite => "equivalence-suite",
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DomainSection {
    /// Catalog name; `list-domains` prints the choices.
    pub name: String,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FractionalSection {
    /// Order of the fractional Laplacian, in (0, 1).
    pub s: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSection {
    /// Lattice spacing.
    pub h: f64,
    /// Grid box dilation relative to the domain bounding box.
    #[serde(default = "default_box_factor")]
    pub box_factor: f64,
}

fn default_box_factor() -> f64 {
    2.0
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExtensionSection {
    /// Truncation height of the extension cylinder.
    pub height: f64,
    /// Geometric grading ratio toward the trace plane.
    #[serde(default = "default_grading")]
    pub grading: f64,
    /// Layer count; derived from height and grading when omitted.
    #[serde(default)]
    pub layers: Option<usize>,
}

fn default_grading() -> f64 {
    fraclap_core::extension::DEFAULT_GRADING
}

/// Anchor coordinates: bare numbers on the line, pairs in the plane.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(untagged)]
pub enum AnchorList {
    Flat(Vec<f64>),
    Pairs(Vec<[f64; 2]>),
}

impl AnchorList {
    pub fn points(&self, dim: usize) -> Result<Vec<Point>, ConfigError> {
        match (self, dim) {
            (AnchorList::Flat(xs), 1) => Ok(xs.iter().map(|&x| Point::one_d(x)).collect()),
            (AnchorList::Pairs(ps), 2) => {
                Ok(ps.iter().map(|&[x, y]| Point::new(x, y)).collect())
            }
            (AnchorList::Flat(_), _) => Err(ConfigError::new(
                "probe.anchors: scalar anchors given for a planar domain; use [x, y] pairs",
            )),
            (AnchorList::Pairs(_), _) => Err(ConfigError::new(
                "probe.anchors: coordinate pairs given for a one-dimensional domain",
            )),
        }
    }

    pub fn from_points(dim: usize, pts: &[Point]) -> AnchorList {
        if dim == 1 {
            AnchorList::Flat(pts.iter().map(|p| p.x).collect())
        } else {
            AnchorList::Pairs(pts.iter().map(|p| [p.x, p.y]).collect())
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProbeSection {
    /// Lower edge of the exterior data window.
    #[serde(default = "default_g_lo")]
    pub g_lo: f64,
    /// Upper edge of the exterior data window.
    #[serde(default = "default_g_hi")]
    pub g_hi: f64,
    /// Boundary anchors; catalog defaults when omitted.
    #[serde(default)]
    pub anchors: Option<AnchorList>,
    /// Radius ladder for capacity, fatness, and decay probes.
    #[serde(default)]
    pub radii: Vec<f64>,
    /// Radius ladder for global decay fits; defaults to `radii`.
    #[serde(default)]
    pub ghmd_radii: Option<Vec<f64>>,
    /// Radius ladder for fatness scans; defaults to `radii`.
    #[serde(default)]
    pub fatness_radii: Option<Vec<f64>>,
    /// Spacing override for fatness scans; point obstacles resolve
    /// only on lattices much finer than the field solves need.
    #[serde(default)]
    pub fatness_h: Option<f64>,
    /// Holder exponents to examine.
    #[serde(default)]
    pub sigmas: Vec<f64>,
    /// Spacing ladder for the Holder stability checks.
    #[serde(default)]
    pub refinements: Vec<f64>,
    /// Ball radius for the trivial-point probe; defaults to the first
    /// entry of `radii`.
    #[serde(default)]
    pub trivial_radius: Option<f64>,
}

impl Default for ProbeSection {
    fn default() -> Self {
        ProbeSection {
            g_lo: default_g_lo(),
            g_hi: default_g_hi(),
            anchors: None,
            radii: Vec::new(),
            ghmd_radii: None,
            fatness_radii: None,
            fatness_h: None,
            sigmas: Vec::new(),
            refinements: Vec::new(),
            trivial_radius: None,
        }
    }
}

fn default_g_lo() -> f64 {
    1.0
}

fn default_g_hi() -> f64 {
    2.0
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Thresholds {
    /// Capacity-density constant below which a scan fails.
    #[serde(default = "default_fatness")]
    pub fatness: f64,
    /// Inner annulus ratio for the perfectness check.
    #[serde(default = "default_perfectness")]
    pub perfectness_ratio: f64,
    /// Relative sup-error bound against the ball oracle.
    #[serde(default = "default_oracle_tol")]
    pub oracle_tolerance: f64,
    /// Relative sup bound for the extension-trace comparison.
    #[serde(default = "default_extension_tol")]
    pub extension_tolerance: f64,
    /// Absolute bound on |fitted slope - expected slope| for capacity.
    #[serde(default = "default_scaling_tol")]
    pub scaling_tolerance: f64,
    /// Allowed max/min spread of the weighted/Besov capacity ratio.
    #[serde(default = "default_ratio_spread")]
    pub ratio_spread: f64,
    /// Allowed drift factor for growth-constant ladders.
    #[serde(default = "default_stability")]
    pub stability: f64,
    /// Minimum local decay exponent counted as real decay.
    #[serde(default = "default_decay_floor")]
    pub decay_floor: f64,
    /// Optional window on the fitted local decay exponent.
    #[serde(default)]
    pub decay_lo: Option<f64>,
    #[serde(default)]
    pub decay_hi: Option<f64>,
    /// How far the global exponent may sit below the local one.
    #[serde(default = "default_ghmd_gap")]
    pub ghmd_gap: f64,
}

impl Default for Thresholds {
    fn default() -> Self {
        Thresholds {
            fatness: default_fatness(),
            perfectness_ratio: default_perfectness(),
            oracle_tolerance: default_oracle_tol(),
            extension_tolerance: default_extension_tol(),
            scaling_tolerance: default_scaling_tol(),
            ratio_spread: default_ratio_spread(),
            stability: default_stability(),
            decay_floor: default_decay_floor(),
            decay_lo: None,
            decay_hi: None,
            ghmd_gap: default_ghmd_gap(),
        }
    }
}

fn default_fatness() -> f64 {
    fraclap_core::DEFAULT_FATNESS_THRESHOLD
}

fn default_perfectness() -> f64 {
    fraclap_core::DEFAULT_PERFECTNESS_RATIO
}

fn default_oracle_tol() -> f64 {
    0.02
}

fn default_extension_tol() -> f64 {
    0.05
}

fn default_scaling_tol() -> f64 {
    0.1
}

fn default_ratio_spread() -> f64 {
    3.0
}

fn default_stability() -> f64 {
    1.2
}

fn default_decay_floor() -> f64 {
    0.1
}

fn default_ghmd_gap() -> f64 {
    0.1
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputSection {
    /// Report directory; the `--out` flag overrides it.
    #[serde(default = "default_out_dir")]
    pub dir: String,
}

impl Default for OutputSection {
    fn default() -> Self {
        OutputSection {
            dir: default_out_dir(),
        }
    }
}

fn default_out_dir() -> String {
    "out".to_string()
}

/// One experiment, fully described.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub kind: Kind,
    pub domain: DomainSection,
    pub fractional: FractionalSection,
    pub grid: GridSection,
    #[serde(default)]
    pub extension: Option<ExtensionSection>,
    #[serde(default)]
    pub probe: ProbeSection,
    #[serde(default)]
    pub thresholds: Thresholds,
    #[serde(default)]
    pub output: OutputSection,
}

/// Config rejected before any numerical work started.
#[derive(Debug, Clone)]
pub struct ConfigError {
    message: String,
}

impl ConfigError {
    pub fn new(message: impl Into<String>) -> ConfigError {
        ConfigError {
            message: message.into(),
        }
    }
}

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.message)
    }
}

impl std::error::Error for ConfigError {}

/// A parsed, validated config together with everything derived from it.
#[derive(Debug, Clone)]
pub struct Resolved {
    /// Config with defaulted fields filled in (anchors in particular),
    /// embedded verbatim in the report as the `inputs` block.
    pub config: ExperimentConfig,
    pub entry: &'static CatalogEntry,
    pub anchors: Vec<Point>,
    /// Hex-truncated SHA-256 of the raw config bytes (first 16 chars).
    pub hash: String,
}

/// Read, parse, hash, and validate a config file.
pub fn load_config(path: &Path) -> Result<Resolved, ConfigError> {
    let raw = std::fs::read(path).map_err(|e| {
        ConfigError::new(format!("cannot read config {}: {e}", path.display()))
    })?;
    let text = std::str::from_utf8(&raw)
        .map_err(|_| ConfigError::new("config file is not valid UTF-8"))?;
    let config: ExperimentConfig = toml::from_str(text)
        .map_err(|e| ConfigError::new(format!("{}: {e}", path.display())))?;
    let hash = hash_bytes(&raw);
    resolve(config, hash)
}

/// Hex-truncated SHA-256 used as the provenance hash.
pub fn hash_bytes(raw: &[u8]) -> String {
    let digest = Sha256::digest(raw);
    let mut out = String::with_capacity(16);
    for byte in digest.iter().take(8) {
        out.push_str(&format!("{byte:02x}"));
    }
    out
}

/// Validate a parsed config and resolve catalog references.
pub fn resolve(mut config: ExperimentConfig, hash: String) -> Result<Resolved, ConfigError> {
    let entry = find_domain(&config.domain.name).ok_or_else(|| {
        let names: Vec<&str> = crate::catalog::catalog().iter().map(|e| e.name).collect();
        ConfigError::new(format!(
            "domain.name: unknown domain {:?}; known domains: {}",
            config.domain.name,
            names.join(", ")
        ))
    })?;

    let s = config.fractional.s;
    if !(s > 0.0 && s < 1.0) {
        return Err(ConfigError::new(format!(
            "fractional.s: {s} outside the open interval (0, 1)"
        )));
    }
    if !(config.grid.h > 0.0 && config.grid.h.is_finite()) {
        return Err(ConfigError::new("grid.h: spacing must be positive"));
    }
    if config.grid.box_factor < 1.0 {
        return Err(ConfigError::new(
            "grid.box_factor: dilation must be at least 1",
        ));
    }
    if let Some(ext) = &config.extension {
        if !(ext.height > 0.0) {
            return Err(ConfigError::new("extension.height: must be positive"));
        }
        if ext.grading < 1.0 {
            return Err(ConfigError::new("extension.grading: must be at least 1"));
        }
        if ext.layers == Some(0) {
            return Err(ConfigError::new("extension.layers: must be at least 1"));
        }
        if !matches!(config.kind, Kind::Capacity | Kind::CsCheck) {
            return Err(ConfigError::new(format!(
                "extension: section is not used by kind {:?}",
                config.kind.as_str()
            )));
        }
    }

    let p = &config.probe;
    if p.g_lo >= p.g_hi {
        return Err(ConfigError::new("probe: g_lo must be below g_hi"));
    }
    if entry.dim == 2 && p.g_lo < 0.0 {
        return Err(ConfigError::new(
            "probe.g_lo: annulus windows need a nonnegative inner radius",
        ));
    }
    for (name, list) in [
        ("probe.radii", &p.radii),
        ("probe.refinements", &p.refinements),
    ] {
        if list.iter().any(|&r| !(r > 0.0 && r.is_finite())) {
            return Err(ConfigError::new(format!("{name}: entries must be positive")));
        }
    }
    if let Some(gr) = &p.ghmd_radii {
        if gr.iter().any(|&r| !(r > 0.0)) {
            return Err(ConfigError::new("probe.ghmd_radii: entries must be positive"));
        }
    }
    if let Some(fr) = &p.fatness_radii {
        if fr.iter().any(|&r| !(r > 0.0)) {
            return Err(ConfigError::new(
                "probe.fatness_radii: entries must be positive",
            ));
        }
    }
    if let Some(fh) = p.fatness_h {
        if !(fh > 0.0) {
            return Err(ConfigError::new("probe.fatness_h: must be positive"));
        }
    }
    if let Some(tr) = p.trivial_radius {
        if !(tr > 0.0) {
            return Err(ConfigError::new("probe.trivial_radius: must be positive"));
        }
    }
    if p.sigmas.iter().any(|&sig| !(sig > 0.0 && sig <= 1.0)) {
        return Err(ConfigError::new(
            "probe.sigmas: exponents must lie in (0, 1]",
        ));
    }

    let t = &config.thresholds;
    for (name, v) in [
        ("thresholds.fatness", t.fatness),
        ("thresholds.oracle_tolerance", t.oracle_tolerance),
        ("thresholds.extension_tolerance", t.extension_tolerance),
        ("thresholds.scaling_tolerance", t.scaling_tolerance),
        ("thresholds.decay_floor", t.decay_floor),
        ("thresholds.ghmd_gap", t.ghmd_gap),
    ] {
        if !(v > 0.0 && v.is_finite()) {
            return Err(ConfigError::new(format!("{name}: must be positive")));
        }
    }
    if !(t.perfectness_ratio > 0.0 && t.perfectness_ratio < 1.0) {
        return Err(ConfigError::new(
            "thresholds.perfectness_ratio: must lie in (0, 1)",
        ));
    }
    if t.ratio_spread < 1.0 {
        return Err(ConfigError::new("thresholds.ratio_spread: must be at least 1"));
    }
    if t.stability <= 1.0 {
        return Err(ConfigError::new("thresholds.stability: must exceed 1"));
    }
    if let (Some(lo), Some(hi)) = (t.decay_lo, t.decay_hi) {
        if lo >= hi {
            return Err(ConfigError::new(
                "thresholds: decay_lo must be below decay_hi",
            ));
        }
    }
    if config.output.dir.is_empty() {
        return Err(ConfigError::new("output.dir: must not be empty"));
    }

    // Per-kind requirements, so every run fails before the first solve
    // rather than halfway through a ladder.
    let radii = p.radii.len();
    match config.kind {
        Kind::Capacity => {
            if radii < 2 {
                return Err(ConfigError::new(
                    "probe.radii: capacity scaling needs at least two radii",
                ));
            }
        }
        Kind::Fatness => {
            if radii == 0 && p.fatness_radii.as_ref().map_or(true, Vec::is_empty) {
                return Err(ConfigError::new(
                    "probe.radii: fatness scans need at least one radius",
                ));
            }
        }
        Kind::Decay => {
            if radii < 2 {
                return Err(ConfigError::new(
                    "probe.radii: decay fits need at least two radii",
                ));
            }
        }
        Kind::Holder => {
            if p.sigmas.is_empty() {
                return Err(ConfigError::new(
                    "probe.sigmas: Holder ladders need at least one exponent",
                ));
            }
            if p.refinements.len() < 2 {
                return Err(ConfigError::new(
                    "probe.refinements: stability needs at least two spacings",
                ));
            }
        }
        Kind::EquivalenceSuite => {
            if radii < 2 {
                return Err(ConfigError::new(
                    "probe.radii: the suite's decay fit needs at least two radii",
                ));
            }
            if p.sigmas.is_empty() {
                return Err(ConfigError::new(
                    "probe.sigmas: the suite's growth ladder needs an exponent",
                ));
            }
            if p.refinements.len() < 2 {
                return Err(ConfigError::new(
                    "probe.refinements: the suite's growth ladder needs at least two spacings",
                ));
            }
        }
        Kind::Solve | Kind::Measure | Kind::CsCheck => {}
    }

    let anchors = match &config.probe.anchors {
        Some(list) => list.points(entry.dim)?,
        None => entry.default_anchors(),
    };
    if anchors.is_empty() {
        return Err(ConfigError::new("probe.anchors: must not be empty"));
    }
    config.probe.anchors = Some(AnchorList::from_points(entry.dim, &anchors));

    Ok(Resolved {
        config,
        entry,
        anchors,
        hash,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn minimal(kind: &str, domain: &str) -> String {
        format!(
            "kind = \"{kind}\"\n\n[domain]\nname = \"{domain}\"\n\n[fractional]\ns = 0.5\n\n[grid]\nh = 0.0625\n"
        )
    }

    fn parse(text: &str) -> Result<Resolved, ConfigError> {
        let config: ExperimentConfig =
            toml::from_str(text).map_err(|e| ConfigError::new(e.to_string()))?;
        resolve(config, hash_bytes(text.as_bytes()))
    }

    #[test]
    fn minimal_solve_config_resolves_with_defaults() {
        let r = parse(&minimal("solve", "interval")).unwrap();
        assert_eq!(r.config.kind, Kind::Solve);
        assert_eq!(r.entry.name, "interval");
        assert_eq!(r.config.grid.box_factor, 2.0);
        assert_eq!(r.config.probe.g_lo, 1.0);
        assert_eq!(r.config.probe.g_hi, 2.0);
        assert_eq!(r.config.thresholds.fatness, 0.05);
        assert_eq!(r.config.output.dir, "out");
        assert_eq!(r.anchors.len(), 2);
        assert_eq!(r.hash.len(), 16);
    }

    #[test]
    fn unknown_keys_are_rejected_with_the_key_name() {
        let text = format!("{}\n[grid2]\nh = 1.0\n", minimal("solve", "interval"));
        let err = parse(&text).unwrap_err().to_string();
        assert!(err.contains("grid2"), "{err}");

        let text = minimal("solve", "interval").replace("h = 0.0625", "h = 0.0625\nspacing = 1");
        let err = parse(&text).unwrap_err().to_string();
        assert!(err.contains("spacing"), "{err}");
    }

    #[test]
    fn kind_strings_are_kebab_case() {
        let r = parse(&minimal("cs-check", "interval")).unwrap();
        assert_eq!(r.config.kind, Kind::CsCheck);
        let r = parse(&format!(
            "{}\n[probe]\nradii = [0.5, 0.25]\nsigmas = [0.25]\nrefinements = [0.05, 0.025]\n",
            minimal("equivalence-suite", "interval")
        ))
        .unwrap();
        assert_eq!(r.config.kind, Kind::EquivalenceSuite);
    }

    #[test]
    fn out_of_range_parameters_name_their_field() {
        let bad_s = minimal("solve", "interval").replace("s = 0.5", "s = 1.5");
        assert!(parse(&bad_s).unwrap_err().to_string().contains("fractional.s"));

        let bad_h = minimal("solve", "interval").replace("h = 0.0625", "h = -1.0");
        assert!(parse(&bad_h).unwrap_err().to_string().contains("grid.h"));

        let bad_dom = minimal("solve", "nonagon");
        let msg = parse(&bad_dom).unwrap_err().to_string();
        assert!(msg.contains("nonagon") && msg.contains("interval"), "{msg}");
    }

    #[test]
    fn kind_requirements_fail_before_any_solve() {
        let msg = parse(&minimal("capacity", "interval"))
            .unwrap_err()
            .to_string();
        assert!(msg.contains("probe.radii"), "{msg}");

        let msg = parse(&minimal("holder", "interval"))
            .unwrap_err()
            .to_string();
        assert!(msg.contains("probe.sigmas"), "{msg}");

        let msg = parse(&minimal("equivalence-suite", "interval"))
            .unwrap_err()
            .to_string();
        assert!(msg.contains("probe.radii"), "{msg}");
    }

    #[test]
    fn anchors_parse_flat_or_paired_and_must_match_the_dimension() {
        let flat = format!("{}\n[probe]\nanchors = [-1.0, 1.0]\n", minimal("solve", "interval"));
        let r = parse(&flat).unwrap();
        assert_eq!(r.anchors, vec![Point::one_d(-1.0), Point::one_d(1.0)]);

        let pairs = format!(
            "{}\n[probe]\nanchors = [[1.0, 0.0], [0.0, 1.0]]\n",
            minimal("solve", "disk")
        );
        let r = parse(&pairs).unwrap();
        assert_eq!(r.anchors[0], Point::new(1.0, 0.0));

        let wrong = format!("{}\n[probe]\nanchors = [1.0]\n", minimal("solve", "disk"));
        let msg = parse(&wrong).unwrap_err().to_string();
        assert!(msg.contains("planar"), "{msg}");
    }

    #[test]
    fn extension_section_is_only_accepted_where_it_is_used() {
        let text = format!("{}\n[extension]\nheight = 4.0\n", minimal("solve", "interval"));
        let msg = parse(&text).unwrap_err().to_string();
        assert!(msg.contains("extension"), "{msg}");

        let text = format!("{}\n[extension]\nheight = 4.0\n", minimal("cs-check", "interval"));
        let r = parse(&text).unwrap();
        assert_eq!(r.config.extension.as_ref().unwrap().grading, 1.15);
    }

    #[test]
    fn hash_is_stable_and_sensitive() {
        let a = hash_bytes(b"kind = \"solve\"");
        let b = hash_bytes(b"kind = \"solve\"");
        let c = hash_bytes(b"kind = \"measure\"");
        assert_eq!(a, b);
        assert_ne!(a, c);
        assert_eq!(a.len(), 16);
        assert!(a.chars().all(|ch| ch.is_ascii_hexdigit()));
    }
}

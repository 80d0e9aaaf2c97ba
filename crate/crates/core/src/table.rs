//! The volume table of the moduli space of real cubic surfaces, and reports
//! for single forms.

use std::fmt::Write as _;
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::coxeter::diagram_automorphism_order;
use crate::covolume::{hyperbolic_volume, orbifold_euler_characteristic, quotient_invariants};
use crate::decimal;
use crate::eisenstein::{anti_involution_classes, fixed_lattice_form};
use crate::forms::QuadraticForm;
use crate::roots::{default_controlling_vector, run_vinberg, VinbergLimits, VinbergState};
use crate::{Error, Result};

/// Serde adapter writing exact rationals as `"p/q"` strings.
pub mod rational_str {
    use num_rational::BigRational;
    use serde::{de::Error as _, Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(value: &BigRational, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&format!("{}/{}", value.numer(), value.denom()))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<BigRational, D::Error> {
        let text = String::deserialize(d)?;
        text.parse().map_err(|_| D::Error::custom(format!("invalid rational `{text}`")))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum OutputFormat {
    #[default]
    Text,
    /// Pretty-printed JSON with rationals as `"p/q"` strings.
    Json,
}

impl FromStr for OutputFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "text" => Ok(Self::Text),
            "json" | "structured" | "json-like-structured" => Ok(Self::Json),
            other => Err(Error::UnknownFormat(other.to_string())),
        }
    }
}

#[derive(Clone, Debug)]
pub struct RunConfig {
    pub limits: VinbergLimits,
    pub format: OutputFormat,
    /// Significant digits of numeric volumes in structured output.
    pub precision: usize,
    /// Form analysed instead of the five table forms by [`analyze_form`].
    pub form_override: Option<QuadraticForm>,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self { limits: VinbergLimits::default(), format: OutputFormat::Text, precision: 16, form_override: None }
    }
}

impl RunConfig {
    pub fn validate(&self) -> Result<()> {
        if self.limits.max_height == 0 || self.limits.max_roots == 0 {
            return Err(Error::InvalidInput("limits must be positive".into()));
        }
        if self.precision == 0 {
            return Err(Error::InvalidInput("precision must be positive".into()));
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ComponentMetadata {
    pub topology: String,
    pub real_lines: u32,
    pub orbifold_fundamental_group: Option<String>,
}

/// Topology and number of real lines of the surfaces in component `j`.
pub fn component_metadata(j: usize) -> Option<ComponentMetadata> {
    let (topology, real_lines, group) = match j {
        0 => ("RP2 + 3 handles", 27, Some("S5")),
        1 => ("RP2 + 2 handles", 15, Some("(S3 x S3) x| Z/2")),
        2 => ("RP2 + 1 handle", 7, Some("(D_inf x D_inf) x| Z/2")),
        3 => ("RP2", 3, None),
        4 => ("RP2 ⊔ S2", 3, None),
        _ => return None,
    };
    Some(ComponentMetadata {
        topology: topology.to_string(),
        real_lines,
        orbifold_fundamental_group: group.map(str::to_string),
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RootRecord {
    pub vector: Vec<i64>,
    pub norm: i64,
    #[serde(with = "rational_str")]
    pub height: BigRational,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ComponentReport {
    pub j: usize,
    /// Diagonal of the Gram matrix.
    pub form: Vec<i64>,
    pub controlling_vector: Vec<i64>,
    pub roots: Vec<RootRecord>,
    pub facet_count: usize,
    /// Diagram in the `node`/`bond` text format.
    pub diagram: String,
    #[serde(with = "rational_str")]
    pub chi_w: BigRational,
    pub automorphism_order: u64,
    #[serde(with = "rational_str")]
    pub chi_pgamma: BigRational,
    /// Coefficient of `pi^2`.
    #[serde(with = "rational_str")]
    pub volume_coefficient: BigRational,
    pub volume_numeric: String,
    #[serde(with = "rational_str")]
    pub fraction: BigRational,
    pub percentage: String,
    pub metadata: ComponentMetadata,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TableReport {
    pub components: Vec<ComponentReport>,
    #[serde(with = "rational_str")]
    pub total_chi: BigRational,
    #[serde(with = "rational_str")]
    pub total_volume_coefficient: BigRational,
    pub total_volume_numeric: String,
    pub total_percentage: String,
    /// Significant digits of the numeric volumes.
    pub precision: usize,
}

impl TableReport {
    pub fn from_json(bytes: &[u8]) -> Result<Self> {
        Ok(serde_json::from_slice(bytes)?)
    }
}

/// `diag(-1, 1, .., 1, 3, .., 3)` with `j` threes.
pub fn component_form(j: usize) -> Result<QuadraticForm> {
    if j > 4 {
        return Err(Error::InvalidInput(format!("component index {j} out of range 0..=4")));
    }
    let diag: Vec<i64> = (0..5).map(|i| if i == 0 { -1 } else if i >= 5 - j { 3 } else { 1 }).collect();
    QuadraticForm::diagonal(&diag)
}

fn sorted_diagonal(form: &QuadraticForm) -> Option<Vec<BigInt>> {
    let mut d = form.diagonal_entries()?;
    d.sort();
    Some(d)
}

/// Whether two diagonal forms agree up to a permutation of coordinates.
pub fn same_up_to_permutation(a: &QuadraticForm, b: &QuadraticForm) -> bool {
    match (sorted_diagonal(a), sorted_diagonal(b)) {
        (Some(x), Some(y)) => x == y,
        _ => false,
    }
}

fn to_i64(v: &BigInt) -> Result<i64> {
    v.to_i64().ok_or_else(|| Error::InvalidInput(format!("{v} does not fit in 64 bits")))
}

fn to_i64_vec(v: &[BigInt]) -> Result<Vec<i64>> {
    v.iter().map(to_i64).collect()
}

fn root_records(state: &VinbergState) -> Result<Vec<RootRecord>> {
    state
        .accepted
        .iter()
        .map(|a| {
            Ok(RootRecord {
                vector: to_i64_vec(&a.root.vector)?,
                norm: to_i64(&a.root.norm)?,
                height: a.height.clone(),
            })
        })
        .collect()
}

fn with_component(j: usize, err: Error) -> Error {
    match err {
        Error::Incomplete { reason, state } => Error::Incomplete { reason: format!("j = {j}: {reason}"), state },
        other => other,
    }
}

/// Pipeline for one row, with the fraction left at zero.
fn component(j: usize, config: &RunConfig) -> Result<ComponentReport> {
    let form = component_form(j)?;
    let fixed = fixed_lattice_form(&anti_involution_classes()[j])?;
    if !same_up_to_permutation(&form, &fixed) {
        return Err(Error::InvalidInput(format!("fixed lattice {fixed} of chi_{j} does not match {form}")));
    }
    let v0 = default_controlling_vector(&form)?;
    let state = run_vinberg(&form, &v0, &config.limits).map_err(|e| with_component(j, e))?;
    let diagram = state.diagram()?;
    let chi_w = orbifold_euler_characteristic(&diagram);
    let automorphism_order = diagram_automorphism_order(&diagram);
    let chi_pgamma = quotient_invariants(&chi_w, automorphism_order)?;
    let volume = hyperbolic_volume(&chi_pgamma, state.hyperbolic_dim())?;
    Ok(ComponentReport {
        j,
        form: to_i64_vec(&form.diagonal_entries().expect("diagonal"))?,
        controlling_vector: to_i64_vec(&v0)?,
        roots: root_records(&state)?,
        facet_count: diagram.len(),
        diagram: diagram.to_text(),
        chi_w,
        automorphism_order,
        volume_numeric: volume.volume_decimal(config.precision),
        volume_coefficient: volume.volume_coefficient,
        chi_pgamma,
        fraction: BigRational::zero(),
        percentage: String::new(),
        metadata: component_metadata(j).expect("j <= 4"),
    })
}

/// Runs the whole pipeline for `j = 0..4` and assembles the table.
pub fn table(config: &RunConfig) -> Result<TableReport> {
    config.validate()?;
    let results: Vec<Result<ComponentReport>> = (0..5usize).into_par_iter().map(|j| component(j, config)).collect();
    let mut components = results.into_iter().collect::<Result<Vec<_>>>()?;
    let total_chi: BigRational = components.iter().fold(BigRational::zero(), |s, c| s + &c.chi_pgamma);
    for c in &mut components {
        c.fraction = &c.chi_pgamma / &total_chi;
        c.percentage = decimal::percentage(&c.fraction, 2);
    }
    let total = hyperbolic_volume(&total_chi, 4)?;
    let total_fraction: BigRational = components.iter().fold(BigRational::zero(), |s, c| s + &c.fraction);
    Ok(TableReport {
        components,
        total_chi,
        total_volume_numeric: total.volume_decimal(config.precision),
        total_volume_coefficient: total.volume_coefficient,
        total_percentage: decimal::percentage(&total_fraction, 2),
        precision: config.precision,
    })
}

fn render_table(report: &TableReport) -> String {
    let header = ["j", "form", "facets", "chi(W)", "aut", "chi", "volume", "fraction", "topology", "real lines"];
    let mut rows: Vec<Vec<String>> = vec![header.iter().map(|h| h.to_string()).collect()];
    for c in &report.components {
        let form: Vec<String> = c.form.iter().map(i64::to_string).collect();
        rows.push(vec![
            c.j.to_string(),
            format!("diag({})", form.join(",")),
            c.facet_count.to_string(),
            c.chi_w.to_string(),
            c.automorphism_order.to_string(),
            c.chi_pgamma.to_string(),
            decimal::pi_multiple_fixed(&c.volume_coefficient, 2, 5),
            c.percentage.clone(),
            c.metadata.topology.clone(),
            c.metadata.real_lines.to_string(),
        ]);
    }
    let widths: Vec<usize> =
        (0..header.len()).map(|i| rows.iter().map(|r| r[i].chars().count()).max().unwrap_or(0)).collect();
    let mut out = String::new();
    for row in &rows {
        let cells: Vec<String> =
            row.iter().zip(&widths).map(|(cell, w)| format!("{cell}{}", " ".repeat(w - cell.chars().count()))).collect();
        writeln!(out, "{}", cells.join("  ").trim_end()).unwrap();
    }
    writeln!(
        out,
        "total  {}  {}  {}",
        report.total_chi,
        decimal::pi_multiple_fixed(&report.total_volume_coefficient, 2, 5),
        report.total_percentage
    )
    .unwrap();
    out
}

/// Renders a table report as an aligned text table or as JSON.
pub fn report_serialize(report: &TableReport, format: OutputFormat) -> Result<Vec<u8>> {
    match format {
        OutputFormat::Text => Ok(render_table(report).into_bytes()),
        OutputFormat::Json => {
            let mut bytes = serde_json::to_vec_pretty(report)?;
            bytes.push(b'\n');
            Ok(bytes)
        }
    }
}

/// Vinberg's algorithm and the derived invariants for a single form.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FormReport {
    /// Gram matrix rows.
    pub gram: Vec<Vec<i64>>,
    pub controlling_vector: Vec<i64>,
    pub roots: Vec<RootRecord>,
    pub facet_count: usize,
    pub diagram: String,
    #[serde(with = "rational_str")]
    pub chi_w: BigRational,
    pub automorphism_order: u64,
    #[serde(with = "rational_str")]
    pub chi_pgamma: BigRational,
    /// Volume as `coefficient * pi^(n/2)`, present for `n = 2` and `n = 4`.
    pub volume: Option<VolumeRecord>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct VolumeRecord {
    pub dimension: usize,
    #[serde(with = "rational_str")]
    pub coefficient: BigRational,
    pub numeric: String,
}

impl FormReport {
    pub fn from_json(bytes: &[u8]) -> Result<Self> {
        Ok(serde_json::from_slice(bytes)?)
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for (i, r) in self.roots.iter().enumerate() {
            let coords: Vec<String> = r.vector.iter().map(i64::to_string).collect();
            writeln!(out, "root {i} ({}) norm={} height={}", coords.join(","), r.norm, r.height).unwrap();
        }
        writeln!(out, "facets {}", self.facet_count).unwrap();
        writeln!(out, "chi_W {}", self.chi_w).unwrap();
        writeln!(out, "automorphisms {}", self.automorphism_order).unwrap();
        writeln!(out, "chi {}", self.chi_pgamma).unwrap();
        if let Some(v) = &self.volume {
            let unit = if v.dimension == 4 { "pi^2" } else { "pi" };
            writeln!(out, "volume {} {unit} = {}", v.coefficient, v.numeric).unwrap();
        }
        out
    }

    pub fn serialize(&self, format: OutputFormat) -> Result<Vec<u8>> {
        match format {
            OutputFormat::Text => Ok(self.to_text().into_bytes()),
            OutputFormat::Json => {
                let mut bytes = serde_json::to_vec_pretty(self)?;
                bytes.push(b'\n');
                Ok(bytes)
            }
        }
    }
}

/// Runs Vinberg's algorithm on `config.form_override` from `v0` (or a default
/// controlling vector).
pub fn analyze_form(config: &RunConfig, v0: Option<Vec<BigInt>>) -> Result<FormReport> {
    config.validate()?;
    let form = config
        .form_override
        .as_ref()
        .ok_or_else(|| Error::InvalidInput("no form given".into()))?;
    let v0 = match v0 {
        Some(v) => v,
        None => default_controlling_vector(form)?,
    };
    let state = run_vinberg(form, &v0, &config.limits)?;
    let diagram = state.diagram()?;
    let chi_w = orbifold_euler_characteristic(&diagram);
    let automorphism_order = diagram_automorphism_order(&diagram);
    let chi_pgamma = quotient_invariants(&chi_w, automorphism_order)?;
    let volume = match hyperbolic_volume(&chi_pgamma, state.hyperbolic_dim()) {
        Ok(inv) => Some(VolumeRecord {
            dimension: inv.dimension,
            numeric: inv.volume_decimal(config.precision),
            coefficient: inv.volume_coefficient,
        }),
        Err(Error::UnsupportedDimension(_)) => None,
        Err(e) => return Err(e),
    };
    Ok(FormReport {
        gram: form.gram().iter().map(|row| to_i64_vec(row)).collect::<Result<_>>()?,
        controlling_vector: to_i64_vec(&v0)?,
        roots: root_records(&state)?,
        facet_count: diagram.len(),
        diagram: diagram.to_text(),
        chi_w,
        automorphism_order,
        chi_pgamma,
        volume,
    })
}

//! TOML scenario files.
//!
//! ```toml
//! [ring]
//! N = 7
//! V = 20.0
//! xi = 1.0
//!
//! [sweep]
//! band = "upper"
//! kind = "momentum"
//! ```
//!
//! Everything else has a default: `epsilon = 0`, leads on `a_0` and
//! `a_{N/2}` with `omega` at the band centre, `zeta = 2 xi`, `kappa = 3`.

use mobius_core::bands::{band_centre, ring_dispersion};
use mobius_core::experiments::{
    DEFAULT_BAND_POINTS, DEFAULT_DELTA_POINTS, DEFAULT_DELTA_SPAN, DEFAULT_GAMMA, DEFAULT_KAPPA,
    DEFAULT_K_POINTS,
};
use mobius_core::{
    AtomSpec, BandId, LeadSpec, RingSpec, Scenario, SelfEnergyConvention, SiteIndex, Sweep,
};
use serde::{Deserialize, Serialize};

use crate::error::CliError;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigFile {
    pub ring: RingSection,
    #[serde(default, skip_serializing_if = "LeadSections::is_empty")]
    pub lead: LeadSections,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub atom: Option<AtomSection>,
    pub sweep: SweepSection,
    #[serde(default)]
    pub run: RunSection,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RingSection {
    #[serde(rename = "N")]
    pub n: usize,
    #[serde(default)]
    pub epsilon: f64,
    #[serde(rename = "V")]
    pub v: f64,
    pub xi: f64,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LeadSections {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub left: Option<LeadSection>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub right: Option<LeadSection>,
}

impl LeadSections {
    fn is_empty(&self) -> bool {
        self.left.is_none() && self.right.is_none()
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LeadSection {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub omega: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub zeta: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub kappa: Option<f64>,
    /// Index `j` of the upper-leg site `a_j`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub attach: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub convention: Option<Convention>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AtomSection {
    /// Ignored by detuning sweeps, which set it per sample.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub omega_a: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gamma: Option<f64>,
    pub n: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepSection {
    pub band: Band,
    pub kind: SweepKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub points: Option<usize>,
    /// Incident `|k|` of a detuning sweep.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub k: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub delta_min: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub delta_max: Option<f64>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunSection {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub label: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub eta: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cross_check: Option<bool>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Convention {
    Surface,
    Literal,
}

impl From<Convention> for SelfEnergyConvention {
    fn from(c: Convention) -> Self {
        match c {
            Convention::Surface => SelfEnergyConvention::Surface,
            Convention::Literal => SelfEnergyConvention::Literal,
        }
    }
}

impl From<SelfEnergyConvention> for Convention {
    fn from(c: SelfEnergyConvention) -> Self {
        match c {
            SelfEnergyConvention::Surface => Convention::Surface,
            SelfEnergyConvention::Literal => Convention::Literal,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Band {
    Upper,
    Lower,
}

impl From<Band> for BandId {
    fn from(b: Band) -> Self {
        match b {
            Band::Upper => BandId::Upper,
            Band::Lower => BandId::Lower,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SweepKind {
    Momentum,
    Detuning,
    Bands,
}

/// Settings carried by a config file besides the scenario itself.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct FileSettings {
    pub cross_check: bool,
    pub seed: u64,
}

/// Parses and validates a config document.
pub fn parse_config(text: &str) -> Result<(Scenario<f64>, FileSettings), CliError> {
    let file: ConfigFile = toml::from_str(text).map_err(|e| CliError::Parse(e.to_string()))?;
    let scenario = file.to_scenario()?;
    let settings = FileSettings {
        cross_check: file.run.cross_check.unwrap_or(false),
        seed: file.run.seed.unwrap_or(0),
    };
    Ok((scenario, settings))
}

/// Serializes a scenario with every field written out.
pub fn to_config_text(s: &Scenario<f64>) -> Result<String, CliError> {
    toml::to_string(&ConfigFile::from_scenario(s)).map_err(|e| CliError::Validation(e.to_string()))
}

fn lead_from(
    section: Option<&LeadSection>,
    ring: &RingSpec<f64>,
    band: BandId,
    default_attach: usize,
) -> Result<LeadSpec<f64>, CliError> {
    let d = LeadSection::default();
    let s = section.unwrap_or(&d);
    let lead = LeadSpec {
        omega: s.omega.unwrap_or_else(|| band_centre(ring, band)),
        zeta: s.zeta.unwrap_or(2.0 * ring.xi.abs()),
        kappa: s.kappa.unwrap_or(DEFAULT_KAPPA),
        attach: SiteIndex::upper(s.attach.unwrap_or(default_attach)),
        convention: s.convention.map(Into::into).unwrap_or_default(),
    };
    lead.validate()?;
    Ok(lead)
}

impl ConfigFile {
    pub fn to_scenario(&self) -> Result<Scenario<f64>, CliError> {
        let r = &self.ring;
        let ring = RingSpec::with_epsilon(r.n, r.epsilon, r.v, r.xi)?;
        let band: BandId = self.sweep.band.into();
        let left = lead_from(self.lead.left.as_ref(), &ring, band, 0)?;
        let right = lead_from(self.lead.right.as_ref(), &ring, band, ring.n / 2)?;

        let sw = &self.sweep;
        let sweep = match sw.kind {
            SweepKind::Momentum => Sweep::Momentum {
                points: sw.points.unwrap_or(DEFAULT_K_POINTS),
            },
            SweepKind::Bands => Sweep::Bands {
                points: sw.points.unwrap_or(DEFAULT_BAND_POINTS),
            },
            SweepKind::Detuning => {
                let k = sw.k.ok_or_else(|| {
                    CliError::Validation("sweep.k is required for kind = \"detuning\"".into())
                })?;
                let span = DEFAULT_DELTA_SPAN * ring.xi.abs();
                Sweep::Detuning {
                    k,
                    delta_min: sw.delta_min.unwrap_or(-span),
                    delta_max: sw.delta_max.unwrap_or(span),
                    points: sw.points.unwrap_or(DEFAULT_DELTA_POINTS),
                }
            }
        };
        if sw.kind != SweepKind::Detuning && (sw.k.is_some() || sw.delta_min.is_some() || sw.delta_max.is_some()) {
            return Err(CliError::Validation(
                "sweep.k, delta_min and delta_max only apply to kind = \"detuning\"".into(),
            ));
        }

        let atom = self.atom.as_ref().map(|a| {
            let default_omega = match sweep {
                Sweep::Detuning { k, .. } => ring_dispersion(&ring, band, k),
                _ => band_centre(&ring, band),
            };
            AtomSpec::new(
                a.omega_a.unwrap_or(default_omega),
                a.gamma.unwrap_or(DEFAULT_GAMMA),
                a.n,
            )
        });
        if matches!(sweep, Sweep::Detuning { .. }) && atom.is_none() {
            return Err(CliError::Validation(
                "kind = \"detuning\" needs an [atom] section".into(),
            ));
        }

        let label = self.run.label.clone().unwrap_or_else(|| "custom".to_string());
        let s = Scenario {
            label,
            ring,
            left,
            right,
            atom,
            band,
            sweep,
            eta: self.run.eta,
        };
        s.validate()?;
        Ok(s)
    }

    pub fn from_scenario(s: &Scenario<f64>) -> Self {
        let lead = |l: &LeadSpec<f64>| LeadSection {
            omega: Some(l.omega),
            zeta: Some(l.zeta),
            kappa: Some(l.kappa),
            attach: Some(l.attach.j),
            convention: Some(l.convention.into()),
        };
        let (kind, points, k, delta_min, delta_max) = match s.sweep {
            Sweep::Momentum { points } => (SweepKind::Momentum, points, None, None, None),
            Sweep::Bands { points } => (SweepKind::Bands, points, None, None, None),
            Sweep::Detuning {
                k,
                delta_min,
                delta_max,
                points,
            } => (SweepKind::Detuning, points, Some(k), Some(delta_min), Some(delta_max)),
        };
        ConfigFile {
            ring: RingSection {
                n: s.ring.n,
                epsilon: s.ring.epsilon,
                v: s.ring.v,
                xi: s.ring.xi,
            },
            lead: LeadSections {
                left: Some(lead(&s.left)),
                right: Some(lead(&s.right)),
            },
            atom: s.atom.map(|a| AtomSection {
                omega_a: Some(a.omega_a),
                gamma: Some(a.gamma),
                n: a.n,
            }),
            sweep: SweepSection {
                band: match s.band {
                    BandId::Upper => Band::Upper,
                    BandId::Lower => Band::Lower,
                },
                kind,
                points: Some(points),
                k,
                delta_min,
                delta_max,
            },
            run: RunSection {
                label: Some(s.label.clone()),
                eta: s.eta,
                cross_check: None,
                seed: None,
            },
        }
    }
}

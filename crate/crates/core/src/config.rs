//! Design-config JSON and CSV reports. Every real is written with 17
//! significant digits so a document reads back to the same bits.

use std::io::{self, Write};

use serde::{Deserialize, Serialize};
use serde_json::ser::{Formatter, PrettyFormatter, Serializer};

use crate::axle::AxleSpec;
use crate::carving::GearSpec;
use crate::clearance::ClearanceSample;
use crate::design::{DesignConfig, SymmetricParams};
use crate::error::{invalid, Error, Result};
use crate::geometry::TorusCoords;
use crate::linking::LinkReport;
use crate::paradox::ContactNormal;

pub const SCHEMA_VERSION: u32 = 1;

/// On-disk form of a design.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConfigDocument {
    pub schema_version: u32,
    pub r: f64,
    pub phi: f64,
    pub theta: f64,
    pub thickness: f64,
    pub objective: f64,
    /// (α, β) of ring 0's contacts.
    pub contacts: Vec<[f64; 2]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tooth_profile: Option<GearSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub axle: Option<AxleSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub link_report: Option<LinkReport>,
}

impl ConfigDocument {
    pub fn from_config(cfg: &DesignConfig) -> ConfigDocument {
        ConfigDocument {
            schema_version: SCHEMA_VERSION,
            r: cfg.params.r,
            phi: cfg.params.phi,
            theta: cfg.params.theta,
            thickness: cfg.thickness,
            objective: cfg.objective,
            contacts: cfg.contacts.iter().map(|c| [c.alpha, c.beta]).collect(),
            tooth_profile: None,
            axle: None,
            link_report: None,
        }
    }

    /// Rebuild the circles from (r, φ, θ) and check the stored objective.
    pub fn to_config(&self) -> Result<DesignConfig> {
        if self.schema_version != SCHEMA_VERSION {
            return Err(invalid(
                "read_config",
                format!("unsupported schema_version {}", self.schema_version),
            ));
        }
        let mut cfg =
            DesignConfig::from_params(SymmetricParams::new(self.r, self.phi, self.theta))?;
        let drift = (cfg.objective - self.objective).abs();
        if drift > 1e-9 * self.objective.abs().max(1.0) {
            return Err(invalid(
                "read_config",
                format!(
                    "stored objective {} disagrees with parameters ({})",
                    self.objective, cfg.objective
                ),
            ));
        }
        cfg.objective = self.objective;
        cfg.thickness = self.thickness;
        cfg.contacts = self
            .contacts
            .iter()
            .map(|c| TorusCoords {
                alpha: c[0],
                beta: c[1],
            })
            .collect();
        Ok(cfg)
    }
}

/// Pretty JSON with reals in `{:.16e}` form.
struct Digits17(PrettyFormatter<'static>);

impl Formatter for Digits17 {
    fn write_f64<W: ?Sized + Write>(&mut self, w: &mut W, value: f64) -> io::Result<()> {
        write!(w, "{value:.16e}")
    }
    fn write_f32<W: ?Sized + Write>(&mut self, w: &mut W, value: f32) -> io::Result<()> {
        write!(w, "{:.16e}", value as f64)
    }
    fn begin_array<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.begin_array(w)
    }
    fn end_array<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.end_array(w)
    }
    fn begin_array_value<W: ?Sized + Write>(&mut self, w: &mut W, first: bool) -> io::Result<()> {
        self.0.begin_array_value(w, first)
    }
    fn end_array_value<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.end_array_value(w)
    }
    fn begin_object<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.begin_object(w)
    }
    fn end_object<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.end_object(w)
    }
    fn begin_object_key<W: ?Sized + Write>(&mut self, w: &mut W, first: bool) -> io::Result<()> {
        self.0.begin_object_key(w, first)
    }
    fn begin_object_value<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.begin_object_value(w)
    }
    fn end_object_value<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.end_object_value(w)
    }
}

/// Serialize any document with 17-significant-digit reals.
pub fn to_json<T: Serialize>(value: &T) -> Result<String> {
    let mut out = Vec::new();
    let mut ser = Serializer::with_formatter(&mut out, Digits17(PrettyFormatter::new()));
    value.serialize(&mut ser)?;
    out.push(b'\n');
    String::from_utf8(out).map_err(|e| invalid("to_json", e.to_string()))
}

pub fn write_config(doc: &ConfigDocument) -> Result<String> {
    let reals = [doc.r, doc.phi, doc.theta, doc.thickness, doc.objective];
    if reals
        .iter()
        .chain(doc.contacts.iter().flatten())
        .any(|x| !x.is_finite())
    {
        return Err(invalid("write_config", "non-finite value"));
    }
    to_json(doc)
}

pub fn read_config(text: &str) -> Result<ConfigDocument> {
    serde_json::from_str(text).map_err(Error::from)
}

fn real(x: f64) -> String {
    format!("{x:.16e}")
}

/// Clearance samples as CSV: `step,time,pair,clearance`, pairs as `a-b`.
pub fn clearance_csv(samples: &[ClearanceSample]) -> String {
    let mut out = String::from("step,time,pair,clearance\n");
    for s in samples {
        out.push_str(&format!(
            "{},{},{}-{},{}\n",
            s.step,
            real(s.time),
            s.pair.0,
            s.pair.1,
            real(s.approach.clearance)
        ));
    }
    out
}

/// Contact-normal report as CSV: `phase,contact_angle_deg,clearance`.
pub fn contact_csv(report: &[ContactNormal]) -> String {
    let mut out = String::from("phase,contact_angle_deg,clearance\n");
    for c in report {
        out.push_str(&format!(
            "{},{},{}\n",
            real(c.phase),
            real(c.angle_deg),
            real(c.clearance)
        ));
    }
    out
}

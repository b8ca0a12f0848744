//! Hardware description: per-qubit coherence, timing and error figures.
//!
//! Internally every frequency is an angular frequency in rad/ns and every
//! time is in ns. The on-disk description uses the datasheet units (GHz, µs,
//! ns) with the unit in each key name.

use std::f64::consts::PI;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{check_probability, Error, Result};

const NS_PER_US: f64 = 1e3;

pub fn ghz_to_rad_per_ns(f: f64) -> f64 {
    2.0 * PI * f
}

pub fn rad_per_ns_to_ghz(w: f64) -> f64 {
    w / (2.0 * PI)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct QubitNoiseParams {
    pub t1_ns: f64,
    pub t2_ns: f64,
    /// rad/ns
    pub frequency: f64,
    /// rad/ns; kept for reference, the two-level simulation does not use it.
    pub anharmonicity: f64,
    pub oneq_duration_ns: f64,
    /// Aggregate readout error as reported by the datasheet.
    pub readout_err: f64,
    /// P(read 0 | prepared 1)
    pub readout_p01: f64,
    /// P(read 1 | prepared 0)
    pub readout_p10: f64,
    pub rz_err: f64,
    pub sx_err: f64,
    pub x_err: f64,
    #[serde(default)]
    pub p_prep: f64,
}

impl QubitNoiseParams {
    pub fn validate(&self) -> Result<()> {
        for (name, v) in [("t1", self.t1_ns), ("t2", self.t2_ns)] {
            if !(v > 0.0) {
                return Err(Error::Device(format!("{name} must be positive, got {v}")));
            }
        }
        if !(self.oneq_duration_ns > 0.0) {
            return Err(Error::Device(format!(
                "single-qubit gate time must be positive, got {}",
                self.oneq_duration_ns
            )));
        }
        if !self.frequency.is_finite() || !self.anharmonicity.is_finite() {
            return Err(Error::Device("qubit frequencies must be finite".into()));
        }
        check_probability("readout_err", self.readout_err)?;
        check_probability("readout_p01", self.readout_p01)?;
        check_probability("readout_p10", self.readout_p10)?;
        check_probability("rz_err", self.rz_err)?;
        check_probability("sx_err", self.sx_err)?;
        check_probability("x_err", self.x_err)?;
        check_probability("p_prep", self.p_prep)?;
        Ok(())
    }
}

/// Calibrated device: qubits plus the shared two-qubit figures and the
/// cross-resonance coefficients μ (ZX strength) and ν (direct crosstalk).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DeviceModel {
    pub name: String,
    pub qubits: Vec<QubitNoiseParams>,
    /// Effective qubit–qubit coupling J, rad/ns.
    pub coupling: f64,
    pub twoq_duration_ns: f64,
    pub ecr_err: f64,
    pub mu: f64,
    pub nu: f64,
}

impl DeviceModel {
    pub fn validate(&self) -> Result<()> {
        if self.qubits.is_empty() {
            return Err(Error::Device("device needs at least one qubit".into()));
        }
        for (i, q) in self.qubits.iter().enumerate() {
            q.validate().map_err(|e| Error::Device(format!("qubit {}: {e}", i + 1)))?;
        }
        if !(self.twoq_duration_ns > 0.0) {
            return Err(Error::Device(format!(
                "two-qubit gate time must be positive, got {}",
                self.twoq_duration_ns
            )));
        }
        check_probability("ecr_err", self.ecr_err)?;
        if !self.mu.is_finite() || !self.nu.is_finite() || !self.coupling.is_finite() {
            return Err(Error::Device("coupling coefficients must be finite".into()));
        }
        Ok(())
    }

    /// `ω_control − ω_target`, rad/ns.
    pub fn detuning(&self, control: usize, target: usize) -> f64 {
        self.qubits[control].frequency - self.qubits[target].frequency
    }

    /// `Δ₁₂ = ω₁ − ω₂`, rad/ns.
    pub fn delta12(&self) -> f64 {
        if self.qubits.len() < 2 {
            0.0
        } else {
            self.detuning(0, 1)
        }
    }

    pub fn qubit(&self, q: usize) -> &QubitNoiseParams {
        &self.qubits[q]
    }

    pub fn oneq_duration_ns(&self, q: usize) -> f64 {
        self.qubits[q].oneq_duration_ns
    }

    pub fn from_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        let file: DeviceFile = serde_json::from_str(&text)?;
        file.into_model()
    }

    pub fn to_file(&self) -> DeviceFile {
        DeviceFile::from_model(self)
    }
}

/// One row of the datasheet table, in its printed units.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct QubitRow {
    pub t1_us: f64,
    pub t2_us: f64,
    pub freq_ghz: f64,
    pub anharmonicity_ghz: f64,
    pub oneq_time_ns: f64,
    pub readout_err: f64,
    pub p0_given_1: f64,
    pub p1_given_0: f64,
    pub rz_err: f64,
    pub sx_err: f64,
    pub x_err: f64,
    #[serde(default)]
    pub p_prep: f64,
}

/// Device description file (JSON).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DeviceFile {
    #[serde(default = "default_device_name")]
    pub name: String,
    pub qubits: Vec<QubitRow>,
    pub coupling_ghz: f64,
    pub twoq_time_ns: f64,
    pub ecr_err: f64,
    /// Overrides the leading-order default `μ = J / Δ₁₂`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mu: Option<f64>,
    /// Overrides the default `ν = 0`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub nu: Option<f64>,
}

fn default_device_name() -> String {
    "custom".into()
}

impl DeviceFile {
    pub fn into_model(self) -> Result<DeviceModel> {
        let qubits: Vec<QubitNoiseParams> = self
            .qubits
            .iter()
            .map(|r| QubitNoiseParams {
                t1_ns: r.t1_us * NS_PER_US,
                t2_ns: r.t2_us * NS_PER_US,
                frequency: ghz_to_rad_per_ns(r.freq_ghz),
                anharmonicity: ghz_to_rad_per_ns(r.anharmonicity_ghz),
                oneq_duration_ns: r.oneq_time_ns,
                readout_err: r.readout_err,
                readout_p01: r.p0_given_1,
                readout_p10: r.p1_given_0,
                rz_err: r.rz_err,
                sx_err: r.sx_err,
                x_err: r.x_err,
                p_prep: r.p_prep,
            })
            .collect();
        let coupling = ghz_to_rad_per_ns(self.coupling_ghz);
        let delta12 = if qubits.len() >= 2 {
            qubits[0].frequency - qubits[1].frequency
        } else {
            0.0
        };
        let mu = match self.mu {
            Some(mu) => mu,
            None if delta12 != 0.0 => coupling / delta12,
            None => 0.0,
        };
        let model = DeviceModel {
            name: self.name,
            qubits,
            coupling,
            twoq_duration_ns: self.twoq_time_ns,
            ecr_err: self.ecr_err,
            mu,
            nu: self.nu.unwrap_or(0.0),
        };
        model.validate()?;
        Ok(model)
    }

    pub fn from_model(m: &DeviceModel) -> Self {
        DeviceFile {
            name: m.name.clone(),
            qubits: m
                .qubits
                .iter()
                .map(|q| QubitRow {
                    t1_us: q.t1_ns / NS_PER_US,
                    t2_us: q.t2_ns / NS_PER_US,
                    freq_ghz: rad_per_ns_to_ghz(q.frequency),
                    anharmonicity_ghz: rad_per_ns_to_ghz(q.anharmonicity),
                    oneq_time_ns: q.oneq_duration_ns,
                    readout_err: q.readout_err,
                    p0_given_1: q.readout_p01,
                    p1_given_0: q.readout_p10,
                    rz_err: q.rz_err,
                    sx_err: q.sx_err,
                    x_err: q.x_err,
                    p_prep: q.p_prep,
                })
                .collect(),
            coupling_ghz: rad_per_ns_to_ghz(m.coupling),
            twoq_time_ns: m.twoq_duration_ns,
            ecr_err: m.ecr_err,
            mu: Some(m.mu),
            nu: Some(m.nu),
        }
    }
}

/// Datasheet figures for qubits 1 and 2 of IBM Brisbane.
pub fn brisbane_file() -> DeviceFile {
    DeviceFile {
        name: "ibm_brisbane".into(),
        qubits: vec![
            QubitRow {
                t1_us: 180.0,
                t2_us: 180.0,
                freq_ghz: 4.8,
                anharmonicity_ghz: -0.31,
                oneq_time_ns: 300.0,
                readout_err: 0.0337,
                p0_given_1: 0.0215,
                p1_given_0: 0.0459,
                rz_err: 0.0,
                sx_err: 0.000187,
                x_err: 0.000187,
                p_prep: 0.0,
            },
            QubitRow {
                t1_us: 310.0,
                t2_us: 250.0,
                freq_ghz: 4.6,
                anharmonicity_ghz: -0.31,
                oneq_time_ns: 300.0,
                readout_err: 0.0256,
                p0_given_1: 0.0176,
                p1_given_0: 0.0337,
                rz_err: 0.0,
                sx_err: 0.000367,
                x_err: 0.000367,
                p_prep: 0.0,
            },
        ],
        coupling_ghz: 0.013,
        twoq_time_ns: 660.0,
        ecr_err: 0.00431,
        mu: None,
        nu: None,
    }
}

pub fn brisbane_device() -> DeviceModel {
    brisbane_file().into_model().expect("builtin device is valid")
}

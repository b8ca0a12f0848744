//! Fast invariant suite behind `pulseforge verify`.

use std::io::Write;
use std::time::Instant;

use pulseforge::models::Variant;
use pulseforge::noise::DeviceModel;

use crate::checks;
use crate::config::load_device;

#[derive(Clone, Debug, PartialEq)]
pub struct CheckOutcome {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

fn bound(name: &'static str, value: pulseforge::Result<f64>, tol: f64) -> CheckOutcome {
    match value {
        Ok(v) => CheckOutcome {
            name,
            passed: v < tol,
            detail: format!("worst {v:.3e} (tol {tol:.0e})"),
        },
        Err(e) => CheckOutcome {
            name,
            passed: false,
            detail: e.to_string(),
        },
    }
}

fn device_checks(dev: &DeviceModel) -> Vec<CheckOutcome> {
    let mut out = Vec::new();
    out.push(match checks::channel_soundness(200, 1) {
        Ok(s) => CheckOutcome {
            name: "cptp",
            passed: s.completeness < 1e-12 && s.trace < 1e-12 && s.hermiticity < 1e-12 && s.min_eigenvalue > -1e-9,
            detail: format!(
                "completeness {:.1e}, trace {:.1e}, hermiticity {:.1e}, min eigenvalue {:.1e}",
                s.completeness, s.trace, s.hermiticity, s.min_eigenvalue
            ),
        },
        Err(e) => CheckOutcome {
            name: "cptp",
            passed: false,
            detail: e.to_string(),
        },
    });
    out.push(match checks::propagator_unitarity(100, dev, 2) {
        Ok(s) => CheckOutcome {
            name: "unitarity",
            passed: s.unitarity < 1e-10 && s.composition < 1e-10,
            detail: format!("unitarity {:.1e}, half-pulse composition {:.1e}", s.unitarity, s.composition),
        },
        Err(e) => CheckOutcome {
            name: "unitarity",
            passed: false,
            detail: e.to_string(),
        },
    });
    out.push(bound("vz-equivalence", checks::vz_equivalence(50, dev, 3), 1e-9));
    out.push(bound("euler-roundtrip", checks::euler_roundtrip(200, 4), 1e-9));
    out.push(bound("sx-vz-sequence", Ok(checks::five_op_sequence(100, dev, 5)), 1e-9));
    out.push(bound("controlled-su2", Ok(checks::abc_decomposition(50, dev, 6)), 1e-9));
    out.push(match checks::cnot_from_cr(dev) {
        Ok(f) => CheckOutcome {
            name: "cnot-from-cr",
            passed: f > 0.999,
            detail: format!("fidelity {f:.6}"),
        },
        Err(e) => CheckOutcome {
            name: "cnot-from-cr",
            passed: false,
            detail: e.to_string(),
        },
    });
    for (name, variant) in [("warm-start-gate", Variant::Gate), ("warm-start-pulsed", Variant::Pulsed)] {
        out.push(bound(name, checks::warm_start_continuity(variant, 2, 3, dev, 7), 1e-9));
    }
    out
}

/// Runs every check against the device at `device_source`. A device that
/// fails to load is reported as a failed check and the device-dependent
/// checks are skipped.
pub fn run_checks(device_source: &str) -> Vec<CheckOutcome> {
    match load_device(device_source) {
        Ok(dev) => {
            let mut out = vec![CheckOutcome {
                name: "device-load",
                passed: true,
                detail: dev.name.clone(),
            }];
            out.extend(device_checks(&dev));
            out
        }
        Err(e) => vec![CheckOutcome {
            name: "device-load",
            passed: false,
            detail: e.to_string(),
        }],
    }
}

/// Prints one line per check; returns the number of failures.
pub fn report(outcomes: &[CheckOutcome], out: &mut impl Write) -> std::io::Result<usize> {
    let mut failed = 0;
    for o in outcomes {
        let tag = if o.passed { "PASS" } else { "FAIL" };
        writeln!(out, "{tag} {:<18} {}", o.name, o.detail)?;
        failed += usize::from(!o.passed);
    }
    Ok(failed)
}

pub fn verify(device_source: &str, out: &mut impl Write) -> std::io::Result<usize> {
    let start = Instant::now();
    let outcomes = run_checks(device_source);
    let failed = report(&outcomes, out)?;
    writeln!(
        out,
        "{} of {} checks passed in {:.1} s",
        outcomes.len() - failed,
        outcomes.len(),
        start.elapsed().as_secs_f64()
    )?;
    Ok(failed)
}

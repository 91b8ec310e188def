//! Machine-readable artifacts: the multi-region comparison report and the
//! ensemble-statistics export. Reruns with equal configuration produce
//! byte-identical output; floats are rounded to nine significant digits
//! before serialization.

use std::collections::BTreeMap;

use serde::Serialize;
use serde_json::{json, Value};

use crate::error::Result;
use crate::model::{PMatrix, SwarmParams, SystemVariant};
use crate::raster::{agreement, set_ops, subset_violations, GridSpec, Raster};
use crate::regions::{RegionId, RegionRegistry};
use crate::sim::{EnsembleStats, SimConfig, Verdict, VerdictKind};

/// Rounds to nine significant digits so serialized floats carry no more.
pub fn round_sig9(x: f64) -> f64 {
    if x == 0.0 || !x.is_finite() {
        return x;
    }
    let magnitude = x.abs().log10().floor() as i32;
    let factor = 10f64.powi(8 - magnitude);
    (x * factor).round() / factor
}

pub fn params_value(params: &SwarmParams) -> Value {
    match *params {
        SwarmParams::Sigma1 { c, w } => json!({
            "system": "sigma1",
            "c": round_sig9(c),
            "w": round_sig9(w),
        }),
        SwarmParams::Sigma2 { c1, c2, w } => json!({
            "system": "sigma2",
            "c1": round_sig9(c1),
            "c2": round_sig9(c2),
            "w": round_sig9(w),
        }),
    }
}

pub fn witness_value(p: &PMatrix) -> Value {
    json!({
        "p1": round_sig9(p.p1),
        "p2": round_sig9(p.p2),
        "p3": round_sig9(p.p3),
    })
}

/// How the two published size-gain readings relate to the measured areas.
#[derive(Debug, Clone, Serialize)]
pub struct SizeGainDetail {
    /// `area(Σ2 union) / area(Gazi) - 1`
    pub ratio_minus_one: f64,
    /// `(area(Σ2 union) - area(Gazi)) / area(Σ2 union)`
    pub share_of_sigma2_union: f64,
    /// the reading previously reported for this comparison
    pub reported_value: f64,
    /// which of the two definitions lands on the reported value
    pub closest_definition: &'static str,
}

/// Region comparison over one grid: areas, Gazi overlap, size gain, subset
/// checks, and oracle-vs-closed-form agreement.
#[derive(Debug, Clone, Serialize)]
pub struct CompareReport {
    pub areas: BTreeMap<String, f64>,
    pub overlap_fraction: f64,
    pub relative_size_gain: f64,
    pub subset_violations: usize,
    pub agreement_fraction: f64,
    pub grid: GridSpec,
    pub size_gain: SizeGainDetail,
    pub subset_detail: BTreeMap<String, usize>,
    pub agreement_detail: BTreeMap<String, f64>,
    /// `|Σ1 union \ Σ2 union| / |Σ1 union|`
    pub sigma1_minus_sigma2_fraction: f64,
}

/// The six closed-form/oracle pairs that must agree away from boundaries.
pub const MATCHED_PAIRS: [(RegionId, RegionId); 6] = [
    (
        RegionId::Sys1Identity,
        RegionId::OracleIdentity(SystemVariant::Sigma1),
    ),
    (
        RegionId::Sys1Diagonal,
        RegionId::OracleDiagonal(SystemVariant::Sigma1),
    ),
    (
        RegionId::Sys1OffDiag,
        RegionId::OracleOffDiag(SystemVariant::Sigma1),
    ),
    (
        RegionId::Sys2Identity,
        RegionId::OracleIdentity(SystemVariant::Sigma2),
    ),
    (
        RegionId::Sys2Diagonal,
        RegionId::OracleDiagonal(SystemVariant::Sigma2),
    ),
    (
        RegionId::Sys2OffDiag,
        RegionId::OracleOffDiag(SystemVariant::Sigma2),
    ),
];

/// The subset claims checked by the comparison.
pub const SUBSET_CHECKS: [(RegionId, RegionId); 6] = [
    (RegionId::Sys1Identity, RegionId::Sys1Diagonal),
    (RegionId::Sys1Identity, RegionId::Sys1OffDiag),
    (RegionId::Sys2Identity, RegionId::Sys2Diagonal),
    (RegionId::Sys2Identity, RegionId::Sys2OffDiag),
    (
        RegionId::Kadirkamanathan,
        RegionId::OracleUnion(SystemVariant::Sigma2),
    ),
    (
        RegionId::OracleUnion(SystemVariant::Sigma2),
        RegionId::Poli,
    ),
];

const GAIN_REPORTED: f64 = 0.2309;

pub fn run_compare(grid: &GridSpec) -> Result<CompareReport> {
    let registry = RegionRegistry::global();
    let mut rasters: BTreeMap<RegionId, Raster> = BTreeMap::new();
    let mut wanted: Vec<RegionId> = vec![
        RegionId::OracleUnion(SystemVariant::Sigma1),
        RegionId::OracleUnion(SystemVariant::Sigma2),
        RegionId::Gazi,
        RegionId::Poli,
        RegionId::Kadirkamanathan,
    ];
    for (a, b) in MATCHED_PAIRS.iter().chain(SUBSET_CHECKS.iter()) {
        wanted.push(*a);
        wanted.push(*b);
    }
    for id in wanted {
        if !rasters.contains_key(&id) {
            rasters.insert(id, Raster::build(registry.get(id), grid)?);
        }
    }
    let raster = |id: RegionId| rasters.get(&id).expect("raster precomputed");

    let u2 = raster(RegionId::OracleUnion(SystemVariant::Sigma2));
    let u1 = raster(RegionId::OracleUnion(SystemVariant::Sigma1));
    let gazi = raster(RegionId::Gazi);

    let mut areas = BTreeMap::new();
    for id in [
        RegionId::OracleUnion(SystemVariant::Sigma1),
        RegionId::OracleUnion(SystemVariant::Sigma2),
        RegionId::Gazi,
        RegionId::Poli,
        RegionId::Kadirkamanathan,
    ] {
        areas.insert(id.name().to_string(), round_sig9(raster(id).area()));
    }

    let overlap = set_ops(u2, gazi)?.overlap_fraction_of_b;
    let area_u2 = u2.area();
    let area_gazi = gazi.area();
    let ratio_minus_one = area_u2 / area_gazi - 1.0;
    let share_of_sigma2 = (area_u2 - area_gazi) / area_u2;
    let closest = if (ratio_minus_one - GAIN_REPORTED).abs()
        < (share_of_sigma2 - GAIN_REPORTED).abs()
    {
        "ratio_minus_one"
    } else {
        "share_of_sigma2_union"
    };

    let mut subset_detail = BTreeMap::new();
    let mut total_violations = 0usize;
    for (a, b) in SUBSET_CHECKS {
        let v = subset_violations(raster(a), raster(b))?;
        total_violations += v;
        subset_detail.insert(format!("{} <= {}", a.name(), b.name()), v);
    }

    let mut agreement_detail = BTreeMap::new();
    let mut min_agreement = 1.0f64;
    for (closed, oracle) in MATCHED_PAIRS {
        let frac = agreement(raster(closed), raster(oracle))?;
        min_agreement = min_agreement.min(frac);
        agreement_detail.insert(
            format!("{} vs {}", closed.name(), oracle.name()),
            round_sig9(frac),
        );
    }

    let sigma1_only = set_ops(u1, u2)?.a_minus_b.member_count();
    let sigma1_fraction = if u1.member_count() == 0 {
        0.0
    } else {
        sigma1_only as f64 / u1.member_count() as f64
    };

    Ok(CompareReport {
        areas,
        overlap_fraction: round_sig9(overlap),
        relative_size_gain: round_sig9(ratio_minus_one),
        subset_violations: total_violations,
        agreement_fraction: round_sig9(min_agreement),
        grid: *grid,
        size_gain: SizeGainDetail {
            ratio_minus_one: round_sig9(ratio_minus_one),
            share_of_sigma2_union: round_sig9(share_of_sigma2),
            reported_value: GAIN_REPORTED,
            closest_definition: closest,
        },
        subset_detail,
        agreement_detail,
        sigma1_minus_sigma2_fraction: round_sig9(sigma1_fraction),
    })
}

fn dynamics_label(cfg: &SimConfig) -> &'static str {
    match cfg.dynamics {
        crate::sim::Dynamics::OriginalUpdate => "original",
        crate::sim::Dynamics::SystemForm => "system",
    }
}

pub fn sim_config_value(cfg: &SimConfig, witness: Option<&PMatrix>) -> Value {
    json!({
        "params": params_value(&cfg.params),
        "trials": cfg.trials,
        "steps": cfg.steps,
        "seed": cfg.seed,
        "init_box": round_sig9(cfg.init_box),
        "dynamics": dynamics_label(cfg),
        "theta_conv": round_sig9(cfg.theta_conv),
        "theta_div": round_sig9(cfg.theta_div),
        "witness": witness.map(witness_value),
    })
}

/// Ensemble-statistics artifact:
/// `{config, mean_sq, mean_v | null, finite_fraction, verdict, decay_ratio}`
/// plus the tool version.
pub fn sim_stats_json(
    cfg: &SimConfig,
    witness: Option<&PMatrix>,
    stats: &EnsembleStats,
    verdict: &Verdict,
    version: &str,
) -> String {
    let round_vec = |xs: &Vec<f64>| -> Value {
        Value::from(xs.iter().map(|&x| round_sig9(x)).collect::<Vec<f64>>())
    };
    let doc = json!({
        "version": version,
        "config": sim_config_value(cfg, witness),
        "mean_sq": round_vec(&stats.mean_sq),
        "mean_v": stats.mean_v.as_ref().map(round_vec),
        "finite_fraction": round_sig9(stats.finite_fraction),
        "verdict": match verdict.kind {
            VerdictKind::Convergent => "Convergent",
            VerdictKind::Divergent => "Divergent",
            VerdictKind::Inconclusive => "Inconclusive",
        },
        "decay_ratio": round_sig9(verdict.decay_ratio),
    });
    serde_json::to_string_pretty(&doc).expect("plain data serializes")
}

pub fn compare_report_json(report: &CompareReport, version: &str) -> String {
    let mut doc = serde_json::to_value(report).expect("plain data serializes");
    doc.as_object_mut()
        .expect("report is an object")
        .insert("version".into(), Value::from(version));
    serde_json::to_string_pretty(&doc).expect("plain data serializes")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sig9_rounding() {
        assert_eq!(round_sig9(0.0), 0.0);
        assert_eq!(round_sig9(1.0 / 3.0), 0.333333333);
        assert_eq!(round_sig9(123456789.123), 123456789.0);
        assert_eq!(round_sig9(-2.718281828459045), -2.71828183);
        assert_eq!(round_sig9(1e-11 / 3.0), 3.33333333e-12);
    }

    #[test]
    fn compare_report_on_a_coarse_grid() {
        let grid = GridSpec::default_window(64, 64).unwrap();
        let report = run_compare(&grid).unwrap();
        assert_eq!(report.areas.len(), 5);
        assert!(report.areas["oracle-union-sys2"] > 3.0);
        assert!(report.areas["gazi"] > 2.0);
        assert!(report.overlap_fraction > 0.9);
        assert_eq!(report.subset_violations, 0);
        assert!(report.agreement_fraction > 0.98);
        assert!(report.sigma1_minus_sigma2_fraction < 0.05);
        assert_eq!(report.size_gain.closest_definition, "share_of_sigma2_union");
    }

    #[test]
    fn stats_json_shape() {
        use crate::model::SwarmParams;
        use crate::sim::{classify, run_ensemble, SimConfig};
        let cfg = SimConfig::new(SwarmParams::sigma1(0.5, 0.2).unwrap(), 100, 20, 5);
        let stats = run_ensemble(&cfg, None).unwrap();
        let verdict = classify(&stats, cfg.theta_conv, cfg.theta_div);
        let text = sim_stats_json(&cfg, None, &stats, &verdict, "0.1.0");
        let doc: Value = serde_json::from_str(&text).unwrap();
        assert_eq!(doc["mean_sq"].as_array().unwrap().len(), 21);
        assert!(doc["mean_v"].is_null());
        assert_eq!(doc["finite_fraction"], json!(1.0));
        assert!(doc["verdict"].is_string());
        assert_eq!(doc["config"]["params"]["system"], json!("sigma1"));
    }
}

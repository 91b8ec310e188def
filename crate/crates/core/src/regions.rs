//! Convergence-region predicates over the `(c, w)` parameter plane.
//!
//! Every region variant sits behind the [`Region`] trait and is registered
//! by name in [`RegionRegistry`], so callers (CLI, rasterizer, comparison
//! reports) select predicates at runtime. Three kinds coexist:
//!
//! * closed-form conditions for the two system formulations under each
//!   normalized candidate family,
//! * previously published comparison regions (Kadirkamanathan, Gazi, Poli),
//! * oracle regions that delegate to the quantifier-elimination decision
//!   procedure and serve as ground truth for the closed forms.

use std::collections::BTreeMap;
use std::sync::{Arc, OnceLock};

use crate::error::{Error, Result};
use crate::model::{PTemplate, SwarmParams, SystemVariant};
use crate::qe::{decide_membership, union_membership};

/// Identifier of every selectable region.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum RegionId {
    Sys1Identity,
    Sys1Diagonal,
    Sys1OffDiag,
    Sys2Identity,
    Sys2Diagonal,
    Sys2OffDiag,
    Kadirkamanathan,
    Gazi,
    Poli,
    OracleIdentity(SystemVariant),
    OracleDiagonal(SystemVariant),
    OracleOffDiag(SystemVariant),
    OracleUnion(SystemVariant),
}

impl RegionId {
    pub const ALL: [RegionId; 17] = [
        RegionId::Sys1Identity,
        RegionId::Sys1Diagonal,
        RegionId::Sys1OffDiag,
        RegionId::Sys2Identity,
        RegionId::Sys2Diagonal,
        RegionId::Sys2OffDiag,
        RegionId::Kadirkamanathan,
        RegionId::Gazi,
        RegionId::Poli,
        RegionId::OracleIdentity(SystemVariant::Sigma1),
        RegionId::OracleIdentity(SystemVariant::Sigma2),
        RegionId::OracleDiagonal(SystemVariant::Sigma1),
        RegionId::OracleDiagonal(SystemVariant::Sigma2),
        RegionId::OracleOffDiag(SystemVariant::Sigma1),
        RegionId::OracleOffDiag(SystemVariant::Sigma2),
        RegionId::OracleUnion(SystemVariant::Sigma1),
        RegionId::OracleUnion(SystemVariant::Sigma2),
    ];

    pub fn name(&self) -> &'static str {
        use SystemVariant::*;
        match self {
            RegionId::Sys1Identity => "sys1-identity",
            RegionId::Sys1Diagonal => "sys1-diagonal",
            RegionId::Sys1OffDiag => "sys1-offdiag",
            RegionId::Sys2Identity => "sys2-identity",
            RegionId::Sys2Diagonal => "sys2-diagonal",
            RegionId::Sys2OffDiag => "sys2-offdiag",
            RegionId::Kadirkamanathan => "kadirkamanathan",
            RegionId::Gazi => "gazi",
            RegionId::Poli => "poli",
            RegionId::OracleIdentity(Sigma1) => "oracle-identity-sys1",
            RegionId::OracleIdentity(Sigma2) => "oracle-identity-sys2",
            RegionId::OracleDiagonal(Sigma1) => "oracle-diagonal-sys1",
            RegionId::OracleDiagonal(Sigma2) => "oracle-diagonal-sys2",
            RegionId::OracleOffDiag(Sigma1) => "oracle-offdiag-sys1",
            RegionId::OracleOffDiag(Sigma2) => "oracle-offdiag-sys2",
            RegionId::OracleUnion(Sigma1) => "oracle-union-sys1",
            RegionId::OracleUnion(Sigma2) => "oracle-union-sys2",
        }
    }

    /// Resolves the CLI spelling: either a full registry name, or a short
    /// family name (`identity`, `diagonal`, `offdiag`, `oracle-union`, ...)
    /// qualified by the selected system.
    pub fn resolve(token: &str, system: Option<SystemVariant>) -> Result<RegionId> {
        if let Some(region) = RegionId::ALL.iter().find(|r| r.name() == token) {
            return Ok(*region);
        }
        let need_system = || {
            system.ok_or_else(|| {
                Error::InvalidParam(format!("region `{token}` requires --system"))
            })
        };
        match token {
            "identity" => Ok(match need_system()? {
                SystemVariant::Sigma1 => RegionId::Sys1Identity,
                SystemVariant::Sigma2 => RegionId::Sys2Identity,
            }),
            "diagonal" => Ok(match need_system()? {
                SystemVariant::Sigma1 => RegionId::Sys1Diagonal,
                SystemVariant::Sigma2 => RegionId::Sys2Diagonal,
            }),
            "offdiag" => Ok(match need_system()? {
                SystemVariant::Sigma1 => RegionId::Sys1OffDiag,
                SystemVariant::Sigma2 => RegionId::Sys2OffDiag,
            }),
            "oracle-identity" => Ok(RegionId::OracleIdentity(need_system()?)),
            "oracle-diagonal" => Ok(RegionId::OracleDiagonal(need_system()?)),
            "oracle-offdiag" => Ok(RegionId::OracleOffDiag(need_system()?)),
            "oracle-union" => Ok(RegionId::OracleUnion(need_system()?)),
            _ => Err(Error::InvalidParam(format!("unknown region `{token}`"))),
        }
    }
}

/// A membership predicate over the analysis window `c > 0`, `w ∈ (-1, 1)`.
///
/// The first argument is `c` for Σ1-family and comparison regions and the
/// coefficient sum `s = c1 + c2` for Σ2-family regions.
pub trait Region: Send + Sync {
    fn id(&self) -> RegionId;

    fn name(&self) -> &'static str {
        self.id().name()
    }

    fn contains(&self, c_or_s: f64, w: f64) -> Result<bool>;
}

fn check_domain(c_or_s: f64, w: f64) -> Result<()> {
    if !c_or_s.is_finite() || !w.is_finite() {
        return Err(Error::Domain("region inputs must be finite".into()));
    }
    if c_or_s <= 0.0 {
        return Err(Error::Domain(format!(
            "region predicates need c > 0, got {c_or_s}"
        )));
    }
    if w <= -1.0 || w >= 1.0 {
        return Err(Error::Domain(format!(
            "region predicates need w in (-1, 1), got {w}"
        )));
    }
    Ok(())
}

macro_rules! closed_form_region {
    ($(#[$doc:meta])* $struct_name:ident, $id:expr, |$c:ident, $w:ident| $body:expr) => {
        $(#[$doc])*
        #[derive(Debug, Clone, Copy, Default)]
        pub struct $struct_name;

        impl Region for $struct_name {
            fn id(&self) -> RegionId {
                $id
            }

            fn contains(&self, $c: f64, $w: f64) -> Result<bool> {
                check_domain($c, $w)?;
                Ok($body)
            }
        }
    };
}

closed_form_region!(
    /// Σ1 with the identity candidate:
    /// `7c - 6 < 0  ∧  2c²w² - 3w² - 7c² + 6c > 0`.
    Sys1IdentityRegion,
    RegionId::Sys1Identity,
    |c, w| 7.0 * c - 6.0 < 0.0
        && 2.0 * c * c * w * w - 3.0 * w * w - 7.0 * c * c + 6.0 * c > 0.0
);

closed_form_region!(
    /// Σ1 with the off-diagonal candidate family:
    /// `7c - 6 < 0  ∧  7c² - 24wc - 6c + 24w² + 12w - 12 < 0`.
    Sys1OffDiagRegion,
    RegionId::Sys1OffDiag,
    |c, w| 7.0 * c - 6.0 < 0.0
        && 7.0 * c * c - 24.0 * w * c - 6.0 * c + 24.0 * w * w + 12.0 * w - 12.0 < 0.0
);

closed_form_region!(
    /// Σ2 with the identity candidate:
    /// `2s - 3 ≤ 0  ∧  w²s² - 2s² + 3s - 3w² ≥ 0`.
    Sys2IdentityRegion,
    RegionId::Sys2Identity,
    |s, w| 2.0 * s - 3.0 <= 0.0
        && w * w * s * s - 2.0 * s * s + 3.0 * s - 3.0 * w * w >= 0.0
);

closed_form_region!(
    /// Σ2 with the diagonal candidate family:
    /// `3w² + s - 3 ≤ 0  ∧  3w⁴ + 3w²s + s² - 12w² - 6s + 9 ≥ 0`.
    Sys2DiagonalRegion,
    RegionId::Sys2Diagonal,
    |s, w| {
        let w2 = w * w;
        3.0 * w2 + s - 3.0 <= 0.0
            && 3.0 * w2 * w2 + 3.0 * w2 * s + s * s - 12.0 * w2 - 6.0 * s + 9.0 >= 0.0
    }
);

closed_form_region!(
    /// Σ2 with the off-diagonal candidate family:
    /// `2s - 3 ≤ 0  ∧  2s² - 12ws - 3s + 24w² + 12w - 12 ≤ 0`.
    Sys2OffDiagRegion,
    RegionId::Sys2OffDiag,
    |s, w| 2.0 * s - 3.0 <= 0.0
        && 2.0 * s * s - 12.0 * w * s - 3.0 * s + 24.0 * w * w + 12.0 * w - 12.0 <= 0.0
);

closed_form_region!(
    /// `c < 2(1 + w)  ∧  c < 2(1 - w)²/(1 + w)`.
    KadirkamanathanRegion,
    RegionId::Kadirkamanathan,
    |c, w| c < 2.0 * (1.0 + w) && c < 2.0 * (1.0 - w) * (1.0 - w) / (1.0 + w)
);

closed_form_region!(
    /// `c < 24(1 - 2|w| + w²) / (7(1 + w))`; the numerator is `(1 - |w|)²`,
    /// so the absolute value is kept exactly as written.
    GaziRegion,
    RegionId::Gazi,
    |c, w| c < 24.0 * (1.0 - 2.0 * w.abs() + w * w) / (7.0 * (1.0 + w))
);

closed_form_region!(
    /// `c < 24(1 - w²) / (7 - 5w)`.
    PoliRegion,
    RegionId::Poli,
    |c, w| c < 24.0 * (1.0 - w * w) / (7.0 - 5.0 * w)
);

/// Both branches of the Σ1-diagonal boundary, solving
/// `F(c, w) = 49c² + (48w² - 168)c + (24w⁴ - 168w² + 144) = 0`
/// as a quadratic in `c`:
/// `c = (168 - 48w² ∓ sqrt(2400 w² (7 - w²))) / 98`.
pub fn sys1_diagonal_boundary(w: f64) -> Result<(f64, f64)> {
    if !w.is_finite() {
        return Err(Error::Domain("w must be finite".into()));
    }
    let w2 = w * w;
    // tolerate |w| = sqrt(7) itself, whose square rounds just above 7
    if w2 > 7.0 + 1e-9 {
        return Err(Error::Domain(format!(
            "no real boundary branch for |w| > sqrt(7), got w = {w}"
        )));
    }
    let sq = (2400.0 * w2 * (7.0 - w2)).max(0.0).sqrt();
    let base = 168.0 - 48.0 * w2;
    Ok(((base - sq) / 98.0, (base + sq) / 98.0))
}

/// Σ1-diagonal membership: `c` below the lower boundary branch.
///
/// The indexed-root boundary is interpreted against the lower `c`-branch;
/// the oracle-agreement suite validates this calibration on a dense grid.
pub fn sys1_diagonal_predicate(c: f64, w: f64) -> Result<bool> {
    check_domain(c, w)?;
    let (c_lower, _) = sys1_diagonal_boundary(w)?;
    Ok(c < c_lower)
}

/// Σ1 with the diagonal candidate family (indexed-root boundary).
#[derive(Debug, Clone, Copy, Default)]
pub struct Sys1DiagonalRegion;

impl Region for Sys1DiagonalRegion {
    fn id(&self) -> RegionId {
        RegionId::Sys1Diagonal
    }

    fn contains(&self, c: f64, w: f64) -> Result<bool> {
        sys1_diagonal_predicate(c, w)
    }
}

fn params_at(variant: SystemVariant, c_or_s: f64, w: f64) -> Result<SwarmParams> {
    match variant {
        SystemVariant::Sigma1 => SwarmParams::sigma1(c_or_s, w),
        // every quantity depends on the coefficient sum only; split it evenly
        SystemVariant::Sigma2 => SwarmParams::sigma2(c_or_s / 2.0, c_or_s / 2.0, w),
    }
}

/// Ground-truth region decided by the quantifier-elimination procedure for
/// one candidate family.
#[derive(Debug, Clone, Copy)]
pub struct OracleRegion {
    variant: SystemVariant,
    template: PTemplate,
    id: RegionId,
}

impl OracleRegion {
    pub fn identity(variant: SystemVariant) -> Self {
        OracleRegion {
            variant,
            template: PTemplate::Identity,
            id: RegionId::OracleIdentity(variant),
        }
    }

    pub fn diagonal(variant: SystemVariant) -> Self {
        OracleRegion {
            variant,
            template: PTemplate::DiagonalFree,
            id: RegionId::OracleDiagonal(variant),
        }
    }

    pub fn offdiag(variant: SystemVariant) -> Self {
        OracleRegion {
            variant,
            template: PTemplate::OffDiagFree,
            id: RegionId::OracleOffDiag(variant),
        }
    }
}

impl Region for OracleRegion {
    fn id(&self) -> RegionId {
        self.id
    }

    fn contains(&self, c_or_s: f64, w: f64) -> Result<bool> {
        check_domain(c_or_s, w)?;
        let params = params_at(self.variant, c_or_s, w)?;
        Ok(decide_membership(&params, &self.template)?.member)
    }
}

/// Union of the three oracle families for one system formulation.
#[derive(Debug, Clone, Copy)]
pub struct OracleUnionRegion {
    variant: SystemVariant,
}

impl OracleUnionRegion {
    pub fn new(variant: SystemVariant) -> Self {
        OracleUnionRegion { variant }
    }
}

impl Region for OracleUnionRegion {
    fn id(&self) -> RegionId {
        RegionId::OracleUnion(self.variant)
    }

    fn contains(&self, c_or_s: f64, w: f64) -> Result<bool> {
        check_domain(c_or_s, w)?;
        let params = params_at(self.variant, c_or_s, w)?;
        Ok(union_membership(&params)?.member)
    }
}

/// All built-in regions, addressable by id or name.
pub struct RegionRegistry {
    by_id: BTreeMap<RegionId, Arc<dyn Region>>,
}

impl RegionRegistry {
    fn build() -> Self {
        let mut by_id: BTreeMap<RegionId, Arc<dyn Region>> = BTreeMap::new();
        let mut add = |r: Arc<dyn Region>| {
            by_id.insert(r.id(), r);
        };
        add(Arc::new(Sys1IdentityRegion));
        add(Arc::new(Sys1DiagonalRegion));
        add(Arc::new(Sys1OffDiagRegion));
        add(Arc::new(Sys2IdentityRegion));
        add(Arc::new(Sys2DiagonalRegion));
        add(Arc::new(Sys2OffDiagRegion));
        add(Arc::new(KadirkamanathanRegion));
        add(Arc::new(GaziRegion));
        add(Arc::new(PoliRegion));
        for variant in [SystemVariant::Sigma1, SystemVariant::Sigma2] {
            add(Arc::new(OracleRegion::identity(variant)));
            add(Arc::new(OracleRegion::diagonal(variant)));
            add(Arc::new(OracleRegion::offdiag(variant)));
            add(Arc::new(OracleUnionRegion::new(variant)));
        }
        RegionRegistry { by_id }
    }

    pub fn global() -> &'static RegionRegistry {
        static REGISTRY: OnceLock<RegionRegistry> = OnceLock::new();
        REGISTRY.get_or_init(RegionRegistry::build)
    }

    pub fn get(&self, id: RegionId) -> &dyn Region {
        self.by_id
            .get(&id)
            .expect("registry covers every RegionId")
            .as_ref()
    }

    pub fn by_name(&self, name: &str) -> Option<&dyn Region> {
        self.by_id
            .values()
            .find(|r| r.name() == name)
            .map(|r| r.as_ref())
    }

    pub fn names(&self) -> Vec<&'static str> {
        self.by_id.values().map(|r| r.name()).collect()
    }
}

/// Membership of `(c_or_s, w)` in the named region.
pub fn region_predicate(id: RegionId, c_or_s: f64, w: f64) -> Result<bool> {
    RegionRegistry::global().get(id).contains(c_or_s, w)
}

//! Cross-checks between lockstep DIOM and PCG traces.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::{dot, norm, sub};
use crate::scalar::Real;
use crate::trace::SolveTrace;

/// Deviations measured by [`diom_identity_report`].
#[derive(Clone, Debug, Serialize)]
pub struct DiomIdentityReport {
    /// Number of PCG steps compared.
    pub steps: usize,
    /// `max_k |u_{k+1,k+1} α_k − 1|`
    pub max_pivot_deviation: f64,
    /// `|g₀ᵀp₁ + β/u₁₁| / (β/u₁₁)`
    pub first_slope_deviation: f64,
    /// Whether `sign(g_kᵀp_{k+1}) = (−1)^{k−1}` for each `k ≥ 1`.
    pub slope_signs: Vec<bool>,
    /// Whether `sign(ζ_k) = (−1)^{k−1}` for every recorded `k`.
    pub zeta_signs_alternate: bool,
    /// `max_k ‖ζ_{k+1} u_{k+1,k+1} p_{k+1} − d_k‖ / ‖d_k‖`
    pub max_direction_deviation: f64,
}

impl DiomIdentityReport {
    pub fn passes(&self, tol: f64) -> bool {
        self.max_pivot_deviation <= tol
            && self.first_slope_deviation <= tol
            && self.max_direction_deviation <= tol
            && self.zeta_signs_alternate
            && self.slope_signs.iter().all(|&s| s)
    }
}

fn alternating(k: usize) -> f64 {
    if k % 2 == 1 {
        1.0
    } else {
        -1.0
    }
}

/// Compares a DIOM trace with a PCG trace from the same start.
///
/// Both traces must keep vectors and have the same length. Row `k + 1` of
/// the DIOM trace carries `u_{k+1,k+1}`, `ζ_{k+1}` and `p_{k+1}`; row `k + 1`
/// of the PCG trace carries `α_k` and `d_k`.
pub fn diom_identity_report<T: Real>(
    diom: &SolveTrace<T>,
    pcg: &SolveTrace<T>,
) -> Result<DiomIdentityReport> {
    let (dr, cr) = (diom.records(), pcg.records());
    if dr.len() != cr.len() {
        return Err(Error::LengthMismatch {
            left: dr.len(),
            right: cr.len(),
        });
    }
    let (dv, cv) = (diom.vectors(), pcg.vectors());
    if dv.len() != dr.len() || cv.len() != cr.len() {
        return Err(Error::InvalidArgument("traces must keep vectors".into()));
    }
    let steps = dr.len().saturating_sub(1);
    let mut report = DiomIdentityReport {
        steps,
        max_pivot_deviation: 0.0,
        first_slope_deviation: 0.0,
        slope_signs: Vec::new(),
        zeta_signs_alternate: true,
        max_direction_deviation: 0.0,
    };
    for k in 0..steps {
        let (Some(u), Some(zeta)) = (dr[k + 1].u_kk, dr[k + 1].zeta) else {
            return Err(Error::InvalidArgument("DIOM trace lacks u_kk/zeta".into()));
        };
        let alpha = cr[k + 1]
            .alpha
            .ok_or_else(|| Error::InvalidArgument("PCG trace lacks alpha".into()))?;
        let dev = (u * alpha - T::one()).abs().as_f64();
        report.max_pivot_deviation = report.max_pivot_deviation.max(dev);
        if zeta.as_f64().signum() != alternating(k + 1) {
            report.zeta_signs_alternate = false;
        }

        let p = dv[k + 1]
            .direction
            .as_deref()
            .expect("DIOM direction recorded");
        let d = cv[k + 1]
            .direction
            .as_deref()
            .expect("PCG direction recorded");
        let recovered: Vec<T> = p.iter().map(|&pi| zeta * u * pi).collect();
        let dn = norm(d);
        if dn > T::zero() {
            let rel = (norm(&sub(&recovered, d)) / dn).as_f64();
            report.max_direction_deviation = report.max_direction_deviation.max(rel);
        }

        let slope = dot(&dv[k].g, p);
        if k == 0 {
            let beta = norm(&dv[0].g);
            let expected = -beta / u;
            report.first_slope_deviation = ((slope - expected) / expected).abs().as_f64();
        } else {
            report
                .slope_signs
                .push(slope.as_f64().signum() == alternating(k));
        }
    }
    Ok(report)
}

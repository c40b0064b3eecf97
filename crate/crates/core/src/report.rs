//! Structured outcome of one identity / inequality check.

use serde::{Deserialize, Serialize};

/// How a report participates in a suite verdict.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CheckKind {
    /// Hard assertion: a failure fails the run.
    Assert,
    /// Reported number without a pass/fail contract (still carries a
    /// `pass` hint; failures only warn unless promoted with `--strict`).
    Diagnostic,
}

/// Outcome of one check: both sides of the identity (or a residual norm),
/// the tolerance it was held to, and a stable anchor naming the equation.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CheckReport {
    pub check_id: String,
    /// Stable identifier of the identity/inequality family being checked.
    pub anchor: String,
    pub lhs: f64,
    pub rhs: f64,
    /// Scale-free discrepancy the tolerance applies to.
    pub residual: f64,
    pub tol: f64,
    pub pass: bool,
    pub grid: String,
    pub field_id: String,
    pub kind: CheckKind,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

impl CheckReport {
    /// Two-sided check: `lhs` vs `rhs` at relative tolerance `tol`
    /// (relative to the larger magnitude, with an absolute floor so exact
    /// zero identities pass).
    pub fn compare(
        anchor: &str,
        check_id: &str,
        field_id: &str,
        grid: &str,
        lhs: f64,
        rhs: f64,
        tol: f64,
    ) -> CheckReport {
        let scale = lhs.abs().max(rhs.abs());
        let residual = if scale > 0.0 {
            (lhs - rhs).abs() / scale
        } else {
            0.0
        };
        CheckReport {
            check_id: check_id.to_string(),
            anchor: anchor.to_string(),
            lhs,
            rhs,
            residual,
            tol,
            pass: residual <= tol,
            grid: grid.to_string(),
            field_id: field_id.to_string(),
            kind: CheckKind::Assert,
            note: None,
        }
    }

    /// Residual check: a precomputed scale-free residual against `tol`.
    pub fn residual(
        check_id: &str,
        anchor: &str,
        field_id: &str,
        grid: &str,
        residual: f64,
        tol: f64,
    ) -> CheckReport {
        CheckReport {
            check_id: check_id.to_string(),
            anchor: anchor.to_string(),
            lhs: residual,
            rhs: 0.0,
            residual,
            tol,
            pass: residual <= tol,
            grid: grid.to_string(),
            field_id: field_id.to_string(),
            kind: CheckKind::Assert,
            note: None,
        }
    }

    /// One-sided bound `lhs <= rhs` with a rounding allowance `tol`
    /// relative to the right-hand side.
    pub fn bound(
        anchor: &str,
        check_id: &str,
        field_id: &str,
        grid: &str,
        lhs: f64,
        rhs: f64,
        tol: f64,
    ) -> CheckReport {
        let scale = lhs.abs().max(rhs.abs()).max(f64::MIN_POSITIVE);
        let excess = (lhs - rhs) / scale;
        CheckReport {
            check_id: check_id.to_string(),
            anchor: anchor.to_string(),
            lhs,
            rhs,
            residual: excess.max(0.0),
            tol,
            pass: excess <= tol,
            grid: grid.to_string(),
            field_id: field_id.to_string(),
            kind: CheckKind::Assert,
            note: None,
        }
    }

    pub fn diagnostic(mut self) -> CheckReport {
        self.kind = CheckKind::Diagnostic;
        self
    }

    pub fn with_note(mut self, note: impl Into<String>) -> CheckReport {
        self.note = Some(note.into());
        self
    }

    pub fn with_id(mut self, id: impl Into<String>) -> CheckReport {
        self.check_id = id.into();
        self
    }

    /// JSON-lines serialization.
    pub fn to_json_line(&self) -> String {
        serde_json::to_string(self).expect("CheckReport serializes")
    }
}

/// Renders reports as one JSON object per line, in the given order.
pub fn to_json_lines(reports: &[CheckReport]) -> String {
    let mut out = String::new();
    for r in reports {
        out.push_str(&r.to_json_line());
        out.push('\n');
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn compare_passes_on_equal_zero() {
        let r = CheckReport::compare("a", "c", "f", "g", 0.0, 0.0, 1e-10);
        assert!(r.pass);
        assert_eq!(r.residual, 0.0);
    }

    #[test]
    fn bound_allows_rounding_but_not_violation() {
        assert!(CheckReport::bound("a", "c", "f", "g", 1.0, 1.0, 1e-12).pass);
        assert!(CheckReport::bound("a", "c", "f", "g", 0.9, 1.0, 0.0).pass);
        assert!(!CheckReport::bound("a", "c", "f", "g", 1.1, 1.0, 1e-12).pass);
    }

    #[test]
    fn json_line_roundtrips() {
        let r = CheckReport::compare("anchor-x", "check-1", "field", "n=32", 1.5, 1.5, 1e-9);
        let back: CheckReport = serde_json::from_str(&r.to_json_line()).unwrap();
        assert_eq!(back.anchor, "anchor-x");
        assert!(back.pass);
    }
}

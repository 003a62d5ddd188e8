use super::{BinaryMask, RuleMask, RuleTag};
use crate::error::{Error, Result};

/// Thresholds a rule matrix according to its tag.
///
/// - terminal: `T ≤ t̄`
/// - alignment: `A ≥ ā`
/// - adjacent block: `B ≥ b̄` for `b̄ > 0`, and `B > 0` when `b̄ = 0`
/// - position: passed through (`P` is already binary)
///
/// Wire and plugin masks carry no built-in rule and are rejected.
pub fn binarize(mask: &RuleMask, threshold: f64) -> Result<BinaryMask> {
    if !threshold.is_finite() {
        return Err(Error::Invalid(format!(
            "threshold {threshold} is not finite"
        )));
    }
    let v = &mask.values;
    Ok(match &mask.tag {
        RuleTag::Terminal => v.map(|&t| t <= threshold),
        RuleTag::Alignment => v.map(|&a| a >= threshold),
        RuleTag::AdjacentBlock if threshold > 0.0 => v.map(|&b| b >= threshold),
        RuleTag::AdjacentBlock => v.map(|&b| b > 0.0),
        RuleTag::Position => v.map(|&p| p != 0.0),
        other => return Err(Error::UnknownRule(other.to_string())),
    })
}

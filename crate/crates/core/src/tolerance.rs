//! Comparison slack shared by metric validation, local-optimality checks and
//! certificate records.

/// Relative slack applied to every inequality check.
pub const SLACK_REL: f64 = 1e-9;

/// Additive slack for comparing `lhs` against `rhs`:
/// `SLACK_REL * max(1, |lhs|, |rhs|)`.
#[inline]
pub fn slack(lhs: f64, rhs: f64) -> f64 {
    SLACK_REL * 1f64.max(lhs.abs()).max(rhs.abs())
}

/// `lhs <= rhs` up to [`slack`].
#[inline]
pub fn leq(lhs: f64, rhs: f64) -> bool {
    lhs <= rhs + slack(lhs, rhs)
}

/// `a < b` by more than [`slack`].
#[inline]
pub fn strictly_less(a: f64, b: f64) -> bool {
    a < b - slack(a, b)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn slack_floor_is_absolute_for_small_values() {
        assert_eq!(slack(0.0, 0.5), SLACK_REL);
        assert_eq!(slack(-4.0, 2.0), 4.0 * SLACK_REL);
    }

    #[test]
    fn leq_accepts_rounding_noise() {
        assert!(leq(1.0 + 1e-12, 1.0));
        assert!(!leq(1.0 + 1e-6, 1.0));
        assert!(strictly_less(1.0, 2.0));
        assert!(!strictly_less(1.0 - 1e-12, 1.0));
    }
}

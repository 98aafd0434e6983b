use crate::dynamics::{NoiseModel, RateKind};

/// Asymptotic scaling law `Δ²ω̂·T ∼ N^κ`, with `t_opt ∼ N^τ` where the
/// optimal time shrinks with N.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ReferenceScaling {
    pub name: &'static str,
    pub kappa: f64,
    pub t_exponent: Option<f64>,
}

pub const SQL: ReferenceScaling = ReferenceScaling { name: "sql", kappa: -1.0, t_exponent: None };
pub const ZENO: ReferenceScaling = ReferenceScaling { name: "zeno", kappa: -1.5, t_exponent: Some(-0.5) };
pub const TRANSVERSAL_SEMIGROUP: ReferenceScaling =
    ReferenceScaling { name: "transversal-semigroup", kappa: -5.0 / 3.0, t_exponent: Some(-1.0 / 3.0) };
pub const TRANSVERSAL_TCL: ReferenceScaling =
    ReferenceScaling { name: "transversal-tcl", kappa: -1.75, t_exponent: Some(-0.25) };
pub const MIXED_ANGLE: ReferenceScaling = ReferenceScaling { name: "mixed-angle", kappa: -1.5, t_exponent: None };
pub const HEISENBERG: ReferenceScaling = ReferenceScaling { name: "heisenberg", kappa: -2.0, t_exponent: None };

pub const REFERENCE_TABLE: [ReferenceScaling; 6] =
    [SQL, ZENO, TRANSVERSAL_SEMIGROUP, TRANSVERSAL_TCL, MIXED_ANGLE, HEISENBERG];

/// Expected asymptotic law for a model.
pub fn expected_scaling(model: &NoiseModel) -> ReferenceScaling {
    if model.lambda == 0.0 {
        return HEISENBERG;
    }
    let transversal = model.theta.cos().abs() > 1.0 - 1e-12;
    let semigroup = matches!(model.rate_kind, RateKind::Semigroup);
    match (model.is_pure_dephasing(), transversal, semigroup) {
        (true, _, true) => SQL,
        (true, _, false) => ZENO,
        (_, true, true) => TRANSVERSAL_SEMIGROUP,
        (_, true, false) => TRANSVERSAL_TCL,
        _ => MIXED_ANGLE,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn classification() {
        let m = |theta, kind| NoiseModel { theta, rate_kind: kind, ..Default::default() };
        let h = std::f64::consts::FRAC_PI_2;
        assert_eq!(expected_scaling(&m(h, RateKind::Semigroup)).name, "sql");
        assert_eq!(expected_scaling(&m(h, RateKind::TclOhmic)).name, "zeno");
        assert_eq!(expected_scaling(&m(0.0, RateKind::Semigroup)).name, "transversal-semigroup");
        assert_eq!(expected_scaling(&m(0.0, RateKind::TclOhmic)).name, "transversal-tcl");
        assert_eq!(expected_scaling(&m(0.3, RateKind::TclOhmic)).name, "mixed-angle");
        assert_eq!(expected_scaling(&NoiseModel::noiseless()).name, "heisenberg");
    }
}

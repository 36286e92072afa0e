use std::collections::HashMap;

use super::{ConcreteModel, ModelDefinition, ModelError, UncertainValue};

/// One coordinate of the uncertainty hypercube.
#[derive(Clone, Debug, PartialEq)]
pub struct UncertainParameter {
    pub name: String,
    pub value: UncertainValue,
}

/// Uncertain parameters in canonical (declaration) order.
pub fn uncertain_parameters(m: &ModelDefinition) -> Vec<UncertainParameter> {
    let mut by_path = HashMap::new();
    m.for_each_value(&mut |p, v| {
        by_path.insert(p.to_string(), *v);
    });
    m.uncertain_order
        .iter()
        .filter_map(|p| by_path.get(p).map(|v| UncertainParameter { name: p.clone(), value: *v }))
        .collect()
}

/// Maps a point of the unit hypercube onto every uncertain field.
///
/// Coordinate `j` drives the `j`-th entry of `uncertain_order`; fixed values
/// pass through unchanged.
pub fn resolve_scenario(m: &ModelDefinition, u: &[f64]) -> Result<ConcreteModel, ModelError> {
    if u.len() != m.uncertain_order.len() {
        return Err(ModelError::DimensionMismatch {
            expected: m.uncertain_order.len(),
            got: u.len(),
        });
    }
    let coord: HashMap<&str, f64> = m.uncertain_order.iter().map(String::as_str).zip(u.iter().copied()).collect();
    let mut missing = None;
    let concrete = m.map_values(&mut |path, v| match (v.is_fixed(), coord.get(path)) {
        (true, _) => v.resolve(0.0),
        (false, Some(&x)) => v.resolve(x),
        (false, None) => {
            missing.get_or_insert_with(|| path.to_string());
            v.mean()
        }
    });
    match missing {
        Some(id) => Err(ModelError::MissingReference { kind: "uncertain parameter", id }),
        None => Ok(concrete),
    }
}

/// Capital recovery factor `i (1+i)^n / ((1+i)^n - 1)`, tending to `1/n` at `i = 0`.
pub fn annualization_factor(i_rate: f64, lifetime: f64) -> Result<f64, ModelError> {
    if !(lifetime >= 1.0) || !lifetime.is_finite() {
        return Err(ModelError::Domain(format!("lifetime {lifetime} below one year")));
    }
    if !(i_rate >= 0.0) || !i_rate.is_finite() {
        return Err(ModelError::Domain(format!("interest rate {i_rate} is negative")));
    }
    if i_rate == 0.0 {
        return Ok(1.0 / lifetime);
    }
    // (1+i)^n - 1 via exp_m1 keeps precision for small rates.
    let growth_m1 = (lifetime * i_rate.ln_1p()).exp_m1();
    Ok(i_rate * (1.0 + growth_m1) / growth_m1)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn annualization_limits() {
        assert_eq!(annualization_factor(0.0, 20.0).unwrap(), 0.05);
        assert!((annualization_factor(0.05, 1.0).unwrap() - 1.05).abs() < 1e-15);
        assert!(matches!(annualization_factor(0.05, 0.5), Err(ModelError::Domain(_))));
        // Continuity at zero interest.
        let near = annualization_factor(1e-12, 20.0).unwrap();
        assert!((near - 0.05).abs() < 1e-12);
    }
}
